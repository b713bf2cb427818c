"""The bundled family-domain knowledge base.

Twelve axioms exercising every normal form; small enough to train in 2D
and eyeball the resulting balls.
"""

from .ontology import Ontology, parse_ontology

FAMILY_KB = """\
Male < Person
Female < Person
Father < Male
Mother < Female
Father < Parent
Mother < Parent
Female and Male < Bot
Female and Parent < Mother
Male and Parent < Father
hasChild some Person < Parent
Parent < Person
Parent < hasChild some Top
"""


def family_ontology() -> Ontology:
    return parse_ontology(FAMILY_KB)
