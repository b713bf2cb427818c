"""A guided tour of the normalization rewriter.

Feeds progressively trickier axioms through the normalizer and prints
the resulting normal-form buckets, showing how conjunctions split,
complex fillers get fresh names, and Bot is handled specially.

Run with: python3 demos/normal_forms_tour.py
"""

from elball.normalizer import UnsupportedAxiomError, normalize
from elball.ontology import format_axiom, parse_ontology

EXAMPLES = [
    ("already normal", "Male < Person"),
    ("conjunction on the right splits", "Father < Male and Parent"),
    ("complex filler gets a fresh name", "A < r some (B and C)"),
    ("both sides complex", "Father and Mother < hasChild some Person"),
    ("three-way conjunction folds pairwise", "A and B and C < D"),
    ("disjointness", "Female and Male < Bot"),
    ("Bot on the left is vacuous", "Bot < A\nA and Bot < B"),
    ("unsatisfiable existential", "r some A < Bot"),
]


def main():
    for title, text in EXAMPLES:
        print(f"--- {title} ---")
        for line in text.splitlines():
            print(f"input:  {line}")
        theory = normalize(parse_ontology(text))
        onto = theory.as_ontology()
        if not onto.axioms:
            print("output: (nothing; the input is a tautology)")
        for axiom in onto.axioms:
            print(f"output: {format_axiom(axiom, onto)}")
        if theory.fresh:
            names = sorted(theory.classes.name(f) for f in theory.fresh)
            print(f"fresh names introduced: {', '.join(names)}")
        print()

    print("--- Bot inside a right-hand existential has no normal form ---")
    try:
        normalize(parse_ontology("A < r some Bot"))
    except UnsupportedAxiomError as exc:
        print(f"rejected: {exc}")


if __name__ == "__main__":
    main()
