"""ABox elimination and rewriting into the four EL++ normal forms.

The bottom forms are split out into their own buckets, so a normalized
theory ends up with seven:

    NF1   C < D             BOT1  C < Bot
    NF2   C and D < E       BOT2  C and D < Bot
    NF3   C < r some D
    NF4   r some C < D      BOT4  r some C < Bot

where every argument is an atomic class (possibly fresh or nominal-derived).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .ontology import (
    BOT,
    BOT_ID,
    Atomic,
    Axiom,
    Concept,
    Conjunction,
    Existential,
    GCI,
    Instantiation,
    Nominal,
    Ontology,
    RoleAssertion,
    Vocabulary,
)

FRESH_PREFIX = "N#"


class NormalizationError(Exception):
    pass


class UnsupportedAxiomError(NormalizationError):
    """No normal form exists, e.g. Bot inside an existential filler on the right."""


class NormalForm(Enum):
    NF1 = "NF1"
    NF2 = "NF2"
    NF3 = "NF3"
    NF4 = "NF4"
    BOT1 = "Bot1"
    BOT2 = "Bot2"
    BOT4 = "Bot4"


@dataclass
class NormalizedTheory:
    """Seven disjoint axiom buckets over an augmented class vocabulary.

    NF3 tuples are (C, r, D) for C < r some D; NF4 tuples are (r, C, D)
    for r some C < D; BOT4 tuples are (r, C).
    """

    classes: Vocabulary
    relations: Vocabulary
    nf1: list[tuple[int, int]] = field(default_factory=list)
    nf2: list[tuple[int, int, int]] = field(default_factory=list)
    nf3: list[tuple[int, int, int]] = field(default_factory=list)
    nf4: list[tuple[int, int, int]] = field(default_factory=list)
    bot1: list[int] = field(default_factory=list)
    bot2: list[tuple[int, int]] = field(default_factory=list)
    bot4: list[tuple[int, int]] = field(default_factory=list)
    fresh: set[int] = field(default_factory=set)

    @property
    def nominal_classes(self) -> set[int]:
        return {
            cid
            for cid, name in enumerate(self.classes)
            if name.startswith("{") and name.endswith("}")
        }

    def counts(self) -> dict[str, int]:
        return {
            "NF1": len(self.nf1),
            "NF2": len(self.nf2),
            "NF3": len(self.nf3),
            "NF4": len(self.nf4),
            "Bot1": len(self.bot1),
            "Bot2": len(self.bot2),
            "Bot4": len(self.bot4),
        }

    def n_axioms(self) -> int:
        return sum(self.counts().values())

    def as_ontology(self) -> Ontology:
        """View the buckets as an ontology of GCIs (for printing and round trips)."""
        onto = Ontology(
            classes=self.classes.copy(), relations=self.relations.copy()
        )
        for c, d in self.nf1:
            onto.add(GCI(Atomic(c), Atomic(d)))
        for c, d, e in self.nf2:
            onto.add(GCI(Conjunction(Atomic(c), Atomic(d)), Atomic(e)))
        for c, r, d in self.nf3:
            onto.add(GCI(Atomic(c), Existential(r, Atomic(d))))
        for r, c, d in self.nf4:
            onto.add(GCI(Existential(r, Atomic(c)), Atomic(d)))
        for c in self.bot1:
            onto.add(GCI(Atomic(c), BOT))
        for c, d in self.bot2:
            onto.add(GCI(Conjunction(Atomic(c), Atomic(d)), BOT))
        for r, c in self.bot4:
            onto.add(GCI(Existential(r, Atomic(c)), BOT))
        return onto


def nominal_class_name(individual_name: str) -> str:
    return "{" + individual_name + "}"


def eliminate_abox(onto: Ontology) -> Ontology:
    """Replace individuals with singleton classes.

    r(a,b) becomes {a} < r some {b}; C(a) becomes {a} < C; nominal concepts
    inside GCIs become atomic classes named "{a}".
    """
    out = Ontology(
        classes=onto.classes.copy(),
        relations=onto.relations.copy(),
        individuals=onto.individuals.copy(),
    )

    def nominal_class(individual: int) -> Concept:
        name = nominal_class_name(onto.individuals.name(individual))
        return Atomic(out.classes.intern(name))

    def convert(concept: Concept) -> Concept:
        if isinstance(concept, Nominal):
            return nominal_class(concept.individual)
        if isinstance(concept, Conjunction):
            return Conjunction(convert(concept.left), convert(concept.right))
        if isinstance(concept, Existential):
            return Existential(concept.relation, convert(concept.filler))
        return concept

    for axiom, position in zip(onto.axioms, onto.positions):
        if isinstance(axiom, RoleAssertion):
            converted: Axiom = GCI(
                nominal_class(axiom.subject),
                Existential(axiom.relation, nominal_class(axiom.object)),
            )
        elif isinstance(axiom, Instantiation):
            converted = GCI(nominal_class(axiom.individual), convert(axiom.concept))
        else:
            converted = GCI(convert(axiom.sub), convert(axiom.sup))
        out.add(converted, position)
    return out


def _is_atomic(concept: Concept) -> bool:
    return isinstance(concept, Atomic)


def _contains_bot(concept: Concept) -> bool:
    if isinstance(concept, Atomic):
        return concept.cls == BOT_ID
    if isinstance(concept, Conjunction):
        return _contains_bot(concept.left) or _contains_bot(concept.right)
    if isinstance(concept, Existential):
        return _contains_bot(concept.filler)
    return False


def _flatten_conjunction(concept: Concept) -> list[Concept]:
    if isinstance(concept, Conjunction):
        return _flatten_conjunction(concept.left) + _flatten_conjunction(concept.right)
    return [concept]


def classify_axiom(axiom: Axiom) -> Optional[NormalForm]:
    """Which bucket the axiom already fits, or None when it is not normal."""
    if not isinstance(axiom, GCI):
        return None
    sub, sup = axiom.sub, axiom.sup
    if isinstance(sub, Atomic) and sub.cls != BOT_ID:
        if isinstance(sup, Atomic):
            return NormalForm.BOT1 if sup.cls == BOT_ID else NormalForm.NF1
        if (
            isinstance(sup, Existential)
            and isinstance(sup.filler, Atomic)
            and sup.filler.cls != BOT_ID
        ):
            return NormalForm.NF3
        return None
    if isinstance(sub, Conjunction):
        conjuncts = _flatten_conjunction(sub)
        if len(conjuncts) == 2 and all(
            isinstance(c, Atomic) and c.cls != BOT_ID for c in conjuncts
        ):
            if isinstance(sup, Atomic):
                return NormalForm.BOT2 if sup.cls == BOT_ID else NormalForm.NF2
        return None
    if (
        isinstance(sub, Existential)
        and isinstance(sub.filler, Atomic)
        and sub.filler.cls != BOT_ID
    ):
        if isinstance(sup, Atomic):
            return NormalForm.BOT4 if sup.cls == BOT_ID else NormalForm.NF4
    return None


def normalize(onto: Ontology) -> NormalizedTheory:
    """Rewrite a TBox-only ontology into the seven normal-form buckets.

    Fresh classes are drawn from the "N#<k>" namespace in introduction
    order; identical complex subconcepts reuse the same fresh name within
    one run (per rewriting polarity). Axioms whose left-hand side contains
    Bot are dropped as tautologies; duplicates are deduplicated.
    """
    for axiom in onto.axioms:
        if not isinstance(axiom, GCI):
            raise NormalizationError(
                "ontology still contains ABox axioms; run eliminate_abox first"
            )

    theory = NormalizedTheory(
        classes=onto.classes.copy(), relations=onto.relations.copy()
    )
    # Fresh-name sharing is per polarity: "sub" entries carry a defining
    # axiom  fresh < concept,  "sup" entries carry  concept < fresh.
    fresh_of: dict[tuple[str, Concept], int] = {}
    counter = 0
    queue: deque[GCI] = deque(a for a in onto.axioms if isinstance(a, GCI))
    seen: set[tuple] = set()

    def fresh(concept: Concept, polarity: str) -> tuple[Atomic, bool]:
        nonlocal counter
        key = (polarity, concept)
        if key in fresh_of:
            return Atomic(fresh_of[key]), False
        cid = theory.classes.intern(f"{FRESH_PREFIX}{counter}")
        counter += 1
        theory.fresh.add(cid)
        fresh_of[key] = cid
        return Atomic(cid), True

    def emit(form: NormalForm, entry: tuple) -> None:
        key = (form, entry)
        if key in seen:
            return
        seen.add(key)
        bucket = {
            NormalForm.NF1: theory.nf1,
            NormalForm.NF2: theory.nf2,
            NormalForm.NF3: theory.nf3,
            NormalForm.NF4: theory.nf4,
            NormalForm.BOT2: theory.bot2,
            NormalForm.BOT4: theory.bot4,
        }.get(form)
        if form is NormalForm.BOT1:
            theory.bot1.append(entry[0])
        else:
            bucket.append(entry)

    while queue:
        axiom = queue.popleft()
        sub, sup = axiom.sub, axiom.sup
        # Bot anywhere in a (purely positive) EL concept collapses it to Bot,
        # so the inclusion is a tautology.
        if _contains_bot(sub):
            continue

        form = classify_axiom(axiom)
        if form is not None:
            if form in (NormalForm.NF1, NormalForm.BOT1):
                entry: tuple = (
                    (sub.cls, sup.cls) if form is NormalForm.NF1 else (sub.cls,)
                )
            elif form in (NormalForm.NF2, NormalForm.BOT2):
                left, right = _flatten_conjunction(sub)
                entry = (
                    (left.cls, right.cls, sup.cls)
                    if form is NormalForm.NF2
                    else (left.cls, right.cls)
                )
            elif form is NormalForm.NF3:
                entry = (sub.cls, sup.relation, sup.filler.cls)
            else:  # NF4 / BOT4
                entry = (
                    (sub.relation, sub.filler.cls, sup.cls)
                    if form is NormalForm.NF4
                    else (sub.relation, sub.filler.cls)
                )
            emit(form, entry)
            continue

        # (v) split conjunctions on the right
        if isinstance(sup, Conjunction):
            queue.appendleft(GCI(sub, sup.right))
            queue.appendleft(GCI(sub, sup.left))
            continue

        # Bot on the right in a non-normal position
        if isinstance(sup, Existential) and _contains_bot(sup):
            raise UnsupportedAxiomError(
                "no normal form exists for Bot inside an existential filler "
                "on the right-hand side"
            )

        # (iii) complex on both sides: route through a fresh middle class
        if not _is_atomic(sub) and not _is_atomic(sup):
            mid, is_new = fresh(sub, "sup")
            if is_new:
                queue.appendleft(GCI(sub, mid))
            queue.appendleft(GCI(mid, sup))
            continue

        if isinstance(sub, Atomic):
            # (iv) C < r some D-hat with complex filler
            if isinstance(sup, Existential):
                filler, is_new = fresh(sup.filler, "sub")
                queue.appendleft(GCI(sub, Existential(sup.relation, filler)))
                if is_new:
                    queue.appendleft(GCI(filler, sup.filler))
                continue
            raise NormalizationError(f"cannot normalize axiom {axiom!r}")

        if isinstance(sub, Existential):
            # (ii) r some C-hat < D with complex filler
            filler, is_new = fresh(sub.filler, "sup")
            if is_new:
                queue.appendleft(GCI(sub.filler, filler))
            queue.appendleft(GCI(Existential(sub.relation, filler), sup))
            continue

        # sub is a conjunction with an atomic right-hand side
        conjuncts = _flatten_conjunction(sub)
        complex_idx = next(
            (i for i, c in enumerate(conjuncts) if not _is_atomic(c)), None
        )
        if complex_idx is not None:
            # (i) replace the first complex conjunct with a fresh class
            replacement, is_new = fresh(conjuncts[complex_idx], "sup")
            if is_new:
                queue.appendleft(GCI(conjuncts[complex_idx], replacement))
            conjuncts[complex_idx] = replacement
        else:
            # more than two atomic conjuncts: fold the first pair
            pair = Conjunction(conjuncts[0], conjuncts[1])
            replacement, is_new = fresh(pair, "sup")
            if is_new:
                queue.appendleft(GCI(pair, replacement))
            conjuncts = [replacement] + conjuncts[2:]
        rebuilt = conjuncts[0]
        for c in conjuncts[1:]:
            rebuilt = Conjunction(rebuilt, c)
        queue.appendleft(GCI(rebuilt, sup))

    return theory
