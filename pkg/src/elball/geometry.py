"""n-ball primitives, the two-ball intersection enclosure, and the model checker.

The checker decides, axiom by axiom, whether an embedding satisfies the
geometric reading of a normalized theory: containment for C < D, exact
intersection-ball containment for C and D < E, translated containment for
C < r some D, disjointness for C and D < Bot, and zero radius for the
remaining bottom forms. Balls are closed for containment but touching
boundary spheres still count as disjoint (the denoted balls are open).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .embeddings import TOP_RADIUS, EmbeddingSet
from .normalizer import NormalizedTheory


class GeometryError(Exception):
    pass


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError(f"negative radius {self.radius}")


def _check_dims(a: Ball, b: Ball) -> None:
    if a.center.shape != b.center.shape:
        raise GeometryError(
            f"dimension mismatch: {a.center.shape} vs {b.center.shape}"
        )


def containment_violation(inner: Ball, outer: Ball) -> float:
    """max(0, ||c_in - c_out|| + r_in - r_out); zero iff inner lies in outer."""
    _check_dims(inner, outer)
    gap = float(np.linalg.norm(inner.center - outer.center))
    return max(0.0, gap + inner.radius - outer.radius)


def intersection_ball(a: Ball, b: Ball) -> Optional[Ball]:
    """Smallest ball containing the intersection of a and b, or None if disjoint.

    When one ball contains the other the smaller ball is the tight
    enclosure (this also covers concentric centers, where the chord
    formula is singular). Touching boundary spheres count as disjoint.
    """
    _check_dims(a, b)
    gap = float(np.linalg.norm(a.center - b.center))
    if gap >= a.radius + b.radius:
        return None
    if gap + min(a.radius, b.radius) <= max(a.radius, b.radius):
        return a if a.radius <= b.radius else b
    h = (a.radius**2 - b.radius**2 + gap**2) / (2.0 * gap)
    center = a.center + (h / gap) * (b.center - a.center)
    radius = math.sqrt(max(0.0, a.radius**2 - h**2))
    return Ball(center, radius)


@dataclass
class AxiomCheck:
    form: str
    axiom: tuple
    text: str
    satisfied: bool
    violation: float
    informational: bool = False

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "axiom": self.text,
            "satisfied": self.satisfied,
            "violation": self.violation,
            "informational": self.informational,
        }


@dataclass
class ModelReport:
    checks: list[AxiomCheck] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def overall(self) -> bool:
        return all(c.satisfied for c in self.checks if not c.informational)

    @property
    def max_violation(self) -> float:
        binding = [c.violation for c in self.checks if not c.informational]
        return max(binding, default=0.0)

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "tolerance": self.tolerance,
            "max_violation": self.max_violation,
            "checks": [c.to_dict() for c in self.checks],
        }


def check_model(theory: NormalizedTheory, e: EmbeddingSet, tol: float) -> ModelReport:
    """Check the Table-1 conditions of a finished embedding, axiom by axiom.

    NF4 is reported informationally only: under the translation relation
    model its geometric reading is trivially satisfied, so no pass/fail
    semantics is attached. Top on a right-hand side always passes; Top on a
    left-hand side (other than Top < Top) is unsatisfiable by construction
    and reported with an infinite violation.
    """
    top = e.top
    names = theory.classes

    def require(cid: int) -> None:
        if cid >= e.n_classes:
            raise GeometryError(f"no embedding for class {names.name(cid)!r}")

    def ball(cid: int) -> Ball:
        require(cid)
        return Ball(e.class_centers[cid], float(e.class_radii[cid]))

    report = ModelReport(tolerance=tol)

    def record(form, axiom, text, violation, informational=False):
        report.checks.append(
            AxiomCheck(
                form=form,
                axiom=axiom,
                text=text,
                satisfied=bool(violation <= tol),
                violation=float(violation),
                informational=informational,
            )
        )

    rel_name = theory.relations.name

    for c, d in theory.nf1:
        text = f"{names.name(c)} < {names.name(d)}"
        if d == top or c == d:
            v = 0.0
        elif c == top:
            v = math.inf
        else:
            v = containment_violation(ball(c), ball(d))
        record("NF1", (c, d), text, v)

    for c, d, ee in theory.nf2:
        text = f"{names.name(c)} and {names.name(d)} < {names.name(ee)}"
        if c == top and d == top:
            record("NF2", (c, d, ee), text, 0.0 if ee == top else math.inf)
            continue
        if c == top:
            inter = ball(d)
        elif d == top:
            inter = ball(c)
        else:
            inter = intersection_ball(ball(c), ball(d))
        if inter is None or ee == top:
            v = 0.0
        else:
            v = containment_violation(inter, ball(ee))
        record("NF2", (c, d, ee), text, v)

    for c, r, d in theory.nf3:
        text = f"{names.name(c)} < {rel_name(r)} some {names.name(d)}"
        if d == top:
            v = 0.0
        elif c == top:
            v = math.inf
        else:
            require(c)
            translated = Ball(
                e.class_centers[c] + e.rel_vectors[r], float(e.class_radii[c])
            )
            v = containment_violation(translated, ball(d))
        record("NF3", (c, r, d), text, v)

    for r, c, d in theory.nf4:
        text = f"{rel_name(r)} some {names.name(c)} < {names.name(d)}"
        require(c)
        require(d)
        gap = float(
            np.linalg.norm(e.class_centers[c] - e.rel_vectors[r] - e.class_centers[d])
        )
        v = max(0.0, gap - float(e.class_radii[c]) - float(e.class_radii[d]))
        record("NF4", (r, c, d), text, v, informational=True)

    for c in theory.bot1:
        text = f"{names.name(c)} < Bot"
        v = math.inf if c == top else max(0.0, float(e.class_radii[c]))
        record("Bot1", (c,), text, v)

    for c, d in theory.bot2:
        text = f"{names.name(c)} and {names.name(d)} < Bot"
        if c == top or d == top:
            v = math.inf
        else:
            bc, bd = ball(c), ball(d)
            gap = float(np.linalg.norm(bc.center - bd.center))
            v = max(0.0, bc.radius + bd.radius - gap)
        record("Bot2", (c, d), text, v)

    for r, c in theory.bot4:
        text = f"{rel_name(r)} some {names.name(c)} < Bot"
        v = math.inf if c == top else max(0.0, float(e.class_radii[c]))
        record("Bot4", (r, c), text, v)

    return report
