"""Resnik/Lin similarity over a subsumption taxonomy, with best-match average.

Information content comes from annotation frequency: entity annotations
propagate to all ancestors, p(c) is the annotated fraction relative to the
root, and IC(c) = -log p(c). Classes with zero annotation support have
undefined IC and are excluded from common-ancestor maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

import networkx as nx

ROOT = "Top"


class SemSimError(Exception):
    pass


@dataclass
class TaxonomyIndex:
    """Condensed (cycle-free) subsumption DAG with annotation-based IC."""

    root: Hashable
    node_of: dict[Hashable, int]  # class -> condensation node
    ancestors: dict[int, frozenset[int]]  # node -> ancestor nodes incl. self
    ic: dict[int, Optional[float]]  # node -> IC, None when unannotated
    annotations: dict[Hashable, frozenset[Hashable]]  # entity -> classes

    def class_ic(self, cls) -> Optional[float]:
        return self.ic[self._node(cls)]

    def _node(self, cls) -> int:
        try:
            return self.node_of[cls]
        except KeyError:
            raise SemSimError(f"unknown class {cls!r}") from None

    def resnik(self, c1, c2) -> float:
        """Max IC over common ancestors (the root guarantees a floor of 0)."""
        common = self.ancestors[self._node(c1)] & self.ancestors[self._node(c2)]
        values = [self.ic[n] for n in common if self.ic[n] is not None]
        return max(values, default=0.0)

    def lin(self, c1, c2) -> float:
        ic1, ic2 = self.class_ic(c1), self.class_ic(c2)
        if ic1 is None or ic2 is None or ic1 + ic2 == 0.0:
            return 0.0
        return 2.0 * self.resnik(c1, c2) / (ic1 + ic2)

    def pairwise(self, measure: str) -> Callable[[Hashable, Hashable], float]:
        try:
            return {"resnik": self.resnik, "lin": self.lin}[measure]
        except KeyError:
            raise SemSimError(f"unknown measure {measure!r}") from None

    def entity_similarity(self, e1, e2, measure: str = "resnik") -> float:
        """BMA similarity between two annotated entities; -inf if unannotated."""
        a1 = self.annotations.get(e1, frozenset())
        a2 = self.annotations.get(e2, frozenset())
        if not a1 or not a2:
            return -math.inf
        return bma_similarity(a1, a2, self.pairwise(measure))


def bma_similarity(
    classes1: Iterable[Hashable],
    classes2: Iterable[Hashable],
    pairwise: Callable[[Hashable, Hashable], float],
) -> float:
    """Symmetric best-match average of pairwise class similarities."""
    c1, c2 = list(classes1), list(classes2)
    if not c1 or not c2:
        raise SemSimError("best-match average requires nonempty annotation sets")
    best1 = [max(pairwise(a, b) for b in c2) for a in c1]
    best2 = [max(pairwise(a, b) for a in c1) for b in c2]
    return 0.5 * (sum(best1) / len(best1) + sum(best2) / len(best2))


def build_taxonomy(
    edges: Iterable[tuple[Hashable, Hashable]],
    annotations: dict[Hashable, Iterable[Hashable]],
    root: Hashable = ROOT,
) -> TaxonomyIndex:
    """Index a taxonomy from (subclass, superclass) edges and entity annotations.

    Cycles are collapsed to equivalence groups; classes without an asserted
    superclass hang under the root so every class has the root as ancestor.
    """
    graph = nx.DiGraph()
    graph.add_node(root)
    for child, parent in edges:
        if child != parent:
            graph.add_edge(child, parent)
    for cls in list(graph.nodes):
        if cls != root and graph.out_degree(cls) == 0:
            graph.add_edge(cls, root)

    condensed = nx.condensation(graph)
    node_of = {
        cls: node for node, data in condensed.nodes(data=True) for cls in data["members"]
    }
    ancestors = {
        node: frozenset(nx.descendants(condensed, node)) | {node}
        for node in condensed.nodes
    }

    annot: dict[Hashable, frozenset] = {}
    counts: dict[int, int] = {node: 0 for node in condensed.nodes}
    for entity, classes in annotations.items():
        classes = frozenset(classes)
        for cls in classes:
            if cls not in node_of:
                raise SemSimError(
                    f"entity {entity!r} annotated with unknown class {cls!r}"
                )
        annot[entity] = classes
        closure = frozenset().union(*(ancestors[node_of[c]] for c in classes)) if classes else frozenset()
        for node in closure:
            counts[node] += 1

    total = counts[node_of[root]]
    ic: dict[int, Optional[float]] = {}
    for node, count in counts.items():
        ic[node] = -math.log(count / total) if count > 0 and total > 0 else None

    return TaxonomyIndex(
        root=root, node_of=node_of, ancestors=ancestors, ic=ic, annotations=annot
    )


def semsim_score_fn(index: TaxonomyIndex, measure: str = "resnik"):
    """Adapter matching the evaluation module's batch score interface."""

    def fn(head, rel, tails):
        return [index.entity_similarity(head, t, measure) for t in tails]

    return fn
