"""Embedding tables: per-class center and radius, per-relation translation.

Classes and relations are addressed by their vocabulary handles, so the
tables are plain arrays indexed by handle. Top's radius is a finite
sentinel (the largest representable float) standing in for infinity; Top's
parameters are frozen during training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ontology import BOT_ID, TOP_ID

TOP_RADIUS = float(np.finfo(np.float64).max)


@dataclass
class EmbeddingSet:
    class_centers: np.ndarray  # (n_classes, dim)
    class_radii: np.ndarray  # (n_classes,)
    rel_vectors: np.ndarray  # (n_relations, dim)
    top: int = TOP_ID
    bot: int = BOT_ID

    @property
    def dim(self) -> int:
        return self.class_centers.shape[1]

    @property
    def n_classes(self) -> int:
        return self.class_centers.shape[0]

    @property
    def n_relations(self) -> int:
        return self.rel_vectors.shape[0]

    def copy(self) -> "EmbeddingSet":
        return EmbeddingSet(
            self.class_centers.copy(),
            self.class_radii.copy(),
            self.rel_vectors.copy(),
            self.top,
            self.bot,
        )

    def zeros_like(self) -> "EmbeddingSet":
        return EmbeddingSet(
            np.zeros_like(self.class_centers),
            np.zeros_like(self.class_radii),
            np.zeros_like(self.rel_vectors),
            self.top,
            self.bot,
        )


GradientSet = EmbeddingSet
