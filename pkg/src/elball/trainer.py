"""Minibatch training of ball embeddings: init, negatives, Adam, projection.

One epoch samples a minibatch (with replacement) from every nonempty
axiom bucket, takes an Adam step on the summed gradient, clamps all radii
to be non-negative, and restores Top's frozen parameters. Everything is
driven by a single seeded generator, so a (theory, config) pair maps to a
bitwise-reproducible embedding.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .embeddings import TOP_RADIUS, EmbeddingSet, GradientSet
from .losses import LossBatch, batch_gradient, batch_loss, bucket_losses
from .normalizer import NormalizedTheory

logger = logging.getLogger(__name__)


class TrainingError(Exception):
    pass


@dataclass
class TrainConfig:
    dim: int = 50
    margin: float = -0.1
    epochs: int = 1000
    batch_size: int = 32
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    negatives_per_positive: int = 1
    steps_per_epoch: int = 1
    neg_mode: str = "static"  # "static" (precomputed) or "fresh" (per epoch)
    eval_every: int = 0  # record full-theory loss every k epochs (0 = never)

    def __post_init__(self):
        if self.dim <= 0 or self.batch_size <= 0 or self.steps_per_epoch <= 0:
            raise ValueError("dim, batch_size, and steps_per_epoch must be positive")
        if self.epochs < 0 or self.negatives_per_positive < 0:
            raise ValueError("epochs and negatives_per_positive must be non-negative")
        if self.neg_mode not in ("static", "fresh"):
            raise ValueError(f"unknown neg_mode {self.neg_mode!r}")


@dataclass
class LossTrace:
    minibatch: list[float] = field(default_factory=list)
    full: list[tuple[int, float]] = field(default_factory=list)  # (epoch, loss)


class Adam:
    """Adam with bias correction over a dict of parameter arrays."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for key, p in params.items():
            grad = grads[key]
            if key not in self.m:
                self.m[key] = np.zeros_like(p)
                self.v[key] = np.zeros_like(p)
            self.m[key] = self.beta1 * self.m[key] + (1.0 - self.beta1) * grad
            self.v[key] = self.beta2 * self.v[key] + (1.0 - self.beta2) * grad * grad
            m_hat = self.m[key] / bc1
            v_hat = self.v[key] / bc2
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def adam_step(params, grads, state: Adam, lr: float | None = None):
    """Single optimizer step; mutates params and state, returns them."""
    if lr is not None:
        state.lr = lr
    state.step(params, grads)
    return params, state


def init_embeddings(theory: NormalizedTheory, cfg: TrainConfig) -> EmbeddingSet:
    """Elementwise uniform(0,1) init; Top's radius is the frozen sentinel."""
    rng = np.random.default_rng(cfg.seed)
    n_classes = len(theory.classes)
    n_relations = len(theory.relations)
    e = EmbeddingSet(
        class_centers=rng.uniform(0.0, 1.0, size=(n_classes, cfg.dim)),
        class_radii=rng.uniform(0.0, 1.0, size=n_classes),
        rel_vectors=rng.uniform(0.0, 1.0, size=(n_relations, cfg.dim)),
    )
    e.class_radii[e.top] = TOP_RADIUS
    return e


def generate_negatives(
    nf3: list[tuple[int, int, int]],
    candidates: list[int],
    k: int,
    rng: np.random.Generator,
    max_retries: int = 100,
) -> tuple[list[tuple[int, int, int]], int]:
    """Corrupt NF3 axioms (C, r, D) in one class slot, avoiding asserted axioms.

    Returns (negatives, skipped) where skipped counts positives whose retry
    budget was exhausted (possible on dense interaction graphs).
    """
    if k == 0:
        return [], 0
    if not candidates:
        raise TrainingError("no candidate classes for negative generation")
    asserted = set(nf3)
    cand = np.asarray(candidates, dtype=np.intp)
    negatives: list[tuple[int, int, int]] = []
    skipped = 0
    for c, r, d in nf3:
        for _ in range(k):
            for _ in range(max_retries):
                corrupt_head = rng.integers(2) == 0
                replacement = int(cand[rng.integers(len(cand))])
                corrupted = (replacement, r, d) if corrupt_head else (c, r, replacement)
                if corrupted not in asserted:
                    negatives.append(corrupted)
                    break
            else:
                skipped += 1
    if skipped:
        logger.warning("negative sampling skipped %d positives (budget exhausted)", skipped)
    return negatives, skipped


_BUCKETS = ("nf1", "nf2", "nf3", "nf4", "bot1", "bot2", "bot4")


def train(theory: NormalizedTheory, cfg: TrainConfig) -> tuple[EmbeddingSet, LossTrace]:
    """Run the full training loop and return (embeddings, loss trace)."""
    if theory.n_axioms() == 0:
        raise TrainingError("cannot train on an empty theory")

    e = init_embeddings(theory, cfg)
    top_center = e.class_centers[e.top].copy()
    rng = np.random.default_rng([cfg.seed, 1])
    optimizer = Adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    trace = LossTrace()

    # classes eligible as corruption targets: everything but Top/Bot
    candidates = [
        cid for cid in range(len(theory.classes)) if cid not in (e.top, e.bot)
    ]

    arrays = {
        "nf1": np.asarray(theory.nf1, dtype=np.intp).reshape(-1, 2),
        "nf2": np.asarray(theory.nf2, dtype=np.intp).reshape(-1, 3),
        "nf3": np.asarray(theory.nf3, dtype=np.intp).reshape(-1, 3),
        "nf4": np.asarray(theory.nf4, dtype=np.intp).reshape(-1, 3),
        "bot1": np.asarray(theory.bot1, dtype=np.intp),
        "bot2": np.asarray(theory.bot2, dtype=np.intp).reshape(-1, 2),
        "bot4": np.asarray(theory.bot4, dtype=np.intp).reshape(-1, 2),
    }

    # only corrupt positives whose class slots are both ordinary classes;
    # a negative keeping Top would inherit its unbounded radius
    cand_set = set(candidates)
    corruptible = [
        (c, r, d) for c, r, d in theory.nf3 if c in cand_set and d in cand_set
    ]

    def make_negatives():
        negs, _ = generate_negatives(
            corruptible, candidates, cfg.negatives_per_positive, rng
        )
        return np.asarray(negs, dtype=np.intp).reshape(-1, 3)

    neg_array = make_negatives() if corruptible else np.zeros((0, 3), dtype=np.intp)

    full_batch = LossBatch.from_theory(theory, cfg.margin)

    for epoch in range(cfg.epochs):
        if cfg.neg_mode == "fresh" and corruptible:
            neg_array = make_negatives()
        epoch_loss = 0.0
        for _ in range(cfg.steps_per_epoch):
            batch = LossBatch(gamma=cfg.margin)
            for name in _BUCKETS:
                bucket = arrays[name]
                if len(bucket):
                    pick = rng.integers(len(bucket), size=cfg.batch_size)
                    setattr(batch, name, bucket[pick])
            if len(neg_array):
                pick = rng.integers(len(neg_array), size=cfg.batch_size)
                batch.neg = neg_array[pick]

            loss = batch_loss(batch, e)
            if not np.isfinite(loss):
                per_bucket = bucket_losses(batch, e)
                offender = next(
                    (k for k, v in per_bucket.items() if not np.isfinite(v)), "?"
                )
                raise TrainingError(
                    f"non-finite loss at epoch {epoch} in bucket {offender}: {per_bucket}"
                )
            epoch_loss = loss

            grads = batch_gradient(batch, e)
            optimizer.step(
                {
                    "class_centers": e.class_centers,
                    "class_radii": e.class_radii,
                    "rel_vectors": e.rel_vectors,
                },
                {
                    "class_centers": grads.class_centers,
                    "class_radii": grads.class_radii,
                    "rel_vectors": grads.rel_vectors,
                },
            )
            # project radii back onto the feasible set and re-freeze Top
            np.maximum(e.class_radii, 0.0, out=e.class_radii)
            e.class_centers[e.top] = top_center
            e.class_radii[e.top] = TOP_RADIUS

        trace.minibatch.append(epoch_loss)
        if cfg.eval_every and (epoch + 1) % cfg.eval_every == 0:
            trace.full.append((epoch + 1, batch_loss(full_batch, e)))

    return e, trace
