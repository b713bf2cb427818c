"""Training losses for the seven normal forms plus corrupted negatives.

Every loss is a sum of hinge terms over ball centers/radii plus unit-sphere
normalization terms |  ||center|| - 1 | for each class operand. Values and
analytic gradients are vectorized over index arrays; scalar wrappers cover
single axioms. Subgradient convention at non-differentiable points: the
zero side (hinges contribute nothing at the kink, the norm direction is
zero at a zero vector, sign is zero exactly on the unit sphere).

Top participates with its sentinel radius, its normalization term is
skipped (its center is frozen and carries no unit-sphere constraint), and
it receives zero gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingSet, GradientSet
from .normalizer import NormalizedTheory


class MissingSymbolError(Exception):
    pass


def _rows(idx, width: int) -> np.ndarray:
    arr = np.asarray(idx, dtype=np.intp)
    if arr.ndim == 1 and width == 1:
        return arr
    return arr.reshape(-1, width)


def _dist(u: np.ndarray) -> np.ndarray:
    return np.linalg.norm(u, axis=-1)


def _dir(u: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(u, axis=-1, keepdims=True)
    return np.divide(u, d, out=np.zeros_like(u), where=d > 0)


def _check_symbols(e: EmbeddingSet, classes: np.ndarray, relations=None) -> None:
    if classes.size and int(classes.max()) >= e.n_classes:
        raise MissingSymbolError("class handle outside the embedding table")
    if relations is not None and relations.size and int(relations.max()) >= e.n_relations:
        raise MissingSymbolError("relation handle outside the embedding table")


def _norm_penalty(e: EmbeddingSet, idx: np.ndarray) -> np.ndarray:
    pen = np.abs(_dist(e.class_centers[idx]) - 1.0)
    return np.where(idx == e.top, 0.0, pen)


def _acc_norm_penalty(e: EmbeddingSet, g: GradientSet, idx: np.ndarray) -> None:
    c = e.class_centers[idx]
    n = np.linalg.norm(c, axis=-1, keepdims=True)
    contrib = np.sign(n - 1.0) * np.divide(c, n, out=np.zeros_like(c), where=n > 0)
    np.add.at(g.class_centers, idx, contrib)


# --- per-form terms (geometric, normalization) ---------------------------


def nf1_terms(e, c, d, gamma):
    c = np.asarray(c, dtype=np.intp)
    d = np.asarray(d, dtype=np.intp)
    _check_symbols(e, np.concatenate([np.atleast_1d(c), np.atleast_1d(d)]))
    geom = np.maximum(
        0.0,
        _dist(e.class_centers[c] - e.class_centers[d])
        + e.class_radii[c]
        - e.class_radii[d]
        - gamma,
    )
    return geom, _norm_penalty(e, c) + _norm_penalty(e, d)


def nf2_terms(e, c, d, ee, gamma):
    c, d, ee = (np.asarray(x, dtype=np.intp) for x in (c, d, ee))
    _check_symbols(e, np.concatenate([np.atleast_1d(x) for x in (c, d, ee)]))
    cc, cd, ce = e.class_centers[c], e.class_centers[d], e.class_centers[ee]
    rc, rd, re_ = e.class_radii[c], e.class_radii[d], e.class_radii[ee]
    geom = (
        np.maximum(0.0, _dist(cc - cd) - rc - rd - gamma)
        + np.maximum(0.0, _dist(cc - ce) - rc - gamma)
        # the printed objective reuses r(c), not r(d), in the third term
        + np.maximum(0.0, _dist(cd - ce) - rc - gamma)
        + np.maximum(0.0, np.minimum(rc, rd) - re_ - gamma)
    )
    norm = _norm_penalty(e, c) + _norm_penalty(e, d) + _norm_penalty(e, ee)
    return geom, norm


def nf3_terms(e, c, r, d, gamma):
    c, r, d = (np.asarray(x, dtype=np.intp) for x in (c, r, d))
    _check_symbols(e, np.concatenate([np.atleast_1d(c), np.atleast_1d(d)]), np.atleast_1d(r))
    geom = np.maximum(
        0.0,
        _dist(e.class_centers[c] + e.rel_vectors[r] - e.class_centers[d])
        + e.class_radii[c]
        - e.class_radii[d]
        - gamma,
    )
    return geom, _norm_penalty(e, c) + _norm_penalty(e, d)


def nf4_terms(e, r, c, d, gamma):
    c, r, d = (np.asarray(x, dtype=np.intp) for x in (c, r, d))
    _check_symbols(e, np.concatenate([np.atleast_1d(c), np.atleast_1d(d)]), np.atleast_1d(r))
    geom = np.maximum(
        0.0,
        _dist(e.class_centers[c] - e.rel_vectors[r] - e.class_centers[d])
        - e.class_radii[c]
        - e.class_radii[d]
        - gamma,
    )
    return geom, _norm_penalty(e, c) + _norm_penalty(e, d)


def bot2_terms(e, c, d, gamma):
    c, d = (np.asarray(x, dtype=np.intp) for x in (c, d))
    _check_symbols(e, np.concatenate([np.atleast_1d(c), np.atleast_1d(d)]))
    geom = np.maximum(
        0.0,
        e.class_radii[c]
        + e.class_radii[d]
        - _dist(e.class_centers[c] - e.class_centers[d])
        + gamma,
    )
    return geom, _norm_penalty(e, c) + _norm_penalty(e, d)


def neg_terms(e, c, r, d, gamma):
    c, r, d = (np.asarray(x, dtype=np.intp) for x in (c, r, d))
    _check_symbols(e, np.concatenate([np.atleast_1d(c), np.atleast_1d(d)]), np.atleast_1d(r))
    geom = np.maximum(
        0.0,
        e.class_radii[c]
        + e.class_radii[d]
        - _dist(e.class_centers[c] + e.rel_vectors[r] - e.class_centers[d])
        + gamma,
    )
    return geom, _norm_penalty(e, c) + _norm_penalty(e, d)


# --- scalar ops ----------------------------------------------------------


def loss_nf1(e, c, d, gamma):
    geom, norm = nf1_terms(e, c, d, gamma)
    return float(geom + norm)


def loss_nf2(e, c, d, ee, gamma):
    geom, norm = nf2_terms(e, c, d, ee, gamma)
    return float(geom + norm)


def loss_nf3(e, c, d, r, gamma):
    geom, norm = nf3_terms(e, c, r, d, gamma)
    return float(geom + norm)


def loss_nf4(e, c, d, r, gamma):
    geom, norm = nf4_terms(e, r, c, d, gamma)
    return float(geom + norm)


def loss_bot1(e, c):
    c = np.asarray(c, dtype=np.intp)
    _check_symbols(e, np.atleast_1d(c))
    return float(e.class_radii[c])


def loss_bot2(e, c, d, gamma):
    geom, norm = bot2_terms(e, c, d, gamma)
    return float(geom + norm)


def loss_bot4(e, c, r=None):
    # the relation argument does not enter the loss at all
    return loss_bot1(e, c)


def loss_neg(e, c, d, r, gamma):
    geom, norm = neg_terms(e, c, r, d, gamma)
    return float(geom + norm)


# --- batches -------------------------------------------------------------


def _empty(width: int) -> np.ndarray:
    return np.zeros((0, width) if width > 1 else 0, dtype=np.intp)


@dataclass
class LossBatch:
    """Index tuples per normal form; layouts match NormalizedTheory buckets.

    nf3/neg rows are (C, r, D); nf4 rows are (r, C, D); bot4 rows are (r, C).
    """

    gamma: float
    nf1: np.ndarray = field(default_factory=lambda: _empty(2))
    nf2: np.ndarray = field(default_factory=lambda: _empty(3))
    nf3: np.ndarray = field(default_factory=lambda: _empty(3))
    nf4: np.ndarray = field(default_factory=lambda: _empty(3))
    bot1: np.ndarray = field(default_factory=lambda: _empty(1))
    bot2: np.ndarray = field(default_factory=lambda: _empty(2))
    bot4: np.ndarray = field(default_factory=lambda: _empty(2))
    neg: np.ndarray = field(default_factory=lambda: _empty(3))

    @classmethod
    def from_theory(cls, theory: NormalizedTheory, gamma: float, negatives=()) -> "LossBatch":
        def arr(rows, width):
            return np.asarray(rows, dtype=np.intp).reshape(-1, width) if rows else _empty(width)

        return cls(
            gamma=gamma,
            nf1=arr(theory.nf1, 2),
            nf2=arr(theory.nf2, 3),
            nf3=arr(theory.nf3, 3),
            nf4=arr(theory.nf4, 3),
            bot1=np.asarray(theory.bot1, dtype=np.intp),
            bot2=arr(theory.bot2, 2),
            bot4=arr(theory.bot4, 2),
            neg=arr(list(negatives), 3),
        )


def bucket_losses(batch: LossBatch, e: EmbeddingSet) -> dict[str, float]:
    out = {}
    g = batch.gamma
    if batch.nf1.size:
        out["NF1"] = float(np.sum(np.add(*nf1_terms(e, batch.nf1[:, 0], batch.nf1[:, 1], g))))
    if batch.nf2.size:
        out["NF2"] = float(
            np.sum(np.add(*nf2_terms(e, batch.nf2[:, 0], batch.nf2[:, 1], batch.nf2[:, 2], g)))
        )
    if batch.nf3.size:
        out["NF3"] = float(
            np.sum(np.add(*nf3_terms(e, batch.nf3[:, 0], batch.nf3[:, 1], batch.nf3[:, 2], g)))
        )
    if batch.nf4.size:
        out["NF4"] = float(
            np.sum(np.add(*nf4_terms(e, batch.nf4[:, 0], batch.nf4[:, 1], batch.nf4[:, 2], g)))
        )
    if batch.bot1.size:
        out["Bot1"] = float(np.sum(e.class_radii[batch.bot1]))
    if batch.bot2.size:
        out["Bot2"] = float(
            np.sum(np.add(*bot2_terms(e, batch.bot2[:, 0], batch.bot2[:, 1], g)))
        )
    if batch.bot4.size:
        out["Bot4"] = float(np.sum(e.class_radii[batch.bot4[:, 1]]))
    if batch.neg.size:
        out["neg"] = float(
            np.sum(np.add(*neg_terms(e, batch.neg[:, 0], batch.neg[:, 1], batch.neg[:, 2], g)))
        )
    return out


def batch_loss(batch: LossBatch, e: EmbeddingSet) -> float:
    return float(sum(bucket_losses(batch, e).values()))


# --- gradients -----------------------------------------------------------


def _hinge_weight(arg: np.ndarray) -> np.ndarray:
    return (arg > 0).astype(np.float64)


def batch_gradient(batch: LossBatch, e: EmbeddingSet) -> GradientSet:
    """Gradient of batch_loss w.r.t. every trainable scalar; Top gets zero."""
    g = e.zeros_like()
    gamma = batch.gamma
    centers, radii, rels = e.class_centers, e.class_radii, e.rel_vectors

    if batch.nf1.size:
        c, d = batch.nf1[:, 0], batch.nf1[:, 1]
        u = centers[c] - centers[d]
        w = _hinge_weight(_dist(u) + radii[c] - radii[d] - gamma)
        wd = w[:, None] * _dir(u)
        np.add.at(g.class_centers, c, wd)
        np.add.at(g.class_centers, d, -wd)
        np.add.at(g.class_radii, c, w)
        np.add.at(g.class_radii, d, -w)
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)

    if batch.nf2.size:
        c, d, ee = batch.nf2[:, 0], batch.nf2[:, 1], batch.nf2[:, 2]
        cc, cd, ce = centers[c], centers[d], centers[ee]
        rc, rd, re_ = radii[c], radii[d], radii[ee]
        u1, u2, u3 = cc - cd, cc - ce, cd - ce
        w1 = _hinge_weight(_dist(u1) - rc - rd - gamma)
        w2 = _hinge_weight(_dist(u2) - rc - gamma)
        w3 = _hinge_weight(_dist(u3) - rc - gamma)
        w4 = _hinge_weight(np.minimum(rc, rd) - re_ - gamma)
        d1, d2, d3 = (w[:, None] * _dir(u) for w, u in ((w1, u1), (w2, u2), (w3, u3)))
        np.add.at(g.class_centers, c, d1 + d2)
        np.add.at(g.class_centers, d, -d1 + d3)
        np.add.at(g.class_centers, ee, -d2 - d3)
        np.add.at(g.class_radii, c, -w1 - w2 - w3)
        np.add.at(g.class_radii, d, -w1)
        np.add.at(g.class_radii, ee, -w4)
        min_is_c = rc <= rd  # tie resolved toward r(c)
        np.add.at(g.class_radii, c, np.where(min_is_c, w4, 0.0))
        np.add.at(g.class_radii, d, np.where(min_is_c, 0.0, w4))
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)
        _acc_norm_penalty(e, g, ee)

    if batch.nf3.size:
        c, r, d = batch.nf3[:, 0], batch.nf3[:, 1], batch.nf3[:, 2]
        u = centers[c] + rels[r] - centers[d]
        w = _hinge_weight(_dist(u) + radii[c] - radii[d] - gamma)
        wd = w[:, None] * _dir(u)
        np.add.at(g.class_centers, c, wd)
        np.add.at(g.rel_vectors, r, wd)
        np.add.at(g.class_centers, d, -wd)
        np.add.at(g.class_radii, c, w)
        np.add.at(g.class_radii, d, -w)
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)

    if batch.nf4.size:
        r, c, d = batch.nf4[:, 0], batch.nf4[:, 1], batch.nf4[:, 2]
        u = centers[c] - rels[r] - centers[d]
        w = _hinge_weight(_dist(u) - radii[c] - radii[d] - gamma)
        wd = w[:, None] * _dir(u)
        np.add.at(g.class_centers, c, wd)
        np.add.at(g.rel_vectors, r, -wd)
        np.add.at(g.class_centers, d, -wd)
        np.add.at(g.class_radii, c, -w)
        np.add.at(g.class_radii, d, -w)
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)

    if batch.bot1.size:
        np.add.at(g.class_radii, batch.bot1, 1.0)

    if batch.bot2.size:
        c, d = batch.bot2[:, 0], batch.bot2[:, 1]
        u = centers[c] - centers[d]
        w = _hinge_weight(radii[c] + radii[d] - _dist(u) + gamma)
        wd = w[:, None] * _dir(u)
        np.add.at(g.class_centers, c, -wd)
        np.add.at(g.class_centers, d, wd)
        np.add.at(g.class_radii, c, w)
        np.add.at(g.class_radii, d, w)
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)

    if batch.bot4.size:
        np.add.at(g.class_radii, batch.bot4[:, 1], 1.0)

    if batch.neg.size:
        c, r, d = batch.neg[:, 0], batch.neg[:, 1], batch.neg[:, 2]
        u = centers[c] + rels[r] - centers[d]
        w = _hinge_weight(radii[c] + radii[d] - _dist(u) + gamma)
        wd = w[:, None] * _dir(u)
        np.add.at(g.class_centers, c, -wd)
        np.add.at(g.rel_vectors, r, -wd)
        np.add.at(g.class_centers, d, wd)
        np.add.at(g.class_radii, c, w)
        np.add.at(g.class_radii, d, w)
        _acc_norm_penalty(e, g, c)
        _acc_norm_penalty(e, g, d)

    g.class_centers[e.top] = 0.0
    g.class_radii[e.top] = 0.0
    return g
