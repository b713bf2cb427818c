import math

import numpy as np
import pytest

from elball.embeddings import EmbeddingSet, TOP_RADIUS
from elball.losses import (
    LossBatch,
    MissingSymbolError,
    batch_gradient,
    batch_loss,
    bucket_losses,
    loss_bot1,
    loss_bot2,
    loss_bot4,
    loss_neg,
    loss_nf1,
    loss_nf2,
    loss_nf3,
    loss_nf4,
)

C, D, E = 2, 3, 4
R = 0

SQRT2 = math.sqrt(2.0)


def embed(centers, radii, rels=None):
    rels = rels if rels is not None else [[0.0, 0.0]]
    e = EmbeddingSet(
        np.asarray(centers, dtype=float),
        np.asarray(radii, dtype=float),
        np.asarray(rels, dtype=float),
    )
    e.class_radii[e.top] = TOP_RADIUS
    return e


def embed3(c, rc, d, rd, e_center=(1, 0), re_=0.0, rel=(0, 0)):
    centers = [(1, 0), (1, 0), c, d, e_center]
    radii = [0, 0, rc, rd, re_]
    return embed(centers, radii, [list(rel)])


class TestScalarValues:
    def test_nf1_contained_zero(self):
        e = embed3((1, 0), 0.3, (1, 0), 0.5)
        assert loss_nf1(e, C, D, 0.0) == 0.0

    def test_nf1_offset(self):
        e = embed3((0, 1), 0.5, (1, 0), 0.3)
        assert loss_nf1(e, C, D, 0.0) == pytest.approx(SQRT2 + 0.2)

    def test_nf1_norm_terms_only(self):
        e = embed3((2, 0), 0.1, (2, 0), 0.5)
        assert loss_nf1(e, C, D, 0.0) == pytest.approx(2.0)

    def test_nf2_identical_balls(self):
        e = embed3((1, 0), 0.5, (1, 0), 0.5, e_center=(1, 0), re_=0.5)
        assert loss_nf2(e, C, D, E, 0.0) == 0.0

    def test_nf2_term_by_term(self):
        e = embed3((1, 0), 0.1, (-1, 0), 0.1, e_center=(1, 0), re_=0.1)
        # printed max terms: 1.8 (disjoint operands) + 0 + 1.9 + 0
        assert loss_nf2(e, C, D, E, 0.0) == pytest.approx(3.7)

    def test_nf2_disjoint_only_violation(self):
        e = embed3((1, 0), 0.1, (0, 1), 0.1, e_center=(1, 0), re_=0.2)
        expected = (SQRT2 - 0.2) + 0.0 + (SQRT2 - 0.1) + 0.0
        assert loss_nf2(e, C, D, E, 0.0) == pytest.approx(expected)

    def test_nf3_exact_translation(self):
        e = embed3((0, 1), 0.1, (1, 0), 0.1, rel=(1, -1))
        assert loss_nf3(e, C, D, R, 0.0) == 0.0

    def test_nf3_radius_excess(self):
        e = embed3((0, 1), 0.3, (0, 1), 0.1, rel=(0, 0))
        assert loss_nf3(e, C, D, R, 0.0) == pytest.approx(0.2)

    def test_nf3_negative_margin(self):
        e = embed3((0, 1), 0.1, (1, 0), 0.1, rel=(1, -1))
        assert loss_nf3(e, C, D, R, -0.1) == pytest.approx(0.1)

    def test_nf4_translated_back_match(self):
        e = embed3((1, 0), 0.1, (0, 1), 0.1, rel=(1, -1))
        assert loss_nf4(e, C, D, R, 0.0) == 0.0

    def test_nf4_unit_gap(self):
        e = embed3((1, 0), 0.1, (0.5, math.sqrt(3) / 2), 0.1, rel=(0, 0))
        assert loss_nf4(e, C, D, R, 0.0) == pytest.approx(0.8)

    def test_bot2_distant(self):
        e = embed3((1, 0), 0.1, (0, 1), 0.1)
        assert loss_bot2(e, C, D, 0.0) == 0.0

    def test_bot2_coincident(self):
        e = embed3((1, 0), 0.6, (1, 0), 0.6)
        assert loss_bot2(e, C, D, 0.0) == pytest.approx(1.2)
        assert loss_bot2(e, C, D, 0.1) == pytest.approx(1.3)

    def test_bot1_is_radius(self):
        e = embed3((1, 0), 0.0, (1, 0), 0.0)
        assert loss_bot1(e, C) == 0.0
        e.class_radii[C] = 0.7
        assert loss_bot1(e, C) == pytest.approx(0.7)

    def test_bot4_ignores_relation(self):
        e = embed3((1, 0), 0.7, (1, 0), 0.0)
        assert loss_bot4(e, C) == pytest.approx(0.7)
        assert loss_bot4(e, C, R) == loss_bot4(e, C)

    def test_neg_far_apart(self):
        e = embed3((1, 0), 0.1, (-1, 0), 0.1, rel=(0, 0))
        assert loss_neg(e, C, D, R, 0.0) == 0.0

    def test_neg_coincident(self):
        e = embed3((1, 0), 0.1, (1, 0), 0.1, rel=(0, 0))
        assert loss_neg(e, C, D, R, 0.0) == pytest.approx(0.2)
        assert loss_neg(e, C, D, R, -0.1) == pytest.approx(0.1)

    def test_missing_symbol(self):
        e = embed3((1, 0), 0.1, (1, 0), 0.1)
        with pytest.raises(MissingSymbolError):
            loss_nf1(e, C, 99, 0.0)
        with pytest.raises(MissingSymbolError):
            loss_nf3(e, C, D, 5, 0.0)


class TestLossProperties:
    def test_non_negative(self, rng):
        for _ in range(100):
            e = embed(rng.normal(0, 1, (5, 2)), rng.uniform(0, 1, 5), rng.normal(0, 1, (1, 2)))
            g = rng.uniform(-0.1, 0.1)
            assert loss_nf1(e, C, D, g) >= 0
            assert loss_nf2(e, C, D, E, g) >= 0
            assert loss_nf3(e, C, D, R, g) >= 0
            assert loss_nf4(e, C, D, R, g) >= 0
            assert loss_bot2(e, C, D, g) >= 0
            assert loss_neg(e, C, D, R, g) >= 0

    def test_nf1_geometric_term_translation_invariant(self, rng):
        # the hinge depends only on relative geometry; verify with unit-norm
        # preserving rotations instead of translations
        theta = 0.7
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        for _ in range(20):
            centers = rng.normal(0, 1, (5, 2))
            radii = rng.uniform(0, 1, 5)
            e1 = embed(centers, radii)
            e2 = embed(centers @ rot.T, radii)
            assert loss_nf1(e1, C, D, 0.0) == pytest.approx(loss_nf1(e2, C, D, 0.0))

    def test_top_norm_terms_skipped(self):
        # Top's center is not pushed to the unit sphere and contributes no
        # normalization penalty even when an axiom mentions it
        e = embed3((1, 0), 0.2, (1, 0), 0.5)
        e.class_centers[e.top] = [7.0, 7.0]
        assert loss_nf1(e, C, 0, 0.0) == 0.0


class TestBatch:
    def test_empty_batch(self):
        e = embed3((1, 0), 0.1, (1, 0), 0.2)
        assert batch_loss(LossBatch(gamma=0.0), e) == 0.0

    def test_single_tuple_matches_scalar_op(self):
        e = embed3((0, 1), 0.5, (1, 0), 0.3)
        batch = LossBatch(gamma=0.0, nf1=np.array([[C, D]]))
        assert batch_loss(batch, e) == pytest.approx(loss_nf1(e, C, D, 0.0))

    def test_additivity(self):
        e = embed3((0, 1), 0.5, (1, 0), 0.3)
        batch = LossBatch(gamma=0.0, nf1=np.array([[C, D], [D, C]]))
        assert batch_loss(batch, e) == pytest.approx(
            loss_nf1(e, C, D, 0.0) + loss_nf1(e, D, C, 0.0)
        )

    def test_bucket_keys(self):
        e = embed(np.ones((5, 2)), [0, 0, 0.1, 0.2, 0.3], [[0.5, 0.5]])
        batch = LossBatch(
            gamma=0.0,
            nf1=np.array([[C, D]]),
            nf2=np.array([[C, D, E]]),
            nf3=np.array([[C, R, D]]),
            nf4=np.array([[R, C, D]]),
            bot1=np.array([C]),
            bot2=np.array([[C, D]]),
            bot4=np.array([[R, C]]),
            neg=np.array([[C, R, D]]),
        )
        per_bucket = bucket_losses(batch, e)
        assert set(per_bucket) == {"NF1", "NF2", "NF3", "NF4", "Bot1", "Bot2", "Bot4", "neg"}
        assert batch_loss(batch, e) == pytest.approx(sum(per_bucket.values()))

    def test_missing_symbol(self):
        e = embed3((1, 0), 0.1, (1, 0), 0.2)
        with pytest.raises(MissingSymbolError):
            batch_loss(LossBatch(gamma=0.0, nf1=np.array([[C, 9]])), e)


# --- finite-difference gradient oracle -----------------------------------


def fd_gradient(batch, e, step=1e-5):
    out = e.zeros_like()
    for params, grads in (
        (e.class_centers, out.class_centers),
        (e.class_radii, out.class_radii),
        (e.rel_vectors, out.rel_vectors),
    ):
        flat_p = params.reshape(-1)
        flat_g = grads.reshape(-1)
        for i in range(flat_p.size):
            saved = flat_p[i]
            flat_p[i] = saved + step
            hi = batch_loss(batch, e)
            flat_p[i] = saved - step
            lo = batch_loss(batch, e)
            flat_p[i] = saved
            flat_g[i] = (hi - lo) / (2 * step)
    # Top is frozen; forcing its slots to zero mirrors the analytic contract
    out.class_centers[e.top] = 0.0
    out.class_radii[e.top] = 0.0
    return out


def random_setup(rng, n_classes=6, n_relations=2, dim=3):
    e = embed(
        rng.uniform(-1.2, 1.2, (n_classes, dim)),
        rng.uniform(0.05, 0.9, n_classes),
        rng.uniform(-1, 1, (n_relations, dim)),
    )
    def classes(rows, cols):
        return rng.integers(2, n_classes, size=(rows, cols))

    def rels(rows):
        return rng.integers(0, n_relations, size=(rows, 1))

    batch = LossBatch(
        gamma=float(rng.uniform(-0.1, 0.1)),
        nf1=classes(2, 2),
        nf2=classes(2, 3),
        nf3=np.hstack([classes(2, 1), rels(2), classes(2, 1)]),
        nf4=np.hstack([rels(2), classes(2, 2)]),
        bot1=classes(1, 1).ravel(),
        bot2=classes(2, 2),
        bot4=np.hstack([rels(1), classes(1, 1)]),
        neg=np.hstack([classes(1, 1), rels(1), classes(1, 1)]),
    )
    return batch, e


class TestGradients:
    def test_flat_region_zero_gradient(self):
        e = embed3((1, 0), 0.1, (1, 0), 0.5)
        batch = LossBatch(gamma=0.0, nf1=np.array([[C, D]]))
        g = batch_gradient(batch, e)
        assert not np.any(g.class_centers)
        assert not np.any(g.class_radii)
        assert not np.any(g.rel_vectors)

    def test_bot1_radius_gradient_is_one(self):
        e = embed3((1, 0), 0.4, (1, 0), 0.1)
        g = batch_gradient(LossBatch(gamma=0.0, bot1=np.array([C])), e)
        assert g.class_radii[C] == 1.0
        assert not np.any(g.class_centers)

    def test_top_gradient_zero(self):
        e = embed3((1, 0), 0.3, (1, 0), 0.1)
        e.class_centers[0] = [0.4, 0.4]
        batch = LossBatch(gamma=0.0, nf1=np.array([[0, C]]))
        g = batch_gradient(batch, e)
        assert not np.any(g.class_centers[0]) and g.class_radii[0] == 0.0

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        batch, e = random_setup(rng)
        analytic = batch_gradient(batch, e)
        numeric = fd_gradient(batch, e)
        for a, n in (
            (analytic.class_centers, numeric.class_centers),
            (analytic.class_radii, numeric.class_radii),
            (analytic.rel_vectors, numeric.rel_vectors),
        ):
            err = np.abs(a - n) / np.maximum(1.0, np.abs(n))
            assert err.max() < 1e-4

    def test_gradient_additivity(self):
        e = embed3((0, 1), 0.5, (1, 0), 0.3)
        g1 = batch_gradient(LossBatch(gamma=0.0, nf1=np.array([[C, D]])), e)
        g2 = batch_gradient(LossBatch(gamma=0.0, bot2=np.array([[C, D]])), e)
        both = batch_gradient(
            LossBatch(gamma=0.0, nf1=np.array([[C, D]]), bot2=np.array([[C, D]])), e
        )
        assert np.allclose(both.class_centers, g1.class_centers + g2.class_centers)
        assert np.allclose(both.class_radii, g1.class_radii + g2.class_radii)
