import math

import numpy as np
import pytest

from diffvec.convex_sets import (
    AffineLine,
    Ball,
    Box,
    Ensemble,
    EpiExp,
    Halfspace,
    Hyperplane,
    Translate,
    contains,
    product_project,
    project,
    sample_members,
    support_function,
)
from diffvec.errors import DimensionError
from expected import EPI_PROJ_ORIGIN


def all_sets():
    return [
        Hyperplane([1.0, -2.0], 0.5),
        Halfspace([0.3, 1.0], -1.0),
        AffineLine([1.0, 2.0], [1.0, 1.0]),
        Ball([1.0, -1.0], 2.0),
        Box([-1.0, 0.0], [2.0, 0.5]),
        EpiExp(),
        Translate(EpiExp(), [1.0, -2.0]),
        Translate(Ball([0.0, 0.0], 0.5), [3.0, 3.0]),
    ]


def test_line_is_normalized():
    L = AffineLine([3.0, 0.0, 1.0], [2.0, 0.0, 0.0])
    np.testing.assert_allclose(L.u, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(L.c, [0.0, 0.0, 1.0])
    assert abs(L.c @ L.u) < 1e-15


def test_line_projection_example():
    L = AffineLine([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(project(L, [5.0, 7.0, 9.0]), [5.0, 0.0, 1.0])
    # dense check over sampled line points
    ts = np.linspace(-20, 20, 400001)
    pts = L.c + ts[:, None] * L.u
    best = pts[np.argmin(np.linalg.norm(pts - [5.0, 7.0, 9.0], axis=1))]
    np.testing.assert_allclose(project(L, [5.0, 7.0, 9.0]), best, atol=1e-4)


def test_ball_projection_example():
    np.testing.assert_allclose(project(Ball([0.0, 0.0], 1.0), [3.0, 4.0]), [0.6, 0.8])


def test_epi_exp_member_unchanged():
    np.testing.assert_array_equal(project(EpiExp(), [0.0, 2.0]), [0.0, 2.0])


def test_epi_exp_projection_of_origin():
    np.testing.assert_allclose(project(EpiExp(), [0.0, 0.0]), EPI_PROJ_ORIGIN, atol=1e-13)


def test_epi_exp_extreme_points():
    s = EpiExp()
    pts = np.array([[300.0, 0.0], [-300.0, -5.0], [5.0, 1e6], [0.0, -1e4], [50.0, 50.0]])
    p = s.project(pts)
    assert np.all(np.isfinite(p))
    assert np.all(np.exp(p[:, 0]) <= p[:, 1] * (1 + 1e-12))
    # first-order condition: x - p is a nonnegative multiple of (e^xi, -1)
    r = pts - p
    outside = np.exp(np.minimum(pts[:, 0], 700)) > pts[:, 1]
    for ri, pi in zip(r[outside], p[outside]):
        normal = np.array([math.exp(pi[0]), -1.0])
        cross = ri[0] * normal[1] - ri[1] * normal[0]
        assert abs(cross) <= 1e-8 * max(1.0, np.linalg.norm(ri) * np.linalg.norm(normal))
        assert ri @ normal >= 0


def test_contains_examples():
    assert contains(Halfspace([0.0, 1.0], 0.0), [5.0, 0.0], 1e-9)
    assert not contains(EpiExp(), [0.0, 0.5], 1e-9)
    assert contains(Ball([0.0, 0.0], 1.0), [1.0 + 1e-12, 0.0], 1e-9)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        project(Ball([0.0, 0.0], 1.0), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        support_function(Ball([0.0, 0.0], 1.0), [1.0])
    with pytest.raises(DimensionError):
        Ensemble((Ball([0.0], 1.0), Ball([0.0, 0.0], 1.0)))


def test_constructor_validation():
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)
    with pytest.raises(ValueError):
        Box([1.0], [0.0])
    with pytest.raises(ValueError):
        AffineLine([0.0, 0.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        Halfspace([0.0, 0.0], 1.0)


@pytest.mark.parametrize("s", all_sets(), ids=lambda s: type(s).__name__)
def test_projector_properties(s, rng):
    x = rng.standard_normal((200, s.dim)) * 5
    p = s.project(x)
    assert np.all(s.contains(p, 1e-10))
    np.testing.assert_allclose(s.project(p), p, atol=1e-10)
    # variational inequality against sampled members
    members = sample_members(s, 1000, rng)
    for xi, pi in zip(x[:20], p[:20]):
        assert np.max((members - pi) @ (xi - pi)) <= 1e-8 * max(1.0, np.linalg.norm(xi))
    # firm nonexpansiveness
    z = rng.standard_normal((200, s.dim)) * 5
    q = s.project(z)
    lhs = np.sum((p - q) ** 2, axis=1)
    rhs = np.sum((p - q) * (x - z), axis=1)
    assert np.all(lhs <= rhs + 1e-9)


@pytest.mark.parametrize("s", all_sets(), ids=lambda s: type(s).__name__)
def test_support_dominates_samples(s, rng):
    members = sample_members(s, 2000, rng)
    for g in rng.standard_normal((30, s.dim)):
        sig = support_function(s, g)
        assert np.max(members @ g) <= sig + 1e-9
        if math.isfinite(sig):
            assert support_function(s, 3.0 * g) == pytest.approx(3.0 * sig, rel=1e-12, abs=1e-12)


def test_support_examples():
    p, r, g = np.array([1.0, 2.0]), 0.5, np.array([3.0, -4.0])
    assert support_function(Ball(p, r), g) == pytest.approx(p @ g + r * 5.0)
    L = AffineLine([0.0, 1.0], [1.0, 0.0])
    assert support_function(L, [0.0, 2.0]) == pytest.approx(2.0)
    assert support_function(L, [1.0, 2.0]) == math.inf
    assert support_function(EpiExp(), [0.0, -1.0]) == 0.0
    assert support_function(EpiExp(), [0.0, 1.0]) == math.inf
    assert support_function(EpiExp(), [-1.0, -1.0]) == math.inf
    h = Halfspace([0.0, 2.0], 4.0)
    assert support_function(h, [0.0, 1.0]) == pytest.approx(2.0)
    assert support_function(h, [0.0, -1.0]) == math.inf
    assert support_function(Hyperplane([0.0, 2.0], 4.0), [0.0, -1.0]) == pytest.approx(-2.0)
    assert support_function(Box([-1.0, 0.0], [2.0, 3.0]), [1.0, -1.0]) == pytest.approx(2.0)


def test_epi_exp_support_matches_grid():
    xi = np.linspace(-30, 5, 200001)
    pts = np.stack([xi, np.exp(xi)], axis=1)
    for g in ([1.0, -1.0], [2.0, -0.5], [0.3, -3.0]):
        assert support_function(EpiExp(), g) == pytest.approx(np.max(pts @ g), abs=1e-8)
    # (0, -1): supremum 0, approached as xi -> -inf
    assert np.max(pts @ [0.0, -1.0]) == pytest.approx(0.0, abs=1e-12)


def test_support_tolerance_snaps():
    L = AffineLine([0.0, 1.0], [1.0, 0.0])
    assert support_function(L, [1e-12, 1.0]) == math.inf
    assert support_function(L, [1e-12, 1.0], tol=1e-9) == pytest.approx(1.0)
    assert support_function(EpiExp(), [-1e-12, 1e-12], tol=1e-9) == 0.0


def test_translate_matches_direct(rng):
    t = np.array([2.0, -1.0])
    shifted = Translate(Ball([1.0, 1.0], 0.7), t)
    direct = Ball([3.0, 0.0], 0.7)
    x = rng.standard_normal((50, 2)) * 4
    np.testing.assert_allclose(shifted.project(x), direct.project(x), atol=1e-14)
    g = rng.standard_normal(2)
    assert support_function(shifted, g) == pytest.approx(support_function(direct, g))


def test_product_project_blockwise():
    ens = Ensemble((AffineLine([0.0, 0.0], [1.0, 0.0]), AffineLine([0.0, 1.0], [1.0, 0.0]), EpiExp()))
    x = np.array([[2.0, 5.0], [2.0, 5.0], [0.0, 0.0]])
    out = product_project(ens, x)
    np.testing.assert_allclose(out[:2], [[2.0, 0.0], [2.0, 1.0]])
    np.testing.assert_allclose(out[2], EPI_PROJ_ORIGIN, atol=1e-13)
    np.testing.assert_array_equal(product_project(ens, out), out)


def test_product_project_huge_balls(rng):
    ens = Ensemble((Ball([0.0, 0.0], 1e9), Ball([0.0, 0.0], 1e9)))
    x = rng.standard_normal((2, 2))
    np.testing.assert_array_equal(product_project(ens, x), x)


def test_ensemble_rotation():
    a, b, c = Ball([0.0], 1.0), Ball([1.0], 1.0), Ball([2.0], 1.0)
    ens = Ensemble((a, b, c))
    assert ens.rotated(1).sets == (b, c, a)
    assert ens.m == 3 and ens.d == 1
