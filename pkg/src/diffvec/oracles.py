"""Closed-form ground truth for lines and for pairs of sets.

For affine lines C_i = {c_i + t u_i} (normalized so c_i is orthogonal to u_i
and |u_i| = 1) the cycle is unique unless the lines are parallel, and its
parameters rho_i solve a small linear system with an explicit solution.
For two sets, v = (w, -w) with w the projection of 0 onto cl(C_2 - C_1); the
Minkowski differences of the supported set types have exact projectors.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .convex_sets import AffineLine, Ball, Box, Halfspace, Hyperplane, Translate
from .errors import ApproximationWarning, DimensionError, UnsupportedPair

EPS_PAR = 1e-10


@dataclass(frozen=True, eq=False)
class LineEnsembleSolution:
    """Cycle data for an ensemble of lines.

    For ``kind == "parallel"`` the cycles are ``cycle_base + t (u, ..., u)``
    with ``u = direction``; otherwise ``cycle_base`` is the unique cycle.
    """

    kind: str
    rho: tuple
    cycle_base: np.ndarray
    direction: Optional[np.ndarray]
    v: np.ndarray


def _cyclic_diff(z):
    return np.roll(z, -1, axis=0) - z


def _check_lines(lines):
    if any(not isinstance(L, AffineLine) for L in lines):
        raise TypeError("line oracles need AffineLine arguments")
    if len({L.dim for L in lines}) != 1:
        raise DimensionError("lines must share one ambient dimension")


def _parallel(lines):
    u = lines[0].u
    # the normalized c_i stay orthogonal to u after flipping signs
    c = np.stack([L.c for L in lines])
    return LineEnsembleSolution("parallel", (), c, u.copy(), _cyclic_diff(c))


def solve_two_lines(L1, L2, eps_par=EPS_PAR):
    """Cycle and difference vector for two lines."""
    _check_lines((L1, L2))
    c1, u1, c2, u2 = L1.c, L1.u, L2.c, L2.u
    k = u1 @ u2
    if k * k >= 1.0 - eps_par:
        return _parallel((L1, L2))
    den = 1.0 - k * k
    rho1 = (u1 @ c2 + k * (u2 @ c1)) / den
    rho2 = (u2 @ c1 + k * (u1 @ c2)) / den
    z = np.stack([c1 + rho1 * u1, c2 + rho2 * u2])
    return LineEnsembleSolution("non_parallel", (float(rho1), float(rho2)), z, None, _cyclic_diff(z))


def solve_three_lines(L1, L2, L3, eps_par=EPS_PAR):
    """Cycle and difference vectors for three lines, traversed in order 1, 2, 3."""
    _check_lines((L1, L2, L3))
    (c1, u1), (c2, u2), (c3, u3) = [(L.c, L.u) for L in (L1, L2, L3)]
    k12, k23, k31 = u1 @ u2, u2 @ u3, u3 @ u1
    prod = k23 * k12 * k31
    if prod >= 1.0 - eps_par:
        return _parallel((L1, L2, L3))
    den = 1.0 - prod
    rho1 = (u1 @ c3 + k31 * (u3 @ c2) + k31 * k23 * (u2 @ c1)) / den
    rho2 = (u2 @ c1 + k12 * (u1 @ c3) + k12 * k31 * (u3 @ c2)) / den
    rho3 = (u3 @ c2 + k23 * (u2 @ c1) + k23 * k12 * (u1 @ c3)) / den
    z = np.stack([c1 + rho1 * u1, c2 + rho2 * u2, c3 + rho3 * u3])
    rho = (float(rho1), float(rho2), float(rho3))
    return LineEnsembleSolution("non_parallel", rho, z, None, _cyclic_diff(z))


# Minkowski-sum projectors. Each builder returns a function of one point, or
# None when no closed form is known for the pair.


def _negate(s):
    if isinstance(s, Ball):
        return Ball(-s.center, s.radius)
    if isinstance(s, Halfspace):
        return Halfspace(-s.normal, s.offset)
    if isinstance(s, Hyperplane):
        return Hyperplane(-s.normal, s.offset)
    if isinstance(s, AffineLine):
        return AffineLine(-s.c, s.u)
    if isinstance(s, Box):
        return Box(-s.upper, -s.lower)
    if isinstance(s, Translate):
        inner = _negate(s.inner)
        return None if inner is None else Translate(inner, -s.shift)
    return None


def _identity(w):
    return w


def _slab(s):
    # (unit normal, lo, hi) with the set equal to {x : lo <= <n, x> <= hi}
    if isinstance(s, (Halfspace, Hyperplane)):
        na = np.linalg.norm(s.normal)
        b = s.offset / na
        lo = b if isinstance(s, Hyperplane) else -np.inf
        return s.normal / na, lo, b
    return None


def _slab_projector(n, lo, hi):
    def proj(w):
        t = w @ n
        return w + (np.clip(t, lo, hi) - t) * n

    return proj


def _enlarge(proj, r):
    # projector onto {x : dist(x, S) <= r} given the projector onto S
    def out(w):
        p = proj(w)
        gap = w - p
        dist = np.linalg.norm(gap)
        return w if dist <= r else p + (r / dist) * gap

    return out


def _shifted(proj, t):
    return lambda w: t + proj(w - t)


def _sum_projector(a, b):
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Translate):
            inner = _sum_projector(x.inner, y)
            return None if inner is None else _shifted(inner, x.shift)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Ball):
            return _shifted(_enlarge(y.project, x.radius), x.center)
    if isinstance(a, Box) and isinstance(b, Box):
        return Box(a.lower + b.lower, a.upper + b.upper).project
    if isinstance(a, AffineLine) and isinstance(b, AffineLine):
        basis, _ = np.linalg.qr(np.stack([a.u, b.u], axis=1))
        rank = np.sum(np.abs(np.linalg.svd(np.stack([a.u, b.u]), compute_uv=False)) > 1e-12)
        basis = basis[:, :rank]
        base = a.c + b.c
        return lambda w: base + basis @ (basis.T @ (w - base))
    sa, sb = _slab(a), _slab(b)
    if sa is not None and sb is not None:
        (na, lo_a, hi_a), (nb, lo_b, hi_b) = sa, sb
        k = na @ nb
        if abs(k) < 1.0 - 1e-12:
            return _identity
        if k < 0:
            lo_b, hi_b = -hi_b, -lo_b
        return _slab_projector(na, lo_a + lo_b, hi_a + hi_b)
    for x, y in ((a, b), (b, a)):
        sx = _slab(x)
        if sx is not None and isinstance(y, AffineLine):
            n, lo, hi = sx
            if abs(n @ y.u) > 1e-12:
                return _identity
            off = n @ y.c
            return _slab_projector(n, lo + off, hi + off)
    return None


def difference_projector(c1, c2):
    """Projector onto cl(C_2 - C_1) when a closed form is known, else None."""
    neg = _negate(c1)
    return None if neg is None else _sum_projector(c2, neg)


def _alternating_gap(c1, c2, iters, tol):
    # von Neumann: a <- P_1 P_2 a; P_2 a - a tends to the minimal displacement
    a = c1.project(np.zeros(c1.dim))
    gap = c2.project(a) - a
    for _ in range(iters):
        a = c1.project(c2.project(a))
        new = c2.project(a) - a
        if np.linalg.norm(new - gap) <= tol:
            return new
        gap = new
    return gap


def m2_difference_vector(c1, c2, allow_fallback=True, fallback_iters=100000, fallback_tol=1e-14):
    """v = (w, -w) with w = P_{cl(C_2 - C_1)}(0).

    Closed forms cover balls, boxes, lines, halfspaces, hyperplanes and their
    translates. Other pairs use the limit of von Neumann alternating
    projections, with an ``ApproximationWarning``; with
    ``allow_fallback=False`` they raise ``UnsupportedPair``.
    """
    if c1.dim != c2.dim:
        raise DimensionError("sets must share one ambient dimension")
    proj = difference_projector(c1, c2)
    if proj is not None:
        w = proj(np.zeros(c1.dim))
    elif allow_fallback:
        warnings.warn(
            f"no closed form for {type(c1).__name__}/{type(c2).__name__}; using alternating projections",
            ApproximationWarning,
            stacklevel=2,
        )
        w = _alternating_gap(c1, c2, fallback_iters, fallback_tol)
    else:
        raise UnsupportedPair(f"no closed form for {type(c1).__name__}/{type(c2).__name__}")
    return np.stack([w, -w])
