"""Closed convex sets in R^d with exact projectors and support functions.

Every set type exposes

* ``project(x)`` for a single point of shape (d,) or a batch of shape (n, d),
* ``support(g, tol=0.0)`` returning ``math.inf`` when the set is unbounded
  in direction ``g``,
* ``dim``, the ambient dimension.

``tol`` in ``support`` snaps a direction that is within ``tol`` of the
barrier cone onto it. Computed dual vectors carry rounding noise, and without
the snap a direction that should be exactly orthogonal to a line would yield
an infinite support value.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .product_space import as_product

INF = math.inf


def _vec(a, name):
    arr = np.array(a, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DimensionError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _points(x, d):
    # returns (2-D array, was_single)
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise DimensionError(f"expected points of dimension {d}, got shape {np.shape(x)}")
    return arr, single


def _direction(g, d):
    g = np.asarray(g, dtype=float).reshape(-1)
    if g.shape[0] != d:
        raise DimensionError(f"expected a direction of dimension {d}, got {g.shape[0]}")
    return g


class _Set:
    """Shared plumbing: batch handling for ``project`` and ``contains``."""

    def project(self, x):
        pts, single = _points(x, self.dim)
        out = self._project(pts)
        return out[0] if single else out

    def contains(self, x, tol=1e-9):
        pts, single = _points(x, self.dim)
        dist = np.linalg.norm(pts - self._project(pts), axis=1)
        ok = dist <= tol
        return bool(ok[0]) if single else ok

    def support(self, g, tol=0.0):
        return self._support(_direction(g, self.dim), tol)


@dataclass(frozen=True, eq=False)
class Hyperplane(_Set):
    """{x : <a, x> = b}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = _vec(self.normal, "normal")
        if np.linalg.norm(a) == 0.0:
            raise ValueError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def _project(self, x):
        a = self.normal
        r = (x @ a - self.offset) / (a @ a)
        return x - r[:, None] * a

    def _support(self, g, tol):
        a = self.normal
        lam = (g @ a) / (a @ a)
        if np.linalg.norm(g - lam * a) > tol * max(1.0, np.linalg.norm(g)):
            return INF
        return lam * self.offset


@dataclass(frozen=True, eq=False)
class Halfspace(_Set):
    """{x : <a, x> <= b}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = _vec(self.normal, "normal")
        if np.linalg.norm(a) == 0.0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def _project(self, x):
        a = self.normal
        r = np.maximum(x @ a - self.offset, 0.0) / (a @ a)
        return x - r[:, None] * a

    def _support(self, g, tol):
        a = self.normal
        lam = (g @ a) / (a @ a)
        scale = tol * max(1.0, np.linalg.norm(g))
        if np.linalg.norm(g - lam * a) > scale or lam < -scale:
            return INF
        return max(lam, 0.0) * self.offset


@dataclass(frozen=True, eq=False)
class AffineLine(_Set):
    """{c + t u : t real}, stored normalized so that <c, u> = 0 and |u| = 1.

    Any point on the line and any nonzero direction may be passed in.
    """

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        p = _vec(self.point, "point")
        v = _vec(self.direction, "direction")
        if p.shape != v.shape:
            raise DimensionError("point and direction must have the same dimension")
        n = np.linalg.norm(v)
        if n == 0.0:
            raise ValueError("line direction must be nonzero")
        u = v / n
        c = p - (p @ u) * u
        c.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "point", c)
        object.__setattr__(self, "direction", u)

    @property
    def c(self):
        return self.point

    @property
    def u(self):
        return self.direction

    @property
    def dim(self):
        return self.point.shape[0]

    def _project(self, x):
        return self.point + np.outer(x @ self.direction, self.direction)

    def _support(self, g, tol):
        if abs(g @ self.direction) > tol * max(1.0, np.linalg.norm(g)):
            return INF
        return float(g @ self.point)


@dataclass(frozen=True, eq=False)
class Ball(_Set):
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        r = float(self.radius)
        if not (r >= 0.0 and math.isfinite(r)):
            raise ValueError("ball radius must be finite and nonnegative")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.shape[0]

    def _project(self, x):
        diff = x - self.center
        n = np.linalg.norm(diff, axis=1)
        scale = np.ones_like(n)
        out = n > self.radius
        scale[out] = self.radius / n[out]
        return self.center + diff * scale[:, None]

    def _support(self, g, tol):
        return float(g @ self.center + self.radius * np.linalg.norm(g))


@dataclass(frozen=True, eq=False)
class Box(_Set):
    """Axis-aligned box with finite bounds lower <= upper."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _vec(self.lower, "lower")
        hi = _vec(self.upper, "upper")
        if lo.shape != hi.shape:
            raise DimensionError("box bounds must have the same dimension")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    def _project(self, x):
        return np.clip(x, self.lower, self.upper)

    def _support(self, g, tol):
        return float(np.maximum(self.lower * g, self.upper * g).sum())


def _epi_exp_root(xi0, eta0):
    """Solve xi - xi0 + e^xi (e^xi - eta0) = 0 for each outside point.

    On the bracket [lo, hi] the function is increasing and convex, and it is
    positive at hi, so Newton started at hi decreases monotonically to the
    root. Bisection is kept as a guard against rounding.
    """
    lo = np.where(eta0 > 0.0, np.log(np.maximum(eta0, 1e-300)), np.minimum(xi0, 0.0) - np.abs(eta0) - 2.0)
    lo = np.minimum(lo, xi0)
    hi = np.minimum(xi0, np.log(np.maximum(eta0, 1.0)) + 20.0)
    xi = hi.copy()
    for _ in range(200):
        ex = np.exp(xi)
        g = xi - xi0 + ex * (ex - eta0)
        dg = 1.0 + ex * (2.0 * ex - eta0)
        pos = g > 0.0
        hi = np.where(pos, xi, hi)
        lo = np.where(pos, lo, xi)
        step = g / dg
        nxt = xi - step
        bad = ~((nxt >= lo) & (nxt <= hi)) | ~np.isfinite(nxt)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = (np.abs(g) <= 1e-13) | (np.abs(nxt - xi) <= 1e-15 * (1.0 + np.abs(xi)))
        xi = nxt
        if np.all(done):
            break
    return xi


@dataclass(frozen=True, eq=False)
class EpiExp(_Set):
    """Epigraph of the exponential function in R^2: {(xi, eta) : exp(xi) <= eta}."""

    def __post_init__(self):
        pass

    @property
    def dim(self):
        return 2

    def _project(self, x):
        out = x.copy()
        with np.errstate(over="ignore"):
            outside = np.exp(x[:, 0]) > x[:, 1]
        if np.any(outside):
            xi = _epi_exp_root(x[outside, 0], x[outside, 1])
            out[outside, 0] = xi
            out[outside, 1] = np.exp(xi)
        return out

    def _support(self, g, tol):
        delta, eta = float(g[0]), float(g[1])
        scale = tol * max(1.0, math.hypot(delta, eta))
        if -scale <= delta < 0.0:
            delta = 0.0
        if 0.0 < eta <= scale:
            eta = 0.0
        if delta < 0.0 or eta > 0.0:
            return INF
        if delta == 0.0:
            return 0.0
        if eta == 0.0:
            return 0.0 if delta <= scale else INF
        # sup over xi of delta*xi + eta*e^xi, attained at e^xi = delta / (-eta)
        return delta * math.log(delta / -eta) - delta


@dataclass(frozen=True, eq=False)
class Translate(_Set):
    """The set inner + shift."""

    inner: _Set
    shift: np.ndarray

    def __post_init__(self):
        t = _vec(self.shift, "shift")
        if t.shape[0] != self.inner.dim:
            raise DimensionError("shift dimension does not match the inner set")
        object.__setattr__(self, "shift", t)

    @property
    def dim(self):
        return self.inner.dim

    def _project(self, x):
        return self.shift + self.inner._project(x - self.shift)

    def _support(self, g, tol):
        s = self.inner._support(g, tol)
        return s if s == INF else s + float(g @ self.shift)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Ordered sets (C_1, ..., C_m) in a common dimension. Order matters."""

    sets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        sets = tuple(self.sets)
        if len(sets) < 2:
            raise DimensionError("an ensemble needs at least two sets")
        dims = {s.dim for s in sets}
        if len(dims) != 1:
            raise DimensionError(f"sets have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "sets", sets)

    @property
    def m(self):
        return len(self.sets)

    @property
    def d(self):
        return self.sets[0].dim

    def rotated(self, k=1):
        """Relabel cyclically so that the new C_1 is the old C_{1+k}."""
        k %= self.m
        return Ensemble(self.sets[k:] + self.sets[:k])

    def translated(self, t):
        return Ensemble(tuple(Translate(s, t) for s in self.sets))


def project(s, x):
    """Nearest point of ``s`` to ``x``."""
    return s.project(x)


def contains(s, x, tol=1e-9):
    """True iff the distance from ``x`` to ``s`` is at most ``tol``."""
    return s.contains(x, tol)


def support_function(s, direction, tol=0.0):
    """sup over s in the set of <s, direction>; ``math.inf`` when unbounded."""
    return s.support(direction, tol)


def product_project(ensemble, x):
    """P_C on X^m: project block i onto C_i."""
    x = as_product(x, ensemble.m, ensemble.d)
    return np.stack([s._project(xi[None, :])[0] for s, xi in zip(ensemble.sets, x)])


def sample_members(s, n, rng, scales=(1.0, 10.0, 100.0)):
    """Draw ``n`` members of ``s`` by projecting Gaussian points at several scales.

    The large scales push samples far along unbounded directions, which is
    where a support inequality is most likely to be violated.
    """
    scales = np.asarray(scales, dtype=float)
    sc = scales[np.arange(n) % scales.size]
    pts = rng.standard_normal((n, s.dim)) * sc[:, None]
    return s._project(pts)
