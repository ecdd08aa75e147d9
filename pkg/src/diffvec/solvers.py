"""Solvers for the dual vector y, the anchor e and the difference vectors v.

y is the unique zero of 1/2 y + T y + d(sigma_{C+Delta})(y). From it

    e = -y/2 - T y,    v = R* e - e = -R* y,

and cycles exist exactly when e is attained in C + Delta. Two schemes are
provided. The Banach iteration y <- (Id - P)(y/2 - T y), where P projects
onto cl(C + Delta), is a contraction for m <= 5. The forward-backward
iteration x <- P((1 - gamma) x + gamma R x - 2 gamma P_Delta x) works for
any m and converges to e.
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .certify import CertificateReport, certify_y
from .errors import NonConvergence, UnsupportedM
from .product_space import (
    apply_half_id_minus_T,
    apply_T,
    as_product,
    project_diagonal_perp,
    shift_left,
    shift_right,
)
from .sum_projection import SumProjectionConfig, project_sum

log = logging.getLogger(__name__)

BANACH = "banach"
FORWARD_BACKWARD = "forward_backward"


@dataclass(frozen=True)
class SolverConfig:
    method: str = FORWARD_BACKWARD
    gamma: Optional[float] = None  # None means m / (m + 2)
    outer_tol: float = 1e-9
    max_outer_iters: int = 100000
    sum_cfg: SumProjectionConfig = field(default_factory=SumProjectionConfig)
    certify: bool = True
    seed: int = 0  # drives member sampling in the certificate

    def __post_init__(self):
        if self.method not in (BANACH, FORWARD_BACKWARD):
            raise ValueError(f"unknown method {self.method!r}")
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.outer_tol > 0:
            raise ValueError("outer_tol must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")

    def inner_cfg(self):
        # Cold start every inner call: a warm-started d lags the drift of
        # the non-closed case and stalls the outer loop.
        tol = min(self.sum_cfg.inner_tol, self.outer_tol * 1e-2)
        return replace(self.sum_cfg, inner_tol=tol, initial_d=None)


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    y: np.ndarray
    e: np.ndarray
    v: np.ndarray
    method: str
    iters: int
    residual: float
    certificate: Optional[CertificateReport] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.y.shape[0]


@dataclass(frozen=True, eq=False)
class Cycle:
    """z with z = P_C(R z) up to ``residual``."""

    z: np.ndarray
    residual: float


@dataclass(frozen=True)
class NoCycle:
    """No cycle was found. This is a numerical diagnostic, not a proof of emptiness."""

    reason: str
    iters: int
    picard_residual: float
    anchor_gap: float
    membership_residual: float


def _bundle(ensemble, y, e, v, method, iters, residual, cfg, diagnostics):
    cert = certify_y(ensemble, y, rng=np.random.default_rng(cfg.seed)) if cfg.certify else None
    return SolutionBundle(y, e, v, method, iters, residual, cert, diagnostics)


def solve_banach(ensemble, cfg=None):
    """Iterate y <- (Id - P)(y/2 - T y) from y = 0.

    Raises ``UnsupportedM`` for m >= 6, where 1/2 Id - T is no longer a
    contraction.
    """
    cfg = cfg or SolverConfig(method=BANACH)
    m = ensemble.m
    if m >= 6:
        raise UnsupportedM(f"the Banach scheme needs m <= 5, got m = {m}")
    inner = cfg.inner_cfg()
    y = np.zeros((m, ensemble.d))
    inner_total = 0
    step = np.inf
    for n in range(1, cfg.max_outer_iters + 1):
        w = apply_half_id_minus_T(y)
        sp = project_sum(ensemble, w, inner)
        inner_total += sp.iters
        y_new = w - sp.p
        step = float(np.linalg.norm(y_new - y))
        y = y_new
        if step <= cfg.outer_tol:
            break
    converged = step <= cfg.outer_tol
    # keep y exactly in Delta-perp; the drift is rounding only
    y = project_diagonal_perp(y)
    e = -0.5 * y - apply_T(y)
    v = shift_left(e) - e
    diagnostics = {"inner_iters": inner_total, "converged": converged}
    bundle = _bundle(ensemble, y, e, v, BANACH, n, step, cfg, diagnostics)
    if not converged:
        raise NonConvergence(f"Banach iteration did not converge in {n} steps (step {step:.3e})", bundle)
    return bundle


def solve_forward_backward(ensemble, cfg=None):
    """Forward-backward iteration on e, started from x = 0.

    On return e = lim x, y = lim (R x - x - 2 P_Delta x) and
    v = lim (R* x - x). The distance between y and the relation
    e = -y/2 - T y is recorded as ``diagnostics['relation_gap']``.
    """
    cfg = cfg or SolverConfig()
    m = ensemble.m
    gamma = cfg.gamma if cfg.gamma is not None else m / (m + 2.0)
    inner = cfg.inner_cfg()
    x = np.zeros((m, ensemble.d))
    inner_total = 0
    step = np.inf
    for n in range(1, cfg.max_outer_iters + 1):
        mean = x.mean(axis=0)
        f = (1.0 - gamma) * x + gamma * np.roll(x, 1, axis=0) - 2.0 * gamma * mean
        sp = project_sum(ensemble, f, inner)
        inner_total += sp.iters
        step = float(np.linalg.norm(sp.p - x))
        x = sp.p
        if step <= cfg.outer_tol:
            break
    converged = step <= cfg.outer_tol
    e = x
    y = shift_right(x) - x - 2.0 * x.mean(axis=0)
    v = shift_left(x) - x
    relation_gap = float(np.linalg.norm(e - (-0.5 * y - apply_T(y))))
    diagnostics = {
        "inner_iters": inner_total,
        "converged": converged,
        "gamma": gamma,
        "relation_gap": relation_gap,
    }
    bundle = _bundle(ensemble, y, e, v, FORWARD_BACKWARD, n, step, cfg, diagnostics)
    if not converged:
        raise NonConvergence(
            f"forward-backward iteration did not converge in {n} steps (step {step:.3e})", bundle
        )
    return bundle


def solve(ensemble, cfg=None):
    """Dispatch on ``cfg.method``."""
    cfg = cfg or SolverConfig()
    if cfg.method == BANACH:
        return solve_banach(ensemble, cfg)
    return solve_forward_backward(ensemble, cfg)


def _sweep_cycle(ensemble, w):
    # z_1 = P_1 w, z_i = P_i z_{i-1}; a cycle when z_m = w
    z = np.empty((ensemble.m, ensemble.d))
    for i, s in enumerate(ensemble.sets):
        w = s.project(w)
        z[i] = w
    return z


def find_cycle(ensemble, bundle, tol=1e-7, max_iters=20000, window=1000, plateau=1e-3):
    """Look for a cycle by iterating the composition P_m ... P_1 from e_m.

    Each sweep w -> P_m ... P_1 w produces z = (P_1 w, P_2 P_1 w, ...), and
    z is a cycle when z_m = w, that is when z = P_C(R z). Sweeping the
    composition rather than iterating P_C R in the product space keeps the
    map averaged, so it converges whenever a cycle exists.

    A cycle is accepted when both the fixed-point residual and the distance
    from P_{Delta-perp} z to e are below tolerance. Existence of a cycle is a
    limit property, so the search gives up (returning ``NoCycle``) when the
    worse of the two measures stops improving: relative decrease below
    ``plateau`` over ``window`` sweeps, or the budget runs out.
    """
    e = bundle.e
    e_scale = 1.0 + float(np.linalg.norm(e))
    w = e[-1].copy()
    history = []
    res = gap = np.inf
    for n in range(1, max_iters + 1):
        z = _sweep_cycle(ensemble, w)
        # only block 1 of z - P_C(R z) can be nonzero
        res = float(np.linalg.norm(ensemble.sets[0].project(z[-1]) - z[0]))
        gap = float(np.linalg.norm(project_diagonal_perp(z) - e)) / e_scale
        if res <= tol and gap <= tol:
            return Cycle(z, res)
        w = z[-1]
        score = max(res, gap)
        history.append(score)
        if n > window and score > (1.0 - plateau) * history[n - 1 - window]:
            reason = "plateau"
            break
    else:
        reason = "budget"
    sp = project_sum(ensemble, e, SumProjectionConfig(inner_tol=1e-12))
    membership = float(np.linalg.norm(sp.p - e))
    return NoCycle(reason, n, res, gap, membership)


def diff_vectors_from_cycle(cycle):
    """v_i = z_{i+1} - z_i, with v_m = z_1 - z_m."""
    z = cycle.z if isinstance(cycle, Cycle) else as_product(cycle)
    return shift_left(z) - z


def _composition_residual(ensemble, i, x):
    # x - P_i P_{i-1} ... P_1 P_m ... P_{i+1} x, applying P_{i+1} first
    m = ensemble.m
    p = x
    for k in range(1, m + 1):
        p = ensemble.sets[(i + k) % m].project(p)
    return float(np.linalg.norm(x - p))


def fixed_point_set_membership(ensemble, bundle, index, x, tol=1e-7, check_dynamics=True):
    """Test x in F_i = Fix(P_i P_{i-1} ... P_1 P_m ... P_{i+1}), 1-based ``index``.

    Uses F_i = C_i  n  (C_{i-1} + v_{i-1})  n  (C_{i-2} + v_{i-2} + v_{i-1})  n ...,
    with indices taken cyclically. The dynamical definition is evaluated as a
    cross-check and a warning is issued if the two disagree.
    """
    m = ensemble.m
    if not 1 <= index <= m:
        raise IndexError(f"index must be in 1..{m}, got {index}")
    x = np.asarray(x, dtype=float)
    i = index - 1
    shift = np.zeros(ensemble.d)
    inside = True
    for k in range(m):
        j = (i - k) % m
        if k > 0:
            shift = shift + bundle.v[j]
        s = ensemble.sets[j]
        if np.linalg.norm(x - shift - s.project(x - shift)) > tol:
            inside = False
            break
    if check_dynamics:
        dyn = _composition_residual(ensemble, i, x) <= tol
        if dyn != inside:
            warnings.warn(
                f"fixed-point membership of {x.tolist()} in F_{index}: "
                f"intersection test says {inside}, composition test says {dyn}",
                stacklevel=2,
            )
    return inside
