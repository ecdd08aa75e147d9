"""Projection onto the closure of C + Delta by Seeger's alternating scheme.

The basic iteration is

    c_n = P_C(x - d_{n-1}),    d_n = P_Delta(x - c_n),

and c_n + d_n converges to the projection of x onto cl(C + Delta). It is a
block coordinate descent on phi(c, d) = |x - c - d|^2 over C x Delta.

When C + Delta is not closed the iterates drift off to infinity at a
sublinear rate while c_n + d_n creeps toward the limit. To make this usable
the loop periodically tries a doubling extrapolation along the recent drift
of d, keeping a step only when it strictly lowers phi, so the descent
property is preserved. It can be switched off with ``extrapolate=False``.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .convex_sets import product_project
from .errors import InnerNonConvergence
from .product_space import as_product

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SumProjectionConfig:
    max_inner_iters: int = 10000
    inner_tol: float = 1e-11
    initial_d: Optional[np.ndarray] = None
    extrapolate: bool = True
    extrapolate_every: int = 5

    def __post_init__(self):
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be at least 1")
        if self.extrapolate_every < 1:
            raise ValueError("extrapolate_every must be at least 1")


class SumProjection(NamedTuple):
    p: np.ndarray
    c_part: np.ndarray
    d_part: np.ndarray
    iters: int
    residual: float
    converged: bool


def _sweep(ensemble, x, d):
    c = product_project(ensemble, x - d)
    dn = np.broadcast_to((x - c).mean(axis=0), x.shape).copy()
    return c, dn


def _phi(x, c, d):
    r = x - c - d
    return float(np.vdot(r, r))


def _extrapolate(ensemble, x, c, d, anchor, max_doublings=80):
    # Try d + t (d - anchor) for t = 2, 4, 8, ... and keep the best descent.
    step = d - anchor
    if not np.any(step):
        return c, d
    best_c, best_d, best_phi = c, d, _phi(x, c, d)
    t = 1.0
    for _ in range(max_doublings):
        t *= 2.0
        c2, d2 = _sweep(ensemble, x, d + t * step)
        phi2 = _phi(x, c2, d2)
        if phi2 < best_phi:
            best_c, best_d, best_phi = c2, d2, phi2
        else:
            break
    return best_c, best_d


def project_sum(ensemble, x, cfg=None):
    """Project ``x`` onto cl(C + Delta).

    Returns a ``SumProjection`` (p, c_part, d_part, iters, residual,
    converged) with p = c_part + d_part, c_part in C and d_part exactly
    diagonal. The residual is the last successive difference of c_n + d_n,
    with c_0 + d_0 taken to be x. Running out of budget raises an
    ``InnerNonConvergence`` warning and still returns the last iterate.
    """
    cfg = cfg or SumProjectionConfig()
    x = as_product(x, ensemble.m, ensemble.d)
    if cfg.initial_d is None:
        d = np.zeros_like(x)
    else:
        d = as_product(cfg.initial_d, ensemble.m, ensemble.d)
        d = np.broadcast_to(d.mean(axis=0), x.shape).copy()

    s = x
    anchor = d
    c = dn = None
    res = np.inf
    for n in range(1, cfg.max_inner_iters + 1):
        c, dn = _sweep(ensemble, x, d)
        sn = c + dn
        res = float(np.linalg.norm(sn - s))
        conv = res <= cfg.inner_tol
        if cfg.extrapolate and (conv or n % cfg.extrapolate_every == 0):
            c2, d2 = _extrapolate(ensemble, x, c, dn, anchor)
            anchor = d2
            jump = float(np.linalg.norm(c2 + d2 - sn))
            if conv and jump <= cfg.inner_tol:
                return SumProjection(sn, c, dn, n, res, True)
            if jump > 0.0:
                res = max(res, jump)
            c, dn = c2, d2
            sn = c + dn
        elif conv:
            return SumProjection(sn, c, dn, n, res, True)
        if n % 100 == 0:
            log.debug("seeger iter %d residual %.3e", n, res)
        d = dn
        s = sn

    warnings.warn(
        f"sum projection stopped after {cfg.max_inner_iters} iterations (residual {res:.3e})",
        InnerNonConvergence,
        stacklevel=2,
    )
    return SumProjection(c + dn, c, dn, cfg.max_inner_iters, res, False)
