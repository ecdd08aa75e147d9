"""Independent checks: the dual certificate for y and spectral constants.

A vector y is the dual solution exactly when

1. y lies in Delta-perp (its blocks sum to zero),
2. e = -y/2 - T y lies in cl(C + Delta), and
3. sum_i sigma_{C_i}(y_i) <= -|y|^2 / 2.

``certify_y`` measures each condition and, as a falsification layer,
evaluates the support inequality on randomly sampled members of every set.
"""

import math
from dataclasses import dataclass

import numpy as np

from .convex_sets import sample_members
from .product_space import apply_T, as_product, block_sum, t_coefficients
from .sum_projection import SumProjectionConfig, project_sum


@dataclass(frozen=True)
class CertificateReport:
    diag_residual: float
    membership_residual: float
    support_gap: float
    sampled_violation: float
    tol: float
    passed: bool

    def as_dict(self):
        return {
            "diag_residual": self.diag_residual,
            "membership_residual": self.membership_residual,
            "support_gap": _finite_or_str(self.support_gap),
            "sampled_violation": self.sampled_violation,
            "tol": self.tol,
            "passed": self.passed,
        }


def _finite_or_str(x):
    return x if math.isfinite(x) else "inf"


@dataclass(frozen=True)
class SpectralReport:
    m: int
    squared_singular_values: tuple
    operator_norm: float
    contraction: bool


def certify_y(ensemble, y, tol=1e-7, samples=2000, rng=None, membership_cfg=None):
    """Check the three certificate conditions for ``y``.

    ``rng`` drives member sampling; pass a seeded ``np.random.Generator`` for
    reproducible reports (the default is seeded with 0).
    """
    y = as_product(y, ensemble.m, ensemble.d)
    rng = np.random.default_rng(0) if rng is None else rng
    half_sq = 0.5 * float(np.vdot(y, y))

    diag = float(np.linalg.norm(block_sum(y)))

    e = -0.5 * y - apply_T(y)
    cfg = membership_cfg or SumProjectionConfig(inner_tol=1e-12, max_inner_iters=20000)
    sp = project_sum(ensemble, e, cfg)
    membership = float(np.linalg.norm(e - sp.p))

    sigma = sum(s.support(yi, tol) for s, yi in zip(ensemble.sets, y))
    gap = sigma + half_sq

    sampled = half_sq
    if samples > 0:
        for s, yi in zip(ensemble.sets, y):
            sampled += float(np.max(sample_members(s, samples, rng) @ yi))

    passed = diag <= tol and membership <= tol and gap <= tol and sampled <= tol
    return CertificateReport(diag, membership, float(gap), sampled, tol, bool(passed))


def spectral_table(m):
    """Squared singular values and norm of 1/2 Id - T on X^m.

    1/2 Id - T is a polynomial in the cyclic shift, so it is diagonalized by
    the DFT and its singular values are the moduli of the symbol.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    coeffs = -t_coefficients(m)
    coeffs[0] = 0.5
    sq = np.sort(np.abs(np.fft.fft(coeffs)) ** 2)[::-1]
    norm = math.sqrt(sq[0])
    return SpectralReport(m, tuple(float(s) for s in sq), norm, norm < 1.0)


def fb_forward_coefficients(m, gamma):
    """Shift coefficients of (1 - gamma) Id + gamma R - 2 gamma P_Delta, by lag."""
    a = np.full(m, -2.0 * gamma / m)
    a[0] += 1.0 - gamma
    a[1] += gamma
    return a


def _check_gamma(m, gamma):
    if m < 2:
        raise ValueError("m must be at least 2")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")


def fb_forward_lipschitz(m, gamma):
    """Lipschitz constant of the forward-backward forward operator.

    This is the sum of the absolute shift coefficients, the bound obtained
    from the triangle inequality since every power of R is an isometry. It
    gives 0 for (m=2, gamma=1/2), 3/5 for (m=3, gamma=3/5) and 3(m-2)/(m+2)
    at gamma = m/(m+2). ``fb_forward_operator_norm`` returns the exact norm.
    """
    _check_gamma(m, gamma)
    return float(np.abs(fb_forward_coefficients(m, gamma)).sum())


def fb_forward_operator_norm(m, gamma):
    """Exact operator norm of the forward operator, from its DFT symbol."""
    _check_gamma(m, gamma)
    return float(np.max(np.abs(np.fft.fft(fb_forward_coefficients(m, gamma)))))
