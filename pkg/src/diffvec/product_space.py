"""Linear operators on the product space X^m = (R^d)^m.

A product vector is stored as a float ndarray of shape ``(m, d)``; row ``i``
is the block ``x_{i+1}``. Every operator here acts structurally (rolls and
averages), so the cost is O(m d) and no dense matrices are formed.
"""

from enum import Enum

import numpy as np

from .errors import DimensionError


def as_product(x, m=None, d=None):
    """Validate and return ``x`` as a float array of shape (m, d).

    A 1-D input is read as m scalar blocks (d = 1).
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionError(f"expected a (m, d) array, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimensionError(f"need at least 2 blocks, got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise DimensionError("blocks must have dimension >= 1")
    if m is not None and arr.shape[0] != m:
        raise DimensionError(f"expected {m} blocks, got {arr.shape[0]}")
    if d is not None and arr.shape[1] != d:
        raise DimensionError(f"expected block dimension {d}, got {arr.shape[1]}")
    return arr


def shift_right(x):
    """Circular right shift R: (x_1, ..., x_m) -> (x_m, x_1, ..., x_{m-1})."""
    return np.roll(as_product(x), 1, axis=0)


def shift_left(x):
    """Circular left shift R*: (x_1, ..., x_m) -> (x_2, ..., x_m, x_1)."""
    return np.roll(as_product(x), -1, axis=0)


def block_sum(x):
    """Sum of the blocks, a vector in R^d. Zero exactly on the complement of the diagonal."""
    return as_product(x).sum(axis=0)


def project_diagonal(x):
    """P_Delta: replace every block with the block average."""
    x = as_product(x)
    return np.broadcast_to(x.mean(axis=0), x.shape).copy()


def project_diagonal_perp(x):
    """P_{Delta-perp} = Id - P_Delta."""
    x = as_product(x)
    return x - x.mean(axis=0)


def _shift_poly(x, coeffs):
    # sum_k coeffs[k] R^k x, with coeffs indexed from k = 0
    out = np.zeros_like(x)
    for k, a in enumerate(coeffs):
        if a != 0.0:
            out += a * np.roll(x, k, axis=0)
    return out


def t_coefficients(m):
    """Coefficients of T = (1/2m) sum_{k=1}^{m-1} (m - 2k) R^k, indexed by lag k = 0..m-1."""
    k = np.arange(m)
    c = (m - 2.0 * k) / (2.0 * m)
    c[0] = 0.0
    return c


def q_coefficients(m):
    """Coefficients of Q = (1/m) sum_{k=1}^{m-1} k R^k, indexed by lag."""
    return np.arange(m) / float(m)


def apply_T(x):
    """Apply the skew operator T. The result always lies in Delta-perp."""
    x = as_product(x)
    return _shift_poly(x, t_coefficients(x.shape[0]))


def apply_half_id_plus_T(x):
    """Apply 1/2 Id + T."""
    x = as_product(x)
    return 0.5 * x + apply_T(x)


def apply_half_id_minus_T(x):
    """Apply 1/2 Id - T, the map iterated (before projection) by the Banach scheme."""
    x = as_product(x)
    return 0.5 * x - apply_T(x)


def apply_half_id_plus_T_inverse(x):
    """Apply (1/2 Id + T)^{-1} = Id - R + 2 P_Delta."""
    x = as_product(x)
    return x - np.roll(x, 1, axis=0) + 2.0 * x.mean(axis=0)


def apply_Q(x):
    """Apply Q = (1/m) sum_{k=1}^{m-1} k R^k."""
    x = as_product(x)
    return _shift_poly(x, q_coefficients(x.shape[0]))


def inner(x, y):
    """Inner product on X^m (sum of blockwise inner products)."""
    return float(np.vdot(as_product(x), as_product(y)))


class BlockOperatorTag(Enum):
    """Names for the structural operators, usable as callables via ``apply``."""

    R = "R"
    R_ADJOINT = "R_adjoint"
    T = "T"
    Q = "Q"
    P_DIAG = "P_diag"
    P_DIAG_PERP = "P_diag_perp"
    HALF_ID_PLUS_T_INVERSE = "half_id_plus_T_inverse"

    def apply(self, x):
        return _DISPATCH[self](x)


_DISPATCH = {
    BlockOperatorTag.R: shift_right,
    BlockOperatorTag.R_ADJOINT: shift_left,
    BlockOperatorTag.T: apply_T,
    BlockOperatorTag.Q: apply_Q,
    BlockOperatorTag.P_DIAG: project_diagonal,
    BlockOperatorTag.P_DIAG_PERP: project_diagonal_perp,
    BlockOperatorTag.HALF_ID_PLUS_T_INVERSE: apply_half_id_plus_T_inverse,
}
