"""Difference vectors, anchors and cycles for compositions of projectors."""

from .certify import certify_y, fb_forward_lipschitz, fb_forward_operator_norm, spectral_table
from .convex_sets import (
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
    support_function,
)
from .errors import (
    ApproximationWarning,
    DimensionError,
    InnerNonConvergence,
    NonConvergence,
    UnsupportedDim,
    UnsupportedM,
    UnsupportedPair,
)
from .oracles import m2_difference_vector, solve_three_lines, solve_two_lines
from .solvers import (
    Cycle,
    NoCycle,
    SolutionBundle,
    SolverConfig,
    diff_vectors_from_cycle,
    find_cycle,
    fixed_point_set_membership,
    solve,
    solve_banach,
    solve_forward_backward,
)
from .sum_projection import SumProjectionConfig, project_sum

__version__ = "0.1.0"
