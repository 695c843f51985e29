"""Invariant Riemannian metrics with prescribed Ricci curvature Ric(g) = cT
on compact homogeneous spaces with diagonal isotropy data."""

__version__ = "0.1.0"

from .bounds import (
    BoundsReport,
    alpha_recursions,
    estimate_S_bound,
    estimate_scal_bound,
    killing_upper_bound,
    maximality_constant,
    search_box,
    tau_values,
)
from .curvature import inner_g, ricci_coefficients, scalar_curvature, scalar_gradient, trace_T
from .io import load, save
from .solver import (
    SolveOptions,
    SolveResult,
    existence_condition,
    scan_existence,
    solve_general,
    solve_two_summand,
    verify_solution,
)
from .structure import (
    InvariantMetric,
    InvariantTensor,
    LieAlgebraTable,
    StructureData,
    casimir_residual,
    derive_structure,
    validate_structure,
)
