"""Scalar curvature, its gradient and the Ricci coefficients of diagonal
invariant metrics.

For g = sum_i x_i Q|m_i the scalar curvature is

    S(x) = 1/2 sum_i d_i b_i / x_i - 1/4 sum_{i,k,l} gamma_ik^l x_l / (x_i x_k).

Ricci coefficients are not coded separately: they come from the identity
dS_g(h) = -<Ric(g), h>_g, which on diagonal tensors reads
R_i = -(x_i^2 / d_i) dS/dx_i.  Here Ric(g) = sum_i R_i Q|m_i, i.e. the
coefficients are taken relative to Q, not to g.
"""

from __future__ import annotations

import numpy as np

from .structure import StructureData, as_array


def scalar_curvature(sd: StructureData, x) -> float:
    x = as_array(x, "x")
    inv = 1.0 / x
    killing = 0.5 * np.sum(sd.d * sd.b * inv)
    brackets = 0.25 * np.einsum("ikl,i,k,l->", sd.gamma, inv, inv, x)
    return float(killing - brackets)


def scalar_gradient(sd: StructureData, x) -> np.ndarray:
    """Analytic partial derivatives dS/dx_j."""
    x = as_array(x, "x")
    inv = 1.0 / x
    g = sd.gamma
    # x_j appears as x_l (numerator) and as x_i, x_k (denominator); the two
    # denominator slots contribute equally because gamma is symmetric.
    upper = np.einsum("ikj,i,k->j", g, inv, inv)
    lower = np.einsum("jkl,k,l->j", g, inv, x) * inv * inv
    return -0.5 * sd.d * sd.b * inv * inv - 0.25 * (upper - 2.0 * lower)


def ricci_coefficients(sd: StructureData, x) -> np.ndarray:
    """R_i with Ric(g) = sum_i R_i Q|m_i.

    Expanded, R_j = b_j/2 + x_j^2/(4 d_j) sum_{i,k} gamma_ik^j/(x_i x_k)
    - 1/(2 d_j) sum_{k,l} gamma_jk^l x_l/x_k, which is what
    -(x_j^2/d_j) dS/dx_j simplifies to; the simplified form avoids the
    cancellation between the b_j terms.
    """
    x = as_array(x, "x")
    inv = 1.0 / x
    g = sd.gamma
    upper = np.einsum("ikj,i,k->j", g, inv, inv) * x * x
    cross = np.einsum("jkl,k,l->j", g, inv, x)
    return 0.5 * sd.b + (0.25 * upper - 0.5 * cross) / sd.d


def trace_T(sd: StructureData, z, x) -> float:
    """tr_g T = sum_i d_i z_i / x_i."""
    return float(np.sum(sd.d * as_array(z, "z") / as_array(x, "x")))


def inner_g(sd: StructureData, A, B, x) -> float:
    """<A, B>_g = sum_i d_i A_i B_i / x_i^2 for diagonal invariant tensors."""
    x = as_array(x, "x")
    return float(np.sum(sd.d * (np.asarray(A, float) * np.asarray(B, float)) / (x * x)))
