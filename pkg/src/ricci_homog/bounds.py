"""Constants of the compactness argument and the resulting search box.

On the trace-one surface {tr_g T = 1}, every metric whose smallest
coefficient is below ``u`` or whose largest exceeds ``v`` has negative
scalar curvature, so a maximizer of S lies in [u, v]^s.  The box exists
only when the maximality constant ``a`` is positive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .curvature import scalar_curvature
from .errors import NotMaximal, SummandCountTooLarge, UnsortedInput, ZeroTensor
from .structure import StructureData, as_array

MAX_ENUMERATED_SUMMANDS = 20


@dataclass(frozen=True)
class BoundsReport:
    a: float
    b: float
    tau1: float
    tau2: float
    alpha1: float
    alpha2: float
    alpha: float
    alpha_tilde: float
    u: float
    v: float
    maximal: bool
    # u and v are powers with exponent 2^(s-1) - 1 and easily under/overflow
    log_u: float = float("nan")
    log_v: float = float("nan")

    def to_dict(self):
        return asdict(self)


def maximality_constant(sd: StructureData) -> float:
    """a = min over nonempty proper I of max_{i,k in I, l not in I} gamma_ik^l."""
    s = sd.s
    if s < 2:
        raise ValueError("maximality constant needs s >= 2")
    if s > MAX_ENUMERATED_SUMMANDS:
        raise SummandCountTooLarge(f"s = {s} exceeds the enumeration limit {MAX_ENUMERATED_SUMMANDS}")
    g = sd.gamma
    best = math.inf
    for size in range(1, s):
        for inside in itertools.combinations(range(s), size):
            outside = [l for l in range(s) if l not in inside]
            exit_max = g[np.ix_(inside, inside, outside)].max()
            best = min(best, float(exit_max))
    return best


def killing_upper_bound(sd: StructureData) -> float:
    """b = max_i b_i + 1 (B is diagonal in the adapted basis)."""
    return float(np.max(sd.b)) + 1.0


def tau_values(sd: StructureData, z):
    """tau1 = n max_i z_i and tau2 = (1/n) sum_i d_i z_i."""
    z = as_array(z, "z")
    if np.any(z < 0) or z.max(initial=0.0) <= 0:
        raise ZeroTensor("T must be positive-semidefinite and nonzero")
    n = sd.n
    return float(n * z.max()), float(np.sum(sd.d * z) / n)


def alpha_recursions(s: int, tau1: float, tau2: float):
    """alpha1(s), alpha2(s) by iterating the two inductive minimizations."""
    if s < 2:
        raise ValueError("alpha recursions start at s = 2")
    a1 = 1.0 / tau1**2
    a2 = float(tau2)
    for m in range(2, s):
        q = 2.0**m - 1.0  # 2^m - 1
        r = 2.0**m - 2.0
        a1 = a1 ** (r / q) * (r ** (1.0 / q) + r ** (-r / q))
        h = 2.0 ** (m - 1)
        w = (h - 1.0) / h
        a2 = a2 ** ((h - 1.0) / q) * (w ** (-(h - 1.0) / q) + w ** (h / q))
    return a1, a2


def bracket_exponent(s: int) -> float:
    """p = 2^(s-1) / (2^(s-1) - 1)."""
    e = 2.0 ** (s - 1)
    return e / (e - 1.0)


def alpha_tilde(kill_n: float, alpha: float, p: float) -> float:
    """sup_{t>0} kill_n/(2t) - alpha t^(-p), attained at t* from the first-order condition."""
    t_star = (2.0 * alpha * p / kill_n) ** (1.0 / (p - 1.0))
    return kill_n / (2.0 * t_star) - alpha * t_star ** (-p)


def search_box(sd: StructureData, z) -> BoundsReport:
    s = sd.s
    a = maximality_constant(sd)
    if not a > 0:
        raise NotMaximal("maximality constant a = 0: no confining box")
    b = killing_upper_bound(sd)
    tau1, tau2 = tau_values(sd, z)
    a1, a2 = alpha_recursions(s, tau1, tau2)
    alpha = a / (8.0 * (s - 1)) * min(a1, a2)
    p = bracket_exponent(s)
    kill_n = b * sd.n
    at = alpha_tilde(kill_n, alpha, p)
    expo = 2.0 ** (s - 1) - 1.0
    log_u = expo * math.log(2.0 * alpha / kill_n)
    log_v = expo * math.log(at / alpha)
    return BoundsReport(a, b, tau1, tau2, a1, a2, alpha, at,
                        _exp(log_u), _exp(log_v), True, log_u, log_v)


def _exp(t):
    try:
        return math.exp(t)
    except OverflowError:
        return math.inf


def sort_summands(sd: StructureData, x):
    """Relabel summands so x is ascending; returns (sd_sorted, x_sorted, perm)."""
    x = as_array(x, "x")
    perm = np.argsort(x, kind="stable")
    return sd.permuted(perm), x[perm], perm


def _check_sorted(x):
    if np.any(np.diff(x) < 0):
        raise UnsortedInput("metric coefficients must be sorted ascending")


def estimate_S_bound(sd: StructureData, x_sorted, a=None) -> float:
    """1/2 sum d_i b_i/x_i - a/(4(s-1)) sum_{i>=2} x_i / x_{i-1}^2.

    `a` may be passed in when already known; it does not depend on the
    ordering of the summands, so one value serves every sorted copy.
    """
    x = as_array(x_sorted, "x")
    _check_sorted(x)
    if a is None:
        a = maximality_constant(sd)
    killing = 0.5 * np.sum(sd.d * sd.b / x)
    chain = np.sum(x[1:] / x[:-1] ** 2)
    return float(killing - a / (4.0 * (sd.s - 1)) * chain)


def estimate_scal_bound(sd: StructureData, x_sorted, tau1, tau2, a=None) -> float:
    """(bn/2)/x_1 - alpha (x_1^(-p) + x_s^(1/(2^(s-1)-1))); needs x_1 <= tau1, x_s >= tau2."""
    x = as_array(x_sorted, "x")
    _check_sorted(x)
    if x[0] > tau1 or x[-1] < tau2:
        raise ValueError("estimate requires x_1 <= tau1 and x_s >= tau2")
    s = sd.s
    a1, a2 = alpha_recursions(s, tau1, tau2)
    if a is None:
        a = maximality_constant(sd)
    alpha = a / (8.0 * (s - 1)) * min(a1, a2)
    p = bracket_exponent(s)
    kill_n = killing_upper_bound(sd) * sd.n
    return float(kill_n / (2.0 * x[0]) - alpha * (x[0] ** -p + x[-1] ** (1.0 / (2.0 ** (s - 1) - 1.0))))


def box_certificate(sd: StructureData, x, report: BoundsReport) -> bool:
    """True when x lies outside [u, v] and S(x) < 0, as the box guarantees."""
    x = as_array(x, "x")
    outside = math.log(x.min()) < report.log_u or math.log(x.max()) > report.log_v
    return outside and scalar_curvature(sd, x) < 0
