"""Solvers for Ric(g) = c T on invariant diagonal metrics.

Two routes:

* ``solve_two_summand`` - closed form for s = 2 with an intermediate
  subgroup (gamma_11^2 = 0, gamma_22^1 != 0), including the existence test.
* ``solve_general`` - maximizes S over the trace-one surface
  {x : sum_i d_i z_i / x_i = 1}.  Critical points of that restriction are
  exactly the solutions of Ric = cT for some real c.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import root
from scipy.stats import qmc

from .bounds import search_box
from .curvature import inner_g, ricci_coefficients, scalar_curvature, scalar_gradient, trace_T
from .errors import (
    DegenerateGamma,
    InvalidOptions,
    NonIntermediate,
    NotMaximal,
    WrongSummandCount,
    ZeroTensor,
)
from .structure import StructureData, as_array

log = logging.getLogger(__name__)

SOLVED = "Solved"
NO_SOLUTION = "NoSolution"
NOT_CONVERGED = "NotConverged"

_STATUS_RANK = {SOLVED: 0, NO_SOLUTION: 1, NOT_CONVERGED: 2}

# largest move of the log-coefficients in one ascent step
MAX_LOG_STEP = 1.0
# iterations allowed without the coefficient residual halving before a start
# is given up: short at a flat point (g-norm residual below tol), long elsewhere
FLAT_PATIENCE = 20
STALL_PATIENCE = 500
# relative size below which changes in S are indistinguishable from roundoff
_F_RESOLUTION = 1e-12
# coefficient residual below which a start switches to a Newton polish
POLISH_AT = 1e-4
# largest log-coefficient move a polish may make before it is rejected
_POLISH_RADIUS = 0.5


@dataclass
class SolveResult:
    x: Optional[np.ndarray]
    c: float
    residual: float
    status: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        """x_1 / x_2 (meaningful for s = 2)."""
        return float(self.x[0] / self.x[1]) if self.x is not None else math.nan

    def to_dict(self):
        return {
            "status": self.status,
            "x": None if self.x is None else [float(v) for v in self.x],
            "c": self.c,
            "residual": self.residual,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    max_iter: int = 10_000
    starts: int = 32
    seed: int = 0
    residual_tol: float = 1e-8
    # a start whose log-coefficients spread further than this is heading
    # for the orthant boundary and is abandoned
    spread_limit: float = 60.0
    # seeds are drawn from the search box clipped to [-seed_range, seed_range]
    seed_range: float = 8.0
    threads: Optional[int] = None

    def validate(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise InvalidOptions(f"tol must be positive, got {self.tol}")
        if not (self.residual_tol > 0 and math.isfinite(self.residual_tol)):
            raise InvalidOptions(f"residual_tol must be positive, got {self.residual_tol}")
        if self.max_iter < 1:
            raise InvalidOptions(f"max_iter must be >= 1, got {self.max_iter}")
        if self.starts < 1:
            raise InvalidOptions(f"starts must be >= 1, got {self.starts}")
        if self.seed < 0:
            raise InvalidOptions(f"seed must be >= 0, got {self.seed}")
        if not self.spread_limit > 0 or not self.seed_range > 0:
            raise InvalidOptions("spread_limit and seed_range must be positive")
        if self.threads is not None and self.threads < 1:
            raise InvalidOptions(f"threads must be >= 1, got {self.threads}")


def _tensor(z, s):
    z = as_array(z, "z")
    if z.shape != (s,):
        raise WrongSummandCount(f"tensor has {z.size} coefficients, structure has s = {s}")
    if np.any(z < 0) or z.max(initial=0.0) <= 0:
        raise ZeroTensor("T must be positive-semidefinite and not identically zero")
    return z


def _g_norm(sd, A, x):
    return math.sqrt(max(inner_g(sd, A, A, x), 0.0))


def ricci_fit(sd: StructureData, z, x):
    """Best multiplier c = <R, z>_g / <z, z>_g and the fit defects.

    Returns (R, c, residual, projected_gradient_norm).  The projected
    gradient of S on the tangent space {h : <z, h>_g = 0} is -(R - c z),
    so its g-norm is ||R - c z||_g; the residual is that norm relative to
    ||R||_g (zero when R vanishes).
    """
    R = ricci_coefficients(sd, x)
    w = sd.d / (x * x)  # <A, B>_g = sum w A B
    c = float(np.dot(w * R, z) / np.dot(w * z, z))
    E = R - c * z
    pg = math.sqrt(float(np.dot(w * E, E)))
    rn = math.sqrt(float(np.dot(w * R, R)))
    residual = pg / rn if rn > 0 else (0.0 if pg == 0 else math.inf)
    return R, c, residual, pg


def verify_solution(sd: StructureData, z, x, c) -> dict:
    """Check a candidate pair (x, c) against Ric(x) = c T."""
    z = _tensor(z, sd.s)
    x = as_array(x, "x")
    R, c_fit, _, pg = ricci_fit(sd, z, x)
    block = R - c * z
    rn = _g_norm(sd, R, x)
    err = _g_norm(sd, block, x)
    return {
        "block_residuals": [float(v) for v in block],
        "residual": err / rn if rn > 0 else (0.0 if err == 0 else math.inf),
        "ricci": [float(v) for v in R],
        "c": float(c),
        "c_fit": float(c_fit),
        "trace_T": trace_T(sd, z, x),
        "S": scalar_curvature(sd, x),
        "projected_gradient_norm": pg,
    }


# ----------------------------------------------------------------- s = 2


@dataclass(frozen=True)
class TwoSummandIntermediates:
    eta1: float
    eta2: float
    D: float
    condition_holds: bool
    lhs: float  # (zeta_2 + gamma_22^2/(4d_2) + gamma_22^1/d_2) z_1
    rhs: float  # (zeta_1 + gamma_11^1/(4d_1)) z_2


def _two_summand_constants(sd: StructureData, tol=1e-9):
    if sd.s != 2:
        raise WrongSummandCount(f"closed form needs s = 2, got s = {sd.s}")
    g = sd.gamma
    scale = max(1.0, float(np.abs(g).max()))
    if abs(g[0, 0, 1]) > tol * scale:
        raise NonIntermediate(
            f"gamma_11^2 = {g[0, 0, 1]:.3g} != 0; the first summand must lie in the intermediate algebra"
        )
    if abs(g[1, 1, 0]) <= tol * scale:
        raise DegenerateGamma("gamma_22^1 = 0: all invariant metrics share one Ricci tensor")
    sd = sd.with_zeta()
    d1, d2 = (float(v) for v in sd.d)
    g221 = float(g[1, 1, 0])
    e1 = float(sd.zeta[0]) + g[0, 0, 0] / (4 * d1)
    e2 = float(sd.zeta[1]) + g[1, 1, 1] / (4 * d2) + g221 / d2
    return d1, d2, g221, float(e1), float(e2)


def existence_condition(sd: StructureData, z) -> TwoSummandIntermediates:
    d1, d2, g221, e1, e2 = _two_summand_constants(sd)
    z1, z2 = _tensor(z, 2)
    k = 2 * d2 * d2 / (d1 * g221)
    eta1, eta2 = k * e1, k * e2
    # expanded form of (eta2 z2 + z1)^2 - (eta2^2 + 2 eta1) z2^2
    D = z1 * z1 + 2 * eta2 * z1 * z2 - 2 * eta1 * z2 * z2
    lhs, rhs = e2 * z1, e1 * z2
    return TwoSummandIntermediates(eta1, eta2, float(D), bool(lhs > rhs), float(lhs), float(rhs))


def _finish(sd, z, x, c, diagnostics):
    x = x * trace_T(sd, z, x)
    rep = verify_solution(sd, z, x, c)
    diagnostics = dict(diagnostics, S=rep["S"], projected_gradient_norm=rep["projected_gradient_norm"])
    return SolveResult(x, float(c), rep["residual"], SOLVED, diagnostics)


def solve_two_summand(sd: StructureData, z) -> SolveResult:
    """Closed-form solution; unique up to scaling when it exists.

    The minus-sign root c = d1 g (eta2 z2 + z1 - sqrt D) / (2 d2^2 z2^2) and
    the ratio x1/x2 = -(d1/(d2 z2)) (z1 - sqrt D) are evaluated in their
    rationalized forms, which avoid cancellation for small z2 and reduce
    to the z2 = 0 expressions continuously.
    """
    it = existence_condition(sd, z)
    z = _tensor(z, 2)
    z1, z2 = z
    diag = {"method": "closed_form", "eta1": it.eta1, "eta2": it.eta2, "discriminant": it.D,
            "condition_lhs": it.lhs, "condition_rhs": it.rhs}
    if not it.condition_holds:
        return SolveResult(None, math.nan, math.nan, NO_SOLUTION,
                           dict(diag, note="existence inequality fails"))
    d1, d2, g221, _, _ = _two_summand_constants(sd)
    root = math.sqrt(it.D)
    B = it.eta2 * z2 + z1
    C = d1 * g221 * (it.eta2**2 + 2 * it.eta1) / (4 * d2 * d2)
    c = 2 * C / (B + root)
    ratio = 2 * d1 * (it.eta2 * z1 - it.eta1 * z2) / (d2 * (z1 + root))
    return _finish(sd, z, np.array([ratio, 1.0]), c, diag)


def solve_degenerate(sd: StructureData, z) -> SolveResult:
    """s = 2 with gamma_22^1 = gamma_11^2 = 0: Ricci does not depend on x."""
    z = _tensor(z, sd.s)
    x = np.ones(sd.s)
    R, c, residual, pg = ricci_fit(sd, z, x)
    diag = {"method": "constant_ricci", "ricci": [float(v) for v in R]}
    if residual <= 1e-12 and c > 0:
        return _finish(sd, z, x, c, diag)
    return SolveResult(None, math.nan, math.nan, NO_SOLUTION,
                       dict(diag, note="the common Ricci tensor is not a positive multiple of T"))


def scan_existence(sd: StructureData, resolution: int):
    """Existence along z = (cos t, sin t), t in [0, pi/2], at `resolution` points."""
    if resolution < 2:
        raise InvalidOptions("resolution must be >= 2")
    _two_summand_constants(sd)
    rows = []
    for theta in np.linspace(0.0, math.pi / 2, resolution):
        z = np.array([math.cos(theta), math.sin(theta)])
        z[np.abs(z) < 1e-15] = 0.0
        res = solve_two_summand(sd, z)
        rows.append({
            "theta": float(theta),
            "z1": float(z[0]),
            "z2": float(z[1]),
            "exists": res.status == SOLVED,
            "c": res.c,
            "ratio": res.ratio,
        })
    return rows


# -------------------------------------------------------------- general s


def _project(sd, z, y):
    """Shift log-coefficients onto the trace-one surface (trace is degree -1)."""
    return y + math.log(trace_T(sd, z, np.exp(y)))


def _objective(sd, z, y):
    """S and its log-coordinate gradient at a point already on the surface."""
    x = np.exp(y)
    S = scalar_curvature(sd, x)
    dt = -sd.d * z / (x * x)
    grad = x * (scalar_gradient(sd, x) - S * dt)
    return S, grad


def _ascend(sd, z, y0, opts):
    """Gradient ascent with Armijo backtracking in log coordinates.

    Near the maximum the predicted increase drops below the resolution of
    S itself; there a trial step is accepted when it lowers the
    stationarity measures instead (approximate Armijo test).  A start that
    sits where S is flat to roundoff while the coefficients still miss
    R = cT is drifting towards the orthant boundary and ends as "flat"; one
    whose coefficient residual stops improving for long ends as "stagnant".
    Once close to a critical point the ascent hands over to ``_polish``,
    since gradient steps crawl when S is badly conditioned there.
    """
    y = _project(sd, z, y0)
    f, g = _objective(sd, z, y)
    pg, cr = _stationarity(sd, z, y)
    polished = False
    step = 1.0 / max(float(np.linalg.norm(g)), 1e-300)
    prev = None
    outcome = "max_iter"
    it = 0
    best_at, best_cr = 0, cr
    for it in range(opts.max_iter + 1):
        if pg <= opts.tol and cr <= opts.tol:
            outcome = "converged"
            break
        if cr <= POLISH_AT and not polished:
            polished = True
            y_new = _polish(sd, z, y)
            if y_new is not None:
                p_new, c_new = _stationarity(sd, z, y_new)
                if p_new + c_new < pg + cr:
                    y, prev = y_new, None
                    f, g = _objective(sd, z, y)
                    pg, cr = p_new, c_new
                    continue
        if cr < 0.5 * best_cr:
            best_at, best_cr = it, cr
        elif pg <= opts.tol and it - best_at >= FLAT_PATIENCE:
            outcome = "flat"
            break
        elif it - best_at >= STALL_PATIENCE:
            outcome = "stagnant"
            break
        if it == opts.max_iter:
            break
        if prev is not None:
            dy, dg = y - prev[0], g - prev[1]
            curv = -float(dy @ dg)
            step = float(dy @ dy) / curv if curv > 0 else 2.0 * step
        gnorm = float(np.linalg.norm(g))
        step = min(step, MAX_LOG_STEP / gnorm)
        slope = gnorm * gnorm
        for _ in range(80):
            trial = _project(sd, z, y + step * g)
            if np.all(np.isfinite(trial)):
                ft = scalar_curvature(sd, np.exp(trial))
                if ft >= f + 1e-4 * step * slope:
                    break
                if step * slope <= _F_RESOLUTION * max(1.0, abs(f)):
                    pt, ct = _stationarity(sd, z, trial)
                    if pt + ct < pg + cr:
                        break
            step *= 0.5
        else:
            outcome = "stalled"
            break
        prev = (y, g)
        y = trial
        f, g = _objective(sd, z, y)
        pg, cr = _stationarity(sd, z, y)
        if float(y.max() - y.min()) > opts.spread_limit:
            outcome = "diverged"
            break
    return y, f, it, outcome


def coefficient_residual(R, c, z) -> float:
    """max_i |R_i - c z_i| / max_i |R_i|, blind to the metric weights.

    The g-norm weights block i by d_i / x_i^2, so along a path to the
    orthant boundary the blocks whose coefficients blow up drop out of it
    and the g-norm residual tends to zero without the equation holding.
    """
    scale = float(np.abs(R).max())
    err = float(np.abs(R - c * z).max())
    return err / scale if scale > 0 else (0.0 if err == 0 else math.inf)


def _stationarity(sd, z, y):
    """(relative g-norm residual, coefficient residual) at log-coefficients y.

    Both are needed: the g-norm alone under-weights blocks with large x_i,
    so a small value of it can leave those coefficients visibly off.  Both
    are relative, so the tolerance does not depend on the scale of T.
    """
    R, c, residual, _ = ricci_fit(sd, z, np.exp(y))
    return residual, coefficient_residual(R, c, z)


def _polish(sd, z, y):
    """Newton-type solve of R(x) = c z, tr_g T = 1 from a nearby point.

    Returns projected log-coefficients, or None when the root finder fails
    or wanders off (it may then be heading for a different critical point).
    """
    s = sd.s
    R, c, _, _ = ricci_fit(sd, z, np.exp(y))
    scale = max(float(np.abs(R).max()), 1e-300)

    def equations(v):
        x = np.exp(v[:s])
        return np.append((ricci_coefficients(sd, x) - v[s] * z) / scale, math.log(trace_T(sd, z, x)))

    with np.errstate(all="ignore"):
        sol = root(equations, np.append(y, c), method="hybr", options={"xtol": 1e-15})
        y_new = sol.x[:s]
        if not np.all(np.isfinite(y_new)) or np.abs(y_new - y).max() > _POLISH_RADIUS:
            return None
        y_new = _project(sd, z, y_new)
    return y_new if np.all(np.isfinite(y_new)) else None


def _classify(sd, z, y, outcome, opts):
    x = np.exp(y)
    R, c, residual, pg = ricci_fit(sd, z, x)
    cr = coefficient_residual(R, c, z)
    converged = residual <= opts.tol and cr <= opts.tol
    if residual <= opts.residual_tol and cr <= opts.residual_tol and c > 0:
        status, note = SOLVED, ""
    elif converged and c <= 0 and sd.s == 2:
        status, note = NO_SOLUTION, "critical point with nonpositive multiplier"
    elif converged and c <= 0:
        # for s >= 3 one such critical point does not rule out another with c > 0
        status, note = NOT_CONVERGED, "critical point with nonpositive multiplier; nonexistence not certified"
    else:
        status, note = NOT_CONVERGED, outcome
    return x, c, residual, pg, status, note


def _seed_box(sd, z, opts):
    try:
        rep = search_box(sd, z)
    except NotMaximal:
        return None, (-3.0, 3.0)
    lo = max(rep.log_u, -opts.seed_range)
    hi = min(rep.log_v, opts.seed_range)
    if not lo < hi:
        lo, hi = rep.log_u, rep.log_v
    return rep, (lo, hi)


def _threads(opts):
    if opts.threads is not None:
        return opts.threads
    try:
        return max(1, int(os.environ.get("RICCI_HOMOG_THREADS", "1")))
    except ValueError:
        return 1


def solve_general(sd: StructureData, z, options: Optional[SolveOptions] = None, **kwargs) -> SolveResult:
    """Maximize S on the trace-one surface from deterministic multistart seeds."""
    opts = replace(options or SolveOptions(), **kwargs)
    opts.validate()
    if sd.s < 2:
        raise WrongSummandCount("the variational solver needs s >= 2")
    z = _tensor(z, sd.s)
    box, (lo, hi) = _seed_box(sd, z, opts)
    sampler = qmc.Halton(d=sd.s, scramble=True, seed=opts.seed)
    seeds = lo + (hi - lo) * sampler.random(opts.starts)

    def run(k):
        y, f, iters, outcome = _ascend(sd, z, seeds[k], opts)
        return (k, y, f, iters, outcome) + _classify(sd, z, y, outcome, opts)

    workers = min(_threads(opts), opts.starts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(run, range(opts.starts)))
    else:
        trials = [run(k) for k in range(opts.starts)]

    def rank(t):
        f = t[2] if math.isfinite(t[2]) else -math.inf
        return (_STATUS_RANK[t[9]], t[4] != "converged", -f, t[0])

    k, y, f, iters, outcome, x, c, residual, pg, status, note = min(trials, key=rank)
    if box is not None and (math.log(x.min()) < box.log_u or math.log(x.max()) > box.log_v):
        log.info("solution left the search box [%g, %g]", box.u, box.v)
    diagnostics = {
        "method": "multistart_ascent",
        "iterations": iters,
        "total_iterations": int(sum(t[3] for t in trials)),
        "starts": opts.starts,
        "best_start": k,
        "outcome": outcome,
        "box": None if box is None else {"u": box.u, "v": box.v, "log_u": box.log_u, "log_v": box.log_v},
        "seed_interval": [lo, hi],
        "projected_gradient_norm": pg,
        "S": f,
        "statuses": {s: sum(t[9] == s for t in trials) for s in (SOLVED, NO_SOLUTION, NOT_CONVERGED)},
    }
    if note:
        diagnostics["note"] = note
    return SolveResult(x, float(c), float(residual), status, diagnostics)
