"""Finite data model of a homogeneous space G/H and its derivation from
Lie bracket tables.

All arrays are coordinates in a fixed Q-orthonormal basis; Q itself is
never represented.  Indices are 0-based in memory and 1-based on disk
(see :mod:`ricci_homog.io`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InvalidTable,
    MissingZeta,
    NonProportional,
    NonScalarCasimir,
    ZeroTensor,
)

TOL = 1e-9


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StructureData:
    """Dimensions d_i, Killing coefficients b_i, bracket constants
    gamma[i, k, l] and (optionally) Casimir constants zeta_i of the
    isotropy summands m_1, ..., m_s."""

    d: np.ndarray
    b: np.ndarray
    gamma: np.ndarray
    zeta: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "d", _frozen(self.d, dtype=np.int64))
        object.__setattr__(self, "b", _frozen(self.b))
        object.__setattr__(self, "gamma", _frozen(self.gamma))
        if self.zeta is not None:
            object.__setattr__(self, "zeta", _frozen(self.zeta))
        s = self.d.shape[0]
        if self.d.ndim != 1 or s < 1:
            raise ValueError("d must be a nonempty 1-d array")
        if self.b.shape != (s,):
            raise ValueError(f"b must have shape ({s},), got {self.b.shape}")
        if self.gamma.shape != (s, s, s):
            raise ValueError(f"gamma must have shape ({s}, {s}, {s}), got {self.gamma.shape}")
        if self.zeta is not None and self.zeta.shape != (s,):
            raise ValueError(f"zeta must have shape ({s},), got {self.zeta.shape}")

    @property
    def s(self) -> int:
        return int(self.d.shape[0])

    @property
    def n(self) -> int:
        return int(self.d.sum())

    def with_zeta(self) -> "StructureData":
        """Return a copy carrying zeta, solved from the Casimir identity if absent."""
        if self.zeta is not None:
            return self
        zeta = (self.d * self.b - self.gamma.sum(axis=(1, 2))) / (2.0 * self.d)
        return StructureData(self.d, self.b, self.gamma, zeta, self.label)

    def permuted(self, perm: Sequence[int]) -> "StructureData":
        """Relabel summands so that new summand j is old summand perm[j]."""
        p = np.asarray(perm)
        zeta = None if self.zeta is None else self.zeta[p]
        gamma = self.gamma[np.ix_(p, p, p)]
        return StructureData(self.d[p], self.b[p], gamma, zeta, self.label)

    def __eq__(self, other):
        if not isinstance(other, StructureData):
            return NotImplemented
        if (self.zeta is None) != (other.zeta is None):
            return False
        return (
            self.label == other.label
            and np.array_equal(self.d, other.d)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.gamma, other.gamma)
            and (self.zeta is None or np.array_equal(self.zeta, other.zeta))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LieAlgebraTable:
    """Bracket constants c[a, b, e] = Q([v_a, v_b], v_e) of a Q-orthonormal
    basis of g, together with the h / m_1 ... m_s index partition."""

    c: np.ndarray
    h_indices: tuple
    m_blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", _frozen(self.c))
        object.__setattr__(self, "h_indices", tuple(int(i) for i in self.h_indices))
        object.__setattr__(
            self, "m_blocks", tuple(tuple(int(i) for i in blk) for blk in self.m_blocks)
        )
        n = self.c.shape[0]
        if self.c.shape != (n, n, n):
            raise ValueError("c must be a cubic array")

    @property
    def dim_g(self) -> int:
        return int(self.c.shape[0])

    def __eq__(self, other):
        if not isinstance(other, LieAlgebraTable):
            return NotImplemented
        return (
            self.h_indices == other.h_indices
            and self.m_blocks == other.m_blocks
            and np.array_equal(self.c, other.c)
        )

    __hash__ = None


@dataclass(frozen=True)
class InvariantTensor:
    """Coefficients z_i of a G-invariant symmetric tensor T relative to Q."""

    z: np.ndarray

    def __post_init__(self):
        z = _frozen(self.z)
        if z.ndim != 1:
            raise ValueError("z must be 1-d")
        if np.any(z < 0) or not np.all(np.isfinite(z)):
            raise ValueError("T must be positive-semidefinite: every z_i >= 0")
        if z.max(initial=0.0) <= 0:
            raise ZeroTensor("T must not vanish identically")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class InvariantMetric:
    """Coefficients x_i > 0 of a diagonal G-invariant metric relative to Q."""

    x: np.ndarray

    def __post_init__(self):
        x = _frozen(self.x)
        if x.ndim != 1 or np.any(~(x > 0)) or not np.all(np.isfinite(x)):
            raise ValueError("metric coefficients must be finite and positive")
        object.__setattr__(self, "x", x)


def as_array(obj, attr):
    """Unwrap an InvariantMetric/InvariantTensor or pass array-likes through."""
    return np.asarray(getattr(obj, attr, obj), dtype=float)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    indices: tuple = ()
    magnitude: float = 0.0


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code, message, indices=(), magnitude=0.0):
        self.violations.append(Violation(code, message, tuple(indices), float(magnitude)))

    def to_dict(self):
        return {
            "valid": self.ok,
            "violations": [
                {
                    "code": v.code,
                    "message": v.message,
                    "indices": list(v.indices),
                    "magnitude": v.magnitude,
                }
                for v in self.violations
            ],
        }


def casimir_residual(sd: StructureData) -> np.ndarray:
    """r_i = d_i b_i - 2 d_i zeta_i - sum_{k,l} gamma_ik^l."""
    if sd.zeta is None:
        raise MissingZeta(f"structure data {sd.label!r} carries no zeta")
    return sd.d * sd.b - 2.0 * sd.d * sd.zeta - sd.gamma.sum(axis=(1, 2))


def validate_structure(sd: StructureData, tol: float = TOL) -> ValidationReport:
    """Collect every violated invariant; an empty report means valid."""
    rep = ValidationReport()
    if np.any(sd.d <= 0):
        for i in np.flatnonzero(sd.d <= 0):
            rep.add("NonPositiveDimension", f"d_{i + 1} = {sd.d[i]} must be positive", (i + 1,), sd.d[i])
    if sd.n < 3:
        rep.add("DimensionTooSmall", f"n = {sd.n} < 3", (), sd.n)
    for name in ("b", "gamma") + (("zeta",) if sd.zeta is not None else ()):
        arr = getattr(sd, name)
        if not np.all(np.isfinite(arr)):
            rep.add("NonFinite", f"{name} has non-finite entries")
    for i in np.flatnonzero(sd.b < 0):
        rep.add("NegativeKilling", f"b_{i + 1} = {sd.b[i]} < 0", (i + 1,), sd.b[i])

    g = sd.gamma
    scale = max(1.0, float(np.abs(g).max(initial=0.0)))
    for idx in zip(*np.nonzero(g < 0)):
        rep.add("NegativeGamma", f"gamma{tuple(int(j) + 1 for j in idx)} < 0",
                tuple(int(j) + 1 for j in idx), g[idx])
    seen = set()
    for perm in itertools.permutations(range(3)):
        diff = np.abs(g - g.transpose(perm))
        for idx in zip(*np.nonzero(diff > tol * scale)):
            key = tuple(sorted(int(j) for j in idx))
            if key in seen:
                continue
            seen.add(key)
            one = tuple(int(j) + 1 for j in idx)
            rep.add("GammaAsymmetric",
                    f"gamma not symmetric at {one}: differs by {diff[idx]:.3g} under permutation",
                    one, diff[idx])

    if sd.zeta is not None:
        for i in np.flatnonzero(sd.zeta < 0):
            rep.add("NegativeZeta", f"zeta_{i + 1} = {sd.zeta[i]} < 0", (i + 1,), sd.zeta[i])
        r = casimir_residual(sd)
        for i in range(sd.s):
            if abs(r[i]) > tol * max(1.0, sd.d[i] * abs(sd.b[i])):
                rep.add("CasimirIdentity",
                        f"Casimir identity fails for summand {i + 1}: residual {r[i]:.3g}",
                        (i + 1,), r[i])
    return rep


def table_residuals(t: LieAlgebraTable) -> dict:
    """Maximum violations of the bracket-table invariants (absolute)."""
    c = t.c
    dim = t.dim_g
    antisym = max(
        float(np.abs(c + c.transpose(1, 0, 2)).max(initial=0.0)),
        float(np.abs(c + c.transpose(0, 2, 1)).max(initial=0.0)),
    )
    # [[a,b],e] + [[b,e],a] + [[e,a],b], coefficient on basis vector q
    ab_e = np.einsum("abp,peq->abeq", c, c)
    jac = ab_e + ab_e.transpose(1, 2, 0, 3) + ab_e.transpose(2, 0, 1, 3)
    jacobi = float(np.abs(jac).max(initial=0.0))

    h = list(t.h_indices)
    outside_h = [e for e in range(dim) if e not in set(h)]
    closure = float(np.abs(c[np.ix_(h, h, outside_h)]).max(initial=0.0)) if h else 0.0
    stability = 0.0
    for blk in t.m_blocks:
        outside = [e for e in range(dim) if e not in set(blk)]
        if h and outside:
            stability = max(stability, float(np.abs(c[np.ix_(h, list(blk), outside)]).max(initial=0.0)))
    return {"antisymmetry": antisym, "jacobi": jacobi, "closure": closure, "stability": stability}


def validate_table(t: LieAlgebraTable, tol: float = TOL) -> ValidationReport:
    rep = ValidationReport()
    dim = t.dim_g
    used = list(t.h_indices) + [i for blk in t.m_blocks for i in blk]
    if sorted(used) != list(range(dim)):
        rep.add("BadPartition", "h_indices and m_blocks must partition 0..dim_g-1 exactly")
        return rep
    if not t.m_blocks or any(len(blk) == 0 for blk in t.m_blocks):
        rep.add("BadPartition", "m_blocks must be a nonempty list of nonempty blocks")
        return rep
    if not np.all(np.isfinite(t.c)):
        rep.add("NonFinite", "bracket table has non-finite entries")
        return rep
    scale = max(1.0, float(np.abs(t.c).max(initial=0.0)))
    res = table_residuals(t)
    for key, code in (("antisymmetry", "Antisymmetry"), ("jacobi", "Jacobi"),
                      ("closure", "HNotClosed"), ("stability", "NotAdHStable")):
        bound = tol * (scale * scale if key == "jacobi" else scale)
        if res[key] > bound:
            rep.add(code, f"{key} residual {res[key]:.3g} exceeds {bound:.3g}", (), res[key])
    return rep


def killing_form(c: np.ndarray) -> np.ndarray:
    """B(v_a, v_b) = tr(ad v_a o ad v_b) from bracket constants.

    With (ad v_a)_{qp} = c[a, p, q] the trace is sum_{p,q} c[a,p,q] c[b,q,p],
    which equals -sum_{p,q} c[a,p,q] c[b,p,q] by antisymmetry in the
    last two slots; the first form is used so no symmetry is assumed.
    """
    return np.einsum("apq,bqp->ab", c, c)


def isotropy_casimir(c: np.ndarray, h_indices) -> np.ndarray:
    """Matrix of -sum_j ad w_j o ad w_j over the h-basis w_j."""
    h = list(h_indices)
    if not h:
        return np.zeros(c.shape[:2])
    ch = c[h]
    # (ad w ad w)_{e,a} = sum_p c[w,p,e] c[w,a,p]
    return -np.einsum("jpe,jap->ea", ch, ch)


def _block_scalar(mat, blk, tol, err, what, i):
    sub = mat[np.ix_(blk, blk)]
    value = float(np.trace(sub)) / len(blk)
    resid = float(np.abs(sub - value * np.eye(len(blk))).max(initial=0.0))
    if resid > tol * max(1.0, abs(value)):
        raise err(f"{what} on block {i + 1} is not scalar: deviation {resid:.3g}")
    return value, resid


def derive_structure(t: LieAlgebraTable, label: str = "", tol: float = TOL):
    """Compute StructureData (d, b, gamma, zeta) from a bracket table.

    Returns ``(sd, residuals)`` where residuals records the proportionality
    defects of the Killing form and the Casimir operator on each block.
    """
    rep = validate_table(t, tol)
    if not rep.ok:
        raise InvalidTable("; ".join(v.message for v in rep.violations))
    c = t.c
    blocks = [list(blk) for blk in t.m_blocks]
    s = len(blocks)
    sq = c * c
    gamma = np.zeros((s, s, s))
    for i, k, l in itertools.product(range(s), repeat=3):
        gamma[i, k, l] = sq[np.ix_(blocks[i], blocks[k], blocks[l])].sum()

    B = killing_form(c)
    C = isotropy_casimir(c, t.h_indices)
    b = np.zeros(s)
    zeta = np.zeros(s)
    b_res = np.zeros(s)
    z_res = np.zeros(s)
    for i, blk in enumerate(blocks):
        kb, b_res[i] = _block_scalar(-B, blk, tol, NonProportional, "Killing form", i)
        kz, z_res[i] = _block_scalar(C, blk, tol, NonScalarCasimir, "isotropy Casimir", i)
        b[i] = kb
        zeta[i] = kz
    # clamp roundoff below zero; both are nonnegative on compact algebras
    b[(b < 0) & (b > -tol)] = 0.0
    zeta[(zeta < 0) & (zeta > -tol)] = 0.0
    d = np.array([len(blk) for blk in blocks])
    sd = StructureData(d, b, gamma, zeta, label)
    return sd, {"killing_residual": b_res, "casimir_operator_residual": z_res}
