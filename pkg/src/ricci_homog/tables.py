"""Bracket tables for the bundled example spaces.

Each table is computed from an explicit matrix basis: brackets are
expanded in that basis by least squares, the Killing form is read off the
resulting structure constants, and the basis is rescaled to be
Q-orthonormal for an ad-invariant Q with B|factor = -kappa * Q|factor.
The JSON files under ``data/`` are regenerated from these builders
(``python -m ricci_homog.tables``) and never edited by hand.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .structure import LieAlgebraTable, killing_form

DATA_DIR = Path(__file__).parent / "data"


def gell_mann() -> np.ndarray:
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return lam


def pauli() -> np.ndarray:
    return np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def structure_constants(basis: np.ndarray) -> np.ndarray:
    """f[a, b, e] with [X_a, X_b] = sum_e f[a, b, e] X_e for a matrix basis."""
    n = basis.shape[0]
    flat = basis.reshape(n, -1)
    A = np.concatenate([flat.real, flat.imag], axis=1).T
    f = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            br = basis[a] @ basis[b] - basis[b] @ basis[a]
            rhs = np.concatenate([br.reshape(-1).real, br.reshape(-1).imag])
            coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            f[a, b] = coef
    return f


def orthonormal_table(basis, kappa, h_indices, m_blocks) -> LieAlgebraTable:
    """Rescale a Killing-orthogonal matrix basis so that -B(v_a, v_a) = kappa[a].

    Q is then orthonormal on the new basis and B = -kappa_a Q on each basis
    line, so kappa must be constant on every simple factor for Q to be
    ad-invariant.
    """
    f = structure_constants(np.asarray(basis))
    B = killing_form(f)
    off = B - np.diag(np.diag(B))
    if np.abs(off).max() > 1e-10:
        raise ValueError("basis is not Killing-orthogonal")
    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (f.shape[0],))
    scale = np.sqrt(kappa / -np.diag(B))
    c = f * scale[:, None, None] * scale[None, :, None] / scale[None, None, :]
    c[np.abs(c) < 1e-15] = 0.0
    return LieAlgebraTable(c, h_indices, m_blocks)


def torus_table(dim=3, m_blocks=((0,), (1, 2))) -> LieAlgebraTable:
    """Abelian algebra R^dim, trivial h: every bracket vanishes."""
    return LieAlgebraTable(np.zeros((dim, dim, dim)), (), m_blocks)


def su2_su2_table(kappa2=0.5, m_blocks=((0, 1, 2), (3, 4, 5))) -> LieAlgebraTable:
    """su(2) + su(2), trivial h, one summand per factor.

    Q = -B on the first factor and -B/kappa2 on the second, so that
    b = (1, kappa2).
    """
    sig = 0.5j * pauli()
    basis = np.zeros((6, 4, 4), dtype=complex)
    basis[:3, :2, :2] = sig
    basis[3:, 2:, 2:] = sig
    kappa = [1.0, 1.0, 1.0, kappa2, kappa2, kappa2]
    return orthonormal_table(basis, kappa, (), m_blocks)


def su3_table(h_indices, m_blocks) -> LieAlgebraTable:
    """su(3) in the basis i*lambda_a with Q = -B."""
    return orthonormal_table(1j * gell_mann(), 1.0, h_indices, m_blocks)


def flag_su3_table() -> LieAlgebraTable:
    """SU(3)/T^2: Cartan subalgebra as h, the three root planes as summands."""
    return su3_table((2, 7), ((0, 1), (3, 4), (5, 6)))


def sphere5_table() -> LieAlgebraTable:
    """SU(3)/SU(2) = S^5 with the intermediate subgroup U(2).

    m_1 is the line through lambda_8 (trivial isotropy), m_2 the C^2 block.
    """
    return su3_table((0, 1, 2), ((7,), (3, 4, 5, 6)))


BUNDLED = {
    "torus3": torus_table,
    "su2_su2": su2_su2_table,
    "su3_su2_sphere5": sphere5_table,
    "su3_flag": flag_su3_table,
}


def bundled_path(name) -> Path:
    return DATA_DIR / f"{name}.table.json"


def write_bundled(directory=DATA_DIR):
    from .io import save

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, build in BUNDLED.items():
        save(build(), directory / f"{name}.table.json")


if __name__ == "__main__":
    write_bundled()
