"""Cyclic Jacobi eigensolver for small complex Hermitian matrices.

Matrices in this package never exceed 16 x 16, so an O(d^3)-per-sweep
Jacobi iteration is plenty and keeps the oracle self-contained.  One sweep
visits every upper-triangle pair (p, q) and annihilates the entry with a
phased plane rotation; convergence is declared when the off-diagonal
Frobenius norm is at most 1e-12, with a hard cap of 100 sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Spectrum", "eigendecompose_hermitian", "HERMITICITY_TOL"]

HERMITICITY_TOL = 1e-12
OFF_NORM_TOL = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending; eigenvector i sits in column i.

    Eigenvector phases are arbitrary: every consumer in this package takes
    squared magnitudes of inner products, which are phase invariant.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] (and its mirror) with the unitary G = R(phase, angle).

    a is replaced by G^dag a G and v by v G.  The rotation angle comes from
    the stable small root of t^2 + 2*tau*t - 1 = 0 with
    tau = (a_qq - a_pp) / (2 |a_pq|), the complex analogue of the classic
    symmetric Jacobi step.
    """
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * np.conj(phase) * col_q
    a[:, q] = s * phase * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * phase * row_q
    a[q, :] = s * np.conj(phase) * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * np.conj(phase) * vec_q
    v[:, q] = s * phase * vec_p + c * vec_q


def eigendecompose_hermitian(matrix: np.ndarray) -> Spectrum:
    """Full eigensystem of a Hermitian matrix, eigenvalues descending.

    Raises ValueError if the input deviates from Hermiticity by more than
    1e-12 in any entry, and RuntimeError if the sweep cap is exhausted
    before the off-diagonal norm reaches 1e-12.
    """
    a = np.array(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"need a nonempty square matrix, got shape {a.shape}")
    deviation = float(np.max(np.abs(a - a.conj().T)))
    if deviation > HERMITICITY_TOL:
        raise ValueError(
            f"matrix is not Hermitian: max |M - M^dag| = {deviation:.3e} "
            f"exceeds {HERMITICITY_TOL}"
        )

    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    converged = False
    for _ in range(MAX_SWEEPS):
        if _off_norm(a) <= OFF_NORM_TOL:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                _rotate(a, v, p, q)
    if not converged and _off_norm(a) > OFF_NORM_TOL:
        raise RuntimeError(
            f"Jacobi iteration did not converge within {MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {_off_norm(a):.3e})"
        )

    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    return Spectrum(eigenvalues=values[order], eigenvectors=v[:, order])
