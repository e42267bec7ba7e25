"""Exact quantum reference for two spin-s singlet measurements.

Everything here is deterministic linear algebra: the spin component
matrices, the rotationally invariant two-particle singlet state, the Born
rule joint outcome distribution, and the correlation -s(s+1)(a.b)/3 that
the singlet implies, computed both in closed form and as an explicit
matrix expectation value so the two routes can be checked against each
other.

Basis conventions (fixed so every index in the package is reproducible):

* Single-particle basis states are J_z eigenstates ordered by descending
  magnetic quantum number; index i holds m = s - i.
* Bipartite product states are indexed Alice-major:
  index = i_alice * d + i_bob.
* Outcome tables are (d x d) arrays with rows indexed by Alice's doubled
  outcome 2m descending, columns likewise for Bob.

The spin matrices follow the standard ladder construction
<m+1| J_+ |m> = sqrt(s(s+1) - m(m+1)), J_x = (J_+ + J_-)/2,
J_y = (J_+ - J_-)/(2i).  The singlet phase is (-1)^(s-m), evaluated as
(-1)^i in integer arithmetic since s - m = i is a nonnegative integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import Spectrum, eigendecompose_hermitian
from .spins import TwoSpin, UnitVector3

__all__ = [
    "SpinOperators",
    "OutcomeDistribution",
    "build_spin_operators",
    "spin_component",
    "measurement_basis",
    "build_singlet",
    "quantum_correlation_closed_form",
    "quantum_correlation_matrix",
    "quantum_joint_distribution",
]

# Spin-component spectra are exactly s, s-1, ..., -s, so a smaller gap can
# only mean the eigensolver failed; refuse to map outcomes in that case.
DEGENERACY_GAP = 1e-8


@dataclass(frozen=True)
class SpinOperators:
    """The three (2s+1) x (2s+1) Hermitian spin component matrices."""

    two_spin: TwoSpin
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint outcome table: probs[i, j] = P(2a = 2s - 2i, 2b = 2s - 2j)."""

    two_spin: TwoSpin
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        d = self.two_spin.dim
        if probs.shape != (d, d):
            raise ValueError(
                f"probability table must be {d} x {d}, got shape {probs.shape}"
            )
        object.__setattr__(self, "probs", probs)

    def outcomes_doubled(self) -> list[int]:
        return self.two_spin.outcomes_doubled()

    def marginal_alpha(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal_beta(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def correlation(self) -> float:
        """Expectation of alpha * beta under this table."""
        m = np.array(self.outcomes_doubled(), dtype=float) / 2.0
        return float(m @ self.probs @ m)


def build_spin_operators(two_spin: TwoSpin) -> SpinOperators:
    """Ladder-constructed J_x, J_y, J_z for the given spin."""
    d = two_spin.dim
    m = np.arange(two_spin.two_s, -two_spin.two_s - 1, -2) / 2.0
    s = two_spin.s
    # Raising amplitudes <m+1|J_+|m> for the column states m = m[1:].
    amp = np.sqrt(s * (s + 1.0) - m[1:] * (m[1:] + 1.0))
    jplus = np.diag(amp, 1).astype(np.complex128)
    jminus = jplus.conj().T
    return SpinOperators(
        two_spin=two_spin,
        jx=(jplus + jminus) / 2.0,
        jy=(jplus - jminus) / 2.0j,
        jz=np.diag(m).astype(np.complex128),
    )


def spin_component(ops: SpinOperators, direction: UnitVector3) -> np.ndarray:
    """The observable a.J: spin component along `direction`; Hermitian."""
    return direction.x * ops.jx + direction.y * ops.jy + direction.z * ops.jz


def measurement_basis(ops: SpinOperators, direction: UnitVector3) -> Spectrum:
    """Eigensystem of a.J with eigenvalue index i mapping to outcome m = s - i."""
    spectrum = eigendecompose_hermitian(spin_component(ops, direction))
    gaps = spectrum.eigenvalues[:-1] - spectrum.eigenvalues[1:]
    if gaps.size and float(np.min(gaps)) < DEGENERACY_GAP:
        raise ValueError(
            f"near-degenerate spin-component spectrum (min gap "
            f"{float(np.min(gaps)):.3e}); outcome mapping would be ambiguous"
        )
    return spectrum


def build_singlet(two_spin: TwoSpin) -> np.ndarray:
    """Total-spin-zero state of two spin-s particles, as a (d*d,) vector.

    Amplitude (-1)^i / sqrt(d) on |m = s - i> (x) |-m>, zero elsewhere.
    """
    d = two_spin.dim
    psi = np.zeros(d * d, dtype=np.complex128)
    norm = 1.0 / math.sqrt(d)
    for i in range(d):
        # Partner of Alice index i (m = s - i) is Bob index d - 1 - i (-m).
        psi[i * d + (d - 1 - i)] = norm if i % 2 == 0 else -norm
    return psi


def quantum_correlation_closed_form(
    two_spin: TwoSpin, a: UnitVector3, b: UnitVector3
) -> float:
    """Singlet correlation of a.J and b.J: -s(s+1)(a.b)/3."""
    return -two_spin.casimir() * a.dot(b) / 3.0


def quantum_correlation_matrix(
    two_spin: TwoSpin, a: UnitVector3, b: UnitVector3
) -> float:
    """<psi| a.J (x) b.J |psi> via the explicit tensor-product matrix.

    Deliberately independent of the closed form above; agreement of the two
    routes is checked by tests, not assumed here.
    """
    ops = build_spin_operators(two_spin)
    joint_op = np.kron(spin_component(ops, a), spin_component(ops, b))
    psi = build_singlet(two_spin)
    return float(np.vdot(psi, joint_op @ psi).real)


def quantum_joint_distribution(
    two_spin: TwoSpin, a: UnitVector3, b: UnitVector3
) -> OutcomeDistribution:
    """Born-rule joint P(alpha, beta) for measurements along a and b.

    Entry (i, j) is |(<m_i| (x) <m_j'|) |psi>|^2 with <m_i| the bra of the
    i-th descending eigenvector of a.J and likewise for b.J.
    """
    ops = build_spin_operators(two_spin)
    basis_a = measurement_basis(ops, a)
    basis_b = measurement_basis(ops, b)
    d = two_spin.dim
    psi = build_singlet(two_spin).reshape(d, d)
    amplitudes = basis_a.eigenvectors.conj().T @ psi @ basis_b.eigenvectors.conj()
    return OutcomeDistribution(two_spin, np.abs(amplitudes) ** 2)
