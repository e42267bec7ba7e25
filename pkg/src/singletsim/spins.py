"""Core value types shared by the oracle, the protocol, and the estimator.

Conventions used throughout the package:

* A spin s is carried as the integer ``two_s = 2s`` so half-integral spins
  never touch floating point; the single-particle dimension is d = 2s + 1.
* Measurement outcomes m are carried doubled as well (``2m``) and outcome
  axes are always ordered descending: 2s, 2s - 2, ..., -2s.
* The classical protocol applies only when d is a power of two; the number
  of message bits per round is then n = log2(d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = ["TwoSpin", "UnitVector3", "Z_AXIS", "UNIT_NORM_TOL", "MIN_INGEST_NORM"]

UNIT_NORM_TOL = 1e-12
MIN_INGEST_NORM = 1e-6


@dataclass(frozen=True)
class TwoSpin:
    """Spin quantum number s stored as the integer 2s."""

    two_s: int

    def __post_init__(self) -> None:
        if not isinstance(self.two_s, int) or isinstance(self.two_s, bool):
            raise ValueError(f"two_s must be an integer, got {self.two_s!r}")
        if self.two_s < 1:
            raise ValueError(f"two_s must be >= 1, got {self.two_s}")

    @property
    def s(self) -> float:
        return self.two_s / 2.0

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2s + 1 of one particle."""
        return self.two_s + 1

    @property
    def label(self) -> str:
        """Spin value as text, e.g. "3/2" or "1"."""
        return str(Fraction(self.two_s, 2))

    @property
    def protocol_eligible(self) -> bool:
        """True when 2s + 1 is a power of two."""
        return self.dim & (self.dim - 1) == 0

    @property
    def n_bits(self) -> int:
        """Message bits per protocol round, log2(2s + 1)."""
        if not self.protocol_eligible:
            raise ValueError(
                f"spin {self.label} is not protocol eligible: the protocol "
                f"requires 2s + 1 to be a power of two, got 2s + 1 = {self.dim}"
            )
        return self.dim.bit_length() - 1

    def outcomes_doubled(self) -> list[int]:
        """Doubled outcomes 2m, descending from 2s to -2s."""
        return list(range(self.two_s, -self.two_s - 1, -2))

    def casimir(self) -> float:
        """s(s + 1), computed from integers so it is exact."""
        return self.two_s * (self.two_s + 2) / 4.0


@dataclass(frozen=True)
class UnitVector3:
    """Direction on the unit sphere; components must already be normalized."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm_sq = self.x * self.x + self.y * self.y + self.z * self.z
        if not math.isfinite(norm_sq) or abs(norm_sq - 1.0) > UNIT_NORM_TOL:
            raise ValueError(
                f"({self.x}, {self.y}, {self.z}) is not a unit vector: "
                f"|v|^2 = {norm_sq!r}"
            )

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector3":
        """Scale an arbitrary vector onto the sphere; rejects near-zero input."""
        norm = math.sqrt(x * x + y * y + z * z)
        if not math.isfinite(norm) or norm < MIN_INGEST_NORM:
            raise ValueError(
                f"cannot normalize ({x}, {y}, {z}): norm {norm:.3g} is below "
                f"{MIN_INGEST_NORM} or not finite"
            )
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def polar(cls, theta: float) -> "UnitVector3":
        """Direction at angle theta from +z in the x-z plane."""
        return cls(math.sin(theta), 0.0, math.cos(theta))

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


Z_AXIS = UnitVector3(0.0, 0.0, 1.0)
