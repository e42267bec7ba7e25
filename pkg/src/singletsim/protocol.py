"""The two-party classical protocol, one round at a time.

A round for spin s with n = log2(2s+1) message bits works on n shared
pairs of independent uniform unit vectors (lambda_k, mu_k):

* Alice, holding direction a, outputs
  alpha = -(1/2) sum_k 2^(n-k) sgn(a.lambda_k)
  and sends the n bits c_k = sgn(a.lambda_k) sgn(a.mu_k).
* Bob, holding direction b and the received bits, outputs
  beta = +(1/2) sum_k 2^(n-k) sgn(b.(lambda_k + c_k mu_k)).

Outcomes are returned doubled (2*alpha, 2*beta) so they stay exact odd
integers in [-2s, 2s].  The tie convention sgn(0) = +1 is fixed for
reproducibility; ties occur with probability zero under the continuous
sphere distribution, so it carries no statistical weight.

This module is the scalar reference path.  The vectorized engine in
`montecarlo` reproduces it bit for bit on the same random tape; keep the
arithmetic here (dot products, the b.lambda + c * b.mu split) in the same
order as there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .spins import TwoSpin, UnitVector3

__all__ = [
    "SharedRandomness",
    "MessageBits",
    "ProtocolRound",
    "sgn",
    "sample_unit_vector",
    "alice_output",
    "alice_messages",
    "bob_output",
    "run_round",
]

TWO_PI = 2.0 * math.pi


def sgn(x: float) -> int:
    """+1 for x >= 0, -1 for x < 0."""
    if math.isnan(x):
        raise ValueError("sgn is undefined for NaN")
    return 1 if x >= 0.0 else -1


def sample_unit_vector(rng) -> UnitVector3:
    """Uniform direction on the sphere; consumes exactly two doubles.

    First draw sets z uniform on [-1, 1), second the azimuth on [0, 2pi).
    """
    z = 2.0 * rng.random() - 1.0
    phi = TWO_PI * rng.random()
    rho = math.sqrt(1.0 - z * z)
    return UnitVector3(rho * math.cos(phi), rho * math.sin(phi), z)


@dataclass(frozen=True)
class SharedRandomness:
    """The 2n shared unit vectors of one round, paired per message bit."""

    lambdas: tuple[UnitVector3, ...]
    mus: tuple[UnitVector3, ...]

    def __post_init__(self) -> None:
        if not self.lambdas or len(self.lambdas) != len(self.mus):
            raise ValueError(
                f"need equally many lambdas and mus, at least one pair; "
                f"got {len(self.lambdas)} and {len(self.mus)}"
            )

    @property
    def n(self) -> int:
        return len(self.lambdas)


@dataclass(frozen=True)
class MessageBits:
    """The n classical bits Alice sends, each +1 or -1."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits or any(bit not in (1, -1) for bit in self.bits):
            raise ValueError(f"bits must be a nonempty tuple of +1/-1, got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class ProtocolRound:
    """Full trace of one round, including the channel record."""

    two_spin: TwoSpin
    a: UnitVector3
    b: UnitVector3
    randomness: SharedRandomness
    messages: MessageBits
    alpha_doubled: int
    beta_doubled: int
    bits_sent: int


def alice_output(a: UnitVector3, randomness: SharedRandomness) -> int:
    """Alice's doubled outcome 2*alpha = -sum_k 2^(n-k) sgn(a.lambda_k)."""
    n = randomness.n
    total = 0
    for k, lam in enumerate(randomness.lambdas):
        total += (1 << (n - 1 - k)) * sgn(a.dot(lam))
    return -total


def alice_messages(a: UnitVector3, randomness: SharedRandomness) -> MessageBits:
    """The channel bits c_k = sgn(a.lambda_k) sgn(a.mu_k)."""
    return MessageBits(
        tuple(
            sgn(a.dot(lam)) * sgn(a.dot(mu))
            for lam, mu in zip(randomness.lambdas, randomness.mus)
        )
    )


def bob_output(
    b: UnitVector3, randomness: SharedRandomness, messages: MessageBits
) -> int:
    """Bob's doubled outcome 2*beta = sum_k 2^(n-k) sgn(b.(lambda_k + c_k mu_k)).

    Uses the shared vectors and the received bits only, never Alice's
    direction.
    """
    if messages.n != randomness.n:
        raise ValueError(
            f"message/randomness length mismatch: {messages.n} != {randomness.n}"
        )
    n = randomness.n
    total = 0
    for k, (lam, mu, c) in enumerate(
        zip(randomness.lambdas, randomness.mus, messages.bits)
    ):
        total += (1 << (n - 1 - k)) * sgn(b.dot(lam) + c * b.dot(mu))
    return total


def run_round(two_spin: TwoSpin, a: UnitVector3, b: UnitVector3, rng) -> ProtocolRound:
    """Execute one full round: draw randomness, run both parties.

    Draws 2n fresh unit vectors from `rng` in the fixed order
    lambda_1, mu_1, lambda_2, mu_2, ...; raises ValueError for spins whose
    dimension is not a power of two.
    """
    n = two_spin.n_bits
    lambdas = []
    mus = []
    for _ in range(n):
        lambdas.append(sample_unit_vector(rng))
        mus.append(sample_unit_vector(rng))
    randomness = SharedRandomness(tuple(lambdas), tuple(mus))
    messages = alice_messages(a, randomness)
    return ProtocolRound(
        two_spin=two_spin,
        a=a,
        b=b,
        randomness=randomness,
        messages=messages,
        alpha_doubled=alice_output(a, randomness),
        beta_doubled=bob_output(b, randomness, messages),
        bits_sent=n,
    )
