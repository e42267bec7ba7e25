"""Vectorized Monte Carlo engine for the classical protocol.

Reproducibility contract: the random tape is addressed by round index.
Round r of a run with master seed S and n message bits consumes exactly
4n uniform doubles (z and azimuth for each of lambda_1, mu_1, ...,
lambda_n, mu_n), generated by the Philox counter-based stream keyed with
S.  Philox packs four doubles per counter block, so round r starts at
block n*r and any partition of [0, trials) into chunks reads the same
tape.  Results therefore depend only on (S, trials), never on chunk
boundaries or worker count.

All statistics are accumulated exactly: doubled outcomes, their products,
and histogram counts are integers, so partial results merge associatively
with no floating-point drift.  Probabilities and moments are formed once,
at report time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .oracle import (
    OutcomeDistribution,
    quantum_correlation_closed_form,
    quantum_joint_distribution,
)
from .spins import TwoSpin, UnitVector3, Z_AXIS

__all__ = [
    "EstimatorConfig",
    "SimulationReport",
    "SweepResult",
    "RoundStats",
    "round_generator",
    "estimate",
    "sweep",
    "chi_squared_uniform",
    "total_variation_distance",
    "CHI2_CRIT_999",
    "SEED_MODULUS",
]

TWO_PI = 2.0 * math.pi
CHUNK_ROUNDS = 1 << 16
SEED_MODULUS = 1 << 64

# 99.9% chi-squared critical values for the protocol's possible degrees of
# freedom (2^n - 1); hard-coded so the runtime needs no statistics library.
CHI2_CRIT_999 = {1: 10.8276, 3: 16.2662, 7: 24.3219, 15: 37.6973}


def round_generator(master_seed: int, n_bits: int, round_index: int) -> Generator:
    """Generator positioned at round `round_index`'s segment of the tape."""
    bit_gen = Philox(key=master_seed)
    bit_gen.advance(n_bits * round_index)
    return Generator(bit_gen)


def _bit_weights(n_bits: int) -> np.ndarray:
    return np.array([1 << (n_bits - 1 - k) for k in range(n_bits)], dtype=np.int64)


def _protocol_signs(
    n_bits: int,
    a: UnitVector3,
    b: UnitVector3,
    master_seed: int,
    start: int,
    count: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-bit signs for rounds [start, start + count).

    Returns int64 arrays (alice_signs, message_bits, bob_signs) of shape
    (count, n_bits).  The arithmetic mirrors the scalar path in `protocol`
    operation for operation so both produce identical outcomes from the
    same tape.
    """
    raw = round_generator(master_seed, n_bits, start).random((count, 4 * n_bits))
    z_lam = 2.0 * raw[:, 0::4] - 1.0
    phi_lam = TWO_PI * raw[:, 1::4]
    z_mu = 2.0 * raw[:, 2::4] - 1.0
    phi_mu = TWO_PI * raw[:, 3::4]

    rho_lam = np.sqrt(1.0 - z_lam * z_lam)
    x_lam = rho_lam * np.cos(phi_lam)
    y_lam = rho_lam * np.sin(phi_lam)
    rho_mu = np.sqrt(1.0 - z_mu * z_mu)
    x_mu = rho_mu * np.cos(phi_mu)
    y_mu = rho_mu * np.sin(phi_mu)

    a_lam = a.x * x_lam + a.y * y_lam + a.z * z_lam
    a_mu = a.x * x_mu + a.y * y_mu + a.z * z_mu
    b_lam = b.x * x_lam + b.y * y_lam + b.z * z_lam
    b_mu = b.x * x_mu + b.y * y_mu + b.z * z_mu

    alice_signs = np.where(a_lam >= 0.0, 1, -1).astype(np.int64)
    mu_signs = np.where(a_mu >= 0.0, 1, -1).astype(np.int64)
    messages = alice_signs * mu_signs
    bob_signs = np.where(b_lam + messages * b_mu >= 0.0, 1, -1).astype(np.int64)
    return alice_signs, messages, bob_signs


@dataclass(frozen=True)
class RoundStats:
    """Exact accumulators for a block of rounds; merge is associative."""

    rounds: int
    sum_prod: int  # sum of (2 alpha)(2 beta), a plain Python int
    sum_prod_sq: int
    sum_alpha: int  # sum of 2 alpha
    sum_beta: int
    joint_counts: np.ndarray  # (d, d) int64, indexed like OutcomeDistribution

    @classmethod
    def zero(cls, dim: int) -> "RoundStats":
        return cls(0, 0, 0, 0, 0, np.zeros((dim, dim), dtype=np.int64))

    def merge(self, other: "RoundStats") -> "RoundStats":
        return RoundStats(
            rounds=self.rounds + other.rounds,
            sum_prod=self.sum_prod + other.sum_prod,
            sum_prod_sq=self.sum_prod_sq + other.sum_prod_sq,
            sum_alpha=self.sum_alpha + other.sum_alpha,
            sum_beta=self.sum_beta + other.sum_beta,
            joint_counts=self.joint_counts + other.joint_counts,
        )


def _chunk_stats(
    two_spin: TwoSpin,
    a: UnitVector3,
    b: UnitVector3,
    master_seed: int,
    start: int,
    count: int,
) -> RoundStats:
    n = two_spin.n_bits
    alice_signs, _, bob_signs = _protocol_signs(n, a, b, master_seed, start, count)
    weights = _bit_weights(n)
    two_alpha = -(alice_signs @ weights)
    two_beta = bob_signs @ weights
    prod = two_alpha * two_beta
    d = two_spin.dim
    rows = (two_spin.two_s - two_alpha) >> 1
    cols = (two_spin.two_s - two_beta) >> 1
    counts = np.bincount(rows * d + cols, minlength=d * d).reshape(d, d)
    return RoundStats(
        rounds=count,
        sum_prod=int(prod.sum()),
        sum_prod_sq=int((prod * prod).sum()),
        sum_alpha=int(two_alpha.sum()),
        sum_beta=int(two_beta.sum()),
        joint_counts=counts.astype(np.int64),
    )


@dataclass(frozen=True)
class EstimatorConfig:
    """One estimation run: spin, directions, sample size, seed."""

    two_spin: TwoSpin
    a: UnitVector3
    b: UnitVector3
    trials: int
    master_seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < SEED_MODULUS:
            raise ValueError(
                f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        self.two_spin.n_bits  # rejects spins whose 2s+1 is not a power of two


@dataclass(frozen=True)
class SimulationReport:
    """Everything one run produces, oracle comparison included."""

    config: EstimatorConfig
    corr_estimate: float
    corr_stderr: float
    corr_quantum: float
    marginal_alpha: tuple[float, ...]
    marginal_beta: tuple[float, ...]
    joint_empirical: OutcomeDistribution
    joint_quantum: OutcomeDistribution
    tvd: float
    chi2_alpha: float
    chi2_beta: float
    bits_per_round: int
    total_bits: int

    def to_dict(self) -> dict:
        """Plain-types dict, the stable JSON schema of the report."""
        cfg = self.config
        return {
            "config": {
                "spin": cfg.two_spin.label,
                "two_s": cfg.two_spin.two_s,
                "a": [cfg.a.x, cfg.a.y, cfg.a.z],
                "b": [cfg.b.x, cfg.b.y, cfg.b.z],
                "trials": cfg.trials,
                "seed": cfg.master_seed,
                "workers": cfg.workers,
            },
            "bits_per_round": self.bits_per_round,
            "total_bits": self.total_bits,
            "outcomes_doubled": self.joint_empirical.outcomes_doubled(),
            "corr_estimate": self.corr_estimate,
            "corr_stderr": self.corr_stderr,
            "corr_quantum": self.corr_quantum,
            "marginal_alpha": list(self.marginal_alpha),
            "marginal_beta": list(self.marginal_beta),
            "joint_empirical": self.joint_empirical.probs.tolist(),
            "joint_quantum": self.joint_quantum.probs.tolist(),
            "tvd": self.tvd,
            "chi2_alpha": self.chi2_alpha,
            "chi2_beta": self.chi2_beta,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SimulationReport":
        cfg = payload["config"]
        two_spin = TwoSpin(cfg["two_s"])
        config = EstimatorConfig(
            two_spin=two_spin,
            a=UnitVector3(*cfg["a"]),
            b=UnitVector3(*cfg["b"]),
            trials=cfg["trials"],
            master_seed=cfg["seed"],
            workers=cfg["workers"],
        )
        return cls(
            config=config,
            corr_estimate=payload["corr_estimate"],
            corr_stderr=payload["corr_stderr"],
            corr_quantum=payload["corr_quantum"],
            marginal_alpha=tuple(payload["marginal_alpha"]),
            marginal_beta=tuple(payload["marginal_beta"]),
            joint_empirical=OutcomeDistribution(
                two_spin, np.array(payload["joint_empirical"])
            ),
            joint_quantum=OutcomeDistribution(
                two_spin, np.array(payload["joint_quantum"])
            ),
            tvd=payload["tvd"],
            chi2_alpha=payload["chi2_alpha"],
            chi2_beta=payload["chi2_beta"],
            bits_per_round=payload["bits_per_round"],
            total_bits=payload["total_bits"],
        )


def _chi_squared_statistic(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    expected = total / counts.size
    return float(((counts - expected) ** 2 / expected).sum())


def chi_squared_uniform(counts) -> float:
    """Chi-squared statistic of a histogram against the uniform law.

    Requires at least 10 expected counts per bin; below that the usual
    chi-squared reference distribution is unreliable.
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total < 10 * counts.size:
        raise ValueError(
            f"undersized sample: {total} draws over {counts.size} bins "
            f"(need at least {10 * counts.size})"
        )
    return _chi_squared_statistic(counts)


def total_variation_distance(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """Half the L1 distance between two outcome tables; 0 iff identical."""
    if p.probs.shape != q.probs.shape:
        raise ValueError(
            f"dimension mismatch: {p.probs.shape} vs {q.probs.shape}"
        )
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def estimate(config: EstimatorConfig) -> SimulationReport:
    """Run `trials` protocol rounds and report statistics plus oracle data.

    Deterministic for fixed (master_seed, trials) regardless of `workers`;
    see the module docstring for the random-tape contract.
    """
    two_spin = config.two_spin
    chunks = [
        (start, min(CHUNK_ROUNDS, config.trials - start))
        for start in range(0, config.trials, CHUNK_ROUNDS)
    ]

    def run_chunk(chunk: tuple[int, int]) -> RoundStats:
        start, count = chunk
        return _chunk_stats(two_spin, config.a, config.b, config.master_seed, start, count)

    if config.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            partials = list(pool.map(run_chunk, chunks))
    else:
        partials = [run_chunk(chunk) for chunk in chunks]

    stats = partials[0]
    for part in partials[1:]:
        stats = stats.merge(part)
    return _build_report(config, stats)


def _build_report(config: EstimatorConfig, stats: RoundStats) -> SimulationReport:
    two_spin = config.two_spin
    n = two_spin.n_bits
    rounds = stats.rounds
    counts = stats.joint_counts
    alpha_counts = counts.sum(axis=1)
    beta_counts = counts.sum(axis=0)

    corr_estimate = stats.sum_prod / (4 * rounds)
    if rounds > 1:
        # N*sum(x^2) - sum(x)^2 is an exact nonnegative integer here.
        variance_num = rounds * stats.sum_prod_sq - stats.sum_prod**2
        var_prod = variance_num / (rounds * (rounds - 1))
        corr_stderr = math.sqrt(var_prod / rounds) / 4.0
    else:
        corr_stderr = 0.0

    joint_empirical = OutcomeDistribution(two_spin, counts / rounds)
    joint_quantum = quantum_joint_distribution(two_spin, config.a, config.b)
    return SimulationReport(
        config=config,
        corr_estimate=corr_estimate,
        corr_stderr=corr_stderr,
        corr_quantum=quantum_correlation_closed_form(two_spin, config.a, config.b),
        marginal_alpha=tuple(float(c) / rounds for c in alpha_counts),
        marginal_beta=tuple(float(c) / rounds for c in beta_counts),
        joint_empirical=joint_empirical,
        joint_quantum=joint_quantum,
        tvd=total_variation_distance(joint_empirical, joint_quantum),
        chi2_alpha=_chi_squared_statistic(alpha_counts),
        chi2_beta=_chi_squared_statistic(beta_counts),
        bits_per_round=n,
        total_bits=config.trials * n,
    )


@dataclass(frozen=True)
class SweepResult:
    """Reports along a theta grid plus the linear fit in cos(theta)."""

    two_spin: TwoSpin
    trials_per_point: int
    points: int
    master_seed: int
    thetas: tuple[float, ...]
    reports: tuple[SimulationReport, ...]
    slope: float
    intercept: float


def sweep(
    two_spin: TwoSpin,
    trials_per_point: int,
    points: int,
    master_seed: int,
    workers: int = 1,
) -> SweepResult:
    """Estimate at `points` equally spaced theta in [0, pi], a = z fixed.

    Point i uses master seed (master_seed + i) mod 2^64, so any single
    point can be reproduced standalone with the seed echoed in its report.
    The least-squares fit of corr_estimate against cos(theta) is part of
    the result.
    """
    if points < 2:
        raise ValueError(f"need at least 2 sweep points, got {points}")
    thetas = [i * math.pi / (points - 1) for i in range(points)]
    reports = []
    for i, theta in enumerate(thetas):
        config = EstimatorConfig(
            two_spin=two_spin,
            a=Z_AXIS,
            b=UnitVector3.polar(theta),
            trials=trials_per_point,
            master_seed=(master_seed + i) % SEED_MODULUS,
            workers=workers,
        )
        reports.append(estimate(config))
    cos_thetas = np.array([report.config.b.z for report in reports])
    estimates = np.array([report.corr_estimate for report in reports])
    slope, intercept = np.polyfit(cos_thetas, estimates, 1)
    return SweepResult(
        two_spin=two_spin,
        trials_per_point=trials_per_point,
        points=points,
        master_seed=master_seed,
        thetas=tuple(thetas),
        reports=tuple(reports),
        slope=float(slope),
        intercept=float(intercept),
    )
