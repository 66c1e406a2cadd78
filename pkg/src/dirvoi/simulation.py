"""Monte Carlo oracle for the closed forms, and the BAYES vs SAA benchmark.

Everything here works from first principles: draw a "true" data distribution from
the prior, draw a sample from it, act, and score the action against the true
distribution.  Expected risks given ``t`` are computed exactly, so only ``t`` and
the sample are random.

Reproducibility: replications are cut into fixed blocks of ``BLOCK_SIZE``.  Each
block gets its own Philox stream keyed by ``(seed, purpose, n, block index)``, so
results do not depend on how many worker threads process the blocks.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .core import (
    DataDistribution,
    DirichletPrior,
    LossSpec,
    SampleCounts,
    preposterior_expected_loss,
)

__all__ = [
    "BLOCK_SIZE",
    "Procedure",
    "SimConfig",
    "Estimate",
    "BenchmarkRow",
    "BenchmarkResult",
    "TotalVarianceReport",
    "block_rng",
    "sample_dirichlet",
    "sample_counts",
    "estimate_evsi",
    "run_benchmark",
    "bayes_gap",
    "verify_total_variance",
]

BLOCK_SIZE = 4096
MAX_SEED = 2**64 - 1

# stream purposes; part of the RNG key so different experiments never share draws
_EVSI, _BENCH, _TOTVAR = 1, 2, 3


class Procedure(str, enum.Enum):
    BAYES = "BAYES"
    SAA = "SAA"

    @classmethod
    def parse(cls, name: "str | Procedure") -> "Procedure":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown procedure {name!r} (known: {known})") from None


@dataclass(frozen=True)
class SimConfig:
    replications: int = 10_000
    seed: int = 0
    n_grid: tuple[int, ...] = tuple(range(1, 51))
    inner_draws: int = 1
    workers: int = 1

    def __post_init__(self):
        for name in ("replications", "inner_draws", "workers"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must lie in [0, 2**64 - 1], got {self.seed}")
        grid = tuple(self.n_grid)
        if not grid:
            raise ValueError("n_grid must be non-empty")
        for n in grid:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
                raise ValueError(f"n_grid entries must be non-negative integers, got {n!r}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in grid))
        object.__setattr__(self, "seed", int(self.seed))


class Estimate(NamedTuple):
    estimate: float
    std_error: float

    def z(self, target: float) -> float:
        """Standardized distance of the estimate from ``target``."""
        diff = self.estimate - target
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.std_error


@dataclass(frozen=True)
class BenchmarkRow:
    n: int
    procedure: Procedure
    mean_loss: float
    std_error: float
    replications: int
    seed: int


@dataclass(frozen=True)
class BenchmarkResult:
    rows: tuple[BenchmarkRow, ...]
    seed: int
    # set when SAA was asked to act on an empty sample and fell back to M/2
    saa_empty_sample: bool = False

    def get(self, n: int, procedure: "str | Procedure") -> BenchmarkRow:
        p = Procedure.parse(procedure)
        for row in self.rows:
            if row.n == n and row.procedure is p:
                return row
        raise KeyError((n, p.value))


@dataclass(frozen=True)
class TotalVarianceReport:
    """Monte Carlo terms of ``Var[D] = E_X[Var(D|X)] + Var_X[E(D|X)]``."""

    n: int
    total_variance: float
    expected_conditional_variance: float
    variance_of_conditional_mean: float
    residual: float
    residual_std_error: float
    replications: int
    inner_draws: int = field(default=1)

    @property
    def z(self) -> float:
        return Estimate(self.residual, self.residual_std_error).z(0.0)


def block_rng(seed: int, purpose: int, n: int, block: int) -> np.random.Generator:
    """Counter-keyed stream for one block of replications."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, n, block))
    return np.random.Generator(np.random.Philox(ss))


def _draw_distributions(alphas: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.gamma(alphas, 1.0, size=(size, alphas.size))
    totals = g.sum(axis=1)
    # every gamma can underflow to 0 for tiny shapes; redraw those rows
    bad = totals == 0.0
    while bad.any():
        g[bad] = rng.gamma(alphas, 1.0, size=(int(bad.sum()), alphas.size))
        totals = g.sum(axis=1)
        bad = totals == 0.0
    return g / totals[:, None]


def _draw_counts(t: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros(t.shape, dtype=np.int64)
    return rng.multinomial(n, t)


def _risk(t: np.ndarray, a: np.ndarray, support: np.ndarray, k: float) -> np.ndarray:
    """Row-wise ``k * sum_d t_d (d - a)**2``."""
    a = np.broadcast_to(np.asarray(a, dtype=float), t.shape[:1])
    return k * np.einsum("ij,ij->i", t, (support[None, :] - a[:, None]) ** 2)


def sample_dirichlet(prior: DirichletPrior, rng: np.random.Generator) -> DataDistribution:
    """One draw ``t ~ Dirichlet(alphas)`` via normalized gamma variates."""
    t = _draw_distributions(np.asarray(prior.alphas), 1, rng)[0]
    return DataDistribution(tuple(t))


def sample_counts(t: DataDistribution, n: int, rng: np.random.Generator) -> SampleCounts:
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    return SampleCounts(tuple(int(c) for c in rng.multinomial(n, np.asarray(t.probs))))


def _blocks(replications: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK_SIZE, replications - b * BLOCK_SIZE))
            for b in range(math.ceil(replications / BLOCK_SIZE))]


def _map_blocks(fn: Callable[[int, int], np.ndarray], cfg: SimConfig) -> np.ndarray:
    """Apply ``fn(block, size)`` to every block and concatenate in block order."""
    blocks = _blocks(cfg.replications)
    if cfg.workers == 1 or len(blocks) == 1:
        parts = [fn(b, size) for b, size in blocks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda bs: fn(*bs), blocks))
    return np.concatenate(parts, axis=-1)


def _mean_se(x: np.ndarray) -> Estimate:
    r = x.shape[-1]
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(r)) if r > 1 else math.nan
    return Estimate(mean, se)


def _evsi_deltas(prior: DirichletPrior, loss: LossSpec, n: int, cfg: SimConfig) -> np.ndarray:
    alphas = np.asarray(prior.alphas)
    support = prior.support
    c1, s1, alpha = prior.c1, prior.first_moment_sum, prior.alpha

    def block(b: int, size: int) -> np.ndarray:
        rng = block_rng(cfg.seed, _EVSI, n, b)
        t = _draw_distributions(alphas, size, rng)
        counts = _draw_counts(t, n, rng)
        a_post = (s1 + counts @ support) / (alpha + n)
        return _risk(t, c1, support, loss.k) - _risk(t, a_post, support, loss.k)

    return _map_blocks(block, cfg)


def estimate_evsi(prior: DirichletPrior, loss: LossSpec, n: int, cfg: SimConfig) -> Estimate:
    """Monte Carlo EVSI: mean over ``t ~ prior`` of ``R(t, a*(prior)) - R(t, a*(posterior))``."""
    if n < 0:
        raise ValueError(f"sample size must be non-negative, got {n}")
    if n == 0:
        return Estimate(0.0, 0.0)
    return _mean_se(_evsi_deltas(prior, loss, n, cfg))


def _benchmark_losses(prior: DirichletPrior, loss: LossSpec, procedures: Sequence[Procedure],
                      n: int, cfg: SimConfig) -> np.ndarray:
    alphas = np.asarray(prior.alphas)
    support = prior.support
    s1, alpha = prior.first_moment_sum, prior.alpha

    def block(b: int, size: int) -> np.ndarray:
        rng = block_rng(cfg.seed, _BENCH, n, b)
        t = _draw_distributions(alphas, size, rng)
        counts = _draw_counts(t, n, rng)
        sums = counts @ support
        out = np.empty((len(procedures), size))
        for i, p in enumerate(procedures):
            if p is Procedure.BAYES:
                a = (s1 + sums) / (alpha + n)
            elif n == 0:
                a = np.full(size, prior.M / 2.0)
            else:
                a = sums / n
            out[i] = _risk(t, a, support, loss.k)
        return out

    return _map_blocks(block, cfg)


def run_benchmark(prior: DirichletPrior, loss: LossSpec, procedures: Iterable["str | Procedure"],
                  cfg: SimConfig) -> BenchmarkResult:
    """Score updating procedures on common draws of ``(t, sample)`` for every ``n`` in the grid."""
    procs = [Procedure.parse(p) for p in procedures]
    if not procs:
        raise ValueError("at least one procedure is required")
    rows = []
    for n in cfg.n_grid:
        losses = _benchmark_losses(prior, loss, procs, n, cfg)
        for p, x in zip(procs, losses):
            est = _mean_se(x)
            rows.append(BenchmarkRow(n, p, est.estimate, est.std_error, cfg.replications, cfg.seed))
    empty = Procedure.SAA in procs and 0 in cfg.n_grid
    return BenchmarkResult(tuple(rows), cfg.seed, saa_empty_sample=empty)


def bayes_gap(result: BenchmarkResult, prior: DirichletPrior, loss: LossSpec, n: int) -> Estimate:
    """Simulated BAYES loss minus the closed-form preposterior loss at ``n``."""
    row = result.get(n, Procedure.BAYES)
    return Estimate(row.mean_loss - preposterior_expected_loss(prior, loss, n), row.std_error)


def verify_total_variance(prior: DirichletPrior, n: int, cfg: SimConfig) -> TotalVarianceReport:
    """Check the law of total variance for one observation ``D`` and a size-``n`` sample ``X``.

    ``D`` is drawn from the true ``t`` (``cfg.inner_draws`` times per replication), the
    conditional terms come from the conjugate posterior predictive.  The residual's
    standard error is from the delta method on per-replication influence values.
    """
    if n < 0:
        raise ValueError(f"sample size must be non-negative, got {n}")
    alphas = np.asarray(prior.alphas)
    support = prior.support
    sq = support**2
    s1, alpha = prior.first_moment_sum, prior.alpha
    m = cfg.inner_draws

    def block(b: int, size: int) -> np.ndarray:
        rng = block_rng(cfg.seed, _TOTVAR, n, b)
        t = _draw_distributions(alphas, size, rng)
        x = _draw_counts(t, n, rng)
        dcounts = rng.multinomial(m, t)
        d_mean = dcounts @ support / m
        d_sq = dcounts @ sq / m
        mu = (s1 + x @ support) / (alpha + n)
        q = (alphas[None, :] + x) / (alpha + n)
        v = np.einsum("ij,ij->i", q, (support[None, :] - mu[:, None]) ** 2)
        return np.stack([d_mean, d_sq, mu, v])

    d_mean, d_sq, mu, v = _map_blocks(block, cfg)
    r = cfg.replications
    mean_d = float(np.mean(d_mean))
    total = float(np.mean(d_sq)) - mean_d**2
    expected_var = float(np.mean(v))
    if n == 0:
        var_mean = 0.0
        psi = d_sq - v - mu**2 - 2.0 * mean_d * d_mean
    else:
        mean_mu = float(np.mean(mu))
        var_mean = float(np.mean(mu**2)) - mean_mu**2
        psi = d_sq - v - mu**2 - 2.0 * mean_d * d_mean + 2.0 * mean_mu * mu
    residual = total - expected_var - var_mean
    se = float(np.std(psi, ddof=1) / math.sqrt(r)) if r > 1 else math.nan
    return TotalVarianceReport(n, total, expected_var, var_mean, residual, se, r, m)
