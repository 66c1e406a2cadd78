"""Closed-form value of information for a Dirichlet-multinomial model under quadratic loss.

Data take values in ``{0, ..., M}``.  The unknown data distribution ``t`` lives on the
M-simplex and carries a ``Dirichlet(alpha_0, ..., alpha_M)`` prior.  Predictions are
scored with ``k * (d - a) ** 2``.

All functions here are pure; the dataclasses are frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from numbers import Integral
from typing import Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "DirichletPrior",
    "SampleCounts",
    "LossSpec",
    "DataDistribution",
    "marginal_likelihood",
    "posterior",
    "bayes_action",
    "posterior_bayes_action",
    "prior_bayes_risk",
    "expected_risk",
    "evsi",
    "evdi",
    "efficiency",
    "preposterior_expected_loss",
    "beta_binomial_evsi",
    "dirichlet_moments",
]

PROB_SUM_TOL = 1e-12


class DimensionError(ValueError):
    """Support lengths of two objects that must agree do not."""


def _check_sample_size(n) -> int:
    if isinstance(n, bool) or not isinstance(n, Integral):
        raise TypeError(f"sample size must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"sample size must be non-negative, got {n}")
    return int(n)


@dataclass(frozen=True)
class DirichletPrior:
    """Dirichlet prior over data distributions on ``{0, ..., M}``.

    ``alphas[d]`` is the concentration weight attached to support value ``d``.
    Derived quantities (total concentration, predictive moments) are cached.
    """

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) < 2:
            raise ValueError("a Dirichlet prior needs at least two support values (M >= 1)")
        for d, a in enumerate(alphas):
            if not math.isfinite(a) or a <= 0.0:
                raise ValueError(f"alphas[{d}] must be a finite positive number, got {a!r}")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def from_mean(cls, concentration: float, weights: Sequence[float]) -> "DirichletPrior":
        """Build a prior from a concentration and (unnormalized) mean weights."""
        concentration = float(concentration)
        if not math.isfinite(concentration) or concentration <= 0.0:
            raise ValueError(f"concentration must be a finite positive number, got {concentration!r}")
        w = [float(x) for x in weights]
        if any(not math.isfinite(x) or x <= 0.0 for x in w):
            raise ValueError("mean weights must be finite and positive")
        total = math.fsum(w)
        return cls(tuple(concentration * x / total for x in w))

    @property
    def M(self) -> int:
        return len(self.alphas) - 1

    @cached_property
    def support(self) -> np.ndarray:
        return np.arange(len(self.alphas), dtype=float)

    @cached_property
    def alpha(self) -> float:
        """Total concentration ``sum(alphas)``."""
        return math.fsum(self.alphas)

    @cached_property
    def mean(self) -> np.ndarray:
        """Mean vector ``alphas / alpha``; equal to the prior predictive pmf."""
        return np.asarray(self.alphas) / self.alpha

    @cached_property
    def first_moment_sum(self) -> float:
        # sum_d d * alpha_d, kept separate so posterior means avoid a divide/multiply round trip
        return math.fsum(d * a for d, a in enumerate(self.alphas))

    @cached_property
    def c1(self) -> float:
        """Prior predictive mean of a single observation."""
        return self.first_moment_sum / self.alpha

    @cached_property
    def c2(self) -> float:
        """Prior predictive second moment of a single observation."""
        return math.fsum(d * d * a for d, a in enumerate(self.alphas)) / self.alpha

    @cached_property
    def predictive_variance(self) -> float:
        """``c2 - c1**2``, evaluated as a centered sum to avoid cancellation."""
        c1 = self.c1
        return math.fsum(a * (d - c1) ** 2 for d, a in enumerate(self.alphas)) / self.alpha


@dataclass(frozen=True)
class SampleCounts:
    """Occurrence counts ``(n_0, ..., n_M)`` of an n-observation sample."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = []
        for d, c in enumerate(self.counts):
            if isinstance(c, bool) or not isinstance(c, Integral) or c < 0:
                raise ValueError(f"counts[{d}] must be a non-negative integer, got {c!r}")
            counts.append(int(c))
        object.__setattr__(self, "counts", tuple(counts))

    @classmethod
    def from_observations(cls, observations: Sequence[int], M: int) -> "SampleCounts":
        counts = [0] * (M + 1)
        for x in observations:
            if not 0 <= x <= M:
                raise ValueError(f"observation {x} outside support 0..{M}")
            counts[x] += 1
        return cls(tuple(counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def sample_mean(self) -> float:
        """Sample mean ``Z``; undefined for an empty sample."""
        if self.n == 0:
            raise ValueError("sample mean is undefined for an empty sample")
        return sum(d * c for d, c in enumerate(self.counts)) / self.n


@dataclass(frozen=True)
class LossSpec:
    """Quadratic loss ``k * (d - a)**2``."""

    k: float

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k <= 0.0:
            raise ValueError(f"loss scale k must be a finite positive number, got {self.k!r}")
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class DataDistribution:
    """A point ``t`` of the simplex: ``probs[d]`` is the probability of observing ``d``."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 2:
            raise ValueError("a data distribution needs at least two support values")
        if any(not math.isfinite(p) or p < 0.0 for p in probs):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(math.fsum(probs) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {math.fsum(probs)!r}")
        object.__setattr__(self, "probs", probs)

    @property
    def M(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        return math.fsum(d * p for d, p in enumerate(self.probs))


def marginal_likelihood(prior: DirichletPrior) -> DataDistribution:
    """Prior predictive pmf ``q(d) = alpha_d / alpha``."""
    return DataDistribution(tuple(prior.mean))


def posterior(prior: DirichletPrior, data: SampleCounts) -> DirichletPrior:
    if len(data.counts) != len(prior.alphas):
        raise DimensionError(
            f"counts have {len(data.counts)} entries but prior support has {len(prior.alphas)}"
        )
    return DirichletPrior(tuple(a + c for a, c in zip(prior.alphas, data.counts)))


def bayes_action(prior: DirichletPrior) -> float:
    """Action minimizing prior expected quadratic loss: the predictive mean ``c1``."""
    return prior.c1


def posterior_bayes_action(prior: DirichletPrior, data: SampleCounts) -> float:
    """Posterior predictive mean ``(alpha*c1 + n*Z) / (alpha + n)``."""
    if len(data.counts) != len(prior.alphas):
        raise DimensionError(
            f"counts have {len(data.counts)} entries but prior support has {len(prior.alphas)}"
        )
    n = data.n
    if n == 0:
        return prior.c1
    data_sum = sum(d * c for d, c in enumerate(data.counts))
    return (prior.first_moment_sum + data_sum) / (prior.alpha + n)


def prior_bayes_risk(prior: DirichletPrior, loss: LossSpec) -> float:
    """Bayes risk before sampling, ``k * (c2 - c1**2)``."""
    return loss.k * prior.predictive_variance


def expected_risk(t: DataDistribution, a: float, loss: LossSpec) -> float:
    """Expected loss ``k * sum_d t_d (d - a)**2`` of action ``a`` when ``t`` is the truth."""
    return loss.k * math.fsum(p * (d - a) ** 2 for d, p in enumerate(t.probs))


def evdi(prior: DirichletPrior, loss: LossSpec) -> float:
    """Expected value of learning the data distribution exactly (infinite sample)."""
    return loss.k * prior.predictive_variance / (1.0 + prior.alpha)


def efficiency(prior: DirichletPrior, n: int) -> float:
    """Fraction ``n / (n + alpha)`` of EVDI captured by ``n`` observations."""
    n = _check_sample_size(n)
    return n / (n + prior.alpha)


def evsi(prior: DirichletPrior, loss: LossSpec, n: int) -> float:
    """Expected value of ``n`` observations, ``k n (c2 - c1^2) / ((n + alpha)(1 + alpha))``.

    Evaluated as ``efficiency * evdi`` so that the factorization holds bit-for-bit.
    """
    return efficiency(prior, n) * evdi(prior, loss)


def preposterior_expected_loss(prior: DirichletPrior, loss: LossSpec, n: int) -> float:
    """Prior expectation of the posterior Bayes risk after ``n`` observations."""
    return prior_bayes_risk(prior, loss) - evsi(prior, loss, n)


def beta_binomial_evsi(alpha0: float, alpha1: float, k: float, n: int) -> float:
    """Classical beta-binomial EVSI in Beta(alpha0, alpha1) parameters.

    Independent of :class:`DirichletPrior`; used to cross-check :func:`evsi` on
    two-point support.
    """
    n = _check_sample_size(n)
    s = alpha0 + alpha1
    return k * n / (n + s) * (alpha0 * alpha1) / (s * s * (s + 1.0))


def dirichlet_moments(prior: DirichletPrior) -> tuple[np.ndarray, np.ndarray]:
    """First moments ``E[t_i]`` and the matrix of second moments ``E[t_i t_j]``."""
    a = np.asarray(prior.alphas)
    alpha = prior.alpha
    second = np.outer(a, a) / (alpha * (alpha + 1.0))
    second[np.diag_indices_from(second)] = a * (a + 1.0) / (alpha * (alpha + 1.0))
    return a / alpha, second

