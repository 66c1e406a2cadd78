"""Decision policies built on the closed-form EVSI.

Two problems are covered:

* choosing how many observations to buy when sampling costs ``K + s*n``;
* picking the period of a season after which a repeated order may be revised,
  at a one-off changeover cost.

Both objectives are concave (resp. convex) in the integer decision, so the
continuous stationary point brackets the integer optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral

from .core import DirichletPrior, LossSpec, evsi

__all__ = [
    "SamplingCost",
    "SeasonSpec",
    "SampleSizeDecision",
    "ChangeoverDecision",
    "sampling_net_loss",
    "optimal_sample_size",
    "season_net_cost",
    "optimal_changeover",
]


@dataclass(frozen=True)
class SamplingCost:
    """Linear sampling cost ``fixed + unit * n``."""

    fixed: float
    unit: float

    def __post_init__(self):
        fixed, unit = float(self.fixed), float(self.unit)
        if not math.isfinite(fixed) or fixed < 0.0:
            raise ValueError(f"fixed sampling cost must be finite and >= 0, got {self.fixed!r}")
        if not math.isfinite(unit) or unit <= 0.0:
            raise ValueError(f"unit sampling cost must be finite and > 0, got {self.unit!r}")
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "unit", unit)

    def total(self, n: int) -> float:
        return self.fixed + self.unit * n


@dataclass(frozen=True)
class SeasonSpec:
    """A selling season of ``periods`` periods with a one-off ``changeover_cost``."""

    periods: int
    changeover_cost: float

    def __post_init__(self):
        if isinstance(self.periods, bool) or not isinstance(self.periods, Integral) or self.periods < 1:
            raise ValueError(f"season length must be a positive integer, got {self.periods!r}")
        cost = float(self.changeover_cost)
        if not math.isfinite(cost) or cost < 0.0:
            raise ValueError(f"changeover cost must be finite and >= 0, got {self.changeover_cost!r}")
        object.__setattr__(self, "periods", int(self.periods))
        object.__setattr__(self, "changeover_cost", cost)


@dataclass(frozen=True)
class SampleSizeDecision:
    n_star: int
    net_value: float
    continuous_root: float


@dataclass(frozen=True)
class ChangeoverDecision:
    """Optimal changeover period.  ``changeover`` is False when no period pays off."""

    j_star: int
    cost: float
    j0: float

    @property
    def changeover(self) -> bool:
        return self.j_star > 0


def sampling_net_loss(prior: DirichletPrior, loss: LossSpec, cost: SamplingCost, n: int) -> float:
    """``-EVSI(n) + K + s n``; the quantity minimized when choosing a sample size."""
    return -evsi(prior, loss, n) + cost.total(n)


def continuous_sample_size(prior: DirichletPrior, loss: LossSpec, cost: SamplingCost) -> float:
    """Stationary point of the net loss when ``n`` is treated as real."""
    a = prior.alpha
    return math.sqrt(a / (1.0 + a) * loss.k / cost.unit * prior.predictive_variance) - a


def optimal_sample_size(prior: DirichletPrior, loss: LossSpec, cost: SamplingCost) -> SampleSizeDecision:
    root = continuous_sample_size(prior, loss, cost)
    if root <= 0.0:
        return SampleSizeDecision(0, 0.0, root)

    lo, hi = math.floor(root), math.ceil(root)
    # ties go to the smaller sample
    n = lo if sampling_net_loss(prior, loss, cost, lo) <= sampling_net_loss(prior, loss, cost, hi) else hi

    value = evsi(prior, loss, n)
    if n == 0 or not value > cost.total(n):
        return SampleSizeDecision(0, 0.0, root)
    return SampleSizeDecision(n, value - cost.total(n), root)


def season_net_cost(prior: DirichletPrior, loss: LossSpec, season: SeasonSpec, j: int) -> float:
    """Expected net cost of fixing the changeover after period ``j`` (0 = never change)."""
    if isinstance(j, bool) or not isinstance(j, Integral):
        raise TypeError(f"period must be an integer, got {j!r}")
    if not 0 <= j <= season.periods:
        raise ValueError(f"period {j} outside [0, {season.periods}]")
    if j == 0:
        return 0.0
    return season.changeover_cost - (season.periods - j) * evsi(prior, loss, int(j))


def continuous_changeover(prior: DirichletPrior, season: SeasonSpec) -> float:
    a = prior.alpha
    return math.sqrt(a * (season.periods + a)) - a


def optimal_changeover(prior: DirichletPrior, loss: LossSpec, season: SeasonSpec) -> ChangeoverDecision:
    j0 = continuous_changeover(prior, season)
    J = season.periods
    candidates = sorted({min(max(math.floor(j0), 1), J), min(max(math.ceil(j0), 1), J)})
    best_j, best_cost = candidates[0], season_net_cost(prior, loss, season, candidates[0])
    for j in candidates[1:]:
        c = season_net_cost(prior, loss, season, j)
        if c < best_cost:
            best_j, best_cost = j, c
    if best_cost < 0.0:
        return ChangeoverDecision(best_j, best_cost, j0)
    return ChangeoverDecision(0, 0.0, j0)
