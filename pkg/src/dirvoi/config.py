"""Run configuration files.

Configs are TOML.  Numbers may be written as TOML ints/floats or as fraction
strings such as ``"10/6"``.  Unknown keys are rejected; every error names the
offending field with a dotted path.

    [prior]
    alphas = ["10/6", "1/6", "1/6", "1/6", "1/6", "1/6"]
    # or: concentration = 10  and  mean_weights = [1, 2, 3]

    [loss]
    k = 5

    [cost]          # optional, for optimal-n
    K = 0
    s = 0.1

    [season]        # optional, for plan
    J = 10
    K = 1

    [sim]           # optional, for curve / verify / benchmark
    replications = 10000
    seed = 42
    n_grid = [1, 2, 3]
    procedures = ["BAYES", "SAA"]
    inner_draws = 1
    workers = 1

A top-level ``n = 3`` sets the default sample size for ``value``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import DirichletPrior, LossSpec
from .policies import SamplingCost, SeasonSpec
from .simulation import Procedure, SimConfig

DEFAULT_PROCEDURES = (Procedure.BAYES, Procedure.SAA)


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    prior: DirichletPrior
    loss: LossSpec
    cost: SamplingCost | None = None
    season: SeasonSpec | None = None
    sim: SimConfig | None = None
    procedures: tuple[Procedure, ...] = DEFAULT_PROCEDURES
    n: int | None = None


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(field, f"expected a number or fraction string, got {value!r}")


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    return value


def _table(doc: dict, key: str, allowed: set[str], required: bool = False) -> dict | None:
    if key not in doc:
        if required:
            raise ConfigError(key, "section is required")
        return None
    tbl = doc[key]
    if not isinstance(tbl, dict):
        raise ConfigError(key, "expected a table")
    for k in tbl:
        if k not in allowed:
            raise ConfigError(f"{key}.{k}", "unknown key")
    return tbl


def _require(tbl: dict, section: str, key: str):
    if key not in tbl:
        raise ConfigError(f"{section}.{key}", "is required")
    return tbl[key]


def _number_list(value: Any, field: str) -> list[float]:
    if not isinstance(value, list):
        raise ConfigError(field, "expected a list")
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _prior(doc: dict) -> DirichletPrior:
    tbl = _table(doc, "prior", {"alphas", "concentration", "mean_weights"}, required=True)
    has_alphas = "alphas" in tbl
    has_mean = "concentration" in tbl or "mean_weights" in tbl
    if has_alphas == has_mean:
        raise ConfigError("prior", "give either alphas, or concentration and mean_weights")
    if has_alphas:
        alphas = _number_list(tbl["alphas"], "prior.alphas")
        if len(alphas) < 2:
            raise ConfigError("prior.alphas", "need at least two entries")
        for i, a in enumerate(alphas):
            if not a > 0.0 or a == float("inf"):
                raise ConfigError(f"prior.alphas[{i}]", f"must be finite and positive, got {a!r}")
        return DirichletPrior(tuple(alphas))
    conc = _number(_require(tbl, "prior", "concentration"), "prior.concentration")
    if not 0.0 < conc < float("inf"):
        raise ConfigError("prior.concentration", f"must be finite and positive, got {conc!r}")
    weights = _number_list(_require(tbl, "prior", "mean_weights"), "prior.mean_weights")
    if len(weights) < 2:
        raise ConfigError("prior.mean_weights", "need at least two entries")
    for i, w in enumerate(weights):
        if not 0.0 < w < float("inf"):
            raise ConfigError(f"prior.mean_weights[{i}]", f"must be finite and positive, got {w!r}")
    return DirichletPrior.from_mean(conc, weights)


def _loss(doc: dict) -> LossSpec:
    tbl = _table(doc, "loss", {"k"}, required=True)
    k = _number(_require(tbl, "loss", "k"), "loss.k")
    if not 0.0 < k < float("inf"):
        raise ConfigError("loss.k", f"must be finite and positive, got {k!r}")
    return LossSpec(k)


def _cost(doc: dict) -> SamplingCost | None:
    tbl = _table(doc, "cost", {"K", "s"})
    if tbl is None:
        return None
    fixed = _number(tbl.get("K", 0.0), "cost.K")
    if not 0.0 <= fixed < float("inf"):
        raise ConfigError("cost.K", f"must be finite and >= 0, got {fixed!r}")
    unit = _number(_require(tbl, "cost", "s"), "cost.s")
    if not 0.0 < unit < float("inf"):
        raise ConfigError("cost.s", f"must be finite and positive, got {unit!r}")
    return SamplingCost(fixed, unit)


def _season(doc: dict) -> SeasonSpec | None:
    tbl = _table(doc, "season", {"J", "K"})
    if tbl is None:
        return None
    J = _integer(_require(tbl, "season", "J"), "season.J")
    if J < 1:
        raise ConfigError("season.J", f"must be >= 1, got {J}")
    K = _number(tbl.get("K", 0.0), "season.K")
    if not 0.0 <= K < float("inf"):
        raise ConfigError("season.K", f"must be finite and >= 0, got {K!r}")
    return SeasonSpec(J, K)


def _sim(doc: dict) -> tuple[SimConfig | None, tuple[Procedure, ...]]:
    tbl = _table(doc, "sim", {"replications", "seed", "n_grid", "procedures", "inner_draws", "workers"})
    if tbl is None:
        return None, DEFAULT_PROCEDURES
    kwargs: dict[str, Any] = {}
    for key in ("replications", "inner_draws", "workers"):
        if key in tbl:
            v = _integer(tbl[key], f"sim.{key}")
            if v < 1:
                raise ConfigError(f"sim.{key}", f"must be >= 1, got {v}")
            kwargs[key] = v
    if "seed" in tbl:
        seed = _integer(tbl["seed"], "sim.seed")
        if not 0 <= seed < 2**64:
            raise ConfigError("sim.seed", f"must lie in [0, 2**64), got {seed}")
        kwargs["seed"] = seed
    if "n_grid" in tbl:
        grid = tbl["n_grid"]
        if not isinstance(grid, list):
            raise ConfigError("sim.n_grid", "expected a list")
        grid = [_integer(v, f"sim.n_grid[{i}]") for i, v in enumerate(grid)]
        if not grid:
            raise ConfigError("sim.n_grid", "must be non-empty")
        if any(v < 0 for v in grid):
            raise ConfigError("sim.n_grid", "entries must be >= 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sim.n_grid", "must be strictly increasing")
        kwargs["n_grid"] = tuple(grid)
    procs = DEFAULT_PROCEDURES
    if "procedures" in tbl:
        raw = tbl["procedures"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("sim.procedures", "expected a non-empty list")
        try:
            procs = tuple(Procedure.parse(p) for p in raw)
        except ValueError as exc:
            raise ConfigError("sim.procedures", str(exc)) from None
        if len(set(procs)) != len(procs):
            raise ConfigError("sim.procedures", "duplicate procedure")
    return SimConfig(**kwargs), procs


def parse_config(doc: dict) -> RunConfig:
    for key in doc:
        if key not in {"prior", "loss", "cost", "season", "sim", "n"}:
            raise ConfigError(key, "unknown key")
    n = None
    if "n" in doc:
        n = _integer(doc["n"], "n")
        if n < 0:
            raise ConfigError("n", f"must be >= 0, got {n}")
    sim, procs = _sim(doc)
    return RunConfig(_prior(doc), _loss(doc), _cost(doc), _season(doc), sim, procs, n)


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"invalid TOML: {exc}") from None
    return parse_config(doc)
