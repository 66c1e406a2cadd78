"""Command-line front end.

    dirvoi value     --config run.toml --n 3
    dirvoi curve     --config run.toml
    dirvoi optimal-n --config run.toml
    dirvoi plan      --config run.toml
    dirvoi verify    --config run.toml [--seed S] [--workers W]
    dirvoi benchmark --config run.toml [--seed S] [--workers W]

Every command writes CSV (header row first, ``\\n`` line endings) to stdout or
``--out``.  Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from typing import Callable, Sequence

from . import core
from .config import ConfigError, RunConfig, load_config
from .policies import optimal_changeover, optimal_sample_size
from .simulation import estimate_evsi, run_benchmark, verify_total_variance

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID = 0, 1, 2
Z_FAIL = 4.0


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def write_csv(out: io.TextIOBase, header: Sequence[str], rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def cmd_value(cfg: RunConfig, n: int, out) -> int:
    p, loss = cfg.prior, cfg.loss
    risk = core.prior_bayes_risk(p, loss)
    header = ["M", "alpha", "c1", "c2", "n", "evsi", "evdi", "efficiency", "prior_risk", "preposterior_loss"]
    row = [p.M, p.alpha, p.c1, p.c2, n, core.evsi(p, loss, n), core.evdi(p, loss),
           core.efficiency(p, n), risk, core.preposterior_expected_loss(p, loss, n)]
    write_csv(out, header, [row])
    return EXIT_OK


def cmd_curve(cfg: RunConfig, out) -> int:
    if cfg.sim is None:
        raise ConfigError("sim.n_grid", "curve needs an n_grid in the [sim] section")
    p, loss = cfg.prior, cfg.loss
    v_inf = core.evdi(p, loss)
    rows = [[n, core.evsi(p, loss, n), v_inf, core.efficiency(p, n)] for n in cfg.sim.n_grid]
    write_csv(out, ["n", "evsi", "evdi", "efficiency"], rows)
    return EXIT_OK


def cmd_optimal_n(cfg: RunConfig, out) -> int:
    if cfg.cost is None:
        raise ConfigError("cost", "optimal-n needs a [cost] section")
    dec = optimal_sample_size(cfg.prior, cfg.loss, cfg.cost)
    total = cfg.cost.total(dec.n_star) if dec.n_star > 0 else 0.0
    row = [dec.continuous_root, dec.n_star, core.evsi(cfg.prior, cfg.loss, dec.n_star), total, dec.net_value]
    write_csv(out, ["continuous_root", "n_star", "evsi_at_n_star", "total_cost", "net_value"], [row])
    return EXIT_OK


def cmd_plan(cfg: RunConfig, out) -> int:
    if cfg.season is None:
        raise ConfigError("season", "plan needs a [season] section")
    dec = optimal_changeover(cfg.prior, cfg.loss, cfg.season)
    if not dec.changeover:
        print("note: no changeover period has negative net cost; j_star = 0", file=sys.stderr)
    write_csv(out, ["j0", "j_star", "cost_at_j_star"], [[dec.j0, dec.j_star, dec.cost]])
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out, evsi_fn: Callable = core.evsi) -> int:
    """Compare Monte Carlo estimates with closed forms; exit 1 if any ``|z| > 4``.

    ``evsi_fn`` is the closed form under test; swapping it lets the detector itself be tested.
    """
    if cfg.sim is None:
        raise ConfigError("sim", "verify needs a [sim] section")
    rows, worst = [], 0.0
    for n in cfg.sim.n_grid:
        target = evsi_fn(cfg.prior, cfg.loss, n)
        est = estimate_evsi(cfg.prior, cfg.loss, n, cfg.sim)
        z = est.z(target)
        worst = max(worst, abs(z))
        rows.append(["evsi", n, target, est.estimate, est.std_error, z])
    for n in cfg.sim.n_grid:
        rep = verify_total_variance(cfg.prior, n, cfg.sim)
        worst = max(worst, abs(rep.z))
        rows.append(["total_variance_residual", n, 0.0, rep.residual, rep.residual_std_error, rep.z])
    write_csv(out, ["check", "n", "closed_form", "estimate", "std_error", "z"], rows)
    return EXIT_VERIFY_FAILED if worst > Z_FAIL else EXIT_OK


def cmd_benchmark(cfg: RunConfig, out) -> int:
    if cfg.sim is None:
        raise ConfigError("sim", "benchmark needs a [sim] section")
    res = run_benchmark(cfg.prior, cfg.loss, cfg.procedures, cfg.sim)
    if res.saa_empty_sample:
        print(f"note: SAA at n=0 uses the support midpoint M/2 = {cfg.prior.M / 2}", file=sys.stderr)
    rows = [[r.n, r.procedure.value, r.mean_loss, r.std_error, r.replications, r.seed] for r in res.rows]
    write_csv(out, ["n", "procedure", "mean_loss", "std_error", "replications", "seed"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirvoi", description="Dirichlet-multinomial value of information")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("value", "EVSI, EVDI and risks for one sample size"),
        ("curve", "EVSI/EVDI/efficiency over the n grid"),
        ("optimal-n", "optimal sample size under linear sampling cost"),
        ("plan", "optimal changeover period in a season"),
        ("verify", "Monte Carlo check of the closed forms"),
        ("benchmark", "BAYES vs SAA updating benchmark"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--out", help="write output here instead of stdout")
        if name == "value":
            p.add_argument("--n", type=int, help="sample size (overrides top-level n)")
        if name in ("verify", "benchmark"):
            p.add_argument("--seed", type=int, help="RNG seed (overrides sim.seed)")
            p.add_argument("--workers", type=int, help="worker threads (overrides sim.workers)")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    changes = {}
    seed = getattr(args, "seed", None)
    workers = getattr(args, "workers", None)
    if seed is not None and not 0 <= seed < 2**64:
        raise ConfigError("--seed", f"must lie in [0, 2**64), got {seed}")
    if workers is not None and workers < 1:
        raise ConfigError("--workers", f"must be >= 1, got {workers}")
    if seed is not None:
        changes["seed"] = seed
    if workers is not None:
        changes["workers"] = workers
    if changes and cfg.sim is not None:
        cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, **changes))
    return cfg


def _dispatch(args, cfg: RunConfig, out) -> int:
    if args.command == "value":
        n = args.n if args.n is not None else cfg.n
        if n is None:
            raise ConfigError("n", "value needs --n or a top-level n")
        if n < 0:
            raise ConfigError("--n", f"must be >= 0, got {n}")
        return cmd_value(cfg, n, out)
    return {
        "curve": cmd_curve,
        "optimal-n": cmd_optimal_n,
        "plan": cmd_plan,
        "verify": cmd_verify,
        "benchmark": cmd_benchmark,
    }[args.command](cfg, out)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        # render fully before touching --out so invalid input never leaves a partial file
        buf = io.StringIO()
        code = _dispatch(args, cfg, buf)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
