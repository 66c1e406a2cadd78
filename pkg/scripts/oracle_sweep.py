"""Randomized sweep: closed-form EVSI against the Monte Carlo estimate, one line per config."""

import argparse

import numpy as np

from dirvoi import DirichletPrior, LossSpec, SimConfig, estimate_evsi, evsi


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--configs", type=int, default=20)
    parser.add_argument("--replications", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    inside = 0
    for i in range(args.configs):
        M = int(rng.integers(1, 11))
        prior = DirichletPrior(tuple(rng.uniform(0.1, 10, size=M + 1)))
        loss = LossSpec(rng.uniform(0.1, 100))
        n = int(rng.integers(1, 21))
        target = evsi(prior, loss, n)
        est = estimate_evsi(prior, loss, n, SimConfig(replications=args.replications, seed=args.seed * 1000 + i))
        z = est.z(target)
        inside += abs(z) <= 3
        print(f"M={M:2d} alpha={prior.alpha:7.3f} k={loss.k:7.3f} n={n:2d}  "
              f"closed={target:.6g}  mc={est.estimate:.6g} +/- {est.std_error:.2g}  z={z:+.2f}")
    print(f"{inside}/{args.configs} within 3 standard errors")


if __name__ == "__main__":
    main()
