"""Print the six-level demand example: values, optimal sample size and changeover plan."""

from fractions import Fraction

from dirvoi import (
    DirichletPrior,
    LossSpec,
    SampleCounts,
    SamplingCost,
    SeasonSpec,
    bayes_action,
    efficiency,
    evdi,
    evsi,
    optimal_changeover,
    optimal_sample_size,
    posterior_bayes_action,
    preposterior_expected_loss,
    prior_bayes_risk,
)


def show(name, value):
    print(f"{name:<28} {value:<22.15g} ~ {Fraction(value).limit_denominator(1000)}")


def main():
    prior = DirichletPrior((10 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6))
    loss = LossSpec(5)
    n = 3
    show("prior Bayes action", bayes_action(prior))
    show("prior Bayes risk", prior_bayes_risk(prior, loss))
    show(f"EVSI (n={n})", evsi(prior, loss, n))
    show("EVDI", evdi(prior, loss))
    show("efficiency", efficiency(prior, n))
    show("preposterior loss", preposterior_expected_loss(prior, loss, n))
    show("action after (0, 5, 0)", posterior_bayes_action(prior, SampleCounts.from_observations([0, 5, 0], 5)))

    dec = optimal_sample_size(prior, loss, SamplingCost(0.0, 0.1))
    print(f"\noptimal sample size at s=0.1: n*={dec.n_star} (root {dec.continuous_root:.4f}, net value {dec.net_value:.4f})")
    plan = optimal_changeover(prior, loss, SeasonSpec(10, 1.0))
    print(f"changeover for J=10, K=1: j*={plan.j_star} (j0 {plan.j0:.4f}, cost {plan.cost:.4f})")


if __name__ == "__main__":
    main()
