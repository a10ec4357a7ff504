"""Sampling distribution of the mean for a few populations and sample sizes."""

import argparse

from statkit.distributions import Binomial, clt_simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replications", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args()
    populations = {
        "Bernoulli(0.5)": Binomial(1, 0.5),
        "skewed finite": [1, 1, 1, 1, 1, 2, 2, 3, 5, 10],
    }
    print(f"{'population':>16} {'n':>4} {'mean':>9} {'sd':>9} {'sigma/sqrt(n)':>14} {'skew':>8}")
    for label, pop in populations.items():
        for n in (1, 5, 50):
            r = clt_simulate(pop, n, args.replications, args.seed)
            print(f"{label:>16} {n:>4} {r.mean_of_means:9.4f} {r.sd_of_means:9.4f} {r.expected_sd:14.4f} {r.skewness:8.4f}")


if __name__ == "__main__":
    main()
