"""Print the textbook worked examples computed by statkit (colors, ages, heights)."""

from pathlib import Path

from statkit import descriptive
from statkit.dataset import BinSpec, binned_frequency_table, frequency_table, load_csv
from statkit.distributions import Normal, empirical_rule
from statkit.report import fmt

DATA = Path(__file__).resolve().parent.parent / "data"


def show(table):
    for r in table:
        print(f"  {str(r.key):>14}  n={r.n:<3} N={r.cum_n:<3} f={fmt(r.f)}  F={fmt(r.cum_f)}")


def main():
    print("colors")
    show(frequency_table(load_csv(DATA / "colors.csv")["color"]))

    ages = load_csv(DATA / "ages.csv")["age"]
    print("ages")
    show(frequency_table(ages))
    s = descriptive.summarize(ages)
    print(f"  mean {fmt(s.mean)}  median {fmt(s.median)}  modes {s.modes}  Q1 {fmt(s.q1)}  Q3 {fmt(s.q3)}  range {fmt(s.range)}")

    print("heights")
    show(binned_frequency_table(load_csv(DATA / "heights.csv")["height"], BinSpec(1.50, 0.05, 7)))

    print("normal mass within 1, 2, 3 sd:", ", ".join(f"{m:.7f}" for m in empirical_rule(Normal())))


if __name__ == "__main__":
    main()
