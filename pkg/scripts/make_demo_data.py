"""Regenerate data/study.csv and data/accidents.csv, the synthetic demo inputs.

The study table has two latent traits behind six questionnaire items, a
study-hours predictor of an exam score, and a pass/fail label. The accidents
table is an illustrative yearly count series for the time chart.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]


def study_rows(n: int = 60, seed: int = 2024):
    rng = np.random.default_rng(seed)
    verbal, numeric = rng.normal(size=n), rng.normal(size=n)
    hours = np.round(rng.uniform(1, 10, size=n), 1)
    sleep = np.round(rng.normal(7, 1, size=n), 1)
    score = np.round(35 + 4.5 * hours + 2.0 * sleep + 3 * numeric + rng.normal(0, 4, size=n), 1)
    items = []
    for latent in (verbal, verbal, verbal, numeric, numeric, numeric):
        raw = 3 + 0.9 * latent + rng.normal(0, 0.6, size=n)
        items.append(np.clip(np.round(raw), 1, 5).astype(int))
    result = np.where(score >= 70, "pass", "fail")
    track = np.where(hours > 5.5, "intensive", "standard")
    for i in range(n):
        yield [f"{hours[i]:.1f}", f"{sleep[i]:.1f}", f"{score[i]:.1f}", *(int(it[i]) for it in items), track[i], result[i]]


def main():
    with open(ROOT / "data" / "study.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hours", "sleep", "score", "q1", "q2", "q3", "q4", "q5", "q6", "track", "result"])
        w.writerows(study_rows())
    counts = [41, 38, 45, 36, 33, 35, 29, 31, 27, 24]
    with open(ROOT / "data" / "accidents.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "accidents"])
        w.writerows([2010 + i, c] for i, c in enumerate(counts))


if __name__ == "__main__":
    main()
