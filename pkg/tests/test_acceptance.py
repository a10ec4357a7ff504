"""The ten acceptance criteria, one test each.

A summary line per criterion is printed at the end of the pytest run.
Expected values are frozen literals from the worked examples or come from
the independent oracles in ``oracles.py``.
"""

import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from oracles import best_partition_wss, brute_force_oner_error, mst_edge_weights, naive_linkage
from statkit import descriptive, factor, inference, regression
from statkit.classify import LabeledDataset, train_oner
from statkit.cluster import Linkage, SeededRandom, agglomerate, kmeans
from statkit.dataset import BinSpec, Column, Dataset, Kind, binned_frequency_table, frequency_table, load_csv
from statkit.distributions import Binomial, Normal, clt_simulate, empirical_rule
from statkit.inference import Tail

from conftest import DATA, ROOT


COLOR_TABLE = [
    ("Blue", 4, 4, 0.4, 0.4),
    ("Red", 2, 6, 0.2, 0.6),
    ("White", 2, 8, 0.2, 0.8),
    ("Green", 1, 9, 0.1, 0.9),
    ("Black", 1, 10, 0.1, 1.0),
]
HEIGHT_TABLE = [
    ("]1.50, 1.55]", 3, 3, 0.15, 0.15),
    ("]1.55, 1.60]", 5, 8, 0.25, 0.4),
    ("]1.60, 1.65]", 3, 11, 0.15, 0.55),
    ("]1.65, 1.70]", 3, 14, 0.15, 0.7),
    ("]1.70, 1.75]", 3, 17, 0.15, 0.85),
    ("]1.75, 1.80]", 2, 19, 0.1, 0.95),
    ("]1.80, 1.85]", 1, 20, 0.05, 1.0),
]
KAISER_BANDS = ["unacceptable", "miserable", "mediocre", "middling", "meritorious", "marvelous"]


def _same_table(actual, expected):
    assert len(actual) == len(expected)
    for (k, n, cn, f, cf), (ek, en, ecn, ef, ecf) in zip(actual, expected):
        assert (str(k), n, cn) == (ek, en, ecn)
        assert f == pytest.approx(ef, abs=1e-12) and cf == pytest.approx(ecf, abs=1e-12)


def test_criterion_01_golden_examples(criterion):
    criterion(1, "golden worked examples (ages summary, color and height tables), < 1 s")
    t0 = time.perf_counter()
    ages = load_csv(DATA / "ages.csv")["age"]
    assert ages.kind is Kind.DISCRETE
    s = descriptive.summarize(ages)
    assert s.mean == 21.75
    assert s.median == 21.5
    assert s.modes == [20]
    assert s.q1 == 20 and s.q3 == 23
    assert s.range == 5
    _same_table(frequency_table(load_csv(DATA / "colors.csv")["color"]).as_tuples(), COLOR_TABLE)
    heights = load_csv(DATA / "heights.csv")["height"]
    _same_table(binned_frequency_table(heights, BinSpec(1.50, 0.05, 7)).as_tuples(), HEIGHT_TABLE)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_02_empirical_rule(criterion):
    criterion(2, "empirical rule coverages equal (0.683, 0.955, 0.997) within 0.0005, < 1 s")
    t0 = time.perf_counter()
    coverage = empirical_rule(Normal(0.0, 1.0))
    # exact normal masses are 0.682689..., 0.954499..., 0.997300...; the middle one sits
    # 5.003e-4 from the rounded 0.955, just outside the stated tolerance
    for got, stated in zip(coverage, (0.683, 0.955, 0.997)):
        assert abs(got - stated) <= 0.0005, f"coverage {got:.7f} vs stated {stated}"
    assert time.perf_counter() - t0 < 1.0


def test_criterion_03_clt_desk_scale(criterion):
    criterion(3, "CLT: Bernoulli(0.5), n=50, R=10000, mean within 3 SE, |skew| < 0.15, < 5 s")
    t0 = time.perf_counter()
    rep = clt_simulate(Binomial(1, 0.5), n=50, replications=10_000, seed=12345)
    se = 0.5 / math.sqrt(50) / math.sqrt(10_000)
    assert abs(rep.mean_of_means - 0.5) <= 3 * se
    assert abs(rep.skewness) < 0.15
    assert time.perf_counter() - t0 < 5.0


def test_criterion_04_bartlett_kmo(criterion):
    criterion(4, "Bartlett/KMO: identity, r=0.5 n=20, 2-variable KMO 0.5, Kaiser band labels")
    ident = factor.bartlett_sphericity(factor.CorrelationMatrix(np.eye(4), 30))
    assert ident.statistic == 0.0 and ident.p_value == 1.0
    b = factor.bartlett_sphericity(factor.CorrelationMatrix(np.array([[1, 0.5], [0.5, 1]]), 20))
    assert abs(b.statistic - 5.034) <= 1e-3 and b.df == 1
    for r in (-0.95, -0.5, -0.01, 0.01, 0.3, 0.5, 0.8, 0.99):
        k = factor.kmo(np.array([[1, r], [r, 1]]))
        assert abs(k.overall - 0.5) <= 1e-9
    assert [label for _, label in factor.KMO_BANDS] == KAISER_BANDS
    assert factor.kmo_band(0.92) == "marvelous" and factor.kmo_band(0.45) == "unacceptable"


def _random_correlation(rng, p):
    x = rng.normal(size=(p + int(rng.integers(2, 20)), p)) @ rng.normal(size=(p, p))
    return factor.correlation_matrix(x).r


def test_criterion_05_linear_algebra(criterion):
    criterion(5, "eigen residual/trace on 100 matrices; OLS decomposition, orthogonality, F = t^2")
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = int(rng.integers(2, 9))
        r = _random_correlation(rng, p)
        eig = factor.eigen_symmetric(r)
        for i in range(p):
            assert np.linalg.norm(r @ eig.vectors[:, i] - eig.values[i] * eig.vectors[:, i]) <= 1e-8
        assert abs(eig.values.sum() - p) <= 1e-8
    for _ in range(100):
        n, p = int(rng.integers(5, 40)), int(rng.integers(1, 5))
        if n < p + 2:
            n = p + 2
        x = rng.normal(size=(n, p)) * rng.uniform(0.1, 10, size=p)
        y = x @ rng.normal(size=p) + rng.normal(scale=rng.uniform(0.1, 3), size=n)
        model = regression.fit_ols(x, y)
        t = regression.anova(model)
        assert abs(t.sst - (t.ssm + t.sse)) <= 1e-8 * t.sst
        design = np.column_stack([np.ones(n), x])
        for j in range(design.shape[1]):
            dot = abs(float(model.residuals @ design[:, j]))
            assert dot <= 1e-8 * np.linalg.norm(model.residuals) * np.linalg.norm(design[:, j]) + 1e-300
        if p == 1:
            slope = regression.coefficient_tests(model)[1]
            assert t.f_statistic == pytest.approx(slope.t_statistic**2, rel=1e-8)
    # make sure the F = t^2 branch ran on several problems of its own
    for _ in range(20):
        x = rng.normal(size=12)
        y = 2 * x + rng.normal(size=12)
        model = regression.fit_ols(x, y)
        slope = regression.coefficient_tests(model)[1]
        assert regression.anova(model).f_statistic == pytest.approx(slope.t_statistic**2, rel=1e-8)


def _align(actual, expected):
    """Match columns of ``actual`` to ``expected`` up to permutation and sign."""
    m = expected.shape[1]
    best = math.inf
    for perm in itertools.permutations(range(m)):
        cand = actual[:, perm]
        signs = np.sign(np.sum(cand * expected, axis=0))
        signs[signs == 0] = 1
        best = min(best, float(np.max(np.abs(cand * signs - expected))))
    return best


def test_criterion_06_rotation(criterion):
    criterion(6, "varimax recovers 45-degree-mixed structure; communalities and orthogonality kept")
    simple = np.array([[0.9, 0], [0.8, 0], [0.7, 0], [0, 0.85], [0, 0.75], [0, 0.6]])
    c = s = math.sqrt(0.5)
    mixed = simple @ np.array([[c, -s], [s, c]])
    sol = factor.FactorSolution(mixed, np.zeros(6), np.sum(mixed**2, axis=0) / 6, "toy")
    rot = factor.rotate(sol, "varimax")
    assert _align(rot.loadings, simple) <= 1e-6
    assert np.max(np.abs(rot.communalities - sol.communalities)) <= 1e-10
    t = rot.rotation_matrix
    assert np.max(np.abs(t.T @ t - np.eye(2))) <= 1e-10


def test_criterion_07_clustering_oracles(criterion):
    criterion(7, "six linkages match naive oracle on 50 instances; single = MST; k-means WSS")
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 13))
        x = rng.normal(size=(n, int(rng.integers(1, 4))))
        for link in Linkage:
            d = agglomerate(x, link)
            expected = naive_linkage(x, link.value)
            assert [(s.a, s.b, s.size) for s in d.steps] == [(a, b, sz) for a, b, _, sz in expected]
            for s, (_, _, h, _) in zip(d.steps, expected):
                assert s.height == pytest.approx(h, rel=1e-9, abs=1e-12)
        assert agglomerate(x, Linkage.SINGLE).heights() == pytest.approx(mst_edge_weights(x), rel=1e-12)
    pts = [0.0, 1.0, 10.0, 11.0]
    res = kmeans(pts, 2)
    assert res.wss == pytest.approx(1.0, abs=1e-12)
    assert res.wss == pytest.approx(best_partition_wss(pts, 2), abs=1e-12)
    for seed in range(50):
        x = rng.normal(size=(int(rng.integers(5, 40)), 2))
        k = int(rng.integers(1, 6))
        hist = kmeans(x, k, SeededRandom(seed)).history
        assert all(b <= a + 1e-12 * max(1.0, a) for a, b in zip(hist, hist[1:]))


def _exact_binomial_two_tailed(k, n, p0):
    p = Fraction(repr(p0))
    pmf = [math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(n + 1)]
    lower, upper = sum(pmf[: k + 1]), sum(pmf[k:])
    return float(min(Fraction(1), 2 * min(lower, upper))), float(lower), float(upper)


def test_criterion_08_inference_duality(criterion):
    criterion(8, "Reject iff p < alpha; z CI/test duality on 100 cases; exact binomial = enumeration")
    rng = np.random.default_rng(8)
    for alpha in (0.01, 0.05, 0.10):
        for _ in range(20):
            a = rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2), size=int(rng.integers(3, 30)))
            b = rng.normal(0, rng.uniform(0.5, 2), size=int(rng.integers(3, 30)))
            tail = Tail(rng.choice(["left", "right", "two"]))
            results = [
                inference.z_test_mean(float(a.mean()), a.size, 0.0, 1.0, tail, alpha),
                inference.t_test_mean(a, 0.0, tail, alpha),
                inference.chi2_test_variance(a, 1.0, tail, alpha),
                inference.f_test_variance_ratio(a, b, tail, alpha),
                inference.proportion_test(int(rng.integers(0, 41)), 40, 0.5, tail, alpha),
                inference.proportion_test(int(rng.integers(0, 11)), 10, 0.3, tail, alpha),
            ]
            for r in results:
                assert 0 <= r.p_value <= 1
                assert r.rejected == (r.p_value < alpha)
    for _ in range(100):
        alpha = float(rng.choice([0.01, 0.05, 0.10]))
        n, sigma = int(rng.integers(2, 100)), float(rng.uniform(0.5, 5))
        mean, mu0 = float(rng.normal()), float(rng.normal())
        test = inference.z_test_mean(mean, n, mu0, sigma, Tail.TWO, alpha)
        ci = inference.ci_mean(mean, n, 1 - alpha, sigma=sigma)
        assert test.rejected == (mu0 not in ci)
    for n in range(1, 21):
        for p0 in (0.1, 0.37, 0.5, 0.8):
            for k in range(n + 1):
                two, lower, upper = _exact_binomial_two_tailed(k, n, p0)
                assert inference.proportion_test(k, n, p0, Tail.TWO).p_value == pytest.approx(two, abs=1e-12)
                assert inference.proportion_test(k, n, p0, Tail.LEFT).p_value == pytest.approx(lower, abs=1e-12)
                assert inference.proportion_test(k, n, p0, Tail.RIGHT).p_value == pytest.approx(upper, abs=1e-12)


def _toy_table(rng):
    n_classes = int(rng.integers(2, 4))
    max_values = 12 if n_classes == 2 else 8
    n_attrs = int(rng.integers(1, 7))
    n_rows = int(rng.integers(2, 40))
    classes = [f"c{i}" for i in range(n_classes)]
    labels = [classes[i] for i in rng.integers(0, n_classes, size=n_rows)]
    cols = []
    for j in range(n_attrs):
        n_vals = int(rng.integers(1, max_values + 1))
        # some attributes track the label to make the choice non-trivial
        if rng.random() < 0.5:
            vals = [f"v{(classes.index(y) + int(rng.integers(0, 2))) % n_vals}" for y in labels]
        else:
            vals = [f"v{i}" for i in rng.integers(0, n_vals, size=n_rows)]
        cols.append(vals)
    return cols, labels


def test_criterion_09_oner_optimality(criterion):
    criterion(9, "OneR training error equals brute-force minimum on 50 toy tables")
    rng = np.random.default_rng(9)
    for _ in range(50):
        cols, labels = _toy_table(rng)
        columns = tuple(Column(f"a{j}", Kind.NOMINAL, tuple(c)) for j, c in enumerate(cols))
        data = Dataset(columns + (Column("y", Kind.NOMINAL, tuple(labels)),))
        rule = train_oner(LabeledDataset(data, "y"))
        assert rule.errors == brute_force_oner_error(cols, labels)


def test_criterion_10_determinism(criterion, tmp_path):
    criterion(10, "two `statkit run` invocations give byte-identical report.md")
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        proc = subprocess.run(
            [sys.executable, "-m", "statkit.cli", "run", "--config", str(ROOT / "configs" / "study.ini"), "--out", str(out)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append((out / "report.md").read_bytes())
        charts = sorted(p.name for p in (out / "charts").iterdir())
        assert charts
    assert outs[0] == outs[1]
