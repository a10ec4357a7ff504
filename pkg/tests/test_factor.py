import math
import warnings

import numpy as np
import pytest
import scipy.stats as ss
from hypothesis import given, settings
from hypothesis import strategies as st

from statkit import factor as fa
from statkit.errors import DataError


def corr2(r, n=20):
    return fa.CorrelationMatrix(np.array([[1.0, r], [r, 1.0]]), n)


def random_loadings_data(seed, n=300):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(n, 2))
    lam = np.array([[0.8, 0.0], [0.7, 0.1], [0.75, 0.0], [0.0, 0.8], [0.1, 0.7], [0.0, 0.75]])
    return f @ lam.T + 0.5 * rng.normal(size=(n, 6))


def test_correlation_matrix_basics():
    x = np.arange(10.0)
    r = fa.correlation_matrix(np.column_stack([x, x, -x]))
    assert r.r[0, 1] == pytest.approx(1.0) and r.r[0, 2] == pytest.approx(-1.0)
    rng = np.random.default_rng(8)
    y = rng.normal(size=(10, 3))
    assert np.allclose(fa.correlation_matrix(y).r, np.corrcoef(y, rowvar=False), atol=1e-12)
    with pytest.raises(DataError):
        fa.correlation_matrix(np.column_stack([x, np.ones(10)]))
    with pytest.raises(DataError):
        fa.CorrelationMatrix(np.array([[1.0, 0.5], [0.4, 1.0]]), 10)


def test_bartlett_cases():
    ident = fa.bartlett_sphericity(fa.CorrelationMatrix(np.eye(3), 50))
    assert ident.statistic == 0 and ident.p_value == 1.0
    r = fa.bartlett_sphericity(corr2(0.5))
    assert r.determinant == pytest.approx(0.75)
    assert r.statistic == pytest.approx(-(19 - 9 / 6) * math.log(0.75), rel=1e-12)
    assert r.statistic == pytest.approx(5.0344, abs=1e-4) and r.df == 1
    assert r.p_value == pytest.approx(ss.chi2.sf(r.statistic, 1), rel=1e-9)
    stats = [fa.bartlett_sphericity(corr2(v)).statistic for v in (0.1, 0.3, 0.6, 0.9)]
    assert stats == sorted(stats)


def test_kmo_two_variables_and_bands():
    for r in (0.2, -0.5, 0.9):
        assert fa.kmo(corr2(r)).overall == pytest.approx(0.5, abs=1e-12)
    assert fa.kmo_band(0.92) == "marvelous"
    assert fa.kmo_band(0.45) == "unacceptable"
    assert fa.kmo_band(0.5) == "miserable"
    assert fa.alpha_band(0.72) == "acceptable"
    assert fa.alpha_band(0.95) == "excellent"


def test_kmo_against_direct_formula():
    r = fa.correlation_matrix(random_loadings_data(1))
    inv = np.linalg.inv(r.r)
    a = -inv / np.sqrt(np.outer(np.diag(inv), np.diag(inv)))
    off = ~np.eye(6, dtype=bool)
    expect = np.sum(r.r[off] ** 2) / (np.sum(r.r[off] ** 2) + np.sum(a[off] ** 2))
    k = fa.kmo(r)
    assert k.overall == pytest.approx(expect, rel=1e-10)
    per = np.asarray(k.per_variable)
    assert np.all((per >= 0) & (per <= 1))


def test_eigen_spectrum():
    assert np.allclose(fa.eigen_symmetric(np.eye(4)).values, 1.0)
    assert fa.eigen_symmetric(corr2(0.3)).values == pytest.approx([1.3, 0.7])
    r = fa.correlation_matrix(random_loadings_data(2))
    e = fa.eigen_symmetric(r)
    assert e.values.sum() == pytest.approx(6.0, abs=1e-8)
    for lam, v in zip(e.values, e.vectors.T):
        assert np.max(np.abs(r.r @ v - lam * v)) < 1e-8


def test_pca_two_variables():
    sol = fa.extract_pca(corr2(0.8), 1)
    assert np.abs(sol.loadings[:, 0]) == pytest.approx([math.sqrt(0.9)] * 2)
    assert sol.communalities == pytest.approx([0.9, 0.9])
    assert sol.shares == pytest.approx([0.9])
    assert sol.specific_variances == pytest.approx([0.1, 0.1])


def test_pca_full_rank_reproduces_unit_diagonal():
    r = fa.correlation_matrix(random_loadings_data(3))
    e = fa.eigen_symmetric(r)
    full = e.vectors * np.sqrt(e.values)
    assert np.allclose(np.sum(full**2, axis=1), 1.0, atol=1e-8)
    with pytest.raises(DataError):
        fa.extract_pca(r, 6)
    with pytest.raises(DataError):
        fa.extract_pca(r, 0)


def test_principal_axis():
    ident = fa.extract_principal_axis(fa.CorrelationMatrix(np.eye(4), 30), 1)
    assert np.allclose(ident.communalities, 0.0) and ident.iterations == 1
    sol = fa.extract_principal_axis(fa.correlation_matrix(random_loadings_data(4)), 2, tol=1e-8)
    h2 = sol.communalities
    assert np.all((h2 >= 0) & (h2 <= 1 + 1e-8))
    assert sol.shares.sum() <= 1 + 1e-8
    assert sol.extraction == "principal_axis"


def test_principal_axis_fixed_point():
    tol = 1e-9
    r = fa.correlation_matrix(random_loadings_data(5))
    sol = fa.extract_principal_axis(r, 2, tol=tol, max_iter=2000)
    reduced = np.array(r.r)
    np.fill_diagonal(reduced, sol.communalities)
    top = np.linalg.eigh(reduced)
    vals, vecs = top[0][::-1][:2], top[1][:, ::-1][:, :2]
    h2 = np.sum((vecs * np.sqrt(vals)) ** 2, axis=1)
    assert np.max(np.abs(h2 - sol.communalities)) < 1e-6


def test_heywood_case_warns_and_clamps():
    # one factor: h1^2 = r12 r13 / r23 = 0.81 / 0.7 > 1
    r = np.array([[1.0, 0.9, 0.9], [0.9, 1.0, 0.7], [0.9, 0.7, 1.0]])
    with pytest.warns(RuntimeWarning, match="Heywood"):
        sol = fa.extract_principal_axis(fa.CorrelationMatrix(r, 100), 1)
    assert sol.communalities[0] == pytest.approx(1.0)
    assert np.all(sol.communalities <= 1 + 1e-12)


def test_non_convergence_carries_a_trace():
    r = fa.correlation_matrix(random_loadings_data(7))
    with pytest.raises(fa.ConvergenceError) as info:
        fa.extract_principal_axis(r, 2, max_iter=2, tol=1e-15)
    assert len(info.value.trace) == 2


def test_retention_rules():
    spectrum = [2.5, 1.01, 0.99, 0.5]
    assert fa.retain(spectrum, fa.Kaiser()) == 2
    with pytest.warns(RuntimeWarning):
        assert fa.retain([1.0, 1.0, 1.0], fa.Kaiser()) == 1
    assert fa.retain([0.5, 0.3, 0.2], fa.VarianceExplained(0.75)) == 2
    assert fa.retain([0.5, 0.3, 0.2], fa.AllFactors()) == 3
    table = fa.variance_table([3.0, 2.0, 1.0])
    assert [row[3] for row in table] == pytest.approx([0.5, 5 / 6, 1.0])


def test_scree_data():
    r = fa.correlation_matrix(random_loadings_data(6))
    e = fa.eigen_symmetric(r)
    assert [v for _, v in fa.scree_data(e)] == pytest.approx(list(e.values))
    assert [i for i, _ in fa.scree_data(e)] == list(range(1, 7))
    assert [v for _, v in fa.scree_data(np.ones(3))] == [1.0, 1.0, 1.0]


def _solution(loadings):
    loadings = np.asarray(loadings, dtype=float)
    return fa.FactorSolution(loadings, np.ones(loadings.shape[0]), np.ones(loadings.shape[1]), "pca")


def test_simple_structure_is_a_fixed_point():
    simple = np.array([[0.9, 0.0], [0.8, 0.0], [0.0, 0.7], [0.0, 0.6]])
    for kind in ("varimax", "quartimax"):
        rot = fa.rotate(_solution(simple), kind)
        assert np.allclose(np.abs(rot.loadings), simple, atol=1e-10)


def test_quartimax_and_unnormalized_varimax_recover_mixed_structure():
    simple = np.array([[0.9, 0.0], [0.8, 0.0], [0.85, 0.0], [0.0, 0.7], [0.0, 0.6], [0.0, 0.75]])
    c = s = math.sqrt(0.5)
    mixed = simple @ np.array([[c, -s], [s, c]])
    for kind, normalize in (("quartimax", True), ("varimax", False)):
        rot = fa.rotate(_solution(mixed), kind, normalize=normalize)
        assert np.allclose(np.abs(rot.loadings), simple, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.sampled_from(["varimax", "quartimax"]), st.booleans())
def test_rotation_invariants(seed, m, kind, normalize):
    rng = np.random.default_rng(seed)
    lam = rng.uniform(-0.7, 0.7, size=(8, m)) / math.sqrt(m)
    sol = _solution(lam)
    rot = fa.rotate(sol, kind, normalize=normalize)
    t = rot.rotation_matrix
    assert np.allclose(t.T @ t, np.eye(m), atol=1e-10)
    assert np.allclose(rot.communalities, sol.communalities, atol=1e-10)
    gamma = 1.0 if kind == "varimax" else 0.0
    if not normalize:
        assert fa.orthomax_criterion(rot.loadings, gamma) >= fa.orthomax_criterion(lam, gamma) - 1e-12


def test_one_factor_rotation_is_identity():
    sol = _solution([[0.5], [0.6]])
    assert fa.rotate(sol) is sol
    with pytest.raises(ValueError):
        fa.rotate(_solution([[0.5, 0.1], [0.2, 0.6]]), "promax")


def test_cronbach_alpha():
    x = np.arange(10.0)
    alpha, band = fa.cronbach_alpha(np.column_stack([x, x, x]))
    assert alpha == pytest.approx(1.0) and band == "excellent"
    noise = np.random.default_rng(2000).normal(size=(2000, 5))
    assert abs(fa.cronbach_alpha(noise)[0]) < 0.15
    with pytest.raises(DataError):
        fa.cronbach_alpha(np.ones((5, 3)))


def test_cronbach_alpha_against_formula():
    x = random_loadings_data(9)[:, :3]
    k = 3
    expect = k / (k - 1) * (1 - np.var(x, axis=0, ddof=1).sum() / np.var(x.sum(axis=1), ddof=1))
    assert fa.cronbach_alpha(x)[0] == pytest.approx(expect, rel=1e-12)
