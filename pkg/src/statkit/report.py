"""Markdown report and JSON chart payloads for a configured analysis pipeline.

Report tables print numbers with 4 decimals (scientific notation for very
small or very large magnitudes); chart JSON keeps full precision. Output is a
pure function of the input bytes, the config and the seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import classify, cluster, descriptive, factor, inference, regression
from .config import PipelineConfig, TestSpec
from .dataset import BinSpec, Column, Dataset, Kind, binned_frequency_table, frequency_table, load_csv
from .errors import ConfigError, DataError, DegenerateError

CHART_KINDS = ("pie", "bar", "histogram", "boxplot", "scree", "dendrogram", "timechart")


def fmt(x: Any) -> str:
    """Table formatting for one value."""
    if x is None:
        return "-"
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "undefined"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0:
            return "0.0000"
        if abs(x) < 1e-4 or abs(x) >= 1e6:
            return f"{x:.4e}"
        return f"{x:.4f}"
    return str(x)


def md_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(fmt(v) for v in r) + " |")
    return lines


# ------------------------------------------------------------------- charts


@dataclass(frozen=True)
class ChartPayload:
    kind: str
    title: str
    labels: list = field(default_factory=list)
    series: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CHART_KINDS:
            raise ValueError(f"unknown chart kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "title": self.title, "labels": self.labels, "series": self.series}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _key_label(key) -> str:
    return str(key)


def pie_payload(col: Column) -> ChartPayload:
    table = frequency_table(col)
    return ChartPayload("pie", col.name, [_key_label(k) for k in table.keys], {"f": [r.f for r in table]})


def bar_payload(col: Column) -> ChartPayload:
    table = frequency_table(col)
    return ChartPayload(
        "bar", col.name, [_key_label(k) for k in table.keys],
        {"n": [r.n for r in table], "f": [r.f for r in table]},
    )


def histogram_payload(col: Column, bins: BinSpec) -> ChartPayload:
    table = binned_frequency_table(col, bins)
    return ChartPayload(
        "histogram", col.name, [str(iv) for iv in table.keys],
        {"edges": bins.edges(), "n": table.counts, "f": [r.f for r in table]},
    )


def boxplot_payload(col: Column) -> ChartPayload:
    """Five-number summary plus suspected and extreme outliers of a numeric column."""
    if not col.kind.numeric:
        raise DataError(f"boxplot needs a numeric column; {col.name!r} is {col.kind.value}")
    values = col.numeric()
    if values.size < 4:
        raise DataError(f"boxplot needs at least 4 values; {col.name!r} has {values.size}")
    five = (
        float(values.min()),
        descriptive.percentile(values, 25),
        descriptive.median(values),
        descriptive.percentile(values, 75),
        float(values.max()),
    )
    out = descriptive.classify_outlier_values(values)
    return ChartPayload(
        "boxplot", col.name, ["min", "q1", "median", "q3", "max"],
        {"five_numbers": list(five), "suspected": out.suspected, "extreme": out.extreme},
    )


def scree_payload(eig, title: str) -> ChartPayload:
    pairs = factor.scree_data(eig)
    return ChartPayload("scree", title, [i for i, _ in pairs], {"eigenvalue": [v for _, v in pairs]})


def dendrogram_payload(d: cluster.Dendrogram, title: str) -> ChartPayload:
    return ChartPayload("dendrogram", title, list(range(d.n_leaves)), {"merges": d.to_list()})


def timechart_payload(x: Column, y: Column) -> ChartPayload:
    pairs = [(a, b) for a, b in zip(x.values, y.values) if a is not None and b is not None]
    pairs.sort(key=lambda p: x.rank_key(p[0]))
    return ChartPayload("timechart", f"{y.name} by {x.name}", [p[0] for p in pairs], {y.name: [p[1] for p in pairs]})


# ------------------------------------------------------------------ report


class _Report:
    def __init__(self):
        self.lines: list[str] = []
        self.charts: dict[str, ChartPayload] = {}

    def h(self, level: int, text: str):
        if self.lines and self.lines[-1] != "":
            self.lines.append("")
        self.lines.append("#" * level + " " + text)
        self.lines.append("")

    def p(self, text: str = ""):
        self.lines.append(text)

    def table(self, header, rows):
        self.lines.extend(md_table(header, rows))

    def chart(self, name: str, payload: ChartPayload):
        fname = f"{name}.json"
        if fname in self.charts:
            raise ConfigError(f"two charts would be written as charts/{fname}")
        self.charts[fname] = payload
        self.p(f"Chart data: `charts/{fname}`")


def _slug(text: str) -> str:
    keep = "".join(c if c.isalnum() else "_" for c in text.strip())
    return keep.strip("_").lower() or "chart"


def _profile(rep: _Report, data: Dataset, source: Path, digest: str):
    rep.h(2, "Dataset profile")
    rep.p(f"Input: `{source.name}` (sha256 {digest[:16]}), {data.n} rows, {len(data.names)} columns.")
    rep.p()
    rows = []
    for c in data.columns:
        miss = sum(c.missing)
        rows.append((c.name, c.kind.value, data.n - miss, miss))
    rep.table(("column", "kind", "present", "missing"), rows)


def _frequency_rows(table, key_fmt=str):
    rows = [(key_fmt(r.key), r.n, r.cum_n, r.f, r.cum_f) for r in table]
    rows.append(("**Total**", table.total, "", 1.0 if table.total else 0.0, ""))
    return rows


def _frequencies(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.frequencies
    rep.h(2, "Frequency tables")
    for name in spec.columns:
        col = data[name]
        rep.h(3, name)
        if col.kind is Kind.CONTINUOUS:
            bins = cfg.bins.get(name) or BinSpec.default_for(col.numeric())
            table = binned_frequency_table(col, bins)
            rep.table(("interval", "n", "N", "f", "F"), _frequency_rows(table))
            if "histogram" in spec.charts:
                rep.p()
                rep.chart(f"histogram_{_slug(name)}", histogram_payload(col, bins))
        else:
            table = frequency_table(col)
            rep.table((name, "n", "N", "f", "F"), _frequency_rows(table))
            for kind, build in (("pie", pie_payload), ("bar", bar_payload)):
                if kind in spec.charts:
                    rep.p()
                    rep.chart(f"{kind}_{_slug(name)}", build(col))


def _summary(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.summary
    rep.h(2, "Summary statistics")
    stats = {name: descriptive.summarize(data[name]) for name in spec.columns}
    header = ("statistic", *spec.columns)
    fields = [
        ("n", "n"), ("mean", "mean"), ("median", "median"), ("min", "min"), ("max", "max"),
        ("range", "range"), ("Q1", "q1"), ("Q3", "q3"), ("IQR", "iqr"),
        ("variance (sample)", "variance_sample"), ("variance (population)", "variance_population"),
        ("sd (sample)", "sd_sample"), ("sd (population)", "sd_population"),
    ]
    rows = [(label, *(getattr(stats[c], attr) for c in spec.columns)) for label, attr in fields]
    rows.insert(3, ("mode", *(", ".join(fmt(m) for m in stats[c].modes) or "none" for c in spec.columns)))
    rep.table(header, rows)
    for name in spec.columns:
        col = data[name]
        if col.numeric().size < 4:
            continue
        out = descriptive.classify_outliers(col)
        rep.p()
        rep.p(
            f"Outliers in {name}: inner fences ({fmt(out.inner_fences[0])}, {fmt(out.inner_fences[1])}), "
            f"outer fences ({fmt(out.outer_fences[0])}, {fmt(out.outer_fences[1])}); "
            f"suspected: {', '.join(fmt(v) for v in out.suspected) or 'none'}; "
            f"extreme: {', '.join(fmt(v) for v in out.extreme) or 'none'}."
        )
        if spec.boxplot:
            rep.p()
            rep.chart(f"boxplot_{_slug(name)}", boxplot_payload(col))


def _run_test(t: TestSpec, data: Dataset, alpha: float):
    col = data[t.column]
    if t.kind == "proportion":
        present = [str(v) for v in col.present()]
        k = sum(v == t.success for v in present)
        result = inference.proportion_test(k, len(present), t.p0, t.tail, alpha)
        return result, inference.ci_proportion(k, len(present), t.level)
    x = col.numeric()
    if t.kind == "z_mean":
        result = inference.z_test_mean(descriptive.mean(x), x.size, t.mu0, t.sigma, t.tail, alpha, t.population_size)
        return result, inference.ci_mean(descriptive.mean(x), x.size, t.level, sigma=t.sigma)
    if t.kind == "t_mean":
        return inference.t_test_mean(x, t.mu0, t.tail, alpha), inference.ci_mean_sample(x, t.level)
    if t.kind == "chi2_variance":
        return inference.chi2_test_variance(x, t.sigma0_sq, t.tail, alpha), None
    return inference.f_test_variance_ratio(x, data[t.column_b].numeric(), t.tail, alpha), None


def _tests(rep: _Report, data: Dataset, cfg: PipelineConfig):
    rep.h(2, "Hypothesis tests")
    rows, cis = [], []
    for t in cfg.tests:
        result, ci = _run_test(t, data, cfg.alpha)
        rows.append((t.name, result.name, result.statistic, result.df, result.tail.value, result.p_value,
                     result.alpha, result.decision.value))
        if ci is not None:
            cis.append((t.name, ci.level, ci.lower, ci.upper))
    rep.table(("test", "method", "statistic", "reference", "tail", "p-value", "alpha", "decision"), rows)
    if cis:
        rep.p()
        rep.table(("test", "level", "lower", "upper"), cis)
    errors = inference.error_types(cfg.alpha)
    rep.p()
    rep.p(f"Type I error probability: {fmt(errors.alpha)}; type II error probability: {errors.beta_description}.")


def _complete_matrix(data: Dataset, names: Sequence[str]) -> np.ndarray:
    for n in names:
        if not data[n].kind.numeric:
            raise DataError(f"column {n!r} must be numeric, is {data[n].kind.value}")
    return data.matrix(list(names))


def _regression(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.regression
    m = _complete_matrix(data, (spec.response, *spec.predictors))
    y, x = m[:, 0], m[:, 1:]
    model = regression.fit_ols(x, y)
    table = regression.anova(model)
    rep.h(2, f"Linear regression of {spec.response}")
    rep.p(f"n = {model.n} complete rows, p = {model.p} predictors.")
    rep.p()
    names = ("(intercept)", *spec.predictors)
    try:
        tests = regression.coefficient_tests(model, alpha=cfg.alpha)
        rows = [(names[c.index], c.estimate, c.std_error, c.t_statistic, c.p_value,
                 "Reject" if c.rejected else "FailToReject") for c in tests]
    except DegenerateError:
        rows = [(names[i], b, None, "undefined", "undefined", "-") for i, b in enumerate(model.coefficients)]
    rep.table(("term", "estimate", "std. error", "t", "p-value", "decision (H0: b = 0)"), rows)
    rep.p()
    rep.table(
        ("source", "SS", "DF", "MS", "F", "p-value"),
        [
            ("model", table.ssm, table.dfm, table.msm, table.f_statistic, table.p_value),
            ("error", table.sse, table.dfe, table.mse, "", ""),
            ("total", table.sst, table.dft, "", "", ""),
        ],
    )
    rep.p()
    try:
        rep.p(f"r^2 = {fmt(regression.r_squared(table))}")
    except DegenerateError:
        rep.p("r^2 undefined (constant response)")
    rep.p()
    rep.p("Coefficient t tests hold for each variable one at a time; only the F test is joint.")


def _retain_count(rule: str, eig, p: int) -> int:
    if rule.isdigit():
        m = int(rule)
    elif rule == "all":
        m = factor.retain(eig, factor.AllFactors())
    elif rule == "kaiser":
        m = factor.retain(eig, factor.Kaiser())
    else:
        try:
            threshold = float(rule.split(":", 1)[1])
            m = factor.retain(eig, factor.VarianceExplained(threshold))
        except ValueError as exc:
            raise ConfigError(f"[efa] retain: {exc}") from None
    return max(1, min(m, p - 1))


def _efa(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.efa
    names = spec.columns
    x = _complete_matrix(data, names)
    r = factor.correlation_matrix(x)
    rep.h(2, "Exploratory factor analysis")
    rep.p(f"Correlation matrix of {len(names)} variables over n = {r.n} complete rows.")
    rep.p()
    rep.table(("", *names), [(names[i], *r.r[i]) for i in range(r.p)])
    adequacy = factor.adequacy(r)
    b, k = adequacy.bartlett, adequacy.kmo
    rep.h(3, "Adequacy")
    rep.table(
        ("measure", "value", "detail"),
        [
            ("Bartlett sphericity statistic", b.statistic, f"chi2({b.df})"),
            ("Bartlett p-value", b.p_value, inference.decide(b.p_value, cfg.alpha).value),
            ("KMO (overall)", k.overall, k.band),
            *((f"KMO {n}", v, factor.kmo_band(v)) for n, v in zip(names, k.per_variable)),
        ],
    )
    eig = factor.eigen_symmetric(r)
    rep.h(3, "Eigenvalues")
    rep.table(("factor", "eigenvalue", "share", "cumulative"), factor.variance_table(eig))
    if spec.scree:
        rep.p()
        rep.chart("scree", scree_payload(eig, "scree"))
    m = _retain_count(spec.retain, eig, r.p)
    if spec.extraction == "pca":
        sol = factor.extract_pca(r, m)
    else:
        sol = factor.extract_principal_axis(r, m)
    if spec.rotation != "none":
        sol = factor.rotate(sol, spec.rotation, normalize=spec.normalize)
    rep.h(3, f"Loadings ({sol.extraction}, rotation {sol.rotation}, m = {sol.m})")
    header = ("variable", *(f"F{j + 1}" for j in range(sol.m)), "communality", "specific variance")
    rep.table(header, [(names[i], *sol.loadings[i], sol.communalities[i], sol.specific_variances[i])
                       for i in range(sol.p)])
    rep.p()
    rep.table(("factor", "variance share"), [(f"F{j + 1}", s) for j, s in enumerate(sol.shares)])
    if spec.reliability:
        alpha, band = factor.cronbach_alpha(x)
        rep.p()
        rep.p(f"Cronbach's alpha over {len(names)} items: {fmt(alpha)} ({band}).")


def _cluster(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.cluster
    x = _complete_matrix(data, spec.columns)
    rep.h(2, "Cluster analysis")
    if spec.method == "hierarchical":
        d = cluster.agglomerate(x, spec.linkage, metric=spec.metric)
        rep.p(f"Agglomerative clustering, {spec.linkage.value} linkage, {spec.metric} distance, N = {d.n_leaves}.")
        rep.p()
        rep.table(("step", "a", "b", "height", "new id", "size"),
                  [(i + 1, s.a, s.b, s.height, s.new_id, s.size) for i, s in enumerate(d.steps)])
        labels = cluster.cut(d, spec.k)
        if spec.dendrogram:
            rep.p()
            rep.chart("dendrogram", dendrogram_payload(d, f"{spec.linkage.value} linkage"))
    else:
        init = cluster.FarthestFirst() if spec.init == "farthest" else cluster.SeededRandom(cfg.seed)
        res = cluster.kmeans(x, spec.k, init, spec.max_iter)
        labels = list(res.labels)
        rep.p(f"k-means, k = {spec.k}, init {spec.init}, {res.iterations} iterations, "
              f"converged: {fmt(res.converged)}, WSS = {fmt(res.wss)}.")
        rep.p()
        rep.table(("cluster", *spec.columns), [(j, *c) for j, c in enumerate(res.centroids)])
        rep.p()
        rep.p("WSS by iteration: " + ", ".join(fmt(v) for v in res.history))
    rep.p()
    members: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        members.setdefault(lab, []).append(i + 1)
    rep.table(("cluster", "size", "rows"),
              [(j, len(rows), " ".join(map(str, rows))) for j, rows in sorted(members.items())])
    rep.p()
    rep.p("Rows are numbered among complete cases, starting at 1.")


def _classify(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.classify
    attrs = spec.attributes or tuple(n for n in data.names if n != spec.target)
    sub = Dataset(tuple(data[n] for n in (*attrs, spec.target)))
    labeled = classify.LabeledDataset(sub, spec.target)
    rep.h(2, f"Classification of {spec.target}")
    if spec.method == "oner":
        rule = classify.train_oner(labeled, bins=spec.bins)
        rep.p(f"OneR rule on attribute `{rule.attribute}`; default class {rule.default}; "
              f"training errors {rule.errors}/{rule.n_train} (rate {fmt(rule.error_rate)}).")
        rep.p()
        rep.table((rule.attribute, "predicted class"), rule.describe())
    else:
        errors, scored = classify.knn_training_errors(labeled, spec.k, spec.metric)
        rep.p(f"{spec.k}-nearest-neighbour classifier ({spec.metric}); training errors {errors}/{scored}.")


def _timechart(rep: _Report, data: Dataset, cfg: PipelineConfig):
    spec = cfg.timechart
    rep.h(2, f"Time chart of {spec.y}")
    payload = timechart_payload(data[spec.x], data[spec.y])
    rep.table((spec.x, spec.y), list(zip(payload.labels, payload.series[spec.y])))
    rep.p()
    rep.chart(f"timechart_{_slug(spec.y)}", payload)


def build_report(cfg: PipelineConfig) -> tuple[str, dict[str, ChartPayload]]:
    """Run every requested analysis; returns the Markdown text and the chart payloads by file name."""
    try:
        raw = cfg.input.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read input {cfg.input}: {exc.strerror}") from None
    data = load_csv(cfg.input, schema=dict(cfg.columns) or None)
    for where, name in cfg.referenced_columns():
        if name not in data:
            raise ConfigError(f"[{where}] refers to unknown column {name!r}")
    rep = _Report()
    rep.lines.append("# statkit report")
    rep.p()
    rep.p(f"alpha = {fmt(cfg.alpha)}, seed = {cfg.seed}")
    _profile(rep, data, cfg.input, hashlib.sha256(raw).hexdigest())
    if cfg.frequencies:
        _frequencies(rep, data, cfg)
    if cfg.summary:
        _summary(rep, data, cfg)
    if cfg.tests:
        _tests(rep, data, cfg)
    if cfg.regression:
        _regression(rep, data, cfg)
    if cfg.efa:
        _efa(rep, data, cfg)
    if cfg.cluster:
        _cluster(rep, data, cfg)
    if cfg.classify:
        _classify(rep, data, cfg)
    if cfg.timechart:
        _timechart(rep, data, cfg)
    return "\n".join(rep.lines) + "\n", rep.charts


def run(cfg: PipelineConfig) -> Path:
    """Write ``report.md`` and ``charts/*.json`` under ``cfg.out``; returns the report path."""
    text, charts = build_report(cfg)
    out = Path(cfg.out)
    chart_dir = out / "charts"
    chart_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(charts):
        (chart_dir / name).write_text(charts[name].to_json(), encoding="utf-8")
    path = out / "report.md"
    path.write_text(text, encoding="utf-8")
    return path
