"""Pipeline configuration read from an INI file.

Layout (every section but ``[input]`` is optional)::

    [input]
    path = data/heights.csv          ; relative to the config file

    [columns]                        ; kind overrides
    height = continuous
    grade = ordinal: low, mid, high

    [analysis]
    alpha = 0.05
    seed = 0
    out = out/heights                ; relative to the config file

    [bins]                           ; lower, width, count
    height = 1.50, 0.05, 7

    [frequencies]
    columns = height
    charts = histogram               ; pie, bar, histogram

    [summary]
    columns = age
    boxplot = yes

    [test ages_vs_21]
    kind = t_mean                    ; z_mean, t_mean, chi2_variance, f_ratio, proportion
    column = age
    mu0 = 21
    tail = two

    [regression]
    response = y
    predictors = x1, x2

    [efa]
    columns = a, b, c, d
    extraction = pca                 ; pca, principal_axis
    retain = kaiser                  ; kaiser, variance:0.8, all, or a count
    rotation = varimax               ; varimax, quartimax, none
    reliability = yes

    [cluster]
    columns = x, y
    method = hierarchical            ; hierarchical, kmeans
    linkage = ward
    k = 2

    [classify]
    target = label
    method = oner                    ; oner, knn

    [timechart]
    x = year
    y = accidents
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .cluster import Linkage, parse_distance
from .dataset import BinSpec
from .errors import ConfigError
from .inference import Tail

TEST_KINDS = ("z_mean", "t_mean", "chi2_variance", "f_ratio", "proportion")
SEED_ENV = "STATKIT_SEED"


@dataclass(frozen=True)
class FrequencySpec:
    columns: tuple[str, ...]
    charts: tuple[str, ...] = ()


@dataclass(frozen=True)
class SummarySpec:
    columns: tuple[str, ...]
    boxplot: bool = False


@dataclass(frozen=True)
class TestSpec:
    name: str
    kind: str
    column: str
    tail: Tail = Tail.TWO
    level: float = 0.95
    mu0: float | None = None
    sigma: float | None = None
    population_size: int | None = None
    sigma0_sq: float | None = None
    column_b: str | None = None
    success: str | None = None
    p0: float | None = None

    __test__ = False

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.column,) if self.column_b is None else (self.column, self.column_b)


@dataclass(frozen=True)
class RegressionSpec:
    response: str
    predictors: tuple[str, ...]


@dataclass(frozen=True)
class EfaSpec:
    columns: tuple[str, ...]
    extraction: str = "pca"
    retain: str = "kaiser"
    rotation: str = "varimax"
    normalize: bool = True
    reliability: bool = False
    scree: bool = True


@dataclass(frozen=True)
class ClusterSpec:
    columns: tuple[str, ...]
    method: str = "hierarchical"
    linkage: Linkage = Linkage.WARD
    metric: str = "euclidean"
    k: int = 2
    init: str = "farthest"
    max_iter: int = 100
    dendrogram: bool = True


@dataclass(frozen=True)
class ClassifySpec:
    target: str
    method: str = "oner"
    attributes: tuple[str, ...] = ()
    bins: int = 4
    k: int = 1
    metric: str = "euclidean"


@dataclass(frozen=True)
class TimechartSpec:
    x: str
    y: str


@dataclass(frozen=True)
class PipelineConfig:
    input: Path
    out: Path
    alpha: float = 0.05
    seed: int = 0
    columns: Mapping[str, str] = field(default_factory=dict)
    bins: Mapping[str, BinSpec] = field(default_factory=dict)
    frequencies: FrequencySpec | None = None
    summary: SummarySpec | None = None
    tests: tuple[TestSpec, ...] = ()
    regression: RegressionSpec | None = None
    efa: EfaSpec | None = None
    cluster: ClusterSpec | None = None
    classify: ClassifySpec | None = None
    timechart: TimechartSpec | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")

    def referenced_columns(self) -> list[tuple[str, str]]:
        """(where, column) pairs for every column named in the config."""
        refs = [("columns", c) for c in self.columns] + [("bins", c) for c in self.bins]
        if self.frequencies:
            refs += [("frequencies", c) for c in self.frequencies.columns]
        if self.summary:
            refs += [("summary", c) for c in self.summary.columns]
        for t in self.tests:
            refs += [(f"test {t.name}", c) for c in t.columns]
        if self.regression:
            refs += [("regression", c) for c in (self.regression.response, *self.regression.predictors)]
        if self.efa:
            refs += [("efa", c) for c in self.efa.columns]
        if self.cluster:
            refs += [("cluster", c) for c in self.cluster.columns]
        if self.classify:
            refs += [("classify", c) for c in (self.classify.target, *self.classify.attributes)]
        if self.timechart:
            refs += [("timechart", self.timechart.x), ("timechart", self.timechart.y)]
        return refs


# ------------------------------------------------------------------ parsing

_ALLOWED = {
    "input": {"path"},
    "analysis": {"alpha", "seed", "out"},
    "frequencies": {"columns", "charts"},
    "summary": {"columns", "boxplot"},
    "regression": {"response", "predictors"},
    "efa": {"columns", "extraction", "retain", "rotation", "normalize", "reliability", "scree"},
    "cluster": {"columns", "method", "linkage", "metric", "k", "init", "max_iter", "dendrogram"},
    "classify": {"target", "method", "attributes", "bins", "k", "metric"},
    "timechart": {"x", "y"},
    "test": {"kind", "column", "tail", "level", "mu0", "sigma", "population_size", "sigma0_sq",
             "column_b", "success", "p0"},
}
_FREE_KEYS = {"columns", "bins"}  # keys are column names


class _Section:
    def __init__(self, name: str, items: Mapping[str, str]):
        self.name = name
        self.items = dict(items)

    def _raw(self, key):
        return self.items.get(key)

    def str(self, key, default=None, required=False):
        v = self._raw(key)
        if v is None or v.strip() == "":
            if required:
                raise ConfigError(f"[{self.name}] needs '{key}'")
            return default
        return v.strip()

    def list(self, key, required=False):
        v = self.str(key, required=required)
        return tuple(x.strip() for x in v.split(",") if x.strip()) if v else ()

    def _convert(self, key, conv, default, required):
        v = self.str(key, required=required)
        if v is None:
            return default
        try:
            return conv(v)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} = {v!r} is not a valid {conv.__name__}") from None

    def float(self, key, default=None, required=False):
        return self._convert(key, float, default, required)

    def int(self, key, default=None, required=False):
        return self._convert(key, int, default, required)

    def bool(self, key, default=False):
        v = self.str(key)
        if v is None:
            return default
        low = v.lower()
        if low in ("1", "yes", "true", "on"):
            return True
        if low in ("0", "no", "false", "off"):
            return False
        raise ConfigError(f"[{self.name}] {key} = {v!r} is not a yes/no value")


def _choice(section: _Section, key: str, options, default):
    v = section.str(key, default)
    v = v.lower()
    if v not in options:
        raise ConfigError(f"[{section.name}] {key} must be one of {', '.join(options)}; got {v!r}")
    return v


def _parse_bins(text: str, column: str) -> BinSpec:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"[bins] {column}: expected 'lower, width, count', got {text!r}")
    try:
        return BinSpec(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"[bins] {column}: {exc}") from None


def _parse_test(name: str, s: _Section) -> TestSpec:
    kind = _choice(s, "kind", TEST_KINDS, None) if s.str("kind") else None
    if kind is None:
        raise ConfigError(f"[test {name}] needs 'kind' ({', '.join(TEST_KINDS)})")
    try:
        tail = Tail.parse(s.str("tail", "two"))
    except ValueError as exc:
        raise ConfigError(f"[test {name}] {exc}") from None
    spec = TestSpec(
        name=name,
        kind=kind,
        column=s.str("column", required=True),
        tail=tail,
        level=s.float("level", 0.95),
        mu0=s.float("mu0"),
        sigma=s.float("sigma"),
        population_size=s.int("population_size"),
        sigma0_sq=s.float("sigma0_sq"),
        column_b=s.str("column_b"),
        success=s.str("success"),
        p0=s.float("p0"),
    )
    needs = {
        "z_mean": ("mu0", "sigma"),
        "t_mean": ("mu0",),
        "chi2_variance": ("sigma0_sq",),
        "f_ratio": ("column_b",),
        "proportion": ("success", "p0"),
    }[kind]
    missing = [k for k in needs if getattr(spec, k) is None]
    if missing:
        raise ConfigError(f"[test {name}] kind {kind} needs {', '.join(missing)}")
    if not 0 < spec.level < 1:
        raise ConfigError(f"[test {name}] level must lie in (0, 1)")
    return spec


def parse_config(text: str, base_dir: Path | str = ".", env: Mapping[str, str] | None = None) -> PipelineConfig:
    """Build a ``PipelineConfig`` from INI text; relative paths resolve against ``base_dir``.

    ``STATKIT_SEED`` in ``env`` overrides ``[analysis] seed``.
    """
    base_dir = Path(base_dir)
    env = os.environ if env is None else env
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # column names are case-sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {str(exc).splitlines()[0]}") from None

    sections: dict[str, _Section] = {}
    tests = []
    for raw_name in parser.sections():
        items = dict(parser.items(raw_name))
        kind, _, label = raw_name.partition(" ")
        if kind == "test":
            if not label.strip():
                raise ConfigError("[test] sections need a name, e.g. [test ages]")
            allowed = _ALLOWED["test"]
        elif kind in _FREE_KEYS and not label:
            allowed = None
        elif kind in _ALLOWED and not label:
            allowed = _ALLOWED[kind]
        else:
            raise ConfigError(f"unknown section [{raw_name}]")
        if allowed is not None:
            unknown = sorted(set(items) - allowed)
            if unknown:
                raise ConfigError(f"[{raw_name}] unknown key(s): {', '.join(unknown)}")
        section = _Section(raw_name, items)
        if kind == "test":
            tests.append(_parse_test(label.strip(), section))
        else:
            sections[kind] = section

    if "input" not in sections:
        raise ConfigError("config needs an [input] section with 'path'")
    inp = Path(os.path.normpath(base_dir / sections["input"].str("path", required=True)))
    analysis = sections.get("analysis", _Section("analysis", {}))
    out = Path(os.path.normpath(base_dir / analysis.str("out", "statkit-out")))
    seed = analysis.int("seed", 0)
    if env.get(SEED_ENV, "").strip():
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env[SEED_ENV]!r} is not an integer") from None

    names = [t.name for t in tests]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate [test NAME] sections")

    columns = dict(sections["columns"].items) if "columns" in sections else {}
    bins = {c: _parse_bins(v, c) for c, v in sections["bins"].items.items()} if "bins" in sections else {}

    freq = summary = reg = efa = clus = cls = tc = None
    if "frequencies" in sections:
        s = sections["frequencies"]
        charts = tuple(c.lower() for c in s.list("charts"))
        bad = sorted(set(charts) - {"pie", "bar", "histogram"})
        if bad:
            raise ConfigError(f"[frequencies] unknown chart kind(s): {', '.join(bad)}")
        freq = FrequencySpec(s.list("columns", required=True), charts)
    if "summary" in sections:
        s = sections["summary"]
        summary = SummarySpec(s.list("columns", required=True), s.bool("boxplot"))
    if "regression" in sections:
        s = sections["regression"]
        reg = RegressionSpec(s.str("response", required=True), s.list("predictors", required=True))
    if "efa" in sections:
        s = sections["efa"]
        retain = s.str("retain", "kaiser").lower()
        if not (retain in ("kaiser", "all") or retain.startswith("variance:") or retain.isdigit()):
            raise ConfigError(f"[efa] retain must be kaiser, all, variance:T or a count; got {retain!r}")
        efa = EfaSpec(
            columns=s.list("columns", required=True),
            extraction=_choice(s, "extraction", ("pca", "principal_axis"), "pca"),
            retain=retain,
            rotation=_choice(s, "rotation", ("varimax", "quartimax", "none"), "varimax"),
            normalize=s.bool("normalize", True),
            reliability=s.bool("reliability", False),
            scree=s.bool("scree", True),
        )
    if "cluster" in sections:
        s = sections["cluster"]
        try:
            linkage = Linkage.parse(s.str("linkage", "ward"))
            metric = s.str("metric", "euclidean")
            parse_distance(metric)
        except ValueError as exc:
            raise ConfigError(f"[cluster] {exc}") from None
        clus = ClusterSpec(
            columns=s.list("columns", required=True),
            method=_choice(s, "method", ("hierarchical", "kmeans"), "hierarchical"),
            linkage=linkage,
            metric=metric,
            k=s.int("k", 2),
            init=_choice(s, "init", ("farthest", "random"), "farthest"),
            max_iter=s.int("max_iter", 100),
            dendrogram=s.bool("dendrogram", True),
        )
    if "classify" in sections:
        s = sections["classify"]
        try:
            metric = s.str("metric", "euclidean")
            parse_distance(metric)
        except ValueError as exc:
            raise ConfigError(f"[classify] {exc}") from None
        cls = ClassifySpec(
            target=s.str("target", required=True),
            method=_choice(s, "method", ("oner", "knn"), "oner"),
            attributes=s.list("attributes"),
            bins=s.int("bins", 4),
            k=s.int("k", 1),
            metric=metric,
        )
    if "timechart" in sections:
        s = sections["timechart"]
        tc = TimechartSpec(s.str("x", required=True), s.str("y", required=True))

    return PipelineConfig(
        input=inp,
        out=out,
        alpha=analysis.float("alpha", 0.05),
        seed=seed,
        columns=columns,
        bins=bins,
        frequencies=freq,
        summary=summary,
        tests=tuple(tests),
        regression=reg,
        efa=efa,
        cluster=clus,
        classify=cls,
        timechart=tc,
    )


def load_config(path: Path | str, env: Mapping[str, str] | None = None) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path.parent, env)
