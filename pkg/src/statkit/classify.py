"""OneR rule induction and instance-based nearest-neighbour classification."""

from __future__ import annotations

import bisect
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .cluster import DistanceKind, Euclidean, distance, parse_distance
from .dataset import Dataset
from .errors import DataError


class MissingValueWarning(UserWarning):
    """A missing attribute value fell back to the default class."""


@dataclass(frozen=True)
class LabeledDataset:
    data: Dataset
    target: str

    def __post_init__(self):
        if self.target not in self.data:
            raise DataError(f"class column {self.target!r} not in dataset")
        col = self.data[self.target]
        if not col.kind.categorical:
            raise DataError(f"class column {self.target!r} must be nominal or ordinal, is {col.kind.value}")
        if self.data.n < 2:
            raise DataError("classification needs at least 2 rows")
        if any(col.missing):
            raise DataError(f"class column {self.target!r} has missing labels")

    @property
    def attributes(self) -> list[str]:
        return [n for n in self.data.names if n != self.target]

    @property
    def labels(self) -> list[str]:
        return list(self.data[self.target].values)

    @property
    def classes(self) -> list[str]:
        return sorted(set(self.labels))


def _label_order(labels: Sequence[str]) -> list[str]:
    """Classes from most to least frequent, ties in label order."""
    counts = Counter(labels)
    return sorted(counts, key=lambda c: (-counts[c], c))


@dataclass(frozen=True)
class OneRRule:
    attribute: str
    mapping: Mapping[Any, str]  # attribute value (or bin index) -> class
    default: str
    errors: int
    n_train: int
    cuts: tuple[float, ...] | None = None  # bin boundaries for a numeric attribute

    @property
    def error_rate(self) -> float:
        return self.errors / self.n_train

    def key_for(self, value) -> Any:
        if self.cuts is None:
            return value
        return bisect.bisect_left(self.cuts, float(value))

    def bin_label(self, index: int) -> str:
        cuts = self.cuts or ()
        if not cuts:
            return "all"
        if index == 0:
            return f"<= {cuts[0]:g}"
        if index == len(cuts):
            return f"> {cuts[-1]:g}"
        return f"]{cuts[index - 1]:g}, {cuts[index]:g}]"

    def describe(self) -> list[tuple[str, str]]:
        keys = sorted(self.mapping, key=lambda k: (str(type(k)), k))
        if self.cuts is None:
            return [(str(k), self.mapping[k]) for k in keys]
        return [(self.bin_label(k), self.mapping[k]) for k in keys]


def equal_frequency_cuts(values: Sequence[float], bins: int) -> tuple[float, ...]:
    """Cut points splitting the sorted values into ``bins`` groups of near-equal size.

    A cut sits midway between neighbouring order statistics; cuts that would
    split a run of equal values collapse, so fewer bins may result.
    """
    if bins < 1:
        raise DataError("bin count must be >= 1")
    x = sorted(float(v) for v in values)
    n = len(x)
    cuts = []
    for i in range(1, bins):
        pos = round(i * n / bins)
        if 0 < pos < n and x[pos - 1] != x[pos]:
            c = (x[pos - 1] + x[pos]) / 2
            if not cuts or c > cuts[-1]:
                cuts.append(c)
    return tuple(cuts)


def _fit_attribute(keys: list, labels: list[str], preference: list[str], default: str):
    rank = {c: i for i, c in enumerate(preference)}
    buckets: dict[Any, Counter] = {}
    for k, y in zip(keys, labels):
        if k is not None:
            buckets.setdefault(k, Counter())[y] += 1
    mapping = {k: min(cnt, key=lambda c: (-cnt[c], rank[c])) for k, cnt in buckets.items()}
    errors = sum((mapping[k] if k is not None else default) != y for k, y in zip(keys, labels))
    return mapping, errors


def train_oner(data: LabeledDataset, bins: int = 4) -> OneRRule:
    """Pick the single attribute whose value-to-majority-class rule has the fewest training errors.

    Numeric attributes are first split into ``bins`` equal-frequency bins.
    Ties go to the attribute with fewer distinct values, then to column order.
    Missing attribute values predict the overall majority class.
    """
    attrs = data.attributes
    if not attrs:
        raise DataError("OneR needs at least one attribute besides the class column")
    labels = data.labels
    preference = _label_order(labels)
    default = preference[0]
    best = None
    for order, name in enumerate(attrs):
        col = data.data[name]
        if all(col.missing):
            raise DataError(f"attribute {name!r} is entirely missing")
        if any(col.missing):
            warnings.warn(
                f"attribute {name!r} has missing values; those rows are scored with the default class",
                MissingValueWarning,
                stacklevel=2,
            )
        cuts = None
        if col.kind.numeric:
            cuts = equal_frequency_cuts(col.numeric(), bins)
            keys = [None if v is None else bisect.bisect_left(cuts, float(v)) for v in col.values]
        else:
            keys = list(col.values)
        mapping, errors = _fit_attribute(keys, labels, preference, default)
        score = (errors, len(mapping), order)
        if best is None or score < best[0]:
            best = (score, OneRRule(name, mapping, default, errors, len(labels), cuts))
    return best[1]


def predict_oner(rule: OneRRule, row: Mapping[str, Any]) -> str:
    """Class for one row; unseen values and missing values get the default class."""
    if rule.attribute not in row:
        raise DataError(f"row lacks attribute {rule.attribute!r}")
    value = row[rule.attribute]
    if value is None:
        warnings.warn(f"missing {rule.attribute!r}; predicting default class", MissingValueWarning, stacklevel=2)
        return rule.default
    return rule.mapping.get(rule.key_for(value), rule.default)


def _numeric_attributes(train: LabeledDataset) -> list[str]:
    attrs = train.attributes
    if not attrs:
        raise DataError("nearest neighbour needs at least one attribute")
    bad = [a for a in attrs if not train.data[a].kind.numeric]
    if bad:
        raise DataError(f"nearest neighbour needs numeric attributes; non-numeric: {bad}")
    return attrs


def knn_predict(
    train: LabeledDataset,
    row: Mapping[str, Any] | Sequence[float],
    k: int = 1,
    metric: DistanceKind | str = Euclidean(),
) -> str:
    """Majority class among the ``k`` nearest training rows.

    Vote ties go to the class with the smaller summed distance, then label
    order. Training rows with a missing attribute are skipped.
    """
    attrs = _numeric_attributes(train)
    metric = parse_distance(metric)
    if isinstance(row, Mapping):
        query = [row.get(a) for a in attrs]
    else:
        query = list(row)
        if len(query) != len(attrs):
            raise DataError(f"query has {len(query)} values for {len(attrs)} attributes")
    if any(v is None for v in query):
        raise DataError("query row has missing attribute values")
    q = np.array(query, dtype=float)
    labels = train.labels
    cols = [train.data[a].values for a in attrs]
    rows = [
        (np.array([c[i] for c in cols], dtype=float), labels[i])
        for i in range(train.data.n)
        if all(c[i] is not None for c in cols)
    ]
    if not rows:
        raise DataError("no complete training rows")
    if not 1 <= k <= len(rows):
        raise DataError(f"k must lie in [1, {len(rows)}], got {k}")
    dists = sorted(((distance(x, q, metric), i, y) for i, (x, y) in enumerate(rows)))
    nearest = dists[:k]
    votes = Counter(y for _, _, y in nearest)
    spread = Counter()
    for d, _, y in nearest:
        spread[y] += d
    return min(votes, key=lambda c: (-votes[c], spread[c], c))



def knn_training_errors(train: LabeledDataset, k: int = 1, metric: DistanceKind | str = Euclidean()) -> tuple[int, int]:
    """(misclassified, scored) when every complete training row is predicted from the full training set."""
    attrs = _numeric_attributes(train)
    labels = train.labels
    errors = scored = 0
    for i in range(train.data.n):
        row = train.data.row(i)
        if any(row[a] is None for a in attrs):
            continue
        scored += 1
        errors += knn_predict(train, row, k, metric) != labels[i]
    return errors, scored
