import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_oner_error, majority_error
from statkit.classify import (
    LabeledDataset, MissingValueWarning, equal_frequency_cuts, knn_predict, knn_training_errors, predict_oner,
    train_oner,
)
from statkit.dataset import Column, Dataset, Kind
from statkit.errors import DataError


def labeled(columns, labels):
    cols = [Column(name, kind, tuple(vals)) for name, kind, vals in columns]
    cols.append(Column("y", Kind.NOMINAL, tuple(labels)))
    return LabeledDataset(Dataset(tuple(cols)), "y")


WEATHER = labeled(
    [
        ("outlook", Kind.NOMINAL, ["sun", "sun", "cloud", "rain", "rain", "rain", "cloud", "sun", "sun", "rain"]),
        ("windy", Kind.NOMINAL, ["no", "yes", "no", "no", "no", "yes", "yes", "no", "no", "no"]),
    ],
    ["no", "no", "yes", "yes", "yes", "no", "yes", "no", "yes", "yes"],
)


def test_oner_picks_lowest_error_attribute():
    rule = train_oner(WEATHER)
    cols = [WEATHER.data["outlook"].values, WEATHER.data["windy"].values]
    assert rule.errors == brute_force_oner_error(cols, WEATHER.labels)
    assert rule.attribute == "outlook"
    assert dict(rule.mapping) == {"sun": "no", "cloud": "yes", "rain": "yes"}
    assert rule.error_rate == pytest.approx(0.2)
    assert predict_oner(rule, {"outlook": "cloud"}) == "yes"
    assert predict_oner(rule, {"outlook": "fog"}) == rule.default


def test_attribute_ties_go_to_fewer_values_then_column_order():
    data = labeled(
        [("many", Kind.NOMINAL, ["a", "b", "c", "d"]), ("two", Kind.NOMINAL, ["p", "p", "q", "q"])],
        ["x", "x", "z", "z"],
    )
    assert train_oner(data).attribute == "two"
    data = labeled(
        [("first", Kind.NOMINAL, ["p", "p", "q", "q"]), ("second", Kind.NOMINAL, ["r", "r", "s", "s"])],
        ["x", "x", "z", "z"],
    )
    assert train_oner(data).attribute == "first"


def test_bucket_ties_prefer_globally_frequent_class():
    data = labeled([("a", Kind.NOMINAL, ["u", "u", "v", "v", "v"])], ["b", "c", "c", "c", "c"])
    assert train_oner(data).mapping["u"] == "c"


def test_numeric_attribute_is_binned():
    assert equal_frequency_cuts([1, 2, 3, 4, 5, 6, 7, 8], 4) == (2.5, 4.5, 6.5)
    assert equal_frequency_cuts([1, 1, 1, 1, 2, 2], 3) == (1.5,)
    data = labeled([("x", Kind.CONTINUOUS, [0.1, 0.2, 0.3, 0.4, 5.1, 5.2, 5.3, 5.4])], list("aaaabbbb"))
    rule = train_oner(data, bins=2)
    assert rule.cuts == (2.75,) and rule.errors == 0
    assert predict_oner(rule, {"x": 2.75}) == "a" and predict_oner(rule, {"x": 3.0}) == "b"
    assert rule.describe() == [("<= 2.75", "a"), ("> 2.75", "b")]


def test_missing_values():
    data = labeled([("a", Kind.NOMINAL, ["u", None, "v", "v"])], ["p", "p", "q", "q"])
    with pytest.warns(MissingValueWarning):
        rule = train_oner(data)
    assert rule.errors == 0  # the missing row is scored with the default class "p"
    with pytest.warns(MissingValueWarning):
        assert predict_oner(rule, {"a": None}) == rule.default
    with pytest.raises(DataError):
        train_oner(labeled([("a", Kind.NOMINAL, [None, None])], ["p", "q"]))


def test_labeled_dataset_validation():
    with pytest.raises(DataError):
        LabeledDataset(WEATHER.data, "nope")
    cols = (Column("x", Kind.DISCRETE, (1, 2)), Column("y", Kind.DISCRETE, (0, 1)))
    with pytest.raises(DataError):
        LabeledDataset(Dataset(cols), "y")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.integers(4, 14))
def test_oner_is_optimal_and_beats_majority(seed, n_classes, n):
    rng = np.random.default_rng(seed)
    cols = [[f"v{int(v)}" for v in rng.integers(0, 3, n)] for _ in range(2)]
    labels = [f"c{int(v)}" for v in rng.integers(0, n_classes, n)]
    data = labeled([(f"a{i}", Kind.NOMINAL, c) for i, c in enumerate(cols)], labels)
    rule = train_oner(data)
    assert rule.errors == brute_force_oner_error(cols, labels)
    assert rule.errors <= majority_error(labels)


POINTS = labeled(
    [("x", Kind.CONTINUOUS, [0.0, 0.2, 1.0, 5.0, 5.5, 6.0]), ("z", Kind.CONTINUOUS, [0.0, 0.1, 0.0, 5.0, 5.2, 4.8])],
    ["a", "a", "a", "b", "b", "b"],
)


def test_knn_basic():
    assert knn_predict(POINTS, {"x": 0.1, "z": 0.1}) == "a"
    assert knn_predict(POINTS, [5.2, 5.0], k=3) == "b"
    assert knn_predict(POINTS, [0.0, 0.0], k=3, metric="manhattan") == "a"
    assert knn_training_errors(POINTS, k=1) == (0, 6)


def test_knn_vote_tie_goes_to_closer_class():
    train = labeled([("x", Kind.CONTINUOUS, [0.0, 3.0])], ["far", "near"])
    assert knn_predict(train, [2.0], k=2) == "near"
    assert knn_predict(train, [1.5], k=2) == "far"  # equal spread: label order


def test_knn_errors():
    with pytest.raises(DataError):
        knn_predict(POINTS, [1.0], k=1)
    with pytest.raises(DataError):
        knn_predict(POINTS, [1.0, 1.0], k=7)
    with pytest.raises(DataError):
        knn_predict(WEATHER, ["sun", "no"])
    with pytest.raises(DataError):
        knn_predict(POINTS, {"x": None, "z": 1.0})


def test_knn_skips_incomplete_training_rows():
    train = labeled([("x", Kind.CONTINUOUS, [0.0, None, 10.0])], ["a", "b", "c"])
    assert knn_predict(train, [1.0]) == "a"
    assert knn_training_errors(train) == (0, 2)
