"""Typed tabular data: columns, CSV ingestion and frequency tables.

Missing cells are stored as ``None`` and are excluded from every count and
statistic computed downstream.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError


class Kind(enum.Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"

    @property
    def numeric(self) -> bool:
        return self in (Kind.DISCRETE, Kind.CONTINUOUS)

    @property
    def categorical(self) -> bool:
        return not self.numeric


def parse_kind(text: str) -> tuple[Kind, tuple[str, ...] | None]:
    """Parse a kind declaration such as ``"continuous"`` or ``"ordinal: low, mid, high"``.

    Returns the kind and, for ordinal kinds, the ordered level labels.
    """
    head, _, tail = text.partition(":")
    try:
        kind = Kind(head.strip().lower())
    except ValueError:
        raise DataError(f"unknown variable kind {head.strip()!r}") from None
    levels = None
    if kind is Kind.ORDINAL:
        levels = tuple(s.strip() for s in tail.split(",") if s.strip())
        if not levels:
            raise DataError("ordinal kind needs its ordered levels, e.g. 'ordinal: low, mid, high'")
    elif tail.strip():
        raise DataError(f"only ordinal kinds take levels, got {text!r}")
    return kind, levels


@dataclass(frozen=True)
class Column:
    """One named variable.

    ``values`` holds ``None`` for missing cells, ``str`` labels for nominal and
    ordinal columns, ``int`` for discrete and ``float`` for continuous columns.
    """

    name: str
    kind: Kind
    values: tuple
    levels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.kind is Kind.ORDINAL:
            if not self.levels:
                raise DataError(f"ordinal column {self.name!r} needs levels")
            object.__setattr__(self, "levels", tuple(self.levels))
            if len(set(self.levels)) != len(self.levels):
                raise DataError(f"duplicate levels in ordinal column {self.name!r}")
        elif self.levels is not None:
            raise DataError(f"column {self.name!r}: levels are only allowed for ordinal columns")
        for v in self.values:
            if v is None:
                continue
            if self.kind.numeric:
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                    raise DataError(f"column {self.name!r}: non-finite or non-numeric value {v!r}")
                if self.kind is Kind.DISCRETE and float(v) != int(v):
                    raise DataError(f"column {self.name!r}: discrete column holds fractional value {v!r}")
            elif self.kind is Kind.ORDINAL and v not in self.levels:
                raise DataError(f"column {self.name!r}: {v!r} is not one of the levels {self.levels}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def missing(self) -> tuple[bool, ...]:
        return tuple(v is None for v in self.values)

    def present(self) -> list:
        """Non-missing values in original order."""
        return [v for v in self.values if v is not None]

    def numeric(self) -> np.ndarray:
        """Non-missing values as a float array; only allowed for numeric kinds."""
        if not self.kind.numeric:
            raise DataError(f"column {self.name!r} is {self.kind.value}; arithmetic needs a numeric column")
        return np.array([float(v) for v in self.values if v is not None], dtype=float)

    def rank_key(self, value):
        """Sort key giving the column's natural order (level index for ordinals)."""
        if self.kind is Kind.ORDINAL:
            return self.levels.index(value)
        return value

    @classmethod
    def from_values(cls, name: str, values: Iterable, kind: Kind | None = None, levels=None) -> "Column":
        """Build a column, inferring the kind when not given."""
        values = list(values)
        if kind is None:
            kind = infer_kind([None if v is None else str(v) for v in values])
        return cls(name, kind, tuple(_coerce(v, kind, name) for v in values), levels)


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        if len({len(c) for c in self.columns}) > 1:
            raise DataError("all columns must have the same length")

    @property
    def n(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def __getitem__(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def row(self, i: int) -> dict[str, Any]:
        return {c.name: c.values[i] for c in self.columns}

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        """Complete-case float matrix over the given numeric columns."""
        cols = [self[n] for n in names]
        for c in cols:
            if not c.kind.numeric:
                raise DataError(f"column {c.name!r} is not numeric")
        rows = [
            [float(c.values[i]) for c in cols]
            for i in range(self.n)
            if all(c.values[i] is not None for c in cols)
        ]
        return np.array(rows, dtype=float).reshape(len(rows), len(cols))


# ---------------------------------------------------------------- CSV


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def _is_float(s: str) -> bool:
    try:
        return math.isfinite(float(s))
    except ValueError:
        return False


def infer_kind(cells: Sequence[str | None]) -> Kind:
    """Discrete if every cell is an integer, else continuous if all are reals, else nominal."""
    present = [c for c in cells if c is not None]
    if present and all(_is_int(c) for c in present):
        return Kind.DISCRETE
    if present and all(_is_float(c) for c in present):
        return Kind.CONTINUOUS
    return Kind.NOMINAL


def _coerce(cell, kind: Kind, name: str):
    if cell is None:
        return None
    try:
        if kind is Kind.DISCRETE:
            if isinstance(cell, str):
                return int(cell) if _is_int(cell) else _integral(float(cell))
            return _integral(cell)
        if kind is Kind.CONTINUOUS:
            out = float(cell)
            if not math.isfinite(out):
                raise ValueError
            return out
    except (ValueError, TypeError):
        raise DataError(f"column {name!r}: {cell!r} is not a valid {kind.value} value") from None
    return str(cell)


def _integral(x) -> int:
    if float(x) != int(x):
        raise ValueError
    return int(x)


SchemaEntry = Kind | str | tuple


def _schema_entry(entry: SchemaEntry) -> tuple[Kind, tuple[str, ...] | None]:
    if isinstance(entry, Kind):
        return entry, None
    if isinstance(entry, str):
        return parse_kind(entry)
    kind, levels = entry
    kind = kind if isinstance(kind, Kind) else Kind(kind)
    return kind, tuple(levels) if levels is not None else None


def load_csv(path: str | Path, schema: Mapping[str, SchemaEntry] | None = None) -> Dataset:
    """Read a UTF-8, comma-separated file with a header row.

    ``schema`` maps column names to a :class:`Kind`, a declaration string
    accepted by :func:`parse_kind`, or a ``(kind, levels)`` pair. Columns not
    in the schema have their kind inferred. Empty cells are missing.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: missing header row")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]  # blank trailing lines
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
    schema = dict(schema or {})
    unknown = set(schema) - set(header)
    if unknown:
        raise DataError(f"schema names not in header: {sorted(unknown)}")

    columns = []
    for j, name in enumerate(header):
        cells = [r[j].strip() or None for r in body]
        if name in schema:
            kind, levels = _schema_entry(schema[name])
        else:
            kind, levels = infer_kind(cells), None
        columns.append(Column(name, kind, tuple(_coerce(c, kind, name) for c in cells), levels))
    return Dataset(tuple(columns))


# ---------------------------------------------------------------- frequency tables


@dataclass(frozen=True, order=True)
class Interval:
    """Left-open, right-closed interval ``]lo, hi]``."""

    lo: float
    hi: float
    decimals: int = field(default=2, compare=False)
    closed_left: bool = field(default=False, compare=False)

    def __str__(self) -> str:
        left = "[" if self.closed_left else "]"
        return f"{left}{self.lo:.{self.decimals}f}, {self.hi:.{self.decimals}f}]"

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class FrequencyRow:
    key: Any
    n: int
    cum_n: int
    f: float
    cum_f: float


@dataclass(frozen=True)
class FrequencyTable:
    rows: tuple[FrequencyRow, ...]
    total: int

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    @property
    def keys(self) -> list:
        return [r.key for r in self.rows]

    @property
    def counts(self) -> list[int]:
        return [r.n for r in self.rows]

    def as_tuples(self) -> list[tuple]:
        return [(r.key, r.n, r.cum_n, r.f, r.cum_f) for r in self.rows]


def _build_table(keys: Sequence, counts: Sequence[int]) -> FrequencyTable:
    total = sum(counts)
    rows, cum = [], 0
    for key, n in zip(keys, counts):
        cum += n
        rows.append(FrequencyRow(key, n, cum, n / total if total else 0.0, cum / total if total else 0.0))
    return FrequencyTable(tuple(rows), total)


def frequency_table(col: Column) -> FrequencyTable:
    """Counts, cumulative counts and relative frequencies per distinct value.

    Nominal rows are ordered by descending count, then first appearance;
    ordinal and discrete rows follow the natural order of their values.
    """
    if col.kind is Kind.CONTINUOUS:
        raise DataError(f"column {col.name!r} is continuous; bin it with binned_frequency_table")
    present = col.present()
    counts = Counter(present)
    if col.kind is Kind.NOMINAL:
        first = {}
        for i, v in enumerate(present):
            first.setdefault(v, i)
        keys = sorted(counts, key=lambda v: (-counts[v], first[v]))
    else:
        keys = sorted(counts, key=col.rank_key)
    return _build_table(keys, [counts[k] for k in keys])


def _decimals(x: float) -> int:
    text = repr(float(x))
    if "e" in text or "E" in text:
        return 6
    frac = text.split(".")[1] if "." in text else ""
    return 0 if frac == "0" else len(frac)


@dataclass(frozen=True)
class BinSpec:
    """``count`` contiguous intervals ``]lower + i*width, lower + (i+1)*width]``.

    With ``include_lowest`` the first interval also admits ``lower`` itself.
    A value within ``SNAP`` widths of an edge is treated as lying on it.
    """

    lower: float
    width: float
    count: int
    include_lowest: bool = False

    SNAP = 1e-9

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise DataError("bin width must be positive")
        if int(self.count) != self.count or self.count < 1:
            raise DataError("bin count must be a positive integer")

    @property
    def upper(self) -> float:
        return self.lower + self.width * self.count

    def edges(self) -> list[float]:
        return [self.lower + i * self.width for i in range(self.count + 1)]

    def intervals(self) -> list[Interval]:
        dec = max(_decimals(self.lower), _decimals(self.width))
        e = self.edges()
        return [
            Interval(e[i], e[i + 1], dec, closed_left=self.include_lowest and i == 0)
            for i in range(self.count)
        ]

    def index(self, x: float) -> int:
        """Bin index of ``x``; raises ``DataError`` outside the covered range."""
        pos = (x - self.lower) / self.width
        i = math.ceil(pos - self.SNAP) - 1
        if i == -1 and self.include_lowest and abs(pos) <= self.SNAP:
            i = 0
        if not 0 <= i < self.count:
            raise DataError(f"value {x!r} lies outside the bins {self.intervals()[0]} .. {self.intervals()[-1]}")
        return i

    @classmethod
    def default_for(cls, values: Sequence[float]) -> "BinSpec":
        """ceil(sqrt(n)) equal-width bins spanning [min, max], first bin closed on the left."""
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            raise DataError("cannot choose bins for an empty column")
        k = max(1, math.ceil(math.sqrt(arr.size)))
        lo, hi = float(arr.min()), float(arr.max())
        width = (hi - lo) / k if hi > lo else 1.0
        return cls(lo, width, k, include_lowest=True)


def binned_frequency_table(col: Column, bins: BinSpec) -> FrequencyTable:
    """Frequency table of a continuous column over right-closed intervals."""
    if col.kind is not Kind.CONTINUOUS:
        raise DataError(f"column {col.name!r} is {col.kind.value}; binning needs a continuous column")
    counts = [0] * bins.count
    for v in col.present():
        counts[bins.index(v)] += 1
    return _build_table(bins.intervals(), counts)

