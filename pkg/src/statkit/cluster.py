"""Distances and similarities, agglomerative hierarchical clustering and k-means."""

from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .dataset import Column, Kind
from .errors import DataError

# ---------------------------------------------------------------- distances


@dataclass(frozen=True)
class Euclidean:
    pass


@dataclass(frozen=True)
class Minkowski:
    c: float = 2.0

    def __post_init__(self):
        if not self.c >= 1:
            raise ValueError(f"Minkowski order must be >= 1, got {self.c}")


@dataclass(frozen=True)
class CosineDissimilarity:
    pass


@dataclass(frozen=True)
class JaccardDissimilarity:
    pass


DistanceKind = Union[Euclidean, Minkowski, CosineDissimilarity, JaccardDissimilarity]


def parse_distance(text: str | DistanceKind) -> DistanceKind:
    """``euclidean``, ``manhattan``, ``minkowski:3``, ``cosine`` or ``jaccard``."""
    if not isinstance(text, str):
        return text
    name, _, arg = text.strip().lower().partition(":")
    if name == "euclidean":
        return Euclidean()
    if name == "manhattan":
        return Minkowski(1.0)
    if name == "minkowski":
        return Minkowski(float(arg) if arg else 2.0)
    if name == "cosine":
        return CosineDissimilarity()
    if name == "jaccard":
        return JaccardDissimilarity()
    raise ValueError(f"unknown distance {text!r}")


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = np.asarray(p, dtype=float).ravel(), np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise DataError(f"dimension mismatch: {p.size} vs {q.size}")
    return p, q


def cosine_similarity(p, q) -> float:
    p, q = _pair(p, q)
    np_, nq = math.sqrt(float(p @ p)), math.sqrt(float(q @ q))
    if np_ == 0 or nq == 0:
        raise DataError("cosine similarity is undefined for a zero vector")
    return max(-1.0, min(1.0, float(p @ q) / (np_ * nq)))


def _binary_counts(p, q) -> tuple[int, int, int]:
    p, q = _pair(p, q)
    if not (np.all(np.isin(p, (0.0, 1.0))) and np.all(np.isin(q, (0.0, 1.0)))):
        raise DataError("Jaccard measures need binary (0/1) vectors")
    m11 = int(np.sum((p == 1) & (q == 1)))
    m10 = int(np.sum((p == 1) & (q == 0)))
    m01 = int(np.sum((p == 0) & (q == 1)))
    return m11, m10, m01


def jaccard_similarity(p, q) -> float:
    """``M11 / (M01 + M10 + M11)``; two all-zero vectors count as identical."""
    m11, m10, m01 = _binary_counts(p, q)
    union = m11 + m10 + m01
    return 1.0 if union == 0 else m11 / union


def distance(p, q, kind: DistanceKind | str = Euclidean()) -> float:
    kind = parse_distance(kind)
    if isinstance(kind, Euclidean):
        p, q = _pair(p, q)
        d = p - q
        return math.sqrt(float(d @ d))
    if isinstance(kind, Minkowski):
        p, q = _pair(p, q)
        return float(np.sum(np.abs(p - q) ** kind.c) ** (1.0 / kind.c))
    if isinstance(kind, CosineDissimilarity):
        return 1.0 - cosine_similarity(p, q)
    if isinstance(kind, JaccardDissimilarity):
        return 1.0 - jaccard_similarity(p, q)
    raise TypeError(f"unknown distance kind {kind!r}")


def pairwise(points, kind: DistanceKind | str = Euclidean()) -> np.ndarray:
    x = _points(points)
    n = x.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = distance(x[i], x[j], kind)
    return out


def _points(points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("points must be a nonempty n x d array")
    if not np.all(np.isfinite(x)):
        raise DataError("points contain non-finite values")
    return x


# ------------------------------------------------------ variable similarity


def midranks(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their positions."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc, yc = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(float(xc @ xc)), math.sqrt(float(yc @ yc))
    if sx == 0 or sy == 0:
        raise DataError("correlation undefined for a constant column")
    return max(-1.0, min(1.0, float(xc @ yc) / (sx * sy)))


def phi_coefficient(a: Sequence, b: Sequence) -> float:
    """``sqrt(chi2 / N)`` from the two-way contingency table of ``a`` and ``b``."""
    if len(a) != len(b) or not a:
        raise DataError("phi needs two nonempty sequences of equal length")
    ra, rb = sorted(set(a), key=str), sorted(set(b), key=str)
    if len(ra) < 2 or len(rb) < 2:
        raise DataError("phi undefined for a constant column")
    counts = Counter(zip(a, b))
    table = np.array([[counts[(u, v)] for v in rb] for u in ra], dtype=float)
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    chi2 = float(np.sum((table - expected) ** 2 / expected))
    return math.sqrt(chi2 / n)


def variable_similarity(a: Column, b: Column) -> float:
    """Pearson for numeric pairs, Spearman for ordinal pairs, phi for nominal pairs.

    Rows missing in either column are dropped.
    """
    if len(a) != len(b):
        raise DataError("columns differ in length")
    keep = [i for i in range(len(a)) if a.values[i] is not None and b.values[i] is not None]
    va, vb = [a.values[i] for i in keep], [b.values[i] for i in keep]
    if len(keep) < 2:
        raise DataError("need at least 2 complete rows")
    if a.kind.numeric and b.kind.numeric:
        return _pearson(np.array(va, dtype=float), np.array(vb, dtype=float))
    if a.kind is Kind.ORDINAL and b.kind is Kind.ORDINAL:
        ka = midranks([a.rank_key(v) for v in va])
        kb = midranks([b.rank_key(v) for v in vb])
        return _pearson(ka, kb)
    if a.kind is Kind.NOMINAL and b.kind is Kind.NOMINAL:
        return phi_coefficient(va, vb)
    raise DataError(f"no similarity defined between {a.kind.value} and {b.kind.value} columns")


# ----------------------------------------------------------- hierarchical


class Linkage(enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE_BETWEEN = "average_between"
    AVERAGE_WITHIN = "average_within"
    CENTROID = "centroid"
    WARD = "ward"

    @classmethod
    def parse(cls, text: "str | Linkage") -> "Linkage":
        if isinstance(text, Linkage):
            return text
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"average": cls.AVERAGE_BETWEEN, "upgma": cls.AVERAGE_BETWEEN, "within": cls.AVERAGE_WITHIN}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown linkage {text!r}") from None

    @property
    def monotone(self) -> bool:
        return self in (Linkage.SINGLE, Linkage.COMPLETE, Linkage.AVERAGE_BETWEEN, Linkage.WARD)

    @property
    def needs_points(self) -> bool:
        return self in (Linkage.CENTROID, Linkage.WARD)


@dataclass(frozen=True)
class MergeStep:
    a: int
    b: int
    height: float
    new_id: int
    size: int


@dataclass(frozen=True)
class Dendrogram:
    steps: tuple[MergeStep, ...]
    n_leaves: int
    linkage: Linkage

    def heights(self) -> list[float]:
        return [s.height for s in self.steps]

    def to_list(self) -> list[list]:
        return [[s.a, s.b, s.height, s.size] for s in self.steps]

    def to_json(self) -> str:
        return json.dumps(self.to_list())


TIE_RTOL = 1e-12


def _pick(d: np.ndarray, active: list[int]) -> tuple[int, int]:
    """Globally smallest entry; near-ties go to the lexicographically smallest id pair."""
    idx = np.array(active)
    sub = d[np.ix_(idx, idx)]
    iu = np.triu_indices(len(idx), 1)
    vals = sub[iu]
    best = vals.min()
    tied = np.flatnonzero(vals <= best + TIE_RTOL * abs(best))
    pairs = sorted((int(idx[iu[0][t]]), int(idx[iu[1][t]])) for t in tied)
    return pairs[0]


def agglomerate(
    data,
    linkage: Linkage | str = Linkage.SINGLE,
    metric: DistanceKind | str = Euclidean(),
    precomputed: bool = False,
) -> Dendrogram:
    """Agglomerative clustering by Lance-Williams updates of the dissimilarity matrix.

    ``data`` is an n x d array of points, or a dissimilarity matrix when
    ``precomputed``. Centroid and Ward work on squared Euclidean distances
    and need points. Reported heights: Euclidean distance between centroids
    for Centroid, increase in within-cluster sum of squares for Ward, and the
    linkage dissimilarity otherwise. Leaves are ids 0..N-1; merge i creates
    id N+i.
    """
    linkage = Linkage.parse(linkage)
    if precomputed:
        if linkage.needs_points:
            raise DataError(f"{linkage.value} linkage needs raw points, not a dissimilarity matrix")
        base = np.array(data, dtype=float)
        if base.ndim != 2 or base.shape[0] != base.shape[1]:
            raise DataError("dissimilarity matrix must be square")
        if not np.allclose(base, base.T) or np.any(np.diag(base) != 0) or np.any(base < 0):
            raise DataError("dissimilarity matrix must be symmetric, nonnegative, zero on the diagonal")
    else:
        x = _points(data)
        if linkage.needs_points:
            diff = x[:, None, :] - x[None, :, :]
            base = np.sum(diff * diff, axis=2)
        else:
            base = pairwise(x, metric)
    n = base.shape[0]
    if n < 2:
        raise DataError("clustering needs at least 2 items")

    total = 2 * n - 1
    d = np.full((total, total), np.inf)
    d[:n, :n] = base
    size = np.zeros(total, dtype=int)
    size[:n] = 1
    within = np.zeros(total)  # sum of pair dissimilarities inside each cluster
    cross = np.zeros((total, total))  # sum of dissimilarities between two clusters
    cross[:n, :n] = base
    active = list(range(n))
    steps = []
    for step in range(n - 1):
        a, b = _pick(d, active)
        new = n + step
        na, nb = size[a], size[b]
        dab = d[a, b]
        if linkage is Linkage.CENTROID:
            height = math.sqrt(max(dab, 0.0))
        elif linkage is Linkage.WARD:
            height = dab / 2.0
        else:
            height = float(dab)
        steps.append(MergeStep(a, b, float(height), new, int(na + nb)))
        active = [i for i in active if i not in (a, b)]
        size[new] = na + nb
        within[new] = within[a] + within[b] + cross[a, b]
        for k in active:
            nk = size[k]
            dak, dbk = d[a, k], d[b, k]
            cross[new, k] = cross[k, new] = cross[a, k] + cross[b, k]
            if linkage is Linkage.SINGLE:
                v = min(dak, dbk)
            elif linkage is Linkage.COMPLETE:
                v = max(dak, dbk)
            elif linkage is Linkage.AVERAGE_BETWEEN:
                v = (na * dak + nb * dbk) / (na + nb)
            elif linkage is Linkage.AVERAGE_WITHIN:
                m = na + nb + nk
                v = (within[new] + within[k] + cross[new, k]) / (m * (m - 1) / 2)
            elif linkage is Linkage.CENTROID:
                v = (na * dak + nb * dbk) / (na + nb) - na * nb * dab / (na + nb) ** 2
                v = max(v, 0.0)
            else:  # Ward
                v = ((na + nk) * dak + (nb + nk) * dbk - nk * dab) / (na + nb + nk)
            d[new, k] = d[k, new] = v
        active.append(new)
    return Dendrogram(tuple(steps), n, linkage)


def cut(dendrogram: Dendrogram, k: int) -> list[int]:
    """Flat labels after undoing the last ``k - 1`` merges.

    Label 0 goes to the cluster holding leaf 0, the next label to the cluster
    of the smallest leaf not yet labelled, and so on.
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise DataError(f"cluster count must lie in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s in dendrogram.steps[: n - k]:
        parent[find(s.a)] = s.new_id
        parent[find(s.b)] = s.new_id
    labels, seen = [], {}
    for leaf in range(n):
        root = find(leaf)
        labels.append(seen.setdefault(root, len(seen)))
    return labels


# ------------------------------------------------------------------ k-means


@dataclass(frozen=True)
class FarthestFirst:
    pass


@dataclass(frozen=True)
class SeededRandom:
    seed: int = 0


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    labels: tuple[int, ...]
    wss: float
    iterations: int
    converged: bool
    history: tuple[float, ...]  # WSS after each update step


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - c[None, :, :]
    return np.sum(diff * diff, axis=2)


def wss(points, labels: Sequence[int], centroids: np.ndarray) -> float:
    x = _points(points)
    c = np.asarray(centroids, dtype=float)
    labels = np.asarray(labels)
    return math.fsum(float(np.sum((x[i] - c[labels[i]]) ** 2)) for i in range(x.shape[0]))


def farthest_first(x: np.ndarray, k: int) -> np.ndarray:
    """First center closest to the grand mean, then repeatedly the point farthest from all chosen."""
    first = int(np.argmin(np.sum((x - x.mean(axis=0)) ** 2, axis=1)))
    chosen = [first]
    nearest = np.sum((x - x[first]) ** 2, axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, np.sum((x - x[nxt]) ** 2, axis=1))
    return x[chosen].copy()


def _update(x: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    labels = labels.copy()
    centroids = np.zeros((k, x.shape[1]))
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        if counts[j]:
            centroids[j] = x[labels == j].mean(axis=0)
    for j in np.flatnonzero(counts == 0):
        # refill an empty cluster with the point farthest from its own centroid,
        # taken from a cluster that keeps at least one member
        gap = np.sum((x - centroids[labels]) ** 2, axis=1)
        gap[counts[labels] < 2] = -1.0
        donor = int(np.argmax(gap))
        old = labels[donor]
        labels[donor] = j
        counts[old] -= 1
        counts[j] = 1
        centroids[j] = x[donor]
        centroids[old] = x[labels == old].mean(axis=0)
    return centroids, labels


def kmeans(
    points,
    k: int,
    init: FarthestFirst | SeededRandom = FarthestFirst(),
    max_iter: int = 100,
) -> KMeansResult:
    """Lloyd iterations from the given initialization until assignments stop changing."""
    x = _points(points)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise DataError(f"k must lie in [1, {n}], got {k}")
    if isinstance(init, SeededRandom):
        rng = np.random.default_rng(init.seed)
        centroids = x[np.sort(rng.choice(n, size=k, replace=False))].copy()
    elif isinstance(init, FarthestFirst):
        centroids = farthest_first(x, k)
    else:
        raise TypeError(f"unknown initialization {init!r}")
    labels = None
    history = []
    converged = False
    iterations = 0
    for _ in range(max_iter):
        new_labels = np.argmin(_sq_dists(x, centroids), axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        centroids, labels = _update(x, new_labels, k)
        iterations += 1
        history.append(wss(x, labels, centroids))
    final = np.argmin(_sq_dists(x, centroids), axis=1)
    if labels is not None and np.array_equal(final, labels):
        converged = True
    return KMeansResult(
        centroids=centroids,
        labels=tuple(int(v) for v in final),
        wss=wss(x, final, centroids),
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )
