"""Independent reference implementations used only by the tests.

Each oracle trades speed for obviousness: brute force, exact rationals or a
third-party library, never the code paths of the package under test.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np

# ---------------------------------------------------------------- binning


def exact_bin_counts(values, lower, width, count, include_lowest=False):
    """Counts per right-closed bin ]lo, hi] using exact decimal arithmetic."""
    lo = Fraction(repr(lower))
    w = Fraction(repr(width))
    counts = [0] * count
    for v in values:
        fv = Fraction(repr(v))
        placed = False
        for i in range(count):
            a, b = lo + i * w, lo + (i + 1) * w
            if a < fv <= b or (include_lowest and i == 0 and fv == a):
                counts[i] += 1
                placed = True
                break
        assert placed, f"{v} outside the bin range"
    return counts


def two_pass_sd(values):
    vals = [Fraction(repr(float(v))) for v in values]
    m = sum(vals) / len(vals)
    return math.sqrt(float(sum((v - m) ** 2 for v in vals) / (len(vals) - 1)))


# ------------------------------------------------------------- clustering


def naive_linkage(points, linkage):
    """Merge sequence by recomputing every inter-cluster dissimilarity from members.

    Returns [(a, b, height, size)] with the same id scheme as the package: leaves
    0..N-1, merge i creates N+i, ties to the smallest (a, b) pair.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]

    def d(i, j):
        return float(np.sqrt(np.sum((x[i] - x[j]) ** 2)))

    def dissim(ma, mb):
        if linkage == "single":
            return min(d(i, j) for i in ma for j in mb)
        if linkage == "complete":
            return max(d(i, j) for i in ma for j in mb)
        if linkage == "average_between":
            return sum(d(i, j) for i in ma for j in mb) / (len(ma) * len(mb))
        if linkage == "average_within":
            union = ma + mb
            pairs = list(itertools.combinations(union, 2))
            return sum(d(i, j) for i, j in pairs) / len(pairs)
        ca, cb = x[ma].mean(axis=0), x[mb].mean(axis=0)
        sq = float(np.sum((ca - cb) ** 2))
        if linkage == "centroid":
            return math.sqrt(sq)
        if linkage == "ward":
            return len(ma) * len(mb) / (len(ma) + len(mb)) * sq
        raise ValueError(linkage)

    clusters = {i: [i] for i in range(n)}
    out = []
    for step in range(n - 1):
        ids = sorted(clusters)
        cand = [(dissim(clusters[a], clusters[b]), a, b) for a, b in itertools.combinations(ids, 2)]
        best = min(c[0] for c in cand)
        tied = sorted((a, b) for v, a, b in cand if v <= best + 1e-9 * abs(best))
        a, b = tied[0]
        h = next(v for v, p, q in cand if (p, q) == (a, b))
        members = clusters.pop(a) + clusters.pop(b)
        clusters[n + step] = members
        out.append((a, b, h, len(members)))
    return out


def mst_edge_weights(points):
    """Prim's algorithm on the complete Euclidean graph; weights sorted ascending."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    in_tree = [False] * n
    best = [math.inf] * n
    best[0] = 0.0
    weights = []
    for step in range(n):
        u = min((i for i in range(n) if not in_tree[i]), key=lambda i: best[i])
        in_tree[u] = True
        if step:
            weights.append(best[u])
        for v in range(n):
            if not in_tree[v]:
                best[v] = min(best[v], float(np.sqrt(np.sum((x[u] - x[v]) ** 2))))
    return sorted(weights)


def partitions_into(items, k):
    """All partitions of ``items`` into exactly ``k`` nonempty blocks."""
    items = list(items)
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    for part in partitions_into(rest, k - 1):
        yield [[first]] + part
    for part in partitions_into(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def best_partition_wss(points, k):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    best = math.inf
    for part in partitions_into(range(x.shape[0]), k):
        cost = sum(float(np.sum((x[b] - x[b].mean(axis=0)) ** 2)) for b in part)
        best = min(best, cost)
    return best


# ---------------------------------------------------------------- OneR


def brute_force_oner_error(columns, labels):
    """Minimum training misclassification count over every single-attribute rule.

    ``columns`` is a list of already-discrete value sequences. Every mapping
    from value to class is enumerated, so this is exponential in the number of
    distinct values and only usable on toy tables.
    """
    classes = sorted(set(labels))
    best = math.inf
    for col in columns:
        values = sorted(set(col), key=repr)
        for assignment in itertools.product(classes, repeat=len(values)):
            rule = dict(zip(values, assignment))
            errors = sum(rule[v] != y for v, y in zip(col, labels))
            best = min(best, errors)
    return best


def majority_error(labels):
    return len(labels) - Counter(labels).most_common(1)[0][1]
