"""Small dense linear algebra used by the regression and factor modules."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, SingularMatrixError


@dataclass(frozen=True)
class QR:
    """Householder factorization ``A = Q R`` (thin)."""

    q: np.ndarray  # n x p, orthonormal columns
    r: np.ndarray  # p x p, upper triangular


def householder_qr(a: np.ndarray, rank_tol: float = 1e-10) -> QR:
    """Thin QR by Householder reflections.

    Raises ``SingularMatrixError`` when a diagonal entry of R is negligible
    relative to the column scale (rank deficiency).
    """
    a = np.array(a, dtype=float)
    n, p = a.shape
    if n < p:
        raise DataError(f"QR needs at least as many rows as columns, got {n}x{p}")
    r = a.copy()
    vs = []
    scale = max(float(np.max(np.sqrt(np.sum(a * a, axis=0)))), 1e-300) if p else 1.0
    for k in range(p):
        x = r[k:, k]
        norm = math.sqrt(float(x @ x))
        if norm <= rank_tol * scale:
            raise SingularMatrixError(f"matrix is rank deficient (column {k} depends on earlier columns)")
        v = x.copy()
        v[0] += math.copysign(norm, x[0]) if x[0] != 0 else norm
        v /= math.sqrt(float(v @ v))
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        vs.append(v)
    # accumulate Q by applying the reflectors to the first p columns of I
    q = np.eye(n, p)
    for k in reversed(range(p)):
        v = vs[k]
        q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])
    r = np.triu(r[:p, :])
    for k in range(p):
        if abs(r[k, k]) <= rank_tol * scale:
            raise SingularMatrixError(f"matrix is rank deficient at column {k}")
    return QR(q, r)


def solve_upper(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for an upper-triangular system."""
    p = r.shape[0]
    b = np.array(b, dtype=float)
    x = np.zeros_like(b)
    for i in reversed(range(p)):
        x[i] = (b[i] - r[i, i + 1 :] @ x[i + 1 :]) / r[i, i]
    return x


@dataclass(frozen=True)
class LU:
    """``P A = L U`` with partial pivoting, stored compactly."""

    lu: np.ndarray
    perm: np.ndarray
    sign: int

    def det(self) -> float:
        return self.sign * float(np.prod(np.diag(self.lu)))

    def log_abs_det(self) -> float:
        return float(np.sum(np.log(np.abs(np.diag(self.lu)))))

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)[self.perm]
        n = self.lu.shape[0]
        y = np.array(b, dtype=float)
        for i in range(n):
            y[i] = y[i] - self.lu[i, :i] @ y[:i]
        return solve_upper(np.triu(self.lu), y)

    def inverse(self) -> np.ndarray:
        n = self.lu.shape[0]
        return self.solve(np.eye(n))


def lu_factor(a: np.ndarray, singular_tol: float = 1e-12) -> LU:
    a = np.array(a, dtype=float)
    n, m = a.shape
    if n != m:
        raise DataError("LU needs a square matrix")
    perm = np.arange(n)
    sign = 1
    scale = max(float(np.max(np.abs(a))), 1e-300) if n else 1.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) <= singular_tol * scale:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
            sign = -sign
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return LU(a, perm, sign)


def determinant(a: np.ndarray) -> float:
    """Determinant via pivoted LU; 0.0 for numerically singular input."""
    try:
        return lu_factor(a).det()
    except SingularMatrixError:
        return 0.0


def inverse(a: np.ndarray) -> np.ndarray:
    return lu_factor(a).inverse()


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0


def _off_norm(a: np.ndarray) -> float:
    upper = np.triu(a, 1)
    return math.sqrt(2.0 * float(np.sum(upper * upper)))


def jacobi_eigen(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> EigenPairs:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm is
    at most ``tol`` times the matrix norm.
    """
    a = np.array(a, dtype=float)
    n, m = a.shape
    if n != m:
        raise DataError("eigendecomposition needs a square matrix")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(a))) if n else 1.0)):
        raise DataError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    total = math.sqrt(float(np.sum(a * a))) or 1.0
    sweep = 0
    for sweep in range(1, max_sweeps + 1):
        off = _off_norm(a)
        if off <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                if apq == 0.0:
                    continue
                if abs(apq) < 1e-18 * abs(diff):
                    # rotation angle below machine precision; drop the entry
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the rotation in the (p, q) plane
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        if off > tol * total:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    vectors = v[:, order]
    # sign convention: largest-magnitude component of each vector positive
    for j in range(n):
        i = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[i, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return EigenPairs(values[order], vectors, sweep)
