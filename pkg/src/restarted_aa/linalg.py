"""Small dense linear algebra used by the solvers and the analysis code.

Vectors and symmetric matrices are plain float64 numpy arrays; the helpers
here validate them and provide the few kernels the rest of the package
needs: a cyclic Jacobi eigensolver, Rayleigh quotients and the one-column
least-squares solve used by AA(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# A vector v counts as zero when ||v|| <= ZERO_RTOL * scale.
ZERO_RTOL = 1e-14


class LinalgError(ValueError):
    """Invalid input to a linear algebra kernel."""


class DegenerateVectorError(LinalgError):
    """A vector that must be nonzero is numerically zero.

    For the AA(1) least-squares problem this only happens once the exact
    solution has been reached.
    """


def norm2(v: np.ndarray) -> float:
    """Euclidean norm that neither underflows nor overflows for tiny or huge entries."""
    v = np.asarray(v, dtype=np.float64).ravel()
    n = math.sqrt(float(v @ v))
    if 1e-150 < n < 1e150:
        return n
    s = float(np.max(np.abs(v))) if v.size else 0.0
    if s == 0.0 or not math.isfinite(s):
        return s
    return s * math.sqrt(float((v / s) @ (v / s)))


def zero_threshold(scale: float = 1.0) -> float:
    # scale = 0 makes only an exact zero degenerate
    return ZERO_RTOL * abs(float(scale))


def is_degenerate(v: np.ndarray, scale: float = 1.0) -> bool:
    return norm2(v) <= zero_threshold(scale)


def as_vector(x, n: int | None = None) -> np.ndarray:
    """Return `x` as a finite 1-D float64 array, optionally of length `n`."""
    v = np.array(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise LinalgError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if n is not None and v.size != n:
        raise LinalgError(f"expected a vector of length {n}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise LinalgError("vector has non-finite entries")
    return v


def as_symmetric(M) -> np.ndarray:
    """Return `M` as a finite square float64 array that is exactly symmetric."""
    S = np.array(M, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise LinalgError(f"expected a non-empty square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise LinalgError("matrix has non-finite entries")
    if not np.array_equal(S, S.T):
        raise LinalgError("matrix is not symmetric")
    return S


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a symmetric matrix.

    `eigenvalues` is sorted ascending and column ``i`` of `eigenvectors`
    is the unit eigenvector belonging to ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def _rotation(app: float, aqq: float, apq: float) -> tuple[float, float]:
    # (c, s) of the Jacobi rotation annihilating the (p, q) entry.
    tau = (aqq - app) / (2.0 * apq)
    if tau >= 0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, t * c


def eig_sym(M, max_sweeps: int = 100) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit the pairs (p, q), p < q, in row order, so results are
    reproducible bit-for-bit for a given input.  Each eigenvector is
    signed so that its entry of largest magnitude is positive.
    """
    S = as_symmetric(M).copy()
    n = S.shape[0]
    V = np.eye(n)
    frob = float(np.linalg.norm(S))
    tol = 1e-17 * frob
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(S - np.diag(np.diag(S))))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = S[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= 1e-18 * (abs(S[p, p]) + abs(S[q, q])):
                    # rotation would be the identity in floating point
                    S[p, q] = S[q, p] = 0.0
                    continue
                c, s = _rotation(S[p, p], S[q, q], apq)
                Sp = S[:, p].copy()
                Sq = S[:, q].copy()
                S[:, p] = c * Sp - s * Sq
                S[:, q] = s * Sp + c * Sq
                Sp = S[p, :].copy()
                Sq = S[q, :].copy()
                S[p, :] = c * Sp - s * Sq
                S[q, :] = s * Sp + c * Sq
                S[p, q] = S[q, p] = 0.0
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq

    w = np.diag(S).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    # Re-normalize against accumulated rounding, then fix signs.
    V /= np.linalg.norm(V, axis=0)
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[lead, np.arange(n)])
    V *= np.where(signs == 0, 1.0, signs)
    w.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(w, V)


def rayleigh_quotient(S: np.ndarray, y: np.ndarray, scale: float = 1.0) -> float:
    """R(S, y) = y'Sy / y'y.

    Raises:
        DegenerateVectorError: if `y` is numerically zero.
    """
    y = np.asarray(y, dtype=np.float64)
    if is_degenerate(y, scale):
        raise DegenerateVectorError("Rayleigh quotient of a zero vector")
    y = y / float(np.max(np.abs(y)))
    return float(y @ (S @ y)) / float(y @ y)


def scalar_lsq(target: np.ndarray, direction: np.ndarray, scale: float = 1.0,
               *, threshold: float | None = None) -> float:
    """Minimizer over beta of ||target + beta * direction||^2.

    `threshold` overrides the zero test on `direction`
    (``||direction|| <= threshold``); by default it is ``zero_threshold(scale)``.

    Raises:
        DegenerateVectorError: if `direction` is numerically zero, i.e. the
            problem is rank deficient.
    """
    d = np.asarray(direction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    limit = zero_threshold(scale) if threshold is None else threshold
    dd = float(d @ d)
    if 1e-290 < dd < 1e290:
        if math.sqrt(dd) <= limit:
            raise DegenerateVectorError("least-squares direction is zero (rank deficient)")
        return -float(d @ t) / dd
    s = float(np.max(np.abs(d))) if d.size else 0.0
    if s == 0.0 or norm2(d) <= limit:
        raise DegenerateVectorError("least-squares direction is zero (rank deficient)")
    # rescale so tiny residuals do not underflow in the dot products
    d, t = d / s, t / s
    return -float(d @ t) / float(d @ d)


def lsq_truncated(target: np.ndarray, columns: np.ndarray, scale: float = 1.0,
                  rcond: float = 1e-12) -> np.ndarray:
    """Minimize ||target + columns @ beta|| by QR, dropping degenerate columns.

    Columns are taken to be ordered newest first; whenever the triangular
    factor has a (relatively) negligible diagonal entry the last (oldest)
    column is dropped and the factorization repeated.  The returned
    coefficient vector has one entry per original column, with zeros for
    dropped ones.
    """
    D = np.asarray(columns, dtype=np.float64)
    beta = np.zeros(D.shape[1])
    k = min(D.shape)  # at most n independent columns
    while k > 0:
        Q, R = np.linalg.qr(D[:, :k])
        diag = np.abs(np.diag(R))
        if diag.max() > zero_threshold(scale) and diag.min() > rcond * diag.max():
            beta[:k] = -np.linalg.solve(R, Q.T @ target)
            return beta
        k -= 1
    return beta
