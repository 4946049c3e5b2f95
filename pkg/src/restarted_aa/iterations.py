"""Picard iteration, windowed AA(m) and restarted AA(1) for q(x) = Mx + b.

Every solver returns an :class:`IterationTrace` holding all iterates and
residuals ``r_k = x_k - q(x_k)``.  Stopping checks run after each residual
is formed, in the order: exact solution, tolerance, divergence, iteration
budget.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DegenerateVectorError,
    LinalgError,
    as_symmetric,
    as_vector,
    eig_sym,
    is_degenerate,
    lsq_truncated,
    norm2,
    scalar_lsq,
)


class RankDeficiencyError(ArithmeticError):
    """The AA(1) least-squares problem is rank deficient at a nonzero residual."""


class Termination(str, enum.Enum):
    TOLERANCE = "tolerance-reached"
    MAX_ITERS = "max-iters"
    EXACT = "exact-solution"
    DIVERGED = "diverged"


@dataclass(frozen=True, eq=False)
class SymmetricSystem:
    """The affine map q(x) = Mx + b with symmetric M and invertible A = I - M."""

    M: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        M = as_symmetric(self.M)
        b = as_vector(self.b, M.shape[0])
        m = eig_sym(M).eigenvalues
        if np.any(np.abs(m - 1.0) <= 1e-12):
            raise LinalgError("M has an eigenvalue equal to 1, so A = I - M is singular")
        M.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "b", b)
        A = np.eye(M.shape[0]) - M
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.b.size

    def q(self, x: np.ndarray) -> np.ndarray:
        return self.M @ x + self.b

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x - self.b

    def solution(self) -> np.ndarray:
        return np.linalg.solve(self.A, self.b)

    def x0_for_residual(self, r0) -> np.ndarray:
        """Initial iterate whose residual A x0 - b equals `r0`."""
        return np.linalg.solve(self.A, as_vector(r0, self.n) + self.b)

    @classmethod
    def from_eigen(cls, eigenvalues, eigenvectors=None, b=None) -> "SymmetricSystem":
        """Build M = V diag(eigenvalues) V' (V defaults to the identity)."""
        m = as_vector(eigenvalues)
        V = np.eye(m.size) if eigenvectors is None else np.asarray(eigenvectors, dtype=float)
        M = (V * m) @ V.T
        M = 0.5 * (M + M.T)
        return cls(M, np.zeros(m.size) if b is None else b)


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 1000
    residual_tolerance: float = 0.0
    divergence_cap: float = 1e10

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not self.residual_tolerance >= 0:
            raise ValueError("residual_tolerance must be >= 0")
        if not self.divergence_cap > 1:
            raise ValueError("divergence_cap must be > 1")


@dataclass(frozen=True, eq=False)
class IterationTrace:
    """Full record of one solver run.

    ``iterates[k]`` and ``residuals[k]`` are rows of 2-D arrays; `betas`
    holds ``(k, beta_k)`` for every step that used an extrapolation
    coefficient (windowed AA(m > 1) stores the coefficient vector).
    """

    method: str
    iterates: np.ndarray
    residuals: np.ndarray
    residual_norms: np.ndarray
    betas: tuple
    termination: Termination

    @property
    def n_steps(self) -> int:
        return len(self.residual_norms) - 1

    def beta_by_step(self) -> dict:
        return dict(self.betas)


class _Recorder:
    def __init__(self, sys: SymmetricSystem, x0: np.ndarray, cfg: SolverConfig):
        self.sys = sys
        self.cfg = cfg
        self.xs: list[np.ndarray] = []
        self.rs: list[np.ndarray] = []
        self.norms: list[float] = []
        self.betas: list[tuple] = []

    def push(self, x: np.ndarray, q: np.ndarray) -> Termination | None:
        r = x - q
        nr = norm2(r)
        self.xs.append(x)
        self.rs.append(r)
        self.norms.append(nr)
        k = len(self.norms) - 1
        if not math.isfinite(nr):
            return Termination.DIVERGED
        # exact to working precision: r = x - q(x) is at the rounding level of its operands
        if is_degenerate(r, norm2(x) + norm2(q)):
            return Termination.EXACT
        if nr <= self.cfg.residual_tolerance:
            return Termination.TOLERANCE
        if nr > self.cfg.divergence_cap * self.norms[0]:
            return Termination.DIVERGED
        if k >= self.cfg.max_iters:
            return Termination.MAX_ITERS
        return None

    def trace(self, method: str, why: Termination) -> IterationTrace:
        X = np.array(self.xs)
        R = np.array(self.rs)
        N = np.array(self.norms)
        for a in (X, R, N):
            a.setflags(write=False)
        return IterationTrace(method, X, R, N, tuple(self.betas), why)


def _quiet(fn):
    # overflow shows up as a DIVERGED termination, not as a warning
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)
    return wrapper


def _start(sys: SymmetricSystem, x0) -> np.ndarray:
    return as_vector(x0, sys.n)


def _guarded_beta(r: np.ndarray, r_prev: np.ndarray) -> float:
    # Rank deficiency happens iff r_prev = 0 (exact solution already found),
    # which stops the run before any AA step; so only an exactly vanishing
    # vector is treated as degenerate here.
    if not np.any(r_prev):
        raise RankDeficiencyError("AA(1) step requested after the exact solution was reached")
    try:
        return scalar_lsq(r, r - r_prev, threshold=0.0)
    except DegenerateVectorError as exc:
        raise RankDeficiencyError(
            f"AA(1) least-squares problem is rank deficient with ||r_k-1|| = "
            f"{np.linalg.norm(r_prev):.3e}"
        ) from exc


@_quiet
def run_picard(sys: SymmetricSystem, x0, cfg: SolverConfig = SolverConfig()) -> IterationTrace:
    """x_{k+1} = q(x_k)."""
    x = _start(sys, x0)
    rec = _Recorder(sys, x, cfg)
    q = sys.q(x)
    why = rec.push(x, q)
    while why is None:
        x = q
        q = sys.q(x)
        why = rec.push(x, q)
    return rec.trace("picard", why)


@_quiet
def run_windowed_aa(sys: SymmetricSystem, x0, m: int,
                    cfg: SolverConfig = SolverConfig()) -> IterationTrace:
    """Windowed Anderson acceleration AA(m) with memory m_k = min(m, k).

    x_{k+1} = q(x_k) + sum_i beta_i (q(x_k) - q(x_{k-i})), with beta the
    least-squares minimizer of ||r_k + sum_i beta_i (r_k - r_{k-i})||.
    ``m = 0`` is exactly Picard iteration.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"window size must be a nonnegative integer, got {m}")
    m = int(m)
    x = _start(sys, x0)
    rec = _Recorder(sys, x, cfg)
    qs = [sys.q(x)]
    why = rec.push(x, qs[-1])
    k = 0
    while why is None:
        mk = min(m, k)
        q = qs[-1]
        if mk == 0:
            x = q
        elif mk == 1:
            beta = _guarded_beta(rec.rs[-1], rec.rs[-2])
            rec.betas.append((k, beta))
            x = q + beta * (q - qs[-2])
        else:
            r = rec.rs[-1]
            D = np.column_stack([r - rec.rs[-1 - i] for i in range(1, mk + 1)])
            beta = lsq_truncated(r, D, scale=0.0)
            rec.betas.append((k, tuple(float(v) for v in beta)))
            x = q + sum(beta[i - 1] * (q - qs[-1 - i]) for i in range(1, mk + 1))
        k += 1
        qs.append(sys.q(x))
        del qs[: -(m + 1)]
        why = rec.push(x, qs[-1])
    return rec.trace(f"aa-windowed:{m}", why)


@_quiet
def run_restarted_aa1(sys: SymmetricSystem, x0, cfg: SolverConfig = SolverConfig()) -> IterationTrace:
    """Restarted AA(1): Picard steps at even k, AA(1) extrapolation at odd k.

    x_{k+1} = q(x_k)                                 for k = 0, 2, 4, ...
    x_{k+1} = q(x_k) + beta_k (q(x_k) - q(x_{k-1}))  for k = 1, 3, 5, ...
    """
    x = _start(sys, x0)
    rec = _Recorder(sys, x, cfg)
    q_prev = None
    q = sys.q(x)
    why = rec.push(x, q)
    k = 0
    while why is None:
        if k % 2 == 0:
            x = q
        else:
            beta = _guarded_beta(rec.rs[-1], rec.rs[-2])
            rec.betas.append((k, beta))
            x = q + beta * (q - q_prev)
        k += 1
        q_prev, q = q, sys.q(x)
        why = rec.push(x, q)
    return rec.trace("aa1-restarted", why)


def beta_rayleigh(sys: SymmetricSystem, r_prev, scale: float = 1.0) -> float:
    """beta_k = -1 + R(A^{-1}, A r_{k-1}), with A^{-1} applied by a linear solve.

    Raises:
        DegenerateVectorError: if `r_prev` is numerically zero (the exact
            solution has already been found).
    """
    r_prev = np.asarray(r_prev, dtype=np.float64)
    if is_degenerate(r_prev, scale):
        raise DegenerateVectorError("r_prev is zero: the exact solution was already reached")
    y = sys.A @ (r_prev / float(np.max(np.abs(r_prev))))
    return -1.0 + float(y @ np.linalg.solve(sys.A, y)) / float(y @ y)


def run(sys: SymmetricSystem, x0, method: str, cfg: SolverConfig = SolverConfig()) -> IterationTrace:
    """Dispatch on a method name: ``picard``, ``aa1-restarted`` or ``aa-windowed:m``."""
    if method == "picard":
        return run_picard(sys, x0, cfg)
    if method == "aa1-restarted":
        return run_restarted_aa1(sys, x0, cfg)
    if method.startswith("aa-windowed:"):
        m = method.split(":", 1)[1]
        if not m.isdigit():
            raise ValueError(f"bad window size in method {method!r}")
        return run_windowed_aa(sys, x0, int(m), cfg)
    raise ValueError(f"unknown method {method!r}")

