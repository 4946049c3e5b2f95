"""Two-step residual propagator of restarted AA(1) and its four-step eigenvalue.

One restart cycle maps r_{k-1} to r_{k+1} = R(r_{k-1}) with

    R(v) = M [M - beta(v) A] v,    beta(v) = -1 + R(A^{-1}, A v),

and for v = v_i + eps v_j built from two eigenvectors of M, R(R(v)) is a
multiple lambda(eps) of v.  The closed forms for R on that plane, lambda,
and its maximizer over eps are collected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .iterations import SymmetricSystem
from .linalg import DegenerateVectorError, as_vector, eig_sym, is_degenerate


def _check_eigenvalue(m: float, name: str) -> float:
    m = float(m)
    if not math.isfinite(m):
        raise ValueError(f"{name} must be finite")
    if m == 1.0:
        raise ValueError(f"{name} = 1 makes A = I - M singular")
    return m


@dataclass(frozen=True, eq=False)
class EigenPairSelection:
    """Two orthonormal eigenvectors of M and their eigenvalues."""

    m_i: float
    m_j: float
    v_i: np.ndarray
    v_j: np.ndarray

    def __post_init__(self):
        _check_eigenvalue(self.m_i, "m_i")
        _check_eigenvalue(self.m_j, "m_j")
        v_i, v_j = as_vector(self.v_i), as_vector(self.v_j, np.size(self.v_i))
        if abs(float(v_i @ v_j)) > 1e-12:
            raise ValueError("v_i and v_j must be orthogonal")
        object.__setattr__(self, "v_i", v_i)
        object.__setattr__(self, "v_j", v_j)

    @property
    def a_i(self) -> float:
        return 1.0 - self.m_i

    @property
    def a_j(self) -> float:
        return 1.0 - self.m_j

    def z(self, eps: float, c_i: float = 1.0) -> np.ndarray:
        return c_i * (self.v_i + eps * self.v_j)

    @classmethod
    def from_system(cls, sys: SymmetricSystem, i: int, j: int) -> "EigenPairSelection":
        d = eig_sym(sys.M)
        return cls(d.eigenvalues[i], d.eigenvalues[j], d.vector(i), d.vector(j))


def beta_of(sys: SymmetricSystem, v: np.ndarray, scale: float = 1.0) -> float:
    """beta(v) = -1 + (Av . v) / ||Av||^2, the inner-product form of -1 + R(A^{-1}, Av)."""
    v = np.asarray(v, dtype=np.float64)
    if is_degenerate(v, scale):
        raise DegenerateVectorError("the propagator is not defined at zero")
    v = v / float(np.max(np.abs(v)))
    y = sys.A @ v
    return -1.0 + float(y @ v) / float(y @ y)


def apply_R(sys: SymmetricSystem, v, scale: float = 1.0) -> np.ndarray:
    """Two-step residual propagator R(v) = M [M - beta(v) A] v."""
    v = np.asarray(v, dtype=np.float64)
    beta = beta_of(sys, v, scale)
    return sys.M @ (sys.M @ v - beta * (sys.A @ v))


def R_closed_form(sel: EigenPairSelection, eps: float, c_i: float = 1.0) -> np.ndarray:
    """R(c_i (v_i + eps v_j)) evaluated from the eigen-expansion."""
    a_i, a_j = sel.a_i, sel.a_j
    f = c_i * (a_j - a_i) * eps / (a_i**2 + a_j**2 * eps**2)
    return f * (sel.m_i * a_j * eps * sel.v_i - sel.m_j * a_i * sel.v_j)


def lambda_of_eps(m_i: float, m_j: float, eps: float) -> float:
    """Four-step contraction lambda(eps) with R(R(z)) = lambda(eps) z; always >= 0."""
    m_i = _check_eigenvalue(m_i, "m_i")
    m_j = _check_eigenvalue(m_j, "m_j")
    eps = float(eps)
    if eps == 0.0 or not math.isfinite(eps):
        raise ValueError("eps must be finite and nonzero")
    num = (m_j - m_i) ** 2 * (m_i * m_j) ** 2
    den = ((m_i - 1.0) ** 2 + eps**2 * (m_j - 1.0) ** 2) * (m_i**2 + m_j**2 / eps**2)
    return num / den


def lambda_of_eps_array(m_i, m_j, eps) -> np.ndarray:
    """Vectorized lambda(eps) without argument checks (for grid searches)."""
    m_i, m_j, eps = (np.asarray(a, dtype=np.float64) for a in (m_i, m_j, eps))
    num = (m_j - m_i) ** 2 * (m_i * m_j) ** 2
    den = ((m_i - 1.0) ** 2 + eps**2 * (m_j - 1.0) ** 2) * (m_i**2 + m_j**2 / eps**2)
    return num / den


def _check_distinct_nonzero(m_i: float, m_j: float) -> tuple[float, float]:
    m_i = _check_eigenvalue(m_i, "m_i")
    m_j = _check_eigenvalue(m_j, "m_j")
    if m_i == 0.0 or m_j == 0.0:
        raise ValueError("eigenvalues must be nonzero")
    if m_i == m_j:
        raise ValueError("eigenvalues must be distinct")
    return m_i, m_j


def eps_max(m_i: float, m_j: float) -> tuple[float, float]:
    """The two maximizers (+e, -e) of lambda over eps."""
    m_i, m_j = _check_distinct_nonzero(m_i, m_j)
    # two square roots so tiny m_i under- or overflows neither product
    e = math.sqrt(abs(m_j / m_i)) * math.sqrt(abs((m_i - 1.0) / (m_j - 1.0)))
    return e, -e


def lambda_max(m_i: float, m_j: float) -> float:
    """max over eps of lambda(eps)."""
    m_i, m_j = _check_distinct_nonzero(m_i, m_j)
    return (m_i * m_j * (m_j - m_i) / (abs(m_i * (m_i - 1.0)) + abs(m_j * (m_j - 1.0)))) ** 2


class PeriodicityCheck(NamedTuple):
    discrepancy: float
    lam: float
    degenerate: bool


def verify_four_periodicity(sys: SymmetricSystem, sel: EigenPairSelection,
                            eps: float) -> PeriodicityCheck:
    """Numerically check R(R(z)) = lambda(eps) z for z = v_i + eps v_j.

    When m_i = m_j the first application already gives R(z) = 0, lambda
    is taken to be 0 and the reported discrepancy is ||R(z)|| / ||z||.
    """
    z = sel.z(eps)
    nz = float(np.linalg.norm(z))
    Rz = apply_R(sys, z)
    if sel.m_i == sel.m_j or is_degenerate(Rz, nz):
        return PeriodicityCheck(float(np.linalg.norm(Rz)) / nz, 0.0, True)
    lam = lambda_of_eps(sel.m_i, sel.m_j, eps)
    RRz = apply_R(sys, Rz, nz)
    return PeriodicityCheck(float(np.linalg.norm(RRz - lam * z)) / nz, lam, False)
