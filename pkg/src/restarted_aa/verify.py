"""Seeded batch checks of the closed-form theory against direct computation.

Each property draws its instances from its own Philox stream spawned from a
single 64-bit seed, so one property's sample count never shifts another's
random numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convergence import estimate_rho, rho_closed_form_2x2, worst_case_2x2
from .iterations import SolverConfig, SymmetricSystem, Termination, run_picard, run_restarted_aa1
from .linalg import eig_sym
from .propagator import (
    EigenPairSelection,
    R_closed_form,
    apply_R,
    eps_max,
    lambda_max,
    lambda_of_eps,
    lambda_of_eps_array,
    verify_four_periodicity,
)

EPS_GRID = np.logspace(-3, 3, 100_000)


def make_rng(seed: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_eigenvalue(rng: np.random.Generator, lo: float = -0.95, hi: float = 0.95,
                      min_abs: float = 0.0) -> float:
    while True:
        m = float(rng.uniform(lo, hi))
        if abs(m) >= min_abs and m != 0.0 and abs(m - 1.0) > 0.05:
            return m


def random_pair(rng, lo=-0.95, hi=0.95, min_abs=0.0, min_gap=0.0) -> tuple[float, float]:
    while True:
        m1 = random_eigenvalue(rng, lo, hi, min_abs)
        m2 = random_eigenvalue(rng, lo, hi, min_abs)
        if abs(m1 - m2) > max(min_gap, 0.0) and m1 != m2:
            return m1, m2


def random_eps(rng, lo: float, hi: float) -> float:
    e = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi))
    return float(e if rng.random() < 0.5 else -e)


def embedded_system(rng, m_i: float, m_j: float, n: int) -> tuple[SymmetricSystem, EigenPairSelection]:
    """n x n system with eigenpairs (m_i, Q[:,0]), (m_j, Q[:,1]) and filler eigenvalues."""
    Q = random_orthogonal(rng, n)
    rest = [random_eigenvalue(rng) for _ in range(n - 2)]
    sys = SymmetricSystem.from_eigen([m_i, m_j, *rest], Q)
    return sys, EigenPairSelection(m_i, m_j, Q[:, 0], Q[:, 1])


def check_eigenvector_annihilation(rng) -> bool:
    n = int(rng.integers(2, 11))
    m = [random_eigenvalue(rng, -3.0, 3.0) for _ in range(n)]
    sys = SymmetricSystem.from_eigen(m, random_orthogonal(rng, n))
    d = eig_sym(sys.M)
    for i in range(n):
        for c in (1.0, -1.0, 1e-6, 1e6):
            cv = c * d.vector(i)
            if np.linalg.norm(apply_R(sys, cv, scale=0.0)) > 1e-12 * np.linalg.norm(cv):
                return False
    return True


def check_plane_closed_form(rng, degenerate: bool = False) -> bool:
    m_i, m_j = random_pair(rng)
    if degenerate:
        m_j = m_i
    eps = random_eps(rng, 1e-2, 1e2)
    c_i = random_eps(rng, 1e-3, 1e3)
    sys, sel = embedded_system(rng, m_i, m_j, int(rng.integers(2, 7)))
    z = sel.z(eps, c_i)
    got = apply_R(sys, z, scale=0.0)
    want = R_closed_form(sel, eps, c_i)
    return bool(np.linalg.norm(got - want) <= 1e-12 * np.linalg.norm(z))


def check_four_step_eigenrelation(rng, degenerate: bool = False) -> bool:
    m_i, m_j = random_pair(rng)
    if degenerate:
        m_j = m_i
    eps = random_eps(rng, 1e-1, 1e1)
    sys, sel = embedded_system(rng, m_i, m_j, int(rng.integers(2, 7)))
    res = verify_four_periodicity(sys, sel, eps)
    if degenerate:
        return res.degenerate and res.discrepancy <= 1e-14
    return res.discrepancy <= 1e-10


def check_eps_maximizer(rng) -> bool:
    m_i, m_j = random_pair(rng)
    e = eps_max(m_i, m_j)
    lam_star = lambda_of_eps(m_i, m_j, e[0])
    grid_max = float(np.max(lambda_of_eps_array(m_i, m_j, EPS_GRID)))
    return (grid_max <= lam_star + 1e-12
            and abs(lambda_of_eps(m_i, m_j, e[1]) - lam_star) <= 1e-12
            and abs(lambda_max(m_i, m_j) - lam_star) <= 1e-12)


def _rotation(rng) -> np.ndarray:
    th = float(rng.uniform(0.0, math.pi))
    return np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])


def check_simulated_rho(rng, degenerate: bool = False) -> bool:
    V = _rotation(rng)
    if degenerate:
        m = random_eigenvalue(rng)
        sys = SymmetricSystem.from_eigen([m, m], V)
        r0 = V[:, 0] + random_eps(rng, 0.2, 5.0) * V[:, 1]
        tr = run_restarted_aa1(sys, sys.x0_for_residual(r0), SolverConfig(max_iters=4))
        return bool(np.min(tr.residual_norms[:5]) <= 1e-12 * tr.residual_norms[0])
    m1, m2 = random_pair(rng, min_abs=0.1, min_gap=0.1)
    eps = random_eps(rng, 0.2, 5.0)
    sys = SymmetricSystem.from_eigen([m1, m2], V)
    r0 = V[:, 0] + eps * V[:, 1]
    tr = run_restarted_aa1(sys, sys.x0_for_residual(r0), SolverConfig(max_iters=200))
    return abs(estimate_rho(tr, burn_in=0) - rho_closed_form_2x2(m1, m2, eps)) <= 1e-3


def check_aa_beats_picard(rng, antidiagonal: bool = False) -> bool:
    m1, m2 = random_pair(rng)
    if antidiagonal:
        m2 = -m1
    wc = worst_case_2x2(m1, m2)
    if antidiagonal:
        return abs(wc.rho_worst_aa - wc.rho_worst_pi) <= 1e-14
    return wc.rho_worst_aa < wc.rho_worst_pi


def check_noncontractive_convergence(rng) -> bool:
    while True:
        m1, m2 = random_pair(rng, -3.0, 3.0, min_abs=0.05, min_gap=0.05)
        wc = worst_case_2x2(m1, m2)
        if max(abs(m1), abs(m2)) > 1.05 and wc.rho_worst_aa < 0.99:
            break
    V = _rotation(rng)
    sys = SymmetricSystem.from_eigen([m1, m2], V)
    r0 = V @ wc.r0_worst_direction
    tr = run_restarted_aa1(sys, sys.x0_for_residual(r0), SolverConfig(max_iters=200))
    if tr.termination is Termination.DIVERGED:
        return False
    converged = tr.residual_norms[-1] < tr.residual_norms[0]
    pic = run_picard(sys, sys.x0_for_residual(r0), SolverConfig(max_iters=200))
    return (converged and pic.residual_norms[-1] > pic.residual_norms[0]
            and abs(estimate_rho(tr, burn_in=0) - wc.rho_worst_aa) <= 1e-3)


@dataclass(frozen=True)
class Property:
    name: str
    check: Callable
    special_every: int = 0  # every k-th sample exercises the special branch


PROPERTIES = (
    Property("eigenvector-annihilation", check_eigenvector_annihilation),
    Property("plane-closed-form", check_plane_closed_form, 10),
    Property("four-step-eigenrelation", check_four_step_eigenrelation, 10),
    Property("eps-maximizer-oracle", check_eps_maximizer),
    Property("simulation-vs-closed-form", check_simulated_rho, 10),
    Property("aa-beats-picard", check_aa_beats_picard, 10),
    Property("noncontractive-convergence", check_noncontractive_convergence),
)


def run_verification(seed: int, samples: int) -> dict[str, tuple[int, int]]:
    """Return ``{property: (passed, total)}``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    out = {}
    for stream, prop in enumerate(PROPERTIES):
        rng = make_rng(seed, stream)
        passed = 0
        for s in range(samples):
            special = prop.special_every and s % prop.special_every == prop.special_every - 1
            ok = prop.check(rng, True) if special else prop.check(rng)
            passed += bool(ok)
        out[prop.name] = (passed, samples)
    return out
