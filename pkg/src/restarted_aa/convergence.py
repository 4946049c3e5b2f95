"""Root-convergence factors: measured from traces and predicted for 2x2 systems.

The r-linear factor of a run is rho(r0) = limsup ||r_k||^{1/k}.  For 2x2
symmetric M with eigenpairs (m1, v1), (m2, v2) and r0 = c1 (v1 + eps v2),
restarted AA(1) has rho(r0) = lambda(eps)^{1/4}, and the worst case over r0
is attained at eps = +-eps_max(m1, m2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .iterations import IterationTrace, SolverConfig, SymmetricSystem, Termination, run
from .linalg import as_vector, eig_sym
from .propagator import eps_max, lambda_of_eps

# |r0 . v| <= PURE_RTOL * ||r0|| counts as a missing eigencomponent.
PURE_RTOL = 1e-14
# Below this, norms are subnormal or nearly so and have lost relative precision.
UNDERFLOW = float(np.finfo(np.float64).tiny / np.finfo(np.float64).eps)


def _check_m(m1: float, m2: float) -> tuple[float, float]:
    m1, m2 = float(m1), float(m2)
    if not (math.isfinite(m1) and math.isfinite(m2)):
        raise ValueError("eigenvalues must be finite")
    if m1 == 1.0 or m2 == 1.0:
        raise ValueError("an eigenvalue equal to 1 makes A = I - M singular")
    return m1, m2


def estimate_rho(trace: IterationTrace | np.ndarray, burn_in: int = 8, period: int = 4) -> float:
    """Estimate the root-convergence factor from a residual-norm history.

    Fits log ||r_k|| = k log(rho) + c_{k mod period} by least squares over
    k >= burn_in and returns rho.  The per-phase offsets make the estimate
    exact for sequences whose ratios repeat with the given period (restarted
    AA(1) on two eigendirections has period 4).

    A history that reaches an exact zero before 8 usable norms, or a trace
    that stopped at the exact solution that early, gives 0 (finite
    termination).  Non-finite norms, and norms below UNDERFLOW, end the
    usable history; the rounding-level last norm of a trace that stopped at
    the exact solution is left out of the fit.

    Raises:
        ValueError: if fewer than 8 usable norms remain after `burn_in`.
    """
    if isinstance(trace, IterationTrace):
        norms = np.asarray(trace.residual_norms, dtype=np.float64)
        finite_stop = trace.termination is Termination.EXACT
    else:
        norms = np.asarray(trace, dtype=np.float64)
        finite_stop = False
    if burn_in < 0 or period < 1:
        raise ValueError("burn_in must be >= 0 and period >= 1")
    bad = np.flatnonzero(~np.isfinite(norms))
    if bad.size:
        norms = norms[: bad[0]]
        finite_stop = False
    tiny = np.flatnonzero(norms < UNDERFLOW)
    hit_zero = bool(tiny.size)
    usable = norms[: tiny[0]] if hit_zero else norms
    if finite_stop and not hit_zero and usable.size > burn_in + 8:
        usable = usable[:-1]
    tail = usable[burn_in:]
    if tail.size < 8:
        if finite_stop or hit_zero:
            return 0.0
        raise ValueError(f"need at least {burn_in + 8} residual norms, got {norms.size}")
    k = np.arange(burn_in, burn_in + tail.size, dtype=np.float64)
    phases = (np.arange(tail.size) + burn_in) % period
    X = np.zeros((tail.size, 1 + period))
    X[:, 0] = k - k.mean()
    X[np.arange(tail.size), 1 + phases] = 1.0
    X = X[:, np.concatenate(([True], np.bincount(phases, minlength=period) > 0))]
    coef, *_ = np.linalg.lstsq(X, np.log(tail), rcond=None)
    return float(math.exp(coef[0]))


def eigen_ratio_2x2(sys: SymmetricSystem, r0) -> tuple[float, float, float]:
    """(m1, m2, eps) for r0 = c1 (v1 + eps v2) in the eigenbasis of a 2x2 M.

    eps is 0.0 when r0 has no v2 component and inf when it has no v1
    component; both mark a pure eigendirection.
    """
    if sys.n != 2:
        raise ValueError("eigen_ratio_2x2 needs a 2x2 system")
    r0 = as_vector(r0, 2)
    d = eig_sym(sys.M)
    c1 = float(r0 @ d.vector(0))
    c2 = float(r0 @ d.vector(1))
    tol = PURE_RTOL * float(np.linalg.norm(r0))
    m1, m2 = float(d.eigenvalues[0]), float(d.eigenvalues[1])
    if abs(c1) <= tol:
        return m1, m2, math.inf
    if abs(c2) <= tol:
        return m1, m2, 0.0
    return m1, m2, c2 / c1


def rho_closed_form_2x2(m1: float, m2: float, eps: float) -> float:
    """Restarted AA(1) factor rho(r0) for r0 = c1 (v1 + eps v2).

    Zero when m1 = 0, m2 = 0, m1 = m2, or eps in {0, +-inf} (r0 along an
    eigenvector); lambda(eps)^{1/4} otherwise.
    """
    m1, m2 = _check_m(m1, m2)
    eps = float(eps)
    if m1 == 0.0 or m2 == 0.0 or m1 == m2 or eps == 0.0 or math.isinf(eps):
        return 0.0
    return lambda_of_eps(m1, m2, eps) ** 0.25


def rho_picard_2x2(m1: float, m2: float, eps: float) -> float:
    """Picard factor for r0 = c1 (v1 + eps v2): the largest |m| present in r0."""
    m1, m2 = _check_m(m1, m2)
    if math.isinf(eps):
        return abs(m2)
    if eps == 0.0:
        return abs(m1)
    return max(abs(m1), abs(m2))


def rho_worst_aa(m1, m2):
    """Worst-case restarted AA(1) factor; works elementwise on arrays.

    The m1 = 0, m2 = 0 and m1 = m2 cases are all zero.
    """
    m1 = np.asarray(m1, dtype=np.float64)
    m2 = np.asarray(m2, dtype=np.float64)
    num = np.abs(m1 * m2 * (m2 - m1))
    den = np.abs(m1 * (m1 - 1.0)) + np.abs(m2 * (m2 - 1.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sqrt(num / den)
    out = np.where(num == 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class WorstCase2x2:
    rho_worst_aa: float
    rho_worst_pi: float
    eps_worst: tuple[float, float]
    r0_worst_direction: np.ndarray


def worst_case_2x2(m1: float, m2: float, v1=None, v2=None) -> WorstCase2x2:
    """Worst-case restarted AA(1) and Picard factors for eigenvalues (m1, m2).

    The worst initial residual is returned as the unit vector along
    v1 + eps_max v2 (v1, v2 default to the coordinate axes).  When every r0
    gives rho = 0 (m1 = 0, m2 = 0 or m1 = m2), eps_worst is (1, -1) and any
    direction is a maximizer.
    """
    m1, m2 = _check_m(m1, m2)
    v1 = np.array([1.0, 0.0]) if v1 is None else as_vector(v1)
    v2 = np.array([0.0, 1.0]) if v2 is None else as_vector(v2, v1.size)
    rho_aa = rho_worst_aa(m1, m2)
    rho_pi = max(abs(m1), abs(m2))
    if m1 == 0.0 or m2 == 0.0 or m1 == m2:
        eps = (1.0, -1.0)
    else:
        eps = eps_max(m1, m2)
    if math.isinf(eps[0]):
        r0 = v2.copy()  # the maximizer lies along v2 in the limit
    else:
        r0 = v1 + eps[0] * v2
    r0 = r0 / np.linalg.norm(r0)
    r0.setflags(write=False)
    return WorstCase2x2(rho_aa, rho_pi, eps, r0)


class Comparison(str, enum.Enum):
    AA_BETTER = "aa-strictly-better"
    EQUAL = "equal"
    AA_WORSE = "aa-worse"


def in_contractive_range(m1: float, m2: float) -> bool:
    """0 < |m1|, |m2| < 1: the range where AA provably never loses to Picard."""
    return 0.0 < abs(m1) < 1.0 and 0.0 < abs(m2) < 1.0


def compare_aa_vs_picard(m1: float, m2: float) -> Comparison:
    """Compare worst-case factors of restarted AA(1) and Picard.

    For 0 < |m1|, |m2| < 1 the answer is EQUAL exactly on m1 = -m2 and
    AA_BETTER elsewhere; outside that range the two factors are compared
    directly.
    """
    wc = worst_case_2x2(m1, m2)
    if in_contractive_range(m1, m2):
        return Comparison.EQUAL if abs(m1 + m2) <= 1e-14 else Comparison.AA_BETTER
    diff = wc.rho_worst_aa - wc.rho_worst_pi
    if abs(diff) <= 1e-14 * max(1.0, wc.rho_worst_pi):
        return Comparison.EQUAL
    return Comparison.AA_BETTER if diff < 0 else Comparison.AA_WORSE


@dataclass(frozen=True)
class ConvergenceReport:
    rho_empirical: float
    rho_closed_form: float | None
    discrepancy: float | None
    k_used: int
    method: str


def analyze_run(sys: SymmetricSystem, x0, method: str, cfg: SolverConfig = SolverConfig(),
                burn_in: int = 8) -> ConvergenceReport:
    """Run a solver and compare its measured factor with the 2x2 prediction.

    A closed form is attached for ``picard`` and ``aa1-restarted`` on 2x2
    systems; windowed AA has none.
    """
    trace = run(sys, x0, method, cfg)
    rho = estimate_rho(trace, burn_in)
    closed = None
    if sys.n == 2 and method in ("picard", "aa1-restarted"):
        m1, m2, eps = eigen_ratio_2x2(sys, trace.residuals[0])
        if method == "picard":
            closed = rho_picard_2x2(m1, m2, eps)
        else:
            closed = rho_closed_form_2x2(m1, m2, eps)
    disc = None if closed is None else abs(rho - closed)
    return ConvergenceReport(rho, closed, disc, max(trace.n_steps + 1 - burn_in, 0), method)
