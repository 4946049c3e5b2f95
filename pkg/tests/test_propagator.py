import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from restarted_aa.iterations import SymmetricSystem
from restarted_aa.linalg import DegenerateVectorError, eig_sym
from restarted_aa.propagator import (
    EigenPairSelection,
    R_closed_form,
    apply_R,
    beta_of,
    eps_max,
    lambda_max,
    lambda_of_eps,
    lambda_of_eps_array,
    verify_four_periodicity,
)

from conftest import orthogonal, system_2x2

eig = st.floats(-0.95, 0.95).filter(lambda m: abs(m) > 1e-3)
eps_st = st.floats(1e-2, 1e2) | st.floats(-1e2, -1e-2)


def embedded(seed, m_i, m_j, n):
    r = np.random.default_rng(seed)
    Q = orthogonal(r, n)
    rest = r.uniform(-0.9, 0.9, n - 2)
    sys = SymmetricSystem.from_eigen([m_i, m_j, *rest], Q)
    return sys, EigenPairSelection(m_i, m_j, Q[:, 0], Q[:, 1])


@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.sampled_from([1.0, -2.0, 1e-5, 1e5]))
def test_R_annihilates_eigenvectors(seed, n, c):
    r = np.random.default_rng(seed)
    m = r.uniform(-3, 3, n)
    # the error scales like eps * ||M||^2 / |1 - m|; keep A reasonably conditioned
    m = np.where(np.abs(m - 1.0) < 0.01, m + 0.02, m)
    sys = SymmetricSystem.from_eigen(m, orthogonal(r, n))
    d = eig_sym(sys.M)
    for i in range(n):
        v = c * d.vector(i)
        assert np.linalg.norm(apply_R(sys, v, scale=0.0)) <= 1e-12 * np.linalg.norm(v)


@given(st.integers(0, 2**32 - 1), eig, eig, eps_st, st.floats(1e-3, 1e3), st.integers(2, 6))
def test_R_matches_closed_form_on_eigenplane(seed, m_i, m_j, eps, c_i, n):
    sys, sel = embedded(seed, m_i, m_j, n)
    z = sel.z(eps, c_i)
    got = apply_R(sys, z, scale=0.0)
    assert np.linalg.norm(got - R_closed_form(sel, eps, c_i)) <= 1e-12 * np.linalg.norm(z)


@given(st.integers(0, 2**32 - 1), eig, eig, st.floats(0.1, 10) | st.floats(-10, -0.1), st.integers(2, 6))
def test_four_step_eigenrelation(seed, m_i, m_j, eps, n):
    assume(abs(m_i - m_j) > 1e-3)
    sys, sel = embedded(seed, m_i, m_j, n)
    res = verify_four_periodicity(sys, sel, eps)
    assert not res.degenerate
    assert res.discrepancy <= 1e-10
    z = sel.z(eps)
    RRz = apply_R(sys, apply_R(sys, z), np.linalg.norm(z))
    assert np.linalg.norm(RRz - lambda_of_eps(m_i, m_j, eps) * z) <= 1e-10 * np.linalg.norm(z)


def test_four_step_equal_eigenvalues_is_degenerate():
    sys, sel = embedded(3, 0.4, 0.4, 4)
    res = verify_four_periodicity(sys, sel, 0.7)
    assert res.degenerate and res.lam == 0.0
    assert res.discrepancy <= 1e-14


@given(eig, eig, eps_st)
def test_lambda_even_and_nonnegative(m_i, m_j, eps):
    lam = lambda_of_eps(m_i, m_j, eps)
    assert lam >= 0
    assert lam == lambda_of_eps(m_i, m_j, -eps)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_lambda_max_dominates_grid(m_i, m_j):
    assume(min(abs(m_i), abs(m_j), abs(m_i - 1), abs(m_j - 1), abs(m_i - m_j)) > 1e-2)
    e = eps_max(m_i, m_j)
    lam_star = lambda_of_eps(m_i, m_j, e[0])
    grid = np.logspace(-3, 3, 20001)
    assert np.max(lambda_of_eps_array(m_i, m_j, grid)) <= lam_star * (1 + 1e-12)
    assert lambda_of_eps(m_i, m_j, e[1]) == pytest.approx(lam_star, rel=1e-12)
    assert lambda_max(m_i, m_j) == pytest.approx(lam_star, rel=1e-12)


def test_reference_values():
    assert lambda_of_eps(0.5, -0.5, 1.0) == pytest.approx(0.05, rel=1e-14)
    assert lambda_max(0.5, -0.5) == pytest.approx(0.0625, rel=1e-14)
    e = eps_max(0.5, -0.5)
    assert e[0] == pytest.approx(math.sqrt(1 / 3), rel=1e-14) and e[1] == -e[0]
    assert lambda_max(2.0, 0.5) == pytest.approx((1.5 / 2.25) ** 2, rel=1e-14)
    assert lambda_of_eps(0.9, 0.3, 1.0) == pytest.approx(0.05832, rel=1e-12)


def test_lambda_array_matches_scalar():
    eps = np.array([0.1, -0.5, 2.0, 30.0])
    np.testing.assert_allclose(lambda_of_eps_array(0.7, -0.2, eps),
                               [lambda_of_eps(0.7, -0.2, e) for e in eps], rtol=1e-15)


@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 1e6))
def test_R_is_positively_homogeneous(seed, c):
    r = np.random.default_rng(seed)
    sys = SymmetricSystem.from_eigen(r.uniform(-0.9, 0.9, 3), orthogonal(r, 3))
    v = r.standard_normal(3)
    assert beta_of(sys, c * v, scale=0.0) == pytest.approx(beta_of(sys, v), rel=1e-10, abs=1e-12)
    np.testing.assert_allclose(apply_R(sys, c * v, scale=0.0), c * apply_R(sys, v),
                               rtol=1e-9, atol=1e-12 * c * np.linalg.norm(v))


def test_beta_of_degenerate():
    sys, _ = system_2x2(0.5, 0.1)
    with pytest.raises(DegenerateVectorError):
        beta_of(sys, np.zeros(2))


@pytest.mark.parametrize("args", [(1.0, 0.5, 1.0), (0.5, 0.2, 0.0), (0.5, 0.2, math.inf),
                                  (math.nan, 0.2, 1.0)])
def test_lambda_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        lambda_of_eps(*args)


@pytest.mark.parametrize("pair", [(0.0, 0.5), (0.5, 0.5), (1.0, 0.3)])
def test_eps_max_rejects_degenerate(pair):
    with pytest.raises(ValueError):
        eps_max(*pair)
    with pytest.raises(ValueError):
        lambda_max(*pair)


def test_selection_requires_orthogonal_vectors():
    with pytest.raises(ValueError):
        EigenPairSelection(0.5, 0.2, np.array([1.0, 0.0]), np.array([1.0, 1.0]))


def test_selection_from_system():
    sys, V = system_2x2(0.8, -0.3, theta=0.9)
    sel = EigenPairSelection.from_system(sys, 0, 1)
    assert sel.m_i == pytest.approx(-0.3) and sel.m_j == pytest.approx(0.8)
    assert abs(abs(sel.v_i @ V[:, 1]) - 1) < 1e-14
