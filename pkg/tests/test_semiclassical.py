from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dsgpotts.core_algebra import make_root_context, relative_residual
from dsgpotts.errors import BranchDomainError
from dsgpotts.semiclassical import (
    H,
    F1,
    Htilde,
    dilog,
    involution_residual,
    prop_a_residual,
    prop_b_residual,
    rbar,
    saddle_maps,
    substitution_invariants,
    twelve_term_residual,
    twelve_term_sides,
    twisted_params,
    twisted_ybe_residual,
    twisted_ybe_sides,
    variab_c_residual,
)

# frozen from 30-digit adaptive quadrature of -int_0^1 log(1 - t z) / t dt
LI2_ORACLE = [
    (1, 1.6449340668482264365),
    (-1, -0.82246703342411321824),
    (0.5, 0.5822405264650125059),
    (1j, -0.20561675835602830456 + 0.91596559417721901505j),
    (0.3 + 0.4j, 0.26659686674274041589 + 0.46136289181910899428j),
    (-3.7, -2.2468839533197609397),
    (2 + 1j, 1.1866885370000578311 + 2.4077407693457720017j),
    (-0.9 - 2.5j, -1.2221262668271144787 - 1.5269868758228839695j),
    (0.95, 1.4406337969700393438),
]
H_ORACLE = [((2.0, 3.0), 0.71064394362637626238), ((0.5, 7.0), -0.65296421215733548383)]
DH_DA_2_3 = 0.61418394320532599708


@pytest.mark.parametrize("z, expected", LI2_ORACLE)
def test_dilog_against_quadrature(z, expected):
    assert abs(dilog(z) - expected) < 1e-12


def test_dilog_zero_and_cut():
    assert dilog(0) == 0
    with pytest.raises(BranchDomainError):
        dilog(2.0)
    above, below = dilog(2.0, side="above"), dilog(2.0, side="below")
    assert above.real == pytest.approx(math.pi**2 / 4, abs=1e-14)
    assert above.imag == pytest.approx(math.pi * math.log(2), abs=1e-14)
    assert below == pytest.approx(above.conjugate())


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
def test_dilog_reflection_and_derivative(z):
    if abs(z) < 1e-3 or abs(1 - z) < 1e-3 or (abs(z.imag) < 1e-9 and z.real > 1):
        return
    # derivative: d/dz Li2(z) = -log(1 - z) / z
    h = 1e-6 * max(1, abs(z))
    num = (dilog(z + h) - dilog(z - h)) / (2 * h)
    if abs(z.imag) > 2 * h or z.real < 1:
        assert abs(num + cmath.log(1 - z) / z) < 1e-5 * max(1, abs(num))


@pytest.mark.parametrize("ab, expected", H_ORACLE)
def test_H_frozen(ab, expected):
    assert abs(H(*ab) - expected) < 1e-13


@given(st.floats(0.01, 100))
def test_H_normalisation(x):
    assert abs(H(1.0, x)) < 1e-13


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_H_inversion_symmetry(a, b):
    assert abs(H(a, b) - H(a, 1 / b)) < 1e-12 * max(1, abs(H(a, b)))


def test_H_derivative_finite_difference():
    h = 1e-5
    fd = (H(2 + h, 3.0) - H(2 - h, 3.0)) / (2 * h)
    assert abs(fd - DH_DA_2_3) < 1e-7


def test_H_domain():
    with pytest.raises(BranchDomainError):
        H(-2.0, 1.0)
    with pytest.raises(BranchDomainError):
        H(1.0, 0.0)


def test_Htilde():
    ctx = make_root_context(3)
    assert Htilde(1.2, 0.8, ctx) == pytest.approx(H(1.2**3, 0.8**3) / 9)


@pytest.mark.parametrize("N", range(1, 8))
def test_rbar_properties(N):
    ctx = make_root_context(N)
    r = np.random.default_rng(N)
    worst_a = worst_b = 0.0
    for _ in range(100):
        lam, x = np.exp(r.uniform(-1.5, 1.5, 2))
        assert abs(rbar(ctx, 1.0, x) - 1) < 1e-14
        worst_b = max(worst_b, prop_b_residual(ctx, lam, x))
        worst_a = max(worst_a, prop_a_residual(ctx, lam, x))
    assert worst_a < 1e-10 and worst_b < 1e-10


def test_twisted_params_trivial_limits():
    ctx = make_root_context(3)
    sp = twisted_params(ctx, 1.0, 1.7, 0.3, -0.2)
    assert abs(sp.eNP_prime - cmath.exp(3 * 0.3)) < 1e-13
    sp = twisted_params(ctx, 1.4, 1.0, 0.3, -0.2)
    assert abs(sp.eNQ_prime - cmath.exp(3 * -0.2)) < 1e-13


def test_twisted_params_closed_forms():
    N = 4
    ctx = make_root_context(N)
    lam, mu, P, Q = 1.3, 0.6, 0.25, -0.4
    sp = twisted_params(ctx, lam, mu, P, Q)
    l, m, eP, eQ = lam**N, mu**N, math.exp(N * P), math.exp(N * Q)
    assert sp.eNP_prime == pytest.approx(eP * (1 + l * eQ) / (l + eQ))
    assert sp.eNQ_prime == pytest.approx(eQ * (m + eP) / (1 + m * eP))
    assert sp.eNP_dprime == pytest.approx(eP * (1 + l * m * sp.eNQ_prime) / (l * m + sp.eNQ_prime))
    assert sp.eNQ_dprime == pytest.approx(eQ * (l * m + sp.eNP_prime) / (1 + l * m * sp.eNP_prime))
    assert cmath.exp(N * sp.P_prime) == pytest.approx(sp.eNP_prime)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_twisted_ybe(N):
    ctx = make_root_context(N)
    r = np.random.default_rng(10 + N)
    worst = 0.0
    for _ in range(50):
        lam, mu = np.exp(r.uniform(-1, 1, 2))
        P, Q = r.uniform(-1, 1, 2)
        worst = max(worst, twisted_ybe_residual(ctx, lam, mu, P, Q))
    assert worst < 1e-9


def test_twisted_ybe_trivial():
    ctx = make_root_context(3)
    assert twisted_ybe_residual(ctx, 1.0, 1.0, 0.3, 0.2) < 1e-15


@pytest.mark.parametrize("N", [2, 3])
def test_twist_is_essential(N):
    ctx = make_root_context(N)
    sp = twisted_params(ctx, 3.0, 0.3, 1.5, -1.5)
    lhs, rhs = twisted_ybe_sides(ctx, sp)
    assert relative_residual(lhs, rhs) < 1e-12
    untwisted = {"P_prime": sp.P, "Q_prime": sp.Q, "P_dprime": sp.P, "Q_dprime": sp.Q}
    for name, value in untwisted.items():
        lhs, rhs = twisted_ybe_sides(ctx, dataclasses.replace(sp, **{name: value}))
        assert relative_residual(lhs, rhs) > 5e-3, name


def test_saddle_maps_trivial():
    x, y, xpp, ypp = saddle_maps(1.0, 1.0, 2.3, 0.7)
    assert (x, y, xpp, ypp) == pytest.approx((2.3, 0.7, 0.7, 2.3))


@given(*(st.floats(0.1, 10) for _ in range(4)))
def test_saddle_involution_and_consistency(lam, mu, x, y):
    assert involution_residual(lam, mu, x, y) < 1e-12
    assert variab_c_residual(lam, mu, x, y) < 1e-12


def test_twelve_term_fixing_point_and_trivial():
    assert twelve_term_residual(2.0, 3.0, 1.0, 1.0) < 1e-10
    lhs, rhs = twelve_term_sides(1.0, 1.0, 2.0, 5.0)
    assert abs(lhs) < 1e-14 and abs(rhs) < 1e-14


def test_twelve_term_random():
    r = np.random.default_rng(5)
    worst = max(twelve_term_residual(*r.uniform(0.1, 10, 4)) for _ in range(200))
    assert worst < 1e-9


def test_twelve_term_difference_is_constant():
    r = np.random.default_rng(6)
    h = 1e-5

    def diff(v):
        lhs, rhs = twelve_term_sides(*v)
        return (lhs - rhs).real

    for _ in range(10):
        v = r.uniform(0.5, 5, 4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = h
            assert abs((diff(v + e) - diff(v - e)) / (2 * h)) < 1e-7


def test_twelve_term_rejects_nonpositive():
    with pytest.raises(BranchDomainError):
        twelve_term_residual(-1.0, 2.0, 1.0, 1.0)
    with pytest.raises(BranchDomainError):
        twelve_term_residual(1.0, 2.0, 1.0 + 0.5j, 1.0)


def test_full_log_square_breaks_identity():
    lhs, rhs = twelve_term_sides(2.0, 3.0, 1.5, 0.7, full_log_square=True)
    assert abs(lhs - rhs) > 1e-6


@given(*(st.floats(0.1, 10) for _ in range(4)))
def test_invariants(lam, mu, x, y):
    f0, f1, f1_res = substitution_invariants(lam, mu, x, y)
    assert f1 == pytest.approx(F1(lam, mu, x, y))
    assert f1_res < 1e-12
    assert f0 < 1e-9


def test_invariants_trivial():
    f0, f1, f1_res = substitution_invariants(1.0, 1.0, 2.0, 3.0)
    assert f1_res < 1e-12 and f0 < 1e-12
