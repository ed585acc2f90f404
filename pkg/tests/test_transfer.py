from __future__ import annotations

import numpy as np
import pytest

from dsgpotts.core_algebra import make_root_context, relative_residual
from dsgpotts.curve import random_modulus, sample_points
from dsgpotts.errors import DimensionCapError
from dsgpotts.transfer import (
    SpinLattice,
    brute_force_partition,
    chain_transfer,
    combinations_residual,
    gauge_invariance_residual,
    gauge_transform,
    l_operator,
    partition_trace,
    random_chain,
    row_transfer,
    six_vertex_r,
    u_quant,
    u_quant_operator_form,
    w_preserving_scalings,
    weyl_pair,
    weyl_residual,
    weyl_site_dimension,
    ybe_a_residual,
    ybe_b_residual,
)
from dsgpotts.weights import weight_tables


def _rc(rng):
    return complex(*rng.normal(size=2))


def test_six_vertex_r_at_one():
    R = six_vertex_r(1.0, 1.7)
    assert R.mat[0, 0] == pytest.approx(1.7 - 1 / 1.7)
    assert R.mat[1, 1] == 0
    assert R.mat[1, 2] == pytest.approx(1.7 - 1 / 1.7)


def test_ybe_a():
    rng = np.random.default_rng(1)
    assert max(ybe_a_residual(_rc(rng), _rc(rng), _rc(rng)) for _ in range(100)) < 1e-12


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_weyl_and_ybe_b(N):
    ctx = make_root_context(N)
    rng = np.random.default_rng(N)
    assert weyl_site_dimension(ctx) == (N if N % 2 else 2 * N)
    worst = 0.0
    for _ in range(20):
        U, V = weyl_pair(ctx, _rc(rng), _rc(rng))
        assert weyl_residual(U, V, ctx.q0) < 1e-13
        worst = max(worst, ybe_b_residual(_rc(rng), _rc(rng), ctx.q0, U, V))
    assert worst < 1e-12


def test_l_operator_shape():
    U, V = weyl_pair(make_root_context(3))
    assert l_operator(0.5, U, V).dim == 6


@pytest.mark.parametrize("N", [2, 3])
def test_transfer_commutes_and_gauge(N):
    ctx = make_root_context(N)
    rng = np.random.default_rng(N)
    ch = random_chain(ctx, 2, _rc(rng), rng)
    t1, t2 = chain_transfer(ch, _rc(rng)), chain_transfer(ch, _rc(rng))
    assert relative_residual(t1 @ t2, t2 @ t1) < 1e-10
    c, d = w_preserving_scalings(4, rng)
    ch2 = gauge_transform(ch, c, d)
    assert combinations_residual(ch, ch2) < 1e-12
    assert gauge_invariance_residual(ch, ch2, _rc(rng)) < 1e-11


def test_gauge_breaking_scaling_changes_transfer():
    ctx = make_root_context(2)
    rng = np.random.default_rng(4)
    ch = random_chain(ctx, 2, 1.3, rng)
    ch2 = gauge_transform(ch, [2.0, 1, 1, 1], [1, 1, 1, 1])
    assert gauge_invariance_residual(ch, ch2, 0.7 + 0.2j) > 1e-3


def test_transfer_is_polynomial_in_lambda_squared():
    ctx = make_root_context(2)
    rng = np.random.default_rng(8)
    L = 2
    ch = random_chain(ctx, L, 1.2, rng)
    nodes = np.array([np.exp(0.3j * i) * (0.5 + 0.1 * i) for i in range(2 * L + 1)])
    vals = np.array([chain_transfer(ch, z).mat.ravel() for z in nodes])
    coef = np.linalg.solve(np.vander(nodes**2, 2 * L + 1), vals)
    z = 0.9 + 0.2j
    pred = (np.vander([z**2], 2 * L + 1) @ coef).ravel()
    exact = chain_transfer(ch, z).mat.ravel()
    assert np.abs(pred - exact).max() < 1e-9 * np.abs(exact).max()


def test_chain_cap():
    ctx = make_root_context(4)
    with pytest.raises(DimensionCapError):
        random_chain(ctx, 3, 1.0, np.random.default_rng(0))


def _points(N, n, seed):
    ctx = make_root_context(N)
    rng = np.random.default_rng(seed)
    return ctx, sample_points(random_modulus(rng), n, seed, ctx)


def test_row_transfer_elements():
    ctx, (p, q) = _points(2, 2, 3)
    T, _ = row_transfer(p, p, q, 2, ctx)
    tab = weight_tables(p, q, ctx)
    for a in range(4):
        for b in range(4):
            sa, sb = divmod(a, 2), divmod(b, 2)
            expect = 1
            for J in range(2):
                expect *= tab.w(sa[J] - sb[J]) * tab.wbar(sa[(J + 1) % 2] - sb[J])
            assert T.mat[a, b] == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("N, L", [(2, 2), (3, 2), (2, 3)])
def test_row_transfer_commuting_family(N, L):
    ctx, (p, pp, q, qq) = _points(N, 4, 5)
    T1, Th1 = row_transfer(p, pp, q, L, ctx)
    T2, Th2 = row_transfer(p, pp, qq, L, ctx)
    A, B = T1 @ Th1, T2 @ Th2
    assert relative_residual(A @ B, B @ A) < 1e-9


@pytest.mark.parametrize("N, L", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_u_quant_two_constructions(N, L):
    ctx, (p, q) = _points(N, 2, 7)
    U1, U2 = u_quant(p, q, L, ctx), u_quant_operator_form(p, q, L, ctx)
    assert np.abs(U1.mat - U2.mat).max() < 1e-11 * np.abs(U1.mat).max()


def test_partition_scalar_case():
    ctx, (p, q) = _points(1, 2, 2)
    tab = weight_tables(p, q, ctx)
    U = u_quant(p, q, 3, ctx)
    w = (tab.w(0) * tab.wbar(0)) ** 3
    assert partition_trace(U, 2) == pytest.approx(w**2)
    assert brute_force_partition(SpinLattice(3, 2, 1), p, q, ctx) == pytest.approx(w**2)


@pytest.mark.parametrize("N, L, M", [(2, 2, 1), (2, 2, 2), (3, 2, 2), (2, 3, 3), (4, 2, 3)])
def test_partition_matches_brute_force(N, L, M):
    ctx, (p, q) = _points(N, 2, 11)
    a = partition_trace(u_quant(p, q, L, ctx), M)
    b = brute_force_partition(SpinLattice(L, M, N), p, q, ctx)
    assert abs(a - b) < 1e-10 * abs(b)


def test_caps():
    ctx, (p, q) = _points(2, 2, 1)
    with pytest.raises(DimensionCapError):
        brute_force_partition(SpinLattice(4, 5, 2), p, q, ctx)
    with pytest.raises(DimensionCapError):
        u_quant(p, q, 13, ctx)
    with pytest.raises(ValueError):
        partition_trace(u_quant(p, q, 2, ctx), 0)
