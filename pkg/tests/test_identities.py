import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import tridiagonal_det
from whdet.corpus import rational_pair
from whdet.errors import ConstraintViolated
from whdet.fredholm import det_finite
from whdet.identities import (
    IdentityParams,
    LabSymbol,
    check_doubled_projection,
    check_toeplitz_det,
    check_toeplitz_hankel,
    check_inverse_chain,
    check_multi_interval,
    check_regauge,
    check_s_identities,
    check_winding,
    upper_tail_det,
    lower_tail_det,
    f_n,
    inverse_chain,
    make_report,
)
from whdet.operators import L, P, Q_n, WindowSpec, realize, toeplitz_finite
from whdet.symbols import Symbol
from whdet.wiener_hopf import regauge

SCALAR = ["rp_05_03", "rp_02_04", "rp_c", "exp_02_01"]
BLOCK = ["cd_2", "cd_2c", "rd_2"]
ZERO_WINDING = SCALAR + BLOCK


def rp_lab():
    return LabSymbol(rational_pair(0.5, 0.3))


# -- report semantics --------------------------------------------------------------

def test_pass_rule_switches_to_absolute_below_one():
    p = IdentityParams(tol=1e-3)
    assert make_report("BO", p, 1e-4, 5e-4).passed  # abs err 4e-4
    assert not make_report("BO", p, 1e-4, 2e-3).passed
    big = make_report("BO", p, 1000.0, 1000.5)
    assert big.passed and big.rel_err == pytest.approx(5e-4)


def test_report_json_is_plain():
    r = make_report("EQ6", IdentityParams(n=2, s=0.5j), 1 + 1j, 1 + 1j, window=WindowSpec(-3, 3))
    j = r.to_json()
    assert j["lhs"] == {"re": 1.0, "im": 1.0}
    assert j["params"]["s"] == {"re": 0.0, "im": 0.5}
    assert j["diagnostics"]["window"] == [-3, 3]


# -- Toeplitz determinant via the tail formula ---------------------------------

def test_toeplitz_det_identity_symbol():
    r = check_toeplitz_det(Symbol.identity(), 4)
    assert r.lhs == 1 and abs(r.rhs - 1) < 1e-14 and r.passed


def test_toeplitz_det_rational_pair_n10():
    r = check_toeplitz_det(rp_lab(), 10)
    expected = (1 - 0.15**11) / 0.85
    assert abs(r.lhs - expected) < 1e-12 * expected
    assert abs(r.rhs - expected) < 1e-9 * expected


@pytest.mark.parametrize("name", BLOCK)
def test_toeplitz_det_block(name, labs):
    r = check_toeplitz_det(labs[name], 6, tol=1e-7)
    assert r.passed, r


# -- doubled projection form ----------------------------------------------------

def test_doubled_projection_identity_symbol():
    _, r5 = check_doubled_projection(Symbol.identity(), 3)
    assert r5.lhs == pytest.approx(8, abs=1e-12)
    assert r5.rhs == pytest.approx(8, abs=1e-12)


def test_doubled_projection_rational_pair():
    r4, r5 = check_doubled_projection(rp_lab(), 5)
    assert r4.rel_err < 1e-8 and r5.rel_err < 1e-8
    assert r4.lhs == pytest.approx(tridiagonal_det(0.5, 0.3, 5), rel=1e-13)


def test_doubled_projection_block_needs_power_of_two(labs):
    r4, r5 = check_doubled_projection(labs["cd_2"], 4)
    assert r4.passed and r5.passed
    assert r5.diagnostics["ratio"] == pytest.approx(2**8, rel=1e-8)
    # dropping the 2^{-nN} factor would be off by 256
    assert abs(r4.rhs * 2**8 - r4.lhs) > 100 * abs(r4.lhs)


# -- f_n ---------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [-2, 0, 3])
def test_f_n_at_zero(n, labs):
    assert f_n(labs["cd_2"], n, 0).value == 1


@pytest.mark.parametrize("N,n", [(1, 0), (1, 4), (2, 3)])
def test_f_n_identity_symbol(N, n):
    s = 0.3 + 0.2j
    assert f_n(Symbol.identity(N), n, s).value == pytest.approx((1 + s) ** (n * N), rel=1e-14)


def test_f_n_shift():
    assert f_n(Symbol.monomial(1), 3, 0.7).value == pytest.approx(1.7**4, rel=1e-14)


# -- the two tail forms of f_n and their product ---------------------------------

def test_s_identities_at_zero(labs):
    for r in check_s_identities(labs["rp_05_03"], 2, 0):
        assert r.lhs == 1 and r.rhs == 1


@pytest.mark.parametrize("n", [2, -2])
def test_s_identities_rational_pair(n):
    r6, r7, r9 = check_s_identities(rp_lab(), n, 0.5)
    assert r6.rel_err < 1e-8 and r7.rel_err < 1e-8 and r9.rel_err < 1e-8


@pytest.mark.parametrize("name", ZERO_WINDING)
def test_upper_and_lower_tail_sides_agree(name, labs):
    lab = labs[name]
    N = lab.N
    for n in (-3, 1, 4):
        for s in (0.6, -0.4j):
            r6 = (1 + s) ** (n * N) * upper_tail_det(lab, n, s).value
            r7 = (1 - s) ** (-n * N) * lower_tail_det(lab, n, s).value
            assert abs(r6 - r7) < 1e-9 * max(1, abs(r6))


def test_product_identity_from_computed_sides(labs):
    # (1+s)^{nN} det6(s) * (1-(-s))^{-nN} det7(-s) ... evaluated at (s, -s): prefactors cancel
    lab = labs["cd_2c"]
    n, s = 3, 0.4 + 0.1j
    N = lab.N
    fs, fms = f_n(lab, n, s).value, f_n(lab, n, -s).value
    rhs6_s = (1 + s) ** (n * N) * upper_tail_det(lab, n, s).value
    rhs7_ms = (1 + s) ** (-n * N) * lower_tail_det(lab, n, -s).value
    assert abs(fs * fms - rhs6_s * rhs7_ms) < 1e-9 * abs(fs * fms)


def test_s_constraint():
    with pytest.raises(ConstraintViolated):
        check_s_identities(rp_lab(), 2, -1)
    with pytest.raises(ConstraintViolated):
        check_s_identities(rp_lab(), 2, 1)


def _cheb(m):
    return 0.8 * np.cos((2 * np.arange(m) + 1) * np.pi / (2 * m))


@pytest.mark.parametrize("name", ["rp_05_03", "rp_c", "exp_02_01", "cd_2", "rd_2"])
@pytest.mark.parametrize("n", [-3, 0, 3])
def test_f_n_is_polynomial_in_s(name, n, labs):
    lab = labs[name]
    K = realize(P() - L(lab.a) @ Q_n(n) @ L(lab.inverse), WindowSpec(-60, 60), lab.N)
    sv = np.linalg.svd(K, compute_uv=False)
    rank = int((sv > 1e-9).sum())
    nodes = _cheb(max(5, rank + 1))
    vals = [f_n(lab, n, s).value for s in nodes]
    coef = np.polynomial.polynomial.polyfit(nodes, vals, rank)
    for s in (0.55, -0.35):
        assert abs(np.polynomial.polynomial.polyval(s, coef) - f_n(lab, n, s).value) < 1e-6


# -- winding ------------------------------------------------------------------------------

def test_winding_shift_exact():
    r15, r16 = check_winding(Symbol.monomial(1), 3, 0.7)
    assert r15.identity_id == "EQ15"
    assert r15.lhs == pytest.approx(1.7**4, rel=1e-14)
    assert r15.rhs == pytest.approx(1.7**4, rel=1e-14)
    assert r16.passed


def test_winding_negative(labs):
    r15, r16 = check_winding(labs["chi_m1_rp"], 4, 0.4)
    assert r15.diagnostics["winding"] == -1
    assert r15.rel_err < 1e-8 and r16.rel_err < 1e-8


def test_winding_block_prefactor(labs):
    lab = labs["blk_w1"]
    r25, r26 = check_winding(lab, 2, 0.3)
    assert r25.identity_id == "EQ25" and r25.diagnostics["winding"] == 1
    assert r25.passed and r26.passed
    assert r25.rhs / r25.diagnostics["det"] == pytest.approx(1.3**5, rel=1e-14)


@pytest.mark.parametrize("name", ["chi_m2_rp", "chi_3_rp", "blk_w1_conj", "blk_partial"])
def test_winding_corpus(name, labs):
    for n in (-2, 0, 3):
        for r in check_winding(labs[name], n, 0.2 + 0.4j):
            assert r.passed, r.to_json()


# -- multi-interval ------------------------------------------------------------------------

def test_multi_interval_reduces_to_single(labs):
    lab = labs["cd_2"]
    for n, s in [(0, 0.4), (3, -0.3), (5, 0.2 + 0.4j)]:
        r17 = check_multi_interval(lab, [n], [s])
        r6 = check_s_identities(lab, n, s)[0]
        assert abs(r17.lhs - r6.lhs) < 1e-12 * max(1, abs(r6.lhs))
        assert abs(r17.rhs - r6.rhs) < 1e-12 * max(1, abs(r6.rhs))


def test_multi_interval_zero_weights():
    r = check_multi_interval(rp_lab(), [1, 3], [0, 0])
    assert r.lhs == 1 and r.rhs == 1


def test_multi_interval_rational_pair():
    r = check_multi_interval(rp_lab(), [2, 5], [0.3, 0.6])
    assert r.rel_err < 1e-8


def test_multi_interval_constraints():
    with pytest.raises(ConstraintViolated):
        check_multi_interval(rp_lab(), [3, 2], [0.1, 0.2])
    with pytest.raises(ConstraintViolated):
        check_multi_interval(rp_lab(), [1, 2], [0.5, -0.5])  # s_k - s_1 = -1
    with pytest.raises(ConstraintViolated):
        check_multi_interval(rp_lab(), [1], [0.1, 0.2])


def test_multi_interval_block_exponent_uses_block_size(labs):
    lab = labs["cd_2c"]
    r = check_multi_interval(lab, [1, 3], [0.2, 0.5])
    assert r.passed
    assert r.diagnostics["prefactor"] == pytest.approx(1.5**2 * 1.3**4, rel=1e-14)


@pytest.mark.parametrize("name", ["chi_1", "chi_m1_rp", "chi_m2_rp", "chi_3_rp"])
def test_multi_interval_with_winding(name, labs):
    r = check_multi_interval(labs[name], [2, 5], [0.3, 0.6], tol=1e-6, with_winding=True)
    assert r.identity_id == "EQ17W" and r.passed, r.to_json()


@given(st.lists(st.integers(0, 3), min_size=2, max_size=3),
       st.lists(st.complex_numbers(max_magnitude=0.45), min_size=3, max_size=3))
def test_multi_interval_random_parameters(gaps, svals):
    n_list = list(np.cumsum(gaps))
    s_list = svals[:len(n_list)]
    r = check_multi_interval(_RP_LAB, n_list, s_list)
    assert r.passed, r.to_json()


_RP_LAB = rp_lab()


# -- structural ------------------------------------------------------------------------------

def test_toeplitz_hankel_identity_symbol_exact():
    r = check_toeplitz_hankel(Symbol.identity(2), 16)
    assert r.lhs == 0


@pytest.mark.parametrize("name", ZERO_WINDING)
def test_toeplitz_hankel_corpus(name, labs):
    assert abs(check_toeplitz_hankel(labs[name], 64).lhs) < 1e-7


def test_inverse_chain_identity():
    for route in inverse_chain(Symbol.identity(2), 3):
        np.testing.assert_allclose(route, np.eye(6), atol=1e-14)


def test_inverse_chain_rational_pair():
    r1, r2, r3 = inverse_chain(rp_lab(), 4)
    assert max(np.abs(r1 - r2).max(), np.abs(r1 - r3).max()) < 1e-8
    r = check_inverse_chain(rp_lab(), 4)
    assert r.passed and r.diagnostics["det_corollary_err"] < 1e-9


@pytest.mark.parametrize("name", BLOCK)
def test_inverse_chain_determinant_corollary(name, labs):
    lab = labs[name]
    n = 5
    _, _, r3 = inverse_chain(lab, n)
    expected = lab.G ** (-n) * det_finite(toeplitz_finite(lab.a, n))
    assert abs(det_finite(r3) - expected) < 1e-9 * max(1, abs(expected))


@pytest.mark.parametrize("name", ZERO_WINDING)
def test_regauge_invariance(name, labs):
    lab = labs[name]
    r = check_regauge(lab, 5, seed=3)
    assert r.passed and r.abs_err < 1e-9 * max(1, abs(r.lhs))
    N = lab.N
    C = np.eye(N) + 0.3j * np.ones((N, N))
    other = lab.with_factorization(regauge(lab.factorization, C))
    for a_, b_ in zip(check_doubled_projection(lab, 3), check_doubled_projection(other, 3)):
        assert abs(a_.rhs - b_.rhs) < 1e-9 * max(1, abs(a_.rhs))
        assert abs(a_.lhs - b_.lhs) < 1e-9 * max(1, abs(a_.lhs))
