import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import convolve_dicts, geometric
from whdet.corpus import rational_pair
from whdet.errors import WindowNotFlipSymmetric
from whdet.operators import (
    I,
    J,
    L,
    P,
    P_n,
    Q,
    Q_n,
    WindowSpec,
    hankel_expr,
    hankel_finite,
    interval,
    laurent_finite,
    realize,
    realize_rect,
    restrict,
    toeplitz_expr,
    toeplitz_finite,
)
from whdet.symbols import Symbol, invert, multiply
from whdet.wiener_hopf import factorize

RP = Symbol.from_dict({-1: -0.3, 0: 1.15, 1: -0.5})
SYM = WindowSpec(-12, 12)


def block_rp():
    c = {-1: [[-0.3, 0.1], [0.0, -0.2]], 0: [[1.2, 0.1], [0.05, 1.1]], 1: [[-0.5, 0.0], [0.2, -0.4]]}
    return Symbol.from_dict({k: np.array(v) for k, v in c.items()}, 2)


# -- toeplitz_finite -----------------------------------------------------------

def test_toeplitz_identity():
    np.testing.assert_array_equal(toeplitz_finite(Symbol.identity(2), 5), np.eye(10))


def test_toeplitz_tridiagonal_by_hand():
    expected = [[1.15, -0.3, 0], [-0.5, 1.15, -0.3], [0, -0.5, 1.15]]
    np.testing.assert_array_equal(toeplitz_finite(RP, 3), expected)


def test_toeplitz_of_reflection_is_block_transpose():
    a = block_rp()
    n, N = 4, 2
    t, tr = toeplitz_finite(a, n), toeplitz_finite(a.reflect(), n)
    for j in range(n):
        for k in range(n):
            np.testing.assert_array_equal(tr[j * N:(j + 1) * N, k * N:(k + 1) * N],
                                          t[k * N:(k + 1) * N, j * N:(j + 1) * N])


def test_toeplitz_rejects_empty():
    with pytest.raises(ValueError):
        toeplitz_finite(RP, 0)


# -- hankel_finite -------------------------------------------------------------

def test_hankel_tridiagonal_support():
    h = hankel_finite(RP, 4)
    expected = np.zeros((4, 4))
    expected[0, 0] = -0.5
    np.testing.assert_array_equal(h, expected)
    ht = hankel_finite(RP, 4, tilde=True)
    expected[0, 0] = -0.3
    np.testing.assert_array_equal(ht, expected)


def test_hankel_series_coefficients():
    # b = (1 - 0.3/t) / (1 - 0.5 t)
    b = multiply(Symbol.from_dict({0: 1, -1: -0.3}), invert(Symbol.from_dict({0: 1, 1: -0.5})))
    h = hankel_finite(b, 6, 5)
    for j in range(6):
        for k in range(5):
            m = j + k + 1
            # t^m collects 0.5^m from 1 and 0.5^(m+1) from -0.3/t
            assert abs(h[j, k] - (0.5**m - 0.3 * 0.5 ** (m + 1))) < 1e-15
    series = convolve_dicts({0: 1, -1: -0.3}, geometric(0.5, 40))
    np.testing.assert_allclose(h[0], [series[m] for m in range(1, 6)], atol=1e-15)


def test_hankel_rectangular_shape():
    assert hankel_finite(block_rp(), 3, 5).shape == (6, 10)


# -- realize --------------------------------------------------------------------

def test_identity_plus_scaled_projection():
    s = 0.3 - 0.2j
    m = realize(I + s * P(), WindowSpec(-4, 4))
    np.testing.assert_array_equal(m, np.diag([1] * 4 + [1 + s] * 4))


def test_q_n_on_half_line():
    np.testing.assert_array_equal(realize(Q_n(2), WindowSpec(0, 5)), np.diag([0, 0, 1, 1, 1]))


def test_block_projection():
    m = realize(Q_n(1), WindowSpec(0, 3), n=2)
    np.testing.assert_array_equal(m, np.diag([0, 0, 1, 1, 1, 1]))


@pytest.mark.parametrize("n", [0, 1, 3, 7])
def test_projection_algebra(n):
    w = WindowSpec(-10, 10)
    r = lambda e: realize(e, w)  # noqa: E731
    np.testing.assert_array_equal(r(P() + Q()), r(I))
    np.testing.assert_array_equal(r(Q_n(0)), r(P()))
    np.testing.assert_array_equal(r(P_n(n)), r(P()) - r(Q_n(n)))
    np.testing.assert_array_equal(r(interval(n, n + 3)), r(Q_n(n)) - r(Q_n(n + 3)))
    np.testing.assert_array_equal(r(interval(n, None)), r(Q_n(n)))
    np.testing.assert_array_equal(r(P() @ P()), r(P()))


def test_flip_algebra():
    np.testing.assert_array_equal(realize(J @ J, SYM), np.eye(24))
    np.testing.assert_array_equal(realize(J @ Q() @ J, SYM), realize(P(), SYM))
    m = realize(J, WindowSpec(-3, 3))
    np.testing.assert_array_equal(m, np.fliplr(np.eye(6)))


def test_flip_needs_symmetric_window():
    with pytest.raises(WindowNotFlipSymmetric):
        realize(J, WindowSpec(-3, 4))
    with pytest.raises(WindowNotFlipSymmetric):
        realize(I + J @ P(), WindowSpec(0, 6))


def test_laurent_node():
    w = WindowSpec(-3, 4)
    np.testing.assert_array_equal(realize(L(RP), w), laurent_finite(RP, w))
    assert laurent_finite(RP, w)[4, 3] == -0.5  # a_1 sits below the diagonal


# exact products: a finite section of L(a) L(b) is the section of L(ab)
@given(st.integers(-6, 6), st.integers(1, 10))
def test_product_of_laurent_is_laurent_of_product(lo, size):
    a = Symbol.from_dict({-2: 0.1, 0: 1, 1: 0.4j, 3: -0.2})
    b = Symbol.from_dict({-1: 0.5, 2: 0.3})
    w = WindowSpec(lo, lo + size)
    np.testing.assert_allclose(realize(L(a) @ L(b), w), laurent_finite(multiply(a, b), w),
                               atol=1e-15)
    coeffs = convolve_dicts(a.scalar_coeffs(), b.scalar_coeffs())
    assert multiply(a, b).scalar_coeffs().keys() == coeffs.keys()


def test_product_through_projection():
    # T(a)T(b) differs from T(ab) by H(a)H(b~); both sides realized independently
    a, b = RP, rational_pair(0.2, 0.4)
    w = WindowSpec(0, 8)
    lhs = realize(toeplitz_expr(a) @ toeplitz_expr(b), w)
    hh = hankel_finite(a, 8, 8) @ hankel_finite(b, 8, 8, tilde=True)
    np.testing.assert_allclose(lhs, toeplitz_finite(multiply(a, b), 8) - hh, atol=1e-15)


def test_realize_rect_shape():
    m = realize_rect(L(block_rp()), (0, 3), (-1, 5))
    assert m.shape == (6, 12)


def test_restrict():
    w = WindowSpec(-4, 4)
    m = laurent_finite(RP, w)
    np.testing.assert_array_equal(restrict(m, w, WindowSpec(0, 3), 1), toeplitz_finite(RP, 3))


# -- flip relations ---------------------------------------------------------------

@pytest.mark.parametrize("a", [RP, block_rp(), rational_pair(0.3 + 0.4j, -0.2 + 0.5j)],
                         ids=["scalar", "block", "complex"])
def test_flip_relations(a):
    N, m = a.block_size, 8
    full = realize(toeplitz_expr(a), SYM, N)
    half = WindowSpec(0, m)
    np.testing.assert_allclose(restrict(full, SYM, half, N), toeplitz_finite(a, m), atol=1e-14)
    h = restrict(realize(hankel_expr(a), SYM, N), SYM, half, N)
    np.testing.assert_allclose(h, hankel_finite(a, m), atol=1e-14)
    ht = restrict(realize(hankel_expr(a, tilde=True), SYM, N), SYM, half, N)
    np.testing.assert_allclose(ht, hankel_finite(a, m, tilde=True), atol=1e-14)


def test_flip_relations_long_symbol():
    a = invert(rational_pair(0.6, 0.5))
    N, m = 1, 10
    h = restrict(realize(hankel_expr(a), SYM, N), SYM, WindowSpec(0, m), N)
    np.testing.assert_allclose(h, hankel_finite(a, m), atol=1e-12)


def test_finite_section_of_toeplitz_hankel_identity():
    f = factorize(rational_pair(0.5, 0.3))
    M, half = 64, 32
    resid = (toeplitz_finite(f.b, M) @ toeplitz_finite(f.c, M)
             + hankel_finite(f.b, M) @ hankel_finite(f.c, M, tilde=True) - np.eye(M))
    assert np.linalg.norm(resid[:half, :half], 2) < 1e-8


def test_entry_decay():
    a = invert(rational_pair(0.5, 0.3))
    row = np.abs(laurent_finite(a, WindowSpec(-40, 40))[40])
    dist = np.abs(np.arange(-40, 40))
    keep = row > 1e-13
    slope, _ = np.polyfit(dist[keep], np.log(row[keep]), 1)
    r = np.exp(slope)
    assert r < 1
    # coefficient decay of 1/a is governed by max(alpha, beta)
    assert r == pytest.approx(0.5, rel=0.2)
