"""Canonical Wiener-Hopf factorization of scalar and block symbols.

Right factorization a = u_- u_+ and left factorization a = v_+ v_-, where the
``+`` factors (and their inverses) carry coefficients only at k >= 0 and the
``-`` factors only at k <= 0.  Normalization: (u_+)_0 = I and (v_-)_0 = I.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import IllConditioned, NonzeroWinding, NotResolved
from .operators import toeplitz_finite
from .symbols import (
    COND_CAP,
    Symbol,
    det_winding,
    exp_symbol,
    invert,
    log_scalar,
    multiply,
    wiener_distance,
)

log = logging.getLogger(__name__)

MAX_ORDER = 4096


@dataclass(frozen=True, eq=False)
class Factorization:
    a: Symbol
    u_minus: Symbol
    u_plus: Symbol
    v_plus: Symbol
    v_minus: Symbol
    b: Symbol | None = None
    c: Symbol | None = None
    residual_right: float = np.nan
    residual_left: float = np.nan
    residual_bc: float = np.nan
    order: int = 0  # truncation order used by the block route (0 for the scalar route)

    @cached_property
    def u_plus_inv(self) -> Symbol:
        return invert(self.u_plus)

    @cached_property
    def u_minus_inv(self) -> Symbol:
        return invert(self.u_minus)

    @cached_property
    def v_plus_inv(self) -> Symbol:
        return invert(self.v_plus)

    @cached_property
    def v_minus_inv(self) -> Symbol:
        return invert(self.v_minus)


def _plus_part(a: Symbol) -> Symbol:
    return a.restrict(max(a.k_min, 0), None).compact()


def _minus_part(a: Symbol) -> Symbol:
    return a.restrict(None, min(a.k_max, 0)).compact()


def factor_right_scalar(a: Symbol) -> tuple[Symbol, Symbol]:
    """Split log a into its k >= 1 and k <= 0 parts and exponentiate."""
    ell = log_scalar(a)
    u_plus = exp_symbol(ell.restrict(1, max(ell.k_max, 1)))
    u_minus = exp_symbol(ell.restrict(min(ell.k_min, 0), 0))
    return _minus_part(u_minus), _plus_part(u_plus)


def _initial_order(a: Symbol) -> int:
    return 4 * (a.width + 8)


def factor_right_block(a: Symbol, m: int | None = None, cond_cap: float = COND_CAP,
                       max_order: int = MAX_ORDER) -> tuple[Symbol, Symbol, int]:
    """Right factorization from the first block column of T_m(a)^{-1}.

    T(a)^{-1} = T(u_+^{-1}) T(u_-^{-1}) makes that column equal to
    (u_+^{-1})_j (u_-^{-1})_0, so normalizing by its top block recovers u_+^{-1}.
    Returns (u_minus, u_plus, order used).
    """
    n = a.block_size
    thr = a.drop_threshold
    m = _initial_order(a) if m is None else m
    while m <= max_order:
        t = toeplitz_finite(a, m)
        cond = np.linalg.cond(t)
        if not np.isfinite(cond) or cond > cond_cap:
            raise IllConditioned(f"T_{m}(a) has condition number {cond:.2e}")
        rhs = np.zeros((m * n, n), dtype=complex)
        rhs[:n] = np.eye(n)
        x = scipy.linalg.solve(t, rhs).reshape(m, n, n)
        scale = max(1.0, float(np.abs(x[0]).max()))
        tail = float(np.abs(x[-2:]).max())
        if tail < thr * scale:
            break
        log.debug("factor_right_block: tail %.2e at order %d, doubling", tail, m)
        m *= 2
    else:
        raise NotResolved(f"first column of T_m(a)^(-1) did not decay within order {max_order}; "
                          "a is numerically not right-factorizable")
    uplus_inv = Symbol(x @ np.linalg.inv(x[0]), 0, thr).compact()
    u_plus = _plus_part(invert(uplus_inv))
    u_minus = _minus_part(multiply(a, uplus_inv))
    return u_minus, u_plus, m


def factor_right(a: Symbol, m: int | None = None) -> tuple[Symbol, Symbol, int]:
    """Scalar symbols use the log split, block symbols the Toeplitz solve."""
    w = det_winding(a)
    if w != 0:
        raise NonzeroWinding(f"det a has winding number {w}; no canonical factorization "
                             f"(split a = chi_w * b first)")
    if a.block_size == 1 and m is None:
        u_minus, u_plus = factor_right_scalar(a)
        return u_minus, u_plus, 0
    return factor_right_block(a, m)


def factor_left(a: Symbol, m: int | None = None) -> tuple[Symbol, Symbol, int]:
    """Left factorization a = v_+ v_- via a right factorization of t -> a(1/t)."""
    u_minus, u_plus, order = factor_right(a.reflect(), m)
    return u_minus.reflect(), u_plus.reflect(), order


def derive_bc(f: Factorization) -> Factorization:
    """b = v_- u_+^{-1}, c = u_-^{-1} v_+ and the defect ||bc - I||."""
    b = multiply(f.v_minus, f.u_plus_inv)
    c = multiply(f.u_minus_inv, f.v_plus)
    res = wiener_distance(multiply(b, c), Symbol.identity(f.a.block_size))
    return replace(f, b=b, c=c, residual_bc=res)


def factorize(a: Symbol, m: int | None = None) -> Factorization:
    """Both canonical factorizations of a plus the derived symbols b and c."""
    u_minus, u_plus, order_r = factor_right(a, m)
    v_plus, v_minus, order_l = factor_left(a, m)
    f = Factorization(
        a=a, u_minus=u_minus, u_plus=u_plus, v_plus=v_plus, v_minus=v_minus,
        residual_right=wiener_distance(multiply(u_minus, u_plus), a),
        residual_left=wiener_distance(multiply(v_plus, v_minus), a),
        order=max(order_r, order_l),
    )
    return derive_bc(f)


def regauge(f: Factorization, right: np.ndarray, left: np.ndarray | None = None) -> Factorization:
    """Replace (u_-, u_+) by (u_- C^{-1}, C u_+) and (v_+, v_-) by (v_+ D^{-1}, D v_-).

    Every canonical factorization arises this way from any other one.
    """
    C = np.asarray(right, dtype=complex)
    D = C if left is None else np.asarray(left, dtype=complex)
    Ci, Di = np.linalg.inv(C), np.linalg.inv(D)
    u_minus = Symbol(f.u_minus.coeffs @ Ci, f.u_minus.k_min, f.u_minus.drop_threshold)
    u_plus = Symbol(C @ f.u_plus.coeffs, f.u_plus.k_min, f.u_plus.drop_threshold)
    v_plus = Symbol(f.v_plus.coeffs @ Di, f.v_plus.k_min, f.v_plus.drop_threshold)
    v_minus = Symbol(D @ f.v_minus.coeffs, f.v_minus.k_min, f.v_minus.drop_threshold)
    g = replace(f, u_minus=u_minus, u_plus=u_plus, v_plus=v_plus, v_minus=v_minus,
                residual_right=wiener_distance(multiply(u_minus, u_plus), f.a),
                residual_left=wiener_distance(multiply(v_plus, v_minus), f.a))
    return derive_bc(g)
