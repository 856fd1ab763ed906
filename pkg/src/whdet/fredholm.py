"""Finite and Fredholm determinants, and the constants G(a), E(a)."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotConverged, ScalarCrossCheckFailed
from .operators import (
    I,
    OperatorExpr,
    WindowSpec,
    active_range,
    block_size,
    contains_flip,
    hankel_expr,
    realize,
    symbol_widths,
)
from .symbols import Symbol, det_symbol, log_scalar
from .wiener_hopf import Factorization

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MAX_EXTENT = 4096  # scalar indices per window (matrix dimension is this times N)


@dataclass(frozen=True)
class DeterminantResult:
    value: complex
    error_estimate: float
    window_used: WindowSpec
    converged: bool
    history: tuple[complex, ...] = ()


def log_det_finite(m: np.ndarray) -> tuple[float, float]:
    """(log|det m|, arg det m) from an LU factorization with partial pivoting."""
    m = np.asarray(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got {m.shape}")
    if m.shape[0] == 0:
        return 0.0, 0.0
    with warnings.catch_warnings():
        # an exactly singular matrix is a valid input; det 0 is the answer
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    d = np.diag(lu)
    if np.any(d == 0):
        return -np.inf, 0.0
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    return float(np.log(np.abs(d)).sum()), float(np.angle(d).sum() + np.pi * (swaps % 2))


def det_finite(m: np.ndarray) -> complex:
    log_abs, phase = log_det_finite(m)
    if log_abs == -np.inf:
        return 0j
    return complex(np.exp(log_abs + 1j * phase))


def fredholm_det(e: OperatorExpr, tol: float = DEFAULT_TOL, pad0: int | None = None,
                 active: tuple[int, int] | None = None, max_extent: int = MAX_EXTENT,
                 n: int | None = None) -> DeterminantResult:
    """det(e) for e = identity + trace class, by finite sections on growing windows.

    The window is the active range padded by ``pad`` on both sides; ``pad`` starts
    at 2 * (narrowest symbol support) + 16 and doubles until two consecutive
    determinants differ by less than tol * max(1, |det|).
    """
    n = block_size(e) if n is None else n
    lo, hi = active_range(e) if active is None else active
    if pad0 is None:
        widths = symbol_widths(e)
        pad0 = 2 * (min(widths) if widths else 0) + 16
    flip = contains_flip(e)
    pad, prev, history = pad0, None, []
    w = None
    while True:
        wlo, whi = lo - pad, hi + pad
        if flip:
            wlo = min(wlo, -whi)
            whi = -wlo
        if whi - wlo > max_extent:
            break
        w = WindowSpec(wlo, whi)
        val = det_finite(realize(e, w, n))
        history.append(val)
        if prev is not None:
            inc = abs(val - prev)
            if inc < tol * max(1.0, abs(val)):
                return DeterminantResult(val, inc, w, True, tuple(history))
        prev = val
        pad *= 2
    inc = abs(history[-1] - history[-2]) if len(history) > 1 else np.inf
    raise NotConverged(f"Fredholm determinant not stable within {max_extent} indices "
                       f"(last increment {inc:.2e}, window {w})")


def geometric_mean(a: Symbol, M: int | None = None) -> complex:
    """G(a) = exp (log det a)_0."""
    ell = log_scalar(det_symbol(a), M)
    return complex(np.exp(ell[0][0, 0]))


def geometric_mean_from_factors(v_plus: Symbol, v_minus: Symbol) -> complex:
    """G(a) = (det v_+)_0 (det v_-)_0 for a left factorization a = v_+ v_-."""
    return complex(np.linalg.det(v_plus[0]) * np.linalg.det(v_minus[0]))


def hankel_product_expr(b: Symbol, c: Symbol) -> OperatorExpr:
    """H(b) H(c~), realized on l^2(Z) through the flip relations."""
    return hankel_expr(b) @ hankel_expr(c, tilde=True)


def e_scalar_series(a: Symbol, M: int | None = None) -> complex:
    """exp sum_{k >= 1} k (log a)_k (log a)_{-k} for a scalar zero-winding symbol."""
    ell = log_scalar(a, M)
    kmax = min(ell.k_max, -ell.k_min)
    total = sum(k * ell[k][0, 0] * ell[-k][0, 0] for k in range(1, kmax + 1))
    return complex(np.exp(total))


def e_constant(f: "Factorization", tol: float = DEFAULT_TOL, pad0: int | None = None) -> complex:
    """E(a) = 1 / det(I - H(b) H(c~)).

    For scalar symbols the value is cross-checked against the log-series formula.
    """
    res = fredholm_det(I - hankel_product_expr(f.b, f.c), tol, pad0=pad0, active=(0, 1))
    value = 1.0 / res.value
    if f.a.block_size == 1:
        series = e_scalar_series(f.a)
        if abs(series - value) >= 10 * tol * max(1.0, abs(value)):
            raise ScalarCrossCheckFailed(
                f"E(a) from Hankel determinant {value} vs log series {series}")
    return complex(value)
