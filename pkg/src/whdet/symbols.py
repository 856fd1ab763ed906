"""Matrix-valued Laurent symbols on the unit circle.

A :class:`Symbol` stores the Fourier coefficients ``a_k`` (each an ``N x N``
complex matrix) on a contiguous index window ``[k_min, k_max]``.  Grid
transforms use the M-th roots of unity ``t_j = exp(2 pi i j / M)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    AmbiguousWinding,
    BlockSizeMismatch,
    NonzeroWinding,
    NotResolved,
    PhaseStepTooLarge,
    SingularOnCircle,
    WindowTooSmall,
)

DEFAULT_DROP = 1e-14
GRID_CAP = 2**16
COND_CAP = 1e12
# consecutive wrapped phase increments above this are treated as unresolved
MAX_PHASE_STEP = np.pi / 2
WINDING_RESIDUE = 0.1


@dataclass(frozen=True, eq=False)
class Symbol:
    coeffs: np.ndarray
    k_min: int = 0
    drop_threshold: float = DEFAULT_DROP
    dropped: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[1] == 0:
            raise ValueError(f"coefficients must have shape (K, N, N), got {c.shape}")
        k_min = int(self.k_min)
        if c.shape[0] == 0:
            c = np.zeros((1,) + c.shape[1:], dtype=complex)
            k_min = 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "k_min", k_min)

    # -- construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], block_size: int | None = None,
                  drop_threshold: float = DEFAULT_DROP) -> "Symbol":
        """Build from ``{k: matrix or scalar}``; missing indices are zero."""
        if not coeffs:
            return cls.zero(block_size or 1, drop_threshold)
        mats = {int(k): np.atleast_2d(np.asarray(v, dtype=complex)) for k, v in coeffs.items()}
        n = block_size or next(iter(mats.values())).shape[0]
        lo, hi = min(mats), max(mats)
        arr = np.zeros((hi - lo + 1, n, n), dtype=complex)
        for k, m in mats.items():
            if m.shape != (n, n):
                raise BlockSizeMismatch(f"coefficient {k} has shape {m.shape}, expected {(n, n)}")
            arr[k - lo] = m
        return cls(arr, lo, drop_threshold)

    @classmethod
    def zero(cls, block_size: int = 1, drop_threshold: float = DEFAULT_DROP) -> "Symbol":
        return cls(np.zeros((1, block_size, block_size)), 0, drop_threshold)

    @classmethod
    def identity(cls, block_size: int = 1) -> "Symbol":
        return cls(np.eye(block_size)[None], 0)

    @classmethod
    def constant(cls, matrix) -> "Symbol":
        return cls(np.atleast_2d(np.asarray(matrix, dtype=complex))[None], 0)

    @classmethod
    def monomial(cls, w: int, block_size: int = 1) -> "Symbol":
        """chi_w(t) = t^w (times the identity matrix)."""
        return cls(np.eye(block_size)[None], int(w))

    # -- views --------------------------------------------------------------
    @property
    def block_size(self) -> int:
        return self.coeffs.shape[1]

    @property
    def k_max(self) -> int:
        return self.k_min + self.coeffs.shape[0] - 1

    @property
    def width(self) -> int:
        return self.coeffs.shape[0]

    @property
    def support(self) -> tuple[int, int]:
        return self.k_min, self.k_max

    def __getitem__(self, k: int) -> np.ndarray:
        i = int(k) - self.k_min
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i]
        return np.zeros((self.block_size, self.block_size), dtype=complex)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for k in [lo, hi), zero-padded, shape (hi - lo, N, N)."""
        out = np.zeros((max(hi - lo, 0), self.block_size, self.block_size), dtype=complex)
        a, b = max(lo, self.k_min), min(hi, self.k_max + 1)
        if a < b:
            out[a - lo:b - lo] = self.coeffs[a - self.k_min:b - self.k_min]
        return out

    def items(self) -> Iterator[tuple[int, np.ndarray]]:
        for i, m in enumerate(self.coeffs):
            yield self.k_min + i, m

    def scalar_coeffs(self) -> dict[int, complex]:
        if self.block_size != 1:
            raise BlockSizeMismatch("scalar view needs block size 1")
        return {k: complex(m[0, 0]) for k, m in self.items() if m[0, 0] != 0}

    def restrict(self, lo: int | None = None, hi: int | None = None) -> "Symbol":
        """Keep coefficients with lo <= k <= hi (inclusive bounds)."""
        lo = self.k_min if lo is None else lo
        hi = self.k_max if hi is None else hi
        if hi < lo:
            return Symbol.zero(self.block_size, self.drop_threshold)
        return Symbol(self.window(lo, hi + 1), lo, self.drop_threshold, self.dropped)

    def reflect(self) -> "Symbol":
        """The symbol t -> a(1/t): coefficient k becomes a_{-k}."""
        return Symbol(self.coeffs[::-1], -self.k_max, self.drop_threshold, self.dropped)

    def with_threshold(self, drop_threshold: float) -> "Symbol":
        return Symbol(self.coeffs, self.k_min, drop_threshold, self.dropped)

    def compact(self, threshold: float | None = None) -> "Symbol":
        thr = self.drop_threshold if threshold is None else threshold
        return _compact(self.coeffs, self.k_min, thr, self.dropped, self.drop_threshold)

    # -- arithmetic sugar ---------------------------------------------------
    def __add__(self, other: "Symbol") -> "Symbol":
        return add(self, other)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return add(self, other, beta=-1.0)

    def __neg__(self) -> "Symbol":
        return Symbol(-self.coeffs, self.k_min, self.drop_threshold, self.dropped)

    def __rmul__(self, c: complex) -> "Symbol":
        return Symbol(complex(c) * self.coeffs, self.k_min, self.drop_threshold,
                      abs(complex(c)) * self.dropped)

    def __matmul__(self, other: "Symbol") -> "Symbol":
        return multiply(self, other)

    def __rmatmul__(self, matrix) -> "Symbol":
        # constant matrix on the left
        return Symbol(np.asarray(matrix) @ self.coeffs, self.k_min, self.drop_threshold,
                      self.dropped)

    def __repr__(self) -> str:
        return (f"Symbol(N={self.block_size}, support=[{self.k_min}, {self.k_max}], "
                f"dropped={self.dropped:.1e})")


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Values of a symbol at the M-th roots of unity, shape (M, N, N)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None, None]
        if not _is_pow2(v.shape[0]):
            raise ValueError(f"grid size must be a power of two, got {v.shape[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def block_size(self) -> int:
        return self.values.shape[1]

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.M) / self.M)


@dataclass(frozen=True)
class NormReport:
    wiener: float
    k11: float
    krein: float


# -- helpers -----------------------------------------------------------------

def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def _block_norms(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.shape[1] == 1:
        return np.abs(coeffs[:, 0, 0])
    return np.linalg.norm(coeffs, ord=2, axis=(1, 2))


def _compact(coeffs: np.ndarray, k_min: int, threshold: float, dropped: float = 0.0,
             keep_threshold: float | None = None) -> Symbol:
    """Zero coefficients whose largest entry is below ``threshold`` and trim the ends."""
    keep_threshold = threshold if keep_threshold is None else keep_threshold
    mags = np.abs(coeffs).max(axis=(1, 2)) if coeffs.size else np.zeros(0)
    small = mags < threshold
    if small.any():
        coeffs = coeffs.copy()
        dropped += float(_block_norms(coeffs[small]).sum())
        coeffs[small] = 0
    nz = np.flatnonzero(~small)
    if nz.size == 0:
        return Symbol(np.zeros((1,) + coeffs.shape[1:]), 0, keep_threshold, dropped)
    return Symbol(coeffs[nz[0]:nz[-1] + 1], k_min + int(nz[0]), keep_threshold, dropped)


def grid_sizes(width: int, cap: int = GRID_CAP) -> Iterator[int]:
    """Grid policy: smallest power of two >= 4 (width + 16), doubled up to ``cap``."""
    m = 1
    while m < 4 * (width + 16):
        m *= 2
    while m <= cap:
        yield m
        m *= 2


def _centered_coeffs(values: np.ndarray) -> np.ndarray:
    """DFT coefficients for k = -M/2 + 1, ..., M/2 from grid values."""
    M = values.shape[0]
    f = np.fft.fft(values, axis=0) / M
    idx = np.arange(-M // 2 + 1, M // 2 + 1) % M
    return f[idx]


def _resolved(centered: np.ndarray, threshold: float) -> bool:
    edge = np.concatenate([centered[:2], centered[-2:]])
    return float(np.abs(edge).max()) < threshold


def _noise_floor(values: np.ndarray, threshold: float) -> float:
    # FFT rounding puts ~eps * max|value| into every coefficient
    return max(threshold, 16 * np.finfo(float).eps * float(np.abs(values).max()))


def _check_power(M: int) -> None:
    if not _is_pow2(M):
        raise ValueError(f"grid size must be a power of two, got {M}")


# -- transforms --------------------------------------------------------------

def fourier_from_samples(g: GridSamples, drop_threshold: float = DEFAULT_DROP) -> Symbol:
    M = g.M
    c = _centered_coeffs(g.values)
    return _compact(c, -M // 2 + 1, drop_threshold)


def evaluate(a: Symbol, M: int) -> GridSamples:
    _check_power(M)
    if M < 2 * a.width:
        raise WindowTooSmall(f"grid size {M} < 2 * support width {a.width}")
    buf = np.zeros((M,) + a.coeffs.shape[1:], dtype=complex)
    ks = np.arange(a.k_min, a.k_max + 1) % M
    np.add.at(buf, ks, a.coeffs)
    return GridSamples(np.fft.ifft(buf, axis=0) * M)


def samples_on(a: Symbol, M: int) -> np.ndarray:
    """Raw (M, N, N) grid values without the width precondition (aliasing-free for width <= M)."""
    _check_power(M)
    if a.width > M:
        raise WindowTooSmall(f"grid size {M} < support width {a.width}")
    buf = np.zeros((M,) + a.coeffs.shape[1:], dtype=complex)
    np.add.at(buf, np.arange(a.k_min, a.k_max + 1) % M, a.coeffs)
    return np.fft.ifft(buf, axis=0) * M


# -- algebra -----------------------------------------------------------------

def add(a: Symbol, b: Symbol, alpha: complex = 1.0, beta: complex = 1.0) -> Symbol:
    """alpha * a + beta * b, with no dropping."""
    if a.block_size != b.block_size:
        raise BlockSizeMismatch(f"block sizes {a.block_size} and {b.block_size}")
    lo, hi = min(a.k_min, b.k_min), max(a.k_max, b.k_max) + 1
    return Symbol(alpha * a.window(lo, hi) + beta * b.window(lo, hi), lo,
                  max(a.drop_threshold, b.drop_threshold),
                  abs(alpha) * a.dropped + abs(beta) * b.dropped)


def multiply(a: Symbol, b: Symbol) -> Symbol:
    """Laurent product (ab)_k = sum_j a_j b_{k-j}; matrix order is preserved."""
    n = a.block_size
    if n != b.block_size:
        raise BlockSizeMismatch(f"block sizes {a.block_size} and {b.block_size}")
    out = np.zeros((a.width + b.width - 1, n, n), dtype=complex)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                out[:, p, q] += np.convolve(a.coeffs[:, p, r], b.coeffs[:, r, q])
    thr = max(a.drop_threshold, b.drop_threshold)
    # dropped mass propagates through the product bound ||a|| * db + ||b|| * da
    carried = norms(a).wiener * b.dropped + norms(b).wiener * a.dropped
    return _compact(out, a.k_min + b.k_min, thr, carried)


def wiener_distance(a: Symbol, b: Symbol) -> float:
    return norms(add(a, b, beta=-1.0)).wiener


def norms(a: Symbol) -> NormReport:
    nrm = _block_norms(a.coeffs)
    weight = np.abs(np.arange(a.k_min, a.k_max + 1)) + 1.0
    return NormReport(float(nrm.sum()), float((weight * nrm).sum()),
                      float((weight * nrm**2).sum()))


def _check_invertible(values: np.ndarray, cap: float) -> None:
    if values.shape[1] == 1:
        mags = np.abs(values[:, 0, 0])
        top, bottom = mags.max(), mags.min()
    else:
        sv = np.linalg.svd(values, compute_uv=False)
        top, bottom = sv[:, 0].max(), sv[:, -1].min()
    if bottom == 0 or top / bottom > cap:
        raise SingularOnCircle(
            f"symbol is (numerically) singular on the unit circle: "
            f"max/min singular value ratio {top / bottom if bottom else np.inf:.3e}")


def _grid_transform(a: Symbol, fn, M: int | None, drop_threshold: float | None,
                    what: str, width: int | None = None) -> Symbol:
    """Apply ``fn`` pointwise on a grid and transform back, enlarging M until resolved."""
    thr = a.drop_threshold if drop_threshold is None else drop_threshold
    sizes = [M] if M is not None else list(grid_sizes(width or a.width))
    for m in sizes:
        vals = fn(samples_on(a, m), m)
        c = _centered_coeffs(vals)
        floor = _noise_floor(c, thr)
        if _resolved(c, floor):
            return _compact(c, -m // 2 + 1, floor, a.dropped, thr)
    raise NotResolved(f"{what}: coefficients did not decay below {thr:.1e} "
                      f"within grid size {sizes[-1]}")


def invert(a: Symbol, M: int | None = None, drop_threshold: float | None = None,
           cond_cap: float = COND_CAP, tol: float | None = None) -> Symbol:
    """Pointwise inverse on the grid; the grid grows until the result is resolved.

    With ``tol`` set, the two-sided Wiener residual ||a a^{-1} - I|| is checked too.
    """

    def fn(vals, m):
        _check_invertible(vals, cond_cap)
        return np.linalg.inv(vals)

    inv = _grid_transform(a, fn, M, drop_threshold, "invert")
    if tol is not None:
        res = inverse_residual(a, inv)
        if max(res) >= tol:
            raise NotResolved(f"inverse residual {max(res):.2e} >= {tol:.1e}")
    return inv


def inverse_residual(a: Symbol, ainv: Symbol) -> tuple[float, float]:
    """(||a a^{-1} - I||_W, ||a^{-1} a - I||_W)."""
    eye = Symbol.identity(a.block_size)
    return (wiener_distance(multiply(a, ainv), eye), wiener_distance(multiply(ainv, a), eye))


def _require_scalar(a: Symbol) -> None:
    if a.block_size != 1:
        raise BlockSizeMismatch(f"scalar symbol required, got block size {a.block_size}")


def _phase_steps(v: np.ndarray, max_step: float = MAX_PHASE_STEP) -> np.ndarray:
    """Nearest-branch phase increments between consecutive samples, closing the loop."""
    ratio = np.roll(v, -1) / v
    steps = np.angle(ratio)
    worst = float(np.abs(steps).max())
    if worst >= max_step:
        raise PhaseStepTooLarge(f"phase step {worst:.3f} rad between grid samples; refine the grid")
    return steps


def _scalar_values(a: Symbol, M: int, cond_cap: float) -> np.ndarray:
    v = samples_on(a, M)
    _check_invertible(v, cond_cap)
    return v[:, 0, 0]


def _winding_from_values(v: np.ndarray) -> int:
    total = _phase_steps(v).sum() / (2 * np.pi)
    w = int(np.rint(total))
    if abs(total - w) >= WINDING_RESIDUE:
        raise AmbiguousWinding(f"winding {total:.3f} is not close to an integer")
    return w


def winding_number(a: Symbol, M: int | None = None, cond_cap: float = COND_CAP) -> int:
    _require_scalar(a)
    sizes = [M] if M is not None else list(grid_sizes(a.width))
    for i, m in enumerate(sizes):
        try:
            return _winding_from_values(_scalar_values(a, m, cond_cap))
        except PhaseStepTooLarge:
            if i == len(sizes) - 1:
                raise
    raise AssertionError("unreachable")


def log_scalar(a: Symbol, M: int | None = None, drop_threshold: float | None = None,
               cond_cap: float = COND_CAP) -> Symbol:
    """Fourier coefficients of the continuous logarithm of a zero-winding scalar symbol."""
    _require_scalar(a)

    def fn(vals, m):
        v = vals[:, 0, 0]
        _check_invertible(vals, cond_cap)
        steps = _phase_steps(v)
        w = _winding_from_values(v)
        if w != 0:
            raise NonzeroWinding(f"winding number {w}; split a = chi_w * b first")
        phase = np.angle(v[0]) + np.concatenate([[0.0], np.cumsum(steps[:-1])])
        return (np.log(np.abs(v)) + 1j * phase)[:, None, None]

    if M is not None:
        return _grid_transform(a, fn, M, drop_threshold, "log_scalar")
    last = None
    for m in grid_sizes(a.width):
        try:
            return _grid_transform(a, fn, m, drop_threshold, "log_scalar")
        except (PhaseStepTooLarge, NotResolved) as exc:
            last = exc
    raise last


def exp_symbol(a: Symbol, M: int | None = None, drop_threshold: float | None = None) -> Symbol:
    _require_scalar(a)
    return _grid_transform(a, lambda vals, m: np.exp(vals), M, drop_threshold, "exp_symbol")


def split_winding(a: Symbol, M: int | None = None) -> tuple[int, Symbol]:
    """Write a = chi_w * b with wind b = 0."""
    w = winding_number(a, M)
    return w, multiply(Symbol.monomial(-w), a)


def det_symbol(a: Symbol) -> Symbol:
    """The scalar symbol t -> det a(t) (a Laurent polynomial, so computed exactly)."""
    n = a.block_size
    if n == 1:
        return a
    lo, hi = n * a.k_min, n * a.k_max
    M = next(grid_sizes(hi - lo + 1))
    d = np.linalg.det(samples_on(a, M))
    c = _centered_coeffs(d[:, None, None])
    return _compact(c, -M // 2 + 1, _noise_floor(c, a.drop_threshold), 0.0,
                    a.drop_threshold).restrict(lo, hi).compact()


def det_winding(a: Symbol) -> int:
    """Winding number of det a(t)."""
    return winding_number(det_symbol(a))
