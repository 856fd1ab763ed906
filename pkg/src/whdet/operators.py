"""Finite sections of Laurent, Toeplitz and Hankel operators and their compositions.

Operators act on l^2(Z, C^N).  An :class:`OperatorExpr` is a small expression
tree; :func:`realize` turns it into a dense matrix on an index window.  Products
are realized exactly: the inner index range of every product is widened to the
full column reach of the left factor, so a finite section of ``A @ B`` equals the
corresponding block of the infinite product (up to dropped symbol tails).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BlockSizeMismatch, WindowNotFlipSymmetric
from .symbols import Symbol

Range = tuple[int, int]  # half-open [lo, hi)


@dataclass(frozen=True)
class WindowSpec:
    lo: int
    hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi})")

    @property
    def size(self) -> int:
        return self.hi - self.lo

    @property
    def flip_symmetric(self) -> bool:
        return self.lo == -self.hi

    def index(self, k: int) -> int:
        """Position of scalar index k inside the window."""
        return k - self.lo


class OperatorExpr:
    """Base node.  ``@`` composes, ``+``/``-`` add, scalars multiply with ``*``."""

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Sum((self, other))

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Sum((self, Scaled(-1.0, other)))

    def __neg__(self) -> "OperatorExpr":
        return Scaled(-1.0, self)

    def __rmul__(self, s: complex) -> "OperatorExpr":
        return Scaled(complex(s), self)

    __mul__ = __rmul__

    def __matmul__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Product((self, other))

    def children(self) -> tuple["OperatorExpr", ...]:
        return ()

    def walk(self) -> Iterator["OperatorExpr"]:
        yield self
        for c in self.children():
            yield from c.walk()


@dataclass(frozen=True, eq=False)
class Laurent(OperatorExpr):
    """L(a): the bi-infinite block matrix (a_{j-k})."""

    symbol: Symbol


@dataclass(frozen=True)
class Proj(OperatorExpr):
    """Coordinate projection onto lo <= k < hi (None means unbounded)."""

    lo: int | None
    hi: int | None
    label: str = ""


@dataclass(frozen=True)
class Flip(OperatorExpr):
    """(Jx)_k = x_{-k-1}."""


@dataclass(frozen=True)
class Identity(OperatorExpr):
    pass


@dataclass(frozen=True, eq=False)
class Scaled(OperatorExpr):
    s: complex
    expr: OperatorExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True, eq=False)
class Sum(OperatorExpr):
    terms: tuple[OperatorExpr, ...]

    def children(self):
        return self.terms


@dataclass(frozen=True, eq=False)
class Product(OperatorExpr):
    factors: tuple[OperatorExpr, ...]

    def children(self):
        return self.factors


def P() -> Proj:
    return Proj(0, None, "P")


def Q() -> Proj:
    return Proj(None, 0, "Q")


def Q_n(n: int) -> Proj:
    return Proj(int(n), None, f"Q_{n}")


def P_n(n: int) -> Proj:
    return Proj(0, int(n), f"P_{n}")


def interval(m: int, n: int | None) -> Proj:
    """P_[m, n) = Q_m - Q_n; ``n=None`` leaves the interval open to the right."""
    return Proj(int(m), None if n is None else int(n), f"P_[{m},{n})")


def L(a: Symbol) -> Laurent:
    return Laurent(a)


I = Identity()
J = Flip()


# -- bookkeeping -------------------------------------------------------------

def block_size(e: OperatorExpr, default: int = 1) -> int:
    sizes = {node.symbol.block_size for node in e.walk() if isinstance(node, Laurent)}
    if len(sizes) > 1:
        raise BlockSizeMismatch(f"mixed block sizes {sorted(sizes)} in one expression")
    return sizes.pop() if sizes else default


def contains_flip(e: OperatorExpr) -> bool:
    return any(isinstance(node, Flip) for node in e.walk())


def symbol_widths(e: OperatorExpr) -> list[int]:
    return [node.symbol.width for node in e.walk() if isinstance(node, Laurent)]


def active_range(e: OperatorExpr) -> Range:
    """Indices where the projections present switch on or off."""
    pts = [0]
    for node in e.walk():
        if isinstance(node, Proj):
            pts += [p for p in (node.lo, node.hi) if p is not None]
    return min(pts), max(pts) + 1


def _intersect(r: Range, lo: int | None, hi: int | None) -> Range:
    a = r[0] if lo is None else max(r[0], lo)
    b = r[1] if hi is None else min(r[1], hi)
    return (a, b) if a < b else (r[0], r[0])


def col_range(e: OperatorExpr, rows: Range) -> Range:
    """A range holding every column k with e[j, k] != 0 for some j in ``rows``."""
    lo, hi = rows
    if lo >= hi:
        return rows
    if isinstance(e, Laurent):
        return lo - e.symbol.k_max, hi - e.symbol.k_min
    if isinstance(e, Proj):
        return _intersect(rows, e.lo, e.hi)
    if isinstance(e, Identity):
        return rows
    if isinstance(e, Flip):
        return -hi, -lo
    if isinstance(e, Scaled):
        return col_range(e.expr, rows)
    if isinstance(e, Sum):
        rs = [col_range(t, rows) for t in e.terms]
        rs = [r for r in rs if r[0] < r[1]] or [rows]
        return min(r[0] for r in rs), max(r[1] for r in rs)
    if isinstance(e, Product):
        r = rows
        for f in e.factors:
            r = col_range(f, r)
        return r
    raise TypeError(f"unknown operator node {type(e).__name__}")


# -- realization -------------------------------------------------------------

def _laurent_block(a: Symbol, rows: Range, cols: Range) -> np.ndarray:
    n = a.block_size
    j = np.arange(*rows)
    k = np.arange(*cols)
    d = j[:, None] - k[None, :]
    if d.size == 0:
        return np.zeros(((rows[1] - rows[0]) * n, (cols[1] - cols[0]) * n), dtype=complex)
    dlo = int(d.min())
    coeffs = a.window(dlo, int(d.max()) + 1)
    blocks = coeffs[d - dlo]
    if n == 1:
        return blocks[:, :, 0, 0]
    return blocks.transpose(0, 2, 1, 3).reshape(len(j) * n, len(k) * n)


def _diag_block(rows: Range, cols: Range, n: int, lo: int | None, hi: int | None,
                flip: bool = False) -> np.ndarray:
    out = np.zeros(((rows[1] - rows[0]) * n, (cols[1] - cols[0]) * n), dtype=complex)
    j = np.arange(*_intersect(rows, lo, hi))
    k = -j - 1 if flip else j
    ok = (k >= cols[0]) & (k < cols[1])
    j, k = j[ok] - rows[0], k[ok] - cols[0]
    for p in range(n):
        out[j * n + p, k * n + p] = 1.0
    return out


def realize_rect(e: OperatorExpr, rows: Range, cols: Range, n: int | None = None) -> np.ndarray:
    """Dense block of e with row indices in ``rows`` and column indices in ``cols``."""
    n = block_size(e) if n is None else n
    if isinstance(e, Laurent):
        return _laurent_block(e.symbol, rows, cols)
    if isinstance(e, Proj):
        return _diag_block(rows, cols, n, e.lo, e.hi)
    if isinstance(e, Identity):
        return _diag_block(rows, cols, n, None, None)
    if isinstance(e, Flip):
        return _diag_block(rows, cols, n, None, None, flip=True)
    if isinstance(e, Scaled):
        return e.s * realize_rect(e.expr, rows, cols, n)
    if isinstance(e, Sum):
        out = realize_rect(e.terms[0], rows, cols, n)
        for t in e.terms[1:]:
            out = out + realize_rect(t, rows, cols, n)
        return out
    if isinstance(e, Product):
        if len(e.factors) == 1:
            return realize_rect(e.factors[0], rows, cols, n)
        inner = col_range(e.factors[0], rows)
        if inner[0] >= inner[1]:
            return np.zeros(((rows[1] - rows[0]) * n, (cols[1] - cols[0]) * n), dtype=complex)
        left = realize_rect(e.factors[0], rows, inner, n)
        rest = e.factors[1] if len(e.factors) == 2 else Product(e.factors[1:])
        return left @ realize_rect(rest, inner, cols, n)
    raise TypeError(f"unknown operator node {type(e).__name__}")


def realize(e: OperatorExpr, w: WindowSpec, n: int | None = None) -> np.ndarray:
    """Square finite section of e on the window w."""
    if contains_flip(e) and not w.flip_symmetric:
        raise WindowNotFlipSymmetric(f"window [{w.lo}, {w.hi}) is not symmetric about -1/2")
    return realize_rect(e, (w.lo, w.hi), (w.lo, w.hi), n)


def restrict(m: np.ndarray, w: WindowSpec, sub: WindowSpec, n: int) -> np.ndarray:
    """Cut the sub-window block out of a realization on w."""
    a, b = (sub.lo - w.lo) * n, (sub.hi - w.lo) * n
    return m[a:b, a:b]


# -- classical finite sections -----------------------------------------------

def toeplitz_finite(a: Symbol, n: int) -> np.ndarray:
    """T_n(a) = (a_{j-k}), j, k = 0..n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _laurent_block(a, (0, n), (0, n))


def laurent_finite(a: Symbol, w: WindowSpec) -> np.ndarray:
    return _laurent_block(a, (w.lo, w.hi), (w.lo, w.hi))


def hankel_finite(a: Symbol, rows: int, cols: int | None = None, tilde: bool = False) -> np.ndarray:
    """Leading block of H(a) = (a_{j+k+1}), or of H(a~) = (a_{-j-k-1}) with ``tilde``."""
    cols = rows if cols is None else cols
    nb = a.block_size
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    idx = -(j + k + 1) if tilde else j + k + 1
    lo = int(idx.min())
    blocks = a.window(lo, int(idx.max()) + 1)[idx - lo]
    return blocks.transpose(0, 2, 1, 3).reshape(rows * nb, cols * nb)


# -- named operator expressions --------------------------------------------

def toeplitz_expr(a: Symbol) -> OperatorExpr:
    """T(a) = P L(a) P."""
    return P() @ L(a) @ P()


def hankel_expr(a: Symbol, tilde: bool = False) -> OperatorExpr:
    """H(a) = P L(a) Q J and H(a~) = J Q L(a) P (both read on Im P)."""
    if tilde:
        return J @ Q() @ L(a) @ P()
    return P() @ L(a) @ Q() @ J
