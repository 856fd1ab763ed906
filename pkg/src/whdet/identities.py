"""Both sides of every determinant identity, assembled and compared.

Each ``check_*`` function takes a :class:`Symbol` (or a prepared
:class:`LabSymbol`, which caches the inverse and factorizations across checks)
and returns :class:`IdentityReport` objects.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConstraintViolated
from .fredholm import (
    DeterminantResult,
    det_finite,
    e_constant,
    fredholm_det,
    geometric_mean_from_factors,
    hankel_product_expr,
)
from .operators import (
    I,
    L,
    OperatorExpr,
    P,
    P_n,
    Q,
    Q_n,
    hankel_finite,
    interval,
    realize,
    realize_rect,
    toeplitz_finite,
    WindowSpec,
)
from .symbols import Symbol, det_winding, invert
from .wiener_hopf import Factorization, factorize, regauge

IDENTITY_IDS = ("BO", "BDR12", "EQ5", "EQ6", "EQ7", "EQ9", "EQ15", "EQ16", "EQ25", "EQ26",
                "EQ17", "EQ17W", "EQ2", "EQ8", "CHAIN", "REGAUGE")

DEFAULT_S_GRID = (0.7, -0.7, 0.3, -0.3, 0.5j, 0.2 + 0.4j)
# Fredholm determinants inside a check are converged well below the check tolerance
DET_TOL = 1e-11


@dataclass(frozen=True)
class IdentityParams:
    n: int | None = None
    s: complex | None = None
    n_list: tuple[int, ...] | None = None
    s_list: tuple[complex, ...] | None = None
    tol: float = 1e-7


@dataclass
class IdentityReport:
    identity_id: str
    params: IdentityParams
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    passed: bool
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "identity": self.identity_id,
            "params": _params_json(self.params),
            "lhs": _cjson(self.lhs),
            "rhs": _cjson(self.rhs),
            "abs_err": _fjson(self.abs_err),
            "rel_err": _fjson(self.rel_err),
            "pass": self.passed,
            "diagnostics": {k: _jsonable(v) for k, v in sorted(self.diagnostics.items())},
            "error": self.error,
        }


def _cjson(z) -> dict | None:
    if z is None:
        return None
    z = complex(z)
    return {"re": _fjson(z.real), "im": _fjson(z.imag)}


def _fjson(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return _cjson(v)
    if isinstance(v, (float, np.floating)):
        return _fjson(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, WindowSpec):
        return [v.lo, v.hi]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _params_json(p: IdentityParams) -> dict:
    out = {}
    for k, v in asdict(p).items():
        if v is None:
            continue
        out[k] = _jsonable(v)
    return out


def make_report(identity_id: str, params: IdentityParams, lhs: complex, rhs: complex,
                abs_err: float | None = None, **diagnostics) -> IdentityReport:
    """pass <=> rel_err < tol, or abs_err < tol when |lhs| < 1."""
    lhs, rhs = complex(lhs), complex(rhs)
    err = abs(lhs - rhs) if abs_err is None else float(abs_err)
    rel = err / abs(lhs) if lhs != 0 else (0.0 if err == 0 else np.inf)
    passed = bool(err / max(1.0, abs(lhs)) < params.tol)
    return IdentityReport(identity_id, params, lhs, rhs, err, rel, passed, diagnostics)


def failed_report(identity_id: str, params: IdentityParams, exc: Exception) -> IdentityReport:
    kind = getattr(exc, "kind", type(exc).__name__)
    return IdentityReport(identity_id, params, complex("nan"), complex("nan"), np.nan, np.nan,
                          False, {}, f"{kind}: {exc}")


class LabSymbol:
    """A symbol with lazily computed, cached derived data."""

    def __init__(self, a: Symbol, det_tol: float = DET_TOL, factorization: Factorization | None = None):
        self.a = a
        self.det_tol = det_tol
        if factorization is not None:
            self.__dict__["factorization"] = factorization

    @property
    def N(self) -> int:
        return self.a.block_size

    @property
    def pad0(self) -> int:
        return 2 * self.a.width + 16

    @cached_property
    def inverse(self) -> Symbol:
        return invert(self.a)

    @cached_property
    def factorization(self) -> Factorization:
        return factorize(self.a)

    @cached_property
    def winding(self) -> int:
        return det_winding(self.a)

    @cached_property
    def G(self) -> complex:
        f = self.factorization
        return geometric_mean_from_factors(f.v_plus, f.v_minus)

    @cached_property
    def E(self) -> complex:
        return e_constant(self.factorization, self.det_tol, pad0=self.pad0)

    def det(self, e: OperatorExpr, active=None) -> DeterminantResult:
        return fredholm_det(e, self.det_tol, pad0=self.pad0, active=active, n=self.N)

    def with_factorization(self, f: Factorization) -> "LabSymbol":
        return LabSymbol(self.a, self.det_tol, f)


def as_lab(a: Symbol | LabSymbol) -> LabSymbol:
    return a if isinstance(a, LabSymbol) else LabSymbol(a)


def _diag(f: Factorization) -> dict:
    return {"residual_right": f.residual_right, "residual_left": f.residual_left,
            "residual_bc": f.residual_bc}


# -- Toeplitz determinant as G^n E times a tail determinant --------------------

def tail_expr(b: Symbol, c: Symbol, n: int) -> OperatorExpr:
    """I - Q_n H(b) H(c~) Q_n."""
    return I - Q_n(n) @ hankel_product_expr(b, c) @ Q_n(n)


def check_toeplitz_det(a: Symbol | LabSymbol, n: int, tol: float = 1e-9) -> IdentityReport:
    lab = as_lab(a)
    params = IdentityParams(n=n, tol=tol)
    f = lab.factorization
    lhs = det_finite(toeplitz_finite(lab.a, n))
    tail = lab.det(tail_expr(f.b, f.c, n))
    rhs = lab.G ** n * lab.E * tail.value
    return make_report("BO", params, lhs, rhs, G=lab.G, E=lab.E, tail_det=tail.value,
                       window=tail.window_used, **_diag(f))


def check_doubled_projection(a: Symbol | LabSymbol, n: int, tol: float = 1e-8) -> tuple[IdentityReport, IdentityReport]:
    """Reports for det T_n(a) = G^n E 2^{-nN} det(I + P - L(c) Q_n L(b)) and for the 2^{nN} factor."""
    lab = as_lab(a)
    params = IdentityParams(n=n, tol=tol)
    f, N = lab.factorization, lab.N
    big = lab.det(I + P() - L(f.c) @ Q_n(n) @ L(f.b))
    tail = lab.det(tail_expr(f.b, f.c, n))
    lhs = det_finite(toeplitz_finite(lab.a, n))
    rhs4 = lab.G ** n * lab.E * 2.0 ** (-n * N) * big.value
    r4 = make_report("BDR12", params, lhs, rhs4, big_det=big.value, window=big.window_used, **_diag(f))
    r5 = make_report("EQ5", params, big.value, 2.0 ** (n * N) * tail.value,
                     ratio=big.value / tail.value, window=tail.window_used)
    return r4, r5


# -- f_n and its two tail representations ------------------------------------

def f_n_expr(a: Symbol, a_inv: Symbol, n: int, s: complex) -> OperatorExpr:
    """I + s P - s L(a) Q_n L(a^{-1})."""
    return I + s * P() - s * (L(a) @ Q_n(n) @ L(a_inv))


def f_n(a: Symbol | LabSymbol, n: int, s: complex) -> DeterminantResult:
    lab = as_lab(a)
    return lab.det(f_n_expr(lab.a, lab.inverse, n, s))


def upper_tail_det(lab: LabSymbol, n: int, s: complex) -> DeterminantResult:
    """det(I - s^2 Q_n L(a^{-1}) Q L(a) Q_n)."""
    return lab.det(I - s * s * (Q_n(n) @ L(lab.inverse) @ Q() @ L(lab.a) @ Q_n(n)))


def lower_tail_det(lab: LabSymbol, n: int, s: complex) -> DeterminantResult:
    """det(I - s^2 (I - Q_n) L(a^{-1}) P L(a) (I - Q_n))."""
    comp = I - Q_n(n)
    return lab.det(I - s * s * (comp @ L(lab.inverse) @ P() @ L(lab.a) @ comp))


def _check_s(s: complex, plus: bool = True, minus: bool = True) -> None:
    if plus and s == -1:
        raise ConstraintViolated("s = -1 is excluded for the (1 + s) form")
    if minus and s == 1:
        raise ConstraintViolated("s = 1 is excluded for the (1 - s) form")


def check_s_identities(a: Symbol | LabSymbol, n: int, s: complex, tol: float = 1e-7
                       ) -> tuple[IdentityReport, IdentityReport, IdentityReport]:
    """EQ6, EQ7 and the product identity EQ9 for one (n, s)."""
    lab = as_lab(a)
    s = complex(s)
    _check_s(s)
    params = IdentityParams(n=n, s=s, tol=tol)
    N = lab.N
    fp = f_n(lab, n, s)
    fm = f_n(lab, n, -s)
    d6 = upper_tail_det(lab, n, s)
    d7 = lower_tail_det(lab, n, s)
    rhs6 = (1 + s) ** (n * N) * d6.value
    rhs7 = (1 - s) ** (-n * N) * d7.value
    return (
        make_report("EQ6", params, fp.value, rhs6, det=d6.value, window=d6.window_used,
                    f_n_window=fp.window_used),
        make_report("EQ7", params, fp.value, rhs7, det=d7.value, window=d7.window_used,
                    f_n_window=fp.window_used),
        make_report("EQ9", params, fm.value * fp.value, d7.value * d6.value,
                    f_n_minus_s=fm.value),
    )


def check_winding(a: Symbol | LabSymbol, n: int, s: complex, tol: float = 1e-7
                  ) -> tuple[IdentityReport, IdentityReport]:
    """Winding-corrected forms: (1 + s)^{nN + w} and (1 - s)^{-nN - w} prefactors."""
    lab = as_lab(a)
    s = complex(s)
    _check_s(s)
    params = IdentityParams(n=n, s=s, tol=tol)
    N, w = lab.N, lab.winding
    ids = ("EQ15", "EQ16") if N == 1 else ("EQ25", "EQ26")
    fp = f_n(lab, n, s)
    d6 = upper_tail_det(lab, n, s)
    d7 = lower_tail_det(lab, n, s)
    return (
        make_report(ids[0], params, fp.value, (1 + s) ** (n * N + w) * d6.value, winding=w,
                    det=d6.value, window=d6.window_used),
        make_report(ids[1], params, fp.value, (1 - s) ** (-n * N - w) * d7.value, winding=w,
                    det=d7.value, window=d7.window_used),
    )


# -- multi-interval -------------------------------------------------------------

def _validate_multi(n_list: Sequence[int], s_list: Sequence[complex]) -> None:
    if len(n_list) != len(s_list) or not n_list:
        raise ConstraintViolated("n_list and s_list must be non-empty and of equal length")
    ns = [0, *n_list]
    if any(x > y for x, y in zip(ns, ns[1:])):
        raise ConstraintViolated(f"need 0 <= n_1 <= ... <= n_k, got {list(n_list)}")
    sk = s_list[-1]
    for sj in (0, *s_list):
        if sk - sj == -1:
            raise ConstraintViolated(f"s_k - s_j = -1 for s_j = {sj}")


def multi_interval_lhs_expr(a: Symbol, a_inv: Symbol, n_list, s_list) -> OperatorExpr:
    e = I
    prev = 0
    for nj, sj in zip(n_list, s_list):
        e = e + (sj - prev) * (P() - L(a) @ Q_n(nj) @ L(a_inv))
        prev = sj
    return e


def multi_interval_rhs(a: Symbol, a_inv: Symbol, n_list, s_list, N: int
                       ) -> tuple[complex, OperatorExpr]:
    """Prefactor and the operator whose determinant completes the right-hand side.

    The last interval [n_k, infinity) is cut off by the realization window.
    """
    k = len(s_list)
    sk = s_list[-1]
    ns = [0, *n_list]
    ss = [0, *s_list]
    pref = 1.0 + 0j
    for j in range(k):
        pref *= (1 + sk - ss[j]) ** ((ns[j + 1] - ns[j]) * N)
    weights = None
    for j in range(1, k + 1):
        hi = ns[j + 1] if j < k else None
        term = (sk * ss[j] / (1 + sk - ss[j])) * interval(ns[j], hi)
        weights = term if weights is None else weights + term
    return pref, I - weights @ L(a_inv) @ Q() @ L(a)


def check_multi_interval(a: Symbol | LabSymbol, n_list: Sequence[int], s_list: Sequence[complex],
                         tol: float = 1e-7, with_winding: bool = False) -> IdentityReport:
    """EQ17; with ``with_winding`` the scalar variant with an extra (1 + s_k)^w (EQ17W)."""
    lab = as_lab(a)
    n_list = tuple(int(x) for x in n_list)
    s_list = tuple(complex(x) for x in s_list)
    _validate_multi(n_list, s_list)
    params = IdentityParams(n_list=n_list, s_list=s_list, tol=tol)
    lhs = lab.det(multi_interval_lhs_expr(lab.a, lab.inverse, n_list, s_list))
    pref, op = multi_interval_rhs(lab.a, lab.inverse, n_list, s_list, lab.N)
    d = lab.det(op, active=(0, n_list[-1] + 1))
    ident, diag = "EQ17", {}
    if with_winding:
        ident = "EQ17W"
        w = lab.winding
        pref *= (1 + s_list[-1]) ** w
        diag["winding"] = w
    return make_report(ident, params, lhs.value, pref * d.value, prefactor=pref,
                       window=d.window_used, **diag)


# -- structural identities ---------------------------------------------------

def toeplitz_hankel_residual(b: Symbol, c: Symbol, M: int) -> float:
    """max |T_M(b) T_M(c) + H_M(b) H_M(c~) - I| on the leading M/2 block corner."""
    N = b.block_size
    m = toeplitz_finite(b, M) @ toeplitz_finite(c, M) + \
        hankel_finite(b, M) @ hankel_finite(c, M, tilde=True)
    h = (M // 2) * N
    return float(np.abs(m[:h, :h] - np.eye(h)).max())


def check_toeplitz_hankel(a: Symbol | LabSymbol, M: int = 64, tol: float = 1e-7) -> IdentityReport:
    lab = as_lab(a)
    f = lab.factorization
    res = toeplitz_hankel_residual(f.b, f.c, M)
    return make_report("EQ2", IdentityParams(n=M, tol=tol), res, 0.0, **_diag(f))


def jacobi_sides(K: np.ndarray, n: int) -> tuple[complex, complex]:
    """det P_n (I - K)^{-1} P_n * det(I - K) and det(I - Q_n K Q_n) for a finite K."""
    d = K.shape[0]
    A = np.eye(d) - K
    lhs = det_finite(np.linalg.inv(A)[:n, :n]) * det_finite(A)
    rhs = det_finite(A[n:, n:]) if n < d else 1.0
    return lhs, rhs


def random_trace_class(seed: int, dim: int, norm: float = 0.45, decay: float = 0.8) -> np.ndarray:
    """Seeded complex matrix with entries decaying away from the corner, scaled to spectral norm ``norm``."""
    rng = np.random.default_rng(seed)
    K = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    idx = np.arange(dim)
    K *= decay ** (idx[:, None] + idx[None, :])
    return K * (norm / np.linalg.norm(K, 2))


def check_jacobi(K: np.ndarray, n: int, tol: float = 1e-10) -> IdentityReport:
    lhs, rhs = jacobi_sides(K, n)
    return make_report("EQ8", IdentityParams(n=n, tol=tol), lhs, rhs, dim=K.shape[0])


def inverse_chain(a: Symbol | LabSymbol, n: int, tol: float = DET_TOL, max_order: int = 4096
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three routes to P_n (I - K)^{-1} P_n with K = H(b) H(c~).

    1. invert I - P_m K P_m on growing half-line windows;
    2. P_n T(v_+^{-1}) T(u_-) T(u_+) T(v_-^{-1}) P_n as an exact finite section;
    3. T_n(v_+^{-1}) T_n(a) T_n(v_-^{-1}).
    """
    lab = as_lab(a)
    f, N = lab.factorization, lab.N
    K = hankel_product_expr(f.b, f.c)
    m, prev = n + lab.pad0, None
    while True:
        w = WindowSpec(-m, m)
        Km = realize(K, w, N)[m * N:, m * N:]
        lead = np.linalg.inv(np.eye(m * N) - Km)[:n * N, :n * N]
        if prev is not None and np.abs(lead - prev).max() < tol * max(1.0, np.abs(lead).max()):
            break
        if 2 * m > max_order:
            break
        prev, m = lead, 2 * m
    route1 = lead
    T = lambda s: P() @ L(s) @ P()
    chain = P_n(n) @ T(f.v_plus_inv) @ T(f.u_minus) @ T(f.u_plus) @ T(f.v_minus_inv) @ P_n(n)
    route2 = realize_rect(chain, (0, n), (0, n), N)
    route3 = (toeplitz_finite(f.v_plus_inv, n) @ toeplitz_finite(lab.a, n)
              @ toeplitz_finite(f.v_minus_inv, n))
    return route1, route2, route3


def check_inverse_chain(a: Symbol | LabSymbol, n: int, tol: float = 1e-8) -> IdentityReport:
    """Entrywise agreement of the three routes, plus det route3 = G^{-n} det T_n(a)."""
    lab = as_lab(a)
    r1, r2, r3 = inverse_chain(lab, n)
    diff = max(np.abs(r1 - r2).max(), np.abs(r1 - r3).max(), np.abs(r2 - r3).max())
    lhs, rhs = det_finite(r1), det_finite(r3)
    corollary = lab.G ** (-n) * det_finite(toeplitz_finite(lab.a, n))
    return make_report("CHAIN", IdentityParams(n=n, tol=tol), lhs, rhs,
                       abs_err=max(diff, abs(lhs - rhs)), entry_diff=diff,
                       det_corollary_err=abs(det_finite(r3) - corollary) / max(1.0, abs(corollary)))


def check_regauge(a: Symbol | LabSymbol, n: int, seed: int = 0, tol: float = 1e-9) -> IdentityReport:
    """BO right-hand side, G and E before and after a random constant regauging."""
    lab = as_lab(a)
    rng = np.random.default_rng(seed)
    N = lab.N

    def rand_matrix():
        return np.eye(N) + 0.4 * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))

    C, D = rand_matrix(), rand_matrix()
    other = lab.with_factorization(regauge(lab.factorization, C, D))
    before = check_toeplitz_det(lab, n, tol)
    after = check_toeplitz_det(other, n, tol)
    diffs = {
        "G": abs(lab.G - other.G) / max(1.0, abs(lab.G)),
        "E": abs(lab.E - other.E) / max(1.0, abs(lab.E)),
        "bo_rhs": abs(before.rhs - after.rhs) / max(1.0, abs(before.rhs)),
        "tail_det": abs(before.diagnostics["tail_det"] - after.diagnostics["tail_det"]),
    }
    return make_report("REGAUGE", IdentityParams(n=n, tol=tol), before.rhs, after.rhs,
                       abs_err=max(diffs.values()) * max(1.0, abs(before.rhs)),
                       **{f"diff_{k}": v for k, v in diffs.items()},
                       residual_right=other.factorization.residual_right)
