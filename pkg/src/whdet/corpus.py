"""Symbol JSON schema, builders and the shipped default corpus."""

from __future__ import annotations

import copy
from typing import Any

import numpy as np

from .errors import CorpusError
from .symbols import Symbol, exp_symbol, multiply


def parse_complex(v: Any) -> complex:
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def complex_json(z: complex) -> Any:
    z = complex(z)
    if z.imag == 0:
        return z.real
    return {"re": z.real, "im": z.imag}


# -- builders ----------------------------------------------------------------

def rational_pair(alpha: complex, beta: complex) -> Symbol:
    """(1 - alpha t)(1 - beta / t)."""
    return Symbol.from_dict({-1: -beta, 0: 1 + alpha * beta, 1: -alpha})


def random_decay(seed: int, block_size: int, radius: float, halfwidth: int,
                 shift: complex = 0.0) -> Symbol:
    """Seeded Gaussian coefficients scaled by radius^|k| on [-halfwidth, halfwidth]."""
    rng = np.random.default_rng(seed)
    D, N = int(halfwidth), int(block_size)
    shape = (2 * D + 1, N, N)
    c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    c *= (float(radius) ** np.abs(np.arange(-D, D + 1)))[:, None, None]
    c[D] += shift * np.eye(N)
    return Symbol(c, -D)


def conjugation_matrix(seed: int, n: int) -> np.ndarray:
    """Seeded, well-conditioned V = I + 0.5 G / ||G||."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.eye(n) + 0.5 * G / np.linalg.norm(G, 2)


def diagonal(entries: list[Symbol]) -> Symbol:
    lo = min(e.k_min for e in entries)
    hi = max(e.k_max for e in entries) + 1
    n = len(entries)
    c = np.zeros((hi - lo, n, n), dtype=complex)
    for i, e in enumerate(entries):
        c[:, i, i] = e.window(lo, hi)[:, 0, 0]
    return Symbol(c, lo)


def conjugated_diagonal(seed: int, entries: list[Symbol]) -> Symbol:
    """V diag(entries) V^{-1} with V from :func:`conjugation_matrix`."""
    V = conjugation_matrix(seed, len(entries))
    d = diagonal(entries)
    return Symbol(V @ d.coeffs @ np.linalg.inv(V), d.k_min).compact()


def build_symbol(spec: dict) -> Symbol:
    """Symbol from its JSON form (explicit coefficients or a builder)."""
    if not isinstance(spec, dict):
        raise CorpusError(f"symbol must be an object, got {type(spec).__name__}")
    if "builder" not in spec:
        return symbol_from_json(spec)
    kind = spec["builder"]
    try:
        if kind == "rational_pair":
            return rational_pair(parse_complex(spec["alpha"]), parse_complex(spec["beta"]))
        if kind == "monomial":
            return Symbol.monomial(int(spec["w"]), int(spec.get("block_size", 1)))
        if kind == "random_decay":
            return random_decay(int(spec["seed"]), int(spec["block_size"]), float(spec["radius"]),
                                int(spec["halfwidth"]), parse_complex(spec.get("shift", 0.0)))
        if kind == "conjugated_diagonal":
            return conjugated_diagonal(int(spec["seed"]), [build_symbol(e) for e in spec["entries"]])
        if kind == "diagonal":
            return diagonal([build_symbol(e) for e in spec["entries"]])
        if kind == "product":
            factors = [build_symbol(e) for e in spec["factors"]]
            out = factors[0]
            for f in factors[1:]:
                out = multiply(out, f)
            return out
        if kind == "exp":
            poly = Symbol.from_dict({int(k): parse_complex(v) for k, v in spec["coeffs"].items()})
            return exp_symbol(poly)
    except KeyError as exc:
        raise CorpusError(f"builder {kind!r} is missing field {exc}") from None
    raise CorpusError(f"unknown builder {kind!r}")


def symbol_from_json(obj: dict) -> Symbol:
    try:
        n = int(obj["block_size"])
        coeffs = {}
        for entry in obj["coeffs"]:
            re = np.asarray(entry["re"], dtype=float)
            im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
            coeffs[int(entry["k"])] = (re + 1j * im).reshape(n, n)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"malformed symbol JSON: {exc}") from None
    return Symbol.from_dict(coeffs, n)


def symbol_to_json(a: Symbol) -> dict:
    return {
        "block_size": a.block_size,
        "coeffs": [{"k": k, "re": m.real.tolist(), "im": m.imag.tolist()}
                   for k, m in a.items() if np.any(m != 0)],
    }


# -- the shipped corpus ------------------------------------------------------

def _rp(alpha, beta) -> dict:
    return {"builder": "rational_pair", "alpha": alpha, "beta": beta}


def _mono(w) -> dict:
    return {"builder": "monomial", "w": w}


DEFAULT_SYMBOLS: dict[str, dict] = {
    "rp_05_03": _rp(0.5, 0.3),
    "rp_02_04": _rp(0.2, 0.4),
    "rp_c": _rp({"re": 0.3, "im": 0.4}, {"re": -0.2, "im": 0.5}),
    "exp_02_01": {"builder": "exp", "coeffs": {"1": 0.2, "-1": 0.1}},
    "cd_2": {"builder": "conjugated_diagonal", "seed": 7,
             "entries": [_rp(0.5, 0.3), _rp(0.2, 0.4)]},
    "cd_2c": {"builder": "conjugated_diagonal", "seed": 11,
              "entries": [_rp({"re": 0.1, "im": 0.4}, 0.3), _rp(-0.4, 0.25)]},
    "rd_2": {"builder": "random_decay", "seed": 3, "block_size": 2, "radius": 0.3,
             "halfwidth": 3, "shift": 2.0},
    "chi_1": _mono(1),
    "chi_m1_rp": {"builder": "product", "factors": [_mono(-1), _rp(0.5, 0.3)]},
    "chi_m2_rp": {"builder": "product", "factors": [_mono(-2), _rp(0.2, 0.4)]},
    "chi_3_rp": {"builder": "product", "factors": [_mono(3), _rp(0.5, 0.3)]},
    "blk_w1": {"builder": "diagonal", "entries": [_mono(1), _rp(0.2, 0.4)]},
    "blk_w1_conj": {"builder": "conjugated_diagonal", "seed": 5,
                    "entries": [{"builder": "product", "factors": [_mono(1), _rp(0.5, 0.3)]},
                                _rp(0.2, 0.4)]},
    "blk_partial": {"builder": "diagonal",
                    "entries": [{"builder": "product", "factors": [_mono(2), _rp(0.5, 0.3)]},
                                {"builder": "product", "factors": [_mono(-1), _rp(0.2, 0.4)]}]},
}

_ZERO_WINDING = ["rp_05_03", "rp_02_04", "rp_c", "exp_02_01", "cd_2", "cd_2c", "rd_2"]
_S_GRID = [0.7, -0.7, 0.3, -0.3, {"re": 0.0, "im": 0.5}, {"re": 0.2, "im": 0.4}]

DEFAULT_CHECKS: list[dict] = [
    {"identity": "BO", "symbols": _ZERO_WINDING, "n": [1, 2, 5, 10]},
    {"identity": "BDR12", "symbols": _ZERO_WINDING, "n": [1, 3, 6]},
    {"identity": "EQ6", "symbols": _ZERO_WINDING, "n": [-3, 0, 2, 5], "s": _S_GRID},
    {"identity": "EQ15", "symbols": ["chi_1", "chi_m1_rp", "chi_m2_rp", "chi_3_rp",
                                      "blk_w1", "blk_w1_conj", "blk_partial"],
     "n": [-2, 0, 3], "s": [0.7, -0.3, {"re": 0.2, "im": 0.4}]},
    {"identity": "EQ17", "symbols": ["rp_05_03", "rp_02_04", "cd_2"],
     "n_list": [[2, 5], [1, 3, 4]], "s_list": [[0.3, 0.6], [0.2, -0.3, 0.5]]},
    {"identity": "EQ17W", "symbols": ["chi_1", "chi_m1_rp", "chi_3_rp"],
     "n_list": [[2, 5]], "s_list": [[0.3, 0.6]], "tol": 1e-6},
    {"identity": "EQ2", "symbols": _ZERO_WINDING, "M": [64]},
    {"identity": "CHAIN", "symbols": _ZERO_WINDING, "n": [4], "tol": 1e-8},
    {"identity": "REGAUGE", "symbols": _ZERO_WINDING, "n": [6], "tol": 1e-9},
    {"identity": "EQ8", "count": 20, "dim": 12},
]


def default_corpus() -> dict:
    return copy.deepcopy({
        "tol": 1e-7,
        "seed": 20240601,
        "policy": {"drop_threshold": 1e-14, "det_tol": 1e-11},
        "symbols": [{"name": k, "symbol": v} for k, v in DEFAULT_SYMBOLS.items()],
        "identities": DEFAULT_CHECKS,
    })
