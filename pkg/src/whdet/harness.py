"""Run a corpus of (symbol x identity x parameter) cells and collect a report."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .corpus import build_symbol, parse_complex
from .errors import ConstraintViolated, CorpusError, WhdetError
from .identities import (
    IDENTITY_IDS,
    IdentityParams,
    IdentityReport,
    LabSymbol,
    DET_TOL,
    _validate_multi,
    check_doubled_projection,
    check_toeplitz_det,
    check_toeplitz_hankel,
    check_inverse_chain,
    check_jacobi,
    check_multi_interval,
    check_regauge,
    check_s_identities,
    check_winding,
    failed_report,
    random_trace_class,
)

log = logging.getLogger(__name__)

# report ids produced together by one cell
GROUPS = {
    "BO": "BO", "BDR12": "BDR12", "EQ5": "BDR12",
    "EQ6": "EQ6", "EQ7": "EQ6", "EQ9": "EQ6",
    "EQ15": "EQ15", "EQ16": "EQ15", "EQ25": "EQ15", "EQ26": "EQ15",
    "EQ17": "EQ17", "EQ17W": "EQ17W", "EQ2": "EQ2", "EQ8": "EQ8",
    "CHAIN": "CHAIN", "REGAUGE": "REGAUGE",
}
assert set(GROUPS) == set(IDENTITY_IDS)


@dataclass(frozen=True)
class Cell:
    check: int
    identity: str  # group name
    symbol: str | None
    params: dict
    tol: float
    index: int  # position in the parameter grid

    @property
    def key(self) -> tuple:
        return (self.check, self.symbol or "", self.index)


@dataclass
class CorpusSpec:
    symbols: dict[str, dict]
    checks: list[dict]
    tol: float = 1e-7
    seed: int = 0
    policy: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusSpec":
        if not isinstance(obj, dict):
            raise CorpusError("corpus must be a JSON object")
        symbols = {}
        for i, entry in enumerate(obj.get("symbols", [])):
            if "name" not in entry or "symbol" not in entry:
                raise CorpusError(f"symbols[{i}]: need 'name' and 'symbol'")
            if entry["name"] in symbols:
                raise CorpusError(f"symbols[{i}]: duplicate name {entry['name']!r}")
            symbols[entry["name"]] = entry["symbol"]
        seed = int(os.environ.get("WHDET_SEED", obj.get("seed", 0)))
        checks = obj.get("identities", obj.get("checks", []))
        return cls(symbols, list(checks), float(obj.get("tol", 1e-7)), seed,
                   dict(obj.get("policy", {})))

    def cells(self) -> list[Cell]:
        """Expand and validate the grid; errors name the offending coordinates."""
        out = []
        for ci, chk in enumerate(self.checks):
            where = f"identities[{ci}]"
            ident = chk.get("identity")
            if ident not in GROUPS:
                raise CorpusError(f"{where}: unknown identity {ident!r}")
            group = GROUPS[ident]
            tol = float(chk.get("tol", self.tol))
            if group == "EQ8":
                dim = int(chk.get("dim", 10))
                for i in range(int(chk.get("count", 1))):
                    for n in range(1, dim + 1):
                        out.append(Cell(ci, group, None, {"k": i, "dim": dim, "n": n},
                                        tol, i * dim + n))
                continue
            names = chk.get("symbols", list(self.symbols))
            for si, name in enumerate(names):
                if name not in self.symbols:
                    raise CorpusError(f"{where}.symbols[{si}]: unknown symbol {name!r}")
            grid = list(self._grid(group, chk, where))
            for name in names:
                for gi, params in enumerate(grid):
                    out.append(Cell(ci, group, name, params, tol, gi))
        return out

    def _grid(self, group: str, chk: dict, where: str) -> Iterable[dict]:
        def need(key):
            if key not in chk:
                raise CorpusError(f"{where}: identity {chk['identity']} needs '{key}'")
            return chk[key]

        if group in ("BO", "BDR12", "CHAIN", "REGAUGE"):
            for i, n in enumerate(need("n")):
                if int(n) < 1:
                    raise CorpusError(f"{where}.n[{i}]: n must be >= 1, got {n}")
                yield {"n": int(n)}
        elif group in ("EQ6", "EQ15"):
            svals = need("s")
            for j, s in enumerate(svals):
                if parse_complex(s) in (1, -1):
                    raise CorpusError(f"{where}.s[{j}]: s = +-1 is excluded")
            for n in need("n"):
                for s in svals:
                    yield {"n": int(n), "s": parse_complex(s)}
        elif group in ("EQ17", "EQ17W"):
            n_sets, s_sets = need("n_list"), need("s_list")
            if len(n_sets) != len(s_sets):
                raise CorpusError(f"{where}: n_list and s_list need the same number of sets")
            for j, (nl, sl) in enumerate(zip(n_sets, s_sets)):
                sl = [parse_complex(s) for s in sl]
                try:
                    _validate_multi([int(x) for x in nl], sl)
                except ConstraintViolated as exc:
                    raise CorpusError(f"{where}.n_list[{j}]/s_list[{j}]: {exc}") from None
                yield {"n_list": [int(x) for x in nl], "s_list": sl}
        elif group == "EQ2":
            for M in need("M"):
                yield {"M": int(M)}


# -- execution ---------------------------------------------------------------

_LAB_CACHE: dict[tuple, LabSymbol] = {}


def _lab(name: str, spec: dict, policy: dict) -> LabSymbol:
    key = (name, json.dumps(spec, sort_keys=True), json.dumps(policy, sort_keys=True))
    if key not in _LAB_CACHE:
        a = build_symbol(spec)
        if "drop_threshold" in policy:
            a = a.with_threshold(float(policy["drop_threshold"]))
        _LAB_CACHE[key] = LabSymbol(a, float(policy.get("det_tol", DET_TOL)))
    return _LAB_CACHE[key]


def _params_for(cell: Cell) -> IdentityParams:
    p = cell.params
    return IdentityParams(n=p.get("n"), s=p.get("s"),
                          n_list=tuple(p["n_list"]) if "n_list" in p else None,
                          s_list=tuple(p["s_list"]) if "s_list" in p else None, tol=cell.tol)


def run_cell(cell: Cell, symbol_spec: dict | None, policy: dict, seed: int) -> tuple[list[IdentityReport], float]:
    """Reports for one cell; numeric failures become failed reports."""
    t0 = time.perf_counter()
    p, tol = cell.params, cell.tol
    try:
        if cell.identity == "EQ8":
            K = random_trace_class(seed + p["k"], p["dim"])
            reports = [check_jacobi(K, p["n"], tol)]
        else:
            lab = _lab(cell.symbol, symbol_spec, policy)
            g = cell.identity
            if g == "BO":
                reports = [check_toeplitz_det(lab, p["n"], tol)]
            elif g == "BDR12":
                reports = list(check_doubled_projection(lab, p["n"], tol))
            elif g == "EQ6":
                reports = list(check_s_identities(lab, p["n"], p["s"], tol))
            elif g == "EQ15":
                reports = list(check_winding(lab, p["n"], p["s"], tol))
            elif g in ("EQ17", "EQ17W"):
                reports = [check_multi_interval(lab, p["n_list"], p["s_list"], tol,
                                                with_winding=g == "EQ17W")]
            elif g == "EQ2":
                reports = [check_toeplitz_hankel(lab, p["M"], tol)]
            elif g == "CHAIN":
                reports = [check_inverse_chain(lab, p["n"], tol)]
            elif g == "REGAUGE":
                reports = [check_regauge(lab, p["n"], seed, tol)]
            else:  # pragma: no cover - guarded by validation
                raise CorpusError(f"unknown identity {g}")
    except (WhdetError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        log.info("cell %s failed: %s", cell.key, exc)
        reports = [failed_report(cell.identity, _params_for(cell), exc)]
    return reports, time.perf_counter() - t0


def _run_one(args):
    return run_cell(*args)


def run(spec: CorpusSpec | dict, jobs: int = 1) -> dict:
    """Execute every cell; the report JSON is canonical up to the timing fields."""
    if isinstance(spec, dict):
        spec = CorpusSpec.from_json(spec)
    cells = sorted(spec.cells(), key=lambda c: c.key)
    tasks = [(c, spec.symbols.get(c.symbol) if c.symbol else None, spec.policy, spec.seed)
             for c in cells]
    t0 = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [run_cell(*t) for t in tasks]
    entries = []
    counts = {"pass": 0, "fail": 0, "error": 0}
    for cell, (reports, wall) in zip(cells, results):
        for r in reports:
            status = "error" if r.error else ("pass" if r.passed else "fail")
            counts[status] += 1
            entries.append({"check": cell.check, "symbol": cell.symbol, "cell": cell.index,
                            "status": status, "report": r.to_json(), "wall_time_s": wall})
    return {
        "summary": {"total": len(entries), **counts},
        "environment": {"tol": spec.tol, "seed": spec.seed, "policy": spec.policy,
                        "numpy": np.__version__},
        "results": entries,
        "total_wall_time_s": time.perf_counter() - t0,
    }


def strip_timing(report: dict) -> dict:
    out = {k: v for k, v in report.items() if k != "total_wall_time_s"}
    out["results"] = [{k: v for k, v in e.items() if k != "wall_time_s"} for e in report["results"]]
    return out


def dumps(report: dict, timing: bool = True) -> str:
    return json.dumps(report if timing else strip_timing(report), indent=1, sort_keys=True)


def exit_code(report: dict) -> int:
    s = report["summary"]
    return 0 if s["fail"] == 0 and s["error"] == 0 else 1


CSV_FIELDS = ["check", "symbol", "cell", "identity", "n", "s", "n_list", "s_list",
              "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "status", "error"]


def _flat(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, dict) and "re" in v:
        return f"{v['re']}{v['im']:+}j"
    if isinstance(v, list):
        return " ".join(_flat(x) for x in v)
    return str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for e in report["results"]:
        r, p = e["report"], e["report"]["params"]
        row = {"check": e["check"], "symbol": e["symbol"] or "", "cell": e["cell"],
               "identity": r["identity"], "status": e["status"], "error": r["error"] or "",
               "abs_err": r["abs_err"], "rel_err": r["rel_err"]}
        for key in ("n", "s", "n_list", "s_list"):
            row[key] = _flat(p.get(key))
        for side in ("lhs", "rhs"):
            z = r[side] or {"re": "", "im": ""}
            row[f"{side}_re"], row[f"{side}_im"] = z["re"], z["im"]
        w.writerow(row)
    return buf.getvalue()
