"""Command line entry point: ``whdet verify | factor | det | corpus``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness
from .corpus import build_symbol, default_corpus, symbol_to_json
from .errors import WhdetError
from .fredholm import det_finite
from .identities import LabSymbol, tail_expr
from .operators import toeplitz_finite
from .wiener_hopf import factorize


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def cmd_verify(args) -> int:
    obj = _load_json(args.corpus)
    if args.tol is not None:
        obj["tol"] = args.tol
    report = harness.run(obj, jobs=args.jobs)
    text = harness.dumps(report, timing=not args.no_timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(harness.to_csv(report))
    s = report["summary"]
    print(f"{s['total']} checks: {s['pass']} pass, {s['fail']} fail, {s['error']} error",
          file=sys.stderr)
    return harness.exit_code(report)


def cmd_factor(args) -> int:
    a = build_symbol(_load_json(args.symbol))
    f = factorize(a)
    out = {name: symbol_to_json(getattr(f, name))
           for name in ("u_minus", "u_plus", "v_plus", "v_minus", "b", "c")}
    out["residuals"] = {"right": f.residual_right, "left": f.residual_left, "bc": f.residual_bc}
    print(json.dumps(out, indent=1))
    return 0


def cmd_det(args) -> int:
    lab = LabSymbol(build_symbol(_load_json(args.symbol)))
    n = args.n
    direct = det_finite(toeplitz_finite(lab.a, n))
    f = lab.factorization
    tail = lab.det(tail_expr(f.b, f.c, n))
    via_bo = lab.G ** n * lab.E * tail.value
    out = {"n": n, "det_direct": _cjson(direct), "det_bo": _cjson(via_bo),
           "G": _cjson(lab.G), "E": _cjson(lab.E), "tail_det": _cjson(tail.value),
           "rel_err": abs(direct - via_bo) / max(abs(direct), 1e-300)}
    print(json.dumps(out, indent=1))
    return 0


def cmd_corpus(args) -> int:
    print(json.dumps(default_corpus(), indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="whdet", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run every identity check of a corpus")
    v.add_argument("--corpus", required=True)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--csv", default=None, help="also write a flat CSV here")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", default=None, help="report file (default: stdout)")
    v.add_argument("--no-timing", action="store_true", help="omit wall-time fields")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("factor", help="Wiener-Hopf factors of one symbol")
    f.add_argument("--symbol", required=True)
    f.set_defaults(func=cmd_factor)

    d = sub.add_parser("det", help="det T_n(a) directly and as G^n E det(I - Q_n H(b) H(c~) Q_n)")
    d.add_argument("--symbol", required=True)
    d.add_argument("--n", type=int, required=True)
    d.set_defaults(func=cmd_det)

    c = sub.add_parser("corpus", help="print a corpus file")
    c.add_argument("--default", action="store_true", required=True)
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except WhdetError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
