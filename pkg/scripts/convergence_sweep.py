"""Accuracy of the tail formula and of the window-doubling loop.

Part 1 compares det T_n(a) for a = (1 - alpha t)(1 - beta/t) with G^n E times the
tail determinant, against the closed form (1 - (ab)^{n+1}) / (1 - ab).
Part 2 prints the successive finite-section values of det(I - H(b) H(c~)),
started from a deliberately small window, next to the exact 1 - ab.
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from whdet.corpus import rational_pair
from whdet.fredholm import fredholm_det, hankel_product_expr
from whdet.identities import LabSymbol, check_toeplitz_det
from whdet.operators import I


@dataclass
class Config:
    pairs: list[tuple[float, float]] = field(
        default_factory=lambda: [(0.5, 0.3), (0.7, 0.6), (0.9, 0.5), (0.95, 0.9)])
    n_max: int = 40
    pad0: int = 1


def closed_form(ab: float, n: int) -> float:
    return (1 - ab ** (n + 1)) / (1 - ab)


def sweep_tail_formula(cfg: Config) -> None:
    print("alpha  beta   max rel err over n=1..%d   worst n" % cfg.n_max)
    for alpha, beta in cfg.pairs:
        lab = LabSymbol(rational_pair(alpha, beta))
        errs = []
        for n in range(1, cfg.n_max + 1):
            exact = closed_form(alpha * beta, n)
            errs.append(abs(check_toeplitz_det(lab, n).rhs - exact) / exact)
        k = int(np.argmax(errs))
        print(f"{alpha:5.2f} {beta:5.2f}   {errs[k]:.2e}                    {k + 1}")


def sweep_windows(cfg: Config) -> None:
    for alpha, beta in cfg.pairs:
        f = LabSymbol(rational_pair(alpha, beta)).factorization
        r = fredholm_det(I - hankel_product_expr(f.b, f.c), tol=1e-14, pad0=cfg.pad0, active=(0, 1))
        exact = 1 - alpha * beta
        print(f"\nalpha={alpha} beta={beta}  exact {exact:.15f}")
        for i, v in enumerate(r.history):
            print(f"  step {i}: {v.real:.15f}  err {abs(v - exact):.1e}")
        print(f"  final window [{r.window_used.lo}, {r.window_used.hi})")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--pad0", type=int, default=1)
    args = p.parse_args()
    cfg = Config(n_max=args.n_max, pad0=args.pad0)
    sweep_tail_formula(cfg)
    sweep_windows(cfg)
