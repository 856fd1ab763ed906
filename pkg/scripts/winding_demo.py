"""f_n(s) for symbols with nonzero winding, next to both corrected tail forms."""

import argparse

from whdet.corpus import DEFAULT_SYMBOLS, build_symbol
from whdet.identities import DEFAULT_S_GRID, LabSymbol, check_winding

NAMES = ["chi_1", "chi_m1_rp", "chi_m2_rp", "chi_3_rp", "blk_w1", "blk_w1_conj", "blk_partial"]

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[-2, 0, 3])
    args = p.parse_args()
    for name in NAMES:
        lab = LabSymbol(build_symbol(DEFAULT_SYMBOLS[name]))
        print(f"{name}: N={lab.N}, winding={lab.winding}")
        for n in args.n:
            for s in DEFAULT_S_GRID:
                up, low = check_winding(lab, n, s)
                print(f"  n={n:3d} s={complex(s):.2f}  f_n={up.lhs:.10f}  "
                      f"errs {up.rel_err:.1e} {low.rel_err:.1e}")
