"""Observed order of the ground-level error under grid refinement."""
import argparse

from matsusy import eigensolve as es
from matsusy.catalog import FamilyId as F, Params

CASES = [
    (F.F1_coulomb_like, Params(1.0, 0.0, 1.0)),
    (F.F1_coulomb_like, Params(2.0, 0.5, 1.0)),
    (F.F3_trig_rm_like, Params(2.0, 0.5, 1.0)),
    (F.F2_morse_like, Params(-3.4, 1.0, 1.0)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000])
    args = ap.parse_args()
    for f, p in CASES:
        s = es.convergence_order(f, p, tuple(args.sizes))
        print(f"{f.name:18} kappa={p.kappa:5.2f} mu={p.mu:5.2f}  order={s:.3f}")


if __name__ == "__main__":
    main()
