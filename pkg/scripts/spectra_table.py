"""Analytic vs finite-difference levels for one representative parameter set per family."""
import argparse

from matsusy import catalog as cat
from matsusy import eigensolve as es
from matsusy.catalog import FamilyId as F, Params

CASES = [
    (F.F1_coulomb_like, Params(2.0, 0.5, 1.0)),
    (F.F2_morse_like, Params(-3.4, 1.0, 1.0)),
    (F.F3_trig_rm_like, Params(2.0, 0.5, 1.0)),
    (F.F4_eckart_like, Params(-3.2, -5.0, 1.0)),
    (F.F5_hyp_rm_like, Params(-3.4, 0.5, 1.0)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()
    print(f"{'family':18} {'branch':12} {'n':>2} {'E_analytic':>14} {'E_numeric':>14} {'rel_gap':>9}")
    for f, p in CASES:
        b = cat.realized_branch(f, p)
        rep = es.spectrum_report(f, p, args.levels, args.n, branches=[b], tol_rel=1e-2)
        for m in rep.matched:
            print(f"{f.name:18} {b.name:12} {m.reference.n:2d} {m.reference.energy:14.8f} "
                  f"{m.numeric.energy:14.8f} {m.rel_gap:9.2e}")
        for s in rep.unmatched:
            print(f"{f.name:18} {b.name:12} {s.n:2d} {s.energy:14.8f} {'-':>14} {'-':>9}")


if __name__ == "__main__":
    main()
