"""Which branch a Dirichlet grid realizes, as mu moves across the dual threshold of F1."""
import argparse

import numpy as np

from matsusy import catalog as cat
from matsusy import eigensolve as es
from matsusy import gridops as go
from matsusy.catalog import Branch, FamilyId as F, Params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=1.6)
    ap.add_argument("--n", type=int, default=3000)
    args = ap.parse_args()
    f = F.F1_coulomb_like
    print(f"{'mu':>5} {'available':22} {'realized':12} {'E_K0':>11} {'E_M0':>11} {'E_num0':>11}")
    for mu in np.linspace(0.1, args.kappa - 0.1, 8):
        p = Params(args.kappa, float(mu), 1.0)
        avail = cat.branch_availability(f, p)
        e = {b: cat.level_energy(f, b, p, 0) for b in avail}
        g = go.build_grid(f, p, args.n, go.TruncationPolicy(levels=1))
        num = float(es.numeric_spectrum(f, p, g, 1)[0])
        fmt = lambda b: f"{e[b]:11.6f}" if b in e else f"{'-':>11}"
        print(f"{mu:5.2f} {','.join(sorted(b.name for b in avail)):22} "
              f"{cat.realized_branch(f, p).name:12} {fmt(Branch.KappaBranch)} {fmt(Branch.MuBranch)} {num:11.6f}")


if __name__ == "__main__":
    main()
