"""Count square-integrable zero modes of a- by shooting, and compare with the closed forms."""
from matsusy import gridops as go
from matsusy import states as st
from matsusy.catalog import Branch, FamilyId as F, Params

K = Branch.KappaBranch
CASES = [
    (F.F1_coulomb_like, Params(1.0, 0.2, 1.0)),
    (F.F2_morse_like, Params(-3.0, 1.0, 1.0)),
    (F.F3_trig_rm_like, Params(2.0, 0.7, 1.0)),
    (F.F4_eckart_like, Params(-0.2, -0.25, 0.01)),
    (F.F5_hyp_rm_like, Params(-2.5, 0.5, 1.0)),
]


def main():
    print(f"{'family':18} {'L2 modes':>8} {'vanishing':>9} {'angle to closed forms':>22}")
    for f, p in CASES:
        d = st.ground_state_degeneracy(f, K, p)
        v = st.ground_state_degeneracy(f, K, p, require_vanishing=True)
        g = go.build_grid(f, p, 4000)
        ode = st.ground_state_ode(f, K, p, g)
        idxs = (1, 2) if f in st.TWO_SOLUTION_FAMILIES else (1,)
        ref = [st.ground_state_closed_form(st.GroundStateSpec(f, K, i, p), g)[0] for i in idxs]
        angle = st.subspace_angle(ode, ref) if len(ode) == len(ref) else float("nan")
        print(f"{f.name:18} {d:8d} {v:9d} {angle:22.2e}")


if __name__ == "__main__":
    main()
