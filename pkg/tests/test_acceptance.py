"""Numbered acceptance criteria.

Each test carries an ``acceptance`` marker; conftest prints one PASS/FAIL line
per criterion after the run. ``python tests/test_acceptance.py`` runs only this file.
"""
import math
import sys
import time

import mpmath
import numpy as np
import pytest

from matsusy import catalog as cat
from matsusy import eigensolve as es
from matsusy import gridops as go
from matsusy import specfun as sf
from matsusy import states as st
from matsusy.catalog import Branch, FamilyId as F, Params

from conftest import constant_potential

K, M = Branch.KappaBranch, Branch.MuBranch
ALL_BRANCHES = [(f, b) for f in cat.MATRIX_FAMILIES
                for b in ((K, M) if f in cat.DUAL_FAMILIES else (K,))]


def _rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.acceptance(1, "shape invariance, 20 random draws per family/branch, < 1e-9, < 5 s")
def test_shape_invariance_suite():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for f, b in ALL_BRANCHES:
        for _ in range(20):
            p = cat.sample_params(f, b, rng)
            worst = max(worst, go.shape_invariance_residual(f, b, p, samples=200))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-9
    assert elapsed < 5.0


@pytest.mark.acceptance(2, "factorization identity over 200 samples, < 1e-9, < 5 s")
def test_factorization_identity():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for f, b in ALL_BRANCHES:
        for _ in range(20):
            p = cat.sample_params(f, b, rng)
            worst = max(worst, go.factorization_residual(f, b, p, samples=200))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-9
    assert elapsed < 5.0


@pytest.mark.acceptance(3, "F1 (kappa=1, mu=0, omega=1), n=4000 on [1e-3, 60]: 3 levels within 2e-3")
def test_coulomb_spectrum():
    t0 = time.perf_counter()
    p = Params(1.0, 0.0, 1.0)
    g = go.grid_on(1e-3, 60.0, 4000)
    got = es.numeric_spectrum(F.F1_coulomb_like, p, g, 3)
    want = [-1 / 9, -1 / 25, -1 / 49]
    gaps = [_rel(a, b) for a, b in zip(got, want)]
    assert len(got) == 3
    assert max(gaps) < 2e-3, gaps
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.acceptance(4, "F2 (kappa=-3.4, omega=1): exactly 3 levels, all matched below the edge")
def test_morse_finite_count():
    t0 = time.perf_counter()
    p = Params(-3.4, 1.0, 1.0)
    analytic = es.analytic_spectrum(F.F2_morse_like, K, p, 10)
    assert len(analytic) == 3
    rep = es.spectrum_report(F.F2_morse_like, p, levels=3, n=4000, tol_rel=2e-3)
    assert not rep.unmatched
    assert len(rep.matched) == 3
    assert all(m.numeric.energy < rep.edge for m in rep.matched)
    assert max(m.rel_gap for m in rep.matched) < 2e-3
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.acceptance(5, "F3 (kappa=2, mu=0.5, omega=1): 3 levels of N^2 - omega^2/N^2, N = n+2")
def test_trigonometric_spectrum():
    p = Params(2.0, 0.5, 1.0)
    g = go.build_grid(F.F3_trig_rm_like, p, 4000, go.TruncationPolicy(levels=3))
    got = es.numeric_spectrum(F.F3_trig_rm_like, p, g, 3)
    want = [N**2 - 1.0 / N**2 for N in (2.0, 3.0, 4.0)]
    assert max(_rel(a, b) for a, b in zip(got, want)) < 2e-3


@pytest.mark.acceptance(6, "F1 (kappa=1.2, mu=0.5): numeric spectrum holds both branches' first two levels")
def test_dual_branch_union():
    p = Params(1.2, 0.5, 1.0)
    assert cat.branch_availability(F.F1_coulomb_like, p) == {K, M}
    rep = es.spectrum_report(F.F1_coulomb_like, p, levels=2, n=4000)
    matched = {(m.reference.branch, m.reference.n) for m in rep.matched}
    missing = [(b, n) for b in (K, M) for n in (0, 1) if (b, n) not in matched]
    assert not missing, f"unmatched levels: {missing}"


@pytest.mark.acceptance(7, "F1 mu-independence at kappa=1.6 (mu=0.2 vs 0.6), 3 levels within 2e-3")
def test_mu_independence():
    spectra = []
    for mu in (0.2, 0.6):
        p = Params(1.6, mu, 1.0)
        g = go.build_grid(F.F1_coulomb_like, p, 4000, go.TruncationPolicy(levels=3))
        spectra.append(es.numeric_spectrum(F.F1_coulomb_like, p, g, 3))
    a, b = spectra
    assert len(a) == len(b) == 3
    assert max(_rel(x, y) for x, y in zip(a, b)) < 2e-3


# one (family, branch, solution index, params) per closed form
CLOSED_FORMS = [
    (F.F1_coulomb_like, K, 1, Params(1.0, 0.2, 1.0)),
    (F.F1_coulomb_like, M, 1, Params(1.0, 0.2, 1.0)),
    (F.F2_morse_like, K, 1, Params(-3.0, 1.0, 1.0)),
    (F.F3_trig_rm_like, K, 1, Params(2.0, 0.7, 1.0)),
    (F.F3_trig_rm_like, K, 2, Params(2.0, 0.7, 1.0)),
    (F.F3_trig_rm_like, M, 1, Params(1.2, 0.7, 1.0)),
    (F.F3_trig_rm_like, M, 2, Params(1.2, 0.7, 1.0)),
    (F.F4_eckart_like, K, 1, Params(-2.5, -3.0, 1.0)),
    (F.F4_eckart_like, M, 1, Params(-2.5, -3.0, 1.0)),
    # kappa = -2 omega makes the first hypergeometric form singular (lower parameter 0)
    (F.F5_hyp_rm_like, K, 1, Params(-2.5, 0.5, 1.0)),
    (F.F5_hyp_rm_like, K, 2, Params(-2.5, 0.5, 1.0)),
]


@pytest.mark.acceptance(8, "closed-form ground states: kernel residual < 1e-6; ODE span agrees (< 1e-4)")
def test_ground_state_kernel_and_ode():
    residuals, angles = {}, {}
    groups: dict = {}
    for f, b, idx, p in CLOSED_FORMS:
        g = go.build_grid(f, p, 4000)
        psi, _ = st.ground_state_closed_form(st.GroundStateSpec(f, b, idx, p), g)
        residuals[(f, b, idx)] = st.ground_state_residual(cat.superpotential(f, b, p), psi)
        groups.setdefault((f, b, p), (g, []))[1].append(psi)
    for (f, b, p), (g, closed) in groups.items():
        ode = st.ground_state_ode(f, b, p, g)
        angles[(f, b)] = st.subspace_angle(ode, closed)
    assert max(residuals.values()) < 1e-6, residuals
    assert max(angles.values()) < 1e-4, angles


@pytest.mark.acceptance(9, "degeneracy: 1 for F1/F2, 2 for F3/F4/F5")
def test_degeneracy_counts():
    cases = [
        (F.F1_coulomb_like, Params(1.0, 0.2, 1.0), 1),
        (F.F2_morse_like, Params(-3.0, 1.0, 1.0), 1),
        (F.F3_trig_rm_like, Params(2.0, 0.7, 1.0), 2),
        (F.F4_eckart_like, Params(-0.2, -0.25, 0.01), 2),
        (F.F5_hyp_rm_like, Params(-2.0, 0.5, 1.0), 2),
    ]
    got = {f: st.ground_state_degeneracy(f, K, p) for f, p, _ in cases}
    assert got == {f: want for f, _, want in cases}


@pytest.mark.acceptance(10, "isospectrality: F1 vs Coulomb pair, F3 vs trigonometric Rosen-Morse pair")
def test_isospectrality():
    worst = 0.0
    for f, p in ((F.F1_coulomb_like, Params(2.0, 0.5, 1.0)),
                 (F.F3_trig_rm_like, Params(1.5, 0.5, 1.0))):
        ref, rp = es.isospectral_partner(f, p)
        rep = es.isospectral_check(f, p, ref, rp, levels=4, n=4000, tol_rel=2e-3)
        assert not rep.unmatched, f
        assert len(rep.matched) == 4
        worst = max(worst, max(m.rel_gap for m in rep.matched))
    assert worst < 2e-3


def _k_quadrature(nu, y):
    """K_nu(y) = int_0^inf exp(-y cosh t) cosh(nu t) dt, cut where the integrand is below e^-150."""
    mpmath.mp.dps = 30
    top = 1.0
    while y * math.cosh(top) - nu * top < 150.0:
        top += 0.5
    peak = math.asinh(nu / y) if nu > 0 else 0.0
    pts = sorted({0.0, min(peak, top), top} | {top * k / 8 for k in range(1, 8)})
    val = mpmath.quad(lambda t: mpmath.exp(-y * mpmath.cosh(t)) * mpmath.cosh(nu * t), pts)
    return float(val)


def _f_series(a, b, c, y):
    mpmath.mp.dps = 40
    a, b, c, y = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpf(c), mpmath.mpf(y)
    term, total, k = mpmath.mpc(1), mpmath.mpc(1), 0
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * y
        total += term
        k += 1
        if abs(term) < mpmath.mpf(10) ** -35 * abs(total) and k > 5:
            return total


@pytest.mark.acceptance(11, "besselK vs quadrature, 2F1 vs extended series, Gauss summation at y -> 1")
def test_special_function_oracles():
    rng = np.random.default_rng(11)
    k_err = 0.0
    for _ in range(50):
        nu = rng.uniform(0.0, 10.0)
        y = 10 ** rng.uniform(-1.0, math.log10(50.0))
        k_err = max(k_err, _rel(sf.bessel_k(nu, y), _k_quadrature(nu, y)))
    f_err = 0.0
    for j in range(50):
        c = rng.uniform(0.2, 4.0)
        y = rng.uniform(0.0, 0.95)
        if j % 2:
            p = sf.HypParams.conjugate(rng.uniform(-2, 2), rng.uniform(0.1, 3), c)
        else:
            p = sf.HypParams.real(rng.uniform(-2, 2), rng.uniform(-2, 2), c)
        ref = _f_series(p.a, p.b, p.c, y)
        assert abs(ref.imag) < 1e-25 * max(1.0, abs(ref.real))
        f_err = max(f_err, abs(sf.gauss_2f1(p, y) - float(ref.real)) / max(abs(float(ref.real)), 1e-300))
    g_err = 0.0
    for p in (sf.HypParams.real(0.3, 0.4, 2.2), sf.HypParams.conjugate(0.2, 0.9, 2.0),
              sf.HypParams.conjugate(-0.5, 1.5, 1.1)):
        mpmath.mp.dps = 30
        exact = mpmath.gamma(p.c) * mpmath.gamma(p.c - p.a - p.b) / (
            mpmath.gamma(p.c - p.a) * mpmath.gamma(p.c - p.b))
        exact = float(mpmath.re(exact))
        g_err = max(g_err, _rel(sf.gauss_2f1_at_one(p), exact),
                    _rel(sf.gauss_2f1(p, 1.0 - 1e-12, one_minus_y=1e-12), exact))
    assert k_err < 1e-10, k_err
    assert f_err < 1e-9, f_err
    assert g_err < 1e-8, g_err


@pytest.mark.acceptance(12, "convergence order in [1.7, 2.3] for F1 and the box, n in {1000, 2000, 4000}")
def test_convergence_order():
    sizes = (1000, 2000, 4000)
    slope_f1 = es.convergence_order(F.F1_coulomb_like, Params(1.0, 0.0, 1.0), sizes)
    box = constant_potential(0.0)
    slope_box = es.convergence_order_potential(box, 0.0, math.pi, 1.0, sizes, channel=0)
    assert 1.7 <= slope_f1 <= 2.3, slope_f1
    assert 1.7 <= slope_box <= 2.3, slope_box


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
