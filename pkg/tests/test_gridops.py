import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from matsusy import catalog as cat
from matsusy import gridops as go
from matsusy import states as st
from matsusy.catalog import Branch, FamilyId as F, Params
from matsusy.errors import GridError, ParamError

from conftest import constant_potential

K, M = Branch.KappaBranch, Branch.MuBranch
PAIRS = [(f, b) for f in cat.MATRIX_FAMILIES
         for b in ((K, M) if f in cat.DUAL_FAMILIES else (K,))]


class TestGrid:
    def test_explicit_policy(self):
        g = go.build_grid(F.F1_coulomb_like, Params(1, 0, 1), 1000, go.TruncationPolicy(eps=1e-3, tail=50.0))
        assert g.n == 1000 and g.x_lo == 1e-3 and g.x_hi == 50.0
        assert g.nodes.size == 1000

    def test_trig_inset(self):
        g = go.build_grid(F.F3_trig_rm_like, Params(2, 0.5, 1), 500, go.TruncationPolicy(eps=1e-4))
        assert math.isclose(g.x_lo, -math.pi / 2 + 1e-4, abs_tol=1e-15)
        assert math.isclose(g.x_hi, math.pi / 2 - 1e-4, abs_tol=1e-15)

    def test_too_few_nodes(self):
        with pytest.raises(GridError):
            go.build_grid(F.F1_coulomb_like, Params(1, 0, 1), 3)

    def test_empty_interval(self):
        with pytest.raises(GridError):
            go.build_grid(F.F1_coulomb_like, Params(1, 0, 1), 100, go.TruncationPolicy(eps=5.0, tail=2.0))

    def test_invalid_params(self):
        with pytest.raises(ParamError):
            go.build_grid(F.F1_coulomb_like, Params(1, -1, 1), 100)

    @pytest.mark.parametrize("f,b", PAIRS)
    def test_default_grid_inside_domain_and_uniform(self, f, b, rng):
        p = cat.sample_params(f, b, rng)
        g = go.build_grid(f, p, 400)
        lo, hi = cat.domain(f, p)
        assert lo < g.x_lo < g.x_hi < hi
        d = np.diff(g.nodes)
        assert np.all(d > 0)
        assert np.max(np.abs(d - g.spacing)) <= 1e-14 * max(abs(g.x_lo), abs(g.x_hi), g.spacing)

    def test_metadata_records_cutoffs(self):
        g = go.build_grid(F.F1_coulomb_like, Params(1, 0.2, 1), 100)
        meta = g.metadata()
        assert meta["eps"] > 0 and meta["tail"] == g.x_hi


class TestWaveFunction:
    def test_normalize(self):
        g = go.grid_on(0.0, 1.0, 200)
        psi = go.WaveFunction(g, np.sin(np.pi * g.nodes), 0.3 * g.nodes).normalized()
        assert abs(np.sum(psi.phi**2 + psi.xi**2) * g.h - 1) < 1e-12

    def test_sign_convention(self):
        g = go.grid_on(0.0, 1.0, 200)
        psi = go.WaveFunction(g, -np.sin(np.pi * g.nodes), 0 * g.nodes).normalized()
        assert psi.phi[100] > 0

    def test_length_mismatch(self):
        g = go.grid_on(0.0, 1.0, 20)
        with pytest.raises(GridError):
            go.WaveFunction(g, np.zeros(19), np.zeros(20))

    def test_csv_round_trip(self, tmp_path):
        g = go.grid_on(0.1, 2.0, 50)
        psi = go.WaveFunction(g, np.exp(-g.nodes), np.sin(g.nodes) / 3)
        path = tmp_path / "psi.csv"
        psi.to_csv(path)
        assert path.read_text().splitlines()[0] == "x,phi,xi"
        x, a, b = go.read_wavefunction_csv(path)
        assert np.array_equal(x, g.nodes) and np.array_equal(a, psi.phi) and np.array_equal(b, psi.xi)


class TestHamiltonian:
    def test_free_laplacian_eigenvalues(self):
        n_int = 60
        g = go.grid_on(0.0, math.pi, n_int + 2)
        H = go.assemble_hamiltonian(constant_potential(0.0), g, channel=0)
        vals = np.linalg.eigvalsh(H.to_dense())
        j = np.arange(1, n_int + 1)
        want = (2 - 2 * np.cos(j * math.pi / (n_int + 1))) / g.h**2
        assert np.allclose(vals, np.sort(want), rtol=1e-11, atol=1e-9)

    @pytest.mark.parametrize("f,b", PAIRS)
    def test_exactly_symmetric_block_banded(self, f, b, rng):
        p = cat.sample_params(f, b, rng)
        g = go.build_grid(f, p, 100)
        H = go.assemble_hamiltonian(cat.potential(f, p), g)
        dense = H.to_dense()
        assert np.array_equal(dense, dense.T)
        rows, cols = np.nonzero(dense)
        assert np.max(np.abs(rows // 2 - cols // 2)) <= 1
        assert H.dimension == 2 * (g.n - 2)

    @pytest.mark.parametrize("f,b", PAIRS)
    def test_potential_blocks_real_symmetric(self, f, b, rng):
        p = cat.sample_params(f, b, rng)
        g = go.build_grid(f, p, 200)
        v = cat.potential(f, p)(g.nodes)
        assert np.all(np.isfinite(v))
        assert np.array_equal(v, np.swapaxes(v, 1, 2))

    def test_matvec_matches_dense(self, rng):
        p = Params(1.0, 0.2, 1.0)
        g = go.build_grid(F.F1_coulomb_like, p, 50)
        H = go.assemble_hamiltonian(cat.potential(F.F1_coulomb_like, p), g)
        v = rng.normal(size=H.dimension)
        assert np.allclose(H.matvec(v), H.to_dense() @ v, rtol=1e-13, atol=1e-10)

    def test_domain_mismatch(self):
        p = Params(1.0, 0.2, 1.0)
        g = go.grid_on(-1.0, 1.0, 50)
        with pytest.raises(GridError):
            go.assemble_hamiltonian(cat.potential(F.F1_coulomb_like, p), g)

    def test_scalar_channel_needs_diagonal(self):
        p = Params(1.0, 0.2, 1.0)
        g = go.build_grid(F.F1_coulomb_like, p, 50)
        with pytest.raises(GridError):
            go.assemble_hamiltonian(cat.potential(F.F1_coulomb_like, p), g, channel=0)


class TestLadder:
    def test_constant_is_annihilated(self):
        g = go.grid_on(-1.0, 1.0, 100)
        psi = go.WaveFunction(g, np.full(100, 0.7), np.full(100, -0.2))
        out = go.apply_ladder("down", constant_potential(0.0), psi)
        assert max(np.max(np.abs(out.phi[1:-1])), np.max(np.abs(out.xi[1:-1]))) < 1e-12

    def test_stencil_is_fourth_order(self):
        errs = []
        for n in (101, 201, 401):
            x = np.linspace(0, 2, n)
            d = go.stencil_derivative(np.sin(3 * x), x[1] - x[0])
            errs.append(np.max(np.abs(d - 3 * np.cos(3 * x))))
        slope = np.polyfit(np.log([2 / 100, 2 / 200, 2 / 400]), np.log(errs), 1)[0]
        assert 3.7 < slope < 4.3

    def test_annihilates_closed_form_ground_state(self):
        p = Params(1.0, 0.2, 1.0)
        g = go.build_grid(F.F1_coulomb_like, p, 4000)
        psi, _ = st.ground_state_closed_form(st.GroundStateSpec(F.F1_coulomb_like, K, 1, p), g)
        psi = go.WaveFunction(g, psi.phi, psi.xi)
        W = cat.superpotential(F.F1_coulomb_like, K, p)
        out = go.apply_ladder("down", W, psi)
        res = math.sqrt(np.sum(out.phi[2:-2] ** 2 + out.xi[2:-2] ** 2) / np.sum(psi.phi**2 + psi.xi**2))
        assert res < 1e-6

    def test_up_is_adjoint_of_down(self, rng):
        p = Params(1.0, 0.2, 1.0)
        W = cat.superpotential(F.F1_coulomb_like, K, p)
        g = go.grid_on(0.5, 20.0, 2000)
        f = go.gaussian_bump(g, 6.0, 1.5, 0.7)
        h = go.gaussian_bump(g, 8.0, 2.0, -0.4)
        lhs = go.apply_ladder("up", W, f).inner(h)
        rhs = f.inner(go.apply_ladder("down", W, h))
        assert abs(lhs - rhs) < 1e-8

    def test_bad_direction(self):
        g = go.grid_on(-1.0, 1.0, 20)
        psi = go.WaveFunction(g, np.zeros(20), np.zeros(20))
        with pytest.raises(ValueError):
            go.apply_ladder("sideways", constant_potential(0.0), psi)


class TestShapeInvarianceResidual:
    def test_f1(self):
        assert go.shape_invariance_residual(F.F1_coulomb_like, K, Params(1, 0.2, 1)) < 1e-10

    def test_offset_is_detected(self):
        r = go.shape_invariance_residual(F.F1_coulomb_like, K, Params(1, 0.2, 1), offset=0.01)
        assert abs(r - 0.01) < 1e-10

    def test_f6(self):
        assert go.shape_invariance_residual(F.F6_extended, K, Params(1, 0, 1, c_ext=2.0)) < 1e-10

    def test_too_few_samples(self):
        with pytest.raises(ParamError):
            go.shape_invariance_residual(F.F1_coulomb_like, K, Params(1, 0.2, 1), samples=5)

    @pytest.mark.parametrize("f,b", PAIRS)
    def test_random_draws(self, f, b, rng):
        for _ in range(20):
            p = cat.sample_params(f, b, rng)
            assert go.shape_invariance_residual(f, b, p) < 1e-9

    @settings(max_examples=40, deadline=None)
    @given(k=hst.floats(0.05, 4), m=hst.floats(0.05, 4), w=hst.floats(0.1, 3), lam=hst.floats(0.3, 3))
    def test_trig_any_lambda(self, k, m, w, lam):
        p = Params(k, m, w, lam)
        for b in cat.branch_availability(F.F3_trig_rm_like, p):
            assert go.shape_invariance_residual(F.F3_trig_rm_like, b, p) < 1e-9 * max(1.0, lam**2 * (k + m + 2) ** 2)


class TestIntertwining:
    def _bump_case(self, n):
        p = Params(1.0, 0.2, 1.0)
        g = go.grid_on(0.5, 25.0, n)
        return go.intertwining_residual(F.F1_coulomb_like, p, go.gaussian_bump(g, 8.0, 2.0))

    def test_small_at_4000(self):
        assert self._bump_case(4000) < 1e-4

    def test_second_order(self):
        r1, r2 = self._bump_case(2000), self._bump_case(4000)
        assert 2 - 0.3 < math.log2(r1 / r2) < 2 + 0.3

    def test_free_operators_commute(self):
        # coarse grid: the commutator vanishes exactly, so only rounding (~ulp/h^3) remains
        g = go.grid_on(-5.0, 5.0, 100)
        zero = constant_potential(0.0)
        r = go.intertwining_residual_ops(zero, zero, zero, go.gaussian_bump(g, 0.0, 1.0))
        assert r < 1e-12
