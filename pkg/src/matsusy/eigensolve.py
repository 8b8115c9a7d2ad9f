"""Analytic spectra, numeric spectra of the discretized operator, and their comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eig_banded

from . import catalog as cat
from .catalog import Branch, FamilyId, MatrixFunction, Params
from .errors import ParamError, SolverError
from .gridops import (Grid, OperatorMatrix, TruncationPolicy, WaveFunction, assemble_hamiltonian,
                      build_grid, grid_on)

F = FamilyId


@dataclass(frozen=True)
class SpectrumLevel:
    n: int
    N: float | None
    branch: Branch | None
    energy: float
    origin: str  # "analytic" | "numeric" | "reference"


@dataclass
class MatchedPair:
    reference: SpectrumLevel
    numeric: SpectrumLevel

    @property
    def abs_gap(self) -> float:
        return abs(self.numeric.energy - self.reference.energy)

    @property
    def rel_gap(self) -> float:
        e = abs(self.reference.energy)
        return self.abs_gap / e if e > 0 else math.inf if self.abs_gap > 0 else 0.0


@dataclass
class SpectrumReport:
    matched: list[MatchedPair]
    unmatched: list[SpectrumLevel]
    extras: list[SpectrumLevel]
    continuum: list[SpectrumLevel]
    tol_abs: float
    tol_rel: float
    edge: float = math.inf
    grid: dict | None = None
    family: str | None = None
    branch: str | None = None
    params: dict | None = None
    notes: list[str] = field(default_factory=list)
    # two-sided comparisons (isospectrality) also fail on unpaired numeric levels
    symmetric: bool = False

    @property
    def ok(self) -> bool:
        return not self.unmatched and not (self.symmetric and self.extras)

    def to_dict(self) -> dict:
        def fnum(v):
            if v is None:
                return None
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        levels = [{
            "n": m.reference.n,
            "N": fnum(m.reference.N),
            "branch": None if m.reference.branch is None else str(m.reference.branch),
            "E_analytic": m.reference.energy,
            "E_numeric": m.numeric.energy,
            "abs_gap": m.abs_gap,
            "rel_gap": fnum(m.rel_gap),
        } for m in self.matched]

        def lvl(s):
            return {"n": s.n, "N": fnum(s.N),
                    "branch": None if s.branch is None else str(s.branch), "E": s.energy}

        return {
            "family": self.family,
            "branch": self.branch,
            "params": self.params,
            "levels": levels,
            "unmatched": [lvl(s) for s in self.unmatched],
            "extras": [lvl(s) for s in self.extras],
            "grid": self.grid,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "continuum_edge": fnum(self.edge),
            "continuum_levels": [s.energy for s in self.continuum],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# Analytic side
# ---------------------------------------------------------------------------

def analytic_spectrum(f: FamilyId, b: Branch, p: Params, nmax: int) -> list[SpectrumLevel]:
    """Closed-form levels n < min(nmax, admissible count) of one branch."""
    f, b = cat.parse_family(f), cat.parse_branch(b)
    if nmax < 1:
        raise ParamError("nmax must be >= 1")
    count = min(nmax, cat.admissible_levels(f, b, p))
    out = []
    for n in range(int(count)):
        N = float(n) if f is F.F0_oscillator else cat.spectral_parameter(b, p, n)
        out.append(SpectrumLevel(n, N, b, cat.level_energy(f, b, p, n), "analytic"))
    return out


# ---------------------------------------------------------------------------
# Numeric side
# ---------------------------------------------------------------------------

def lowest_eigenpairs(H: OperatorMatrix, k: int, check: bool = True
                      ) -> list[tuple[float, WaveFunction]]:
    """k algebraically smallest eigenpairs of the banded symmetric operator (LAPACK *sbevx)."""
    m = H.dimension
    if not 1 <= k <= m:
        raise SolverError(f"cannot extract {k} eigenpairs from a {m}-dimensional operator")
    try:
        vals, vecs = eig_banded(H.banded, lower=True, select="i", select_range=(0, k - 1),
                                check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"banded eigensolver failed: {exc}") from exc
    out = []
    for j in range(vals.size):
        v = vecs[:, j]
        if check:
            res = np.linalg.norm(H.matvec(v) - vals[j] * v) / np.linalg.norm(v)
            if not res < 1e-8:
                raise SolverError(f"eigenpair {j} residual {res:.3g} exceeds 1e-8")
        out.append((float(vals[j]), H.unpack(v).normalized()))
    return out


def lowest_eigenvalues(H: OperatorMatrix, k: int) -> np.ndarray:
    try:
        vals = eig_banded(H.banded, lower=True, eigvals_only=True, select="i",
                          select_range=(0, min(k, H.dimension) - 1))
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"banded eigensolver failed: {exc}") from exc
    return np.asarray(vals, float)


def numeric_levels(energies, edge: float = math.inf) -> list[SpectrumLevel]:
    return [SpectrumLevel(j, None, None, float(e), "numeric") for j, e in enumerate(energies)]


def compare_spectra(analytic: list[SpectrumLevel], numeric: list[SpectrumLevel],
                    tol_abs: float, tol_rel: float, edge: float = math.inf) -> SpectrumReport:
    """Greedy one-to-one nearest-energy matching.

    A pair matches when |dE| < tol_abs + tol_rel |E_ref|. Candidate pairs are
    accepted in order of increasing gap, ties going to the lower n. Unmatched
    numeric levels below ``edge`` are extras, the rest continuum artifacts.
    """
    cands = []
    for i, a in enumerate(analytic):
        for j, nlev in enumerate(numeric):
            gap = abs(nlev.energy - a.energy)
            if gap < tol_abs + tol_rel * abs(a.energy):
                cands.append((gap, a.n, i, j))
    cands.sort()
    used_a: set[int] = set()
    used_n: set[int] = set()
    pairs = []
    for _, _, i, j in cands:
        if i in used_a or j in used_n:
            continue
        used_a.add(i)
        used_n.add(j)
        pairs.append(MatchedPair(analytic[i], numeric[j]))
    pairs.sort(key=lambda m: (m.reference.energy, m.reference.n))
    unmatched = [a for i, a in enumerate(analytic) if i not in used_a]
    rest = [nl for j, nl in enumerate(numeric) if j not in used_n]
    extras = [nl for nl in rest if nl.energy < edge]
    continuum = [nl for nl in rest if nl.energy >= edge]
    return SpectrumReport(pairs, unmatched, extras, continuum, tol_abs, tol_rel, edge)


def distinct_levels(energies, rel_tol: float = 1e-6) -> list[float]:
    """Collapse numerically degenerate eigenvalues into one representative each."""
    out: list[float] = []
    for e in sorted(energies):
        if out and abs(e - out[-1]) <= rel_tol * max(1.0, abs(e)):
            continue
        out.append(float(e))
    return out


def default_tolerances(p: Params) -> tuple[float, float]:
    return 1e-6 * p.lam**2, 2e-3


def numeric_spectrum(f: FamilyId, p: Params, g: Grid, k: int, merge_degenerate: bool = True,
                     channel: int | None = None) -> list[float]:
    """Lowest k (distinct) eigenvalues of the discretized family potential on g."""
    vhat = cat.potential(f, p)
    H = assemble_hamiltonian(vhat, g, channel)
    raw = lowest_eigenvalues(H, 2 * k if merge_degenerate else k)
    vals = distinct_levels(raw) if merge_degenerate else list(raw)
    return vals[:k]


def spectrum_report(f: FamilyId, p: Params, levels: int, n: int = 4000,
                    policy: TruncationPolicy | None = None, branches=None,
                    tol_abs: float | None = None, tol_rel: float | None = None) -> SpectrumReport:
    """Analytic levels of the requested (default: all available) branches vs the numeric spectrum."""
    f = cat.parse_family(f)
    avail = cat.branch_availability(f, p)
    chosen = sorted(avail if branches is None else set(branches), key=str)
    notes = []
    analytic = []
    for b in chosen:
        if b not in avail:
            notes.append(f"{b} unavailable at these parameters")
            continue
        lv = analytic_spectrum(f, b, p, levels)
        bound = cat.admissible_levels(f, b, p)
        if math.isfinite(bound) and bound < levels:
            notes.append(f"{b}: only {int(bound)} bound level(s); n is bounded by the level-count rule")
        analytic += lv
    analytic.sort(key=lambda s: (s.energy, s.n))
    policy = policy or TruncationPolicy(levels=levels)
    g = build_grid(f, p, n, policy)
    vhat = cat.potential(f, p)
    edge = cat.continuum_edge(vhat)
    want = max(levels, len(analytic)) + 2
    numeric = numeric_levels(numeric_spectrum(f, p, g, want))
    ta, tr = default_tolerances(p)
    rep = compare_spectra(analytic, numeric, ta if tol_abs is None else tol_abs,
                          tr if tol_rel is None else tol_rel, edge)
    # numeric levels beyond the requested window are not extras
    top = max([s.energy for s in analytic], default=-math.inf)
    rep.extras = [e for e in rep.extras if e.energy <= top or e.n < levels]
    realized = cat.realized_branch(f, p) if f in cat.DUAL_FAMILIES else None
    if realized is not None and len(avail) == 2:
        notes.append(f"Dirichlet discretization realizes {realized} only")
    rep.grid = g.metadata()
    rep.family = str(f)
    rep.branch = ",".join(str(b) for b in chosen) or None
    rep.params = p.as_dict()
    rep.notes += notes
    return rep


# ---------------------------------------------------------------------------
# Convergence and isospectrality
# ---------------------------------------------------------------------------

def convergence_order_potential(vhat: MatrixFunction, x_lo: float, x_hi: float, exact: float,
                                grid_sizes, channel: int | None = None) -> float:
    """Slope of log|E_0(h) - exact| against log h on [x_lo, x_hi]."""
    sizes = list(grid_sizes)
    if len(sizes) < 3:
        raise ParamError("need at least 3 grid sizes")
    hs, errs = [], []
    for n in sizes:
        g = grid_on(x_lo, x_hi, n)
        e0 = lowest_eigenvalues(assemble_hamiltonian(vhat, g, channel), 1)[0]
        hs.append(g.h)
        errs.append(abs(e0 - exact))
    if min(errs) == 0.0:
        raise SolverError("zero error; the slope is undefined")
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def convergence_order(f: FamilyId, p: Params, grid_sizes, policy: TruncationPolicy | None = None
                      ) -> float:
    """Observed order of the lowest eigenvalue error against the realized branch's ground level."""
    f = cat.parse_family(f)
    b = cat.realized_branch(f, p)
    if b is None:
        raise ParamError(f"{f} has no bound state at {p.as_dict()}")
    exact = cat.level_energy(f, b, p, 0)
    g = build_grid(f, p, 32, policy)
    return convergence_order_potential(cat.potential(f, p), g.x_lo, g.x_hi, exact, grid_sizes)


def _half_integer(v: float) -> bool:
    return abs((v - 0.5) - round(v - 0.5)) < 1e-12


def _integer(v: float) -> bool:
    return abs(v - round(v)) < 1e-12


_PARTNER = {F.F1_coulomb_like: F.S1_coulomb_scalar, F.F3_trig_rm_like: F.S2_trig_rm_scalar,
            F.F4_eckart_like: F.S3_eckart_scalar, F.F5_hyp_rm_like: F.S4_hyp_rm_scalar}


def isospectral_condition(f: FamilyId, p: Params) -> None:
    """Raise ParamError unless the half-integer/integer reduction condition holds."""
    if f is F.F1_coulomb_like:
        if not _half_integer(p.mu):
            raise ParamError("the Coulomb reduction needs a half-integer mu")
    elif f in (F.F3_trig_rm_like, F.F4_eckart_like):
        if not (_half_integer(p.kappa) or _integer(p.mu)):
            raise ParamError("the reduction needs a half-integer kappa or an integer mu")
    elif f is F.F5_hyp_rm_like:
        if not (p.kappa < 0 and _half_integer(p.kappa)):
            raise ParamError("the reduction needs a negative half-integer kappa")
    else:
        raise ParamError(f"{f} has no scalar partner")


def isospectral_partner(f: FamilyId, p: Params) -> tuple[FamilyId, Params]:
    """Scalar reference family and its parameters.

    F1 -> l = kappa - 1/2 (kappa slot kept). F3/F4 -> r = kappa when the
    kappa-branch is the realized one, else r = mu + 1/2. F5 -> r = 1/2 + sqrt(mu^2 + 1/2).
    """
    f = cat.parse_family(f)
    isospectral_condition(f, p)
    if f is F.F1_coulomb_like:
        return F.S1_coulomb_scalar, Params(p.kappa, 0.0, p.omega, p.lam)
    if f is F.F5_hyp_rm_like:
        return F.S4_hyp_rm_scalar, Params(0.5 + math.sqrt(p.mu**2 + 0.5), 0.0, p.omega, p.lam)
    realized = cat.realized_branch(f, p)
    r = p.kappa if realized is Branch.KappaBranch else p.mu + 0.5
    return _PARTNER[f], Params(r, 0.0, p.omega, p.lam)


def isospectral_check(f: FamilyId, p: Params, scalar_ref: FamilyId, scalar_params: Params,
                      levels: int, n: int = 4000, policy: TruncationPolicy | None = None,
                      tol_abs: float | None = None, tol_rel: float | None = None) -> SpectrumReport:
    """Numeric bound spectrum of the matrix potential against the union of the two scalar channels.

    Both sides are solved on the same grid; degenerate matrix levels are kept
    with their multiplicity so that they pair with one level of each channel.
    """
    f, scalar_ref = cat.parse_family(f), cat.parse_family(scalar_ref)
    isospectral_condition(f, p)
    if _PARTNER.get(f) is not scalar_ref:
        raise ParamError(f"{scalar_ref} is not the scalar partner of {f}")
    policy = policy or TruncationPolicy(levels=levels)
    g = build_grid(f, p, n, policy)
    vm = cat.potential(f, p)
    vs = cat.potential(scalar_ref, scalar_params)
    edge = min(cat.continuum_edge(vm), cat.continuum_edge(vs))
    ref_vals = []
    for ch in (0, 1):
        vals = lowest_eigenvalues(assemble_hamiltonian(vs, g, ch), levels)
        ref_vals += [v for v in vals if v < edge]
    ref_vals = sorted(ref_vals)[:levels]
    reference = [SpectrumLevel(j, None, None, e, "reference") for j, e in enumerate(ref_vals)]
    mat = [v for v in lowest_eigenvalues(assemble_hamiltonian(vm, g), levels) if v < edge]
    numeric = numeric_levels(mat)
    ta, tr = default_tolerances(p)
    rep = compare_spectra(reference, numeric, ta if tol_abs is None else tol_abs,
                          tr if tol_rel is None else tol_rel, edge)
    rep.grid = g.metadata()
    rep.family = str(f)
    rep.branch = None
    rep.params = p.as_dict()
    rep.symmetric = True
    rep.notes.append(f"reference: {scalar_ref} with {scalar_params.as_dict()}")
    if not reference and numeric:
        rep.notes.append("the scalar reference has no level below the continuum edge")
    return rep
