"""Uniform grids, finite-difference Hamiltonians, ladder operators and identity residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog as cat
from .catalog import Branch, FamilyId, MatrixFunction, Params
from .errors import GridError, ParamError

F = FamilyId


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

DEFAULT_EPS = 1e-24
_WALL_ULPS = 64


@dataclass(frozen=True)
class TruncationPolicy:
    """How singular and infinite ends are cut.

    eps: inset from a finite (singular) end; default 1e-24 times the family length scale,
        but never below 64 ulp of the wall coordinate. The Dirichlet wall at the inset
        shifts levels by roughly eps^(2s-1) for a local power law t^s, and states only
        fall to eps^s there, so a coarse inset is only safe for large s.
    tail: coordinate of the cut for the +inf end (and -tail for -inf where sensible).
    tail_lo: explicit cut for the -inf end.
    levels: how many levels must decay below ``decay_tol`` inside the box.
    """

    eps: float | None = None
    tail: float | None = None
    tail_lo: float | None = None
    decay_tol: float = 1e-12
    levels: int = 1


@dataclass(frozen=True, eq=False)
class Grid:
    x_lo: float
    x_hi: float
    n: int
    eps: float | None = None
    tail: float | None = None
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 16:
            raise GridError(f"grid needs at least 16 nodes, got {self.n}")
        if not (math.isfinite(self.x_lo) and math.isfinite(self.x_hi)) or self.x_hi <= self.x_lo:
            raise GridError(f"empty or unbounded interval [{self.x_lo}, {self.x_hi}]")
        object.__setattr__(self, "nodes", np.linspace(self.x_lo, self.x_hi, self.n))

    @property
    def spacing(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    h = spacing

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def metadata(self) -> dict:
        return {"n": self.n, "x_lo": self.x_lo, "x_hi": self.x_hi,
                "eps": self.eps, "tail": self.tail}


def _target_energy(f: FamilyId, p: Params, levels: int) -> float | None:
    """Highest of the first ``levels`` levels over every available branch (slowest decay)."""
    try:
        avail = cat.branch_availability(f, p)
    except ParamError:
        return None
    top = None
    for b in avail:
        count = int(min(levels, cat.admissible_levels(f, b, p)))
        if count > 0:
            e = cat.level_energy(f, b, p, count - 1)
            top = e if top is None else max(top, e)
    return top


def _asymptotic_min(vhat: MatrixFunction, side: float) -> float:
    x = np.array([side * 1e8 * vhat.scale])
    with np.errstate(all="ignore"):
        m = vhat(x)[0]
    if not np.all(np.isfinite(m)):
        return math.inf
    return float(np.min(np.linalg.eigvalsh(m)))


def _default_tail(f: FamilyId, p: Params, side: float, policy: TruncationPolicy) -> float:
    """Coordinate where the slowest requested level has decayed below decay_tol."""
    scale = cat.length_scale(f, p)
    log_tol = math.log(1.0 / policy.decay_tol)
    if f is F.F0_oscillator:
        shift = abs(p.mu) / p.omega
        return side * (shift + math.sqrt((2 * log_tol + 2 * policy.levels + 1) / p.omega) * 1.2)
    if f is F.F2_morse_like and side < 0:
        # super-exponential wall: the states die like exp(-mu e^{-lambda x})
        big = log_tol + 10.0 + 2 * policy.levels
        return -math.log(big / p.mu) / p.lam
    vhat = cat.potential_unchecked(f, p)
    v_inf = _asymptotic_min(vhat, side)
    energy = _target_energy(f, p, policy.levels)
    floor = 0.05 / scale
    if energy is None or not math.isfinite(v_inf) or v_inf - energy <= floor**2:
        k = floor
    else:
        k = math.sqrt(v_inf - energy)
    power = 1.0
    if f in (F.F1_coulomb_like, F.S1_coulomb_scalar):
        power += p.omega / (2.0 * k)
    t = log_tol
    for _ in range(50):
        t = log_tol + power * math.log(max(t, 1.0))
    centre = math.log(p.mu) / p.lam if f is F.F2_morse_like else 0.0
    return centre + side * min(t / k, 1e4 * scale)


def build_grid(f: FamilyId, p: Params, n: int, policy: TruncationPolicy | None = None) -> Grid:
    """Uniform grid of n nodes covering the truncated family domain (both ends are Dirichlet nodes)."""
    f = cat.parse_family(f)
    cat.validate_params(f, p)
    if n < 16:
        raise GridError(f"grid needs at least 16 nodes, got {n}")
    policy = policy or TruncationPolicy()
    lo, hi = cat.domain(f, p)
    if policy.eps is not None:
        eps = policy.eps
    else:
        walls = [abs(v) for v in (lo, hi) if math.isfinite(v)]
        floor = max((_WALL_ULPS * math.ulp(v) for v in walls), default=0.0)
        eps = max(DEFAULT_EPS * cat.length_scale(f, p), floor)
    if eps <= 0:
        raise GridError("eps must be positive")
    if math.isinf(lo):
        if policy.tail_lo is not None:
            x_lo = policy.tail_lo
        elif policy.tail is not None and f is not F.F2_morse_like:
            x_lo = -policy.tail
        else:
            x_lo = _default_tail(f, p, -1.0, policy)
    else:
        x_lo = lo + eps
    if math.isinf(hi):
        x_hi = policy.tail if policy.tail is not None else _default_tail(f, p, 1.0, policy)
    else:
        x_hi = hi - eps
    if not (lo < x_lo < x_hi < hi):
        raise GridError(f"empty interval after truncation: [{x_lo}, {x_hi}]")
    tail = None if (math.isfinite(lo) and math.isfinite(hi)) else max(abs(x_lo), abs(x_hi))
    return Grid(float(x_lo), float(x_hi), int(n), eps=eps, tail=tail)


def grid_on(x_lo: float, x_hi: float, n: int) -> Grid:
    return Grid(float(x_lo), float(x_hi), int(n))


def _check_inside(mf: MatrixFunction, g: Grid) -> None:
    lo, hi = mf.domain
    if not (lo < g.x_lo and g.x_hi < hi):
        raise GridError(f"grid [{g.x_lo}, {g.x_hi}] is not inside the domain ({lo}, {hi})")


# ---------------------------------------------------------------------------
# Wavefunctions
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class WaveFunction:
    """Two-component samples on a grid, optionally with analytic derivative samples."""

    grid: Grid
    phi: np.ndarray
    xi: np.ndarray
    dphi: np.ndarray | None = None
    dxi: np.ndarray | None = None

    def __post_init__(self):
        self.phi = np.asarray(self.phi, float)
        self.xi = np.asarray(self.xi, float)
        if self.phi.shape != (self.grid.n,) or self.xi.shape != (self.grid.n,):
            raise GridError("wavefunction length must equal the grid node count")

    @property
    def stacked(self) -> np.ndarray:
        """Shape (n, 2)."""
        return np.stack([self.phi, self.xi], axis=-1)

    @property
    def has_derivative(self) -> bool:
        return self.dphi is not None and self.dxi is not None

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.phi**2 + self.xi**2) * self.grid.h))

    def inner(self, other: "WaveFunction") -> float:
        if other.grid is not self.grid and other.grid.n != self.grid.n:
            raise GridError("wavefunctions live on different grids")
        return float(np.sum(self.phi * other.phi + self.xi * other.xi) * self.grid.h)

    def scaled(self, s: float) -> "WaveFunction":
        d = (None, None) if not self.has_derivative else (s * self.dphi, s * self.dxi)
        return WaveFunction(self.grid, s * self.phi, s * self.xi, *d)

    def normalized(self) -> "WaveFunction":
        """Unit grid norm; sign fixed so phi > 0 at the first node where |phi| > 1e-3 max|phi|."""
        nrm = self.norm()
        if not math.isfinite(nrm) or nrm == 0.0:
            from .errors import NormalizationError
            raise NormalizationError(f"grid norm is {nrm}")
        comp = self.phi if np.max(np.abs(self.phi)) > 0 else self.xi
        big = np.abs(comp) > 1e-3 * np.max(np.abs(comp))
        sign = 1.0 if comp[np.argmax(big)] > 0 else -1.0
        return self.scaled(sign / nrm)

    def swapped(self) -> "WaveFunction":
        d = (None, None) if not self.has_derivative else (self.dxi, self.dphi)
        return WaveFunction(self.grid, self.xi, self.phi, *d)

    def to_csv(self, path) -> None:
        write_wavefunction_csv(self, path)


def write_wavefunction_csv(psi: WaveFunction, path) -> None:
    lines = ["x,phi,xi"]
    for x, a, b in zip(psi.grid.nodes, psi.phi, psi.xi):
        lines.append(f"{x:.16e},{a:.16e},{b:.16e}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_wavefunction_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2]


# ---------------------------------------------------------------------------
# Hamiltonian
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class OperatorMatrix:
    """-d^2/dx^2 + V-hat on the interior nodes, lower banded symmetric storage.

    With two components the unknowns are interleaved (phi_1, xi_1, phi_2, ...),
    giving bandwidth 2; the scalar mode acts on one diagonal channel.
    """

    grid: Grid
    ncomp: int
    banded: np.ndarray
    channel: int | None = None

    @property
    def dimension(self) -> int:
        return self.banded.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.banded.shape[0] - 1

    def to_dense(self) -> np.ndarray:
        m = self.dimension
        out = np.zeros((m, m))
        for d in range(self.banded.shape[0]):
            vals = self.banded[d, : m - d]
            idx = np.arange(m - d)
            out[idx + d, idx] = vals
            out[idx, idx + d] = vals
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.banded[0] * v
        for d in range(1, self.banded.shape[0]):
            band = self.banded[d, : self.dimension - d]
            out[d:] += band * v[:-d]
            out[:-d] += band * v[d:]
        return out

    def pack(self, psi: WaveFunction) -> np.ndarray:
        if psi.grid.n != self.grid.n:
            raise GridError("wavefunction and operator use different grids")
        if self.ncomp == 1:
            comp = psi.phi if (self.channel or 0) == 0 else psi.xi
            return comp[1:-1].copy()
        return psi.stacked[1:-1].reshape(-1)

    def unpack(self, v: np.ndarray) -> WaveFunction:
        n = self.grid.n
        phi = np.zeros(n)
        xi = np.zeros(n)
        if self.ncomp == 1:
            (phi if (self.channel or 0) == 0 else xi)[1:-1] = v
        else:
            pairs = v.reshape(-1, 2)
            phi[1:-1] = pairs[:, 0]
            xi[1:-1] = pairs[:, 1]
        return WaveFunction(self.grid, phi, xi)


def assemble_hamiltonian(vhat: MatrixFunction, g: Grid, channel: int | None = None) -> OperatorMatrix:
    """Second-order central differences with Dirichlet values at both grid ends.

    ``channel`` selects one diagonal entry of V-hat and builds a scalar operator.
    """
    _check_inside(vhat, g)
    x = g.interior
    v = vhat(x)
    h2 = 1.0 / g.h**2
    m = x.size
    if channel is not None:
        if channel not in (0, 1):
            raise GridError("channel must be 0 or 1")
        if np.any(v[:, 0, 1] != 0.0):
            raise GridError("scalar mode needs a diagonal potential")
        ab = np.zeros((2, m))
        ab[0] = 2.0 * h2 + v[:, channel, channel]
        ab[1, : m - 1] = -h2
        return OperatorMatrix(g, 1, ab, channel)
    ab = np.zeros((3, 2 * m))
    ab[0, 0::2] = 2.0 * h2 + v[:, 0, 0]
    ab[0, 1::2] = 2.0 * h2 + v[:, 1, 1]
    ab[1, 0::2] = v[:, 0, 1]  # phi_i <-> xi_i; xi_i <-> phi_{i+1} stays zero
    ab[2, : 2 * m - 2] = -h2
    return OperatorMatrix(g, 2, ab)


def apply_hamiltonian_full(vhat: MatrixFunction, g: Grid, u: np.ndarray) -> np.ndarray:
    """-u'' + V u on all nodes (n, 2); the two end rows are set to zero."""
    out = np.zeros_like(u)
    v = vhat(g.interior)
    lap = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / g.h**2
    out[1:-1] = -lap + np.einsum("nij,nj->ni", v, u[1:-1])
    return out


# ---------------------------------------------------------------------------
# Ladder operators
# ---------------------------------------------------------------------------

def stencil_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative along axis 0 (one-sided at the two boundary layers)."""
    f = np.asarray(values, float)
    if f.shape[0] < 5:
        raise GridError("need at least 5 nodes for the 4th-order stencil")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12.0 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12.0 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12.0 * h)
    return d


def _ladder_array(direction: str, w: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
    du = stencil_derivative(u, h)
    wu = np.einsum("nij,nj->ni", w, u)
    if direction == "down":
        return du + wu
    if direction == "up":
        return -du + wu
    raise ValueError("direction must be 'up' or 'down'")


def apply_ladder(direction: str, W: MatrixFunction, psi: WaveFunction) -> WaveFunction:
    """down: psi' + W psi;  up: -psi' + W psi (stencil derivatives)."""
    g = psi.grid
    _check_inside(W, g)
    out = _ladder_array(direction, W(g.nodes), psi.stacked, g.h)
    return WaveFunction(g, out[:, 0], out[:, 1])


# ---------------------------------------------------------------------------
# Identity residuals
# ---------------------------------------------------------------------------

def _inf_norm(m: np.ndarray) -> np.ndarray:
    return np.max(np.sum(np.abs(m), axis=-1), axis=-1)


def shape_invariance_residual(f: FamilyId, b: Branch, p: Params, samples: int = 200,
                              offset: float = 0.0) -> float:
    """max_x || W_q^2 + W_q' - W_{q+1}^2 + W_{q+1}' - C I ||_inf in closed form.

    ``offset`` is added to the constant (used to show the residual detects it).
    """
    f, b = cat.parse_family(f), cat.parse_branch(b)
    cat.validate_params(f, p)
    if samples < 10:
        raise ParamError("need at least 10 samples")
    w0 = cat.superpotential(f, b, p)
    w1 = cat.superpotential_unchecked(f, b, cat.shift_params(p, b, 1))
    x = cat.sample_points(w0, samples)
    a, b1 = w0(x), w1(x)
    const = cat.shape_invariance_constant(f, b, p) + offset
    r = a @ a + w0.d(x) - (b1 @ b1 - w1.d(x)) - const * np.eye(2)
    return float(np.max(_inf_norm(r)))


def factorization_residual(f: FamilyId, b: Branch, p: Params, samples: int = 200) -> float:
    """max_x || W^2 - W' - V-hat - c I ||_inf."""
    w = cat.superpotential(f, b, p)
    v = cat.potential(f, p)
    c = cat.factorization_constant(f, b, p)
    x = cat.sample_points(w, samples)
    wv = w(x)
    return float(np.max(_inf_norm(wv @ wv - w.d(x) - v(x) - c * np.eye(2))))


def intertwining_residual_ops(W: MatrixFunction, v_q: MatrixFunction, v_q1: MatrixFunction,
                              test_fn: WaveFunction) -> float:
    """|| (H_q a+ - a+ H_{q+1}) f || / || f || with grid operators, over interior nodes."""
    g = test_fn.grid
    for mf in (W, v_q, v_q1):
        _check_inside(mf, g)
    u = test_fn.stacked
    w = W(g.nodes)
    left = apply_hamiltonian_full(v_q, g, _ladder_array("up", w, u, g.h))
    right = _ladder_array("up", w, apply_hamiltonian_full(v_q1, g, u), g.h)
    diff = (left - right)[3:-3]
    return float(np.sqrt(np.sum(diff**2) / np.sum(u**2)))


def intertwining_residual(f: FamilyId, p: Params, test_fn: WaveFunction,
                          branch: Branch = Branch.KappaBranch) -> float:
    """H_q a+_q = a+_q H_{q+1} checked on a smooth test function."""
    f = cat.parse_family(f)
    cat.validate_params(f, p)
    W = cat.superpotential(f, branch, p)
    p1 = cat.shift_params(p, branch, 1)
    return intertwining_residual_ops(W, cat.potential_unchecked(f, p),
                                     cat.potential_unchecked(f, p1), test_fn)


def gaussian_bump(g: Grid, centre: float, width: float, mix: float = 0.5) -> WaveFunction:
    """Smooth test function concentrated at ``centre``; second component scaled by ``mix``."""
    x = g.nodes
    env = np.exp(-(((x - centre) / width) ** 2))
    return WaveFunction(g, env, mix * env * (x - centre) / width)
