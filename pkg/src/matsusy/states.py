"""Ground states (closed forms and ODE), ladder chains, degeneracy and Rayleigh quotients."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import catalog as cat
from .catalog import Branch, FamilyId, MatrixFunction, Params
from .errors import (BranchError, DomainError, GridError, LevelError, NormalizationError,
                     ParamError, StiffnessError)
from .gridops import (Grid, OperatorMatrix, TruncationPolicy, WaveFunction, _check_inside,
                      assemble_hamiltonian, build_grid, stencil_derivative)
from .specfun import HypParams, bessel_k_with_derivative, gauss_2f1, growth_exponent

F = FamilyId

TWO_SOLUTION_FAMILIES = (F.F3_trig_rm_like, F.F4_eckart_like, F.F5_hyp_rm_like)
ODE_RTOL = 1e-10
_LOG_TINY = -700.0


@dataclass(frozen=True)
class GroundStateSpec:
    family: FamilyId
    branch: Branch
    solution_index: int
    params: Params

    def __post_init__(self):
        object.__setattr__(self, "family", cat.parse_family(self.family))
        object.__setattr__(self, "branch", cat.parse_branch(self.branch))
        if self.solution_index not in (1, 2):
            raise ParamError("solution_index must be 1 or 2")
        if self.solution_index == 2 and self.family not in TWO_SOLUTION_FAMILIES:
            raise ParamError(f"{self.family} has a single ground-state solution")


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Term:
    """coef * z^A (1 - z)^B * 2F1(a + s, b + s; c + s; z)."""
    coef: float
    A: float
    B: float
    shift: int


def _variable(f: FamilyId, lam: float, x: np.ndarray):
    """(log z, log(1 - z), z, 1 - z, log|dz/dx|, sign dz/dx) for the hypergeometric families."""
    t = lam * x
    if f is F.F3_trig_rm_like:
        s_p = np.sin(0.5 * t + 0.25 * math.pi)
        s_m = np.sin(0.25 * math.pi - 0.5 * t)
        z, zc = s_p**2, s_m**2
        dz = 0.5 * lam * np.cos(t)
    elif f is F.F4_eckart_like:
        y = np.tanh(0.5 * t)
        z = y**2
        zc = 1.0 / np.cosh(0.5 * t) ** 2
        dz = lam * y * zc
    elif f is F.F5_hyp_rm_like:
        # z underflows in the far left tail, so everything stays in logs
        log_z = -np.logaddexp(0.0, -2.0 * t)
        log_zc = -np.logaddexp(0.0, 2.0 * t)
        z, zc = np.exp(log_z), np.exp(log_zc)
        return log_z, log_zc, z, zc, math.log(2.0 * lam) + log_z + log_zc, np.ones_like(z)
    else:
        raise ParamError(f"{f} has no hypergeometric variable")
    with np.errstate(divide="ignore"):
        return np.log(z), np.log(zc), z, zc, np.log(np.abs(dz)), np.sign(dz)


def _hyp_terms(f: FamilyId, idx: int, p: Params):
    """Hypergeometric parameters and the phi / xi term lists."""
    k, m, w = p.kappa, p.mu, p.omega
    T = _Term
    if f is F.F3_trig_rm_like and idx == 1:
        hp = HypParams.conjugate(0.0, -w / k, 0.5 - m)
        phi = [T(1.0, (k - m) / 2, (k + m) / 2, 0)]
        xi = [T(2 * w / (k * (2 * m - 1)), (1 + k - m) / 2, (1 + k + m) / 2, 1)]
    elif f is F.F3_trig_rm_like:
        hp = HypParams.conjugate(m + 0.5, -w / k, m + 1.5)
        A, B = (1 + k + m) / 2, (k + m) / 2
        phi = [T(1.0, A, B, 0)]
        xi = [T(-(2 * m + 1) * k / (2 * w), A - 0.5, B + 0.5, 0),
              T(-(k**2 * (2 * m + 1) ** 2 + 4 * w**2) / (2 * w * k * (2 * m + 3)),
                (2 + k + m) / 2, (1 + k + m) / 2, 1)]
    elif f is F.F4_eckart_like and idx == 1:
        a, c = w / k, 0.5 - m
        hp = HypParams.real(a, a + c, c)
        B = w / k - k
        phi = [T(1.0, (k - m) / 2, B, 0)]
        xi = [T(-1.0, (k - m + 1) / 2, B, 0), T((a + c) / c, (k - m + 1) / 2, B + 1, 1)]
    elif f is F.F5_hyp_rm_like and idx == 1:
        hp = HypParams.conjugate(0.0, -m, 0.5 + w / k)
        A, B = -k / 2 + w / (2 * k), -k / 2 - w / (2 * k)
        phi = [T(1.0, A, B, 0)]
        xi = [T(-2 * m * k / (2 * w + k), A + 0.5, B + 0.5, 1)]
    elif f is F.F5_hyp_rm_like:
        hp = HypParams.conjugate(0.5 - w / k, -m, 1.5 - w / k)
        A, B = 0.5 - k / 2 - w / (2 * k), -k / 2 - w / (2 * k)
        phi = [T(1.0, A, B, 0)]
        xi = [T((2 * w - k) / (2 * k * m), A - 0.5, B + 0.5, 0),
              T(-((k - 2 * w) ** 2 + 4 * m**2 * k**2) / (2 * m * k * (3 * k - 2 * w)),
                A + 0.5, B + 0.5, 1)]
    else:
        raise ParamError(f"no hypergeometric closed form for {f} solution {idx}")
    return hp, phi, xi


def _eval_terms(terms, hp: HypParams, var, cache: dict):
    """Values and x-derivatives of a term sum; F is skipped where the whole term underflows.

    The derivative factors pre*z'/z and pre*z'/(1-z) are formed in logs: pre and z' can
    underflow where their ratio is still representable.
    """
    log_z, log_zc, z, zc, log_dz, sgn = var
    val = np.zeros_like(z)
    dval = np.zeros_like(z)

    def hyp(s, mask):
        # growth-scaled values F (1 - z)^sigma; the prefactor carries (1 - z)^-sigma
        key = (s, mask.tobytes())
        if key not in cache:
            out = np.zeros_like(z)
            if mask.any():
                out[mask] = gauss_2f1(hp.shifted(s, s), z[mask], zc[mask], growth_scaled=True)
            cache[key] = out
        return cache[key]

    def expl(a, mask):
        return np.where(mask, np.exp(np.where(mask, a, 0.0)), 0.0)

    for t in terms:
        hs = hp.shifted(t.shift, t.shift)
        ab_c = (hs.a * hs.b).real / hs.c
        s0 = growth_exponent(hs)
        s1 = growth_exponent(hp.shifted(t.shift + 1, t.shift + 1))
        with np.errstate(invalid="ignore"):
            logpre = t.A * log_z + t.B * log_zc
            d_pre = logpre + log_dz
            # log sizes of the four pieces once the growth of F is divided out
            size = logpre - s0 * log_zc
            size_z = d_pre - log_z - s0 * log_zc
            size_zc = d_pre - log_zc - s0 * log_zc
            size_1 = d_pre - s1 * log_zc
        ok = [np.isfinite(a) & (a > _LOG_TINY) & (zc > 0.0) for a in (size, size_z, size_zc, size_1)]
        f0 = hyp(t.shift, ok[0] | ok[1] | ok[2])
        f1 = hyp(t.shift + 1, ok[3])
        val += t.coef * expl(size, ok[0]) * f0
        dval += t.coef * sgn * ((t.A * expl(size_z, ok[1]) - t.B * expl(size_zc, ok[2])) * f0
                                + ab_c * expl(size_1, ok[3]) * f1)
    return val, dval


def _hypergeometric_state(f: FamilyId, idx: int, p: Params, x: np.ndarray):
    hp, phi_t, xi_t = _hyp_terms(f, idx, p)
    var = _variable(f, p.lam, x)
    cache: dict = {}
    phi, dphi = _eval_terms(phi_t, hp, var, cache)
    xi, dxi = _eval_terms(xi_t, hp, var, cache)
    return phi, xi, dphi, dxi


def _bessel_component(power: float, order: float, y: np.ndarray, dy: np.ndarray):
    """y^power K_order(y) and its x-derivative; zero where K underflows."""
    live = y < 700.0
    val = np.zeros_like(y)
    der = np.zeros_like(y)
    yl = y[live]
    k, kp = bessel_k_with_derivative(abs(order), yl)
    k, kp = np.asarray(k, float), np.asarray(kp, float)
    pre = yl**power
    val[live] = pre * k
    der[live] = (power * yl ** (power - 1.0) * k + pre * kp) * dy[live]
    return val, der


def _bessel_state(f: FamilyId, p: Params, x: np.ndarray):
    k, m, w = p.kappa, p.mu, p.omega
    if f is F.F1_coulomb_like:
        y = w * x / (2 * k + 1)
        dy = np.full_like(x, w / (2 * k + 1))
        phi, dphi = _bessel_component(k + 1, m + 1, y, dy)
        xi, dxi = _bessel_component(k + 1, m, y, dy)
        return phi, xi, dphi, dxi
    y = m * np.exp(-p.lam * x)
    dy = -p.lam * y
    nu = w / k + 0.5
    phi, dphi = _bessel_component(0.5 - k, nu, y, dy)
    xi, dxi = _bessel_component(0.5 - k, nu - 1, y, dy)
    return phi, -xi, dphi, -dxi


def _closed_form_arrays(f: FamilyId, idx: int, p: Params, x: np.ndarray):
    """Unnormalized (phi, xi, phi', xi') at kappa-branch parameters p."""
    if f in (F.F1_coulomb_like, F.F2_morse_like):
        return _bessel_state(f, p, x)
    return _hypergeometric_state(f, idx, p, x)


def _closed_form_available(f: FamilyId, b: Branch, idx: int, p: Params) -> None:
    if f in (F.F0_oscillator, F.F6_extended) or f in cat.SCALAR_FAMILIES:
        raise BranchError(f"{f} has no closed-form ground state; use ground_state_ode")
    cat.require_branch(f, b, p)


def ground_state_closed_form(spec: GroundStateSpec, g: Grid) -> tuple[WaveFunction, float]:
    """Normalized closed-form ground state on g, carrying analytic derivative samples.

    The mu-branch forms are the kappa-branch forms at the dual parameters, since the
    alternative superpotential is the kappa one evaluated there. The second F4 solution
    has no usable closed form and is taken from the ODE construction (orthogonal
    complement of the first solution inside the ODE kernel).
    """
    f, b, idx, p = spec.family, spec.branch, spec.solution_index, spec.params
    cat.validate_params(f, p)
    _closed_form_available(f, b, idx, p)
    W = cat.superpotential(f, b, p)
    _check_inside(W, g)
    energy = -cat.factorization_constant(f, b, p)
    if f is F.F4_eckart_like and idx == 2:
        return _f4_second_solution(b, p, g), energy
    q = cat.dual_transform(p) if b is Branch.MuBranch else p
    with np.errstate(over="ignore", invalid="ignore"):
        phi, xi, dphi, dxi = _closed_form_arrays(f, idx, q, g.nodes)
    if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(xi))):
        raise NormalizationError(f"closed form for {f} is not finite on the grid")
    psi = WaveFunction(g, phi, xi, dphi, dxi)
    return psi.normalized(), energy


def _f4_second_solution(b: Branch, p: Params, g: Grid) -> WaveFunction:
    first, _ = ground_state_closed_form(GroundStateSpec(F.F4_eckart_like, b, 1, p), g)
    sols = ground_state_ode(F.F4_eckart_like, b, p, g)
    if len(sols) < 2:
        raise NormalizationError("F4 has no second normalizable ground state at these parameters")
    u = np.stack([s.stacked.reshape(-1) for s in sols], axis=1)
    v = first.stacked.reshape(-1)
    u = u - np.outer(v, v @ u) / (v @ v)
    q, r = np.linalg.qr(u)
    col = q[:, int(np.argmax(np.abs(np.diag(r))))].reshape(-1, 2)
    return WaveFunction(g, col[:, 0], col[:, 1]).normalized()


def ground_state_residual(W: MatrixFunction, psi: WaveFunction, derivative: str = "auto") -> float:
    """||psi' + W psi||_2 / ||psi||_2 over interior nodes.

    derivative: "analytic" uses the samples carried by psi, "stencil" the 4th-order
    grid stencil, "auto" the former when available. Near a singular wall with local
    power t^s the stencil error only falls like h^(s - 1/2), so closed forms default to
    their exact derivatives.
    """
    g = psi.grid
    _check_inside(W, g)
    u = psi.stacked
    if derivative not in ("auto", "analytic", "stencil"):
        raise ValueError("derivative must be auto, analytic or stencil")
    if derivative == "analytic" and not psi.has_derivative:
        raise GridError("wavefunction carries no analytic derivative")
    if derivative != "stencil" and psi.has_derivative:
        du = np.stack([psi.dphi, psi.dxi], axis=-1)
    else:
        du = stencil_derivative(u, g.h)
    r = du + np.einsum("nij,nj->ni", W(g.nodes), u)
    num = math.sqrt(float(np.sum(r[1:-1] ** 2)))
    den = math.sqrt(float(np.sum(u[1:-1] ** 2)))
    if den == 0.0:
        raise GridError("zero wavefunction")
    return num / den


# ---------------------------------------------------------------------------
# ODE construction
# ---------------------------------------------------------------------------

def _match_point(f: FamilyId, q: Params) -> float:
    if f is F.F1_coulomb_like:
        return (2 * q.kappa + 1) / q.omega
    if f is F.F2_morse_like:
        return math.log(q.mu) / q.lam
    if f is F.F4_eckart_like:
        return 1.0 / q.lam
    if f is F.F0_oscillator:
        return -q.mu / q.omega
    return 0.0


def _end_basis(W: MatrixFunction, x_end: float, wall: float | None, side: int,
               require_vanishing: bool) -> tuple[np.ndarray, np.ndarray]:
    """Columns spanning the solutions that are normalizable at one end, with exponents.

    At a finite wall, W ~ R/t with t the distance to the wall; solutions behave like
    t^e with e = -r (left) or e = +r (right) for the eigenpairs (r, v) of R, and are
    square integrable for e > -1/2. At an infinite end the decaying directions are the
    eigenvectors of W with W > 0 on the right and W < 0 on the left (exponents unused).
    """
    m = W(np.array([x_end]))[0]
    if wall is not None:
        vals, vecs = np.linalg.eigh(abs(x_end - wall) * m)
        expo = -vals if side < 0 else vals
        keep = expo > (0.0 if require_vanishing else -0.5)
        return vecs[:, keep], expo[keep]
    vals, vecs = np.linalg.eigh(m)
    keep = vals * side > 0
    return vecs[:, keep], np.zeros(int(keep.sum()))


def _breakpoints(nodes: np.ndarray, first: int, x_start: float, wall: float | None,
                 chunks: int) -> list[tuple[float, float, np.ndarray]]:
    """Chunks (x_a, x_b, node indices in (x_a, x_b]) from x_start through nodes[first:].

    Near a wall the breakpoints are geometric in the wall distance so that no chunk
    spans more than one decade of t.
    """
    xs = [x_start]
    if wall is not None and first < nodes.size:
        t0, t1 = abs(x_start - wall), abs(nodes[first] - wall)
        if t1 > 10.0 * t0:
            for t in np.geomspace(t0, t1, int(math.ceil(math.log10(t1 / t0))) + 1)[1:-1]:
                xs.append(wall + math.copysign(t, x_start - wall))
    step = max(1, (nodes.size - first) // chunks)
    xs += list(nodes[first::step])
    if xs[-1] != nodes[-1]:
        xs.append(nodes[-1])
    out = []
    direction = np.sign(nodes[-1] - nodes[0])
    for xa, xb in zip(xs[:-1], xs[1:]):
        if (xb - xa) * direction <= 0:
            continue
        lo_, hi_ = min(xa, xb), max(xa, xb)
        idx = np.nonzero((nodes > lo_) & (nodes <= hi_) if direction > 0
                         else (nodes >= lo_) & (nodes < hi_))[0]
        out.append((xa, xb, idx))
    return out


def _integrate(W: MatrixFunction, nodes: np.ndarray, start: np.ndarray, expo: np.ndarray,
               wall: float | None, scale: float, chunks: int = 40) -> np.ndarray:
    """Integrate psi' = -W psi through ``nodes`` (monotone) for each start column.

    Returns samples of shape (len(nodes), 2, k) expressed so that the columns at the last
    node are orthonormal; QR renormalization per chunk keeps growth bounded. From a wall
    the integration starts at distance 1e-8 * scale with the leading power law t^e, which
    also fills any nodes closer to the wall.
    """
    k = start.shape[1]
    out = np.zeros((nodes.size, 2, k))
    if k == 0:
        return out

    def rhs(x, y):
        m = W(np.array([x]))[0]
        return -(m @ y.reshape(2, k)).reshape(-1)

    if wall is not None:
        sgn = math.copysign(1.0, nodes[0] - wall)
        t_start = max(abs(nodes[0] - wall), 1e-8 * scale)
        x_start = wall + sgn * t_start
        first = int(np.searchsorted(np.abs(nodes - wall), t_start, side="right"))
        near = np.abs(nodes[:first] - wall)
        pre = start[None, :, :] * (near[:, None, None] / t_start) ** expo[None, None, :]
    else:
        x_start, first = nodes[0], 1
        pre = start[None, :, :]
    spans = [(np.arange(first), pre)]
    transforms = [np.eye(k)]
    basis = start
    for xa, xb, idx in _breakpoints(nodes, first, x_start, wall, chunks):
        t_eval = np.concatenate([nodes[idx], [xb]]) if (idx.size == 0 or nodes[idx[-1]] != xb) \
            else nodes[idx]
        sol = solve_ivp(rhs, (xa, xb), basis.reshape(-1), method="DOP853", t_eval=t_eval,
                        rtol=ODE_RTOL, atol=1e-30)
        if not sol.success or sol.y.shape[1] != t_eval.size:
            raise StiffnessError(f"ODE integration failed near x={xa}: {sol.message}")
        ys = sol.y.T.reshape(-1, 2, k)
        if not np.all(np.isfinite(ys)):
            raise StiffnessError(f"ODE solution overflowed near x={xb}")
        qmat, rmat = np.linalg.qr(ys[-1])
        spans.append((idx, ys[: idx.size]))
        transforms.append(rmat)
        basis = qmat
    # chunk j holds Y_j c_j for the final-basis coefficients c, with c_j = R_j^-1 c_{j+1}
    coeff = np.eye(k)
    for (idx, ys), rmat in zip(reversed(spans), reversed(transforms)):
        coeff = np.linalg.solve(rmat, coeff)
        if idx.size:
            out[idx] = ys @ coeff
    return out


def ground_state_ode(f: FamilyId, b: Branch, p: Params, g: Grid,
                     require_vanishing: bool = False, tol: float = 1e-7) -> list[WaveFunction]:
    """Normalizable kernel of a-minus by direct integration from both grid ends.

    Each end contributes the locally normalizable solution directions; the kernel is
    the intersection of the two spans at an interior matching node. States are
    returned orthonormalized on the grid (no analytic derivative samples attached).
    """
    f, b = cat.parse_family(f), cat.parse_branch(b)
    cat.validate_params(f, p)
    W = cat.superpotential(f, b, p)
    _check_inside(W, g)
    lo, hi = W.domain
    wall_lo = lo if math.isfinite(lo) else None
    wall_hi = hi if math.isfinite(hi) else None
    q = cat.dual_transform(p) if b is Branch.MuBranch else p
    x = g.nodes
    im = int(np.clip(np.searchsorted(x, _match_point(f, q)), 8, g.n - 9))
    left, e_l = _end_basis(W, x[0], wall_lo, -1, require_vanishing)
    right, e_r = _end_basis(W, x[-1], wall_hi, +1, require_vanishing)
    if left.shape[1] == 0 or right.shape[1] == 0:
        return []
    ys_l = _integrate(W, x[: im + 1], left, e_l, wall_lo, W.scale)
    ys_r = _integrate(W, x[im:][::-1], right, e_r, wall_hi, W.scale)[::-1]
    lm, rm = ys_l[-1], ys_r[0]
    mat = np.concatenate([lm, -rm], axis=1)
    _, sv, vt = np.linalg.svd(mat)
    sv_full = np.zeros(mat.shape[1])
    sv_full[: sv.size] = sv
    null = vt[sv_full <= tol * max(sv_full.max(), 1e-300)]
    kl = lm.shape[1]
    states = []
    for vec in null:
        u = np.empty((g.n, 2))
        u[: im + 1] = ys_l @ vec[:kl]
        u[im:] = ys_r @ vec[kl:]
        states.append(u)
    if not states:
        return []
    stack = np.stack([s.reshape(-1) for s in states], axis=1)
    qmat, _ = np.linalg.qr(stack)
    return [WaveFunction(g, col.reshape(-1, 2)[:, 0], col.reshape(-1, 2)[:, 1]).normalized()
            for col in qmat.T]


def ground_state_degeneracy(f: FamilyId, b: Branch, p: Params, n: int = 2000,
                            policy: TruncationPolicy | None = None,
                            require_vanishing: bool = False) -> int:
    """Number of normalizable kernel vectors of a-minus (0, 1 or 2)."""
    f = cat.parse_family(f)
    g = build_grid(f, p, n, policy)
    return len(ground_state_ode(f, b, p, g, require_vanishing=require_vanishing))


# ---------------------------------------------------------------------------
# Excited states
# ---------------------------------------------------------------------------

def _mv(m: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nj->ni", m, u)


def _ladder_chain(f: FamilyId, b: Branch, p: Params, n: int, g: Grid, solution_index: int):
    """Samples (u, u', u'', energy) of the unnormalized n-th chain state.

    Derivatives are propagated analytically: for the current eigenfunction at q+1,
    u'' = (V(q+1) - E) u and u''' = V'(q+1) u + (V(q+1) - E) u', so no grid
    differentiation enters the chain.
    """
    f, b = cat.parse_family(f), cat.parse_branch(b)
    cat.validate_params(f, p)
    cat.require_branch(f, b, p)
    if n < 0 or n != int(n):
        raise LevelError("level index must be a non-negative integer")
    n = int(n)
    count = cat.admissible_levels(f, b, p)
    if n >= count:
        raise LevelError(f"level {n} exceeds the bound: {f} {b} has {count} levels")
    top = cat.shift_params(p, b, n)
    psi, energy = ground_state_closed_form(GroundStateSpec(f, b, solution_index, top), g)
    x = g.nodes
    u = psi.stacked
    du = (np.stack([psi.dphi, psi.dxi], axis=-1) if psi.has_derivative
          else stencil_derivative(u, g.h))
    v_top = cat.potential_unchecked(f, top)(x)
    d2u = _mv(v_top, u) - energy * u
    for j in range(n - 1, -1, -1):
        vq = cat.potential_unchecked(f, cat.shift_params(p, b, j + 1))
        Wj = cat.superpotential_unchecked(f, b, cat.shift_params(p, b, j))
        v, vd = vq(x), vq.d(x)
        w, wd, wdd = Wj(x), Wj.d(x), Wj.second(x)
        d2u = _mv(v, u) - energy * u
        d3u = _mv(vd, u) + _mv(v, du) - energy * du
        new = -du + _mv(w, u)
        dnew = -d2u + _mv(wd, u) + _mv(w, du)
        d2new = -d3u + _mv(wdd, u) + 2.0 * _mv(wd, du) + _mv(w, d2u)
        scale = np.max(np.abs(new))
        if not np.isfinite(scale) or scale == 0.0:
            raise NormalizationError("ladder chain produced a vanishing state")
        u, du, d2u = new / scale, dnew / scale, d2new / scale
    return u, du, d2u, energy


def excited_state(f: FamilyId, b: Branch, p: Params, n: int, g: Grid,
                  solution_index: int = 1) -> tuple[WaveFunction, float]:
    """a+(q) a+(q+1) ... a+(q+n-1) applied to the ground state at q+n, normalized.

    The grid must be long enough for the shifted ground state; build it with
    TruncationPolicy(levels=n + 1) or more.
    """
    u, du, _, energy = _ladder_chain(f, b, p, n, g, solution_index)
    out = WaveFunction(g, u[:, 0], u[:, 1], du[:, 0], du[:, 1]).normalized()
    return out, energy


def chain_eigen_residual(f: FamilyId, b: Branch, p: Params, n: int, g: Grid,
                         solution_index: int = 1) -> float:
    """||H psi_n - E_n psi_n||_2 / ||psi_n||_2 with H applied through analytic derivatives."""
    u, _, d2u, energy = _ladder_chain(f, b, p, n, g, solution_index)
    v = cat.potential_unchecked(cat.parse_family(f), p)(g.nodes)
    r = -d2u + _mv(v, u) - energy * u
    return float(np.linalg.norm(r[1:-1]) / np.linalg.norm(u[1:-1]))


def rayleigh_quotient(H: OperatorMatrix, psi: WaveFunction) -> float:
    """<psi, H psi> / <psi, psi> on the interior nodes."""
    v = H.pack(psi)
    den = float(v @ v)
    if den == 0.0:
        raise GridError("zero wavefunction")
    return float(v @ H.matvec(v)) / den


def eigen_residual(H: OperatorMatrix, psi: WaveFunction, energy: float) -> float:
    """||H psi - E psi||_2 / ||psi||_2 on the interior nodes, H the finite-difference operator.

    Dominated by the wall nodes when psi vanishes only like t^s with small s.
    """
    v = H.pack(psi)
    return float(np.linalg.norm(H.matvec(v) - energy * v) / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# Comparison helpers
# ---------------------------------------------------------------------------

def cosine_similarity(a: WaveFunction, b: WaveFunction) -> float:
    return a.inner(b) / (a.norm() * b.norm())


def subspace_angle(first: list[WaveFunction], second: list[WaveFunction]) -> float:
    """Largest principal angle between two spans of wavefunctions (radians)."""
    def basis(ws):
        m = np.stack([w.stacked.reshape(-1) for w in ws], axis=1)
        q, _ = np.linalg.qr(m)
        return q
    s = np.linalg.svd(basis(first).T @ basis(second), compute_uv=False)
    if len(first) != len(second):
        return math.pi / 2
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))


def state_metadata(f: FamilyId, b: Branch, solution_index: int, n: int, energy: float,
                   psi: WaveFunction, W: MatrixFunction | None) -> dict:
    kernel = ground_state_residual(W, psi) if (W is not None and n == 0) else None
    return {
        "family": str(cat.parse_family(f)),
        "branch": str(cat.parse_branch(b)),
        "solutionIndex": solution_index,
        "n": n,
        "energy": energy,
        "norm_residual": abs(psi.norm() - 1.0),
        "kernel_residual": kernel,
    }
