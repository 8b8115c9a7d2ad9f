"""Catalog of matrix shape-invariant superpotentials, their potentials and constants.

All matrices are real combinations ``a0*I + a1*sigma1 + a3*sigma3`` and are
returned as arrays of shape ``(..., 2, 2)``. The shift step of the normalized
spectral parameter is fixed to 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .errors import BranchError, NonConstantResidual, ParamError


class FamilyId(str, Enum):
    F0_oscillator = "F0_oscillator"
    F1_coulomb_like = "F1_coulomb_like"
    F2_morse_like = "F2_morse_like"
    F3_trig_rm_like = "F3_trig_rm_like"
    F4_eckart_like = "F4_eckart_like"
    F5_hyp_rm_like = "F5_hyp_rm_like"
    F6_extended = "F6_extended"
    S1_coulomb_scalar = "S1_coulomb_scalar"
    S2_trig_rm_scalar = "S2_trig_rm_scalar"
    S3_eckart_scalar = "S3_eckart_scalar"
    S4_hyp_rm_scalar = "S4_hyp_rm_scalar"

    def __str__(self) -> str:
        return self.value


class Branch(str, Enum):
    KappaBranch = "KappaBranch"
    MuBranch = "MuBranch"

    def __str__(self) -> str:
        return self.value


F = FamilyId
MATRIX_FAMILIES = (F.F0_oscillator, F.F1_coulomb_like, F.F2_morse_like, F.F3_trig_rm_like,
                   F.F4_eckart_like, F.F5_hyp_rm_like, F.F6_extended)
SCALAR_FAMILIES = (F.S1_coulomb_scalar, F.S2_trig_rm_scalar, F.S3_eckart_scalar,
                   F.S4_hyp_rm_scalar)
DUAL_FAMILIES = (F.F1_coulomb_like, F.F3_trig_rm_like, F.F4_eckart_like)
# families whose energies read -lambda^2 (N^2 + omega^2/N^2)
_EXP_TYPE = (F.F2_morse_like, F.F4_eckart_like, F.F5_hyp_rm_like)


def parse_family(name) -> FamilyId:
    try:
        return FamilyId(str(name))
    except ValueError:
        raise ParamError(f"unknown family {name!r}") from None


def parse_branch(name) -> Branch:
    aliases = {"kappa": Branch.KappaBranch, "mu": Branch.MuBranch}
    key = str(name)
    if key.lower() in aliases:
        return aliases[key.lower()]
    try:
        return Branch(key)
    except ValueError:
        raise ParamError(f"unknown branch {name!r}") from None


@dataclass(frozen=True)
class Params:
    """Real parameters of a family. ``lam`` is the inverse length scale lambda.

    For the scalar reference families the ``kappa`` slot carries l + 1/2 (S1)
    or the exponent r (S2-S4).
    """

    kappa: float
    mu: float
    omega: float
    lam: float = 1.0
    c_ext: float | None = None

    def as_dict(self) -> dict:
        out = {"lambda": self.lam, "kappa": self.kappa, "mu": self.mu, "omega": self.omega}
        if self.c_ext is not None:
            out["c"] = self.c_ext
        return out

    def with_(self, **kw) -> "Params":
        return replace(self, **kw)


def dual_transform(p: Params) -> Params:
    """(kappa, mu) -> (mu + 1/2, kappa - 1/2); an involution leaving the dual potentials fixed."""
    return replace(p, kappa=p.mu + 0.5, mu=p.kappa - 0.5)


def shift_params(p: Params, b: Branch, n: int | float) -> Params:
    """Parameters with the branch's spectral parameter advanced by n."""
    if b is Branch.KappaBranch:
        return replace(p, kappa=p.kappa + n)
    return replace(p, mu=p.mu + n)


# ---------------------------------------------------------------------------
# Matrix functions
# ---------------------------------------------------------------------------

def pauli(a0, a1, a3) -> np.ndarray:
    """a0*I + a1*sigma1 + a3*sigma3 with broadcasting; shape (..., 2, 2)."""
    a0, a1, a3 = np.broadcast_arrays(np.asarray(a0, float), np.asarray(a1, float),
                                     np.asarray(a3, float))
    out = np.empty(a0.shape + (2, 2))
    out[..., 0, 0] = a0 + a3
    out[..., 1, 1] = a0 - a3
    out[..., 0, 1] = a1
    out[..., 1, 0] = a1
    return out


Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MatrixFunction:
    """x -> real symmetric 2x2 matrix with its analytic x-derivative."""

    value: Evaluator
    derivative: Evaluator
    domain: tuple[float, float]
    scale: float = 1.0
    scalar: bool = False
    label: str = ""
    second: Evaluator | None = field(default=None, compare=False)

    def __call__(self, x):
        return self.value(np.asarray(x, float))

    def d(self, x):
        return self.derivative(np.asarray(x, float))

    def shifted(self, const: float) -> "MatrixFunction":
        eye = np.eye(2)
        return replace(self, value=lambda x, f=self.value: f(x) + const * eye,
                       label=f"{self.label}+{const}I", second=None)


def _zero_like(x):
    return np.zeros_like(np.asarray(x, float))


def sample_points(mf: MatrixFunction, samples: int) -> np.ndarray:
    """Deterministic interior sample points scaled to the function's length scale."""
    lo, hi = mf.domain
    s = mf.scale
    if math.isinf(lo) and math.isinf(hi):
        return s * np.linspace(-3.0, 3.0, samples)
    if math.isinf(hi):
        return lo + s * np.geomspace(0.05, 20.0, samples)
    if math.isinf(lo):
        return hi - s * np.geomspace(0.05, 20.0, samples)[::-1]
    inset = 0.02 * (hi - lo)
    return np.linspace(lo + inset, hi - inset, samples)


# ---------------------------------------------------------------------------
# Validity and domains
# ---------------------------------------------------------------------------

def _is_int(v: float, tol: float = 1e-12) -> bool:
    return abs(v - round(v)) < tol


def validate_params(f: FamilyId, p: Params) -> None:
    """Raise ParamError unless p lies in the family's stored convention."""
    vals = [p.kappa, p.mu, p.omega, p.lam]
    if not all(math.isfinite(v) for v in vals):
        raise ParamError("parameters must be finite")
    if p.lam <= 0:
        raise ParamError("lambda must be positive")
    if f is F.F0_oscillator:
        if p.omega <= 0:
            raise ParamError("F0 needs omega > 0")
        return
    if f in (F.S1_coulomb_scalar, F.S2_trig_rm_scalar, F.S3_eckart_scalar, F.S4_hyp_rm_scalar):
        if p.omega < 0:
            raise ParamError("scalar references need omega >= 0")
        return
    if p.omega <= 0:
        raise ParamError(f"{f} needs omega > 0")
    if f is F.F1_coulomb_like:
        if not p.mu > -0.5:
            raise ParamError("F1 needs mu > -1/2")
        if 2 * p.kappa + 1 == 0:
            raise ParamError("F1 needs 2*kappa + 1 != 0")
    elif f is F.F6_extended:
        if p.c_ext is None or not p.c_ext > 0:
            raise ParamError("F6 needs c > 0")
        if 2 * p.kappa + 1 == 0:
            raise ParamError("F6 needs 2*kappa + 1 != 0")
    else:
        if p.kappa == 0:
            raise ParamError(f"{f} needs kappa != 0")
        if f is F.F4_eckart_like:
            if not p.mu < 0:
                raise ParamError("F4 stores mu < 0")
        elif not p.mu > 0:
            raise ParamError(f"{f} needs mu > 0")


def domain(f: FamilyId, p: Params) -> tuple[float, float]:
    inf = math.inf
    if f in (F.F1_coulomb_like, F.F4_eckart_like, F.S1_coulomb_scalar, F.S3_eckart_scalar):
        return (0.0, inf)
    if f in (F.F3_trig_rm_like, F.S2_trig_rm_scalar):
        half = math.pi / (2.0 * p.lam)
        return (-half, half)
    if f is F.F6_extended:
        return (-p.c_ext, p.c_ext)
    return (-inf, inf)


def length_scale(f: FamilyId, p: Params) -> float:
    """Typical extent of the low-lying states, used for default truncations."""
    if f is F.F0_oscillator:
        return 1.0 / math.sqrt(p.omega)
    if f in (F.F1_coulomb_like, F.S1_coulomb_scalar):
        q = p.kappa if p.kappa > 0 else p.mu + 0.5
        return max(2.0 * q + 1.0, 1.0) / max(p.omega, 1e-12)
    if f is F.F6_extended:
        return p.c_ext
    return 1.0 / p.lam


# ---------------------------------------------------------------------------
# Closed forms, unvalidated (the mu-branch reuses them at dual parameters)
# ---------------------------------------------------------------------------

def _w_coeffs(f: FamilyId, k: float, m: float, w: float, lam: float, c: float | None):
    """Return callables giving (a0, a1, a3) for W, W' and W''."""
    if f is F.F0_oscillator:
        def val(x):
            return w * x, _zero_like(x), m + _zero_like(x)

        def der(x):
            return w + _zero_like(x), _zero_like(x), _zero_like(x)

        def sec(x):
            return _zero_like(x), _zero_like(x), _zero_like(x)
    elif f is F.F1_coulomb_like:
        g = w / (2 * k + 1)

        def val(x):
            return -(2 * k + 1) / (2 * x), g + _zero_like(x), (2 * m + 1) / (2 * x)

        def der(x):
            return (2 * k + 1) / (2 * x**2), _zero_like(x), -(2 * m + 1) / (2 * x**2)

        def sec(x):
            return -(2 * k + 1) / x**3, _zero_like(x), (2 * m + 1) / x**3
    elif f is F.F2_morse_like:
        def val(x):
            e = np.exp(-lam * x)
            return -lam * k + _zero_like(x), lam * m * e, -lam * w / k + _zero_like(x)

        def der(x):
            return _zero_like(x), -lam**2 * m * np.exp(-lam * x), _zero_like(x)

        def sec(x):
            return _zero_like(x), lam**3 * m * np.exp(-lam * x), _zero_like(x)
    elif f is F.F3_trig_rm_like:
        def val(x):
            t = lam * x
            return lam * k * np.tan(t), lam * w / k + _zero_like(x), lam * m / np.cos(t)

        def der(x):
            t = lam * x
            s = 1 / np.cos(t)
            return lam**2 * k * s**2, _zero_like(x), lam**2 * m * s * np.tan(t)

        def sec(x):
            t = lam * x
            s, tn = 1 / np.cos(t), np.tan(t)
            return (lam**3 * 2 * k * s**2 * tn, _zero_like(x),
                    lam**3 * m * s * (tn**2 + s**2))
    elif f is F.F4_eckart_like:
        def val(x):
            t = lam * x
            return -lam * k / np.tanh(t), -lam * w / k + _zero_like(x), lam * m / np.sinh(t)

        def der(x):
            t = lam * x
            cs = 1 / np.sinh(t)
            return lam**2 * k * cs**2, _zero_like(x), -lam**2 * m * cs / np.tanh(t)

        def sec(x):
            t = lam * x
            cs, ct = 1 / np.sinh(t), 1 / np.tanh(t)
            return (-lam**3 * 2 * k * cs**2 * ct, _zero_like(x),
                    lam**3 * m * cs * (ct**2 + cs**2))
    elif f is F.F5_hyp_rm_like:
        def val(x):
            t = lam * x
            return -lam * k * np.tanh(t), lam * m / np.cosh(t), -lam * w / k + _zero_like(x)

        def der(x):
            t = lam * x
            sh = 1 / np.cosh(t)
            return -lam**2 * k * sh**2, -lam**2 * m * sh * np.tanh(t), _zero_like(x)

        def sec(x):
            t = lam * x
            sh, th = 1 / np.cosh(t), np.tanh(t)
            return (lam**3 * 2 * k * sh**2 * th, -lam**3 * m * sh * (sh**2 - th**2),
                    _zero_like(x))
    elif f is F.F6_extended:
        a = k + 0.5
        g = w / (2 * k + 1)

        def val(x):
            den = c**2 - x**2
            return a * x / den, g + _zero_like(x), -a * c / den

        def der(x):
            den = c**2 - x**2
            return a * (c**2 + x**2) / den**2, _zero_like(x), -a * c * 2 * x / den**2

        def sec(x):
            den = c**2 - x**2
            return (a * 2 * x * (3 * c**2 + x**2) / den**3, _zero_like(x),
                    -a * c * 2 * (c**2 + 3 * x**2) / den**3)
    else:
        raise ParamError(f"{f} is a scalar reference and has no superpotential")
    return val, der, sec


def _raw_superpotential(f: FamilyId, p: Params, label: str) -> MatrixFunction:
    val, der, sec = _w_coeffs(f, p.kappa, p.mu, p.omega, p.lam, p.c_ext)
    return MatrixFunction(
        value=lambda x: pauli(*val(x)),
        derivative=lambda x: pauli(*der(x)),
        second=lambda x: pauli(*sec(x)),
        domain=domain(f, p),
        scale=length_scale(f, p),
        label=label,
    )


def _raw_constant(f: FamilyId, p: Params) -> float:
    k, w, lam = p.kappa, p.omega, p.lam
    if f is F.F0_oscillator:
        return p.mu**2 - w
    if f in (F.F1_coulomb_like, F.F6_extended):
        return w**2 / (2 * k + 1) ** 2
    if f in _EXP_TYPE:
        return lam**2 * (k**2 + w**2 / k**2)
    if f is F.F3_trig_rm_like:
        return lam**2 * (w**2 / k**2 - k**2)
    raise ParamError(f"{f} has no factorization constant")


def _check_branch(f: FamilyId, b: Branch) -> None:
    if b is Branch.MuBranch and f not in DUAL_FAMILIES:
        raise BranchError(f"{f} has no mu-branch")


def _branch_params(f: FamilyId, b: Branch, p: Params) -> Params:
    _check_branch(f, b)
    return dual_transform(p) if b is Branch.MuBranch else p


def superpotential(f: FamilyId, b: Branch, p: Params) -> MatrixFunction:
    """W for the kappa-branch, or the alternative W~ for the mu-branch.

    The alternative superpotential is the kappa-branch formula evaluated at
    the dual parameters; it generates the same potential.
    """
    f, b = parse_family(f), parse_branch(b)
    validate_params(f, p)
    if f in SCALAR_FAMILIES:
        raise ParamError(f"{f} is a scalar reference and has no superpotential")
    return _raw_superpotential(f, _branch_params(f, b, p), f"W[{f},{b}]")


def superpotential_unchecked(f: FamilyId, b: Branch, p: Params) -> MatrixFunction:
    """Like superpotential but skips parameter validation (shifted chains need it)."""
    return _raw_superpotential(f, _branch_params(f, b, p), f"W[{f},{b}]")


def _potential_from_w(f: FamilyId, p: Params) -> MatrixFunction:
    k, m, w, lam, c = p.kappa, p.mu, p.omega, p.lam, p.c_ext

    if f is F.F0_oscillator:
        def val(x):
            return pauli(w**2 * x**2, 0.0, 2 * w * m * x)
    elif f is F.F1_coulomb_like:
        def val(x):
            return pauli((m * (m + 1) + k**2) / x**2, -w / x, -k * (2 * m + 1) / x**2)
    elif f is F.F2_morse_like:
        def val(x):
            e = np.exp(-lam * x)
            return lam**2 * pauli(m**2 * e**2, -(2 * k - 1) * m * e, 2 * w + _zero_like(x))
    elif f is F.F3_trig_rm_like:
        def val(x):
            t = lam * x
            s = 1 / np.cos(t)
            return lam**2 * pauli((k * (k - 1) + m**2) * s**2, 2 * w * np.tan(t),
                                  m * (2 * k - 1) * s * np.tan(t))
    elif f is F.F4_eckart_like:
        def val(x):
            t = lam * x
            cs, ct = 1 / np.sinh(t), 1 / np.tanh(t)
            return lam**2 * pauli((k * (k - 1) + m**2) * cs**2, 2 * w * ct,
                                  m * (1 - 2 * k) * ct * cs)
    elif f is F.F5_hyp_rm_like:
        def val(x):
            t = lam * x
            sh, th = 1 / np.cosh(t), np.tanh(t)
            return lam**2 * pauli((m**2 - k * (k - 1)) * sh**2, -m * (2 * k - 1) * sh * th,
                                  2 * w * th)
    elif f is F.F6_extended:
        def val(x):
            den = (x**2 - c**2) ** 2
            return pauli((4 * k**2 - 1) * (x**2 + c**2) / (4 * den), w * x / (c**2 - x**2),
                         -(4 * k**2 - 1) * 2 * c * x / (4 * den))
    else:
        raise AssertionError(f)

    # V' = W W' + W' W - W'' from the kappa-branch superpotential
    wf = _raw_superpotential(f, p, "")

    def der(x):
        wv, wd, ws = wf(x), wf.d(x), wf.second(x)
        return wv @ wd + wd @ wv - ws

    return MatrixFunction(value=val, derivative=der, domain=domain(f, p),
                          scale=length_scale(f, p), label=f"V[{f}]")


def _scalar_potential(f: FamilyId, p: Params) -> MatrixFunction:
    r, w, lam = p.kappa, p.omega, p.lam
    if f is F.S1_coulomb_scalar:
        ll = (r - 0.5) * (r + 0.5)  # l(l+1) with l = kappa - 1/2

        def val(x):
            return pauli(ll / x**2, 0.0, -w / x)

        def der(x):
            return pauli(-2 * ll / x**3, 0.0, w / x**2)
    else:
        rr = r * (r - 1)
        if f is F.S2_trig_rm_scalar:
            def base(t):
                s = 1 / np.cos(t)
                return s**2, np.tan(t), 2 * s**2 * np.tan(t), s**2
        elif f is F.S3_eckart_scalar:
            def base(t):
                cs = 1 / np.sinh(t)
                return cs**2, 1 / np.tanh(t), -2 * cs**2 / np.tanh(t), -(cs**2)
        else:
            def base(t):
                sh = 1 / np.cosh(t)
                return sh**2, np.tanh(t), -2 * sh**2 * np.tanh(t), sh**2

        def val(x):
            g, h, _, _ = base(lam * x)
            return lam**2 * pauli(rr * g, 0.0, 2 * w * h)

        def der(x):
            _, _, dg, dh = base(lam * x)
            return lam**3 * pauli(rr * dg, 0.0, 2 * w * dh)
    return MatrixFunction(value=val, derivative=der, domain=domain(f, p),
                          scale=length_scale(f, p), scalar=True, label=f"V[{f}]")


def potential(f: FamilyId, p: Params) -> MatrixFunction:
    """Constant-free potential V-hat; scalar references come back diagonal with scalar=True.

    Channel 0 of a scalar reference carries the attractive sign of the odd term.
    """
    f = parse_family(f)
    validate_params(f, p)
    if f in SCALAR_FAMILIES:
        return _scalar_potential(f, p)
    return _potential_from_w(f, p)


def potential_unchecked(f: FamilyId, p: Params) -> MatrixFunction:
    return _scalar_potential(f, p) if f in SCALAR_FAMILIES else _potential_from_w(f, p)


# ---------------------------------------------------------------------------
# Constants, branches and level counts
# ---------------------------------------------------------------------------

def factorization_constant(f: FamilyId, b: Branch, p: Params) -> float:
    """c with W^2 - W' = V-hat + c I. Mu-branch values are the kappa formula at dual parameters."""
    f, b = parse_family(f), parse_branch(b)
    validate_params(f, p)
    return _raw_constant(f, _branch_params(f, b, p))


def constant_unchecked(f: FamilyId, b: Branch, p: Params) -> float:
    return _raw_constant(f, _branch_params(f, b, p))


def printed_mu_constant(f: FamilyId, p: Params) -> float | None:
    """The mu-branch constant with the sign assignment as printed in the source tables.

    Returned for reports only: '+' for the trigonometric family, '-' for the
    Eckart-like one. Extraction shows the opposite signs are correct.
    """
    q = 2 * p.mu + 1
    if f is F.F1_coulomb_like:
        return p.omega**2 / (4 * (p.mu + 1) ** 2)
    if f is F.F3_trig_rm_like:
        return p.lam**2 * (q**2 / 4 + 4 * p.omega**2 / q**2)
    if f is F.F4_eckart_like:
        return p.lam**2 * (q**2 / 4 - 4 * p.omega**2 / q**2)
    return None


def extract_constant(W: MatrixFunction, Vhat: MatrixFunction, samples: int = 50,
                     tol: float = 1e-8) -> float:
    """Empirical c from R(x) = W^2 - W' - V-hat; raises NonConstantResidual unless R = c I."""
    if W.domain != Vhat.domain:
        raise NonConstantResidual("W and V-hat live on different domains")
    x = sample_points(W, samples)
    wv = W(x)
    r = wv @ wv - W.d(x) - Vhat(x)
    off = np.max(np.abs(r[:, 0, 1]))
    diag = np.concatenate([r[:, 0, 0], r[:, 1, 1]])
    spread = float(np.max(diag) - np.min(diag))
    if off > tol or spread > tol:
        raise NonConstantResidual(
            f"residual is not a multiple of identity (spread {spread:.3g}, off-diagonal {off:.3g})")
    return float(np.mean(diag))


def _kappa_available(f: FamilyId, p: Params) -> bool:
    k, m, w = p.kappa, p.mu, p.omega
    if f is F.F1_coulomb_like:
        return k - m > 0 and k > 0
    if f in (F.F2_morse_like, F.F5_hyp_rm_like):
        return k < 0 and k * k > w
    if f is F.F3_trig_rm_like:
        return k - m > 0 and k + m > 0
    if f is F.F4_eckart_like:
        return k - m > 0 and k < 0 and k * k > w
    return f in (F.F0_oscillator, F.F6_extended) or f in SCALAR_FAMILIES


def _mu_available(f: FamilyId, p: Params) -> bool:
    k, m = p.kappa, p.mu
    if f is F.F1_coulomb_like:
        return (k >= 0 and k - m < 1) or (k < 0 and k + m > 1)
    if f is F.F3_trig_rm_like:
        return k + m > 0 and k - m < 1
    if f is F.F4_eckart_like:
        # kappa-branch rule at the dual parameters: mu < -1/2, (2mu+1)^2 > 4 omega, kappa - mu < 1
        return _kappa_available(f, dual_transform(p))
    return False


def branch_availability(f: FamilyId, p: Params) -> set[Branch]:
    """Branches with at least one normalizable ground state."""
    f = parse_family(f)
    validate_params(f, p)
    out = set()
    if _kappa_available(f, p):
        out.add(Branch.KappaBranch)
    if f in DUAL_FAMILIES and _mu_available(f, p):
        out.add(Branch.MuBranch)
    return out


def require_branch(f: FamilyId, b: Branch, p: Params) -> None:
    if b not in branch_availability(f, p):
        raise BranchError(f"{b} is not available for {f} at {p.as_dict()}")


def _count_below(bound: float) -> int:
    return 0 if bound <= 0 else int(math.ceil(bound))


def admissible_levels(f: FamilyId, b: Branch, p: Params) -> float:
    """Number of bound levels in the branch; math.inf when unbounded."""
    f, b = parse_family(f), parse_branch(b)
    require_branch(f, b, p)
    if f in (F.F2_morse_like, F.F5_hyp_rm_like):
        return _count_below(abs(p.kappa) - math.sqrt(p.omega))
    if f is F.F4_eckart_like:
        if b is Branch.KappaBranch:
            return _count_below(abs(p.kappa) - math.sqrt(p.omega))
        return _count_below(abs(p.mu) - math.sqrt(p.omega) - 0.5)
    return math.inf


def realized_branch(f: FamilyId, p: Params) -> Branch | None:
    """Branch whose levels a Dirichlet (Friedrichs) discretization reproduces.

    At the singular wall the two branches share one local exponent and differ
    in the other (kappa - mu versus 1 - (kappa - mu)); the Dirichlet problem
    keeps the one above 1/2.
    """
    avail = branch_availability(f, p)
    if f in DUAL_FAMILIES and Branch.MuBranch in avail:
        if Branch.KappaBranch in avail and p.kappa - p.mu > 0.5:
            return Branch.KappaBranch
        return Branch.MuBranch
    return Branch.KappaBranch if Branch.KappaBranch in avail else None


def spectral_parameter(b: Branch, p: Params, n: int) -> float:
    return n + p.kappa if b is Branch.KappaBranch else n + p.mu + 0.5


def level_energy(f: FamilyId, b: Branch, p: Params, n: int) -> float:
    """Energy of level n: -c at the shifted parameters (oscillator: 2 omega n - c)."""
    if f is F.F0_oscillator:
        return 2 * p.omega * n - _raw_constant(f, p)
    return -constant_unchecked(f, b, shift_params(p, b, n))


def shape_invariance_constant(f: FamilyId, b: Branch, p: Params) -> float:
    """The constant C in W_q^2 + W_q' = W_{q+1}^2 - W_{q+1}' + C."""
    if f is F.F0_oscillator:
        return 2 * p.omega
    return constant_unchecked(f, b, p) - constant_unchecked(f, b, shift_params(p, b, 1))


def continuum_edge(Vhat: MatrixFunction) -> float:
    """Smallest asymptotic eigenvalue of V-hat over the infinite ends (inf if none)."""
    lo, hi = Vhat.domain
    edge = math.inf
    for end, sign in ((lo, -1.0), (hi, 1.0)):
        if math.isinf(end):
            x = np.array([sign * 1e8 * Vhat.scale])
            with np.errstate(all="ignore"):
                m = Vhat(x)[0]
            if np.all(np.isfinite(m)):
                edge = min(edge, float(np.min(np.linalg.eigvalsh(m))))
    return edge


def parameter_rules() -> dict[str, str]:
    """Human-readable parameter conventions, used by the CLI listing."""
    return {
        "F0_oscillator": "W = omega x I + mu sigma3; omega > 0",
        "F1_coulomb_like": "domain (0, inf); mu > -1/2, omega > 0, 2 kappa + 1 != 0",
        "F2_morse_like": "domain R; mu > 0, omega > 0, kappa != 0",
        "F3_trig_rm_like": "domain |lambda x| < pi/2; mu > 0, omega > 0, kappa != 0",
        "F4_eckart_like": "domain (0, inf); mu < 0, omega > 0, kappa != 0",
        "F5_hyp_rm_like": "domain R; mu > 0, omega > 0, kappa != 0",
        "F6_extended": "domain (-c, c); c > 0, omega > 0, 2 kappa + 1 != 0",
        "S1_coulomb_scalar": "l(l+1)/x^2 -/+ omega/x with l = kappa - 1/2",
        "S2_trig_rm_scalar": "lambda^2 (r(r-1) sec^2 +/- 2 omega tan), r in the kappa slot",
        "S3_eckart_scalar": "lambda^2 (r(r-1) csch^2 +/- 2 omega coth), r in the kappa slot",
        "S4_hyp_rm_scalar": "lambda^2 (r(r-1) sech^2 +/- 2 omega tanh), r in the kappa slot",
    }


_SAMPLE_BOXES = {
    F.F0_oscillator: dict(kappa=(0.0, 0.0), mu=(-2.0, 2.0), omega=(0.2, 3.0)),
    F.F1_coulomb_like: dict(kappa=(0.05, 4.0), mu=(-0.45, 3.0), omega=(0.2, 3.0)),
    F.F2_morse_like: dict(kappa=(-5.0, -0.3), mu=(0.2, 3.0), omega=(0.05, 3.0), lam=(0.5, 2.0)),
    F.F3_trig_rm_like: dict(kappa=(0.1, 4.0), mu=(0.05, 3.0), omega=(0.1, 3.0), lam=(0.5, 2.0)),
    F.F4_eckart_like: dict(kappa=(-5.0, -0.2), mu=(-5.0, -0.05), omega=(0.05, 3.0), lam=(0.5, 2.0)),
    F.F5_hyp_rm_like: dict(kappa=(-5.0, -0.3), mu=(0.05, 3.0), omega=(0.05, 3.0), lam=(0.5, 2.0)),
    F.F6_extended: dict(kappa=(0.05, 3.0), mu=(0.0, 0.0), omega=(0.2, 3.0), c=(0.5, 3.0)),
}


def sample_params(f: FamilyId, b: Branch, rng: np.random.Generator, tries: int = 10000) -> Params:
    """Rejection-sample parameters for which branch b is available (F0/F6: just valid)."""
    f, b = parse_family(f), parse_branch(b)
    box = _SAMPLE_BOXES.get(f)
    if box is None:
        raise ParamError(f"no sampling box for {f}")
    for _ in range(tries):
        v = {k: float(rng.uniform(*box[k])) for k in box}
        p = Params(v["kappa"], v["mu"], v["omega"], v.get("lam", 1.0), v.get("c"))
        try:
            validate_params(f, p)
        except ParamError:
            continue
        if f in (F.F0_oscillator, F.F6_extended):
            if b is Branch.KappaBranch:
                return p
            raise BranchError(f"{f} has no mu-branch")
        if b in branch_availability(f, p):
            return p
    raise ParamError(f"could not sample valid parameters for {f} {b}")
