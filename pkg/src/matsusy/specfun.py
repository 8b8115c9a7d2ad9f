"""Modified Bessel functions, Gauss hypergeometric function and complex log-gamma.

Everything here is written from scratch on top of ``math``/``numpy`` so the
closed-form ground states do not depend on a third-party special-function
library; the tests compare against quadrature and extended-precision oracles.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

_EPS = 1e-17
_MAX_TERMS = 10_000
_TINY = 1e-300
_CF_EPS = 2e-16  # continued fractions stall at machine precision

# Taylor coefficients of 1/Gamma(z) about z = 0 (c_1 = 1, c_2 = Euler's gamma, ...).
_RGAMMA_TAYLOR = (
    0.0,
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
)


# ---------------------------------------------------------------------------
# Bessel K and I
# ---------------------------------------------------------------------------

def _temme_gammas(mu: float) -> tuple[float, float, float, float]:
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2."""
    even = 0.0  # sum over even-index coefficients -> gam1
    odd = 0.0  # odd-index coefficients -> gam2
    mu2 = mu * mu
    p = 1.0
    for k in range(1, len(_RGAMMA_TAYLOR), 2):
        odd += _RGAMMA_TAYLOR[k] * p
        if k + 1 < len(_RGAMMA_TAYLOR):
            even += _RGAMMA_TAYLOR[k + 1] * p
        p *= mu2
    gam1 = -even
    gam2 = odd
    gampl = gam2 - mu * gam1  # 1/Gamma(1+mu)
    gammi = gam2 + mu * gam1  # 1/Gamma(1-mu)
    return gam1, gam2, gampl, gammi


def _k_small(mu: float, x: float) -> tuple[float, float]:
    """Temme series: K_mu(x), K_{mu+1}(x) for |mu| <= 1/2, x <= 2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-16 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < 1e-16 else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAX_TERMS):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            return total, total1 * 2.0 / x
    raise ConvergenceError("Temme series for K did not converge")


def _k_cf(mu: float, x: float) -> tuple[float, float]:
    """Steed/Temme continued fraction: K_mu(x), K_{mu+1}(x) for 2 < x <= 30."""
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_TERMS):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _CF_EPS:
            break
    else:
        raise ConvergenceError("continued fraction for K did not converge")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def _k_asymptotic_single(nu: float, x: float) -> float:
    four_nu2 = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 200):
        new = term * (four_nu2 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(new) > abs(term):  # asymptotic series started to diverge
            break
        term = new
        total += term
        if abs(term) < _EPS * abs(total):
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


def _k_large(mu: float, x: float) -> tuple[float, float]:
    return _k_asymptotic_single(mu, x), _k_asymptotic_single(mu + 1.0, x)


def _k_base(mu: float, x: float) -> tuple[float, float]:
    if x <= 2.0:
        return _k_small(mu, x)
    if x <= 30.0:
        return _k_cf(mu, x)
    return _k_large(mu, x)


def _check_arg(x: float) -> None:
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"Bessel K needs a positive finite argument, got {x!r}")
    if x < _TINY:
        raise DomainError(f"argument {x!r} below 1e-300 overflows K")


def _bessel_k_scalar(nu: float, x: float) -> tuple[float, float]:
    """(K_nu(x), K'_nu(x)) for scalar nu, x."""
    _check_arg(x)
    if not math.isfinite(nu):
        raise DomainError("order must be finite")
    nu = abs(nu)
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu, k1 = _k_base(mu, x)
    xi2 = 2.0 / x
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * xi2 * k1 + kmu
    return kmu, nu / x * kmu - k1


def _bessel_i_scalar(nu: float, x: float) -> float:
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"Bessel I needs a non-negative argument, got {x!r}")
    if not math.isfinite(nu):
        raise DomainError("order must be finite")
    if nu < 0.0:
        if x == 0.0:
            if float(nu).is_integer():
                return 0.0
            raise DomainError("I of negative non-integer order diverges at 0")
        kv, _ = _bessel_k_scalar(-nu, x)
        return _bessel_i_scalar(-nu, x) + 2.0 / math.pi * math.sin(-nu * math.pi) * kv
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x < _TINY:
        raise DomainError("argument below 1e-300")
    nl = int(nu + 0.5)
    mu = nu - nl
    xi = 1.0 / x
    xi2 = 2.0 * xi
    # CF1 for I'_nu / I_nu (modified Lentz).
    h = max(nu * xi, 1e-30)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(_MAX_TERMS + int(2 * x)):
        b += xi2
        d = 1.0 / (b + d)
        c = b + 1.0 / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    else:
        raise ConvergenceError("CF1 for I did not converge")
    ril = 1e-30
    ripl = h * ril
    ril1, rip1 = ril, ripl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        ritemp = fact * ril + ripl
        fact -= xi
        ripl = fact * ritemp + ril
        ril = ritemp
    f = ripl / ril
    kmu, k1 = _k_base(mu, x)
    kmup = mu * xi * kmu - k1
    rimu = xi / (f * kmu - kmup)  # Wronskian
    return rimu * ril1 / ril


_k_ufunc = np.frompyfunc(_bessel_k_scalar, 2, 2)
_i_ufunc = np.frompyfunc(_bessel_i_scalar, 2, 1)


def bessel_k_with_derivative(order, arg):
    """Return (K_order(arg), d/darg K_order(arg)); broadcasts over arrays."""
    if np.ndim(order) == 0 and np.ndim(arg) == 0:
        return _bessel_k_scalar(float(order), float(arg))
    k, dk = _k_ufunc(np.asarray(order, float), np.asarray(arg, float))
    return k.astype(float), dk.astype(float)


def bessel_k(order, arg):
    """Modified Bessel function of the second kind K_order(arg), real order, arg > 0."""
    return bessel_k_with_derivative(order, arg)[0]


def bessel_i(order, arg):
    """Modified Bessel function of the first kind I_order(arg), arg >= 0."""
    if np.ndim(order) == 0 and np.ndim(arg) == 0:
        return _bessel_i_scalar(float(order), float(arg))
    return _i_ufunc(np.asarray(order, float), np.asarray(arg, float)).astype(float)


# ---------------------------------------------------------------------------
# log Gamma
# ---------------------------------------------------------------------------

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
)


def _loggamma(z: complex) -> complex:
    if z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer():
        raise DomainError(f"log Gamma has a pole at {z.real}")
    shift = 0j
    while z.real < 15.0 or abs(z) < 15.0:
        shift += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0j
    p = inv
    for coef in _STIRLING:
        series += coef * p
        p *= inv2
    return (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2.0 * math.pi) + series - shift


def complex_loggamma(z_re: float, z_im: float) -> tuple[float, float]:
    """Principal log Gamma(z): analytic continuation from the positive real axis.

    Returned as (real part, imaginary part).
    """
    w = _loggamma(complex(z_re, z_im))
    return w.real, w.imag


def _rgamma_real(x: float) -> float:
    """1/Gamma(x) for real x, exactly zero at the poles."""
    if x <= 0.0 and float(x).is_integer():
        return 0.0
    lg, im = complex_loggamma(x, 0.0)
    # im is pi times the number of negative factors in the shift, giving the sign
    sign = -1.0 if int(round(im / math.pi)) % 2 else 1.0
    return sign * math.exp(-lg)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypParams:
    """Upper parameters a, b and lower parameter c of 2F1.

    Conjugate mode (default): a = a_re + i a_im and b is its conjugate.
    Real-pair mode: pass ``b_re``; then a_im must be zero and a, b are real.
    """

    a_re: float
    a_im: float
    c: float
    b_re: float | None = None

    def __post_init__(self):
        if self.b_re is not None and self.a_im != 0.0:
            raise DomainError("real-pair mode needs a_im = 0")
        if self.c <= 0.0 and float(self.c).is_integer():
            raise DomainError(f"c = {self.c} is a non-positive integer")

    @classmethod
    def real(cls, a: float, b: float, c: float) -> "HypParams":
        return cls(float(a), 0.0, float(c), float(b))

    @classmethod
    def conjugate(cls, a_re: float, a_im: float, c: float) -> "HypParams":
        return cls(float(a_re), float(a_im), float(c))

    @property
    def is_conjugate(self) -> bool:
        return self.b_re is None

    @property
    def a(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def b(self) -> complex:
        return complex(self.a_re, -self.a_im) if self.b_re is None else complex(self.b_re, 0.0)

    def shifted(self, da: float, dc: float) -> "HypParams":
        """Parameters (a+da, b+da; c+dc)."""
        if self.b_re is None:
            return HypParams(self.a_re + da, self.a_im, self.c + dc)
        return HypParams(self.a_re + da, 0.0, self.c + dc, self.b_re + da)

    def _with_c(self, c: float) -> "HypParams":
        return HypParams(self.a_re, self.a_im, c, self.b_re)


def _upper_product(p: HypParams, k: float) -> float:
    """(a+k)(b+k), real in both modes."""
    if p.b_re is None:
        return (p.a_re + k) ** 2 + p.a_im**2
    return (p.a_re + k) * (p.b_re + k)


def _terminating(p: HypParams) -> bool:
    def nonpos_int(v):
        return v <= 0.0 and float(v).is_integer()

    if p.b_re is None:
        return p.a_im == 0.0 and nonpos_int(p.a_re)
    return nonpos_int(p.a_re) or nonpos_int(p.b_re)


def _direct_series(p: HypParams, y: np.ndarray) -> np.ndarray:
    """Vectorized power series in y (real arithmetic in both modes)."""
    y = np.asarray(y, float)
    total = np.ones_like(y)
    term = np.ones_like(y)
    active = y != 0.0
    for k in range(_MAX_TERMS):
        ratio = _upper_product(p, k) / ((p.c + k) * (k + 1.0))
        term = np.where(active, term * ratio * y, 0.0)
        total = total + term
        small = np.abs(term) <= _EPS * np.abs(total)
        # once the ratio has dropped below 1 the remaining tail keeps shrinking
        settled = abs(ratio) * np.abs(y) < 1.0
        active &= ~(small & settled)
        if ratio == 0.0 or not active.any():
            return total
    raise ConvergenceError("2F1 series did not converge within 10000 terms")


def _connection(p: HypParams, y: np.ndarray, t: np.ndarray, sigma: float = 0.0) -> np.ndarray:
    """Linear transformation to argument 1-y (c-a-b must not be an integer), times t^sigma."""
    c = p.c
    s = c - 2.0 * p.a_re if p.b_re is None else c - p.a_re - p.b_re  # c - a - b
    gc = 1.0 / _rgamma_real(c)
    if p.b_re is None:
        # Gamma(c-a)Gamma(c-b) = |Gamma(c-a)|^2, Gamma(a)Gamma(b) = |Gamma(a)|^2
        r_cab = math.exp(-2.0 * complex_loggamma(c - p.a_re, -p.a_im)[0])
        r_ab = 0.0 if _terminating(p) else math.exp(-2.0 * complex_loggamma(p.a_re, p.a_im)[0])
        first = HypParams(p.a_re, p.a_im, 1.0 - s)
        second = HypParams(c - p.a_re, -p.a_im, 1.0 + s)
    else:
        r_cab = _rgamma_real(c - p.a_re) * _rgamma_real(c - p.b_re)
        r_ab = _rgamma_real(p.a_re) * _rgamma_real(p.b_re)
        first = HypParams.real(p.a_re, p.b_re, 1.0 - s)
        second = HypParams.real(c - p.a_re, c - p.b_re, 1.0 + s)
    coef_a = gc * r_cab / _rgamma_real(s)
    coef_b = gc * r_ab / _rgamma_real(-s)
    out = coef_a * (t**sigma if sigma else 1.0) * _direct_series(first, t)
    if coef_b != 0.0:
        out = out + coef_b * t ** (s + sigma) * _direct_series(second, t)
    return out


def _near_one(p: HypParams, y: np.ndarray, t: np.ndarray, sigma: float = 0.0) -> np.ndarray:
    s = p.c - 2.0 * p.a_re if p.b_re is None else p.c - p.a_re - p.b_re
    if abs(s - round(s)) > 1e-6:
        return _connection(p, y, t, sigma)
    # Integer c-a-b: the two terms of the connection formula have cancelling
    # poles. Average over c +/- delta (error O(delta^2)) and Richardson
    # extrapolate over two step sizes to remove the leading term.
    def sym(delta):
        lo = _connection(p._with_c(p.c - delta), y, t, sigma)
        hi = _connection(p._with_c(p.c + delta), y, t, sigma)
        return 0.5 * (lo + hi)

    # the neglected terms scale like (delta * log t)^4, so shrink delta for tiny t
    log_t = float(np.max(np.abs(np.log(t)))) if np.size(t) else 0.0
    delta = min(1e-4, 3e-3 / max(1.0, log_t)) + abs(s - round(s))
    return (4.0 * sym(delta) - sym(2.0 * delta)) / 3.0


def growth_exponent(p: HypParams) -> float:
    """sigma = max(0, a + b - c): 2F1 grows like (1 - y)^-sigma as y -> 1 (0 for polynomials)."""
    if _terminating(p):
        return 0.0
    s = p.c - 2.0 * p.a_re if p.b_re is None else p.c - p.a_re - p.b_re
    return max(0.0, -s)


def gauss_2f1(p: HypParams, y, one_minus_y=None, *, growth_scaled: bool = False):
    """2F1(a, b; c; y) for real y in [0, 1).

    Direct series up to y = 0.95; beyond that the connection formula to
    argument 1 - y. Pass ``one_minus_y`` when it is known more accurately than
    ``1 - y`` (arguments within rounding distance of 1). Arrays broadcast.
    With ``growth_scaled`` the result is multiplied by (1 - y)^sigma
    (see growth_exponent), which stays finite where 2F1 itself overflows.
    """
    arr = np.asarray(y, float)
    if one_minus_y is None:
        tarr = 1.0 - arr
    else:
        tarr = np.broadcast_to(np.asarray(one_minus_y, float), arr.shape)
    if (np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(tarr <= 0.0)
            or np.any(tarr > 1.0)):
        raise DomainError("2F1 argument must lie in [0, 1)")
    flat = arr.reshape(-1)
    tflat = tarr.reshape(-1)
    out = np.empty_like(flat)
    near = flat > 0.95
    if _terminating(p):
        near[:] = False
    sigma = growth_exponent(p) if growth_scaled else 0.0
    if (~near).any():
        out[~near] = _direct_series(p, flat[~near])
        if sigma:
            out[~near] *= tflat[~near] ** sigma
    if near.any():
        out[near] = _near_one(p, flat[near], tflat[near], sigma)
    out = out.reshape(arr.shape)
    return float(out) if np.ndim(y) == 0 else out


def gauss_2f1_at_one(p: HypParams) -> float:
    """Gauss summation Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b)); needs c-a-b > 0."""
    s = p.c - 2.0 * p.a_re if p.b_re is None else p.c - p.a_re - p.b_re
    if s <= 0.0:
        raise DomainError("Gauss summation needs c - a - b > 0")
    if p.b_re is None:
        log_den = 2.0 * complex_loggamma(p.c - p.a_re, -p.a_im)[0]
        return math.exp(-log_den) / (_rgamma_real(p.c) * _rgamma_real(s))
    return _rgamma_real(p.c - p.a_re) * _rgamma_real(p.c - p.b_re) / (
        _rgamma_real(p.c) * _rgamma_real(s)
    )
