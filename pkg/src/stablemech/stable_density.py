"""Stable densities: Mellin transform, numerical inversion, Fox H / Meijer G data.

The Mellin transform

    M(s | alpha, rho) = Gamma(s-1) Gamma(1 + 1/alpha - s/alpha)
                        / (Gamma(rho s - rho) Gamma(1 + rho - rho s))

is that of the *unit* strictly stable law with positivity parameter rho,
whose log characteristic function is ``-|y|^alpha exp(-i pi alpha (rho - 1/2) sgn y)``.
:func:`unit_law` builds it and :func:`unit_scale` expresses any strictly
stable :class:`StableLaw1D` as ``shift + scale * unit law``.

Densities are computed by Fourier inversion of the closed-form
characteristic function (QUADPACK Fourier-weighted quadrature up to the point
where |CF| drops below e^-45); far in the tails, where oscillatory quadrature loses accuracy, the
classical convergent/asymptotic power series of the stable tail is used.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np
from scipy import integrate, optimize, special

from . import stable1d
from .errors import (
    AlphaEqualsOne,
    InadmissibleRho,
    InvalidParameter,
    InversionFailure,
    NotCoprime,
    PoleError,
)
from .stable1d import StableLaw1D

__all__ = [
    "MellinSpec",
    "FoxHParams",
    "MeijerGParams",
    "InversionSettings",
    "mellin_value",
    "fox_params",
    "fox_mellin",
    "meijer_reduction",
    "unit_law",
    "unit_scale",
    "density",
    "cdf",
    "quantile",
    "total_mass",
    "mellin_numeric",
]


@dataclass(frozen=True)
class MellinSpec:
    alpha: float
    rho: float

    def __post_init__(self):
        lo, hi = stable1d.admissible_rho(float(self.alpha))
        if not lo - 1e-15 <= float(self.rho) <= hi + 1e-15:
            raise InadmissibleRho(f"rho={self.rho} outside [{lo}, {hi}] for alpha={self.alpha}")


def _mellin_raw(alpha: float, rho: float, s: complex) -> complex:
    # Gamma(s-1)/Gamma(rho(s-1)) = rho Gamma(s)/Gamma(1+rho(s-1)) removes the s = 1 pole pair
    num = special.gamma(s) * special.gamma(1.0 + (1.0 - s) / alpha)
    den = special.rgamma(1.0 + rho * (s - 1.0)) * special.rgamma(1.0 + rho * (1.0 - s))
    return rho * num * den


def mellin_value(spec: MellinSpec, s) -> complex:
    """``M(s | alpha, rho)``; removable points are resolved by a symmetric limit.

    Raises PoleError where a numerator Gamma pole is not cancelled, e.g. at
    ``s = 1 + alpha`` (moment of order alpha).
    """
    alpha, rho = float(spec.alpha), float(spec.rho)
    s = complex(s)
    val = _mellin_raw(alpha, rho, s)
    if cmath.isfinite(val) and not (val != val):
        return complex(val)
    eps = 1e-7
    up, down = _mellin_raw(alpha, rho, s + 1j * eps), _mellin_raw(alpha, rho, s - 1j * eps)
    if cmath.isfinite(up) and cmath.isfinite(down) and abs(up) < 1e6 and abs(down) < 1e6:
        return complex(0.5 * (up + down))
    raise PoleError(f"M(s | {alpha}, {rho}) has a pole at s = {s}")


# ---------------------------------------------------------------------------
# Fox H and Meijer G parameter blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoxHParams:
    """Parameters of ``H^{m n}_{p q}[x | (a_j, A_j); (b_j, B_j)]``."""

    upper: tuple[tuple, tuple]
    lower: tuple[tuple, tuple]
    orders: tuple[int, int, int, int] = (1, 1, 2, 2)


def fox_params(alpha, rho) -> FoxHParams:
    """H^{11}_{22} block of the stable density; Fractions in, Fractions out."""
    MellinSpec(float(alpha), float(rho))
    inv = 1 / alpha if isinstance(alpha, Fraction) else 1.0 / alpha
    return FoxHParams(upper=((-inv, inv), (-rho, rho)), lower=((-1, 1), (-rho, rho)))


def fox_mellin(params: FoxHParams, s) -> complex:
    """Mellin transform of the H function with ``params`` at ``s``.

    ``prod_{j<=m} G(b_j + B_j s) prod_{j<=n} G(1 - a_j - A_j s)
      / (prod_{j>n} G(a_j + A_j s) prod_{j>m} G(1 - b_j - B_j s))``
    """
    m, n, p, q = params.orders
    s = complex(s)
    val = 1.0 + 0j
    for j, (b, B) in enumerate(params.lower):
        b, B = float(b), float(B)
        val *= special.gamma(b + B * s) if j < m else special.rgamma(1 - b - B * s)
    for j, (a, A) in enumerate(params.upper):
        a, A = float(a), float(A)
        val *= special.gamma(1 - a - A * s) if j < n else special.rgamma(a + A * s)
    return complex(val)


@dataclass(frozen=True)
class MeijerGParams:
    """Meijer G representation of the stable density for alpha = M/N, rho = L/M.

    ``g(x) = prefactor * x^-1 * G^{m n}_{p q}(arg_coeff * x^arg_power | upper; lower)``.
    """

    M: int
    N: int
    L: int
    orders: tuple[int, int, int, int]
    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    prefactor_exponent: Fraction  # power of 2 pi
    prefactor: float
    arg_power: int
    arg_coeff: Fraction
    ode_order: int

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.M, self.N)

    @property
    def rho(self) -> Fraction:
        return Fraction(self.L, self.M)


def meijer_reduction(M: int, N: int, L: int) -> MeijerGParams:
    if min(M, N, L) < 1 or any(int(v) != v for v in (M, N, L)):
        raise InvalidParameter("M, N, L must be positive integers")
    M, N, L = int(M), int(N), int(L)
    if gcd(M, N) != 1:
        raise NotCoprime(f"gcd({M}, {N}) = {gcd(M, N)}")
    alpha, rho = Fraction(M, N), Fraction(L, M)
    if not 0 < alpha <= 2:
        raise InvalidParameter(f"alpha = {alpha} outside (0, 2]")
    lo, hi = stable1d.admissible_rho(float(alpha))
    if not lo <= float(rho) <= hi:
        raise InadmissibleRho(f"rho = {rho} outside [{lo}, {hi}] for alpha = {alpha}")
    upper = tuple(Fraction(k, N) for k in range(1, N)) + tuple(Fraction(k, L) for k in range(1, L))
    lower = tuple(Fraction(k, M) for k in range(1, M)) + tuple(Fraction(k, L) for k in range(1, L))
    expo = L - Fraction(M + N, 2)
    return MeijerGParams(
        M=M, N=N, L=L,
        orders=(M - 1, L - 1, N + L - 2, M + L - 2),
        upper=upper,
        lower=lower,
        prefactor_exponent=expo,
        prefactor=(2 * math.pi) ** float(expo) * math.sqrt(M * N),
        arg_power=M,
        arg_coeff=Fraction(N ** N, M ** M),
        ode_order=max(M - 1, N - 1),
    )


# ---------------------------------------------------------------------------
# unit laws
# ---------------------------------------------------------------------------


def unit_law(alpha: float, rho: float) -> StableLaw1D:
    """Strictly stable law whose Mellin transform is exactly ``M(s | alpha, rho)``."""
    MellinSpec(alpha, rho)
    phase = math.pi * alpha * (rho - 0.5)
    if alpha == 2:
        return StableLaw1D(2.0, variance=2.0)
    if alpha == 1:
        # -|y| e^{-i phase sgn y}: Cauchy scale cos(phase), drift sin(phase)
        c = math.cos(phase) / math.pi
        return StableLaw1D(1.0, c, c, math.sin(phase))
    beta = stable1d.rho_to_beta(alpha, rho)
    return StableLaw1D.from_sigma_beta(alpha, math.cos(phase) ** (1.0 / alpha), beta)


def unit_scale(law: StableLaw1D) -> tuple[float, float, float]:
    """``(rho, scale, shift)`` with ``law = shift + scale * unit_law(alpha, rho)`` in distribution."""
    alpha = law.alpha
    if alpha == 1:
        if law.c1 != law.c2:
            raise AlphaEqualsOne("an asymmetric alpha = 1 law has no strictly stable form")
        sigma = law.sigma
        theta = 2.0 / math.pi * math.atan2(law.a, sigma)
        return 0.5 + 0.5 * theta, math.hypot(sigma, law.a), 0.0
    rho = stable1d.beta_to_rho(alpha, law.beta)
    scale = law.sigma * math.cos(math.pi * alpha * (rho - 0.5)) ** (-1.0 / alpha)
    return rho, scale, law.a


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InversionSettings:
    epsabs: float = 1e-13
    epsrel: float = 1e-10
    limit: int = 500
    # beyond this many scale units the tail series replaces quadrature
    tail_switch: float = 2000.0
    tail_terms: int = 60
    # tolerated |abserr| of an inversion integral (in standardized units)
    max_error: float = 1e-8

    def __post_init__(self):
        if min(self.epsabs, self.epsrel, self.tail_switch, self.max_error) <= 0:
            raise InvalidParameter("inversion tolerances must be positive")


DEFAULT_INVERSION = InversionSettings()


class _Standardized:
    """Characteristic function of ``(X - a) / sigma`` split into smooth parts."""

    def __init__(self, law: StableLaw1D):
        self.law = law
        self.sigma = law.sigma
        self.centered = StableLaw1D(law.alpha, law.c1, law.c2, 0.0,
                                    law.variance if law.alpha == 2 else None)

    @property
    def cutoff(self) -> float:
        # |phi(v)| = exp(-v^alpha) in standardized units; e^-45 is below double precision
        return 45.0 ** (1.0 / self.law.alpha)

    def psi(self, u: float) -> complex:
        return stable1d.log_cf(self.centered, u / self.sigma)

    def fc(self, u: float) -> float:
        p = self.psi(u)
        return math.exp(p.real) * math.cos(p.imag)

    def fs(self, u: float) -> float:
        p = self.psi(u)
        return math.exp(p.real) * math.sin(p.imag)


def _qawo(f, a, b, omega, weight, st: InversionSettings) -> float:
    """Fourier-weighted quadrature of f on the finite interval [a, b]."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, weight=weight, wvar=omega,
                                  epsabs=st.epsabs, epsrel=st.epsrel, limit=st.limit)[:2]
    if not math.isfinite(val) or err > st.max_error:
        raise InversionFailure(f"Fourier integral did not converge (error {err:.2g})")
    return val


def _plain(f, a, b, st: InversionSettings) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=st.epsabs, epsrel=st.epsrel, limit=st.limit)[:2]
    if not math.isfinite(val) or err > st.max_error:
        raise InversionFailure(f"integral over [{a}, {b}] did not converge (error {err:.2g})")
    return val


def _std_density(cf: _Standardized, u: float, st: InversionSettings) -> float:
    """Density of the standardized variable at u by Fourier inversion."""
    if u == 0.0:
        return _plain(cf.fc, 0.0, cf.cutoff, st) / math.pi
    w = abs(u)
    c = _qawo(cf.fc, 0.0, cf.cutoff, w, "cos", st)
    s = _qawo(cf.fs, 0.0, cf.cutoff, w, "sin", st)
    return (c + math.copysign(1.0, u) * s) / math.pi


def _series_terms(alpha: float, rho: float, n_max: int):
    """Coefficients ``(e_k, w_k)``: unit-law density ~ sum w_k x^(-e_k - 1) as x -> +inf."""
    out = []
    for k in range(1, n_max + 1):
        sn = math.sin(k * math.pi * alpha * rho)
        if abs(sn) < 1e-12:  # k alpha rho integer: exact zero, not rounding noise
            sn = 0.0
        w = ((-1) ** (k + 1) * math.exp(math.lgamma(k * alpha + 1) - math.lgamma(k + 1))
             * sn / math.pi)
        out.append((k * alpha, w))
    return out


def _series_sum(terms, x: float, integrate_from: float | None = None, power: float = 0.0) -> float:
    """Sum the tail series at x (or its integral of x^power over [x, inf)).

    Stops at the smallest term, the usual rule for asymptotic series.
    """
    total, last = 0.0, math.inf
    for e, w in terms:
        if w == 0.0:
            continue
        if integrate_from is None:
            t = w * x ** (-e - 1)
        else:
            t = w * x ** (power - e) / (e - power)
        if abs(t) > last:
            break
        total += t
        last = abs(t)
        if abs(t) < 1e-17 * abs(total):
            break
    return total


def _unit_tail_density(alpha, rho, u, st):
    if alpha == 2:
        return math.exp(-0.25 * u * u) / math.sqrt(4 * math.pi)
    r = rho if u > 0 else 1.0 - rho
    return _series_sum(_series_terms(alpha, r, st.tail_terms), abs(u))


def _unit_tail_prob(alpha, rho, u, st):
    """P(Z > u) for u > 0 large (Z the unit law with the given rho)."""
    if alpha == 2:
        return 0.5 * math.erfc(0.5 * u)
    return _series_sum(_series_terms(alpha, rho, st.tail_terms), u, integrate_from=u, power=0.0)


def _tail_params(law: StableLaw1D):
    """``(rho, scale, shift)`` if the tail series applies, else None."""
    if law.alpha == 1 and law.c1 != law.c2:
        return None
    return unit_scale(law)


def density(law: StableLaw1D, x, settings: InversionSettings = DEFAULT_INVERSION):
    """Density of ``law`` at ``x`` (scalar or array)."""
    xs = np.asarray(x, dtype=float)
    out = np.array([_density_scalar(law, float(v), settings) for v in xs.ravel()])
    return out.reshape(xs.shape) if xs.ndim else float(out[0])


def _density_scalar(law: StableLaw1D, x: float, st: InversionSettings) -> float:
    if not math.isfinite(x):
        raise InvalidParameter("x must be finite")
    side = stable1d.boundedness_side(law)
    if (side is stable1d.Boundedness.LEFT and x <= law.a) or (
            side is stable1d.Boundedness.RIGHT and x >= law.a):
        return 0.0
    tp = _tail_params(law)
    if tp is not None:
        rho, scale, shift = tp
        u = (x - shift) / scale
        if abs(u) > st.tail_switch:
            return max(_unit_tail_density(law.alpha, rho, u, st), 0.0) / scale
    cf = _Standardized(law)
    g = _std_density(cf, (x - law.a) / cf.sigma, st) / cf.sigma
    if g < -1e-9 / cf.sigma:
        raise InversionFailure(f"inverted density is negative ({g:.3g}) at x = {x}")
    return max(g, 0.0)


def _std_cdf(cf: _Standardized, u: float, st: InversionSettings) -> float:
    """Gil-Pelaez: F(u) = 1/2 - (1/pi) int_0^inf Im[e^{-iuv} phi(v)] / v dv."""
    def fs_over(v):
        return cf.fs(v) / v if v > 0 else 0.0

    # odd part is always present: int fs(v)/v cos(uv) dv
    if u == 0.0:
        odd = _plain(fs_over, 0.0, 1.0, st) + _plain(fs_over, 1.0, cf.cutoff, st)
        return 0.5 - odd / math.pi
    w = abs(u)
    v0 = min(1.0, 1.0 / w)
    odd = (_plain(lambda v: fs_over(v) * math.cos(w * v), 0.0, v0, st)
           + _qawo(fs_over, v0, cf.cutoff, w, "cos", st))
    even = (_plain(lambda v: cf.fc(v) * (math.sin(w * v) / v if v > 0 else w), 0.0, v0, st)
            + _qawo(lambda v: cf.fc(v) / v, v0, cf.cutoff, w, "sin", st))
    sign = 1.0 if u > 0 else -1.0
    return 0.5 - (odd - sign * even) / math.pi


def cdf(law: StableLaw1D, x, settings: InversionSettings = DEFAULT_INVERSION):
    """Distribution function of ``law`` at ``x`` (scalar or array)."""
    xs = np.asarray(x, dtype=float)
    out = np.array([_cdf_scalar(law, float(v), settings) for v in xs.ravel()])
    return out.reshape(xs.shape) if xs.ndim else float(out[0])


def _cdf_scalar(law: StableLaw1D, x: float, st: InversionSettings) -> float:
    side = stable1d.boundedness_side(law)
    if side is stable1d.Boundedness.LEFT and x <= law.a:
        return 0.0
    if side is stable1d.Boundedness.RIGHT and x >= law.a:
        return 1.0
    tp = _tail_params(law)
    if tp is not None:
        rho, scale, shift = tp
        u = (x - shift) / scale
        if u > st.tail_switch:
            return 1.0 - _unit_tail_prob(law.alpha, rho, u, st)
        if u < -st.tail_switch:
            return _unit_tail_prob(law.alpha, 1.0 - rho, -u, st)
    cf = _Standardized(law)
    return min(1.0, max(0.0, _std_cdf(cf, (x - law.a) / cf.sigma, st)))


def quantile(law: StableLaw1D, q: float, settings: InversionSettings = DEFAULT_INVERSION) -> float:
    if not 0 < q < 1:
        raise InvalidParameter("quantile level must lie in (0, 1)")
    lo, hi = law.a - law.sigma, law.a + law.sigma
    side = stable1d.boundedness_side(law)
    if side is stable1d.Boundedness.LEFT:
        lo = law.a
    if side is stable1d.Boundedness.RIGHT:
        hi = law.a
    while _cdf_scalar(law, lo, settings) > q:
        lo = law.a - 4.0 * (law.a - lo) - law.sigma
    while _cdf_scalar(law, hi, settings) < q:
        hi = law.a + 4.0 * (hi - law.a) + law.sigma
    return optimize.brentq(lambda t: _cdf_scalar(law, t, settings) - q, lo, hi,
                           xtol=1e-12 * max(1.0, law.sigma), rtol=1e-12)


def total_mass(law: StableLaw1D, settings: InversionSettings = DEFAULT_INVERSION) -> float:
    """Integral of the inverted density over a truncation window plus series tail mass.

    The window is ``shift +- tail_switch * scale``; it should come out 1.
    """
    tp = _tail_params(law)
    if tp is None:
        raise AlphaEqualsOne("tail series unavailable for asymmetric alpha = 1 laws")
    rho, scale, shift = tp
    X = settings.tail_switch * scale
    lo, hi = shift - X, shift + X
    side = stable1d.boundedness_side(law)
    if side is stable1d.Boundedness.LEFT:
        lo = law.a
    if side is stable1d.Boundedness.RIGHT:
        hi = law.a
    body = _integrate_density(law, lo, hi, shift, scale, settings)
    tails = 0.0
    if side is not stable1d.Boundedness.RIGHT:
        tails += _unit_tail_prob(law.alpha, rho, settings.tail_switch, settings)
    if side is not stable1d.Boundedness.LEFT:
        tails += _unit_tail_prob(law.alpha, 1.0 - rho, settings.tail_switch, settings)
    return body + tails


def _integrate_density(law, lo, hi, center, scale, st, weight=None):
    """int_lo^hi g(x) w(x) dx on geometric panels around ``center``."""
    f = (lambda x: _density_scalar(law, x, st)) if weight is None else (
        lambda x: _density_scalar(law, x, st) * weight(x))
    edges = [center]
    r = scale
    while center + r < hi:
        edges.append(center + r)
        r *= 4.0
    edges.append(hi)
    r = scale
    left = []
    while center - r > lo:
        left.append(center - r)
        r *= 4.0
    edges = sorted(set([lo] + left + edges))
    edges = [e for e in edges if lo <= e <= hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _plain(f, a, b, st)
    return total


def mellin_numeric(alpha: float, rho: float, s: float,
                   settings: InversionSettings = DEFAULT_INVERSION) -> float:
    """``int_0^inf g(x) x^(s-1) dx`` for the unit law, from the inverted density.

    Quadrature of the inverted density up to ``tail_switch``, tail series
    beyond; requires ``0 < s < 1 + alpha`` (otherwise the integral diverges).
    """
    if not 0 < s < 1 + alpha:
        raise PoleError(f"Mellin integral diverges for s = {s} (need 0 < s < 1 + alpha)")
    law = unit_law(alpha, rho)
    X = settings.tail_switch
    body = _integrate_density(law, 0.0, X, 0.0, 1.0, settings, weight=lambda x: x ** (s - 1.0))
    if alpha == 2:
        tail = _plain(lambda x: math.exp(-0.25 * x * x) / math.sqrt(4 * math.pi) * x ** (s - 1),
                      X, math.inf, settings)
    else:
        tail = _series_sum(_series_terms(alpha, rho, settings.tail_terms), X,
                           integrate_from=X, power=s - 1.0)
    return body + tail
