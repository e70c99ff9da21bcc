"""Two-parameter scaling theory of the singular thermodynamic potential.

The potential ``Phi(t, h)`` obeys ``q Phi(t, h) = Phi(q^(1/a1) t, q^(1/a2) h)``.
It is evaluated from two real-analytic expansions:

* weak field ``|t|^a1 > |h|^a2``: ``Phi = |t|^a1 f(h / |t|^(a1/a2), sign t)``,
  with ``f(x, +) = 1 + f1+ x^2 + f2+ x^4 + ...`` and ``f(x, -) = 1 + f1- x + f2- x^2 + ...``;
* strong field: ``Phi = |h|^a2 g(t / |h|^(a2/a1))`` with ``g(x) = 1 + g1 x + ...``.

Critical exponents follow from the characteristic exponents (a1, a2) and the
dimension d.  The a1 = 1 Ising branch carries an extra ``t^2 ln|t|`` term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import (
    DeltaPole,
    InvalidParameter,
    OriginSingularity,
    RegimeOverflow,
    SigmaNegative,
    StepUnderflow,
)

__all__ = [
    "CriticalIndexSet",
    "ScalingFunction",
    "IsingConstants",
    "PhiEvaluator",
    "FDSettings",
    "PRESETS",
    "as_number",
    "critical_indexes",
    "preset_indexes",
    "preset_evaluator",
    "phi",
    "ising_phi",
    "thermo_derivatives",
    "log_slope",
    "correlation_exponents",
    "scale_residual",
    "dimension_residual",
]

Number = Union[Fraction, float]
INDEX_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "nu", "mu", "zeta", "sigma")


def as_number(x) -> Number:
    """Exact Fraction for ints, Fractions and "P/Q" strings; float otherwise.

    "inf" (any case, optional sign) maps to a float infinity.
    """
    if isinstance(x, bool):
        raise InvalidParameter("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        if s.lower().lstrip("+-") in ("inf", "infinity", "∞"):
            return -math.inf if s.startswith("-") else math.inf
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidParameter(f"cannot parse number {x!r}") from exc
    raise InvalidParameter(f"unsupported number {x!r}")


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Fraction) for x in xs)


def _fmt(v: Number):
    if isinstance(v, Fraction):
        return str(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


@dataclass(frozen=True)
class CriticalIndexSet:
    alpha: Number
    beta: Number
    gamma: Number
    delta: Number
    epsilon: Number
    nu: Number
    mu: Number
    zeta: Number
    sigma: Number
    exact: bool
    label: str = ""

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, k) for k in INDEX_NAMES)

    def to_dict(self) -> dict:
        out = {k: _fmt(getattr(self, k)) for k in INDEX_NAMES}
        out["exact"] = self.exact
        if self.label:
            out["label"] = self.label
        return out


def critical_indexes(alpha1, alpha2, d) -> CriticalIndexSet:
    """Critical exponents from the characteristic exponents and dimension.

    ``alpha = 2 - a1``, ``beta = (a2 - 1) a1 / a2``, ``gamma = (2 - a2) a1 / a2``,
    ``epsilon = (2 - a1) a2 / a1``, ``delta = 1 / (a2 - 1)``, ``nu = a1 / d``,
    ``mu = a2 / d``, ``sigma = 2 d (a2 - 1) / a2`` and ``zeta = sigma - d + 2``.
    Exact (Fraction) inputs give exact outputs.
    """
    a1, a2, d = as_number(alpha1), as_number(alpha2), as_number(d)
    for name, v in (("alpha1", a1), ("alpha2", a2)):
        if not 0 < v <= 2:
            raise InvalidParameter(f"{name} = {v} outside (0, 2]")
    if not (d >= 1):
        raise InvalidParameter(f"dimension must be >= 1 or inf, got {d}")
    if a2 == 1:
        raise DeltaPole("alpha2 = 1 makes delta infinite; use the Ising (alpha1 = 1) branch")
    one = Fraction(1) if _is_exact(a1, a2) else 1.0
    alpha = 2 * one - a1
    beta = (a2 - one) * a1 / a2
    gamma = (2 * one - a2) * a1 / a2
    epsilon = (2 * one - a1) * a2 / a1
    delta = one / (a2 - one)
    if math.isinf(d):
        nu = mu = 0 * one
        sigma = math.inf if a2 > 1 else -math.inf
        zeta = 2 * one if a2 == 2 else -math.inf
    else:
        dd = d if isinstance(one, Fraction) and isinstance(d, Fraction) else float(d)
        nu, mu = a1 / dd, a2 / dd
        sigma = 2 * dd * (a2 - one) / a2
        zeta = sigma - dd + 2
    exact = _is_exact(a1, a2) and (math.isinf(d) or isinstance(d, Fraction))
    res = CriticalIndexSet(alpha, beta, gamma, delta, epsilon, nu, mu, zeta, sigma, exact)
    lhs = alpha + 2 * beta + gamma
    if (lhs != 2) if exact else abs(lhs - 2) > 1e-12:
        raise AssertionError(f"alpha + 2 beta + gamma = {lhs}")
    return res


def correlation_exponents(alpha2, d) -> tuple[Number, Number]:
    """``(sigma, zeta)`` with ``sigma = 2 d (a2 - 1) / a2`` and ``zeta = sigma - d + 2``."""
    a2, d = as_number(alpha2), as_number(d)
    if not a2 > 1:
        raise SigmaNegative(f"alpha2 = {a2} <= 1 gives non-positive sigma")
    if a2 > 2:
        raise InvalidParameter(f"alpha2 = {a2} exceeds 2")
    if math.isinf(d):
        raise InvalidParameter("correlation exponents need a finite dimension")
    sigma = 2 * d * (a2 - 1) / a2
    return sigma, sigma - d + 2


# Named parameter sets: (alpha1, alpha2, d, label)
PRESETS = {
    "classical": (Fraction(2), Fraction(4, 3), math.inf, "mean-field (d = inf)"),
    "d3-rational": (Fraction(2), Fraction(6, 5), Fraction(3), "rational d = 3 set"),
    # effective alpha1 = 2 because the temperature enters as y1 = t^2
    "ising": (Fraction(2), Fraction(16, 15), Fraction(2), "2-d Ising, y1 = t^2"),
    "experimental": (1.89, 1.210, Fraction(3), "empirical input, not derived"),
}


def preset_indexes(name: str) -> CriticalIndexSet:
    if name not in PRESETS:
        raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    a1, a2, d, label = PRESETS[name]
    return replace(critical_indexes(a1, a2, d), label=label)


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------


def _pad(c: Sequence[float], n: int) -> tuple[float, ...]:
    c = tuple(float(v) for v in c)
    if not c or c[0] != 1.0:
        raise InvalidParameter("expansions start with the coefficient 1")
    if len(c) > n:
        raise InvalidParameter(f"more than {n} coefficients")
    return c + (0.0,) * (n - len(c))


@dataclass(frozen=True)
class ScalingFunction:
    """Coefficients of f(x, +) (in powers of x^2), f(x, -) and g(x) (in powers of x)."""

    f_plus: tuple = (1.0,)
    f_minus: tuple = (1.0,)
    g: tuple = (1.0,)
    order: int = 8

    def __post_init__(self):
        if self.order < 1:
            raise InvalidParameter("truncation order must be positive")
        for name in ("f_plus", "f_minus", "g"):
            object.__setattr__(self, name, _pad(getattr(self, name), self.order))

    def f(self, x: float, sign: int) -> float:
        if sign > 0:
            return float(np.polynomial.polynomial.polyval(x * x, self.f_plus))
        return float(np.polynomial.polynomial.polyval(x, self.f_minus))

    def g_value(self, x: float) -> float:
        return float(np.polynomial.polynomial.polyval(x, self.g))


# Continuous at the regime boundary (f(+-1, sign) = g(+-1) = 1/2) and with
# non-vanishing leading derivatives, so every exponent can be regressed.
DEFAULT_SCALING = ScalingFunction(f_plus=(1.0, -0.5), f_minus=(1.0, -1.0, -0.5, 1.0),
                                  g=(1.0, 0.0, -0.5))


@dataclass(frozen=True)
class IsingConstants:
    """Constants of the Ising limits.

    weak field:   ``t^2 (c1 ln|t| + c2) + c3 h |t|^(1/8)``
    strong field: ``c4 |h|^(16/15) + t^2 (c5 ln|t| + c6)``

    The logarithm comes from the single term ``c t^2 ln|t|``, so c1 = c5 = c.
    The default ``c2 = -3 c / 2`` makes the zero-field heat capacity exactly
    ``2 c ln(1/|t|)``.
    """

    c: float = 1.0
    c1: float | None = None
    c2: float | None = None
    c3: float = -1.0
    c4: float = -1.0
    c5: float | None = None
    c6: float = -1.5

    def __post_init__(self):
        for name in ("c1", "c5"):
            v = getattr(self, name)
            if v is None:
                object.__setattr__(self, name, float(self.c))
            elif v != self.c:
                raise InvalidParameter(f"{name} must equal c (both are the t^2 ln|t| coefficient)")
        if self.c2 is None:
            object.__setattr__(self, "c2", -1.5 * self.c)


@dataclass(frozen=True)
class PhiEvaluator:
    alpha1: float
    alpha2: float
    d: float = 3.0
    scaling: ScalingFunction = field(default_factory=lambda: DEFAULT_SCALING)
    ising: IsingConstants | None = None
    radius: float = 1.0
    boundary_tol: float = 1e-12

    def __post_init__(self):
        a1, a2 = float(self.alpha1), float(self.alpha2)
        if not (0 < a1 <= 2 and 0 < a2 <= 2):
            raise InvalidParameter("alpha1, alpha2 must lie in (0, 2]")
        if self.ising is not None and (a1 != 1 or a2 != 16 / 15):
            raise InvalidParameter("the Ising branch fixes alpha1 = 1, alpha2 = 16/15")
        if not self.radius > 0:
            raise InvalidParameter("radius guard must be positive")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        object.__setattr__(self, "d", float(self.d))

    @classmethod
    def ising_model(cls, constants: IsingConstants | None = None) -> "PhiEvaluator":
        return cls(1.0, 16 / 15, 2.0, ising=constants or IsingConstants())


def preset_evaluator(name: str) -> PhiEvaluator:
    if name == "ising":
        return PhiEvaluator.ising_model()
    if name not in PRESETS:
        raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    a1, a2, d, _ = PRESETS[name]
    return PhiEvaluator(float(a1), float(a2), float(d))


def _weak(ev: PhiEvaluator, t: float, h: float) -> float:
    tt = abs(t) ** ev.alpha1
    x = h / abs(t) ** (ev.alpha1 / ev.alpha2)
    if abs(x) > ev.radius:
        raise RegimeOverflow(f"weak-field argument {x:.4g} beyond radius {ev.radius}")
    return tt * ev.scaling.f(x, 1 if t > 0 else -1)


def _strong(ev: PhiEvaluator, t: float, h: float) -> float:
    hh = abs(h) ** ev.alpha2
    x = t / abs(h) ** (ev.alpha2 / ev.alpha1)
    if abs(x) > ev.radius:
        raise RegimeOverflow(f"strong-field argument {x:.4g} beyond radius {ev.radius}")
    return hh * ev.scaling.g_value(x)


def phi(ev: PhiEvaluator, t: float, h: float, regime: str | None = None) -> float:
    """Singular potential ``Phi(t, h)``.

    ``regime`` forces "weak" or "strong"; by default it is picked from
    ``|t|^a1`` versus ``|h|^a2`` and both forms are averaged on the boundary.
    """
    t, h = float(t), float(h)
    if t == 0 and h == 0:
        raise OriginSingularity("Phi is singular at (t, h) = (0, 0)")
    if ev.ising is not None:
        return ising_phi(t, h, ev.ising, regime)
    if regime == "weak":
        if t == 0:
            raise RegimeOverflow("the weak-field form needs t != 0")
        return _weak(ev, t, h)
    if regime == "strong":
        if h == 0:
            raise RegimeOverflow("the strong-field form needs h != 0")
        return _strong(ev, t, h)
    if regime is not None:
        raise InvalidParameter(f"unknown regime {regime!r}")
    tt, hh = abs(t) ** ev.alpha1, abs(h) ** ev.alpha2
    if abs(tt - hh) <= ev.boundary_tol * max(tt, hh):
        return 0.5 * (_weak(ev, t, h) + _strong(ev, t, h))
    return _weak(ev, t, h) if tt > hh else _strong(ev, t, h)


def ising_phi(t: float, h: float, k: IsingConstants | None = None,
              regime: str | None = None) -> float:
    """Ising limits; the weak field is ``|t| > |h|^(8/15)``."""
    k = k or IsingConstants()
    t, h = float(t), float(h)
    if t == 0 and h == 0:
        raise OriginSingularity("Phi is singular at (t, h) = (0, 0)")
    if regime is None:
        regime = "weak" if abs(t) > abs(h) ** (8 / 15) else "strong"
    if regime == "weak":
        if t == 0:
            raise RegimeOverflow("the weak-field form needs t != 0")
        return t * t * (k.c1 * math.log(abs(t)) + k.c2) + k.c3 * h * abs(t) ** 0.125
    if regime == "strong":
        if h == 0:
            raise RegimeOverflow("the strong-field form needs h != 0")
        tl = t * t * (k.c5 * math.log(abs(t)) + k.c6) if t != 0 else 0.0
        return k.c4 * abs(h) ** (16 / 15) + tl
    raise InvalidParameter(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FDSettings:
    """Steps ``rel * max(|h|, h_floor)`` and ``rel * max(|t|, t_floor, |h|^(a2/a1))``.

    Two Richardson levels are applied to each central difference.
    """

    rel: float = 1e-4
    h_floor: float = 1e-3
    t_floor: float = 1e-6

    def __post_init__(self):
        if min(self.rel, self.h_floor, self.t_floor) <= 0:
            raise InvalidParameter("finite-difference settings must be positive")


def _richardson(D, s: float) -> float:
    return (4.0 * D(0.5 * s) - D(s)) / 3.0


def thermo_derivatives(ev: PhiEvaluator, t: float, h: float,
                       fd: FDSettings = FDSettings()) -> dict:
    """``C = -Phi_tt``, ``eta = -Phi_h``, ``chi = -Phi_hh`` by central differences."""
    t, h = float(t), float(h)
    # in strong field t varies on the crossover scale |h|^(a2/a1)
    st = fd.rel * max(abs(t), fd.t_floor, abs(h) ** (ev.alpha2 / ev.alpha1))
    sh = fd.rel * max(abs(h), fd.h_floor)
    # the potential is non-analytic across t = 0 when h = 0 and across h = 0 when t = 0
    if h == 0 and abs(t) <= 2 * st:
        raise StepUnderflow(f"t-stencil around {t} straddles the singular point")
    if t == 0 and abs(h) <= 2 * sh:
        raise StepUnderflow(f"h-stencil around {h} straddles the singular point")

    def f(a, b):
        return phi(ev, a, b)

    p0 = f(t, h)
    C = -_richardson(lambda s: (f(t + s, h) - 2 * p0 + f(t - s, h)) / (s * s), st)
    eta = -_richardson(lambda s: (f(t, h + s) - f(t, h - s)) / (2 * s), sh)
    chi = -_richardson(lambda s: (f(t, h + s) - 2 * p0 + f(t, h - s)) / (s * s), sh)
    return {"C": C, "eta": eta, "chi": chi}


def log_slope(xs, ys) -> float:
    """Least-squares slope of ``ln|y|`` against ``ln|x|``."""
    xs, ys = np.abs(np.asarray(xs, float)), np.abs(np.asarray(ys, float))
    if np.any(xs == 0) or np.any(ys == 0):
        raise InvalidParameter("log-slope needs non-zero values")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def scale_residual(ev: PhiEvaluator, t: float, h: float, q: float) -> float:
    """Relative residual of ``q Phi(t, h) = Phi(q^(1/a1) t, q^(1/a2) h)``."""
    lhs = q * phi(ev, t, h)
    rhs = phi(ev, q ** (1 / ev.alpha1) * t, q ** (1 / ev.alpha2) * h)
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def dimension_residual(ev: PhiEvaluator, t: float, h: float, u: float) -> float:
    """Relative residual of ``u^d Phi(t, h) = Phi(t u^(1/nu), h u^(1/mu))``."""
    if math.isinf(ev.d):
        raise InvalidParameter("length rescaling needs a finite dimension")
    nu, mu = ev.alpha1 / ev.d, ev.alpha2 / ev.d
    lhs = u ** ev.d * phi(ev, t, h)
    rhs = phi(ev, t * u ** (1 / nu), h * u ** (1 / mu))
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)
