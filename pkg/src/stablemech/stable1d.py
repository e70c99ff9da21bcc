"""One-dimensional stable laws.

A law is described by its characteristic exponent ``alpha``, the tail
weights ``c1`` (positive jumps) and ``c2`` (negative jumps) of its Levy
measure ``M(x) = -c1 x^-alpha (x>0), c2 (-x)^-alpha (x<0)``, and a location
``a``.  For ``alpha = 2`` the tail weights are replaced by a variance.

The location is the one appearing in the closed-form log characteristic
function

    alpha != 1:  i y a + alpha Gamma(-alpha) (c1 (-iy)^alpha + c2 (iy)^alpha)
    alpha == 1:  i y a - c1 iy ln(-iy / e^(1-gamma)) + c2 iy ln(iy / e^(1-gamma))

(gamma the Euler constant).  In the usual S1 parametrisation this is
``S_alpha(sigma, beta, a)`` with ``beta = (c1-c2)/(c1+c2)``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple

import numpy as np

from . import levy_core
from .errors import (
    AlphaEqualsOne,
    AlphaOutOfRange,
    BranchAmbiguity,
    InadmissibleRho,
    InvalidParameter,
)

__all__ = [
    "StableLaw1D",
    "TransitionClass",
    "Transition",
    "Boundedness",
    "gamma_neg",
    "compensator_constant",
    "log_cf",
    "singular_lnZ",
    "singularity_exponent",
    "classify_transition",
    "strictify",
    "centering_shift",
    "beta_to_rho",
    "rho_to_beta",
    "admissible_rho",
    "boundedness_side",
    "induced_triple",
]

EULER_GAMMA = 0.57721566490153286061
_LOG_SCALE = 1.0 - EULER_GAMMA  # ln e^(1-gamma)


def gamma_neg(alpha: float) -> float:
    """Gamma(-alpha) for non-integer alpha in (0, 2) by reflection."""
    if alpha in (1.0, 2.0):
        raise InvalidParameter("Gamma(-alpha) has a pole at alpha = 1, 2")
    return -math.pi / (math.sin(math.pi * alpha) * math.gamma(1.0 + alpha))


def compensator_constant(alpha: float) -> float:
    """alpha * int_0^inf x^-alpha / (1+x^2) dx, up to the sign of the branch.

    The canonical integral of a power tail differs from the closed form by a
    term linear in y: ``c1`` contributes ``-i y c1 K`` and ``c2`` ``+i y c2 K``
    with ``K = alpha pi / (2 cos(pi alpha / 2))`` for alpha != 1.
    """
    return alpha * math.pi / (2.0 * math.cos(0.5 * math.pi * alpha))


@dataclass(frozen=True)
class StableLaw1D:
    alpha: float
    c1: float = 0.0
    c2: float = 0.0
    a: float = 0.0
    variance: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha <= 2 or not math.isfinite(self.alpha):
            raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.alpha == 2:
            var = 2.0 if self.variance is None else float(self.variance)
            if var <= 0:
                raise InvalidParameter("variance must be positive")
            object.__setattr__(self, "variance", var)
        else:
            if self.variance is not None:
                raise InvalidParameter("variance is only used for alpha = 2")
            if self.c1 < 0 or self.c2 < 0 or not self.c1 + self.c2 > 0:
                raise InvalidParameter("need c1, c2 >= 0 with c1 + c2 > 0")

    @property
    def beta(self) -> float:
        if self.alpha == 2:
            return 0.0
        return (self.c1 - self.c2) / (self.c1 + self.c2)

    @property
    def sigma(self) -> float:
        """S1 scale: ``ln|phi(y)| = -sigma^alpha |y|^alpha``."""
        if self.alpha == 2:
            return math.sqrt(0.5 * self.variance)
        if self.alpha == 1:
            return 0.5 * math.pi * (self.c1 + self.c2)
        s_alpha = -self.alpha * gamma_neg(self.alpha) * math.cos(0.5 * math.pi * self.alpha)
        return (s_alpha * (self.c1 + self.c2)) ** (1.0 / self.alpha)

    @property
    def is_strict(self) -> bool:
        if self.alpha == 1:
            return self.a == 0 and self.c1 == self.c2
        return self.a == 0

    @classmethod
    def from_sigma_beta(cls, alpha: float, sigma: float, beta: float = 0.0,
                        a: float = 0.0) -> "StableLaw1D":
        """Build from the S1 parameters ``(alpha, sigma, beta, a)``."""
        if not sigma > 0:
            raise InvalidParameter("sigma must be positive")
        if abs(beta) > 1:
            raise InvalidParameter("beta must lie in [-1, 1]")
        if alpha == 2:
            return cls(2.0, a=a, variance=2.0 * sigma * sigma)
        if alpha == 1:
            total = 2.0 * sigma / math.pi
        else:
            total = sigma ** alpha / (-alpha * gamma_neg(alpha) * math.cos(0.5 * math.pi * alpha))
        return cls(alpha, 0.5 * (1 + beta) * total, 0.5 * (1 - beta) * total, a)

    def to_dict(self) -> dict:
        d = {"alpha": self.alpha, "c1": self.c1, "c2": self.c2, "a": self.a}
        if self.alpha == 2:
            d["variance"] = self.variance
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StableLaw1D":
        return cls(float(d["alpha"]), float(d.get("c1", 0.0)), float(d.get("c2", 0.0)),
                   float(d.get("a", 0.0)), d.get("variance"))


class TransitionClass(str, enum.Enum):
    FIRST_ORDER = "first-order"
    SECOND_ORDER = "second-order"
    LAMBDA_POINT = "lambda-point"
    NONE = "none"


class Transition(NamedTuple):
    kind: TransitionClass
    # derivatives (moments) of order delta exist exactly for 0 < delta < max_finite_order
    max_finite_order: float


class Boundedness(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    UNBOUNDED = "unbounded"


# ---------------------------------------------------------------------------
# log characteristic function
# ---------------------------------------------------------------------------


def _on_cut(w: complex) -> bool:
    return w.imag == 0.0 and w.real < 0.0


def log_cf(law: StableLaw1D, z) -> complex:
    """Closed-form log characteristic function at complex ``z``.

    Real ``z`` gives the boundary values ``(y +- i0)^alpha``.  Off the axis
    each tail term is continued with its principal branch; a tail term has
    no continuation across its cut (``c1``: negative imaginary axis, ``c2``:
    positive imaginary axis), so evaluating a law with that tail weight there
    raises BranchAmbiguity.  For one-sided laws this is exactly the
    half-plane continuation, e.g. ``c2 = 0`` and ``z = iv`` give
    ``-v a + c1 alpha Gamma(-alpha) v^alpha``.
    """
    z = complex(z)
    if z == 0:
        return 0j
    if law.alpha == 2:
        return 1j * z * law.a - 0.5 * law.variance * z * z
    w1, w2 = -1j * z, 1j * z
    if law.c1 > 0 and _on_cut(w1):
        raise BranchAmbiguity(f"z = {z} lies on the branch cut of the positive tail term")
    if law.c2 > 0 and _on_cut(w2):
        raise BranchAmbiguity(f"z = {z} lies on the branch cut of the negative tail term")
    out = 1j * z * law.a
    if law.alpha == 1:
        if law.c1:
            out -= law.c1 * 1j * z * (cmath.log(w1) - _LOG_SCALE)
        if law.c2:
            out += law.c2 * 1j * z * (cmath.log(w2) - _LOG_SCALE)
        return out
    k = law.alpha * gamma_neg(law.alpha)
    if law.c1:
        out += law.c1 * k * w1 ** law.alpha
    if law.c2:
        out += law.c2 * k * w2 ** law.alpha
    return out


def singular_lnZ(law: StableLaw1D, v: float) -> float:
    """Singular part of ``ln Z(u+v) - ln Z(u)`` at a stable state.

    ``c1 alpha Gamma(-alpha) v^alpha`` for v > 0 and ``c2 alpha Gamma(-alpha) |v|^alpha``
    for v < 0 (alpha != 1); ``c1 v ln v`` and ``c2 |v| ln|v|`` at alpha = 1.
    Terms linear in v (location, centering) are not included.  At alpha = 2
    the shift is the analytic ``variance v^2 / 2``.
    """
    v = float(v)
    if v == 0.0:
        return 0.0
    if law.alpha == 2:
        return 0.5 * law.variance * v * v
    c = law.c1 if v > 0 else law.c2
    av = abs(v)
    if law.alpha == 1:
        return c * av * math.log(av)
    return c * law.alpha * gamma_neg(law.alpha) * av ** law.alpha


def singularity_exponent(law: StableLaw1D, order: int, vs: Iterable[float] | None = None,
                         rel_step: float = 1e-3) -> float:
    """Log-log slope of |d^order singular_lnZ / dv^order| over small v > 0.

    Derivatives are central differences with step ``rel_step * v``; for a
    power singularity the slope is ``alpha - order``.
    """
    if order not in (1, 2):
        raise InvalidParameter("order must be 1 or 2")
    vs = np.logspace(-1, -6, 11) if vs is None else np.asarray(list(vs), dtype=float)
    if np.any(vs <= 0):
        raise InvalidParameter("evaluation points must be positive")
    derivs = []
    for v in vs:
        h = rel_step * v
        if order == 1:
            d = (singular_lnZ(law, v + h) - singular_lnZ(law, v - h)) / (2 * h)
        else:
            d = (singular_lnZ(law, v + h) - 2 * singular_lnZ(law, v)
                 + singular_lnZ(law, v - h)) / (h * h)
        derivs.append(abs(d))
    slope, _ = np.polyfit(np.log(vs), np.log(derivs), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def classify_transition(alpha: float) -> Transition:
    """Ehrenfest order of the transition with characteristic exponent ``alpha``."""
    if not 0 < alpha <= 2:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == 2:
        return Transition(TransitionClass.NONE, math.inf)
    if alpha == 1:
        kind = TransitionClass.LAMBDA_POINT
    elif alpha < 1:
        kind = TransitionClass.FIRST_ORDER
    else:
        kind = TransitionClass.SECOND_ORDER
    return Transition(kind, float(alpha))


def centering_shift(law: StableLaw1D, t: float) -> float:
    """``b(t)`` in ``mu^t = t^(1/alpha) mu * delta(b(t))``.

    ``a (t - t^(1/alpha))`` for alpha != 1 and ``(c1 - c2) t ln t`` at alpha = 1.
    With ``t = n`` this is the centering of an n-fold sum.
    """
    if not t > 0:
        raise InvalidParameter("t must be positive")
    if law.alpha == 1:
        return (law.c1 - law.c2) * t * math.log(t)
    return law.a * (t - t ** (1.0 / law.alpha))


def strictify(law: StableLaw1D) -> tuple[StableLaw1D, float]:
    """Split ``X = X0 + shift`` with ``X0`` strictly stable.

    At alpha = 1 only symmetric laws (c1 = c2) qualify; otherwise the
    centering grows like ``t ln t`` and no constant shift removes it.
    """
    if law.alpha == 1 and law.c1 != law.c2:
        raise AlphaEqualsOne("an asymmetric alpha = 1 law cannot be made strictly stable by a shift")
    return replace(law, a=0.0), law.a


def admissible_rho(alpha: float) -> tuple[float, float]:
    """Closed interval of positivity parameters rho for exponent ``alpha``."""
    if not 0 < alpha <= 2:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {alpha}")
    if alpha <= 1:
        return 0.0, 1.0
    return 1.0 - 1.0 / alpha, 1.0 / alpha


def beta_to_rho(alpha: float, beta: float) -> float:
    """Positivity parameter from skewness: beta = cot(pi alpha/2) tan(pi alpha (rho - 1/2))."""
    if not 0 < alpha <= 2:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {alpha}")
    if abs(beta) > 1:
        raise InvalidParameter("beta must lie in [-1, 1]")
    if alpha == 2:
        return 0.5
    if alpha == 1:
        if beta != 0:
            raise AlphaEqualsOne("the beta-rho relation degenerates at alpha = 1; only beta = 0 maps")
        return 0.5
    return 0.5 + math.atan(beta * math.tan(0.5 * math.pi * alpha)) / (math.pi * alpha)


def rho_to_beta(alpha: float, rho: float) -> float:
    """Inverse of :func:`beta_to_rho`."""
    lo, hi = admissible_rho(alpha)
    if not lo - 1e-15 <= rho <= hi + 1e-15:
        raise InadmissibleRho(f"rho={rho} outside [{lo}, {hi}] for alpha={alpha}")
    if alpha == 2:
        return 0.0
    if alpha == 1:
        if rho != 0.5:
            raise AlphaEqualsOne("the beta-rho relation degenerates at alpha = 1; only rho = 1/2 maps")
        return 0.0
    beta = math.tan(math.pi * alpha * (rho - 0.5)) / math.tan(0.5 * math.pi * alpha)
    return max(-1.0, min(1.0, beta))


def boundedness_side(law: StableLaw1D) -> Boundedness:
    """Support side: bounded from the left iff beta = 1 and alpha < 1 (right: beta = -1).

    A bounded-from-one-side stable state is therefore always a first-order
    transition.
    """
    if law.alpha < 1:
        if law.c2 == 0:
            return Boundedness.LEFT
        if law.c1 == 0:
            return Boundedness.RIGHT
    return Boundedness.UNBOUNDED


def induced_triple(law: StableLaw1D) -> levy_core.LevyTriple:
    """Levy-Khintchine triple of ``law`` (canonical cut ``x/(1+x^2)``)."""
    if law.alpha == 2:
        return levy_core.gaussian_triple(law.a, law.variance)
    a = law.a
    if law.alpha != 1:
        a += (law.c1 - law.c2) * compensator_constant(law.alpha)
    return levy_core.LevyTriple([a], [[0.0]], levy_core.StablePowerTail(law.c1, law.c2, law.alpha))
