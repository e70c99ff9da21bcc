"""Two-dimensional operator-stable laws.

A law mu is operator stable with exponent B when its t-th convolution power
is ``mu^t = t^B mu * delta(b(t))``.  The centering is

    b(t) = t int_{1/t}^1 v^{-B} dv d = t int_0^{ln t} e^{s (B - I)} ds d,

which obeys the cocycle identity ``b(st) = s^B b(t) + t b(s)``.  The
supported exponent shapes (diagonal, scalar, lower-triangular and symmetric
with equal diagonal) all have closed forms built from
``phi(m, L) = (e^{mL} - 1) / m`` and its first moment.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, linalg

from .errors import (
    DomainError,
    InvalidParameter,
    NonPositiveT,
    NormalLaw,
    OneInSpectrum,
    UnsupportedShape,
)
from .stable1d import StableLaw1D

__all__ = [
    "ExponentMatrix",
    "OperatorStableLaw2D",
    "SpectrumResult",
    "b_of_t",
    "b_of_t_quadrature",
    "t_power",
    "spectrum_check",
    "moment_cutoff",
    "strictify_2d",
    "log_cf_2d",
    "sample_2d",
]

SHAPES = ("diagonal", "scalar", "lower-triangular", "symmetric")


@dataclass(frozen=True)
class ExponentMatrix:
    """A 2x2 exponent ``B`` in one of the supported shapes.

    ``lam`` holds the diagonal, ``c`` the off-diagonal coupling (0 for the
    diagonal and scalar shapes).
    """

    shape: str
    lam: tuple[float, float]
    c: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise UnsupportedShape(f"unknown exponent shape {self.shape!r}")
        l1, l2 = (float(v) for v in self.lam)
        if not (math.isfinite(l1) and math.isfinite(l2) and math.isfinite(self.c)):
            raise InvalidParameter("exponent entries must be finite")
        if l1 <= 0 or l2 <= 0:
            raise InvalidParameter("diagonal of B must be positive")
        if self.shape != "diagonal" and l1 != l2:
            raise UnsupportedShape(f"{self.shape} exponents need equal diagonal entries")
        if self.shape in ("diagonal", "scalar") and self.c != 0:
            raise UnsupportedShape(f"{self.shape} exponents have no off-diagonal entry")
        object.__setattr__(self, "lam", (l1, l2))
        object.__setattr__(self, "c", float(self.c))

    @classmethod
    def diagonal(cls, alpha1: float, alpha2: float) -> "ExponentMatrix":
        return cls("diagonal", (1.0 / alpha1, 1.0 / alpha2))

    @classmethod
    def scalar(cls, alpha: float) -> "ExponentMatrix":
        return cls("scalar", (1.0 / alpha, 1.0 / alpha))

    @classmethod
    def lower_triangular(cls, alpha: float, c: float) -> "ExponentMatrix":
        return cls("lower-triangular", (1.0 / alpha, 1.0 / alpha), c)

    @classmethod
    def symmetric(cls, alpha: float, c: float) -> "ExponentMatrix":
        return cls("symmetric", (1.0 / alpha, 1.0 / alpha), c)

    @classmethod
    def from_matrix(cls, B) -> "ExponentMatrix":
        B = np.asarray(B, dtype=float)
        if B.shape != (2, 2):
            raise UnsupportedShape("exponent must be a 2x2 matrix")
        (a, b), (c, d) = B
        if b == 0 and c == 0:
            return cls("scalar" if a == d else "diagonal", (a, d))
        if a != d:
            raise UnsupportedShape("non-diagonal exponents need equal diagonal entries")
        if b == 0:
            return cls("lower-triangular", (a, d), c)
        if b == c:
            return cls("symmetric", (a, d), b)
        raise UnsupportedShape("exponent is neither triangular nor symmetric")

    @property
    def matrix(self) -> np.ndarray:
        l1, l2 = self.lam
        if self.shape == "lower-triangular":
            return np.array([[l1, 0.0], [self.c, l2]])
        if self.shape == "symmetric":
            return np.array([[l1, self.c], [self.c, l2]])
        return np.diag([l1, l2])

    @property
    def eigenvalues(self) -> tuple[float, float]:
        l1, l2 = self.lam
        if self.shape == "symmetric":
            return (l1 + self.c, l1 - self.c)
        return (l1, l2)

    @property
    def alphas(self) -> tuple[float, float]:
        """Characteristic exponents ``1 / B_ii`` of the diagonal."""
        return (1.0 / self.lam[0], 1.0 / self.lam[1])

    def to_list(self) -> list:
        return self.matrix.tolist()


@dataclass(frozen=True)
class OperatorStableLaw2D:
    exponent: ExponentMatrix
    d: tuple[float, float] = (0.0, 0.0)
    strict: bool = field(init=False)

    def __post_init__(self):
        d = tuple(float(v) for v in self.d)
        if len(d) != 2 or not all(math.isfinite(v) for v in d):
            raise InvalidParameter("drift d must be a finite 2-vector")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "strict", d == (0.0, 0.0))

    def to_dict(self) -> dict:
        return {"B": self.exponent.to_list(), "d": list(self.d), "strict": self.strict}

    @classmethod
    def from_dict(cls, obj: dict) -> "OperatorStableLaw2D":
        law = cls(ExponentMatrix.from_matrix(obj["B"]), tuple(obj.get("d", (0.0, 0.0))))
        if "strict" in obj and bool(obj["strict"]) != law.strict:
            raise InvalidParameter("strict flag disagrees with the drift vector")
        return law


# ---------------------------------------------------------------------------
# b(t)
# ---------------------------------------------------------------------------


def _phi(m: float, L: float) -> float:
    """``int_0^L e^{m s} ds``."""
    if m == 0:
        return L
    return math.expm1(m * L) / m


def _phi1(m: float, L: float) -> float:
    """``int_0^L s e^{m s} ds``."""
    x = m * L
    if abs(x) < 1e-3:
        # L^2 sum_k x^k / (k! (k + 2))
        term, total = 1.0, 0.5
        for k in range(1, 8):
            term *= x / k
            total += term / (k + 2)
        return L * L * total
    return (L * math.exp(x) - _phi(m, L)) / m


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise NonPositiveT(f"t must be positive and finite, got {t}")
    return t


def b_of_t(B: ExponentMatrix, d, t: float) -> np.ndarray:
    """Closed-form ``b(t) = t int_0^{ln t} e^{s(B - I)} ds d``."""
    t = _check_t(t)
    d = np.asarray(d, dtype=float)
    L = math.log(t)
    l1, l2 = B.lam
    if B.shape in ("diagonal", "scalar"):
        return t * np.array([_phi(l1 - 1, L) * d[0], _phi(l2 - 1, L) * d[1]])
    if B.shape == "lower-triangular":
        # e^{s(B-I)} = e^{(lam-1)s} (I + s N) with N = [[0, 0], [c, 0]]
        m = l1 - 1
        return t * (_phi(m, L) * d + _phi1(m, L) * np.array([0.0, B.c * d[0]]))
    # symmetric: eigenvectors (1, +-1)/sqrt(2)
    up, dn = 0.5 * (d[0] + d[1]), 0.5 * (d[0] - d[1])
    pu, pd = _phi(l1 + B.c - 1, L) * up, _phi(l1 - B.c - 1, L) * dn
    return t * np.array([pu + pd, pu - pd])


def b_of_t_quadrature(B: ExponentMatrix, d, t: float, epsrel: float = 1e-13) -> np.ndarray:
    """Reference ``b(t)`` from matrix exponentials and adaptive quadrature."""
    t = _check_t(t)
    d = np.asarray(d, dtype=float)
    A = B.matrix - np.eye(2)
    L = math.log(t)
    out = np.zeros(2)
    for i in range(2):
        out[i] = integrate.quad(lambda s: (linalg.expm(s * A) @ d)[i], 0.0, L,
                                epsabs=0.0, epsrel=epsrel, limit=200)[0]
    return t * out


def t_power(B: ExponentMatrix, t: float) -> np.ndarray:
    """The matrix ``t^B = exp(B ln t)``."""
    t = _check_t(t)
    L = math.log(t)
    l1, l2 = B.lam
    if B.shape in ("diagonal", "scalar"):
        return np.diag([t ** l1, t ** l2])
    if B.shape == "lower-triangular":
        return t ** l1 * np.array([[1.0, 0.0], [B.c * L, 1.0]])
    tp, tm = t ** (l1 + B.c), t ** (l1 - B.c)
    return 0.5 * np.array([[tp + tm, tp - tm], [tp - tm, tp + tm]])


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumResult:
    valid: bool
    Lambda: float
    eigenvalues: tuple[float, float]


def spectrum_check(B: ExponentMatrix) -> SpectrumResult:
    """Every eigenvalue must have real part at least 1/2; Lambda is the largest."""
    if not isinstance(B, ExponentMatrix):
        B = ExponentMatrix.from_matrix(B)
    ev = B.eigenvalues
    return SpectrumResult(all(v >= 0.5 for v in ev), max(ev), ev)


def moment_cutoff(B: ExponentMatrix) -> float:
    """``1 / Lambda``: absolute moments of order p exist exactly for p below it."""
    res = spectrum_check(B)
    if not res.valid:
        raise InvalidParameter(f"spectrum {res.eigenvalues} has an eigenvalue below 1/2")
    if res.Lambda == 0.5:
        raise NormalLaw("Lambda = 1/2: the law is normal and every moment is finite")
    return 1.0 / res.Lambda


def strictify_2d(law: OperatorStableLaw2D) -> tuple[OperatorStableLaw2D, np.ndarray]:
    """Split ``law = strict * delta(shift)`` with ``shift = -(B - I)^{-1} d``.

    Then ``b(t) = t shift - t^B shift``, which is exactly what translating a
    strictly stable law by ``shift`` produces.
    """
    B = law.exponent
    if any(abs(v - 1.0) < 1e-12 for v in B.eigenvalues):
        raise OneInSpectrum("1 is an eigenvalue of B; use the logarithmic (alpha = 1) branch")
    shift = -np.linalg.solve(B.matrix - np.eye(2), np.asarray(law.d))
    return OperatorStableLaw2D(B), shift


# ---------------------------------------------------------------------------
# scaling form of the log characteristic function
# ---------------------------------------------------------------------------


def _principal_power(y: complex, a: float, which: str) -> complex:
    if y.imag < 0 or (y.imag == 0 and y.real < 0):
        raise DomainError(f"{which} = {y} lies outside the closed upper half-plane branch domain")
    if y == 0:
        return 0j
    return cmath.exp(a * cmath.log(y))


def log_cf_2d(law: OperatorStableLaw2D, nu: Callable[[complex], complex], y) -> complex:
    """``(y1^a1 + y2^a2) nu(y1^a1 / y2^a2)`` for a diagonal exponent.

    Powers use the principal branch on the closed upper half-plane.  When
    ``a1 = 1`` the logarithmic drift ``-i d1 y1 ln y1`` is added.
    """
    B = law.exponent
    if B.shape not in ("diagonal", "scalar"):
        raise UnsupportedShape("the scaling form needs a diagonal exponent")
    a1, a2 = B.alphas
    y1, y2 = complex(y[0]), complex(y[1])
    p1 = _principal_power(y1, a1, "y1")
    p2 = _principal_power(y2, a2, "y2")
    if p2 == 0:
        raise DomainError("y2 = 0 leaves the scaling variable undefined")
    val = (p1 + p2) * complex(nu(p1 / p2))
    if a1 == 1 and y1 != 0:
        val += -1j * law.d[0] * y1 * cmath.log(y1)
    return val


def sample_2d(law: OperatorStableLaw2D, n: int, seed: int = 0) -> np.ndarray:
    """``n x 2`` draws of the law with independent symmetric marginals.

    Only diagonal exponents: component i is the unit symmetric
    ``alpha_i``-stable law (jumps along the coordinate axes), translated so
    that the centering is the law's ``b(t)``.
    """
    from .renorm_sampling import sample

    B = law.exponent
    if B.shape not in ("diagonal", "scalar"):
        raise UnsupportedShape("sampling supports diagonal exponents only")
    cols = []
    for i, a in enumerate(B.alphas):
        if a > 2:
            raise InvalidParameter(f"alpha_{i + 1} = {a} exceeds 2")
        base = StableLaw1D.from_sigma_beta(a, 1.0, 0.0)
        cols.append(sample(base, n, seed=int(np.random.SeedSequence([int(seed), i]).generate_state(1)[0])).values)
    X = np.column_stack(cols)
    if not law.strict:
        if any(abs(v - 1.0) < 1e-12 for v in B.eigenvalues):
            raise OneInSpectrum("sampling the logarithmic branch is not supported")
        _, shift = strictify_2d(law)
        X = X + shift
    return X
