"""Canonical (Levy-Khintchine) representation of infinitely divisible laws.

A law is stored as a triple ``[a, R, M]``: location vector, Gaussian
covariance and Levy measure.  Its log characteristic function is

    ln phi(y) = i<y,a> - <y,Ry>/2 + int (e^{i<y,x>} - 1 - i<y,x>/(1+|x|^2)) M(dx)

and, continued to ``y = iv``, the same triple gives the shift of the log
partition function, ``ln Z(u+v) - ln Z(u)``.  Dimensions 1 and 2 are
supported; power-tail and numeric measures are one-dimensional.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import (
    DimensionMismatch,
    DivergentMoment,
    IncompatibleAlpha,
    InvalidParameter,
    InvalidRate,
    NonPositiveT,
    NonSymmetricR,
    QuadratureFailure,
)

__all__ = [
    "QuadSettings",
    "AtomicMeasure",
    "StablePowerTail",
    "NumericTail",
    "LevyTriple",
    "eval_log_cf",
    "log_partition_shift",
    "convolve",
    "scale_power",
    "poisson_triple",
    "gaussian_triple",
    "triple_to_dict",
    "triple_from_dict",
    "dumps",
    "loads",
]


@dataclass(frozen=True)
class QuadSettings:
    """Tolerances for the Levy-integral quadratures."""

    epsrel: float = 1e-9
    epsabs: float = 1e-12
    limit: int = 200
    limlst: int = 100
    # abserr may exceed the request by this factor before we give up
    slack: float = 1e3

    def __post_init__(self):
        if self.epsrel <= 0 or self.epsabs <= 0 or self.slack <= 0:
            raise InvalidParameter("quadrature tolerances must be positive")


DEFAULT_QUAD = QuadSettings()


# ---------------------------------------------------------------------------
# Levy measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite sum of point masses ``sum_j m_j delta(x_j)``; empty means M = 0."""

    points: tuple[tuple[float, ...], ...] = ()
    masses: tuple[float, ...] = ()

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in self.points)
        ms = tuple(float(m) for m in self.masses)
        if len(pts) != len(ms):
            raise InvalidParameter("points and masses differ in length")
        if pts and len({len(p) for p in pts}) != 1:
            raise DimensionMismatch("atoms of mixed dimension")
        for p, m in zip(pts, ms):
            if not m > 0 or not math.isfinite(m):
                raise InvalidRate(f"atom mass must be positive, got {m}")
            if all(c == 0.0 for c in p):
                raise InvalidParameter("a Levy measure has no atom at the origin")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    @property
    def dim(self) -> int | None:
        return len(self.points[0]) if self.points else None

    @property
    def is_empty(self) -> bool:
        return not self.points

    def scaled(self, t: float) -> "AtomicMeasure":
        return AtomicMeasure(self.points, tuple(t * m for m in self.masses))

    def merged(self, other: "AtomicMeasure") -> "AtomicMeasure":
        acc: dict[tuple[float, ...], float] = {}
        for p, m in zip(self.points + other.points, self.masses + other.masses):
            acc[p] = acc.get(p, 0.0) + m
        return AtomicMeasure(tuple(acc), tuple(acc.values()))


@dataclass(frozen=True)
class StablePowerTail:
    """Levy measure of a stable law: density ``c1 alpha x^(-alpha-1)`` on x>0
    and ``c2 alpha |x|^(-alpha-1)`` on x<0, i.e. M(x) = -c1 x^-alpha, c2 (-x)^-alpha."""

    c1: float
    c2: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise InvalidParameter(f"power-tail exponent must lie in (0,2), got {self.alpha}")
        if self.c1 < 0 or self.c2 < 0 or self.c1 + self.c2 <= 0:
            raise InvalidParameter("tail weights need c1, c2 >= 0 and c1 + c2 > 0")

    dim = 1

    def density(self, x: float) -> float:
        if x > 0:
            return self.c1 * self.alpha * x ** (-self.alpha - 1)
        if x < 0:
            return self.c2 * self.alpha * (-x) ** (-self.alpha - 1)
        return math.inf


@dataclass(frozen=True, eq=False)
class NumericTail:
    """One-dimensional Levy measure given by a density on ``support``.

    ``decay_rate`` is the exponential rate the density is known to decay at
    on unbounded sides (0 means no exponential decay is promised); it decides
    whether exponential moments, hence ``log_partition_shift``, exist.
    ``atoms`` lets sums with atomic measures stay representable.
    """

    density: Callable[[float], float]
    support: tuple[float, float] = (-math.inf, math.inf)
    decay_rate: float = 0.0
    atoms: AtomicMeasure = field(default_factory=AtomicMeasure)
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    dim = 1

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise InvalidParameter("empty support")
        if self.decay_rate < 0:
            raise InvalidParameter("decay_rate must be non-negative")
        if self.atoms.dim not in (None, 1):
            raise DimensionMismatch("numeric tails are one-dimensional")

    @classmethod
    def from_table(cls, x: Sequence[float], values: Sequence[float], decay_rate: float = 0.0,
                   atoms: AtomicMeasure | None = None) -> "NumericTail":
        xs = np.asarray(x, dtype=float)
        vs = np.asarray(values, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2 or np.any(np.diff(xs) <= 0):
            raise InvalidParameter("table needs increasing x and matching values")
        if np.any(vs < 0):
            raise InvalidParameter("density values must be non-negative")

        def dens(t, xs=xs, vs=vs):
            return float(np.interp(t, xs, vs, left=0.0, right=0.0))

        return cls(dens, (float(xs[0]), float(xs[-1])), decay_rate,
                   atoms or AtomicMeasure(), (tuple(xs.tolist()), tuple(vs.tolist())))

    def scaled(self, t: float) -> "NumericTail":
        table = None
        if self.table is not None:
            table = (self.table[0], tuple(t * v for v in self.table[1]))
        f = self.density
        return NumericTail(lambda x: t * f(x), self.support, self.decay_rate,
                           self.atoms.scaled(t), table)


LevyMeasure = AtomicMeasure | StablePowerTail | NumericTail


def _measure_dim(m: LevyMeasure) -> int | None:
    return m.dim


# ---------------------------------------------------------------------------
# Triples
# ---------------------------------------------------------------------------


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LevyTriple:
    """Infinitely divisible law ``[a, R, M]`` in dimension 1 or 2."""

    a: np.ndarray
    R: np.ndarray
    M: LevyMeasure = field(default_factory=AtomicMeasure)

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        k = a.shape[0]
        if a.ndim != 1 or k not in (1, 2):
            raise DimensionMismatch(f"dimension must be 1 or 2, got shape {a.shape}")
        R = np.asarray(self.R, dtype=float).reshape(k, k) if np.size(self.R) == k * k else None
        if R is None:
            raise DimensionMismatch("R must be k x k")
        if not np.allclose(R, R.T, rtol=0, atol=1e-12 * max(1.0, np.abs(R).max())):
            raise NonSymmetricR("R must be symmetric")
        if np.linalg.eigvalsh(R).min() < -1e-12 * max(1.0, np.abs(R).max()):
            raise InvalidParameter("R must be non-negative definite")
        mdim = _measure_dim(self.M)
        if mdim is not None and mdim != k:
            raise DimensionMismatch(f"measure of dimension {mdim} in a {k}-dimensional triple")
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "R", _frozen(R))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def is_degenerate(self) -> bool:
        """True for the Dirac law at ``a``."""
        return (not np.any(self.R)) and isinstance(self.M, AtomicMeasure) and self.M.is_empty

    def __eq__(self, other):
        if not isinstance(other, LevyTriple):
            return NotImplemented
        return (np.array_equal(self.a, other.a) and np.array_equal(self.R, other.R)
                and self.M == other.M)

    __hash__ = None


def poisson_triple(atoms: Sequence[tuple]) -> LevyTriple:
    """Generalized Poisson law with jump points and rates ``[(x_j, lambda_j), ...]``.

    The location absorbs the compensator so that the log CF is exactly
    ``sum_j lambda_j (e^{i<y,x_j>} - 1)``.
    """
    if not atoms:
        raise InvalidParameter("need at least one atom")
    points, rates = zip(*atoms)
    for r in rates:
        if not r > 0:
            raise InvalidRate(f"Poisson rate must be positive, got {r}")
    M = AtomicMeasure(points, rates)
    k = M.dim
    a = np.zeros(k)
    for p, r in zip(M.points, M.masses):
        x = np.asarray(p)
        a += r * x / (1.0 + x @ x)
    return LevyTriple(a, np.zeros((k, k)), M)


def gaussian_triple(a, R) -> LevyTriple:
    """Normal law with mean ``a`` and covariance ``R`` (``R = 0`` gives a Dirac law)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape != (a.size, a.size):
        raise DimensionMismatch("R must match the dimension of a")
    if not np.allclose(R, R.T):
        raise NonSymmetricR("R must be symmetric")
    return LevyTriple(a, R, AtomicMeasure())


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------


def _quad(f, a, b, qs: QuadSettings, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if kw.get("weight") is not None and math.isinf(b):
            val, err = integrate.quad(f, a, b, epsabs=qs.epsabs, limlst=qs.limlst,
                                      limit=qs.limit, **kw)[:2]
        else:
            val, err = integrate.quad(f, a, b, epsabs=qs.epsabs, epsrel=qs.epsrel,
                                      limit=qs.limit, **kw)[:2]
    if not math.isfinite(val) or err > qs.slack * max(qs.epsabs, qs.epsrel * abs(val)):
        raise QuadratureFailure(
            f"integral over [{a}, {b}] did not converge (value {val:.3g}, error {err:.3g})")
    return val


def _half_line_cf(nu: Callable[[float], float], hi: float, y: float, qs: QuadSettings) -> complex:
    """int_0^hi (e^{iyx} - 1 - iyx/(1+x^2)) nu(x) dx for y > 0."""
    inner_hi = min(1.0, hi)
    re = _quad(lambda x: -2.0 * math.sin(0.5 * y * x) ** 2 * nu(x), 0.0, inner_hi, qs)
    im = _quad(lambda x: (math.sin(y * x) - y * x / (1.0 + x * x)) * nu(x), 0.0, inner_hi, qs)
    if hi > 1.0:
        mass = _quad(nu, 1.0, hi, qs)
        drift = _quad(lambda x: x / (1.0 + x * x) * nu(x), 1.0, hi, qs)
        if math.isinf(hi):
            re += _quad(nu, 1.0, hi, qs, weight="cos", wvar=y) - mass
            im += _quad(nu, 1.0, hi, qs, weight="sin", wvar=y) - y * drift
        else:
            re += _quad(lambda x: (math.cos(y * x) - 1.0) * nu(x), 1.0, hi, qs)
            im += _quad(lambda x: math.sin(y * x) * nu(x), 1.0, hi, qs) - y * drift
    return complex(re, im)


def _density_cf(nu: Callable[[float], float], support: tuple[float, float], y: float,
                qs: QuadSettings) -> complex:
    lo, hi = support
    if y == 0.0:
        return 0j
    yabs = abs(y)
    total = 0j
    if hi > 0:
        # segment may start away from 0; integrate over [max(lo,0), hi]
        if lo > 0:
            total += _segment_cf(nu, lo, hi, yabs, qs)
        else:
            total += _half_line_cf(nu, hi, yabs, qs)
    if lo < 0:
        def mirrored(x):
            return nu(-x)
        if hi < 0:
            seg = _segment_cf(mirrored, -hi, -lo, yabs, qs)
        else:
            seg = _half_line_cf(mirrored, -lo, yabs, qs)
        total += seg.conjugate()
    return total if y > 0 else total.conjugate()


def _segment_cf(nu, lo: float, hi: float, y: float, qs: QuadSettings) -> complex:
    """Same integrand on a segment [lo, hi] with lo > 0."""
    def re(x):
        return (math.cos(y * x) - 1.0) * nu(x)

    def im(x):
        return (math.sin(y * x) - y * x / (1.0 + x * x)) * nu(x)

    if math.isinf(hi):
        mass = _quad(nu, lo, hi, qs)
        drift = _quad(lambda x: x / (1.0 + x * x) * nu(x), lo, hi, qs)
        return complex(_quad(nu, lo, hi, qs, weight="cos", wvar=y) - mass,
                       _quad(nu, lo, hi, qs, weight="sin", wvar=y) - y * drift)
    return complex(_quad(re, lo, hi, qs), _quad(im, lo, hi, qs))


def _atomic_cf(m: AtomicMeasure, y: np.ndarray) -> complex:
    total = 0j
    for p, w in zip(m.points, m.masses):
        x = np.asarray(p)
        yx = float(y @ x)
        total += w * complex(math.cos(yx) - 1.0, math.sin(yx) - yx / (1.0 + x @ x))
    return total


def _measure_cf(m: LevyMeasure, y: np.ndarray, qs: QuadSettings) -> complex:
    if isinstance(m, AtomicMeasure):
        return _atomic_cf(m, y)
    if isinstance(m, StablePowerTail):
        support = (-math.inf if m.c2 > 0 else 0.0, math.inf if m.c1 > 0 else 0.0)
        return _density_cf(m.density, support, float(y[0]), qs)
    if isinstance(m, NumericTail):
        return _density_cf(m.density, m.support, float(y[0]), qs) + _atomic_cf(m.atoms, y)
    raise TypeError(f"unknown Levy measure {type(m).__name__}")


def _as_point(triple: LevyTriple, y) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (triple.dim,):
        raise DimensionMismatch(f"argument of shape {y.shape} for a {triple.dim}-dimensional law")
    if not np.all(np.isfinite(y)):
        raise InvalidParameter("argument must be finite")
    return y


def eval_log_cf(triple: LevyTriple, y, quad: QuadSettings = DEFAULT_QUAD) -> complex:
    """Log characteristic function of ``triple`` at the real point ``y``.

    Non-atomic measures are integrated numerically (split at |x| = 1, Fourier
    weights on unbounded pieces); raises QuadratureFailure when the integral
    misses ``quad`` by more than its slack factor.
    """
    y = _as_point(triple, y)
    if not np.any(y):
        return 0j
    gauss = complex(-0.5 * float(y @ triple.R @ y), float(y @ triple.a))
    return gauss + _measure_cf(triple.M, y, quad)


# ---------------------------------------------------------------------------
# partition function
# ---------------------------------------------------------------------------


def _laplace_half_line(nu, hi: float, v: float, qs: QuadSettings) -> float:
    """int_0^hi (e^{-vx} - 1 + vx/(1+x^2)) nu(x) dx, any real v with the integral finite."""
    def inner(x):
        # -expm1 keeps the small-x cancellation accurate
        return (math.expm1(-v * x) + v * x / (1.0 + x * x)) * nu(x)

    total = _quad(inner, 0.0, min(1.0, hi), qs)
    if hi > 1.0:
        total += _quad(inner, 1.0, hi, qs)
    return total


def _laplace_density(nu, support, v: float, decay_rate: float, qs: QuadSettings) -> float:
    lo, hi = support
    # e^{-vx} grows towards +inf when v < 0, towards -inf when v > 0
    if (v < 0 and math.isinf(hi) and -v >= decay_rate) or (v > 0 and math.isinf(lo) and v >= decay_rate):
        raise DivergentMoment(
            f"exponential moment e^(-v x) with v={v} is not integrable against the Levy measure")
    total = 0.0
    if hi > 0:
        if lo > 0:
            total += _quad(lambda x: (math.expm1(-v * x) + v * x / (1 + x * x)) * nu(x), lo, hi, qs)
        else:
            total += _laplace_half_line(nu, hi, v, qs)
    if lo < 0:
        def mirrored(x):
            return nu(-x)
        if hi < 0:
            total += _quad(lambda x: (math.expm1(v * x) - v * x / (1 + x * x)) * mirrored(x),
                           -hi, -lo, qs)
        else:
            total += _laplace_half_line(mirrored, -lo, -v, qs)
    return total


def _atomic_laplace(m: AtomicMeasure, v: np.ndarray) -> float:
    total = 0.0
    for p, w in zip(m.points, m.masses):
        x = np.asarray(p)
        vx = float(v @ x)
        total += w * (math.expm1(-vx) + vx / (1.0 + x @ x))
    return total


def log_partition_shift(triple: LevyTriple, v, quad: QuadSettings = DEFAULT_QUAD) -> float:
    """``ln Z(u+v) - ln Z(u)`` for the body described by ``triple``.

    Equal to ``eval_log_cf`` continued to ``y = iv``.  Raises DivergentMoment
    when ``e^{-<v,x>}`` is not integrable against the Levy measure.
    """
    v = _as_point(triple, v)
    if not np.any(v):
        return 0.0
    base = -float(v @ triple.a) + 0.5 * float(v @ triple.R @ v)
    m = triple.M
    if isinstance(m, AtomicMeasure):
        return base + _atomic_laplace(m, v)
    if isinstance(m, StablePowerTail):
        s = float(v[0])
        if (s > 0 and m.c2 > 0) or (s < 0 and m.c1 > 0):
            raise DivergentMoment(
                "a stable Levy measure with mass on the side where e^(-vx) grows "
                "has no exponential moment")
        support = (-math.inf if m.c2 > 0 else 0.0, math.inf if m.c1 > 0 else 0.0)
        return base + _laplace_density(m.density, support, s, 0.0, quad)
    if isinstance(m, NumericTail):
        return (base + _laplace_density(m.density, m.support, float(v[0]), m.decay_rate, quad)
                + _atomic_laplace(m.atoms, v))
    raise TypeError(f"unknown Levy measure {type(m).__name__}")


# ---------------------------------------------------------------------------
# algebra on triples
# ---------------------------------------------------------------------------


def _as_numeric(m: LevyMeasure) -> NumericTail:
    if isinstance(m, NumericTail):
        return m
    if isinstance(m, StablePowerTail):
        support = (-math.inf if m.c2 > 0 else 0.0, math.inf if m.c1 > 0 else 0.0)
        return NumericTail(m.density, support, 0.0)
    return NumericTail(lambda x: 0.0, (-1.0, 1.0), math.inf, m)


def _add_measures(m1: LevyMeasure, m2: LevyMeasure) -> LevyMeasure:
    if isinstance(m1, AtomicMeasure) and m1.is_empty:
        return m2
    if isinstance(m2, AtomicMeasure) and m2.is_empty:
        return m1
    if isinstance(m1, AtomicMeasure) and isinstance(m2, AtomicMeasure):
        return m1.merged(m2)
    if isinstance(m1, StablePowerTail) and isinstance(m2, StablePowerTail):
        if m1.alpha != m2.alpha:
            raise IncompatibleAlpha(f"cannot add power tails with alpha {m1.alpha} and {m2.alpha}")
        return StablePowerTail(m1.c1 + m2.c1, m1.c2 + m2.c2, m1.alpha)
    n1, n2 = _as_numeric(m1), _as_numeric(m2)
    f1, f2 = n1.density, n2.density
    lo1, hi1 = n1.support
    lo2, hi2 = n2.support

    def dens(x):
        total = 0.0
        if lo1 <= x <= hi1:
            total += f1(x)
        if lo2 <= x <= hi2:
            total += f2(x)
        return total

    return NumericTail(dens, (min(lo1, lo2), max(hi1, hi2)),
                       min(n1.decay_rate, n2.decay_rate), n1.atoms.merged(n2.atoms))


def convolve(t1: LevyTriple, t2: LevyTriple) -> LevyTriple:
    """Triple of the convolution of two infinitely divisible laws."""
    if t1.dim != t2.dim:
        raise DimensionMismatch(f"cannot convolve dimensions {t1.dim} and {t2.dim}")
    return LevyTriple(t1.a + t2.a, t1.R + t2.R, _add_measures(t1.M, t2.M))


def _scale_measure(m: LevyMeasure, t: float) -> LevyMeasure:
    if isinstance(m, StablePowerTail):
        return StablePowerTail(t * m.c1, t * m.c2, m.alpha)
    return m.scaled(t)


def scale_power(triple: LevyTriple, t: float) -> LevyTriple:
    """t-th convolution power ``[t a, t R, t M]``."""
    if not t > 0:
        raise NonPositiveT(f"convolution power needs t > 0, got {t}")
    return LevyTriple(t * triple.a, t * triple.R, _scale_measure(triple.M, t))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _atoms_to_list(m: AtomicMeasure) -> list:
    return [{"point": list(p), "mass": w} for p, w in zip(m.points, m.masses)]


def _atoms_from_list(items) -> AtomicMeasure:
    if not items:
        return AtomicMeasure()
    return AtomicMeasure(tuple(tuple(d["point"]) for d in items), tuple(d["mass"] for d in items))


def triple_to_dict(triple: LevyTriple) -> dict:
    m = triple.M
    if isinstance(m, AtomicMeasure):
        md = {"kind": "atomic", "atoms": _atoms_to_list(m)}
    elif isinstance(m, StablePowerTail):
        md = {"kind": "stable", "c1": m.c1, "c2": m.c2, "alpha": m.alpha}
    else:
        if m.table is None:
            raise InvalidParameter("only tabulated numeric tails can be serialized")
        md = {"kind": "numeric", "x": list(m.table[0]), "density": list(m.table[1]),
              "decay_rate": m.decay_rate, "atoms": _atoms_to_list(m.atoms)}
    return {"a": triple.a.tolist(), "R": triple.R.tolist(), "M": md}


def triple_from_dict(d: dict) -> LevyTriple:
    md = d.get("M", {"kind": "atomic", "atoms": []})
    kind = md["kind"]
    if kind == "atomic":
        m = _atoms_from_list(md.get("atoms", []))
    elif kind == "stable":
        m = StablePowerTail(md["c1"], md["c2"], md["alpha"])
    elif kind == "numeric":
        m = NumericTail.from_table(md["x"], md["density"], md.get("decay_rate", 0.0),
                                   _atoms_from_list(md.get("atoms", [])))
    else:
        raise InvalidParameter(f"unknown measure kind {kind!r}")
    return LevyTriple(d["a"], d["R"], m)


def dumps(triple: LevyTriple) -> str:
    return json.dumps(triple_to_dict(triple), sort_keys=True)


def loads(text: str) -> LevyTriple:
    return triple_from_dict(json.loads(text))
