"""Monte-Carlo sampling of stable laws, the renormalization map and attraction tests.

The renormalization map sends a sample to ``(X_1 + ... + X_n - b_n) / n^(1/alpha)``
over disjoint groups; stable laws are its fixed points.  The fixed-point
property is checked with a two-sample Kolmogorov-Smirnov statistic.
Attraction to a stable law is decided from the regular variation of the
two-sided tail ``h(x) = 1 - F(x) + F(-x)``, evaluated in log space so that
light (Gaussian) tails do not underflow.
"""
from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, stats

from . import stable1d
from .errors import (
    DegenerateTail,
    GroupTooLarge,
    InvalidParameter,
    LimitNotConverged,
    MeanUndefined,
    RootBracketFailure,
)
from .stable1d import StableLaw1D

__all__ = [
    "EmpiricalDistribution",
    "TailModel",
    "AttractionResult",
    "TailIndexEstimate",
    "sample",
    "renormalize",
    "ks_statistic",
    "ks_critical_value",
    "fixed_point_distance",
    "fixed_point_distance_samples",
    "empirical_cf",
    "attraction_test",
    "norm_constants",
    "tail_index_estimate",
    "write_samples",
    "read_samples",
]

CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """A sample set.

    ``values`` keeps draw order, which is what makes disjoint groups in
    :func:`renormalize` independent; ``sorted`` is the ascending view used for
    CDF and tail queries.
    """

    values: np.ndarray
    provenance: str = "external"
    sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < 2:
            raise InvalidParameter("an empirical distribution needs at least 2 values")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("sample values must be finite")
        v.setflags(write=False)
        s = np.sort(v)
        s.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sorted", s)

    @property
    def size(self) -> int:
        return self.values.size

    def cdf(self, x):
        return np.searchsorted(self.sorted, x, side="right") / self.size

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def quantile(self, q):
        return np.quantile(self.sorted, q)

    def median(self) -> float:
        return float(np.median(self.sorted))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _cms(alpha: float, beta: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Chambers-Mallows-Stuck draws of the unit S1 law (sigma = 1, location 0)."""
    V = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    W = rng.standard_exponential(size)
    if alpha == 1:
        hb = 0.5 * np.pi + beta * V
        return (2 / np.pi) * (hb * np.tan(V) - beta * np.log(0.5 * np.pi * W * np.cos(V) / hb))
    zeta = -beta * math.tan(0.5 * np.pi * alpha)
    xi = math.atan(-zeta) / alpha
    scale = (1 + zeta * zeta) ** (0.5 / alpha)
    t = alpha * (V + xi)
    return (scale * np.sin(t) / np.cos(V) ** (1 / alpha)
            * (np.cos(V - t) / W) ** ((1 - alpha) / alpha))


def _draw(law: StableLaw1D, rng: np.random.Generator, size: int) -> np.ndarray:
    if law.alpha == 2:
        return law.a + math.sqrt(law.variance) * rng.standard_normal(size)
    sigma, beta = law.sigma, law.beta
    z = _cms(law.alpha, beta, rng, size)
    if law.alpha == 1:
        # drift (c1 - c2)(1 - euler_gamma) from the log-CF convention, plus the scale log term
        mu = law.a + (law.c1 - law.c2) * (1 - np.euler_gamma)
        return sigma * z + (2 / np.pi) * beta * sigma * math.log(sigma) + mu
    return sigma * z + law.a


def sample(law: StableLaw1D, n: int, seed: int = 0, workers: int = 1) -> EmpiricalDistribution:
    """``n`` i.i.d. draws of ``law``.

    Chunk ``i`` uses the seed sequence ``(seed, i)``, so the output does not
    depend on ``workers``.
    """
    if n < 2:
        raise InvalidParameter("need n >= 2 draws")
    sizes = [min(CHUNK, n - i) for i in range(0, n, CHUNK)]

    def chunk(i):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), i])))
        return _draw(law, rng, sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(chunk, range(len(sizes))))
    else:
        parts = [chunk(i) for i in range(len(sizes))]
    return EmpiricalDistribution(np.concatenate(parts), provenance=f"sample({law!r}, seed={seed})")


def renormalize(samples: EmpiricalDistribution, n: int, alpha: float,
                b_n: float = 0.0) -> EmpiricalDistribution:
    """``(X_1 + ... + X_n - b_n) / n^(1/alpha)`` over disjoint groups in draw order."""
    if n < 1 or int(n) != n:
        raise InvalidParameter("group size must be a positive integer")
    if not 0 < alpha <= 2:
        raise InvalidParameter("alpha must lie in (0, 2]")
    n = int(n)
    m = samples.size // n
    if m < 2:
        raise GroupTooLarge(f"{samples.size} values cannot form two groups of {n}")
    sums = samples.values[: m * n].reshape(m, n).sum(axis=1)
    return EmpiricalDistribution((sums - b_n) / n ** (1.0 / alpha),
                                 provenance=f"renormalize(n={n}, alpha={alpha}, b_n={b_n})")


def ks_statistic(x: EmpiricalDistribution, y: EmpiricalDistribution) -> float:
    return float(stats.ks_2samp(x.sorted, y.sorted, method="asymp").statistic)


def ks_critical_value(n: int, m: int, level: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value ``c(level) sqrt((n + m) / (n m))``."""
    c = math.sqrt(-0.5 * math.log(0.5 * level))
    return c * math.sqrt((n + m) / (n * m))


def fixed_point_distance_samples(base: EmpiricalDistribution, pool: EmpiricalDistribution,
                                 n: int, alpha: float, b_n: float = 0.0) -> float:
    """KS distance between ``base`` and the renormalized ``pool``."""
    return ks_statistic(base, renormalize(pool, n, alpha, b_n))


def fixed_point_distance(law: StableLaw1D, n: int, N: int, seed: int = 0,
                         workers: int = 1) -> float:
    """KS distance between ``N`` draws of ``law`` and ``N`` renormalized n-sums.

    The two samples come from independent seed streams derived from ``seed``;
    the centering is the law's own ``b_n``, so non-strict laws are allowed.
    """
    base = sample(law, N, seed=_child(seed, 0), workers=workers)
    pool = sample(law, N * n, seed=_child(seed, 1), workers=workers)
    return fixed_point_distance_samples(base, pool, n, law.alpha,
                                        stable1d.centering_shift(law, float(n)))


def _child(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([int(seed), 0x5EED, k]).generate_state(1, np.uint64)[0])


def empirical_cf(samples: EmpiricalDistribution, y) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return np.array([np.mean(np.exp(1j * v * samples.values)) for v in y])


# ---------------------------------------------------------------------------
# tail models and attraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TailModel:
    """A distribution described through its two tails.

    ``log_right(x) = log(1 - F(x))`` and ``log_left(x) = log F(-x)`` for x > 0.
    ``alpha`` is the tail exponent when known (None for light tails).
    """

    log_right: Callable[[float], float]
    log_left: Callable[[float], float]
    name: str = "custom"
    alpha: float | None = None
    mean: float | None = None
    inverse_h: Callable[[float], float] | None = None

    def log_h(self, x: float) -> float:
        return float(np.logaddexp(self.log_right(x), self.log_left(x)))

    def h(self, x: float) -> float:
        return math.exp(self.log_h(x))

    def cdf(self, x: float) -> float:
        if x > 0:
            return -math.expm1(self.log_right(x))
        if x < 0:
            return math.exp(self.log_left(-x))
        return 0.5 * (math.exp(self.log_left(0.0)) + 1 - math.exp(self.log_right(0.0)))

    @classmethod
    def pareto(cls, alpha: float, c_right: float = 1.0, c_left: float = 0.0,
               shift: float = 0.0) -> "TailModel":
        """``1 - F(x) = c_right x^-alpha``, ``F(-x) = c_left x^-alpha`` for x >= 1, then shifted.

        The mass ``1 - c_right - c_left`` sits at the origin (before the shift).
        """
        if alpha <= 0 or c_right < 0 or c_left < 0 or c_right + c_left > 1 or c_right + c_left == 0:
            raise InvalidParameter("need alpha > 0, c >= 0 and 0 < c_right + c_left <= 1")

        def one_side(c):
            lc = math.log(c) if c > 0 else -math.inf

            def f(x):
                return lc - alpha * math.log(x) if x >= 1 else lc
            return f

        right, left = one_side(c_right), one_side(c_left)
        mean = None
        if alpha > 1:
            mean = shift + (c_right - c_left) * alpha / (alpha - 1)
        def inv(q):
            # h(x) = (c_right + c_left) x^-alpha on x >= 1
            return max(1.0, ((c_right + c_left) / q) ** (1.0 / alpha))

        base = cls(right, left, f"pareto({alpha})", alpha, mean, inv)
        return base if shift == 0 else base.shifted(shift)

    def shifted(self, m: float) -> "TailModel":
        """Tail model of ``X + m``."""
        r, l = self.log_right, self.log_left

        def right(x):
            y = x - m
            if y > 0:
                return r(y)
            if y < 0:
                return math.log1p(-math.exp(l(-y)))
            return r(0.0)

        def left(x):
            y = x + m
            if y > 0:
                return l(y)
            if y < 0:
                return math.log1p(-math.exp(r(-y)))
            return l(0.0)

        mean = None if self.mean is None else self.mean + m
        return TailModel(right, left, f"{self.name}+{m}", self.alpha, mean, None)

    @classmethod
    def gaussian(cls, sigma: float = 1.0, mean: float = 0.0) -> "TailModel":
        return cls(lambda x: float(stats.norm.logsf(x, mean, sigma)),
                   lambda x: float(stats.norm.logcdf(-x, mean, sigma)),
                   "gaussian", None, mean, None)

    @classmethod
    def log_corrected_pareto(cls, alpha: float) -> "TailModel":
        """One-sided tail ``1 - F(x) = e alpha x^-alpha ln x`` for ``x >= e^(1/alpha)``.

        ``ln x`` is slowly varying, so the law is still attracted to the
        alpha-stable law.
        """
        if not 0 < alpha <= 2:
            raise InvalidParameter("alpha must lie in (0, 2]")
        x0 = math.exp(1.0 / alpha)
        lnorm = math.log(alpha * math.e)

        def right(x):
            if x < x0:
                return 0.0
            return lnorm - alpha * math.log(x) + math.log(math.log(x))

        mean = None
        if alpha > 1:
            mean = x0 + integrate.quad(lambda x: math.exp(right(x)), x0, math.inf)[0]
        return cls(right, lambda x: -math.inf, f"pareto-log({alpha})", alpha, mean, None)


@dataclass(frozen=True)
class AttractionResult:
    attracted: bool
    c_ratio: float
    errors: dict = field(default_factory=dict)
    intercepts: dict = field(default_factory=dict)


def attraction_test(tail: TailModel, alpha: float, k_grid: Sequence[float] = (2.0, 5.0, 10.0),
                    x_grid: Sequence[float] | None = None, tol: float = 1e-3,
                    extrapolation_tol: float = 0.05) -> AttractionResult:
    """Decide whether ``tail`` is in the domain of attraction of an alpha-stable law.

    For each k, ``e(x) = |log(h(x)/h(kx)) - alpha log k|`` is tracked along the
    x-grid.  The limit holds if ``e`` is already below ``tol`` at the last
    point, or if it decreases over the last three points and a fit of ``e``
    against ``1/ln x`` extrapolates to within ``extrapolation_tol`` of 0
    (the rate of a slowly varying correction).  ``c_ratio`` is the limit of
    ``F(-x) / (1 - F(x))``.
    """
    if not 0 < alpha <= 2:
        raise InvalidParameter("alpha must lie in (0, 2]")
    if any(k <= 0 for k in k_grid):
        raise InvalidParameter("k values must be positive")
    xs = np.asarray(x_grid if x_grid is not None else np.logspace(2, 6, 5), dtype=float)
    if xs.size < 3:
        raise InvalidParameter("x-grid needs at least 3 points")
    attracted = True
    errors, intercepts = {}, {}
    for k in k_grid:
        e = np.array([abs(tail.log_h(x) - tail.log_h(k * x) - alpha * math.log(k)) for x in xs])
        errors[float(k)] = e
        if not np.all(np.isfinite(e)):
            attracted = False
            continue
        if e[-1] <= tol:
            intercepts[float(k)] = float(e[-1])
            continue
        d = np.diff(e[-3:])
        slack = 1e-12 * max(1.0, float(e[-3:].max()))
        if np.all(d <= slack):
            slope, icpt = np.polyfit(1.0 / np.log(xs[-3:]), e[-3:], 1)
            intercepts[float(k)] = float(icpt)
            attracted &= abs(icpt) <= extrapolation_tol
        elif np.all(d >= -slack):
            intercepts[float(k)] = math.inf
            attracted = False
        else:
            raise LimitNotConverged(f"tail ratio errors for k={k} are not monotone: {e[-3:]}")
    return AttractionResult(bool(attracted), _c_ratio(tail, xs), errors, intercepts)


def _c_ratio(tail: TailModel, xs) -> float:
    lr = np.array([tail.log_left(x) - tail.log_right(x) for x in xs[-3:]])
    if np.all(lr == -np.inf):
        return 0.0
    if np.all(lr == np.inf):
        return math.inf
    d = np.diff(lr)
    if np.all(np.abs(d) < 1e-6):
        return float(math.exp(lr[-1]))
    if np.all(d < 0) or np.all(d > 0):
        # monotone drift in log ratio: report the direction of the limit
        if lr[-1] < -30:
            return 0.0
        if lr[-1] > 30:
            return math.inf
        return float(math.exp(lr[-1]))
    raise LimitNotConverged(f"F(-x)/(1-F(x)) does not settle: {np.exp(lr)}")


def norm_constants(tail: TailModel, alpha: float, n: int) -> tuple[float, float]:
    """``(A_n, b_n)`` with ``n h(A_n) = 1`` and the centering of the alpha case.

    alpha < 1: ``b_n = 0``; 1 < alpha <= 2: ``b_n = n E[X]``;
    alpha = 1: ``b_n = n A_n^2 E[X / (X^2 + A_n^2)]``.
    """
    if n < 1:
        raise InvalidParameter("n must be positive")
    if not 0 < alpha <= 2:
        raise InvalidParameter("alpha must lie in (0, 2]")
    A = _solve_A(tail, n)
    if alpha < 1:
        return A, 0.0
    if alpha > 1:
        if tail.mean is None or (tail.alpha is not None and tail.alpha <= 1):
            raise MeanUndefined(f"{tail.name} has no finite mean")
        return A, n * tail.mean
    return A, n * A * A * _truncated_mean(tail, A)


def _solve_A(tail: TailModel, n: int) -> float:
    if tail.inverse_h is not None:
        return float(tail.inverse_h(1.0 / n))
    target = -math.log(n)

    def f(u):
        return tail.log_h(math.exp(u)) - target

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if f(hi) < 0:
            break
        hi *= 2
    else:
        raise RootBracketFailure("could not bracket n h(A) = 1 from above")
    for _ in range(200):
        if f(lo) > 0:
            break
        lo = lo * 2 if lo < 0 else lo - 1
    else:
        raise RootBracketFailure("could not bracket n h(A) = 1 from below")
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15))


def _truncated_mean(tail: TailModel, A: float) -> float:
    """``E[X / (X^2 + A^2)]`` integrated by parts against the two tails."""
    def dg(x):
        return (A * A - x * x) / (x * x + A * A) ** 2

    def integrand(x):
        return dg(x) * (math.exp(tail.log_right(x)) - math.exp(tail.log_left(x)))

    pts = sorted({1.0, A})
    edges = [0.0] + pts
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, a, b, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
    total += integrate.quad(integrand, edges[-1], math.inf, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
    return total


# ---------------------------------------------------------------------------
# tail index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailIndexEstimate:
    alpha_hat: float
    k: int
    light_tail: bool


def tail_index_estimate(samples: EmpiricalDistribution, k: int) -> TailIndexEstimate:
    """Hill estimator on the ``k`` largest ``|X|``.

    An estimate of 2 or more cannot come from a non-Gaussian stable law and is
    flagged as a light tail.
    """
    N = samples.size
    if not 1 <= k < N / 2:
        raise InvalidParameter(f"need 1 <= k < N/2, got k={k}, N={N}")
    top = np.sort(np.abs(samples.values))[::-1][: k + 1]
    if top[k] <= 0:
        raise DegenerateTail("threshold order statistic is not positive")
    s = float(np.sum(np.log(top[:k] / top[k])))
    if s <= 0:
        raise DegenerateTail("upper order statistics are tied")
    a = k / s
    return TailIndexEstimate(a, k, a >= 2.0)


# ---------------------------------------------------------------------------
# sample files
# ---------------------------------------------------------------------------


def write_samples(path, values, fmt: str = "binary") -> None:
    """Binary: little-endian uint64 count then float64 values; text: one value per line."""
    v = np.asarray(values, dtype="<f8").ravel()
    path = Path(path)
    if fmt == "binary":
        path.write_bytes(struct.pack("<Q", v.size) + v.tobytes())
    elif fmt == "text":
        path.write_text("".join(f"{x!r}\n" for x in v.tolist()))
    else:
        raise InvalidParameter(f"unknown sample format {fmt!r}")


def read_samples(path, fmt: str = "binary") -> np.ndarray:
    path = Path(path)
    if fmt == "text":
        return np.loadtxt(path, dtype=float, ndmin=1)
    if fmt != "binary":
        raise InvalidParameter(f"unknown sample format {fmt!r}")
    raw = path.read_bytes()
    if len(raw) < 8:
        raise InvalidParameter("sample file is too short")
    (count,) = struct.unpack("<Q", raw[:8])
    if len(raw) != 8 + 8 * count:
        raise InvalidParameter(f"sample file holds {(len(raw) - 8) / 8} values, header says {count}")
    return np.frombuffer(raw, dtype="<f8", offset=8).astype(float)
