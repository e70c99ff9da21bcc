import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from stablemech import renorm_sampling as rs
from stablemech import stable1d as s1
from stablemech import stable_density as sd
from stablemech.errors import AlphaEqualsOne, InadmissibleRho, InvalidParameter, NotCoprime, PoleError
from stablemech.stable1d import StableLaw1D


# ---------------------------------------------------------------- Mellin transform

@pytest.mark.parametrize("alpha,rho", [(2.0, 0.5), (1.0, 0.5), (0.5, 1.0), (1.5, 0.4), (0.7, 0.2)])
def test_mellin_limit_at_one(alpha, rho):
    spec = sd.MellinSpec(alpha, rho)
    for s in (1 + 1e-6, 1 - 1e-6, 1.0):
        assert abs(sd.mellin_value(spec, s) - rho) < 1e-6


def test_mellin_cauchy_oracle():
    # int_0^inf x^0.5 / (pi (1 + x^2)) dx = 1/sqrt(2)
    oracle = integrate.quad(lambda x: x ** 0.5 / (math.pi * (1 + x * x)), 0, np.inf)[0]
    assert oracle == pytest.approx(1 / math.sqrt(2), rel=1e-9)
    assert sd.mellin_value(sd.MellinSpec(1.0, 0.5), 1.5).real == pytest.approx(oracle, rel=1e-12)


def test_mellin_gaussian_oracle():
    # half-line second moment of N(0, 2): int_0^inf x^2 g = 1
    oracle = integrate.quad(lambda x: x * x * math.exp(-x * x / 4) / math.sqrt(4 * math.pi), 0, np.inf)[0]
    assert sd.mellin_value(sd.MellinSpec(2.0, 0.5), 3.0).real == pytest.approx(oracle, rel=1e-12)


def test_mellin_pole():
    with pytest.raises(PoleError):
        sd.mellin_value(sd.MellinSpec(0.5, 1.0), 1.5)
    with pytest.raises(PoleError):
        sd.mellin_numeric(1.0, 0.5, 2.0)


def test_mellin_spec_rejects_rho():
    with pytest.raises(InadmissibleRho):
        sd.MellinSpec(1.5, 0.9)


MELLIN_CASES = [(a, r, s) for a, r in [(2.0, 0.5), (1.0, 0.5), (1.5, 0.4)] for s in (1.2, 1.5, 1.8)]
# the alpha = 1/2 integral diverges at s >= 1.5
MELLIN_CASES += [(0.5, 1.0, 1.2), (0.5, 1.0, 1.3), (0.5, 1.0, 1.45)]


@pytest.mark.parametrize("alpha,rho,s", MELLIN_CASES)
def test_mellin_matches_inverted_density(alpha, rho, s):
    num = sd.mellin_numeric(alpha, rho, s)
    assert abs(num - sd.mellin_value(sd.MellinSpec(alpha, rho), s).real) < 1e-4


@given(st.floats(0.3, 2.0), st.floats(0.05, 0.95), st.floats(-2.0, 2.0), st.floats(0.2, 1.1))
def test_fox_kernel_is_mellin(alpha, frac, t, s):
    lo, hi = s1.admissible_rho(alpha)
    rho = lo + frac * (hi - lo)
    if s >= 1 + alpha:
        return
    z = complex(s, t)
    try:
        want = sd.mellin_value(sd.MellinSpec(alpha, rho), z)
    except PoleError:
        return
    got = sd.fox_mellin(sd.fox_params(alpha, rho), z)
    # the H kernel is Gamma(s-1)Gamma(1+1/alpha-s/alpha)/(Gamma(rho s - rho)Gamma(1+rho-rho s))
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


# ---------------------------------------------------------------- parameter blocks

def test_fox_params_examples():
    p = sd.fox_params(Fraction(2), Fraction(1, 2))
    h = Fraction(1, 2)
    assert p.upper == ((-h, h), (-h, h))
    assert p.lower == ((-1, 1), (-h, h))
    assert sd.fox_params(Fraction(1), Fraction(1, 2)).upper == ((-1, 1), (-h, h))
    assert sd.fox_params(0.7, 0.3).orders == (1, 1, 2, 2)


def test_meijer_examples():
    g = sd.meijer_reduction(1, 2, 1)
    assert g.alpha == Fraction(1, 2) and g.rho == 1
    assert g.orders == (0, 0, 1, 0)
    assert g.upper == (Fraction(1, 2),) and g.lower == ()
    assert sd.meijer_reduction(2, 1, 1).ode_order == 1
    with pytest.raises(NotCoprime):
        sd.meijer_reduction(4, 2, 1)
    with pytest.raises(InadmissibleRho):
        sd.meijer_reduction(3, 2, 3)


@given(st.integers(1, 7), st.integers(1, 7), st.integers(1, 7))
def test_meijer_structure(M, N, L):
    try:
        g = sd.meijer_reduction(M, N, L)
    except (NotCoprime, InadmissibleRho, InvalidParameter):
        return
    assert min(g.orders) >= 0
    assert g.orders[2] == len(g.upper) and g.orders[3] == len(g.lower)
    assert g.ode_order == max(M - 1, N - 1)
    assert g.prefactor == pytest.approx((2 * math.pi) ** (L - (M + N) / 2) * math.sqrt(M * N))


def test_meijer_levy_density():
    # alpha = 1/2, rho = 1: prefactor (2 pi)^{-1/2} sqrt 2, argument 4 x
    g = sd.meijer_reduction(1, 2, 1)
    assert g.arg_coeff == 4 and g.arg_power == 1
    assert g.prefactor_exponent == Fraction(-1, 2)


# ---------------------------------------------------------------- density

def test_density_normal():
    law = StableLaw1D(2.0, variance=2.0)
    assert sd.density(law, 0.0) == pytest.approx((4 * math.pi) ** -0.5, rel=1e-10)
    x = np.array([-3.0, 0.4, 5.0])
    assert np.allclose(sd.density(law, x), stats.norm(scale=math.sqrt(2)).pdf(x), rtol=1e-9, atol=1e-15)


def test_density_cauchy():
    law = StableLaw1D(1.0, 1 / math.pi, 1 / math.pi)  # unit scale
    assert law.sigma == pytest.approx(1.0)
    x = np.array([0.0, 0.5, -3.0, 40.0, 3e3, 1e5])
    assert np.allclose(sd.density(law, x), 1 / (math.pi * (1 + x * x)), rtol=1e-8)


def levy_closed(x):
    return np.where(x > 0, np.exp(-1 / (2 * np.maximum(x, 1e-300))) / np.sqrt(2 * math.pi) / np.maximum(x, 1e-300) ** 1.5, 0.0)


def test_density_levy():
    law = StableLaw1D.from_sigma_beta(0.5, 1.0, 1.0)
    x = np.array([0.05, 0.3, 1.0, 7.0, 300.0, 1e5])
    assert np.allclose(sd.density(law, x), levy_closed(x), rtol=1e-8, atol=1e-15)
    assert sd.density(law, 1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-9)
    assert sd.density(law, -1.0) == 0.0


LAWS = [
    StableLaw1D(1.5, 0.5, 0.5),
    StableLaw1D.from_sigma_beta(1.3, 1.0, 0.6, 0.2),
    StableLaw1D.from_sigma_beta(0.7, 1.0, -0.4),
    StableLaw1D(1.0, 0.3, 0.3, 0.5),
    StableLaw1D.from_sigma_beta(0.5, 1.0, 1.0),
    StableLaw1D(2.0, variance=2.0),
]


@pytest.mark.parametrize("law", LAWS, ids=lambda l: f"a{l.alpha}_b{l.beta:.2f}")
def test_density_nonnegative_and_normalized(law):
    lo, hi = sd.quantile(law, 0.001), sd.quantile(law, 0.999)
    g = sd.density(law, np.linspace(lo, hi, 200))
    assert np.all(g >= -1e-12)
    assert abs(sd.total_mass(law) - 1.0) < 1e-6


@pytest.mark.parametrize("law", LAWS[:4], ids=lambda l: f"a{l.alpha}")
def test_cdf_density_consistency(law):
    a, b = -0.7, 1.9
    mass = integrate.quad(lambda x: float(sd.density(law, x)), a, b, epsabs=1e-12)[0]
    assert sd.cdf(law, b) - sd.cdf(law, a) == pytest.approx(mass, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5, 1.9])
def test_symmetry(alpha):
    law = StableLaw1D(alpha, 0.4, 0.4)
    x = np.array([0.1, 1.3, 7.0, 150.0, 5e3])
    assert np.allclose(sd.density(law, x), sd.density(law, -x), rtol=0, atol=1e-8)


def test_quantile_inverts_cdf():
    law = LAWS[1]
    for q in (0.01, 0.3, 0.5, 0.97):
        assert sd.cdf(law, sd.quantile(law, q)) == pytest.approx(q, abs=1e-9)


def test_unit_law_has_rho_as_positive_mass():
    for alpha, rho in ((1.5, 0.4), (0.7, 0.8), (1.0, 0.3)):
        law = sd.unit_law(alpha, rho)
        assert 1 - sd.cdf(law, 0.0) == pytest.approx(rho, abs=1e-8)


def test_unit_scale_round_trip():
    law = StableLaw1D.from_sigma_beta(1.3, 2.5, 0.6, 0.7)
    rho, scale, shift = sd.unit_scale(law)
    unit = sd.unit_law(1.3, rho)
    x = np.array([-1.0, 0.5, 4.0])
    assert np.allclose(sd.density(law, x), sd.density(unit, (x - shift) / scale) / scale, rtol=1e-8)
    with pytest.raises(AlphaEqualsOne):
        sd.unit_scale(StableLaw1D(1.0, 1.0, 0.2))


def test_scaling_matches_convolution():
    # t-fold sums rescaled by t^{1/alpha} follow the same density
    law = StableLaw1D.from_sigma_beta(1.5, 1.0, 0.3)
    t = 4
    draws = rs.sample(law, 4 * 100_000, seed=11).values.reshape(-1, t).sum(axis=1) / t ** (1 / 1.5)
    grid = np.sort(draws)
    F = sd.cdf(law, grid[::100])
    ks = np.max(np.abs(F - (np.arange(0, grid.size, 100) + 0.5) / grid.size))
    assert ks < 0.02
