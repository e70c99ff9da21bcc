import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from conftest import poisson_series_cf
from stablemech import levy_core as lc
from stablemech.errors import (
    DimensionMismatch,
    DivergentMoment,
    IncompatibleAlpha,
    InvalidRate,
    NonPositiveT,
    NonSymmetricR,
)


def stable_triple(c1=1.0, c2=0.5, alpha=1.5, a=0.2):
    return lc.LevyTriple([a], [[0.0]], lc.StablePowerTail(c1, c2, alpha))


TRIPLES = [
    lc.gaussian_triple(0.3, 1.7),
    lc.poisson_triple([(1.0, 1.0), (-2.0, 0.4)]),
    stable_triple(),
    stable_triple(0.7, 0.0, 0.6, -0.1),
    lc.LevyTriple([0.1], [[0.5]], lc.NumericTail(lambda x: math.exp(-abs(x)) / abs(x), decay_rate=1.0)),
]


def test_gaussian_log_cf():
    t = lc.LevyTriple([0.0], [[2.0]])
    assert lc.eval_log_cf(t, 1.0) == pytest.approx(-1.0 + 0j, abs=1e-15)


@pytest.mark.parametrize("triple", TRIPLES)
def test_log_cf_vanishes_at_zero(triple):
    assert lc.eval_log_cf(triple, 0.0) == 0


@pytest.mark.parametrize("triple", TRIPLES)
@pytest.mark.parametrize("y", [0.3, 1.1, 4.0])
def test_hermitian_symmetry(triple, y):
    assert lc.eval_log_cf(triple, -y) == pytest.approx(lc.eval_log_cf(triple, y).conjugate(), abs=1e-9)


def test_poisson_against_series():
    t = lc.poisson_triple([(1.0, 1.0)])
    for y in (0.7, 1.9, -2.4):
        assert cmath.exp(lc.eval_log_cf(t, y)) == pytest.approx(poisson_series_cf(y), abs=1e-8)


def test_poisson_log_cf_form():
    lam = 2.5
    t = lc.poisson_triple([(1.0, lam)])
    y = 0.7
    assert lc.eval_log_cf(t, y) == pytest.approx(lam * (cmath.exp(1j * y) - 1), abs=1e-12)


def test_gaussian_partition_shift():
    assert lc.log_partition_shift(lc.gaussian_triple(0.0, 1.0), 2.0) == pytest.approx(2.0)
    assert lc.log_partition_shift(lc.gaussian_triple(0.0, 1.0), 0.0) == 0.0


def test_atomic_partition_shift():
    t = lc.LevyTriple([0.0], [[0.0]], lc.AtomicMeasure(((1.0,),), (1.0,)))
    expected = math.exp(-1) - 1 + 0.5
    assert lc.log_partition_shift(t, 1.0) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-0.13212, abs=1e-5)


def test_partition_shift_against_quadrature():
    # one-sided measure on x > 0: e^{-vx} decays for v > 0
    t = stable_triple(1.0, 0.0, 0.6, 0.3)
    v = 0.8
    f = lambda x: (math.exp(-v * x) - 1 + v * x / (1 + x * x)) * t.M.density(x)
    oracle = -v * 0.3 + integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, math.inf, limit=200)[0]
    assert lc.log_partition_shift(t, v) == pytest.approx(oracle, rel=1e-8)


def test_divergent_moment():
    with pytest.raises(DivergentMoment):
        lc.log_partition_shift(stable_triple(1.0, 0.5, 1.5), 1.0)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_partition_shift_convex(v, dv):
    t = lc.poisson_triple([(1.0, 0.8), (-0.5, 1.3)])
    h = 1e-3
    f = lambda x: lc.log_partition_shift(t, x)
    assert f(v + h) - 2 * f(v) + f(v - h) >= -1e-12


def test_convolve_gaussians():
    out = lc.convolve(lc.gaussian_triple(0.0, 1.0), lc.gaussian_triple(0.0, 2.0))
    assert out == lc.gaussian_triple(0.0, 3.0)


def test_convolve_stable_tails():
    out = lc.convolve(stable_triple(1.0, 0.0, 1.5, 0.0), stable_triple(0.5, 0.0, 1.5, 0.0))
    assert out.M == lc.StablePowerTail(1.5, 0.0, 1.5)
    with pytest.raises(IncompatibleAlpha):
        lc.convolve(stable_triple(alpha=1.5), stable_triple(alpha=1.2))


def test_convolve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lc.convolve(lc.gaussian_triple(0.0, 1.0), lc.gaussian_triple([0.0, 0.0], np.eye(2)))


def test_convolve_log_cf_additive(rng):
    pairs = [(TRIPLES[0], TRIPLES[1]), (TRIPLES[2], TRIPLES[4]), (TRIPLES[1], TRIPLES[3])]
    for t1, t2 in pairs:
        both = lc.convolve(t1, t2)
        for y in rng.uniform(-3, 3, 10):
            assert lc.eval_log_cf(both, y) == pytest.approx(
                lc.eval_log_cf(t1, y) + lc.eval_log_cf(t2, y), abs=1e-10)


def test_convolve_commutes_and_associates(rng):
    a, b, c = TRIPLES[0], TRIPLES[1], TRIPLES[2]
    for y in rng.uniform(-3, 3, 5):
        left = lc.eval_log_cf(lc.convolve(lc.convolve(a, b), c), y)
        right = lc.eval_log_cf(lc.convolve(a, lc.convolve(c, b)), y)
        assert left == pytest.approx(right, abs=1e-10)


def test_scale_power():
    g = lc.gaussian_triple(0.0, 1.0)
    assert lc.scale_power(g, 1.0) == g
    assert lc.scale_power(g, 4.0) == lc.gaussian_triple(0.0, 4.0)
    t = lc.LevyTriple([0.0], [[0.0]], lc.StablePowerTail(1.0, 1.0, 1.5))
    assert lc.eval_log_cf(lc.scale_power(t, 2.0), 0.3) == pytest.approx(
        2 * lc.eval_log_cf(t, 0.3), rel=1e-10)
    with pytest.raises(NonPositiveT):
        lc.scale_power(g, 0.0)


@given(st.floats(0.1, 5), st.floats(0.1, 5))
def test_scale_power_semigroup(s, t):
    for tr in (TRIPLES[0], TRIPLES[1], TRIPLES[2]):
        one = lc.scale_power(lc.scale_power(tr, s), t)
        two = lc.scale_power(tr, s * t)
        np.testing.assert_allclose(one.a, two.a, rtol=1e-14)
        np.testing.assert_allclose(one.R, two.R, rtol=1e-14)


def test_constructors():
    with pytest.raises(InvalidRate):
        lc.poisson_triple([(1.0, 0.0)])
    with pytest.raises(NonSymmetricR):
        lc.gaussian_triple([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])
    deg = lc.gaussian_triple(0.0, 0.0)
    assert lc.eval_log_cf(deg, 1.3) == 0
    shift = lc.gaussian_triple(0.4, 0.0)
    assert lc.eval_log_cf(shift, 1.5) == pytest.approx(1j * 1.5 * 0.4)


def test_two_dimensional_triple():
    t = lc.LevyTriple([0.1, -0.2], [[1.0, 0.3], [0.3, 2.0]],
                      lc.AtomicMeasure(((1.0, 0.5),), (0.7,)))
    y = np.array([0.4, -0.9])
    z = lc.eval_log_cf(t, y)
    x = np.array([1.0, 0.5])
    expected = (1j * y @ t.a - 0.5 * y @ t.R @ y
                + 0.7 * (cmath.exp(1j * y @ x) - 1 - 1j * (y @ x) / (1 + x @ x)))
    assert z == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("triple", TRIPLES[:4])
def test_json_round_trip(triple):
    back = lc.loads(lc.dumps(triple))
    assert lc.eval_log_cf(back, 0.9) == pytest.approx(lc.eval_log_cf(triple, 0.9), abs=1e-12)
    doc = json.loads(lc.dumps(triple))
    assert set(doc) == {"a", "R", "M"}
    assert doc["M"]["kind"] in ("atomic", "stable", "numeric")
