import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from stablemech import operator_stable2d as os2
from stablemech.errors import (
    DomainError,
    InvalidParameter,
    NonPositiveT,
    NormalLaw,
    OneInSpectrum,
    UnsupportedShape,
)
from stablemech.operator_stable2d import ExponentMatrix, OperatorStableLaw2D

SHAPES = [
    ExponentMatrix.diagonal(2.0, 4 / 3),
    ExponentMatrix.diagonal(1.0, 1.5),
    ExponentMatrix.scalar(1.7),
    ExponentMatrix.lower_triangular(1.5, 0.4),
    ExponentMatrix.lower_triangular(1.0, -0.3),
    ExponentMatrix.symmetric(1.2, 0.1),
    ExponentMatrix.symmetric(1.5, 1 / 6),  # eigenvalue exactly 1 on one axis
]


# ---------------------------------------------------------------- b(t)

def test_b_examples():
    B = ExponentMatrix.diagonal(1.0, 2.0)
    assert np.array_equal(os2.b_of_t(B, (1.0, 1.0), 1.0), [0.0, 0.0])
    b = os2.b_of_t(B, (1.0, 1.0), math.e)
    assert b[0] == pytest.approx(math.e, rel=1e-15)
    assert os2.b_of_t(B, (1.0, 1.0), 4.0)[1] == pytest.approx(4.0, rel=1e-15)
    assert os2.b_of_t_quadrature(B, (1.0, 1.0), 4.0)[1] == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("B", SHAPES, ids=lambda B: f"{B.shape}-{B.c}")
@pytest.mark.parametrize("t", [0.05, 0.7, 1.3, 9.0, 250.0])
def test_b_matches_quadrature(B, t):
    d = (0.7, -1.2)
    want = os2.b_of_t_quadrature(B, d, t)
    assert np.allclose(os2.b_of_t(B, d, t), want, rtol=1e-10, atol=1e-10)


def test_alpha_one_log_entry():
    B = ExponentMatrix.diagonal(1.0, 1.5)
    for t in (0.1, 3.0, 40.0):
        assert os2.b_of_t(B, (2.0, 0.0), t)[0] == pytest.approx(2.0 * t * math.log(t), rel=1e-14)


def test_diagonal_closed_form():
    a = 4 / 3
    for t in (0.2, 5.0):
        got = os2.b_of_t(ExponentMatrix.diagonal(2.0, a), (1.0, 1.0), t)[1]
        assert got == pytest.approx((t - t ** (1 / a)) / (1 - 1 / a), rel=1e-13)


@pytest.mark.parametrize("B", SHAPES, ids=lambda B: f"{B.shape}-{B.c}")
def test_cocycle(B):
    d = np.array([0.3, 1.1])
    for s, t in ((2.0, 3.0), (0.4, 7.0), (1.5, 0.2)):
        lhs = os2.b_of_t(B, d, s * t)
        rhs = os2.t_power(B, s) @ os2.b_of_t(B, d, t) + t * os2.b_of_t(B, d, s)
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_cocycle_symbolic():
    s, t, lam, dd = sp.symbols("s t lam d", positive=True)

    def b(x):
        return dd * (x - x ** lam) / (1 - lam)

    expr = b(s * t) - (s ** lam * b(t) + t * b(s))
    assert sp.simplify(sp.expand_power_base(expr, force=True)) == 0
    log_b = lambda x: dd * x * sp.log(x)
    expr = log_b(s * t) - (s * log_b(t) + t * log_b(s))
    assert sp.simplify(sp.expand_log(expr, force=True)) == 0


def test_t_power_is_expm():
    from scipy import linalg

    for B in SHAPES:
        for t in (0.3, 6.0):
            assert np.allclose(os2.t_power(B, t), linalg.expm(B.matrix * math.log(t)), rtol=1e-12)


def test_nonpositive_t():
    with pytest.raises(NonPositiveT):
        os2.b_of_t(SHAPES[0], (1, 1), 0.0)
    with pytest.raises(NonPositiveT):
        os2.b_of_t(SHAPES[0], (1, 1), -2.0)


# ---------------------------------------------------------------- spectrum

def test_spectrum_examples():
    r = os2.spectrum_check(ExponentMatrix.diagonal(2.0, 2.0))
    assert r.valid and r.Lambda == 0.5
    r = os2.spectrum_check(ExponentMatrix.diagonal(0.5, 1.0))
    assert r.valid and r.Lambda == 2.0
    assert not os2.spectrum_check(np.diag([0.4, 1.0])).valid
    with pytest.raises(UnsupportedShape):
        os2.spectrum_check([[1.0, 0.3], [0.2, 1.0]])


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_spectrum_matches_alpha_bound(a1, a2):
    valid = os2.spectrum_check(ExponentMatrix.diagonal(a1, a2)).valid
    assert valid == (a1 <= 2 and a2 <= 2)


def test_moment_cutoff():
    assert os2.moment_cutoff(ExponentMatrix.diagonal(2.0, 4 / 3)) == pytest.approx(4 / 3)
    assert os2.moment_cutoff(ExponentMatrix.diagonal(1.0, 1.0)) == 1.0
    for a in (0.5, 1.3, 1.9):
        assert os2.moment_cutoff(ExponentMatrix.scalar(a)) == pytest.approx(a)
    with pytest.raises(NormalLaw):
        os2.moment_cutoff(ExponentMatrix.scalar(2.0))
    with pytest.raises(InvalidParameter):
        os2.moment_cutoff(ExponentMatrix.diagonal(2.5, 1.0))


def test_moment_demonstration():
    # alpha2 = 1.2: E|X2| converges, E|X2|^1.5 keeps growing with N
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(2.0, 1.2))
    grow1, grow15 = [], []
    for seed in range(4):
        x = np.abs(os2.sample_2d(law, 10**6, seed=seed)[:, 1])
        m = {p: [np.mean(x[:n] ** p) for n in (10**3, 10**6)] for p in (1.0, 1.5)}
        grow1.append(m[1.0][1] / m[1.0][0])
        grow15.append(m[1.5][1] / m[1.5][0])
        assert grow15[-1] > grow1[-1]
    assert np.median(grow1) < 2.0
    assert np.median(grow15) > 3.0


# ---------------------------------------------------------------- strictify

def test_strictify_2d():
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(2.0, 4 / 3), (1.0, 1.0))
    strict, shift = os2.strictify_2d(law)
    assert strict.strict and np.allclose(shift, [2.0, 4.0])
    # translating a strict law by `shift` produces exactly b(t)
    for t in (0.5, 3.0, 20.0):
        want = t * shift - os2.t_power(law.exponent, t) @ shift
        assert np.allclose(os2.b_of_t(law.exponent, law.d, t), want, rtol=1e-13)
    zero = OperatorStableLaw2D(ExponentMatrix.diagonal(2.0, 4 / 3))
    assert np.array_equal(os2.strictify_2d(zero)[1], [0.0, 0.0])
    with pytest.raises(OneInSpectrum):
        os2.strictify_2d(OperatorStableLaw2D(ExponentMatrix.diagonal(1.0, 1.5), (1.0, 0.0)))


def test_strictify_general_shapes():
    for B in SHAPES:
        if any(abs(v - 1) < 1e-12 for v in B.eigenvalues):
            continue
        law = OperatorStableLaw2D(B, (0.4, -0.9))
        _, shift = os2.strictify_2d(law)
        t = 6.5
        assert np.allclose(os2.b_of_t(B, law.d, t), t * shift - os2.t_power(B, t) @ shift, rtol=1e-12)


def test_law_json_round_trip():
    law = OperatorStableLaw2D(ExponentMatrix.lower_triangular(1.5, 0.4), (1.0, 2.0))
    obj = law.to_dict()
    assert obj == {"B": [[2 / 3, 0.0], [0.4, 2 / 3]], "d": [1.0, 2.0], "strict": False}
    assert OperatorStableLaw2D.from_dict(obj) == law
    with pytest.raises(InvalidParameter):
        OperatorStableLaw2D.from_dict({**obj, "strict": True})


# ---------------------------------------------------------------- scaling form

def _random_y(rng):
    r = rng.uniform(0.1, 3.0, 2)
    th = rng.uniform(0.0, math.pi, 2)
    return r * np.exp(1j * th)


@pytest.mark.parametrize("nu", [lambda u: 1.0, lambda u: 2.5 - 1j, lambda u: 1 / (1 + u)],
                         ids=["one", "const", "pole"])
def test_invariance(nu):
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(2.0, 4 / 3))
    a1, a2 = law.exponent.alphas
    rng = np.random.default_rng(8)
    for _ in range(20):
        y = _random_y(rng)
        q = rng.choice([0.5, 2.0, 10.0])
        lhs = q * os2.log_cf_2d(law, nu, y)
        rhs = os2.log_cf_2d(law, nu, (q ** (1 / a1) * y[0], q ** (1 / a2) * y[1]))
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))
    y = _random_y(rng)
    assert os2.log_cf_2d(law, nu, y) == os2.log_cf_2d(law, nu, (y[0], y[1]))


def test_constant_nu_is_sum_of_powers():
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(1.5, 0.8))
    y = (0.7 + 0.2j, 1.3)
    want = 3.0 * (y[0] ** 1.5 + y[1] ** 0.8)
    assert os2.log_cf_2d(law, lambda u: 3.0, y) == pytest.approx(want, rel=1e-14)


def test_alpha_one_drift_breaks_invariance_linearly():
    # the logarithmic term shifts by -i d1 q y1 ln q, a pure translation
    d1 = 0.8
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(1.0, 1.5), (d1, 0.0))
    y, q = (0.6 + 0.3j, 1.1), 5.0
    nu = lambda u: 1.0
    res = os2.log_cf_2d(law, nu, (q * y[0], q ** (1 / 1.5) * y[1])) - q * os2.log_cf_2d(law, nu, y)
    assert res == pytest.approx(-1j * d1 * q * y[0] * math.log(q), rel=1e-12)


def test_domain_errors():
    law = OperatorStableLaw2D(ExponentMatrix.diagonal(2.0, 4 / 3))
    nu = lambda u: 1.0
    with pytest.raises(DomainError):
        os2.log_cf_2d(law, nu, (1 - 0.5j, 1.0))
    with pytest.raises(DomainError):
        os2.log_cf_2d(law, nu, (-1.0, 1.0))
    with pytest.raises(DomainError):
        os2.log_cf_2d(law, nu, (1.0, 0.0))
    with pytest.raises(UnsupportedShape):
        os2.log_cf_2d(OperatorStableLaw2D(SHAPES[3]), nu, (1.0, 1.0))


def test_shape_validation():
    with pytest.raises(UnsupportedShape):
        ExponentMatrix("rotation", (1.0, 1.0))
    with pytest.raises(UnsupportedShape):
        ExponentMatrix("symmetric", (0.5, 0.6), 0.1)
    assert ExponentMatrix.from_matrix([[0.5, 0.0], [0.2, 0.5]]).shape == "lower-triangular"
    assert ExponentMatrix.from_matrix([[0.5, 0.2], [0.2, 0.5]]).shape == "symmetric"
    assert ExponentMatrix.from_matrix([[0.5, 0.0], [0.0, 0.5]]).shape == "scalar"
