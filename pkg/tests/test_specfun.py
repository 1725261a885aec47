import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from whankel.specfun import HankelOrder, as_order, bessel_j_norm, bessel_j_norm_integral, digamma, gamma

# mpmath at 30 digits, frozen
GAMMA_ORACLE = [
    (0.1, 9.5135076986687313),
    (0.5, 1.772453850905516),
    (1.5, 0.88622692545275801),
    (2.5, 1.329340388179137),
    (3.7, 4.170651783796604),
    (7.25, 1155.3810139199897),
    (10.0, 362880.0),
]

DIGAMMA_ORACLE = [
    (0.25, -4.2274535333762654),
    (0.5, -1.9635100260214235),
    (1.0, -0.57721566490153286),
    (1.5, 0.036489973978576521),
    (3.0, 0.92278433509846714),
    (10.0, 2.2517525890667211),
]

# Gamma(a+1) (2/t)^a J_a(t) via mpmath.besselj, frozen
BESSEL_ORACLE = [
    (-0.25, 0.3, 0.97019233195704526), (-0.25, 2.5, -0.31222697804135631), (-0.25, 11.9, 0.21366146652674018),
    (-0.25, 12.1, 0.28524757196439218), (-0.25, 60.0, -0.29435387516923408),
    (0.0, 0.3, 0.97762624653829609), (0.0, 2.5, -0.048383776468197996), (0.0, 7.0, 0.3000792705195556),
    (0.0, 11.9, 0.025049441699589645), (0.0, 12.1, 0.069666773606807312), (0.0, 25.0, 0.096266783275958116),
    (0.5, 2.5, 0.2393888576415826), (0.5, 11.9, -0.051944295145969183), (0.5, 60.0, -0.0050801770183702784),
    (1.0, 2.5, 0.39767528197141923), (1.0, 7.0, -0.0013379495663845236), (1.0, 12.1, -0.035660987335028895),
    (2.0, 0.3, 0.99252106213901903), (2.0, 7.0, -0.049210974707908591), (2.0, 11.9, -0.0035892392613348168),
    (2.0, 25.0, -0.0013605734815024807),
    (3.5, 2.5, 0.69834555640015448), (3.5, 11.9, 0.0052829869311355798), (3.5, 60.0, -7.4373760278188304e-6),
]


@pytest.mark.parametrize("x, expected", GAMMA_ORACLE)
def test_gamma_matches_mpmath(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-13)


def test_gamma_integers_and_half():
    assert gamma(1) == pytest.approx(1.0, rel=1e-14)
    assert gamma(3) == pytest.approx(2.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5, math.nan, math.inf])
def test_gamma_rejects_poles_and_invalid(x):
    with pytest.raises(ValueError):
        gamma(x)


@given(st.floats(min_value=0.05, max_value=150.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


@pytest.mark.parametrize("x, expected", DIGAMMA_ORACLE)
def test_digamma_matches_mpmath(x, expected):
    assert digamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-14)


@given(st.floats(min_value=0.01, max_value=1e3))
def test_digamma_recurrence(x):
    assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-12, abs=1e-12)


def test_digamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        digamma(0.0)


@pytest.mark.parametrize("alpha, t, expected", BESSEL_ORACLE)
def test_bessel_matches_mpmath(alpha, t, expected):
    assert bessel_j_norm(alpha, t) == pytest.approx(expected, abs=1e-11)


def test_bessel_special_values():
    assert bessel_j_norm(0.0, 0.0) == 1.0
    assert bessel_j_norm(-0.5, math.pi) == pytest.approx(-1.0, abs=1e-15)
    assert bessel_j_norm(0.5, 2.0) == pytest.approx(math.sin(2.0) / 2.0, abs=1e-14)


def test_bessel_matches_integral_representation():
    assert bessel_j_norm(1.0, 2.5) == pytest.approx(bessel_j_norm_integral(1.0, 2.5), abs=1e-10)
    for a, t in [(0.0, 4.0), (0.5, 9.0), (2.0, 13.0)]:
        assert bessel_j_norm(a, t) == pytest.approx(bessel_j_norm_integral(a, t), abs=1e-10)


def test_bessel_array_shape_and_errors():
    out = bessel_j_norm(1.0, np.linspace(0, 30, 7).reshape(7, 1))
    assert out.shape == (7, 1)
    with pytest.raises(ValueError):
        bessel_j_norm(0.0, -1.0)
    with pytest.raises(ValueError):
        bessel_j_norm(-0.7, 1.0)


@settings(max_examples=200)
@given(st.floats(min_value=-0.5, max_value=6.0), st.floats(min_value=0.0, max_value=200.0))
def test_bessel_bounded_by_one(alpha, t):
    assert abs(bessel_j_norm(alpha, t)) <= 1.0 + 1e-12


@given(st.floats(min_value=-0.4, max_value=6.0), st.floats(min_value=11.5, max_value=12.5))
def test_bessel_continuous_across_switch(alpha, t):
    # series below the switch, Bessel J above; both paths must agree near it
    assert bessel_j_norm(alpha, t) == pytest.approx(bessel_j_norm_integral(alpha, t), abs=1e-10)


def test_order_validation():
    assert as_order(0.5).alpha == 0.5
    assert as_order(HankelOrder(1.0)).alpha == 1.0
    assert HankelOrder(-0.5).is_cosine
    with pytest.raises(ValueError, match="alpha >= -1/2"):
        HankelOrder(-0.7)
