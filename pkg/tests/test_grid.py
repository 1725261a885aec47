import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from whankel.grid import (
    ProductGrid,
    RadialSignal,
    Region,
    ball_measure,
    ball_region,
    build_radial_grid,
    inner,
    integrate,
    lp_norm,
    moment_norm,
    read_signal_csv,
    region_measure,
    tail_mass,
    total_mass,
    write_signal_csv,
)
from whankel.specfun import gamma


def test_total_mass_examples():
    assert build_radial_grid(0.0, 1.0, 8, 8).weights.sum() == pytest.approx(0.5, rel=1e-13)
    assert build_radial_grid(1.0, 2.0, 16, 8).weights.sum() == pytest.approx(2.0, rel=1e-13)
    assert total_mass(1.0, 2.0) == pytest.approx(2.0)


@given(st.sampled_from([-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0]), st.floats(min_value=0.5, max_value=20.0))
def test_weights_exact_when_density_is_polynomial(alpha, T):
    g = build_radial_grid(alpha, T, 16, 8)
    assert g.weights.sum() == pytest.approx(total_mass(alpha, T), rel=1e-12)


@given(st.floats(min_value=-0.5, max_value=4.0), st.floats(min_value=0.5, max_value=20.0))
def test_weights_close_for_fractional_density(alpha, T):
    # t^(2 alpha + 1) is not smooth at 0 for fractional exponents; the first panel limits accuracy
    g = build_radial_grid(alpha, T, 16, 8)
    assert g.weights.sum() == pytest.approx(total_mass(alpha, T), rel=1e-4)


def test_gaussian_integral_and_norms():
    g = build_radial_grid(0.0)
    f = RadialSignal.from_function(g, lambda t: np.exp(-t * t / 2))
    assert integrate(g, f) == pytest.approx(1 - math.exp(-72), abs=1e-10)
    assert lp_norm(g, f) == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert lp_norm(g, f, np.inf) == pytest.approx(1.0, abs=1e-4)
    assert lp_norm(g, np.zeros(g.size), 3) == 0.0
    assert integrate(build_radial_grid(0.0, 1.0, 8, 8), np.ones(64)) == pytest.approx(0.5)


def test_moment_and_inner_against_quad():
    alpha = 0.5
    g = build_radial_grid(alpha)
    dens = lambda t: t ** (2 * alpha + 1) / (2 ** alpha * gamma(alpha + 1))
    f = lambda t: t * t * np.exp(-t * t)
    h = lambda t: np.exp(-t * t / 2)
    ref_inner = si.quad(lambda t: f(t) * h(t) * dens(t), 0, np.inf, epsabs=1e-14)[0]
    ref_mom = math.sqrt(si.quad(lambda t: (t ** 1.5 * f(t)) ** 2 * dens(t), 0, np.inf, epsabs=1e-14)[0])
    assert inner(g, f(g.nodes), h(g.nodes)) == pytest.approx(ref_inner, rel=1e-12)
    assert moment_norm(g, f(g.nodes), 1.5) == pytest.approx(ref_mom, rel=1e-12)


def test_lp_norm_rejects_small_p():
    g = build_radial_grid(0.0, 1.0, 8, 8)
    with pytest.raises(ValueError):
        lp_norm(g, np.ones(64), 0.5)


def test_tail_mass():
    g = build_radial_grid(0.0)
    assert tail_mass(g, np.exp(-g.nodes ** 2 / 2)) < 1e-40
    assert tail_mass(g, np.zeros(g.size)) == 0.0


@pytest.mark.parametrize("kwargs", [dict(domain_max=0.0), dict(panels=0), dict(points_per_panel=1), dict(panels=1, points_per_panel=4)])
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        build_radial_grid(0.0, **{"domain_max": 1.0, "panels": 4, "points_per_panel": 8, **kwargs})


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=7), st.lists(st.floats(min_value=0.0, max_value=3.0), min_size=1, max_size=20))
def test_interpolation_exact_for_panel_polynomials(deg, pts):
    g = build_radial_grid(0.0, 3.0, 6, 8)
    c = np.arange(1, deg + 2) / 3.0
    poly = lambda t: np.polyval(c, t)
    r = np.array(pts)
    assert np.allclose(g.interpolate(poly(g.nodes), r), poly(r), rtol=1e-10, atol=1e-10)


def test_interpolation_zero_outside_and_finite_far_away():
    g = build_radial_grid(0.0, 3.0, 6, 8)
    vals = g.interpolate(np.ones(g.size), np.array([-1.0, 3.5, 1e6, 24.0]))
    assert np.array_equal(vals, np.zeros(4))
    assert g.interpolate(np.ones(g.size), 2.9999) == pytest.approx(1.0)


def test_signal_arithmetic_and_grid_mismatch():
    g = build_radial_grid(0.0, 2.0, 4, 8)
    h = build_radial_grid(0.0, 3.0, 4, 8)
    f = RadialSignal(g, np.ones(g.size))
    assert np.allclose((f + f - f * 2).values, 0)
    assert f.normalized().norm() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        f + RadialSignal(h, np.ones(h.size))
    with pytest.raises(ValueError):
        RadialSignal(g, np.zeros(g.size)).normalized()


def test_signal_csv_roundtrip_is_bit_exact(tmp_path):
    g = build_radial_grid(1.0, 4.0, 4, 8)
    rng = np.random.default_rng(3)
    f = RadialSignal(g, rng.normal(size=g.size))
    path = tmp_path / "sig.csv"
    write_signal_csv(path, f)
    back = read_signal_csv(path, g)
    assert np.array_equal(back.values, f.values)


def test_signal_csv_linear_interpolation_and_zero_beyond_range(tmp_path):
    g = build_radial_grid(0.0, 4.0, 4, 8)
    path = tmp_path / "lin.csv"
    path.write_text("t,value\n0,0\n2,4\n", encoding="utf-8")
    f = read_signal_csv(path, g)
    inside = g.nodes <= 2
    assert np.allclose(f.values[inside], 2 * g.nodes[inside])
    assert np.all(f.values[~inside] == 0)


def test_signal_csv_requires_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,1\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        read_signal_csv(path, build_radial_grid(0.0, 1.0, 8, 8))


def _product(alpha, T, panels, m=8):
    g = build_radial_grid(alpha, T, panels, m)
    return ProductGrid(g, g)


def test_region_algebra_and_measures():
    pg = _product(0.0, 1.0, 2)
    assert region_measure(Region.empty(pg)) == 0.0
    assert Region.full(pg).measure == pytest.approx(0.25)
    ball = ball_region(pg, 0.7)
    assert (ball | ball.complement()).measure == pytest.approx(0.25)
    assert (ball & ball.complement()).is_empty()
    rect = Region.rectangle(pg, 1.0, 0.5)
    assert rect.measure == pytest.approx(0.5 * total_mass(0.0, 0.5), rel=1e-3)
    assert ball_region(pg, 10.0).mask.all()
    assert ball_region(pg, 1e-4).is_empty()
    with pytest.raises(ValueError):
        Region(pg, np.ones((3, 3), dtype=bool))


def test_ball_measure_closed_form_against_quadrature():
    for alpha in (-0.5, 0.0, 1.0, 2.0):
        dens = lambda t: t ** (2 * alpha + 1) / (2 ** alpha * gamma(alpha + 1))
        for r in (0.5, 1.0, 2.0):
            ref = si.dblquad(lambda s, k: dens(k) * dens(s), 0, r, 0, lambda k: math.sqrt(max(r * r - k * k, 0.0)),
                             epsabs=1e-13, epsrel=1e-11)[0]
            assert ball_measure(alpha, r) == pytest.approx(ref, rel=1e-8)


def test_ball_region_measure_alpha0_r1():
    assert region_measure(ball_region(_product(0.0, 2.0, 16), 1.0)) == pytest.approx(0.125, abs=2e-3)


def test_ball_region_measure_converges_under_refinement():
    radii = np.linspace(0.5, 3.0, 26)
    for alpha in (0.0, 1.0):
        errs = []
        for panels in (16, 64, 256):
            pg = _product(alpha, 12.0, panels)
            errs.append(np.mean([abs(region_measure(ball_region(pg, r)) - ball_measure(alpha, r)) / ball_measure(alpha, r)
                                 for r in radii]))
        assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("alpha", [-0.5, -0.25, 0.0, 0.5, 1.0, 2.0])
def test_log_weights_against_digamma_closed_form(alpha):
    from scipy.special import digamma

    from whankel.grid import log_weights

    g = build_radial_grid(alpha)
    # int ln(t) e^{-t^2} t^(2a+1) dt / (2^a Gamma(a+1)) = psi(a+1) / 2^(a+2)
    ref = digamma(alpha + 1) / 2 ** (alpha + 2)
    assert np.dot(log_weights(g), np.exp(-g.nodes ** 2)) == pytest.approx(ref, abs=1e-12)
