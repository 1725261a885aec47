import math

import numpy as np
import pytest
from scipy import integrate as si
from scipy.special import digamma as sp_digamma

from whankel.grid import Region, ball_measure, ball_region, build_radial_grid, lp_norm, ProductGrid
from whankel.hankel import default_plan, make_plan
from whankel.report import VACUOUS
from whankel.signals import laguerre
from whankel.uncertainty import (
    MAX_ONB,
    ball_count_bound,
    ball_count_check,
    check_onb_concentration,
    complement_energy_check,
    concentration_defect,
    dispersion,
    dispersion_count_bound,
    dispersion_count_check,
    heisenberg_check,
    heisenberg_product_check,
    hs_check,
    local_a0,
    local_bound,
    local_uncertainty_check,
    log_uncertainty_check,
    min_measure_check,
    onb_sequence,
    shapiro_check,
    shapiro_constant,
)
from whankel.windowed import default_product, plancherel_residual, wht_fields, wht_forward


def gauss(t, width=1.0):
    return np.exp(-0.5 * (t / width) ** 2)


class Setup:
    def __init__(self, alpha):
        self.plan = default_plan(alpha)
        self.product = default_product(self.plan)
        self.t = self.plan.time_grid.nodes
        self.g = gauss(self.t)
        self.g_unit = self.g / lp_norm(self.plan.time_grid, self.g)
        self.field = wht_forward(self.plan, self.product, self.g, self.g)
        self.unit_field = self.field.normalized()
        self._families = {}

    def family(self, n):
        if n not in self._families:
            phis = onb_sequence(self.plan.time_grid, n)
            self._families[n] = (phis, [r[0] for r in wht_fields(self.plan, self.product, phis, [self.g_unit])])
        return self._families[n]


@pytest.fixture(scope="module")
def s0():
    return Setup(0.0)


@pytest.fixture(scope="module")
def s1():
    return Setup(1.0)


# dispersions and concentration


def test_dispersion_zero_field(s0):
    zero = s0.field.scaled(0.0)
    d = dispersion(zero, 2)
    assert (d.rho_p, d.rho_k_p, d.rho_s_p) == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        dispersion(s0.field, 0)


def test_dispersion_p2_splits_into_axes(s0):
    d = dispersion(s0.field, 2)
    assert d.rho_k_p ** 2 + d.rho_s_p ** 2 == pytest.approx(d.rho_p ** 2, rel=1e-9)


def test_dispersion_converges_under_refinement(s0):
    fine = make_plan(build_radial_grid(0.0, 12.0, 128, 8))
    fine_product = ProductGrid(fine.time_grid, build_radial_grid(0.0, 12.0, 16, 4))
    g = gauss(fine.time_grid.nodes)
    ref = dispersion(wht_forward(fine, fine_product, g, g), 2).rho_p
    assert dispersion(s0.field, 2).rho_p == pytest.approx(ref, rel=1e-3)


def test_concentration_defect(s0):
    assert concentration_defect(s0.field, Region.full(s0.product)) == 0.0
    assert concentration_defect(s0.field, Region.empty(s0.product)) == 1.0
    assert concentration_defect(s0.field, ball_region(s0.product, 4.0)) < 0.5
    with pytest.raises(ValueError):
        concentration_defect(s0.field.scaled(0.0), Region.full(s0.product))


# orthonormal families


def test_onb_sequence(s0, s1):
    (phi,) = onb_sequence(s0.plan.time_grid, 1)
    assert phi.norm() == pytest.approx(1.0, abs=1e-12)
    for s in (s0, s1):
        vals = np.array([p.values for p in onb_sequence(s.plan.time_grid, 3)])
        gram = (vals * s.plan.time_grid.weights) @ vals.T
        assert np.abs(gram - np.eye(3)).max() <= 1e-10
    with pytest.raises(ValueError):
        onb_sequence(s0.plan.time_grid, MAX_ONB + 1)


def test_onb_concentration(s0):
    phis, fields = s0.family(4)
    empty = check_onb_concentration(s0.plan, s0.product, s0.g, phis, Region.empty(s0.product), fields=fields)
    assert empty.passed and abs(empty.lhs) < 1e-4
    for r in (2.0, 0.5):
        rep = check_onb_concentration(s0.plan, s0.product, s0.g, phis, ball_region(s0.product, r), fields=fields)
        assert rep.passed
    assert empty.diagnostics["window_norm_in"] == pytest.approx(lp_norm(s0.plan.time_grid, s0.g))


def test_onb_concentration_rejects_non_orthonormal(s0):
    phis, _ = s0.family(2)
    with pytest.raises(ValueError, match="orthonormal"):
        check_onb_concentration(s0.plan, s0.product, s0.g, [phis[0], phis[0]], Region.empty(s0.product))


def test_ball_count_bound_values():
    assert ball_count_bound(0.0, 1.0, 0.5) == pytest.approx(0.25)
    # nu_0(B_2) = 2^4 / (2^2 Gamma(3)) = 2, over 1 - delta = 1/2
    assert ball_count_bound(0.0, 2.0, 0.5) == pytest.approx(4.0)
    for a in (-0.5, 0.0, 1.0):
        assert ball_count_bound(a, 1.7, 0.3) == pytest.approx(ball_measure(a, 1.7) / 0.7)
    with pytest.raises(ValueError):
        ball_count_bound(0.0, 1.0, 1.0)


def test_ball_count_check(s0):
    _, fields = s0.family(4)
    rep = ball_count_check(fields, 3.0, ball_region(s0.product, 3.0))
    assert rep.passed and rep.lhs == 4
    vac = ball_count_check(fields, 0.3, ball_region(s0.product, 0.3))
    assert vac.status == VACUOUS or vac.passed


def test_dispersion_count_bound_values():
    assert dispersion_count_bound(0.0, 2.0, 1.0) == pytest.approx(4.0)
    assert dispersion_count_bound(0.0, 4.0, 1.0) == pytest.approx(1.0)
    for a in (0.0, 1.0):
        assert dispersion_count_bound(a, 2.0, 2.0) == pytest.approx(2 ** (4 * (a + 1)) * dispersion_count_bound(a, 2.0, 1.0))


def test_dispersion_count_check(s0):
    _, fields = s0.family(4)
    for p in (1.0, 2.0):
        assert dispersion_count_check(fields, p).passed


def test_shapiro(s0, s1):
    phis1, fields1 = s0.family(1)
    assert shapiro_check(s0.plan, s0.product, s0.g, phis1, 2.0, fields=fields1).passed
    phis4, fields4 = s0.family(4)
    four = shapiro_check(s0.plan, s0.product, s0.g, phis4, 2.0, fields=fields4)
    one = shapiro_check(s0.plan, s0.product, s0.g, phis1, 2.0, fields=fields1)
    assert four.passed and four.lhs > 4 * one.lhs
    phis, fields = s1.family(4)
    assert shapiro_check(s1.plan, s1.product, s1.g, phis, 1.0, fields=fields).passed
    assert shapiro_constant(0.0, 1, 2.0) == pytest.approx((3 * 2 / 2 ** 12) ** 0.5)


# minimal measure and complement energy


def test_min_measure(s0):
    fld = s0.unit_field
    ball = ball_region(s0.product, 4.0)
    assert min_measure_check(fld, ball, 1.0).passed
    eta = 1 - fld.masked_energy(ball)
    rep = min_measure_check(fld, ball, eta)
    assert rep.passed and rep.status != VACUOUS
    full = min_measure_check(fld, Region.full(s0.product), 0.01)
    assert full.passed and full.status != VACUOUS
    small = min_measure_check(fld, ball_region(s0.product, 0.5), 0.01)
    assert small.status == VACUOUS and small.passed
    with pytest.raises(ValueError, match="unit"):
        min_measure_check(s0.field, ball, 0.5)


def test_complement_energy(s0):
    plan, product = s0.plan, s0.product
    empty = complement_energy_check(plan, product, s0.g, s0.g_unit, Region.empty(product))
    assert empty.lhs == pytest.approx(empty.rhs, rel=5e-3) and empty.passed
    ball = ball_region(product, 0.5)
    assert complement_energy_check(plan, product, s0.g, s0.g_unit, ball).passed
    lag = laguerre(1).sample(plan.time_grid)
    assert complement_energy_check(plan, product, lag, s0.g_unit, ball).passed
    with pytest.raises(ValueError, match="unit"):
        complement_energy_check(plan, product, s0.g, s0.g, ball)
    with pytest.raises(ValueError):
        complement_energy_check(plan, product, s0.g, s0.g_unit, Region.full(product))


# local uncertainty


def test_local_bound_a0_is_not_the_minimizer():
    # stationary point of the bound in a: a^(2 alpha + 2) = x 2^(alpha+1) Gamma(alpha+1) / sqrt(nu)
    for alpha, x, nu in [(0.0, 0.5, 0.3), (1.0, 1.0, 0.5), (2.0, 0.7, 2.0)]:
        c = 2 ** (alpha + 1) * math.gamma(alpha + 1)
        a_star = (x * c / math.sqrt(nu)) ** (1 / (2 * alpha + 2))
        best = local_bound(alpha, x, nu, a_star)
        assert best <= local_bound(alpha, x, nu, a_star * 1.01) and best <= local_bound(alpha, x, nu, a_star / 1.01)
        assert local_bound(alpha, x, nu, local_a0(alpha, x, nu)) >= best


def test_local_uncertainty(s1):
    plan, product = s1.plan, s1.product
    ball = ball_region(product, 1.0)
    rep = local_uncertainty_check(plan, product, s1.g, s1.g, ball, 1.0, 1.0, field=s1.field)
    assert rep.passed
    auto = local_uncertainty_check(plan, product, s1.g, s1.g, ball, 1.0, "auto", field=s1.field)
    assert auto.passed and auto.diagnostics["a0"] == pytest.approx(local_a0(1.0, 1.0, ball.measure))
    # the closed-form constant equals the a0 bound
    assert auto.diagnostics["printed_bound"] == pytest.approx(auto.rhs, rel=1e-12)
    lhs = []
    for eps in (1.0, 0.1, 0.01):
        rep = local_uncertainty_check(plan, product, s1.g, s1.g, Region.rectangle(product, eps, 0.2), 1.0, 1.0,
                                      field=s1.field)
        assert rep.passed
        lhs.append(rep.lhs)
    assert lhs[0] > lhs[1] > lhs[2] and lhs[2] < 1e-4
    with pytest.raises(ValueError):
        local_uncertainty_check(plan, product, s1.g, s1.g, ball, 2.5, field=s1.field)
    with pytest.raises(ValueError):
        local_uncertainty_check(plan, product, s1.g, s1.g, Region.empty(product), 1.0, field=s1.field)


# logarithmic uncertainty


def test_log_uncertainty_gaussian(s0):
    rep = log_uncertainty_check(s0.plan, s0.product, s0.g, s0.g, fields=(s0.field, s0.field))
    assert rep.passed
    assert rep.rhs == pytest.approx((sp_digamma(0.5) + math.log(2)) * 0.25, rel=1e-12)
    assert rep.rhs == pytest.approx(-0.31759, abs=1e-5)
    scaled = log_uncertainty_check(s0.plan, s0.product, 3 * s0.g, s0.g, fields=(s0.field.scaled(3), None or wht_forward(s0.plan, s0.product, s0.g, 3 * s0.g)))
    assert scaled.passed
    assert scaled.lhs == pytest.approx(9 * rep.lhs, rel=1e-9)
    assert scaled.rhs == pytest.approx(9 * rep.rhs, rel=1e-12)


def test_log_uncertainty_t2e_alpha1(s1):
    f = s1.t ** 2 * np.exp(-s1.t ** 2)
    assert log_uncertainty_check(s1.plan, s1.product, f, s1.g).passed


def _log_fields(width):
    plan = default_plan(0.0)
    product = default_product(plan)
    t = plan.time_grid.nodes
    f, g = gauss(t), gauss(t, width)
    return log_uncertainty_check(plan, product, f, g), lp_norm(plan.time_grid, g)


def test_log_frequency_term_matches_translated_spectrum_oracle():
    # alpha = 0: int ln(s) tau_l h(s) d gamma(s) = int ln max(s, l) h(s) d gamma(s)
    # (mean of ln|x - y| over a circle), so the term is a double integral of the spectra
    w = 1.4
    rep, _ = _log_fields(w)
    hf = lambda l: np.exp(-l * l / 2)
    hg = lambda l: w * w * np.exp(-w * w * l * l / 2)
    ref = si.dblquad(lambda r, l: hg(l) ** 2 * hf(r) ** 2 * math.log(max(r, l)) * l * r, 0, 12, 0, 12, epsabs=1e-12)[0]
    assert rep.diagnostics["freq_term"] == pytest.approx(ref, abs=1e-4)


@pytest.mark.xfail(strict=True, reason="the identity used to derive the inequality does not hold; see the decisions ledger")
def test_log_frequency_term_equals_weighted_spectral_log_moment():
    rep, _ = _log_fields(1.4)
    d = rep.diagnostics
    assert d["freq_term"] == pytest.approx(d["freq_term_spectral"], rel=5e-3)


# Heisenberg type


def test_heisenberg_gaussian_pair(s0, s1):
    rep = heisenberg_check(s0.field, 1, 1)
    assert rep.passed
    assert heisenberg_product_check(s0.field, 1).passed
    assert rep.diagnostics["product_lhs"] >= rep.diagnostics["product_rhs"]
    assert heisenberg_check(s1.field, 2, 1).passed
    with pytest.raises(ValueError):
        heisenberg_check(s0.field, 0.5, 1)


def test_heisenberg_ratio_form(s0, s1):
    for fld in (s0.field, s1.field):
        eq = heisenberg_check(fld, 1, 1)
        # the ratio form divides by ||W||^2 where the inequality has ||f||^2 ||g||^2: equal up to Plancherel
        slack = 2 * plancherel_residual(fld) + 1e-12
        assert eq.ratio == pytest.approx(eq.diagnostics["first_moment_ratio"], rel=slack)
        for c, d in [(1.5, 1), (2, 1), (1, 2), (2, 2)]:
            rep = heisenberg_check(fld, c, d)
            assert rep.ratio >= rep.diagnostics["first_moment_ratio"] * (1 - 1e-9)


def test_hs_check_small_grid(s0):
    ax = build_radial_grid(0.0, 8.0, 4, 4)
    small = ProductGrid(ax, ax)
    assert hs_check(s0.plan, small, s0.g, ball_region(small, 1.0)).passed
