"""Dispersion functionals and evaluators for the windowed-transform uncertainty inequalities.

Every evaluator returns an :class:`~whankel.report.InequalityReport`. Checks
that need fields accept precomputed ones through ``field=``/``fields=`` so a
suite can batch the expensive windowed transforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre

from .grid import RadialGrid, RadialSignal, Region, ball_measure, log_weights, lp_norm, moment_norm, region_measure, _values
from .hankel import HankelPlan, hankel_forward, log_constant
from .report import LOG_RTOL, RATIO_ATOL, VACUOUS, InequalityReport, compare
from .specfun import as_order, gamma
from .windowed import TimeFreqField, hs_norm_of_masked_projection, wht_fields

__all__ = [
    "DispersionReport",
    "dispersion",
    "concentration_defect",
    "onb_sequence",
    "ball_count_bound",
    "dispersion_count_bound",
    "hs_check",
    "check_onb_concentration",
    "ball_count_check",
    "dispersion_count_check",
    "shapiro_check",
    "shapiro_constant",
    "min_measure_check",
    "complement_energy_check",
    "local_bound",
    "local_a0",
    "local_uncertainty_check",
    "log_uncertainty_check",
    "heisenberg_check",
    "heisenberg_product_check",
    "MAX_ONB",
    "UNIT_TOL",
    "HS_RTOL",
]

MAX_ONB = 8
UNIT_TOL = 1e-6
ORTHO_TOL = 1e-6
# discrete HS sums run on coarse 4D grids; relative slack for the Hilbert-Schmidt check
HS_RTOL = 5e-2


@dataclass(frozen=True)
class DispersionReport:
    """p-th time-frequency dispersions of a field: joint, time-only and frequency-only."""

    p: float
    rho_p: float
    rho_k_p: float
    rho_s_p: float


def dispersion(field: TimeFreqField, p: float) -> DispersionReport:
    """rho_p = (int int |(k, s)|^p |W|^2 d nu)^(1/p), with the k-only and s-only variants.

    A zero field has zero dispersions.
    """
    if not p > 0:
        raise ValueError(f"dispersion needs p > 0, got {p}")
    k = field.product.k_grid.nodes[:, None]
    s = field.product.s_grid.nodes[None, :]
    e = field.product.weights * field.values ** 2
    joint = float(np.sum(np.hypot(k, s) ** p * e))
    kk = float(np.sum(k ** p * e))
    ss = float(np.sum(s ** p * e))
    return DispersionReport(p, joint ** (1 / p), kk ** (1 / p), ss ** (1 / p))


def concentration_defect(field: TimeFreqField, region: Region) -> float:
    """Smallest delta with ||chi_{E^c} W|| <= delta ||W||."""
    total = field.energy
    if total == 0:
        raise ValueError("concentration_defect is undefined for a zero field")
    return math.sqrt(max(total - field.masked_energy(region), 0.0) / total)


def onb_sequence(grid: RadialGrid, count: int) -> list[RadialSignal]:
    """Orthonormal Laguerre functions L_n^(alpha)(t^2) exp(-t^2/2), n < count.

    They are orthogonal in L^2(d gamma_alpha) analytically; modified
    Gram-Schmidt (two passes) removes the quadrature residue.
    """
    if int(count) != count or not 1 <= count <= MAX_ONB:
        raise ValueError(f"onb_sequence supports 1 <= count <= {MAX_ONB}; higher degrees outrun the grid")
    u = grid.nodes ** 2
    w = grid.weights
    basis = []
    for n in range(count):
        v = eval_genlaguerre(n, grid.alpha, u) * np.exp(-0.5 * u)
        for _ in range(2):
            for b in basis:
                v = v - np.dot(w, v * b) * b
        v = v / math.sqrt(np.dot(w, v * v))
        basis.append(v)
    return [RadialSignal(grid, b) for b in basis]


def ball_count_bound(order, r: float, delta: float) -> float:
    """Largest orthonormal family whose fields are delta-concentrated on B_r: nu(B_r) / (1 - delta)."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not r > 0:
        raise ValueError("r must be positive")
    return ball_measure(order, r) / (1.0 - delta)


def dispersion_count_bound(order, p: float, Y: float) -> float:
    """2^((8/p)(alpha+1) - 2 alpha - 1) Y^(4(alpha+1)) / Gamma(2 alpha + 3).

    Cross-checked against the ball bound it comes from: B_r with r = 4^(1/p) Y
    and delta = 1/2.
    """
    if not p > 0 or not Y > 0:
        raise ValueError("dispersion_count_bound needs p > 0 and Y > 0")
    a = as_order(order).alpha
    val = 2.0 ** (8.0 / p * (a + 1) - 2 * a - 1) * Y ** (4 * (a + 1)) / gamma(2 * a + 3)
    via_ball = ball_count_bound(a, 4.0 ** (1.0 / p) * Y, 0.5)
    if not math.isclose(val, via_ball, rel_tol=1e-10):
        raise ArithmeticError(f"dispersion bound {val} disagrees with the ball bound {via_ball}")
    return val


def _unit(grid: RadialGrid, g):
    v = _values(grid, g)
    n = lp_norm(grid, v)
    if n == 0:
        raise ValueError("window must be nonzero")
    return v / n, n


def _require_unit(name, norm):
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must have unit L^2 norm (got {norm:.9g}); normalize it first")


def _require_orthonormal(grid: RadialGrid, phis):
    vals = np.array([_values(grid, p) for p in phis])
    gram = (vals * grid.weights) @ vals.T
    err = float(np.abs(gram - np.eye(len(vals))).max())
    if err > ORTHO_TOL:
        raise ValueError(f"family is not orthonormal (Gram error {err:.3g})")
    return err


def _family_fields(plan, product, g, phis, fields):
    """Fields W_g(phi_n) for the unit-normalized window, plus bookkeeping."""
    gv, g_norm = _unit(plan.time_grid, g)
    gram_err = _require_orthonormal(plan.time_grid, phis)
    if fields is None:
        fields = [row[0] for row in wht_fields(plan, product, list(phis), [gv])]
    elif len(fields) != len(phis):
        raise ValueError("need one field per family member")
    return fields, {"window_norm_in": g_norm, "gram_error": gram_err}


def hs_check(plan: HankelPlan, product, g, region: Region, method: str = "auto") -> InequalityReport:
    """||O_E O_g||_HS^2 <= nu_alpha(E), discretized on a small product grid."""
    hs2 = hs_norm_of_masked_projection(plan, product, g, region, method=method)
    nu = region_measure(region)
    return compare("hilbert_schmidt", hs2, nu, "<=", rtol=HS_RTOL,
                   params={"alpha": plan.alpha, "grid": list(product.shape)},
                   diagnostics={"hs_norm": math.sqrt(hs2)})


def check_onb_concentration(plan, product, g, phis, region: Region, *, fields=None) -> InequalityReport:
    """sum_n (1 - ||chi_{E^c} W_g(phi_n)||) <= nu_alpha(E) for an orthonormal family.

    ``g`` is normalized internally (the family of fields is orthonormal only
    for a unit window); its input norm is recorded.
    """
    fields, diag = _family_fields(plan, product, g, phis, fields)
    comp = [math.sqrt(max(f.energy - f.masked_energy(region), 0.0)) for f in fields]
    lhs = float(sum(1.0 - c for c in comp))
    nu = region_measure(region)
    norms = [f.l2_norm() for f in fields]
    # each ||W_g(phi_n)|| is 1 only up to the discrete Plancherel defect; that much slack is granted
    defect = float(sum(abs(n - 1.0) for n in norms))
    diag.update({"complement_norms": comp, "field_norms": norms, "plancherel_defect": defect})
    return compare("onb_concentration", lhs, nu, "<=", atol=RATIO_ATOL + defect,
                   params={"alpha": plan.alpha, "N": len(fields)}, diagnostics=diag)


def ball_count_check(fields, r: float, region: Region) -> InequalityReport:
    """N <= nu(B_r) / (1 - delta) with delta the worst concentration defect on ``region`` (a ball of radius r)."""
    alpha = fields[0].alpha
    delta = max(concentration_defect(f, region) for f in fields)
    n = len(fields)
    params = {"alpha": alpha, "N": n, "r": r, "delta": delta}
    diag = {"ball_measure_exact": ball_measure(alpha, r), "ball_measure_grid": region_measure(region)}
    if delta >= 1.0 or delta == 0.0:
        return InequalityReport("ball_count", n, math.inf, "<=", 0.0, True, VACUOUS, params, diag)
    return compare("ball_count", n, ball_count_bound(alpha, r, delta), "<=", params=params, diagnostics=diag)


def dispersion_count_check(fields, p: float) -> InequalityReport:
    """N <= dispersion_count_bound(p, Y) with Y the largest rho_p in the family."""
    alpha = fields[0].alpha
    Y = max(dispersion(f, p).rho_p for f in fields)
    n = len(fields)
    return compare("dispersion_count", n, dispersion_count_bound(alpha, p, Y), "<=",
                   params={"alpha": alpha, "N": n, "p": p, "Y": Y})


def shapiro_constant(order, n: int, p: float) -> float:
    """N^(1 + p/(4(alpha+1))) (3 Gamma(2 alpha + 3) / 2^((8/p)(alpha+1) + 6 alpha + 8))^(p/(4(alpha+1)))."""
    a = as_order(order).alpha
    e = p / (4 * (a + 1))
    inner = 3 * gamma(2 * a + 3) / 2.0 ** (8.0 / p * (a + 1) + 6 * a + 8)
    return n ** (1 + e) * inner ** e


def shapiro_check(plan, product, g, phis, p: float, *, fields=None) -> InequalityReport:
    """sum_n rho_p(W_g(phi_n))^p >= shapiro_constant(N, p); unit window enforced internally."""
    if not p > 0:
        raise ValueError("shapiro_check needs p > 0")
    fields, diag = _family_fields(plan, product, g, phis, fields)
    terms = [dispersion(f, p).rho_p ** p for f in fields]
    diag["terms"] = terms
    return compare("shapiro_dispersion", float(sum(terms)), shapiro_constant(plan.alpha, len(fields), p), ">=",
                   params={"alpha": plan.alpha, "N": len(fields), "p": p}, diagnostics=diag)


def min_measure_check(field: TimeFreqField, region: Region, eta: float) -> InequalityReport:
    """If int int_E |W|^2 >= 1 - eta (unit f and g) then nu_alpha(E) >= 1 - eta.

    When the energy hypothesis fails the report is vacuous: status
    "hypothesis not met", pass true.
    """
    if not eta >= 0:
        raise ValueError("eta must be >= 0")
    _require_unit("signal f", field.signal_norm)
    _require_unit("window g", field.window_norm)
    energy = field.masked_energy(region)
    nu = region_measure(region)
    params = {"alpha": field.alpha, "eta": eta}
    diag = {"masked_energy": energy, "total_energy": field.energy}
    if energy < 1.0 - eta:
        return InequalityReport("min_measure", nu, 1.0 - eta, ">=", 0.0, True, VACUOUS, params, diag)
    return compare("min_measure", nu, 1.0 - eta, ">=", params=params, diagnostics=diag)


def complement_energy_check(plan, product, f, g, region: Region, *, field=None) -> InequalityReport:
    """||chi_{E^c} W_g(f)|| >= sqrt(1 - nu_alpha(E)) ||f|| for a unit window and nu(E) < 1."""
    nu = region_measure(region)
    if not nu < 1:
        raise ValueError(f"complement energy needs nu_alpha(E) < 1, got {nu:.6g}")
    if field is None:
        _require_unit("window g", lp_norm(plan.time_grid, _values(plan.time_grid, g)))
        field = wht_fields(plan, product, [f], [g])[0][0]
    _require_unit("window g", field.window_norm)
    lhs = math.sqrt(max(field.energy - field.masked_energy(region), 0.0))
    return compare("complement_energy", lhs, math.sqrt(1.0 - nu) * field.signal_norm, ">=",
                   params={"alpha": field.alpha, "nu": nu}, diagnostics={"field_energy": field.energy})


def _local_q(alpha, x, nu):
    return x * x * 2.0 ** (alpha + 1) * gamma(alpha + 1) / (nu * (alpha + 1 - x))


def local_a0(order, x: float, nu: float) -> float:
    """a_0 = (x^2 2^(alpha+1) Gamma(alpha+1) / (nu (alpha+1-x)))^(1/(2(alpha+1)))."""
    a = as_order(order).alpha
    return _local_q(a, x, nu) ** (1.0 / (2 * (a + 1)))


def local_bound(order, x: float, nu: float, a: float) -> float:
    """a^(-2x) + nu^(1/2) a^(2 alpha + 2 - 2x) / (2^(alpha+1) Gamma(alpha+1) (alpha+1-x)), per unit moment product."""
    al = as_order(order).alpha
    return a ** (-2 * x) + math.sqrt(nu) * a ** (2 * al + 2 - 2 * x) / (2.0 ** (al + 1) * gamma(al + 1) * (al + 1 - x))


def _local_printed(alpha, x, nu):
    # the closed-form constant quoted with the theorem
    return (1 + x * x / (math.sqrt(nu) * (alpha + 1 - x) ** 2)) * _local_q(alpha, x, nu) ** (-x / (alpha + 1))


def local_uncertainty_check(plan, product, f, g, region: Region, x: float, a="auto", *, field=None) -> InequalityReport:
    """||chi_E W_g(f)|| <= local_bound(x, nu(E), a) ||t^x f|| ||t^x g|| for 0 < x < alpha + 1.

    ``a="auto"`` uses a_0. The closed-form constant stated with the theorem is
    reported in the diagnostics as ``printed_bound``.
    """
    alpha = plan.alpha
    if not 0 < x < alpha + 1:
        raise ValueError(f"x must lie in (0, alpha + 1) = (0, {alpha + 1:g}), got {x}")
    nu = region_measure(region)
    if not nu > 0:
        raise ValueError("local uncertainty needs a region of positive measure")
    a0 = local_a0(alpha, x, nu)
    a_val = a0 if a == "auto" else float(a)
    if not a_val > 0:
        raise ValueError("a must be positive")
    if field is None:
        field = wht_fields(plan, product, [f], [g])[0][0]
    tg = plan.time_grid
    mf = moment_norm(tg, _values(tg, f), x)
    mg = moment_norm(tg, _values(tg, g), x)
    lhs = field.masked_norm(region)
    rhs = local_bound(alpha, x, nu, a_val) * mf * mg
    return compare("local_uncertainty", lhs, rhs, "<=",
                   params={"alpha": alpha, "x": x, "a": "auto" if a == "auto" else a_val, "nu": nu},
                   diagnostics={"a0": a0, "a_used": a_val, "moment_f": mf, "moment_g": mg,
                                "printed_bound": _local_printed(alpha, x, nu) * mf * mg})


def log_uncertainty_check(plan, product, f, g, *, fields=None) -> InequalityReport:
    """int int ln(k)|W_g(f)|^2 + int int ln(s)|W_f(g)|^2 >= (psi((alpha+1)/2) + ln 2) ||f||^2 ||g||^2.

    Note the roles swap in the second term. ``fields`` may supply
    (W_g(f), W_f(g)). The diagnostics compare the second term with
    ||g||^2 int ln(lam) |H f|^2, the identity used to derive the inequality.
    """
    tg = plan.time_grid
    fv, gv = _values(tg, f), _values(tg, g)
    if fields is None:
        (wgf,), (wfg,) = wht_fields(plan, product, [fv], [gv])[0], wht_fields(plan, product, [gv], [fv])[0]
    else:
        wgf, wfg = fields
    # ln(k) d nu = (log weights in k) x (plain weights in s), and symmetrically
    kw, sw = product.k_grid.weights, product.s_grid.weights
    time_term = float(log_weights(product.k_grid) @ (wgf.values ** 2) @ sw)
    freq_term = float(kw @ (wfg.values ** 2) @ log_weights(product.s_grid))
    nf2 = float(np.dot(tg.weights, fv * fv))
    ng2 = float(np.dot(tg.weights, gv * gv))
    if nf2 == 0 or ng2 == 0:
        raise ValueError("log uncertainty needs nonzero f and g")
    F = hankel_forward(plan, fv).values
    spectral = ng2 * float(np.dot(log_weights(plan.freq_grid), F * F))
    scale = nf2 * ng2
    return compare("log_uncertainty", time_term + freq_term, log_constant(plan.alpha) * scale, ">=",
                   rtol=0.0, atol=LOG_RTOL * scale,
                   params={"alpha": plan.alpha},
                   diagnostics={"time_term": time_term, "freq_term": freq_term,
                                "freq_term_spectral": spectral, "energy_product": scale})


def _moments(field: TimeFreqField, c: float, d: float):
    return field.weighted_norm(k_power=c), field.weighted_norm(s_power=d)


def heisenberg_check(field: TimeFreqField, c: float = 1.0, d: float = 1.0) -> InequalityReport:
    """||k^c W||^(d/(c+d)) ||s^d W||^(c/(c+d)) >= (alpha+1)^(cd/(c+d)) ||g|| ||f||, c, d >= 1.

    The diagnostics carry the first-moment ratio form
    ((||k W|| ||s W||) / ((alpha+1) ||W||^2))^(cd/(c+d)), which the ratio
    equals for c = d = 1 and bounds from below otherwise; for c = d they also
    carry the product form ||k^c W|| ||s^c W|| vs (alpha+1)^c ||g||^2 ||f||^2.
    """
    if not (c >= 1 and d >= 1):
        raise ValueError("heisenberg_check needs c, d >= 1")
    alpha = field.alpha
    kc, sd = _moments(field, c, d)
    lhs = kc ** (d / (c + d)) * sd ** (c / (c + d))
    scale = field.window_norm * field.signal_norm
    rhs = (alpha + 1) ** (c * d / (c + d)) * scale
    k1, s1 = _moments(field, 1.0, 1.0)
    energy = field.energy
    diag = {"k_moment": kc, "s_moment": sd, "field_energy": energy,
            "first_moment_ratio": ((k1 * s1) / ((alpha + 1) * energy)) ** (c * d / (c + d)) if energy else None}
    if c == d:
        diag["product_lhs"] = kc * sd
        diag["product_rhs"] = (alpha + 1) ** c * scale ** 2
    return compare("heisenberg", lhs, rhs, ">=", params={"alpha": alpha, "c": c, "d": d}, diagnostics=diag)


def heisenberg_product_check(field: TimeFreqField, c: float = 1.0) -> InequalityReport:
    """||k^c W|| ||s^c W|| >= (alpha+1)^c ||g||^2 ||f||^2 for c >= 1."""
    if not c >= 1:
        raise ValueError("heisenberg_product_check needs c >= 1")
    kc, sc = _moments(field, c, c)
    rhs = (field.alpha + 1) ** c * (field.window_norm * field.signal_norm) ** 2
    return compare("heisenberg_product", kc * sc, rhs, ">=", params={"alpha": field.alpha, "c": c})
