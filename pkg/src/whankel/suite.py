"""Check registry and the randomized verification suite.

A *check* is a named evaluator plus a parameter map, run against a
:class:`CheckContext` (plan, product grid, signal f, window g). The context
computes fields lazily and shares them between checks; fields of normalized
inputs come from the raw field by bilinearity, with no second transform.
"""
from __future__ import annotations

import math

import numpy as np

from .grid import Region, ball_region, lp_norm, region_measure, _values
from .hankel import HankelPlan, default_plan, hankel_forward, hankel_heisenberg, hankel_inverse, hankel_log_uncertainty, parseval_residual
from .report import InequalityReport, compare
from .signals import SignalSpec, random_family
from .specfun import gamma
from .uncertainty import (
    ball_count_check,
    check_onb_concentration,
    complement_energy_check,
    dispersion_count_check,
    heisenberg_check,
    heisenberg_product_check,
    hs_check,
    local_uncertainty_check,
    log_uncertainty_check,
    min_measure_check,
    onb_sequence,
    shapiro_check,
)
from .windowed import WindowAtomSet, default_product, plancherel_residual, wht_fields, wht_pairs
from .grid import ProductGrid, build_radial_grid

__all__ = [
    "CheckContext",
    "CHECKS",
    "DEFAULT_SUITE",
    "SUITE_ALPHAS",
    "run_check",
    "run_suite",
    "random_suite",
    "ball_radius_for_measure",
    "UnknownCheck",
]

SUITE_ALPHAS = (-0.5, 0.0, 0.5, 1.0, 2.0)
HEISENBERG_EXPONENTS = (1.0, 1.5, 2.0)
PLANCHEREL_TOL = 5e-3
KERNEL_BOUND_ATOL = 1e-6
RESIDUAL_TOL = 1e-6


class UnknownCheck(KeyError):
    pass


def ball_radius_for_measure(alpha: float, nu: float) -> float:
    """Radius r with nu_alpha(B_r) = nu."""
    return (nu * 2.0 ** (2 * (alpha + 1)) * gamma(2 * alpha + 3)) ** (1.0 / (4 * (alpha + 1)))


class CheckContext:
    """Inputs shared by a batch of checks, with lazily computed fields."""

    def __init__(self, plan: HankelPlan, product: ProductGrid, f, g, seed: int = 0):
        self.plan = plan
        self.product = product
        tg = plan.time_grid
        self.f = _values(tg, f)
        self.g = _values(tg, g)
        self.f_norm = lp_norm(tg, self.f)
        self.g_norm = lp_norm(tg, self.g)
        self.seed = seed
        self._cache = {}

    @property
    def alpha(self) -> float:
        return self.plan.alpha

    def field(self):
        """W_g(f)."""
        if "wgf" not in self._cache:
            self._cache["wgf"] = wht_fields(self.plan, self.product, [self.f], [self.g])[0][0]
        return self._cache["wgf"]

    def swapped_field(self):
        """W_f(g)."""
        if "wfg" not in self._cache:
            self._cache["wfg"] = wht_fields(self.plan, self.product, [self.g], [self.f])[0][0]
        return self._cache["wfg"]

    def family(self, n: int):
        """Laguerre orthonormal family of size n and its fields under the unit window."""
        key = ("onb", n)
        if key not in self._cache:
            phis = onb_sequence(self.plan.time_grid, n)
            fields = [row[0] for row in wht_fields(self.plan, self.product, phis, [self.g / self.g_norm])]
            self._cache[key] = (phis, fields)
        return self._cache[key]

    def region(self, params) -> tuple[Region, dict]:
        """Region from ``r`` (ball radius), ``nu`` (ball of that measure) or ``rect`` [k_max, s_max]."""
        if "rect" in params:
            k_max, s_max = params["rect"]
            return Region.rectangle(self.product, k_max, s_max), {"rect": [float(k_max), float(s_max)]}
        if "nu" in params:
            r = ball_radius_for_measure(self.alpha, float(params["nu"]))
        else:
            r = float(params.get("r", 1.0))
        return ball_region(self.product, r), {"r": r}


def _tag(report: InequalityReport, extra: dict) -> InequalityReport:
    report.params.update(extra)
    return report


def _parseval(ctx, p):
    res = parseval_residual(ctx.plan, ctx.f, ctx.g)
    return [compare("parseval_residual", res, RESIDUAL_TOL, "<=", rtol=0.0, atol=0.0, params={"alpha": ctx.alpha})]


def _inversion(ctx, p):
    back = hankel_inverse(ctx.plan, hankel_forward(ctx.plan, ctx.f)).values
    scale = max(float(np.abs(ctx.f).max()), 1e-300)
    err = float(np.abs(back - ctx.f).max()) / scale
    return [compare("inversion_error", err, RESIDUAL_TOL, "<=", rtol=0.0, atol=0.0, params={"alpha": ctx.alpha})]


def _hankel_heisenberg(ctx, p):
    return [hankel_heisenberg(ctx.plan, ctx.f, float(p.get("c", 1.0)), float(p.get("d", 1.0)))]


def _hankel_log(ctx, p):
    return [hankel_log_uncertainty(ctx.plan, ctx.f)]


def _windowed_plancherel(ctx, p):
    fld = ctx.field()
    res = plancherel_residual(fld)
    return [compare("windowed_plancherel", res, float(p.get("tol", PLANCHEREL_TOL)), "<=", rtol=0.0, atol=0.0,
                    params={"alpha": ctx.alpha},
                    diagnostics={"field_norm": fld.l2_norm(), "norm_product": fld.signal_norm * fld.window_norm,
                                 "sup": fld.sup()})]


def _kernel_bound(ctx, p):
    """max |H_g| over random 4-tuples in the lower half of the product grid's box."""
    n = int(p.get("samples", 100))
    rng = np.random.default_rng(int(p.get("seed", ctx.seed)))
    kmax = ctx.product.k_grid.domain_max / 2
    smax = ctx.product.s_grid.domain_max / 2
    k = rng.uniform(0, kmax, (n, 2))
    s = rng.uniform(0, smax, (n, 2))
    atoms = WindowAtomSet(ctx.plan, ctx.g, s.ravel())
    w = ctx.plan.time_grid.weights
    vals = np.empty(n)
    for i in range(n):
        a1 = atoms.atom(k[i, 0], 2 * i).values
        a2 = atoms.atom(k[i, 1], 2 * i + 1).values
        vals[i] = np.dot(w, a1 * a2) / atoms.norm ** 2
    worst = float(np.abs(vals).max())
    return [compare("kernel_bound", worst, 1.0, "<=", rtol=0.0, atol=KERNEL_BOUND_ATOL,
                    params={"alpha": ctx.alpha, "samples": n}, diagnostics={"mean_abs": float(np.abs(vals).mean())})]


def _hilbert_schmidt(ctx, p):
    n = int(p.get("nodes", 16))
    T = float(p.get("domain_max", 8.0))
    ppp = 4 if n % 4 == 0 else n
    small = ProductGrid(build_radial_grid(ctx.alpha, T, n // ppp, ppp), build_radial_grid(ctx.alpha, T, n // ppp, ppp))
    sub = CheckContext(ctx.plan, small, ctx.f, ctx.g, ctx.seed)
    region, extra = sub.region(p)
    return [_tag(hs_check(ctx.plan, small, ctx.g, region), extra)]


def _onb_concentration(ctx, p):
    phis, fields = ctx.family(int(p.get("N", 4)))
    region, extra = ctx.region(p)
    return [_tag(check_onb_concentration(ctx.plan, ctx.product, ctx.g, phis, region, fields=fields), extra)]


def _ball_count(ctx, p):
    _, fields = ctx.family(int(p.get("N", 4)))
    region, extra = ctx.region(p)
    return [ball_count_check(fields, extra["r"], region)]


def _dispersion_count(ctx, p):
    _, fields = ctx.family(int(p.get("N", 4)))
    return [dispersion_count_check(fields, float(p.get("p", 2.0)))]


def _shapiro(ctx, p):
    phis, fields = ctx.family(int(p.get("N", 4)))
    return [shapiro_check(ctx.plan, ctx.product, ctx.g, phis, float(p.get("p", 2.0)), fields=fields)]


def _min_measure(ctx, p):
    fld = ctx.field().normalized()
    region, extra = ctx.region(p)
    eta = p.get("eta", "auto")
    # "auto": the tightest eta for which the energy hypothesis holds
    eta = max(1.0 - fld.masked_energy(region), 0.0) if eta == "auto" else float(eta)
    return [_tag(min_measure_check(fld, region, eta), extra)]


def _complement_energy(ctx, p):
    fld = ctx.field().normalized(signal=False)
    region, extra = ctx.region(p)
    return [_tag(complement_energy_check(ctx.plan, ctx.product, ctx.f, ctx.g / ctx.g_norm, region, field=fld), extra)]


def _local_x(ctx, p):
    if "x" in p:
        return float(p["x"])
    return float(p.get("x_frac", 0.5)) * (ctx.alpha + 1)


def _local_uncertainty(ctx, p):
    region, extra = ctx.region(p)
    a = p.get("a", "auto")
    return [_tag(local_uncertainty_check(ctx.plan, ctx.product, ctx.f, ctx.g, region, _local_x(ctx, p), a,
                                         field=ctx.field()), extra)]


def _log_uncertainty(ctx, p):
    return [log_uncertainty_check(ctx.plan, ctx.product, ctx.f, ctx.g, fields=(ctx.field(), ctx.swapped_field()))]


def _heisenberg(ctx, p):
    return [heisenberg_check(ctx.field(), float(p.get("c", 1.0)), float(p.get("d", 1.0)))]


def _heisenberg_product(ctx, p):
    return [heisenberg_product_check(ctx.field(), float(p.get("c", 1.0)))]


CHECKS = {
    "parseval": _parseval,
    "inversion": _inversion,
    "hankel_heisenberg": _hankel_heisenberg,
    "hankel_log": _hankel_log,
    "windowed_plancherel": _windowed_plancherel,
    "kernel_bound": _kernel_bound,
    "hilbert_schmidt": _hilbert_schmidt,
    "onb_concentration": _onb_concentration,
    "ball_count": _ball_count,
    "dispersion_count": _dispersion_count,
    "shapiro": _shapiro,
    "min_measure": _min_measure,
    "complement_energy": _complement_energy,
    "local_uncertainty": _local_uncertainty,
    "log_uncertainty": _log_uncertainty,
    "heisenberg": _heisenberg,
    "heisenberg_product": _heisenberg_product,
}

DEFAULT_SUITE = (
    {"name": "parseval"},
    {"name": "inversion"},
    {"name": "hankel_heisenberg", "c": 1, "d": 1},
    {"name": "hankel_log"},
    {"name": "windowed_plancherel"},
    {"name": "kernel_bound", "samples": 20},
    {"name": "hilbert_schmidt", "r": 1.0},
    {"name": "onb_concentration", "N": 4, "r": 2.0},
    {"name": "ball_count", "N": 4, "r": 3.0},
    {"name": "dispersion_count", "N": 4, "p": 2},
    {"name": "shapiro", "N": 4, "p": 2},
    {"name": "min_measure", "r": 4.0, "eta": "auto"},
    {"name": "complement_energy", "nu": 0.5},
    {"name": "local_uncertainty", "nu": 0.5, "x_frac": 0.5, "a": 1.0},
    {"name": "local_uncertainty", "nu": 0.5, "x_frac": 0.5, "a": "auto"},
    {"name": "log_uncertainty"},
    {"name": "heisenberg", "c": 1, "d": 1},
    {"name": "heisenberg_product", "c": 1},
)


def run_check(ctx: CheckContext, entry: dict) -> list[InequalityReport]:
    entry = dict(entry)
    name = entry.pop("name")
    if name not in CHECKS:
        raise UnknownCheck(name)
    return CHECKS[name](ctx, entry)


def run_suite(ctx: CheckContext, entries=DEFAULT_SUITE) -> list[InequalityReport]:
    """Run checks in order. Unknown names raise :class:`UnknownCheck` before any work is done."""
    unknown = [e["name"] for e in entries if e["name"] not in CHECKS]
    if unknown:
        raise UnknownCheck(", ".join(unknown))
    out = []
    for e in entries:
        out.extend(run_check(ctx, e))
    return out


def _suite_for_alpha(alpha, fs: list[SignalSpec], gs: list[SignalSpec], rng, grid_kwargs, product_kwargs):
    plan = default_plan(alpha, **grid_kwargs)
    product = default_product(plan, **product_kwargs)
    tg = plan.time_grid
    F = [s.sample(tg).normalized() for s in fs]
    G = [s.sample(tg).normalized() for s in gs]
    wgf = wht_pairs(plan, product, F, G)
    wfg = wht_pairs(plan, product, G, F)
    r_ball = ball_radius_for_measure(alpha, 0.5)
    ball = ball_region(product, r_ball)
    reports = []
    for a, (fld, swapped) in enumerate(zip(wgf, wfg)):
        tag = {"f": fs[a].label(), "g": gs[a].label(), "index": a}
        k_max, s_max = rng.uniform(0.5, 4.0, 2)
        rect = Region.rectangle(product, float(k_max), float(s_max))
        rect_tag = {"rect": [float(k_max), float(s_max)]}
        x = float(rng.uniform(0.1, 0.9)) * (alpha + 1)
        batch = [
            _tag(min_measure_check(fld, ball, max(1.0 - fld.masked_energy(ball), 0.0)), {"r": r_ball}),
            _tag(min_measure_check(fld, rect, max(1.0 - fld.masked_energy(rect), 0.0)), rect_tag),
            _tag(complement_energy_check(plan, product, F[a], G[a], ball, field=fld), {"r": r_ball}),
        ]
        for region, rtag in ((ball, {"r": r_ball}), (rect, rect_tag)):
            if region_measure(region) > 0:
                for a_par in (1.0, "auto"):
                    batch.append(_tag(local_uncertainty_check(plan, product, F[a], G[a], region, x, a_par, field=fld), rtag))
        batch.append(log_uncertainty_check(plan, product, F[a], G[a], fields=(fld, swapped)))
        for c in HEISENBERG_EXPONENTS:
            for d in HEISENBERG_EXPONENTS:
                batch.append(heisenberg_check(fld, c, d))
        for rep in batch:
            rep.params.update(tag)
        reports.extend(batch)
    return reports


def random_suite(alphas=SUITE_ALPHAS, count: int = 50, seed: int = 0, grid_kwargs=None, product_kwargs=None) -> list[InequalityReport]:
    """Theorem checks over ``count`` random (signal, window) pairs for each alpha.

    Signals come from :func:`~whankel.signals.random_family` with ``seed`` and
    windows with ``seed + 1``; both are normalized. Per pair: minimal measure
    (ball and random rectangle), complement energy (ball of measure 1/2),
    local uncertainty at a in {1, a_0}, logarithmic uncertainty and the
    Heisenberg-type inequality for c, d in {1, 1.5, 2}.
    """
    fs = random_family(count, seed)
    gs = random_family(count, seed + 1)
    rng = np.random.default_rng(seed)
    out = []
    for alpha in alphas:
        out.extend(_suite_for_alpha(float(alpha), fs, gs, rng, dict(grid_kwargs or {}), dict(product_kwargs or {})))
    return out
