"""Hankel transform of order alpha by dense quadrature.

    H_alpha(f)(lam) = int_0^inf f(t) j_alpha(lam t) d gamma_alpha(t)

With this normalization H_alpha is an isometric involution of L^2(d gamma_alpha),
and exp(-t^2/2) is a fixed point for every alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid, RadialSignal, build_radial_grid, log_weights, lp_norm, moment_norm, tail_mass, _values
from .report import LOG_RTOL, InequalityReport, compare
from .specfun import bessel_j_norm, digamma

__all__ = [
    "HankelPlan",
    "make_plan",
    "hankel_forward",
    "hankel_inverse",
    "parseval_residual",
    "hankel_heisenberg",
    "hankel_log_uncertainty",
    "log_constant",
    "default_plan",
    "MAX_MOMENT",
]

MAX_MOMENT = 4.0
EPS_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class HankelPlan:
    """Time grid, frequency grid and the kernel matrix ``kernel[j, i] = j_alpha(lam_j t_i)``."""

    time_grid: RadialGrid
    freq_grid: RadialGrid
    kernel: np.ndarray

    @property
    def order(self):
        return self.time_grid.order

    @property
    def alpha(self) -> float:
        return self.time_grid.alpha


def make_plan(time_grid: RadialGrid, freq_grid: RadialGrid | None = None) -> HankelPlan:
    """Precompute the kernel matrix. The frequency grid defaults to the time grid."""
    freq_grid = time_grid if freq_grid is None else freq_grid
    if time_grid.order != freq_grid.order:
        raise ValueError("time and frequency grids must share the Hankel order")
    arg = np.outer(freq_grid.nodes, time_grid.nodes)
    kernel = np.asarray(bessel_j_norm(time_grid.order, arg))
    kernel.setflags(write=False)
    return HankelPlan(time_grid, freq_grid, kernel)


def default_plan(order, domain_max=12.0, panels=64, points_per_panel=8) -> HankelPlan:
    return make_plan(build_radial_grid(order, domain_max, panels, points_per_panel))


def hankel_forward(plan: HankelPlan, f) -> RadialSignal:
    """Samples of H_alpha f on the frequency grid."""
    v = _values(plan.time_grid, f)
    return RadialSignal(plan.freq_grid, plan.kernel @ (plan.time_grid.weights * v))


def hankel_inverse(plan: HankelPlan, F) -> RadialSignal:
    """Inverse transform from the frequency grid back to the time grid."""
    v = _values(plan.freq_grid, F)
    return RadialSignal(plan.time_grid, plan.kernel.T @ (plan.freq_grid.weights * v))


def _forward_many(plan: HankelPlan, values: np.ndarray) -> np.ndarray:
    # rows of ``values`` are signals on the time grid
    return (values * plan.time_grid.weights) @ plan.kernel.T


def _inverse_many(plan: HankelPlan, values: np.ndarray) -> np.ndarray:
    return (values * plan.freq_grid.weights) @ plan.kernel


def parseval_residual(plan: HankelPlan, f, g) -> float:
    """Relative mismatch between <f, g> and <H f, H g>."""
    tg, fg = plan.time_grid, plan.freq_grid
    fv, gv = _values(tg, f), _values(tg, g)
    lhs = float(np.dot(tg.weights, fv * gv))
    F = plan.kernel @ (tg.weights * fv)
    G = plan.kernel @ (tg.weights * gv)
    rhs = float(np.dot(fg.weights, F * G))
    return abs(lhs - rhs) / max(abs(lhs), EPS_FLOOR)


def _check_moment(name, value):
    if not 1.0 <= value <= MAX_MOMENT:
        raise ValueError(f"{name} must lie in [1, {MAX_MOMENT}], got {value}")


def hankel_heisenberg(plan: HankelPlan, f, c: float = 1.0, d: float = 1.0) -> InequalityReport:
    """Heisenberg-type inequality for H_alpha with exponents c, d >= 1.

    ||t^d f||^(c/(c+d)) ||lam^c H f||^(d/(c+d)) >= (alpha+1)^(cd/(c+d)) ||f||
    """
    _check_moment("c", c)
    _check_moment("d", d)
    fv = _values(plan.time_grid, f)
    norm = lp_norm(plan.time_grid, fv)
    if norm == 0:
        raise ValueError("hankel_heisenberg needs a nonzero signal")
    F = hankel_forward(plan, fv)
    td = moment_norm(plan.time_grid, fv, d)
    lc = moment_norm(plan.freq_grid, F, c)
    lhs = td ** (c / (c + d)) * lc ** (d / (c + d))
    rhs = (plan.alpha + 1.0) ** (c * d / (c + d)) * norm
    return compare(
        "hankel_heisenberg", lhs, rhs, ">=",
        params={"alpha": plan.alpha, "c": c, "d": d},
        diagnostics={"time_moment": td, "freq_moment": lc, "norm": norm,
                     "tail_mass_time": tail_mass(plan.time_grid, fv),
                     "tail_mass_freq": tail_mass(plan.freq_grid, F)},
    )


def log_constant(alpha: float) -> float:
    """psi((alpha + 1) / 2) + ln 2."""
    return digamma((alpha + 1.0) / 2.0) + math.log(2.0)


def hankel_log_uncertainty(plan: HankelPlan, f) -> InequalityReport:
    """Logarithmic uncertainty for H_alpha.

    int ln(t)|f|^2 + int ln(lam)|H f|^2 >= (psi((alpha+1)/2) + ln 2) ||f||^2
    """
    tg, fg = plan.time_grid, plan.freq_grid
    fv = _values(tg, f)
    energy = float(np.dot(tg.weights, fv * fv))
    if energy == 0:
        raise ValueError("hankel_log_uncertainty needs a nonzero signal")
    F = hankel_forward(plan, fv).values
    time_term = float(np.dot(log_weights(tg), fv * fv))
    freq_term = float(np.dot(log_weights(fg), F * F))
    rhs = log_constant(plan.alpha) * energy
    return compare(
        "hankel_log_uncertainty", time_term + freq_term, rhs, ">=",
        rtol=0.0, atol=LOG_RTOL * energy,
        params={"alpha": plan.alpha},
        diagnostics={"time_term": time_term, "freq_term": freq_term, "energy": energy},
    )
