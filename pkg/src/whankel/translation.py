"""Generalized translation, convolution and modulation for the Hankel transform.

Translation by k acts on a sampled signal through a dense matrix built from
off-node interpolation:

* ``angular``: the angular-mean form. With u = cos(theta) the weight
  sin^(2 alpha) becomes (1 - u^2)^(alpha - 1/2), so Gauss-Jacobi nodes
  absorb it exactly for every alpha > -1/2.
* ``kernel``: integration of f(x) K(k, t, x) over x in (|k - t|, k + t),
  Gauss-Jacobi in x with the Delta^(2 alpha - 1) endpoint behaviour as weight.
* alpha = -1/2 uses (f(t + k) + f(|t - k|)) / 2.
"""
from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .grid import RadialGrid, RadialSignal, _values
from .specfun import as_order

__all__ = [
    "translation_kernel",
    "kernel_constant",
    "kernel_mass",
    "translation_matrix",
    "translate",
    "translate_at",
    "translation_table",
    "convolve",
    "modulate",
    "modulated_windows",
    "modulated_spectra",
    "N_THETA",
    "CLAMP_RTOL",
]

N_THETA = 64
CLAMP_RTOL = 1e-8
METHODS = ("auto", "angular", "kernel")


def kernel_constant(order) -> float:
    """Normalizing constant of K so that int K(k, t, x) d gamma_alpha(x) = 1."""
    a = as_order(order).alpha
    if a <= -0.5:
        raise ValueError("the kernel form needs alpha > -1/2")
    return math.exp(2 * math.lgamma(a + 1) - math.lgamma(a + 0.5)) * 2.0 ** (1 - a) / math.sqrt(math.pi)


def triangle_delta(k, t, x):
    """((k+t)^2 - x^2)^(1/2) (x^2 - (k-t)^2)^(1/2), zero outside the triangle range."""
    k, t, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, t, x)))
    inside = (x > np.abs(k - t)) & (x < k + t)
    a = np.where(inside, (k + t) ** 2 - x ** 2, 0.0)
    b = np.where(inside, x ** 2 - (k - t) ** 2, 0.0)
    return np.sqrt(a) * np.sqrt(b)


def translation_kernel(order, k, t, x):
    """K(k, t, x) for alpha > -1/2; zero unless |k - t| < x < k + t."""
    a = as_order(order).alpha
    if a == -0.5:
        raise ValueError("alpha = -1/2 has no kernel density; use the closed-form translation")
    k, t, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, t, x)))
    if np.any(k < 0) or np.any(t < 0) or np.any(x < 0):
        raise ValueError("translation_kernel needs k, t, x >= 0")
    inside = (x > np.abs(k - t)) & (x < k + t)
    delta = triangle_delta(k, t, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = kernel_constant(a) * delta ** (2 * a - 1) / (k * t * x) ** (2 * a)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _jacobi_rule(alpha: float, n: int):
    """Nodes/weights on [-1, 1] for weight (1 - u^2)^(alpha - 1/2), weights summing to 1."""
    u, c = roots_jacobi(n, alpha - 0.5, alpha - 0.5)
    c = c / c.sum()
    u.setflags(write=False)
    c.setflags(write=False)
    return u, c


def _gamma_density_norm(alpha):
    return 2.0 ** alpha * math.gamma(alpha + 1.0)


def _stencil(alpha: float, k: float, t: np.ndarray, method: str, n_theta: int):
    """Evaluation radii and coefficients: tau_k f(t_i) = sum_q coef[i, q] f(points[i, q])."""
    if alpha == -0.5:
        points = np.stack([t + k, np.abs(t - k)], axis=-1)
        coef = np.full(points.shape, 0.5)
        return points, coef
    if method == "angular":
        u, c = _jacobi_rule(alpha, n_theta)
        r2 = t[:, None] ** 2 + k * k + 2.0 * k * t[:, None] * u[None, :]
        points = np.sqrt(np.maximum(r2, 0.0))
        coef = np.broadcast_to(c, points.shape)
        return points, coef
    # kernel form in x-space
    v, c = _jacobi_rule(alpha, n_theta)
    lo = np.abs(t - k)[:, None]
    hi = (t + k)[:, None]
    half = 0.5 * (hi - lo)
    x = lo + half * (v[None, :] + 1.0)
    kt = k * t[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        # the (1-v^2)^(alpha-1/2) part of Delta^(2 alpha - 1) is the quadrature weight
        smooth = ((hi + x) * (x + lo)) ** (alpha - 0.5) * half ** (2 * alpha - 1)
        density = x ** (2 * alpha + 1) / _gamma_density_norm(alpha)
        coef = kernel_constant(alpha) * smooth / (kt * x) ** (2 * alpha) * density * half
        coef = coef * c[None, :] * _jacobi_mass(alpha)
    degenerate = (kt[:, 0] == 0)
    if np.any(degenerate):
        # tau_0 f(t) = f(t) and tau_k f(0) = f(k)
        x[degenerate] = hi[degenerate]
        coef[degenerate] = 0.0
        coef[degenerate, 0] = 1.0
    return x, coef


@lru_cache(maxsize=64)
def _jacobi_mass(alpha: float) -> float:
    """int_{-1}^{1} (1 - u^2)^(alpha - 1/2) du."""
    return math.sqrt(math.pi) * math.exp(math.lgamma(alpha + 0.5) - math.lgamma(alpha + 1.0))


def _resolve(alpha: float, method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown translation method {method!r}; choose from {METHODS}")
    if alpha == -0.5:
        return "closed"
    if method == "auto":
        return "angular"
    if method == "kernel" and alpha < 0.5:
        raise ValueError("kernel translation needs alpha >= 1/2 (Delta^(2 alpha - 1) is singular at the endpoints)")
    return method


def _assemble(grid: RadialGrid, points: np.ndarray, coef: np.ndarray) -> np.ndarray:
    n = grid.size
    rows = points.shape[0]
    cols, basis = grid.interpolation_weights(points)
    vals = basis * coef[..., None]
    flat = (np.arange(rows)[:, None, None] * n + cols).ravel()
    return np.bincount(flat, weights=vals.ravel(), minlength=rows * n).reshape(rows, n)


def translation_matrix(grid: RadialGrid, k: float, targets=None, method: str = "auto", n_theta: int = N_THETA) -> np.ndarray:
    """Matrix A with ``(A @ f.values)[i] = tau_k f(targets[i])``.

    ``targets`` defaults to the grid nodes. Values of f beyond the grid's
    domain are taken as zero.
    """
    k = float(k)
    if not k >= 0:
        raise ValueError("translation needs k >= 0")
    alpha = grid.alpha
    method = _resolve(alpha, method)
    t = grid.nodes if targets is None else np.atleast_1d(np.asarray(targets, dtype=float))
    if np.any(t < 0):
        raise ValueError("translation targets must be >= 0")
    points, coef = _stencil(alpha, k, t, method, n_theta)
    return _assemble(grid, points, np.asarray(coef))


def translate(grid: RadialGrid, f, k: float, method: str = "auto", n_theta: int = N_THETA) -> RadialSignal:
    """tau_k f sampled on the grid nodes."""
    v = _values(grid, f)
    return RadialSignal(grid, translation_matrix(grid, k, method=method, n_theta=n_theta) @ v)


def translate_at(grid: RadialGrid, f, k: float, t, method: str = "auto", n_theta: int = N_THETA):
    """tau_k f evaluated at arbitrary points t >= 0."""
    v = _values(grid, f)
    out = translation_matrix(grid, k, targets=t, method=method, n_theta=n_theta) @ v
    return float(out[0]) if np.ndim(t) == 0 else out


def translation_table(grid: RadialGrid, values, ks, method: str = "auto", n_theta: int = N_THETA) -> np.ndarray:
    """``table[j, ..., i] = tau_{ks[j]} f(t_i)`` for a batch of signals.

    ``values`` has shape (N,) or (m, N); the result has shape (len(ks), N)
    or (len(ks), m, N).
    """
    v = np.asarray(values, dtype=float)
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    out = np.empty((ks.size,) + v.shape)
    for j, k in enumerate(ks):
        out[j] = (translation_matrix(grid, k, method=method, n_theta=n_theta) @ v.T).T
    return out


def convolve(grid: RadialGrid, f, g, method: str = "auto") -> RadialSignal:
    """(f #_alpha g)(t) = int f(r) tau_t(g)(r) d gamma_alpha(r), sampled on the nodes."""
    fv, gv = _values(grid, f), _values(grid, g)
    table = translation_table(grid, gv, grid.nodes, method=method)
    return RadialSignal(grid, table @ (grid.weights * fv))


def modulated_spectra(plan, windows, s_values, method: str = "auto"):
    """sqrt(tau_s |H g|^2) on the frequency grid for a batch of windows.

    ``windows`` has shape (m, N) (time-grid samples). Returns an array of shape
    (m, len(s_values), N) and one diagnostics dict per window. Quadrature noise
    can leave small negative values in tau_s |H g|^2; values within CLAMP_RTOL
    of the peak are zeroed, anything more negative is zeroed too but counted
    and warned about.
    """
    from .hankel import _forward_many

    gv = np.atleast_2d(np.asarray(windows, dtype=float))
    if not np.all(np.any(gv != 0, axis=1)):
        raise ValueError("modulation needs a nonzero window")
    G = _forward_many(plan, gv)
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    if np.any(s_values < 0):
        raise ValueError("modulation needs s >= 0")
    shifted = np.swapaxes(translation_table(plan.freq_grid, G * G, s_values, method=method), 0, 1)
    peak = np.abs(shifted).max(axis=-1, keepdims=True)
    neg = shifted < 0
    severe = shifted < -CLAMP_RTOL * peak
    n_severe = int(severe.sum())
    if n_severe:
        warnings.warn(f"modulation: {n_severe} translated spectrum values below -{CLAMP_RTOL:g} x peak were clamped",
                      RuntimeWarning, stacklevel=2)
    amp = np.sqrt(np.where(neg, 0.0, shifted))
    diagnostics = [
        {
            "clamped": int(neg[a].sum()),
            "clamped_severe": int(severe[a].sum()),
            "min_translated_power": float(shifted[a].min()),
        }
        for a in range(gv.shape[0])
    ]
    return amp, diagnostics


def modulated_windows(plan, g, s_values, method: str = "auto", spectrum: bool = False):
    """Rows M_s g on the time grid for each s, plus clamp diagnostics.

    M_s g = H( sqrt( tau_s |H g|^2 ) ); see :func:`modulated_spectra` for the
    clamping policy. With ``spectrum=True`` the rows are sqrt(tau_s |H g|^2)
    on the frequency grid, before the final transform.
    """
    from .hankel import _inverse_many

    gv = _values(plan.time_grid, g)
    amp, diagnostics = modulated_spectra(plan, gv[None, :], s_values, method=method)
    rows = amp[0] if spectrum else _inverse_many(plan, amp[0])
    return rows, diagnostics[0]


def modulate(plan, g, s: float, method: str = "auto") -> RadialSignal:
    """M_s g on the time grid."""
    if not s >= 0:
        raise ValueError("modulation needs s >= 0")
    rows, _ = modulated_windows(plan, g, [s], method=method)
    return RadialSignal(plan.time_grid, rows[0])


def kernel_mass(order, k: float, t: float, n_theta: int = N_THETA) -> float:
    """int K(k, t, x) d gamma_alpha(x) by the x-space rule used for ``method='kernel'``."""
    alpha = as_order(order).alpha
    if alpha < 0.5:
        raise ValueError("kernel_mass follows the kernel method and needs alpha >= 1/2")
    points, coef = _stencil(alpha, float(k), np.array([float(t)]), "kernel", n_theta)
    return float(np.sum(coef))
