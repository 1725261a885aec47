"""Windowed Hankel transform.

For a window g the atoms are g_{k,s} = tau_k M_s g and

    W_g(f)(k, s) = int f(t) g_{k,s}(t) d gamma_alpha(t)

(real signals only, so the conjugation is the identity). Fields are sampled
on a :class:`~whankel.grid.ProductGrid` and integrated against d nu_alpha.
"""
from __future__ import annotations

import csv
import json
import math
import weakref
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import ProductGrid, RadialGrid, RadialSignal, Region, build_radial_grid, lp_norm, _values
from .hankel import HankelPlan, hankel_forward
from .specfun import bessel_j_norm
from .translation import modulated_spectra, translation_matrix

__all__ = [
    "TimeFreqField",
    "WindowAtomSet",
    "window_atom",
    "wht_forward",
    "wht_fields",
    "wht_pairs",
    "wht_via_convolution",
    "wht_orthogonality_residual",
    "plancherel_residual",
    "reproducing_kernel",
    "hs_norm_of_masked_projection",
    "default_product",
    "extended_grid",
    "write_field_csv",
    "write_field_json",
    "read_field_json",
    "read_field_csv",
    "HS_MAX_NODES",
]

HS_MAX_NODES = 24
FIELD_FORMAT_VERSION = "1"


@dataclass(frozen=True, eq=False)
class TimeFreqField:
    """Samples W(k_i, s_j) of a windowed transform on a product grid."""

    product: ProductGrid
    values: np.ndarray
    window_norm: float
    signal_norm: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.product.shape:
            raise ValueError(f"field shape {v.shape} does not match product grid {self.product.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def alpha(self) -> float:
        return self.product.order.alpha

    @property
    def energy(self) -> float:
        """int int |W|^2 d nu_alpha."""
        return float(np.sum(self.product.weights * self.values ** 2))

    def l2_norm(self) -> float:
        return math.sqrt(self.energy)

    def sup(self) -> float:
        return float(np.abs(self.values).max(initial=0.0))

    def masked_energy(self, region: Region) -> float:
        if region.product is not self.product and region.mask.shape != self.product.shape:
            raise ValueError("region lives on a different product grid")
        return float(np.sum((self.product.weights * self.values ** 2)[region.mask]))

    def masked_norm(self, region: Region) -> float:
        return math.sqrt(self.masked_energy(region))

    def weighted_norm(self, k_power: float = 0.0, s_power: float = 0.0) -> float:
        """|| k^k_power s^s_power W ||_{L^2(d nu)}."""
        k = self.product.k_grid.nodes[:, None] ** k_power
        s = self.product.s_grid.nodes[None, :] ** s_power
        return math.sqrt(float(np.sum(self.product.weights * (k * s * self.values) ** 2)))

    def scaled(self, c: float) -> "TimeFreqField":
        return TimeFreqField(self.product, self.values * c, self.window_norm, self.signal_norm * abs(c), dict(self.diagnostics))

    def normalized(self, signal: bool = True, window: bool = True) -> "TimeFreqField":
        """The field of f/||f|| and/or g/||g||, by bilinearity."""
        sn = self.signal_norm if signal else 1.0
        wn = self.window_norm if window else 1.0
        if sn == 0 or wn == 0:
            raise ValueError("cannot normalize a field of a zero signal or window")
        return TimeFreqField(self.product, self.values / (sn * wn), self.window_norm / wn,
                             self.signal_norm / sn, dict(self.diagnostics))


def default_product(plan: HankelPlan, s_domain_max: float = 12.0, s_panels: int = 8, s_points: int = 4) -> ProductGrid:
    """k-axis = the plan's time grid; a coarser s-axis (32 nodes by default)."""
    s_grid = build_radial_grid(plan.order, s_domain_max, s_panels, s_points)
    return ProductGrid(plan.time_grid, s_grid)


def extended_grid(grid: RadialGrid) -> RadialGrid:
    """Same panels continued to [0, 2T]; the first ``grid.size`` nodes coincide with ``grid``."""
    return build_radial_grid(grid.order, 2.0 * grid.domain_max, 2 * grid.panels, grid.points_per_panel)


_EXTENDED = weakref.WeakKeyDictionary()


def _extended(plan: HankelPlan):
    """(extended grid, kernel j_alpha(lam_j x_i) from the frequency grid to it), cached per plan."""
    hit = _EXTENDED.get(plan)
    if hit is None:
        ext = extended_grid(plan.time_grid)
        kern = np.asarray(bessel_j_norm(plan.order, np.outer(plan.freq_grid.nodes, ext.nodes)))
        hit = _EXTENDED[plan] = (ext, kern)
    return hit


def _modulated_rows(plan: HankelPlan, windows, s_values, method: str):
    """M_s g sampled on the extended grid: array (m, S, 2N) plus diagnostics."""
    _, kern = _extended(plan)
    amp, diagnostics = modulated_spectra(plan, windows, s_values, method=method)
    return (amp * plan.freq_grid.weights) @ kern, diagnostics


class WindowAtomSet:
    """A window g with its modulations M_s g cached for every s of an axis.

    M_s g can decay slowly (only exponentially once |H g|^2 is translated), and
    tau_k reads it up to radius t + k <= 2T. The modulated rows are therefore
    sampled on :func:`extended_grid`, directly from the inverse-transform
    quadrature, and ``rows`` holds their restriction to the time grid.
    """

    def __init__(self, plan: HankelPlan, window, s_values, method: str = "auto"):
        self.plan = plan
        tg = plan.time_grid
        self.window = RadialSignal(tg, _values(tg, window))
        self.norm = lp_norm(tg, self.window)
        if self.norm == 0:
            raise ValueError("window must be nonzero")
        self.s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
        self.method = method
        self.ext_grid = _extended(plan)[0]
        rows, diags = _modulated_rows(plan, self.window.values[None, :], self.s_values, method)
        self.ext_rows, self.diagnostics = rows[0], diags[0]
        self.rows = self.ext_rows[:, :tg.size]
        self.row_norms = np.sqrt((self.rows ** 2) @ tg.weights)

    def modulated(self, j: int) -> RadialSignal:
        return RadialSignal(self.plan.time_grid, self.rows[j])

    def translation(self, k: float) -> np.ndarray:
        """Matrix taking extended-grid samples to tau_k samples on the time grid."""
        return translation_matrix(self.ext_grid, k, targets=self.plan.time_grid.nodes, method=self.method)

    def atom(self, k: float, j: int) -> RadialSignal:
        """g_{k, s_j} on the time grid."""
        return RadialSignal(self.plan.time_grid, self.translation(k) @ self.ext_rows[j])

    def atoms(self, k_values) -> np.ndarray:
        """Array (len(k_values), len(s_values), N) of atoms."""
        k_values = np.atleast_1d(np.asarray(k_values, dtype=float))
        out = np.empty((k_values.size, self.s_values.size, self.plan.time_grid.size))
        for i, k in enumerate(k_values):
            out[i] = self.ext_rows @ self.translation(k).T
        return out


def window_atom(plan: HankelPlan, g, k: float, s: float, method: str = "auto") -> RadialSignal:
    """g_{k,s} = tau_k M_s g."""
    return WindowAtomSet(plan, g, [s], method=method).atom(k, 0)


def _analysis(plan: HankelPlan, k_values, signal_values: np.ndarray, ext_rows: np.ndarray, method: str) -> np.ndarray:
    """out[a, i, r] = sum_t w_t f_a(t) (tau_{k_i} ext_rows[r])(t).

    ``ext_rows`` live on the extended grid. Re-associated so each translation
    matrix is built once per k and shared across all signals and windows.
    """
    tg = plan.time_grid
    ext = _extended(plan)[0]
    weighted = (signal_values * tg.weights).T  # (N, m)
    out = np.empty((signal_values.shape[0], len(k_values), ext_rows.shape[0]))
    for i, k in enumerate(k_values):
        A = translation_matrix(ext, k, targets=tg.nodes, method=method)
        out[:, i, :] = (A.T @ weighted).T @ ext_rows.T
    return out


def wht_fields(plan: HankelPlan, product: ProductGrid, signals, windows, method: str = "auto"):
    """Fields W_{windows[b]}(signals[a]) for every pair, as nested lists [a][b]."""
    if product.order != plan.order:
        raise ValueError("product grid and plan have different orders")
    tg = plan.time_grid
    sig = np.array([_values(tg, f) for f in signals], dtype=float)
    sets = [WindowAtomSet(plan, g, product.s_grid.nodes, method=method) for g in windows]
    ns = product.s_grid.size
    rows = np.concatenate([s.ext_rows for s in sets], axis=0)
    raw = _analysis(plan, product.k_grid.nodes, sig, rows, method)
    sig_norms = [lp_norm(tg, v) for v in sig]
    out = []
    for a in range(len(sig)):
        line = []
        for b, ws in enumerate(sets):
            vals = raw[a, :, b * ns:(b + 1) * ns]
            line.append(TimeFreqField(product, vals, ws.norm, sig_norms[a], dict(ws.diagnostics)))
        out.append(line)
    return out


def wht_pairs(plan: HankelPlan, product: ProductGrid, signals, windows, method: str = "auto"):
    """Fields W_{windows[a]}(signals[a]) for matched pairs only.

    Cheaper than :func:`wht_fields` when every signal has its own window: one
    translation matrix per k serves all pairs.
    """
    if product.order != plan.order:
        raise ValueError("product grid and plan have different orders")
    if len(signals) != len(windows):
        raise ValueError("signals and windows must pair up")
    tg = plan.time_grid
    sig = np.array([_values(tg, f) for f in signals], dtype=float)
    win = np.array([_values(tg, g) for g in windows], dtype=float)
    win_norms = np.sqrt((win ** 2) @ tg.weights)
    if np.any(win_norms == 0):
        raise ValueError("window must be nonzero")
    rows, diags = _modulated_rows(plan, win, product.s_grid.nodes, method)
    ext = _extended(plan)[0]
    weighted = (sig * tg.weights).T  # (N, m)
    vals = np.empty((len(sig), product.k_grid.size, product.s_grid.size))
    for i, k in enumerate(product.k_grid.nodes):
        A = translation_matrix(ext, k, targets=tg.nodes, method=method)
        vals[:, i, :] = np.einsum("arn,na->ar", rows, A.T @ weighted)
    sig_norms = np.sqrt((sig ** 2) @ tg.weights)
    return [TimeFreqField(product, vals[a], float(win_norms[a]), float(sig_norms[a]), diags[a]) for a in range(len(sig))]


def wht_forward(plan: HankelPlan, product: ProductGrid, f, g, method: str = "auto") -> TimeFreqField:
    """W_g(f) on the product grid."""
    f_norm = lp_norm(plan.time_grid, _values(plan.time_grid, f))
    if lp_norm(plan.time_grid, _values(plan.time_grid, g)) == 0:
        raise ValueError("window must be nonzero")
    if f_norm == 0:
        return TimeFreqField(product, np.zeros(product.shape), lp_norm(plan.time_grid, g), 0.0)
    return wht_fields(plan, product, [f], [g], method=method)[0][0]


def wht_via_convolution(plan: HankelPlan, product: ProductGrid, f, g, method: str = "auto") -> TimeFreqField:
    """W_g(f)(k, s) = (f # M_s g)(k), evaluated on the transform side.

    H(f # h) = H f . H h and H(M_s g) = sqrt(tau_s |H g|^2), so the field is an
    inverse transform of a product; no translation in time is involved.
    """
    from .translation import translation_table

    tg, fg = plan.time_grid, plan.freq_grid
    F = hankel_forward(plan, f).values
    G = hankel_forward(plan, g).values
    shifted = translation_table(fg, G * G, product.s_grid.nodes, method=method)
    amp = np.sqrt(np.maximum(shifted, 0.0))
    kern = np.asarray(bessel_j_norm(plan.order, np.outer(product.k_grid.nodes, fg.nodes)))
    vals = kern @ (fg.weights * F * amp).T
    return TimeFreqField(product, vals, lp_norm(tg, g), lp_norm(tg, f))


def plancherel_residual(field: TimeFreqField) -> float:
    """| ||W|| / (||f|| ||g||) - 1 |."""
    denom = field.signal_norm * field.window_norm
    if denom == 0:
        return 0.0
    return abs(field.l2_norm() / denom - 1.0)


def wht_orthogonality_residual(plan: HankelPlan, product: ProductGrid, f, h, g, method: str = "auto") -> float:
    """| <W_g f, W_g h>_nu - ||g||^2 <f, h>_gamma | / (||g||^2 ||f|| ||h||)."""
    tg = plan.time_grid
    fv, hv, gv = (_values(tg, x) for x in (f, h, g))
    nf, nh, ng = (lp_norm(tg, x) for x in (fv, hv, gv))
    if min(nf, nh, ng) == 0:
        raise ValueError("orthogonality residual needs nonzero f, h and g")
    (Wf,), (Wh,) = wht_fields(plan, product, [fv, hv], [gv], method=method)
    lhs = float(np.sum(product.weights * Wf.values * Wh.values))
    rhs = ng ** 2 * float(np.dot(tg.weights, fv * hv))
    return abs(lhs - rhs) / (ng ** 2 * nf * nh)


def reproducing_kernel(plan: HankelPlan, g, kp: float, sp: float, k: float, s: float, method: str = "auto") -> float:
    """H_g(k', s'; k, s) = W_g(g_{k',s'})(k, s) / ||g||^2."""
    atoms = WindowAtomSet(plan, g, [sp, s], method=method)
    a1 = atoms.atom(kp, 0).values
    a2 = atoms.atom(k, 1).values
    return float(np.dot(plan.time_grid.weights, a1 * a2)) / atoms.norm ** 2


def kernel_gram(plan: HankelPlan, product: ProductGrid, g, method: str = "auto") -> np.ndarray:
    """H_g between every pair of product-grid nodes, shape (Nk*Ns, Nk*Ns)."""
    atoms = WindowAtomSet(plan, g, product.s_grid.nodes, method=method)
    stack = atoms.atoms(product.k_grid.nodes).reshape(-1, plan.time_grid.size)
    return (stack * plan.time_grid.weights) @ stack.T / atoms.norm ** 2


def hs_norm_of_masked_projection(plan: HankelPlan, product: ProductGrid, g, region: Region, method: str = "auto") -> float:
    """Squared Hilbert-Schmidt norm of O_E O_g:

        int_E int |H_g(k', s'; k, s)|^2 d nu(k', s') d nu(k, s)

    discretized on ``product``. The quadruple sum costs O((Nk Ns)^2 N), so
    each axis is capped at HS_MAX_NODES nodes.
    """
    if max(product.shape) > HS_MAX_NODES:
        raise ValueError(f"product grid {product.shape} exceeds the {HS_MAX_NODES}-node cap for the 4D Hilbert-Schmidt sum")
    if region.mask.shape != product.shape:
        raise ValueError("region does not match the product grid")
    if region.is_empty():
        return 0.0
    gram = kernel_gram(plan, product, g, method=method)
    nu = product.weights.ravel()
    inner_integral = (gram ** 2) @ nu
    return float(np.sum((nu * inner_integral)[region.mask.ravel()]))


def _grid_meta(grid: RadialGrid) -> dict:
    return {"domain_max": grid.domain_max, "panels": grid.panels, "points_per_panel": grid.points_per_panel}


def write_field_csv(path, fld: TimeFreqField):
    """Rows ``k,s,weight,value`` with 17 significant digits (exact round trip)."""
    k = fld.product.k_grid.nodes
    s = fld.product.s_grid.nodes
    w = fld.product.weights
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write("k,s,weight,value\n")
        for i in range(k.size):
            for j in range(s.size):
                fh.write(f"{k[i]:.17g},{s[j]:.17g},{w[i, j]:.17g},{fld.values[i, j]:.17g}\n")


def read_field_csv(path, product: ProductGrid) -> np.ndarray:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        vals = np.array([float(r["value"]) for r in reader])
    return vals.reshape(product.shape)


def field_envelope(fld: TimeFreqField, version: str) -> dict:
    return {
        "format": "windowed-hankel-field",
        "format_version": FIELD_FORMAT_VERSION,
        "version": version,
        "alpha": fld.alpha,
        "k_grid": _grid_meta(fld.product.k_grid),
        "s_grid": _grid_meta(fld.product.s_grid),
        "window_norm": fld.window_norm,
        "signal_norm": fld.signal_norm,
        "sup": fld.sup(),
        "l2_norm": fld.l2_norm(),
        "diagnostics": fld.diagnostics,
        "values": fld.values.tolist(),
    }


def write_field_json(path, fld: TimeFreqField, version: str = ""):
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(field_envelope(fld, version), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_field_json(path) -> TimeFreqField:
    """Rebuild a field (and its grids) from a JSON envelope."""
    with Path(path).open(encoding="utf-8") as fh:
        doc = json.load(fh)
    kg = build_radial_grid(doc["alpha"], **doc["k_grid"])
    sg = build_radial_grid(doc["alpha"], **doc["s_grid"])
    return TimeFreqField(ProductGrid(kg, sg), np.array(doc["values"], dtype=float),
                         doc["window_norm"], doc["signal_norm"], doc.get("diagnostics", {}))
