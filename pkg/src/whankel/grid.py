"""Quadrature grids for the measure d gamma_alpha and the product measure d nu_alpha.

A :class:`RadialGrid` is a composite Gauss-Legendre rule on [0, T] whose
weights already contain the density t^(2 alpha + 1) / (2^alpha Gamma(alpha + 1)),
so ``sum(w * f)`` approximates the integral of f against d gamma_alpha.
Samples living on a grid are :class:`RadialSignal` objects. Off-node values
use degree (points_per_panel - 1) Lagrange interpolation on the panel
containing the point, and are zero beyond T.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .specfun import HankelOrder, as_order, gamma

__all__ = [
    "RadialGrid",
    "RadialSignal",
    "ProductGrid",
    "Region",
    "build_radial_grid",
    "integrate",
    "inner",
    "lp_norm",
    "moment_norm",
    "tail_mass",
    "log_weights",
    "region_measure",
    "ball_region",
    "ball_measure",
    "total_mass",
    "read_signal_csv",
    "write_signal_csv",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def total_mass(order, domain_max: float) -> float:
    """Closed form of gamma_alpha([0, T]) = T^(2a+2) / (2^(a+1) Gamma(a+2))."""
    a = as_order(order).alpha
    return domain_max ** (2 * a + 2) / (2 ** (a + 1) * gamma(a + 2))


def ball_measure(order, r: float) -> float:
    """nu_alpha of the quarter disc {k, s >= 0, k^2 + s^2 <= r^2}."""
    a = as_order(order).alpha
    return r ** (4 * (a + 1)) / (2 ** (2 * (a + 1)) * gamma(2 * a + 3))


@dataclass(frozen=True, eq=False)
class RadialGrid:
    order: HankelOrder
    nodes: np.ndarray
    weights: np.ndarray
    domain_max: float
    panels: int
    points_per_panel: int
    _ref_nodes: np.ndarray = field(repr=False)
    _bary: np.ndarray = field(repr=False)

    @property
    def alpha(self) -> float:
        return self.order.alpha

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def panel_width(self) -> float:
        return self.domain_max / self.panels

    def __len__(self):
        return self.nodes.size

    def same_as(self, other: "RadialGrid") -> bool:
        return self is other or (
            self.order == other.order
            and self.nodes.shape == other.nodes.shape
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def interpolation_weights(self, r):
        """Panel-local Lagrange weights for evaluation points ``r``.

        Returns ``(cols, basis)`` where ``cols`` has shape ``r.shape + (m,)``
        holding node indices and ``basis`` the matching weights, such that
        ``(basis * values[cols]).sum(-1)`` interpolates ``values``. Points
        outside [0, T] get zero weights.
        """
        r = np.asarray(r, dtype=float)
        m = self.points_per_panel
        h = self.panel_width
        outside = (r > self.domain_max) | (r < 0)
        # far-out points would make the barycentric denominator cancel to 0
        rr = np.where(outside, 0.0, r)
        p = np.clip(np.floor(rr / h).astype(np.int64), 0, self.panels - 1)
        xi = 2.0 * (rr - p * h) / h - 1.0
        d = xi[..., None] - self._ref_nodes
        exact = d == 0.0
        d[exact] = 1.0
        basis = self._bary / d
        basis /= basis.sum(axis=-1, keepdims=True)
        hit = exact.any(axis=-1)
        if np.any(hit):
            basis[hit] = exact[hit]
        if np.any(outside):
            basis[outside] = 0.0
        cols = p[..., None] * m + np.arange(m)
        return cols, basis

    def interpolate(self, values, r):
        cols, basis = self.interpolation_weights(r)
        values = np.asarray(values, dtype=float)
        return (basis * values[cols]).sum(axis=-1)


def build_radial_grid(order, domain_max: float = 12.0, panels: int = 64, points_per_panel: int = 8) -> RadialGrid:
    """Composite Gauss-Legendre grid on [0, domain_max] for d gamma_alpha.

    >>> g = build_radial_grid(0.0, 1.0, 8, 8)
    >>> round(float(g.weights.sum()), 12)
    0.5
    """
    order = as_order(order)
    domain_max = float(domain_max)
    if not (domain_max > 0 and math.isfinite(domain_max)):
        raise ValueError("domain_max must be a positive finite number")
    if int(panels) != panels or panels < 1:
        raise ValueError("panels must be a positive integer")
    if int(points_per_panel) != points_per_panel or not 2 <= points_per_panel <= 32:
        raise ValueError("points_per_panel must be an integer in [2, 32]")
    panels, m = int(panels), int(points_per_panel)
    if panels * m < 8:
        raise ValueError("a grid needs at least 8 nodes")
    x, w = np.polynomial.legendre.leggauss(m)
    h = domain_max / panels
    left = np.arange(panels)[:, None] * h
    nodes = (left + 0.5 * h * (x + 1.0)).ravel()
    a = order.alpha
    density = nodes ** (2 * a + 1) / (2 ** a * gamma(a + 1))
    weights = np.tile(0.5 * h * w, panels) * density
    # barycentric weights of the Gauss-Legendre points
    bary = (-1.0) ** np.arange(m) * np.sqrt((1.0 - x * x) * w)
    return RadialGrid(order, _frozen(nodes), _frozen(weights), domain_max, panels, m, _frozen(x), _frozen(bary))


@dataclass(frozen=True, eq=False)
class RadialSignal:
    """Real samples of a function on the nodes of a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != self.grid.size:
            raise ValueError(f"signal has {v.size} samples but grid has {self.grid.size} nodes")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: RadialGrid, func) -> "RadialSignal":
        return cls(grid, func(grid.nodes))

    def __call__(self, r):
        return self.grid.interpolate(self.values, r)

    def _check(self, other: "RadialSignal"):
        if not self.grid.same_as(other.grid):
            raise ValueError("signals live on different grids")

    def __add__(self, other):
        self._check(other)
        return RadialSignal(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return RadialSignal(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, RadialSignal):
            self._check(c)
            return RadialSignal(self.grid, self.values * c.values)
        return RadialSignal(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return RadialSignal(self.grid, -self.values)

    def norm(self, p=2.0) -> float:
        return lp_norm(self.grid, self, p)

    def normalized(self) -> "RadialSignal":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero signal")
        return self * (1.0 / n)


def _values(grid: RadialGrid, f) -> np.ndarray:
    if isinstance(f, RadialSignal):
        if not f.grid.same_as(grid):
            raise ValueError("signal does not live on this grid")
        return f.values
    v = np.asarray(f, dtype=float)
    if v.shape[-1] != grid.size:
        raise ValueError(f"expected {grid.size} samples, got {v.shape[-1]}")
    return v


def integrate(grid: RadialGrid, f) -> float:
    """Quadrature of f against d gamma_alpha on [0, T]."""
    return float(np.dot(grid.weights, _values(grid, f)))


def inner(grid: RadialGrid, f, g) -> float:
    return float(np.dot(grid.weights, _values(grid, f) * _values(grid, g)))


def lp_norm(grid: RadialGrid, f, p=2.0) -> float:
    """L^p(d gamma_alpha) norm; p = inf is the maximum over nodes."""
    v = np.abs(_values(grid, f))
    if p == np.inf or p == "inf":
        return float(v.max(initial=0.0))
    p = float(p)
    if not p >= 1:
        raise ValueError("lp_norm needs p >= 1")
    if p == 2.0:
        return math.sqrt(float(np.dot(grid.weights, v * v)))
    return float(np.dot(grid.weights, v ** p)) ** (1.0 / p)


def moment_norm(grid: RadialGrid, f, power: float) -> float:
    """|| t^power f ||_2 on the grid."""
    v = _values(grid, f) * grid.nodes ** power
    return math.sqrt(float(np.dot(grid.weights, v * v)))


def log_weights(grid: RadialGrid) -> np.ndarray:
    """Weights w with sum_i w_i f(t_i) ~ int_0^T ln(t) f(t) d gamma_alpha(t).

    Gauss-Legendre copes badly with ln(t) t^(2 alpha + 1) on the first panel
    (1e-3 error at alpha = -1/2), so that panel gets product-integration
    weights, exact for ln(t) t^(2 alpha + 1) times polynomials of degree < m.
    """
    w = grid.weights * np.log(grid.nodes)
    m, h, a = grid.points_per_panel, grid.panel_width, grid.alpha
    b = 2 * a + 1 + np.arange(m)
    # int_0^h t^b ln t dt = h^(b+1) (ln h / (b+1) - 1/(b+1)^2)
    moments = (math.log(h) / (b + 1) - 1.0 / (b + 1) ** 2) * h ** (2 * a + 2) / (2 ** a * gamma(a + 1))
    x = grid.nodes[:m] / h
    w[:m] = np.linalg.solve(x[None, :] ** np.arange(m)[:, None], moments)
    return w


def tail_mass(grid: RadialGrid, f, start_fraction: float = 0.9) -> float:
    """Share of ||f||_2^2 carried by nodes beyond start_fraction * T."""
    v = _values(grid, f)
    e = grid.weights * v * v
    total = e.sum()
    if total == 0:
        return 0.0
    return float(e[grid.nodes > start_fraction * grid.domain_max].sum() / total)


@dataclass(frozen=True, eq=False)
class ProductGrid:
    """Tensor grid (k, s) carrying d nu_alpha = d gamma_alpha(k) d gamma_alpha(s)."""

    k_grid: RadialGrid
    s_grid: RadialGrid

    def __post_init__(self):
        if self.k_grid.order != self.s_grid.order:
            raise ValueError("k and s axes must share the Hankel order")

    @property
    def order(self) -> HankelOrder:
        return self.k_grid.order

    @property
    def shape(self):
        return (self.k_grid.size, self.s_grid.size)

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.k_grid.weights, self.s_grid.weights)

    def radius(self) -> np.ndarray:
        return np.hypot(self.k_grid.nodes[:, None], self.s_grid.nodes[None, :])


@dataclass(frozen=True, eq=False)
class Region:
    """Boolean node mask on a product grid standing for a set E."""

    product: ProductGrid
    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool)
        if m.shape != self.product.shape:
            raise ValueError(f"mask shape {m.shape} does not match product grid {self.product.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def full(cls, product: ProductGrid) -> "Region":
        return cls(product, np.ones(product.shape, dtype=bool))

    @classmethod
    def empty(cls, product: ProductGrid) -> "Region":
        return cls(product, np.zeros(product.shape, dtype=bool))

    @classmethod
    def rectangle(cls, product: ProductGrid, k_max: float, s_max: float, k_min: float = 0.0, s_min: float = 0.0) -> "Region":
        k = product.k_grid.nodes[:, None]
        s = product.s_grid.nodes[None, :]
        return cls(product, (k >= k_min) & (k <= k_max) & (s >= s_min) & (s <= s_max))

    def complement(self) -> "Region":
        return Region(self.product, ~self.mask)

    def __and__(self, other: "Region") -> "Region":
        return Region(self.product, self.mask & other.mask)

    def __or__(self, other: "Region") -> "Region":
        return Region(self.product, self.mask | other.mask)

    @property
    def measure(self) -> float:
        return region_measure(self)

    def is_empty(self) -> bool:
        return not self.mask.any()


def region_measure(region: Region) -> float:
    """Discrete nu_alpha(E): product weights summed over the mask."""
    w = region.product.weights
    return float(w[region.mask].sum())


def ball_region(product: ProductGrid, r: float) -> Region:
    if not r > 0:
        raise ValueError("ball radius must be positive")
    return Region(product, product.radius() <= r)


def read_signal_csv(path, grid: RadialGrid) -> RadialSignal:
    """Load a ``t,value`` CSV and linearly interpolate it onto the grid nodes.

    Nodes outside the sampled t-range get 0.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value'")
        rows = [(float(a), float(b)) for a, b, *_ in (r for r in reader if r)]
    if not rows:
        raise ValueError(f"{path}: no samples")
    t, v = np.array(rows).T
    order = np.argsort(t, kind="stable")
    t, v = t[order], v[order]
    values = np.interp(grid.nodes, t, v, left=0.0, right=0.0)
    inside = (grid.nodes >= t[0]) & (grid.nodes <= t[-1])
    return RadialSignal(grid, np.where(inside, values, 0.0))


def write_signal_csv(path, signal: RadialSignal, t=None):
    t = signal.grid.nodes if t is None else np.asarray(t)
    values = signal.values if t is signal.grid.nodes else signal(t)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write("t,value\n")
        for a, b in zip(t, values):
            fh.write(f"{a:.17g},{b:.17g}\n")
