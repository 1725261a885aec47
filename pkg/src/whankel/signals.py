"""Built-in test signals and the seeded random family used by the verification suite.

Signals are described by a :class:`SignalSpec` (kind + parameters) so that the
same signal can be sampled on grids of any order and resolution, and written
into a report for triage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre

from .grid import RadialGrid, RadialSignal

__all__ = ["SignalSpec", "gaussian", "laguerre", "laguerre_mix", "raised_cosine", "random_family", "KINDS"]

KINDS = ("gaussian", "laguerre", "laguerre_mix", "raised_cosine", "zero")


@dataclass(frozen=True)
class SignalSpec:
    """A named analytic signal t -> f(t) on [0, inf).

    ``laguerre`` and ``laguerre_mix`` depend on the Hankel order, so sampling
    goes through :meth:`sample` with a grid (or an explicit alpha).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}; choose from {KINDS}")

    def evaluate(self, t, alpha: float = 0.0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "zero":
            return np.zeros_like(t)
        if self.kind == "gaussian":
            w = float(p.get("width", 1.0))
            return float(p.get("amplitude", 1.0)) * np.exp(-0.5 * (t / w) ** 2)
        if self.kind == "laguerre":
            u = (t / float(p.get("scale", 1.0))) ** 2
            return eval_genlaguerre(int(p.get("n", 0)), alpha, u) * np.exp(-0.5 * u)
        if self.kind == "laguerre_mix":
            u = (t / float(p.get("scale", 1.0))) ** 2
            out = np.zeros_like(t)
            for n, c in enumerate(p["coefficients"]):
                out += c * eval_genlaguerre(n, alpha, u)
            return out * np.exp(-0.5 * u)
        # raised_cosine: squared Hann bump, C^3 at the edge of its support
        c, r = float(p.get("center", 0.0)), float(p.get("radius", 2.0))
        z = (t - c) / r
        return np.where(np.abs(z) < 1.0, (0.5 * (1.0 + np.cos(math.pi * z))) ** 2, 0.0)

    def sample(self, grid: RadialGrid) -> RadialSignal:
        return RadialSignal(grid, self.evaluate(grid.nodes, grid.alpha))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def label(self) -> str:
        """Short description, e.g. ``gaussian(width=0.75)``."""
        def fmt(v):
            if isinstance(v, float):
                return format(v, ".6g")
            if isinstance(v, list):
                return "[" + ",".join(fmt(x) for x in v) + "]"
            return str(v)
        inner = ",".join(f"{k}={fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"


def gaussian(width: float = 1.0, amplitude: float = 1.0) -> SignalSpec:
    """exp(-t^2 / (2 width^2)); width 1 is a fixed point of the transform."""
    if not width > 0:
        raise ValueError("gaussian width must be positive")
    return SignalSpec("gaussian", {"width": float(width), "amplitude": float(amplitude)})


def laguerre(n: int, scale: float = 1.0) -> SignalSpec:
    """L_n^(alpha)(u) exp(-u/2) with u = (t/scale)^2."""
    if int(n) != n or n < 0:
        raise ValueError("laguerre index must be a non-negative integer")
    return SignalSpec("laguerre", {"n": int(n), "scale": float(scale)})


def laguerre_mix(coefficients, scale: float = 1.0) -> SignalSpec:
    return SignalSpec("laguerre_mix", {"coefficients": [float(c) for c in coefficients], "scale": float(scale)})


def raised_cosine(radius: float = 2.0, center: float = 0.0) -> SignalSpec:
    """Squared raised-cosine bump supported on |t - center| < radius.

    An off-center bump should satisfy center >= radius; otherwise its even
    extension has a kink at the origin and the spectrum decays slowly.
    """
    if not radius > 0:
        raise ValueError("raised_cosine radius must be positive")
    return SignalSpec("raised_cosine", {"radius": float(radius), "center": float(center)})


def random_family(count: int, seed: int) -> list[SignalSpec]:
    """``count`` signals cycling Gaussian / Laguerre-combination / bump.

    Gaussian widths in [0.5, 2]; Laguerre combinations of degree <= 4 with
    scale in [0.75, 1.25]; bumps of radius in [1.5, 3], either centered or
    detached from the origin. Bump supports stay inside [0, 6]: a windowed
    field of f and g spreads up to k = (support of f) + (support of g), and it
    has to fit on the default k-axis [0, 12].
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            out.append(gaussian(float(rng.uniform(0.5, 2.0))))
        elif kind == 1:
            deg = int(rng.integers(1, 5))
            coef = rng.normal(size=deg + 1)
            out.append(laguerre_mix(coef.round(6).tolist(), float(rng.uniform(0.75, 1.25))))
        else:
            radius = float(rng.uniform(1.5, 3.0))
            center = 0.0 if rng.random() < 0.5 else float(rng.uniform(radius, 6.0 - radius))
            out.append(raised_cosine(radius, center))
    return out
