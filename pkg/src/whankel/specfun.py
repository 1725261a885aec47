"""Scalar special functions: gamma, digamma and the normalized Bessel function.

The normalized Bessel function is

    j_alpha(t) = Gamma(alpha + 1) * sum_n (-1)^n / (n! Gamma(n + alpha + 1)) (t/2)^(2n)

which equals 1 at the origin and is bounded by 1 in modulus on the real line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "HankelOrder",
    "as_order",
    "gamma",
    "digamma",
    "bessel_j_norm",
    "bessel_j_norm_integral",
    "SERIES_SWITCH",
]

# Alternating power series is used up to this argument, Bessel J beyond it.
SERIES_SWITCH = 12.0

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class HankelOrder:
    """Order alpha of the Hankel transform; alpha >= -1/2."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a < -0.5:
            raise ValueError(f"Hankel order must satisfy alpha >= -1/2, got alpha={self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def is_cosine(self) -> bool:
        """True for alpha = -1/2, where j_alpha reduces to cos."""
        return self.alpha == -0.5

    def __float__(self):
        return self.alpha


def as_order(order) -> HankelOrder:
    if isinstance(order, HankelOrder):
        return order
    return HankelOrder(float(order))


def gamma(x: float) -> float:
    """Gamma function for x > 0 (Lanczos, g=7, 9 coefficients)."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"gamma is evaluated only for finite x > 0 (pole or invalid at x={x!r})")
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    if x > 171.0:
        raise OverflowError("gamma overflows double precision for x > 171")
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so t^(z+1/2) does not overflow before exp(-t) pulls it back
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * acc


def digamma(x: float) -> float:
    """Logarithmic derivative of gamma for x > 0.

    Lifts the argument to x >= 10 with psi(x) = psi(x + 1) - 1/x, then sums
    the asymptotic (Bernoulli) series.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"digamma is evaluated only for finite x > 0 (pole or invalid at x={x!r})")
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120
        - inv2 * (1.0 / 252
        - inv2 * (1.0 / 240
        - inv2 * (1.0 / 132
        - inv2 * (691.0 / 32760
        - inv2 * (1.0 / 12)))))))
    return shift + math.log(x) - 0.5 / x - tail


def _series(alpha: float, t: np.ndarray) -> np.ndarray:
    q = (0.5 * t) ** 2
    term = np.ones_like(t)
    total = np.ones_like(t)
    for n in range(200):
        term = -term * q / ((n + 1.0) * (n + alpha + 1.0))
        total += term
        if not np.any(np.abs(term) > 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def bessel_j_norm(order, t):
    """Normalized Bessel function j_alpha(t) for real t >= 0.

    Parameters
    ----------
    order : HankelOrder or float
    t : float or array_like
        Non-negative arguments.

    Returns
    -------
    float or ndarray, matching the shape of ``t``.
    """
    alpha = as_order(order).alpha
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("bessel_j_norm needs finite t >= 0")
    if alpha == -0.5:
        out = np.cos(arr)
    else:
        out = np.empty_like(arr)
        small = arr <= SERIES_SWITCH
        if np.any(small):
            out[small] = _series(alpha, arr[small])
        big = ~small
        if np.any(big):
            tb = arr[big]
            # log form keeps Gamma(alpha+1) (2/t)^alpha finite for large alpha
            scale = np.exp(math.lgamma(alpha + 1.0) + alpha * np.log(2.0 / tb))
            out[big] = scale * special.jv(alpha, tb)
    if out.ndim == 0:
        return float(out)
    return out


def bessel_j_norm_integral(order, t: float) -> float:
    """j_alpha(t) from the integral representation over [0, 1].

    Independent of the series path; used as a cross-check. Requires
    alpha > -1/2 (alpha = -1/2 falls back to cos).
    """
    from scipy import integrate

    alpha = as_order(order).alpha
    if alpha == -0.5:
        return math.cos(t)
    pref = 2.0 * math.exp(math.lgamma(alpha + 1.0) - math.lgamma(alpha + 0.5)) / math.sqrt(math.pi)
    # (1-x^2)^(alpha-1/2) = (1-x)^(alpha-1/2) (1+x)^(alpha-1/2): algebraic endpoint weight
    val, _ = integrate.quad(
        lambda x: (1.0 + x) ** (alpha - 0.5) * math.cos(t * x),
        0.0,
        1.0,
        weight="alg",
        wvar=(0.0, alpha - 0.5),
        epsabs=1e-14,
        epsrel=1e-13,
        limit=400,
    )
    return pref * val
