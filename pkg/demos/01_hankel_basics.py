"""The discrete Hankel transform on a composite Gauss-Legendre grid.

Run with ``python3 demos/01_hankel_basics.py``. Everything printed here is a
number you can check by hand: the Gaussian is a fixed point, Laguerre
functions are eigenfunctions with eigenvalue (-1)^n, and the transform is an
isometry on L^2(d gamma_alpha).
"""
import numpy as np

from whankel.grid import lp_norm
from whankel.hankel import default_plan, hankel_forward, hankel_heisenberg, hankel_inverse, parseval_residual
from whankel.signals import gaussian, laguerre, laguerre_mix

for alpha in (-0.5, 0.0, 1.0, 2.0):
    plan = default_plan(alpha)
    tg = plan.time_grid
    lam = plan.freq_grid.nodes

    g = gaussian().sample(tg)
    fixed = np.abs(hankel_forward(plan, g).values - np.exp(-lam ** 2 / 2)).max()

    # wider Gaussians become narrower spectra: H(e^{-t^2/2w^2}) = w^{2a+2} e^{-w^2 lam^2/2}
    w = 1.5
    wide = hankel_forward(plan, gaussian(w).sample(tg)).values
    dil = np.abs(wide - w ** (2 * alpha + 2) * np.exp(-(w * lam) ** 2 / 2)).max()

    eig = max(np.abs(hankel_forward(plan, laguerre(n).sample(tg)).values - (-1) ** n * laguerre(n).sample(tg).values).max()
              for n in range(4))

    f = laguerre_mix([0.3, -1.0, 0.5, 0.2], scale=0.9).sample(tg)
    back = np.abs(hankel_inverse(plan, hankel_forward(plan, f)).values - f.values).max()

    print(f"alpha={alpha:+.1f}  fixed point {fixed:.1e}  dilation {dil:.1e}  eigen {eig:.1e}  "
          f"round trip {back:.1e}  Parseval {parseval_residual(plan, f, g):.1e}")

# The Gaussian is the extremal function of the Heisenberg inequality for c = d = 1.
plan = default_plan(0.0)
g = gaussian().sample(plan.time_grid)
print()
for c, d in ((1, 1), (2, 1), (1.5, 2)):
    rep = hankel_heisenberg(plan, g, c, d)
    print(f"Heisenberg c={c} d={d}: lhs {rep.lhs:.6f} rhs {rep.rhs:.6f} ratio {rep.ratio:.6f}")
print(f"(at alpha=0 both sides equal 1/sqrt(2) = {1 / np.sqrt(2):.6f} for the unnormalized Gaussian, "
      f"||g|| = {lp_norm(plan.time_grid, g):.6f})")
