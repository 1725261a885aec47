"""A tour of the uncertainty inequalities for the windowed Hankel transform.

Run with ``python3 demos/03_uncertainty_tour.py``. Each line is one
inequality report: both sides, the ratio and whether it holds. A few of the
numbers are worth a second look and are discussed at the end.
"""
import math

from whankel.hankel import default_plan
from whankel.signals import gaussian, raised_cosine
from whankel.suite import DEFAULT_SUITE, CheckContext, run_suite
from whankel.uncertainty import local_a0, local_bound
from whankel.windowed import default_product

alpha = 1.0
plan = default_plan(alpha)
product = default_product(plan)
tg = plan.time_grid
ctx = CheckContext(plan, product, gaussian().sample(tg), raised_cosine(2.5).sample(tg), seed=3)

for rep in run_suite(ctx, DEFAULT_SUITE):
    print(rep.line())

# Heisenberg for the Gaussian pair is not tight
plan0 = default_plan(0.0)
g0 = gaussian().sample(plan0.time_grid)
ctx0 = CheckContext(plan0, default_product(plan0), g0, g0)
rep = run_suite(ctx0, [{"name": "heisenberg", "c": 1, "d": 1}])[0]
print(f"\nGaussian pair, alpha=0, c=d=1: ratio {rep.ratio:.4f} (the transform of a Gaussian pair is not a Gaussian in (k, s))")

# the local bound: a_0 versus the true minimizer over a
x, nu = 0.5, 0.5
a0 = local_a0(alpha, x, nu)
a_star = (x * 2 ** (alpha + 1) * math.gamma(alpha + 1) / math.sqrt(nu)) ** (1 / (2 * alpha + 2))
print(f"local bound at a_0 = {a0:.4f}: {local_bound(alpha, x, nu, a0):.4f}; "
      f"at a* = {a_star:.4f}: {local_bound(alpha, x, nu, a_star):.4f}")
