"""Windowed Hankel transform of a Gaussian: a time-frequency picture.

Run with ``python3 demos/02_windowed_transform.py [outdir]``. The field
W_g(f)(k, s) lives on a 512 x 32 product grid. We check its energy against
||f|| ||g||, look at how the energy sits in balls around the origin, and
write the field to CSV and JSON.
"""
import sys
from pathlib import Path

import numpy as np

from whankel import __version__
from whankel.grid import ball_measure, ball_region
from whankel.hankel import default_plan
from whankel.signals import gaussian, raised_cosine
from whankel.windowed import default_product, plancherel_residual, wht_forward, write_field_csv, write_field_json

alpha = 0.0
plan = default_plan(alpha)
product = default_product(plan)
tg = plan.time_grid

f = raised_cosine(radius=2.0).sample(tg)
g = gaussian(0.8).sample(tg)
field = wht_forward(plan, product, f, g)

print(f"grid {product.shape[0]} x {product.shape[1]}")
print(f"||W|| = {field.l2_norm():.6f}  ||f|| ||g|| = {field.signal_norm * field.window_norm:.6f}  "
      f"relative residual {plancherel_residual(field):.1e}")
print(f"sup |W| = {field.sup():.6f} <= {field.signal_norm * field.window_norm:.6f}")

unit = field.normalized()
for r in (1.0, 2.0, 3.0, 4.0):
    ball = ball_region(product, r)
    print(f"ball r={r}: measure {ball_measure(alpha, r):9.4f} (mask {ball.measure:9.4f}), "
          f"energy of normalized field {unit.masked_energy(ball):.4f}")

# where the field peaks
i, j = np.unravel_index(np.argmax(np.abs(field.values)), field.values.shape)
print(f"peak at k={product.k_grid.nodes[i]:.3f}, s={product.s_grid.nodes[j]:.3f}")

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-out")
out.mkdir(parents=True, exist_ok=True)
write_field_csv(out / "field.csv", field)
write_field_json(out / "field.json", field, __version__)
print(f"wrote {out / 'field.csv'} and {out / 'field.json'}")
