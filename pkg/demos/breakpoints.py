"""Grid connectivity only changes at lattice distances.

With one master seed, every radius in a sweep sees the same activations, so
success counts are flat between breakpoints and step at them.

Run: python3 demos/breakpoints.py
"""

import numpy as np

from finitewsn import GridSpec, estimate_probability, grid_breakpoints

bp = grid_breakpoints(100).values
print("first breakpoints:", np.round(bp[:8], 4))
for r in np.arange(0.19, 0.33, 0.01):
    res = estimate_probability(GridSpec(100, 0.2, float(r)), "connected", 20_000, master_seed=4)
    print(f"r={r:.2f}  interval {int(np.searchsorted(bp, r + 1e-12)) - 1:2d}  connected {res.successes:6d}")
