"""p-variation of signature paths and the interpolation bound on chordal refinements."""

import numpy as np

from sigalg import PiecewiseLinearPath, SignaturePath, p_variation
from sigalg.paths import interpolation_bound


def circle(m):
    u = np.linspace(0, 1, m + 1)
    return PiecewiseLinearPath(u, np.c_[np.cos(2 * np.pi * u), np.sin(2 * np.pi * u)])


# the discrete p-variation only grows as the candidate grid is refined
sp = SignaturePath(circle(16), 2)
for r in (1, 2, 4, 8):
    print(f"refine={r}: 2.2-variation = {p_variation(sp, 2.2, refine=r):.6f}")

# d_{2.5-var} between consecutive refinements, and the bound it must satisfy
print(f"{'m':>5} {'distance':>10} {'bound':>10}")
for m in (8, 16, 32, 64, 128, 256):
    a, b = circle(m), circle(2 * m)
    res = interpolation_bound(SignaturePath(a, 2), SignaturePath(b, 2), 2.0, 2.5, grid=b.times)
    print(f"{m:5d} {res.distance:10.2e} {res.bound:10.2e}")
