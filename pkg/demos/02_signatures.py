"""Signatures of piecewise-linear paths and the identities they satisfy."""

import numpy as np

from sigalg import (
    PiecewiseLinearPath,
    coeff,
    concat,
    inverse,
    mul,
    pushforward_path,
    reparametrize,
    reverse,
    signature,
    tensor_pushforward,
)
from sigalg.paths import random_path, random_time_change

rng = np.random.default_rng(0)

# the L-shaped path: first e1, then e2
L = PiecewiseLinearPath([0, 1, 2], [[0, 0], [1, 0], [1, 1]])
g = signature(L, 3)
print("<S(L), 12> =", coeff(g, "12"), " <S(L), 21> =", coeff(g, "21"))

x, y = random_path(rng, 3), random_path(rng, 3)
N = 4
sx = signature(x, N)

print("chen:          ", signature(concat(x, y), N).max_abs_diff(mul(sx, signature(y, N))))
print("reversal:      ", signature(reverse(x), N).max_abs_diff(inverse(sx)))

knots, values = random_time_change(rng, x)  # includes a plateau
print("reparametrised:", signature(reparametrize(x, knots, values), N).max_abs_diff(sx))

phi = rng.normal(size=(2, 3))
print("pushforward:   ", signature(pushforward_path(x, phi), N).max_abs_diff(tensor_pushforward(sx, phi)))
