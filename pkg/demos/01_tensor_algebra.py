"""Products, inverses, exp/log and norms in the truncated tensor algebra."""

import numpy as np

from sigalg import TruncatedTensor, antipode, exp, homogeneous_norm, inverse, log, mul, unit

np.set_printoptions(precision=4, suppress=True)

# d=1, N=2: (1,2,3) (x) (1,5,7) has level 2 equal to 3 + 7 + 2*5
a = TruncatedTensor([[1.0], [2.0], [3.0]])
b = TruncatedTensor([[1.0], [5.0], [7.0]])
print("product:", mul(a, b).flat())

# a Lie element in R^2: a vector plus half a bracket
l = TruncatedTensor([[0.0], [1.0, -0.5], [0.0, 0.25, -0.25, 0.0], np.zeros(8)])
g = exp(l)
print("exp(l) level 2:\n", g.levels[2].reshape(2, 2))
print("log(exp(l)) - l:", log(g).max_abs_diff(l))

# on group-like elements the antipode is the inverse
print("antipode - inverse:", antipode(g).max_abs_diff(inverse(g)))
print("g (x) g^-1 - 1:", mul(g, inverse(g)).max_abs_diff(unit(2, 3)))
print("||g||, ||g^-1||:", homogeneous_norm(g), homogeneous_norm(inverse(g)))
