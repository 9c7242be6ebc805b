"""Iterated integrals of the signature path, in closed form and by quadrature."""

import itertools

import numpy as np

from sigalg import SignaturePath
from sigalg.paths import random_path
from sigalg.sigsig import H, check_J_group_like, h_chen_residual, iterated_integral_oracle

rng = np.random.default_rng(3)
x = random_path(rng, 2, segments=3)
s, u, t = 0.2, 0.5, 0.9
sp = SignaturePath(x, 4)
X, Y = sp.at(s), sp.subsignature(s, t)

print(f"{'profile':>8} {'q=64':>9} {'q=128':>9} {'extrap.':>9} {'chen':>9}")
for profile in [p for n in (1, 2) for p in itertools.product(range(1, 4), repeat=n) if sum(p) <= 4]:
    h = H(profile, X, Y)
    q64 = iterated_integral_oracle(x, profile, s, t, 64)
    q128 = iterated_integral_oracle(x, profile, s, t, 128)
    extrap = (4 * q128 - q64) / 3
    errs = [np.max(np.abs(h - v)) for v in (q64, q128, extrap)]
    chen = h_chen_residual(x, profile, s, u, t)
    print(f"{str(profile):>8} " + " ".join(f"{e:9.1e}" for e in errs) + f" {chen:9.1e}")

report = check_J_group_like(x, 2, 3, t)
print("J group-like:", report.ok, f"(shuffle residual {report.residual:.1e})")
