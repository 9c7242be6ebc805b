"""Identity suites run by the command line and the fuzzer.

Every residual here is relative at the coefficient level:
``max |lhs - rhs| / (1 + max |rhs|)`` taken over all levels.
"""

from __future__ import annotations

import itertools

import numpy as np

from .paths import (
    PiecewiseLinearPath,
    pushforward_path,
    random_time_change,
    reparametrize,
    reverse,
    signature,
    tensor_pushforward,
)
from .paths import SignaturePath
from .sigsig import H, WSpace, check_J_group_like, check_caps, h_chen_residual, iterated_integral_oracle
from .tensor_algebra import TruncatedTensor, antipode, homogeneous_norm, inverse, mul, unit

ORACLE_TOL = 1e-6
H_CHEN_TOL = 1e-8
J_GROUP_TOL = 1e-7
CLOSED_FORM_TOL = 1e-12


def relative_residual(a: TruncatedTensor, b: TruncatedTensor) -> float:
    scale = max(float(np.max(np.abs(block))) for block in b.levels)
    return a.max_abs_diff(b) / (1.0 + scale)


def lemma_checks(x: PiecewiseLinearPath, level: int, tol: float, rng: np.random.Generator) -> dict:
    """Norm symmetry/antipode, pushforward, reversal and reparametrisation residuals for ``x``."""
    g = signature(x, level)
    ginv = inverse(g)
    norm_g, norm_inv = homogeneous_norm(g), homogeneous_norm(ginv)
    sym = abs(norm_g - norm_inv) / norm_g if norm_g > 0 else abs(norm_inv)
    anti = relative_residual(antipode(g), ginv)

    phi = rng.normal(size=(x.dim, x.dim)) / np.sqrt(x.dim)
    push = relative_residual(signature(pushforward_path(x, phi), level), tensor_pushforward(g, phi))

    rev = relative_residual(mul(g, signature(reverse(x), level)), unit(x.dim, level))

    knots, values = random_time_change(rng, x, plateaus=True)
    rep = relative_residual(signature(reparametrize(x, knots, values), level), g)

    checks = {
        "norm_symmetry": {"residual": max(sym, anti), "norm_ratio": sym, "antipode_vs_inverse": anti},
        "pushforward": {"residual": push, "phi": phi.tolist()},
        "reversal": {"residual": rev},
        "reparametrization": {"residual": rep, "collapsed_rows": x.collapsed, "sigma_knots": len(knots)},
    }
    for entry in checks.values():
        entry["pass"] = bool(entry["residual"] <= tol)
    return checks


def all_profiles(inner: int, depth: int):
    for n in range(1, depth + 1):
        yield from itertools.product(range(1, inner + 1), repeat=n)


def hmap_checks(
    x: PiecewiseLinearPath,
    inner: int,
    depth: int,
    q: int,
    oracle_tol: float = ORACLE_TOL,
) -> dict:
    """Oracle agreement, multiplicativity and group-likeness of the H map on ``x``."""
    check_caps(x.dim, depth, inner)
    span = x.end - x.start
    s, u, t = x.start + span / 3, x.start + span / 2, x.end
    sp = SignaturePath(x, depth * inner)
    X, Y = sp.at(s), sp.subsignature(s, t)
    XY = mul(X, Y)
    rows = []
    for profile in all_profiles(inner, depth):
        h = H(profile, X, Y)
        quad = iterated_integral_oracle(x, profile, s, t, q)
        row = {
            "profile": list(profile),
            "oracle_residual": float(np.max(np.abs(h - quad))),
            "chen_residual": h_chen_residual(x, profile, s, u, t),
        }
        row["pass"] = bool(row["oracle_residual"] <= oracle_tol and row["chen_residual"] <= H_CHEN_TOL)
        if len(profile) == 1:
            i = profile[0]
            row["closed_form_residual"] = float(np.max(np.abs(h - (XY.levels[i] - X.levels[i]))))
            row["pass"] = row["pass"] and row["closed_form_residual"] <= CLOSED_FORM_TOL
        rows.append(row)
    group = check_J_group_like(x, depth, inner, t, tol=J_GROUP_TOL)
    W = WSpace(x.dim, inner)
    return {
        "times": {"s": s, "u": u, "t": t},
        "wspace_dim": W.size,
        "profiles": rows,
        "group_like": {
            "residual": group.residual,
            "pass": group.ok,
            "witness": None if group.witness is None else [[[i, list(a)] for i, a in w] for w in group.witness],
        },
        "thresholds": {
            "oracle": oracle_tol,
            "chen": H_CHEN_TOL,
            "group_like": J_GROUP_TOL,
            "closed_form": CLOSED_FORM_TOL,
        },
    }
