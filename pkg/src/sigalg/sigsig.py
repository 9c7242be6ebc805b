"""Signature of the signature path.

For a path ``x`` in R^d and an inner level ``N`` the running signature
``u -> S_N(x)_{0,u}`` is a path in ``W = V + V^(x)2 + ... + V^(x)N``.  Its own
iterated integrals are polynomial in the signature of ``x``:

    int_{s<s_1<...<s_n<t} dS^{i_1}_{0,s_1} (x) ... (x) dS^{i_n}_{0,s_n}
        = H_{i_1..i_n}(S_{0,s}, S_{s,t})

where ``H`` interleaves blocks of ``X = S_{0,s}`` with ordered-shuffle
rearrangements of blocks of ``Y = S_{s,t}``.  This module evaluates ``H``,
packs the family over all profiles into a tensor over W, and provides an
independent quadrature of the left-hand side.

Letters of W are pairs ``(i, alpha)`` with ``1 <= i <= N`` and ``alpha`` a
row-major multi-index of V^(x)i, ordered by ``i`` and then ``alpha``; a
tensor over W is an ordinary :class:`TruncatedTensor` over R^D with
``D = d + d^2 + ... + d^N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, ShapeError
from .paths import PiecewiseLinearPath, SignaturePath
from .tensor_algebra import TruncatedTensor, _mul_levels, check_capacity
from .words import Word, group_like_residual, ordered_shuffles

#: Desk-scale caps on the outer level n, the inner level N and the dimension d.
MAX_OUTER_LEVEL = 3
MAX_INNER_LEVEL = 3
MAX_DIM = 3


def check_caps(dim: int, n: int, inner: int) -> None:
    if n > MAX_OUTER_LEVEL or inner > MAX_INNER_LEVEL or dim > MAX_DIM:
        raise CapacityError(
            f"(d={dim}, N={inner}, n={n}) exceeds the caps "
            f"d <= {MAX_DIM}, N <= {MAX_INNER_LEVEL}, n <= {MAX_OUTER_LEVEL}"
        )
    if n < 0 or inner < 1:
        raise ShapeError(f"need n >= 0 and N >= 1, got n={n}, N={inner}")
    check_capacity(dim, n * inner)


@lru_cache(maxsize=None)
def _ordered_shuffles(profile: tuple[int, ...]):
    return tuple(ordered_shuffles(profile))


def F_apply(profile, xblocks, yblock, dim: int) -> np.ndarray:
    """Linear map w_1 (x) ... (x) w_n -> x_1 (x) w_1 (x) x_2 (x) w_2 (x) ... (x) x_n (x) w_n.

    ``profile`` gives the sizes ``j_k`` of the ``w_k`` slots, ``xblocks[k]`` is
    a flat level block of any degree, and ``yblock`` a flat block of degree
    ``sum(profile)``.
    """
    profile = tuple(int(j) for j in profile)
    xblocks = [np.asarray(b, dtype=float).reshape(-1) for b in xblocks]
    yblock = np.asarray(yblock, dtype=float)
    n = len(profile)
    if len(xblocks) != n:
        raise ShapeError(f"need {n} x-blocks, got {len(xblocks)}")
    if yblock.size != dim ** sum(profile):
        raise ShapeError(f"y-block has {yblock.size} entries, expected {dim}**{sum(profile)}")
    ycube = yblock.reshape(tuple(dim**j for j in profile))
    letters = "abcdefghijklmnopqrstuvwxyz"
    xs = [letters[2 * k] for k in range(n)]
    ws = [letters[2 * k + 1] for k in range(n)]
    spec = ",".join(xs) + "," + "".join(ws) + "->" + "".join(a + b for a, b in zip(xs, ws))
    return np.einsum(spec, *xblocks, ycube).reshape(-1)


def _shuffled_block(Y: TruncatedTensor, j: tuple[int, ...]) -> np.ndarray:
    m = sum(j)
    cube = Y.levels[m].reshape((Y.dim,) * m)
    total = np.zeros(Y.dim**m)
    for r in _ordered_shuffles(j):
        total += np.transpose(cube, r).reshape(-1)
    return total


def H(profile, X: TruncatedTensor, Y: TruncatedTensor) -> np.ndarray:
    """H_{i_1..i_n}(X, Y) as a flat block of degree i_1 + ... + i_n.

    The empty profile gives the scalar 1.
    """
    profile = tuple(int(i) for i in profile)
    if X.dim != Y.dim:
        raise ShapeError("X and Y must live over the same space")
    if any(i < 1 for i in profile):
        raise ShapeError(f"profile entries must be >= 1, got {profile}")
    total = sum(profile)
    if total > min(X.level, Y.level):
        raise ShapeError(f"profile {profile} needs level {total}, tensors are truncated at {min(X.level, Y.level)}")
    d = X.dim
    out = np.zeros(d**total)
    if not profile:
        return np.ones(1)
    for j in itertools.product(*(range(1, i + 1) for i in profile)):
        ysum = _shuffled_block(Y, j)
        if not np.any(ysum):
            continue
        xblocks = [X.levels[i - jj] for i, jj in zip(profile, j)]
        out += F_apply(j, xblocks, ysum, d)
    return out


# ---------------------------------------------------------------------------
# quadrature oracle


def _quadrature_grid(x: PiecewiseLinearPath, s: float, t: float, q: int) -> np.ndarray:
    inner = x.times[(x.times > s) & (x.times < t)]
    knots = np.concatenate([[s], inner, [t]])
    frac = np.arange(q) / q
    pts = (knots[:-1, None] + np.diff(knots)[:, None] * frac[None, :]).reshape(-1)
    return np.append(pts, t)


def iterated_integral_oracle(x: PiecewiseLinearPath, profile, s: float, t: float, q: int = 64) -> np.ndarray:
    """Numerical iterated integral of the signature path, independent of :func:`H`.

    Evaluates ``int_{s<s_1<...<s_n<t} dZ^{i_1}_{s_1} (x) ... (x) dZ^{i_n}_{s_n}``
    with ``Z_u = S(x)_{0,u}`` by nested composite trapezoid (Stieltjes form)
    on a grid that splits every breakpoint interval of ``[s, t]`` into ``q``
    panels.  The error is O(q^-2); for one-element profiles the rule
    telescopes and is exact.
    """
    profile = tuple(int(i) for i in profile)
    if len(profile) > MAX_OUTER_LEVEL:
        raise CapacityError(f"simplex dimension {len(profile)} exceeds {MAX_OUTER_LEVEL}")
    if any(i < 1 for i in profile):
        raise ShapeError(f"profile entries must be >= 1, got {profile}")
    if not profile:
        return np.ones(1)
    if t <= s:
        return np.zeros(x.dim ** sum(profile))
    grid = _quadrature_grid(x, s, t, q)
    z = SignaturePath(x, max(profile)).levels_at(grid)
    acc = np.ones((len(grid), 1))
    for i in profile:
        dz = np.diff(z[i], axis=0)
        mid = 0.5 * (acc[:-1] + acc[1:])
        incr = (mid[:, :, None] * dz[:, None, :]).reshape(len(grid) - 1, -1)
        acc = np.concatenate([np.zeros((1, incr.shape[1])), np.cumsum(incr, axis=0)])
    return acc[-1]


# ---------------------------------------------------------------------------
# packing over W


@dataclass(frozen=True)
class WSpace:
    """The direct sum W = V + ... + V^(x)N over V = R^d, with its letter ordering."""

    dim: int
    inner: int

    @property
    def size(self) -> int:
        return sum(self.dim**i for i in range(1, self.inner + 1))

    def offset(self, i: int) -> int:
        """Index of the first W-letter belonging to V^(x)i."""
        return sum(self.dim**k for k in range(1, i))

    def letters(self) -> list[tuple[int, Word]]:
        from .words import offset_word

        return [(i, offset_word(a, i, self.dim)) for i in range(1, self.inner + 1) for a in range(self.dim**i)]

    def profiles(self, n: int):
        return list(itertools.product(range(1, self.inner + 1), repeat=n))

    def pack(self, n: int, family: dict) -> np.ndarray:
        """Dense level-n block over W from ``{profile: flat V-block}``; missing profiles are zero."""
        D = self.size
        cube = np.zeros((D,) * n)
        for profile, block in family.items():
            if len(profile) != n:
                raise ShapeError(f"profile {profile} does not have length {n}")
            sl = tuple(slice(self.offset(i), self.offset(i) + self.dim**i) for i in profile)
            cube[sl] = np.asarray(block).reshape(tuple(self.dim**i for i in profile))
        return cube.reshape(-1)

    def unpack(self, n: int, block: np.ndarray) -> dict:
        cube = np.asarray(block).reshape((self.size,) * n)
        out = {}
        for profile in self.profiles(n):
            sl = tuple(slice(self.offset(i), self.offset(i) + self.dim**i) for i in profile)
            out[profile] = cube[sl].reshape(-1).copy()
        return out

    def norm(self, n: int, block: np.ndarray) -> float:
        """sum over profiles of the Euclidean norm of each profile block."""
        return float(sum(np.linalg.norm(b) for b in self.unpack(n, block).values()))


def _signature_slices(x: PiecewiseLinearPath, level: int, s: float, t: float):
    sp = SignaturePath(x, level)
    return sp.at(s), sp.subsignature(s, t)


def assemble_J_level(x: PiecewiseLinearPath, n: int, inner: int, s: float, t: float) -> np.ndarray:
    """Level-n block over W of the signature of ``u -> S_N(x)_{0,u}`` on ``[s, t]``."""
    check_caps(x.dim, n, inner)
    if n == 0:
        return np.ones(1)
    X, Y = _signature_slices(x, n * inner, s, t)
    W = WSpace(x.dim, inner)
    return W.pack(n, {prof: H(prof, X, Y) for prof in W.profiles(n)})


def J_signature(x: PiecewiseLinearPath, n: int, inner: int, s: float, t: float) -> TruncatedTensor:
    """Levels 0..n of the signature over W, built from H at every profile."""
    check_caps(x.dim, n, inner)
    W = WSpace(x.dim, inner)
    X, Y = _signature_slices(x, max(n * inner, 1), s, t)
    blocks = [np.ones(1)]
    for k in range(1, n + 1):
        blocks.append(W.pack(k, {prof: H(prof, X, Y) for prof in W.profiles(k)}))
    return TruncatedTensor(blocks, W.size)


def h_chen_residual(x: PiecewiseLinearPath, profile, s: float, u: float, t: float) -> float:
    """Max abs deviation of the multiplicative identity for H at ``s <= u <= t``.

    sum_j H_{i_1..i_j}(S_{0,s}, S_{s,u}) (x) H_{i_{j+1}..i_n}(S_{0,u}, S_{u,t})
        = H_{i_1..i_n}(S_{0,s}, S_{s,t})
    """
    profile = tuple(int(i) for i in profile)
    level = max(sum(profile), 1)
    sp = SignaturePath(x, level)
    X0s, X0u = sp.at(s), sp.at(u)
    Ysu, Yut, Yst = sp.subsignature(s, u), sp.subsignature(u, t), sp.subsignature(s, t)
    lhs = np.zeros(x.dim ** sum(profile))
    for j in range(len(profile) + 1):
        left = H(profile[:j], X0s, Ysu)
        right = H(profile[j:], X0u, Yut)
        lhs += np.multiply.outer(left, right).reshape(-1)
    rhs = H(profile, X0s, Yst)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class GroupLikeReport:
    ok: bool
    residual: float
    witness: tuple | None


def check_J_group_like(x: PiecewiseLinearPath, n: int, inner: int, t: float, tol: float = 1e-7) -> GroupLikeReport:
    """Shuffle test, in the W alphabet, of sum_profiles H(1, S_{0,t}) up to level n."""
    z = J_signature(x, n, inner, x.start, t)
    residual, witness = group_like_residual(z)
    if witness is not None:
        W = WSpace(x.dim, inner)
        letters = W.letters()
        witness = tuple(tuple(letters[c - 1] for c in w) for w in witness)
    return GroupLikeReport(residual <= tol, residual, witness)


def wspace_json(W: WSpace, n: int, tensor: TruncatedTensor) -> dict:
    """JSON tensor wrapped with the W layout it was packed in."""
    return {
        "wspace": {
            "d": W.dim,
            "N": W.inner,
            "n": n,
            "letters": [[i, list(alpha)] for i, alpha in W.letters()],
            "profiles": [list(p) for p in W.profiles(n)],
        },
        "tensor": tensor.to_json(),
    }
