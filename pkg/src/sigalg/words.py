"""Word combinatorics on the dual of the tensor algebra.

Words are tuples of 1-based letters; ``"121"`` and ``"1,2,1"`` parse to
``(1, 2, 1)``.  Permutations are one-line image tuples, 0-based: ``perm[p]`` is
the image of position ``p``.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from math import comb

import numpy as np

from .errors import ShapeError
from .tensor_algebra import TruncatedTensor

Word = tuple[int, ...]
Permutation = tuple[int, ...]


def parse_word(w: str | Sequence[int]) -> Word:
    if isinstance(w, str):
        w = w.strip()
        if not w:
            return ()
        parts = w.split(",") if "," in w else list(w)
        try:
            return tuple(int(c) for c in parts)
        except ValueError:
            raise ShapeError(f"cannot parse word {w!r}") from None
    return tuple(int(c) for c in w)


def format_word(w: Sequence[int]) -> str:
    if any(c > 9 for c in w):
        return ",".join(str(c) for c in w)
    return "".join(str(c) for c in w)


def word_offset(w: Sequence[int], dim: int) -> int:
    """Row-major offset of the basis tensor e_{w_1} (x) ... (x) e_{w_k} in its block."""
    offset = 0
    for c in w:
        if not 1 <= c <= dim:
            raise ShapeError(f"letter {c} outside 1..{dim}")
        offset = offset * dim + (c - 1)
    return offset


def offset_word(offset: int, length: int, dim: int) -> Word:
    letters = []
    for _ in range(length):
        offset, r = divmod(offset, dim)
        letters.append(r + 1)
    return tuple(reversed(letters))


def coeff(g: TruncatedTensor, w: str | Sequence[int]) -> float:
    w = parse_word(w)
    if len(w) > g.level:
        raise ShapeError(f"word of length {len(w)} exceeds level {g.level}")
    return float(g.levels[len(w)][word_offset(w, g.dim)])


def shuffle(u: str | Sequence[int], v: str | Sequence[int], level: int | None = None) -> list[Word]:
    """All interleavings of ``u`` and ``v``, with multiplicity, in a fixed order."""
    u, v = parse_word(u), parse_word(v)
    m = len(u) + len(v)
    if level is not None and m > level:
        raise ShapeError(f"|u| + |v| = {m} exceeds level {level}")
    out = []
    for positions in itertools.combinations(range(m), len(u)):
        pos = set(positions)
        iu, iv = iter(u), iter(v)
        out.append(tuple(next(iu) if k in pos else next(iv) for k in range(m)))
    return out


def _shuffle_pairing(block: np.ndarray, dim: int, p: int, q: int):
    """Return (signed sum, absolute sum) of <g, u sh v> as (d^p, d^q) arrays."""
    m = p + q
    cube = block.reshape((dim,) * m)
    total = np.zeros((dim**p, dim**q))
    absolute = np.zeros((dim**p, dim**q))
    for positions in itertools.combinations(range(m), p):
        rest = tuple(k for k in range(m) if k not in positions)
        part = np.transpose(cube, positions + rest).reshape(dim**p, dim**q)
        total += part
        absolute += np.abs(part)
    return total, absolute


def group_like_residual(g: TruncatedTensor) -> tuple[float, tuple[Word, Word] | None]:
    """Worst scaled violation of <g,u><g,v> = <g, u sh v> over non-empty u, v.

    Each residual is divided by ``1 + |<g,u><g,v>| + sum |<g,w>|`` over the
    shuffle terms.  The empty-word identities reduce to ``scalar == 1`` and are
    included.  Returns the residual and the witnessing pair of words.
    """
    worst, witness = abs(g.scalar - 1.0), None
    if worst > 0:
        witness = ((), ())
    for p in range(1, g.level):
        for q in range(p, g.level - p + 1):
            product = np.multiply.outer(g.levels[p], g.levels[q])
            total, absolute = _shuffle_pairing(g.levels[p + q], g.dim, p, q)
            ratio = np.abs(product - total) / (1.0 + np.abs(product) + absolute)
            idx = np.unravel_index(np.argmax(ratio), ratio.shape)
            if ratio[idx] > worst:
                worst = float(ratio[idx])
                witness = (offset_word(idx[0], p, g.dim), offset_word(idx[1], q, g.dim))
    return worst, witness


def is_group_like(g: TruncatedTensor, tol: float = 1e-9) -> bool:
    return group_like_residual(g)[0] <= tol


def lie_residual(l: TruncatedTensor) -> tuple[float, tuple[Word, Word] | None]:
    """Worst scaled value of <l, u sh v> over non-empty u, v (zero for Lie elements)."""
    worst, witness = abs(l.scalar), None
    if worst > 0:
        witness = ((), ())
    for p in range(1, l.level):
        for q in range(p, l.level - p + 1):
            total, absolute = _shuffle_pairing(l.levels[p + q], l.dim, p, q)
            ratio = np.abs(total) / (1.0 + absolute)
            idx = np.unravel_index(np.argmax(ratio), ratio.shape)
            if ratio[idx] > worst:
                worst = float(ratio[idx])
                witness = (offset_word(idx[0], p, l.dim), offset_word(idx[1], q, l.dim))
    return worst, witness


def is_lie_element(l: TruncatedTensor, tol: float = 1e-9) -> bool:
    return lie_residual(l)[0] <= tol


# ---------------------------------------------------------------------------
# permutations


def check_permutation(perm: Sequence[int]) -> Permutation:
    perm = tuple(int(i) for i in perm)
    if sorted(perm) != list(range(len(perm))):
        raise ShapeError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return perm


def compose(sigma: Sequence[int], tau: Sequence[int]) -> Permutation:
    """compose(sigma, tau)[i] = sigma[tau[i]].

    With this convention ``permute_block(permute_block(b, sigma), tau)`` equals
    ``permute_block(b, compose(sigma, tau))``.
    """
    return tuple(sigma[t] for t in tau)


def invert(perm: Sequence[int]) -> Permutation:
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return tuple(out)


def permute_block(block: np.ndarray, perm: Sequence[int], dim: int) -> np.ndarray:
    """Linear extension of v_1 (x) ... (x) v_k -> v_{perm(1)} (x) ... (x) v_{perm(k)}."""
    perm = check_permutation(perm)
    k = len(perm)
    block = np.asarray(block, dtype=float)
    if block.size != dim**k:
        raise ShapeError(f"block of size {block.size} cannot be a level-{k} block over R^{dim}")
    return np.transpose(block.reshape((dim,) * k), perm).reshape(-1)


def ordered_shuffles(profile: Sequence[int]) -> list[Permutation]:
    """The ordered shuffles OS(j_1, ..., j_n) as rank maps, sorted lexicographically.

    Positions ``0..m-1`` are grouped into consecutive blocks of sizes ``j_k``.
    A permutation ``r`` is an ordered shuffle when ``r`` is increasing inside
    each block and the last positions of the blocks receive increasing ranks.
    Applied through :func:`permute_block` to the level-m signature block of
    ``S_{s,t}`` it yields the iterated integral in which the k-th block runs
    over times below its own endpoint and the block endpoints are ordered.
    """
    profile = tuple(int(j) for j in profile)
    if not profile or any(j < 1 for j in profile):
        raise ShapeError(f"profile parts must be positive, got {profile}")
    m = sum(profile)
    starts = np.cumsum((0,) + profile[:-1])
    lasts = [s + j - 1 for s, j in zip(starts, profile)]
    out = []
    # labels[r] is the block that owns rank r; a shuffle of the block words
    for labels in _multiset_sequences(profile):
        ranks = [0] * m
        cursor = list(starts)
        for r, b in enumerate(labels):
            ranks[cursor[b]] = r
            cursor[b] += 1
        if all(ranks[lasts[k]] < ranks[lasts[k + 1]] for k in range(len(profile) - 1)):
            out.append(tuple(ranks))
    return sorted(out)


def _multiset_sequences(counts):
    counts = list(counts)
    m = sum(counts)
    seq = []

    def rec():
        if len(seq) == m:
            yield tuple(seq)
            return
        for b, c in enumerate(counts):
            if c:
                counts[b] -= 1
                seq.append(b)
                yield from rec()
                seq.pop()
                counts[b] += 1

    yield from rec()


def shuffle_count(p: int, q: int) -> int:
    return comb(p + q, p)
