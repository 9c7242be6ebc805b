"""Piecewise-linear paths, their signatures, and p-variation metrics.

The signature of a piecewise-linear path is the ordered tensor product of the
exponentials of its increments.  :class:`SignaturePath` caches the running
signatures ``S_{0,t}`` at the breakpoints so that increments ``S_{s,t}`` and
the dynamic programmes for p-variation can be evaluated in batches.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, ShapeError
from .tensor_algebra import (
    GroupElement,
    TruncatedTensor,
    _inverse_levels,
    _homogeneous_norm_levels,
    _mul_levels,
    check_capacity,
)


class PiecewiseLinearPath:
    """Path through ``points[i]`` at ``times[i]``, linear in between.

    Rows sharing a timestamp are collapsed on construction, keeping the last
    point of each run; after that the times must be strictly increasing.
    """

    __slots__ = ("times", "points", "collapsed")

    def __init__(self, times, points):
        times = np.asarray(times, dtype=float).reshape(-1)
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or len(points) != len(times):
            raise ShapeError(f"need one point per time: {len(times)} times, points shape {points.shape}")
        if len(times) == 0:
            raise ShapeError("a path needs at least one point")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(points))):
            raise ShapeError("times and points must be finite")
        if np.any(np.diff(times) < 0):
            raise ShapeError("times must be non-decreasing")
        keep = np.append(np.diff(times) > 0, True)
        self.collapsed = int(len(times) - keep.sum())
        self.times = times[keep]
        self.points = points[keep]
        self.times.flags.writeable = False
        self.points.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def __len__(self):
        return len(self.times)

    def __call__(self, t):
        """Evaluate the path at time(s) ``t`` (clamped to the time range)."""
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.times, self.points[:, i]) for i in range(self.dim)], axis=-1)

    def restrict(self, s: float, t: float) -> PiecewiseLinearPath:
        if not self.start <= s <= t <= self.end:
            raise DomainError(f"[{s}, {t}] is not inside [{self.start}, {self.end}]")
        inner = self.times[(self.times > s) & (self.times < t)]
        times = np.concatenate([[s], inner, [t]]) if t > s else np.array([s])
        return PiecewiseLinearPath(times, self(times))

    def drop_stationary(self) -> PiecewiseLinearPath:
        """Remove zero-length segments.  Changes the parametrisation, not the signature."""
        moving = np.any(self.increments != 0, axis=1)
        keep = np.concatenate([[True], moving])
        return PiecewiseLinearPath(self.times[keep], self.points[keep])

    def allclose(self, other: PiecewiseLinearPath, atol: float = 1e-12) -> bool:
        return (
            self.times.shape == other.times.shape
            and self.points.shape == other.points.shape
            and np.allclose(self.times, other.times, rtol=0, atol=atol)
            and np.allclose(self.points, other.points, rtol=0, atol=atol)
        )

    def __repr__(self):
        return f"PiecewiseLinearPath(dim={self.dim}, segments={len(self) - 1}, t=[{self.start:g}, {self.end:g}])"


# ---------------------------------------------------------------------------
# path transformations


def concat(x: PiecewiseLinearPath, y: PiecewiseLinearPath) -> PiecewiseLinearPath:
    """``x`` followed by ``y``; ``y`` is translated in space and time to start where ``x`` ends."""
    if x.dim != y.dim:
        raise ShapeError(f"cannot concatenate paths in R^{x.dim} and R^{y.dim}")
    times = np.concatenate([x.times, y.times[1:] - y.start + x.end])
    points = np.concatenate([x.points, y.points[1:] - y.points[0] + x.points[-1]])
    return PiecewiseLinearPath(times, points)


def reverse(x: PiecewiseLinearPath) -> PiecewiseLinearPath:
    """Time reversal t -> start + end - t."""
    return PiecewiseLinearPath((x.start + x.end - x.times)[::-1], x.points[::-1])


def reparametrize(x: PiecewiseLinearPath, sigma_times, sigma_values) -> PiecewiseLinearPath:
    """The path ``s -> x(sigma(s))`` for the piecewise-linear time change ``sigma``.

    ``sigma`` interpolates ``sigma_values`` at ``sigma_times``; it must be
    non-decreasing (plateaus allowed) with values inside ``[x.start, x.end]``.
    """
    st = np.asarray(sigma_times, dtype=float).reshape(-1)
    sv = np.asarray(sigma_values, dtype=float).reshape(-1)
    if st.shape != sv.shape or len(st) == 0:
        raise ShapeError("sigma needs matching, non-empty knot and value arrays")
    if np.any(np.diff(st) <= 0):
        raise ShapeError("sigma knots must be strictly increasing")
    if np.any(np.diff(sv) < 0):
        raise DomainError("sigma must be non-decreasing")
    span = max(1.0, abs(x.start), abs(x.end))
    if sv[0] < x.start - 1e-12 * span or sv[-1] > x.end + 1e-12 * span:
        raise DomainError(f"sigma takes values outside [{x.start}, {x.end}]")
    sv = np.clip(sv, x.start, x.end)
    knots = [st]
    for a in range(len(st) - 1):
        lo, hi = sv[a], sv[a + 1]
        if hi > lo:
            inner = x.times[(x.times > lo) & (x.times < hi)]
            knots.append(st[a] + (inner - lo) * (st[a + 1] - st[a]) / (hi - lo))
    knots = np.unique(np.concatenate(knots))
    return PiecewiseLinearPath(knots, x(np.interp(knots, st, sv)))


def pushforward_path(x: PiecewiseLinearPath, phi) -> PiecewiseLinearPath:
    """Map every point through the linear map ``phi`` of shape ``(d', d)``."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    if phi.shape[1] != x.dim:
        raise ShapeError(f"matrix of shape {phi.shape} cannot act on R^{x.dim}")
    return PiecewiseLinearPath(x.times, x.points @ phi.T)


def tensor_pushforward(g: TruncatedTensor, phi) -> TruncatedTensor:
    """Extend ``phi: R^d -> R^d'`` to the tensor algebra, acting on every tensor factor."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    if phi.shape[1] != g.dim:
        raise ShapeError(f"matrix of shape {phi.shape} cannot act on R^{g.dim}")
    dout = phi.shape[0]
    check_capacity(dout, g.level)
    blocks = []
    for k in range(g.level + 1):
        cube = g.levels[k].reshape((g.dim,) * k)
        for axis in range(k):
            cube = np.moveaxis(np.tensordot(phi, cube, axes=([1], [axis])), 0, axis)
        blocks.append(np.asarray(cube).reshape(-1))
    if isinstance(g, GroupElement):
        return GroupElement(blocks, dout, certified=g.certified)
    return TruncatedTensor(blocks, dout)


# ---------------------------------------------------------------------------
# signatures


def _segment_exp_levels(v, level):
    """exp of level-1 vectors ``v`` (shape (..., d)): blocks v^{(x)k} / k!."""
    batch, d = v.shape[:-1], v.shape[-1]
    blocks = [np.ones(batch + (1,))]
    for k in range(1, level + 1):
        nxt = blocks[-1][..., :, None] * v[..., None, :] / k
        blocks.append(nxt.reshape(batch + (d**k,)))
    return blocks


def signature(x: PiecewiseLinearPath, level: int) -> GroupElement:
    """Signature truncated at ``level``: the Chen product of the segment exponentials."""
    if level < 1:
        raise ShapeError(f"signature level must be >= 1, got {level}")
    check_capacity(x.dim, level)
    acc = [np.ones(1)] + [np.zeros(x.dim**k) for k in range(1, level + 1)]
    for inc in x.increments:
        if np.any(inc):
            acc = _mul_levels(acc, _segment_exp_levels(inc, level), x.dim, level)
    # products of exponentials of vectors are group-like by construction
    return GroupElement(acc, x.dim, certified=True)


def _take(levels, idx):
    return [b[idx] for b in levels]


class SignaturePath:
    """Running signature ``t -> S_N(x)_{0,t}`` of a piecewise-linear path."""

    def __init__(self, path: PiecewiseLinearPath, level: int):
        if level < 1:
            raise ShapeError(f"signature level must be >= 1, got {level}")
        check_capacity(path.dim, level)
        self.path = path
        self.level = level
        d = path.dim
        prefix = [[np.ones(1)] + [np.zeros(d**k) for k in range(1, level + 1)]]
        for inc in path.increments:
            prefix.append(_mul_levels(prefix[-1], _segment_exp_levels(inc, level), d, level))
        self._prefix = [np.stack([p[k] for p in prefix]) for k in range(level + 1)]
        slopes = path.increments / np.diff(path.times)[:, None] if len(path) > 1 else np.zeros((0, d))
        self._slopes = slopes

    @property
    def dim(self) -> int:
        return self.path.dim

    def levels_at(self, times) -> list[np.ndarray]:
        """Batched blocks of ``S_{0,t}`` for an array of times, shape ``(len(times), d**k)``."""
        times = np.asarray(times, dtype=float).reshape(-1)
        p = self.path
        span = max(1.0, abs(p.start), abs(p.end))
        if np.any(times < p.start - 1e-12 * span) or np.any(times > p.end + 1e-12 * span):
            raise DomainError(f"times outside [{p.start}, {p.end}]")
        if len(p) == 1:
            return [np.repeat(b, len(times), axis=0) for b in self._prefix]
        seg = np.clip(np.searchsorted(p.times, times, side="right") - 1, 0, len(p) - 2)
        v = self._slopes[seg] * (times - p.times[seg])[:, None]
        return _mul_levels(_take(self._prefix, seg), _segment_exp_levels(v, self.level), self.dim, self.level)

    def at(self, t: float) -> GroupElement:
        return GroupElement([b[0] for b in self.levels_at([t])], self.dim, certified=True)

    def subsignature(self, s: float, t: float) -> GroupElement:
        """S_{s,t} = S_{0,s}^{-1} (x) S_{0,t}."""
        if s > t:
            raise DomainError(f"need s <= t, got s={s}, t={t}")
        both = self.levels_at([s, t])
        inv = _inverse_levels(_take(both, 0), self.dim, self.level)
        return GroupElement(_mul_levels(inv, _take(both, 1), self.dim, self.level), self.dim, certified=True)

    def signature(self) -> GroupElement:
        return GroupElement([b[-1] for b in self._prefix], self.dim, certified=True)


def subsignature(sp: SignaturePath, s: float, t: float) -> GroupElement:
    return sp.subsignature(s, t)


# ---------------------------------------------------------------------------
# p-variation


def refine_grid(times, r: int = 8) -> np.ndarray:
    """Split every interval between consecutive ``times`` into ``r`` equal parts."""
    times = np.unique(np.asarray(times, dtype=float))
    if r < 1:
        raise ShapeError(f"refinement factor must be >= 1, got {r}")
    if len(times) < 2:
        return times
    frac = np.arange(r) / r
    pts = (times[:-1, None] + np.diff(times)[:, None] * frac[None, :]).reshape(-1)
    return np.append(pts, times[-1])


def _resolve_grid(paths, grid, refine):
    start, end = paths[0].path.start, paths[0].path.end
    for sp in paths[1:]:
        if not (np.isclose(sp.path.start, start) and np.isclose(sp.path.end, end)):
            raise ShapeError("paths must share their time interval")
    if grid is None:
        grid = refine_grid(np.concatenate([sp.path.times for sp in paths]), refine)
    grid = np.unique(np.asarray(grid, dtype=float))
    if len(grid) == 0 or grid[0] > start or grid[-1] < end:
        raise ShapeError("the grid must contain both endpoints of the time interval")
    return grid


def _increments_to(prefix, prefix_inv, j, dim, level):
    """Blocks of S_{t_i, t_j} for all i < j."""
    return _mul_levels(_take(prefix_inv, slice(0, j)), _take(prefix, slice(j, j + 1)), dim, level)


def _max_partition_sum(weight_rows, n):
    """max over partitions 0 = i_0 < ... < i_r = n-1 of sum of weights; rows yield w[:j, j]."""
    best = np.zeros(n)
    for j, w in zip(range(1, n), weight_rows):
        best[j] = np.max(best[:j] + w)
    return best[-1]


def p_variation(sp: SignaturePath, p: float, grid=None, refine: int = 8) -> float:
    """Discrete p-variation of the running signature over partitions drawn from ``grid``.

    Maximises ``(sum_j ||S_{t_j, t_{j+1}}||^p)^(1/p)`` with the homogeneous norm
    by dynamic programming.  The default grid splits every segment into
    ``refine`` parts; nested grids give non-decreasing values.
    """
    if p < 1:
        raise DomainError(f"p-variation needs p >= 1, got {p}")
    grid = _resolve_grid([sp], grid, refine)
    if len(grid) < 2:
        return 0.0
    prefix = sp.levels_at(grid)
    inv = _inverse_levels(prefix, sp.dim, sp.level)

    def rows():
        for j in range(1, len(grid)):
            inc = _increments_to(prefix, inv, j, sp.dim, sp.level)
            yield _homogeneous_norm_levels(inc) ** p

    return float(_max_partition_sum(rows(), len(grid)) ** (1.0 / p))


def _level_weights(x, y, xinv, yinv, j, dim, level, levels, exponent):
    """Per-level rows ||pi_i(x_{t_k t_j} - y_{t_k t_j})||^{exponent / i} for k < j."""
    ix = _increments_to(x, xinv, j, dim, level)
    if y is None:
        diff = ix
    else:
        iy = _increments_to(y, yinv, j, dim, level)
        diff = [a - b for a, b in zip(ix, iy)]
    return [np.linalg.norm(diff[i], axis=-1) ** (exponent / i) for i in levels]


def _per_level_variation(x, y, grid, exponent, outer, levels):
    """max_i (sup_P sum_j w_i)^(i/outer) with w_i = ||pi_i(...)||^(exponent/i)."""
    xl = x.levels_at(grid)
    xi = _inverse_levels(xl, x.dim, x.level)
    yl = yi = None
    if y is not None:
        yl = y.levels_at(grid)
        yi = _inverse_levels(yl, y.dim, y.level)
    n = len(grid)
    best = np.zeros((len(levels), n))
    for j in range(1, n):
        rows = _level_weights(xl, yl, xi, yi, j, x.dim, x.level, levels, exponent)
        for a, w in enumerate(rows):
            best[a, j] = np.max(best[a, :j] + w)
    return max(best[a, -1] ** (i / outer) for a, i in enumerate(levels))


def _check_pair(x: SignaturePath, y: SignaturePath, p_prime: float):
    if x.dim != y.dim or x.level != y.level:
        raise ShapeError("signature paths must share dimension and level")
    top = math.floor(p_prime)
    if top < 1:
        raise DomainError(f"need p' >= 1, got {p_prime}")
    if x.level < top:
        raise ShapeError(f"level {x.level} is below floor(p') = {top}")
    return list(range(1, top + 1))


def p_var_distance(x: SignaturePath, y: SignaturePath, p_prime: float, grid=None, refine: int = 8) -> float:
    """Inhomogeneous p'-variation distance, levels 1..floor(p'), over partitions of ``grid``.

    ``max_i (sup_P sum_j ||pi_i(x_{t_j t_{j+1}} - y_{t_j t_{j+1}})||^{p'/i})^{i/p'}``.
    """
    levels = _check_pair(x, y, p_prime)
    grid = _resolve_grid([x, y], grid, refine)
    if len(grid) < 2:
        return 0.0
    return float(_per_level_variation(x, y, grid, p_prime, p_prime, levels))


def sup_increment_distance(x: SignaturePath, y: SignaturePath, grid, levels) -> float:
    """max over grid pairs s <= t and levels i of ||pi_i(x_{s,t} - y_{s,t})||."""
    xl, yl = x.levels_at(grid), y.levels_at(grid)
    xi, yi = _inverse_levels(xl, x.dim, x.level), _inverse_levels(yl, y.dim, y.level)
    worst = 0.0
    for j in range(1, len(grid)):
        rows = _level_weights(xl, yl, xi, yi, j, x.dim, x.level, levels, exponent=1.0)
        worst = max(worst, max(float(np.max(r ** i)) for r, i in zip(rows, levels)))
    return worst


def sup_inverse_distance(x: SignaturePath, y: SignaturePath, grid) -> float:
    """max over grid times s and levels i >= 1 of ||pi_i(x_s^{-1} - y_s^{-1})||."""
    xi = _inverse_levels(x.levels_at(grid), x.dim, x.level)
    yi = _inverse_levels(y.levels_at(grid), y.dim, y.level)
    return max(float(np.max(np.linalg.norm(a - b, axis=-1))) for a, b in zip(xi[1:], yi[1:]))


@dataclass(frozen=True)
class InterpolationBound:
    """Both sides of the interpolation inequality for the p'-variation distance."""

    distance: float
    sup_distance: float
    x_budget: float
    y_budget: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound * (1 + 1e-12) + 1e-15


def interpolation_bound(
    x: SignaturePath, y: SignaturePath, p: float, p_prime: float, grid=None, refine: int = 8
) -> InterpolationBound:
    """Evaluate d_{p'-var}(x, y) and the bound

    ``sup ||x_{s,t} - y_{s,t}||^{(p'-p)/p'} * 2^(p-1) * (Vx + Vy)`` with
    ``Vx = max_i (sup_P sum_j ||pi_i(x_{t_j t_{j+1}})||^{p/i})^{i/p'}``.
    All suprema range over the same grid.
    """
    if not 1 <= p <= p_prime or math.floor(p) != math.floor(p_prime):
        raise DomainError(f"need 1 <= p <= p' with equal integer parts, got p={p}, p'={p_prime}")
    levels = _check_pair(x, y, p_prime)
    grid = _resolve_grid([x, y], grid, refine)
    dist = _per_level_variation(x, y, grid, p_prime, p_prime, levels)
    sup = sup_increment_distance(x, y, grid, levels)
    vx = _per_level_variation(x, None, grid, p, p_prime, levels)
    vy = _per_level_variation(y, None, grid, p, p_prime, levels)
    bound = sup ** ((p_prime - p) / p_prime) * 2 ** (p - 1) * (vx + vy)
    return InterpolationBound(float(dist), float(sup), float(vx), float(vy), float(bound))


def one_variation(x: PiecewiseLinearPath, s: float, t: float) -> float:
    """Euclidean length of ``x`` restricted to ``[s, t]``."""
    if s >= t:
        return 0.0
    return float(np.sum(np.linalg.norm(x.restrict(s, t).increments, axis=1)))


@dataclass(frozen=True)
class Control:
    """The control omega(s, t) = (length of x on [s, t])^p."""

    path: PiecewiseLinearPath
    p: float = 1.0

    def __call__(self, s: float, t: float) -> float:
        return one_variation(self.path, s, t) ** self.p


# ---------------------------------------------------------------------------
# generators and IO


def random_path(rng: np.random.Generator, dim: int, segments: int | None = None, scale: float = 1.0) -> PiecewiseLinearPath:
    """Seeded random path on [0, 1]: 1-8 segments, points uniform in [-scale, scale]^dim."""
    if segments is None:
        segments = int(rng.integers(1, 9))
    gaps = rng.uniform(0.2, 1.0, size=segments)
    times = np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
    times[-1] = 1.0
    points = rng.uniform(-scale, scale, size=(segments + 1, dim))
    return PiecewiseLinearPath(times, points)


def random_time_change(rng: np.random.Generator, x: PiecewiseLinearPath, plateaus: bool = True):
    """Knots and values of a random onto, non-decreasing, piecewise-linear time change."""
    k = int(rng.integers(2, 7))
    values = np.sort(rng.uniform(x.start, x.end, size=k))
    if plateaus:
        dup = rng.integers(0, k)
        values = np.insert(values, dup, values[dup])
    values = np.concatenate([[x.start], values, [x.end]])
    knots = np.cumsum(np.concatenate([[0.0], rng.uniform(0.1, 2.0, size=len(values) - 1)]))
    return knots, values


def read_csv(source: str | os.PathLike | io.TextIOBase) -> PiecewiseLinearPath:
    """Read a path from CSV with header ``t,x1,...,xd``; raise InputError with row/column on failure."""
    if isinstance(source, (str, os.PathLike)) and not (isinstance(source, str) and "\n" in source):
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    elif isinstance(source, str):
        rows = list(csv.reader(io.StringIO(source)))
    else:
        rows = list(csv.reader(source))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty path file: expected header 't,x1,...,xd'")
    header = [c.strip() for c in rows[0]]
    if header[0] != "t" or len(header) < 2:
        raise InputError(f"row 1: header must be 't,x1,...,xd', got {','.join(header)!r}")
    if len(rows) < 2:
        raise InputError("path file has a header but no data rows")
    values = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"row {r}: expected {len(header)} columns, got {len(row)}")
        parsed = []
        for c, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise InputError(f"row {r}, column {c} ({header[c - 1]}): not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise InputError(f"row {r}, column {c} ({header[c - 1]}): non-finite value {cell!r}")
            parsed.append(v)
        values.append(parsed)
    data = np.array(values)
    bad = np.nonzero(np.diff(data[:, 0]) < 0)[0]
    if len(bad):
        raise InputError(f"row {bad[0] + 3}, column 1 (t): time decreases")
    return PiecewiseLinearPath(data[:, 0], data[:, 1:])


def write_csv(x: PiecewiseLinearPath, target) -> None:
    lines = ["t," + ",".join(f"x{i + 1}" for i in range(x.dim))]
    for t, pt in zip(x.times, x.points):
        lines.append(",".join(repr(float(v)) for v in (t, *pt)))
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
