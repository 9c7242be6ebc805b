"""Dense arithmetic in the truncated tensor algebra T^(N)(R^d).

An element is stored as a stack of coefficient blocks ``levels[0..N]`` where
block ``k`` is a flat float64 array of length ``d**k``.  Multi-indices are laid
out row-major, so the word ``(i_1, ..., i_k)`` (0-based letters) lives at offset
``sum(i_j * d**(k-j))``.

The private ``_*_levels`` kernels accept blocks with arbitrary leading batch
dimensions and broadcast over them; :class:`TruncatedTensor` wraps the
unbatched case.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import CapacityError, DomainError, ShapeError

#: Largest admissible ``d**N`` for a dense level block.
MAX_COEFFICIENTS = 10**7

#: Default tolerance for the scalar-part checks done by constructors.
DEFAULT_TOL = 1e-9


def check_capacity(dim: int, level: int) -> None:
    if dim < 1:
        raise ShapeError(f"dimension must be positive, got {dim}")
    if level < 0:
        raise ShapeError(f"level must be non-negative, got {level}")
    if dim**level > MAX_COEFFICIENTS:
        raise CapacityError(
            f"T^({level})(R^{dim}) needs {dim}**{level} coefficients in its top block, "
            f"more than the limit {MAX_COEFFICIENTS}"
        )


# ---------------------------------------------------------------------------
# batched kernels


def _mul_levels(a, b, dim, level):
    out = []
    for k in range(level + 1):
        acc = None
        for j in range(k + 1):
            x, y = a[j], b[k - j]
            term = x[..., :, None] * y[..., None, :]
            term = term.reshape(term.shape[:-2] + (dim**k,))
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def _poly_levels(h, coeffs, dim, level):
    """Evaluate ``sum_k coeffs[k] * h^k`` by Horner's rule; ``h`` must have zero scalar part."""
    batch = h[0].shape[:-1]
    n = len(coeffs) - 1
    acc = [np.zeros(batch + (dim**k,)) for k in range(level + 1)]
    acc[0] = np.full(batch + (1,), float(coeffs[n]))
    for c in reversed(coeffs[:n]):
        acc = _mul_levels(h, acc, dim, level)
        acc[0] = acc[0] + c
    return acc


def _inverse_levels(g, dim, level):
    h = [np.zeros_like(g[0])] + list(g[1:])
    return _poly_levels(h, [(-1.0) ** j for j in range(level + 1)], dim, level)


def _antipode_levels(g, dim):
    out = []
    for k, block in enumerate(g):
        batch = block.shape[:-1]
        cube = block.reshape(batch + (dim,) * k)
        nb = len(batch)
        axes = tuple(range(nb)) + tuple(nb + k - 1 - i for i in range(k))
        out.append((-1.0) ** k * np.transpose(cube, axes).reshape(batch + (dim**k,)))
    return out


def _homogeneous_norm_levels(g):
    batch = g[0].shape[:-1]
    result = np.zeros(batch)
    for k in range(1, len(g)):
        result = np.maximum(result, np.linalg.norm(g[k], axis=-1) ** (1.0 / k))
    return result


# ---------------------------------------------------------------------------
# value types


class TruncatedTensor:
    """An element of T^(N)(R^d) with dense, immutable level blocks.

    ``a @ b`` is the truncated tensor product; ``+``, ``-`` and multiplication
    by a real scalar act coefficient-wise.
    """

    __slots__ = ("dim", "level", "levels")

    def __init__(self, levels: Sequence, dim: int | None = None):
        levels = [np.array(b, dtype=float).reshape(-1) for b in levels]
        if not levels:
            raise ShapeError("a truncated tensor needs at least the scalar block")
        level = len(levels) - 1
        if dim is None:
            if level == 0:
                raise ShapeError("dim must be given for a level-0 tensor")
            dim = levels[1].size
        check_capacity(dim, level)
        for k, block in enumerate(levels):
            if block.size != dim**k:
                raise ShapeError(f"block {k} has {block.size} entries, expected {dim}**{k}")
            block.flags.writeable = False
        self.dim = int(dim)
        self.level = level
        self.levels = tuple(levels)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim: int, level: int) -> TruncatedTensor:
        check_capacity(dim, level)
        return cls([np.zeros(dim**k) for k in range(level + 1)], dim)

    @classmethod
    def unit(cls, dim: int, level: int) -> TruncatedTensor:
        t = cls.zero(dim, level)
        return cls([np.ones(1)] + list(t.levels[1:]), dim)

    @classmethod
    def from_vector(cls, v, level: int, scalar: float = 0.0) -> TruncatedTensor:
        """Tensor with level-1 block ``v``, scalar part ``scalar`` and zeros elsewhere."""
        v = np.asarray(v, dtype=float).reshape(-1)
        t = cls.zero(v.size, level)
        levels = list(t.levels)
        levels[0] = np.array([scalar])
        if level >= 1:
            levels[1] = v
        return cls(levels, v.size)

    @classmethod
    def from_json(cls, data: dict) -> TruncatedTensor:
        try:
            dim, level, levels = int(data["dim"]), int(data["level"]), data["levels"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed tensor JSON: {exc}") from exc
        if len(levels) != level + 1:
            raise ShapeError(f"expected {level + 1} level blocks, got {len(levels)}")
        return cls(levels, dim)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "level": self.level,
            "levels": [block.tolist() for block in self.levels],
        }

    # -- accessors --------------------------------------------------------

    @property
    def scalar(self) -> float:
        return float(self.levels[0][0])

    def block(self, k: int) -> np.ndarray:
        """Level-``k`` block as a ``(d,)*k`` array (read-only view)."""
        if not 0 <= k <= self.level:
            raise ShapeError(f"level {k} outside 0..{self.level}")
        return self.levels[k].reshape((self.dim,) * k)

    def truncate(self, level: int) -> TruncatedTensor:
        """Projection onto T^(level); pads with zero blocks when ``level`` is larger."""
        check_capacity(self.dim, level)
        blocks = list(self.levels[: level + 1])
        blocks += [np.zeros(self.dim**k) for k in range(len(blocks), level + 1)]
        return type(self)._rewrap(self, blocks)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.levels)

    def max_abs_diff(self, other: TruncatedTensor) -> float:
        _check_compatible(self, other)
        return max(float(np.max(np.abs(x - y))) for x, y in zip(self.levels, other.levels))

    def allclose(self, other: TruncatedTensor, atol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= atol

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _rewrap(like, blocks):
        return TruncatedTensor(blocks, like.dim)

    def __add__(self, other):
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        _check_compatible(self, other)
        return TruncatedTensor([x + y for x, y in zip(self.levels, other.levels)], self.dim)

    def __sub__(self, other):
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        _check_compatible(self, other)
        return TruncatedTensor([x - y for x, y in zip(self.levels, other.levels)], self.dim)

    def __neg__(self):
        return TruncatedTensor([-x for x in self.levels], self.dim)

    def __mul__(self, c):
        if isinstance(c, TruncatedTensor):
            return NotImplemented
        return TruncatedTensor([float(c) * x for x in self.levels], self.dim)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def __matmul__(self, other):
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        return mul(self, other)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, level={self.level}, scalar={self.scalar:g})"


class GroupElement(TruncatedTensor):
    """A truncated tensor with scalar part 1, optionally certified group-like.

    ``certified`` records that the shuffle identities were checked (or that the
    element was produced by an operation preserving group-likeness).
    """

    __slots__ = ("certified",)

    def __init__(self, levels, dim=None, certified: bool = False, tol: float = DEFAULT_TOL):
        super().__init__(levels, dim)
        if abs(self.levels[0][0] - 1.0) > tol:
            raise DomainError(f"group elements need scalar part 1, got {self.levels[0][0]!r}")
        self.certified = certified

    @classmethod
    def certify(cls, t: TruncatedTensor, tol: float = DEFAULT_TOL) -> GroupElement:
        """Wrap ``t`` after checking the shuffle identities; raise DomainError if they fail."""
        from .words import group_like_residual

        residual, witness = group_like_residual(t)
        if residual > tol:
            raise DomainError(
                f"tensor is not group-like: shuffle residual {residual:.3e} at words {witness}"
            )
        return cls(t.levels, t.dim, certified=True, tol=tol)

    @staticmethod
    def _rewrap(like, blocks):
        return GroupElement(blocks, like.dim, certified=like.certified)


def _check_compatible(a: TruncatedTensor, b: TruncatedTensor) -> None:
    if a.dim != b.dim or a.level != b.level:
        raise ShapeError(
            f"incompatible tensors: (dim={a.dim}, level={a.level}) vs (dim={b.dim}, level={b.level})"
        )


def _require_unit_scalar(g: TruncatedTensor, what: str, tol: float = DEFAULT_TOL) -> None:
    if abs(g.scalar - 1.0) > tol:
        raise DomainError(f"{what} needs scalar part 1, got {g.scalar!r}")


# ---------------------------------------------------------------------------
# operations


def unit(dim: int, level: int) -> GroupElement:
    t = TruncatedTensor.unit(dim, level)
    return GroupElement(t.levels, dim, certified=True)


def mul(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Truncated tensor product: block k of the result is sum_j a_j (x) b_{k-j}."""
    _check_compatible(a, b)
    blocks = _mul_levels(a.levels, b.levels, a.dim, a.level)
    if isinstance(a, GroupElement) and isinstance(b, GroupElement):
        return GroupElement(blocks, a.dim, certified=a.certified and b.certified)
    return TruncatedTensor(blocks, a.dim)


def inverse(g: TruncatedTensor) -> TruncatedTensor:
    """Inverse via the terminating Neumann series sum_j (-1)^j (g - 1)^j."""
    try:
        _require_unit_scalar(g, "inverse")
    except DomainError as exc:
        raise DomainError(f"not invertible in the group: {exc}") from None
    blocks = _inverse_levels(g.levels, g.dim, g.level)
    if isinstance(g, GroupElement):
        return GroupElement(blocks, g.dim, certified=g.certified)
    return TruncatedTensor(blocks, g.dim)


def exp(l: TruncatedTensor) -> TruncatedTensor:
    if abs(l.scalar) > DEFAULT_TOL:
        raise DomainError(f"exp needs zero scalar part, got {l.scalar!r}")
    h = [np.zeros(1)] + list(l.levels[1:])
    coeffs = [1.0 / math.factorial(j) for j in range(l.level + 1)]
    return TruncatedTensor(_poly_levels(h, coeffs, l.dim, l.level), l.dim)


def log(g: TruncatedTensor) -> TruncatedTensor:
    _require_unit_scalar(g, "log")
    h = [np.zeros(1)] + list(g.levels[1:])
    coeffs = [0.0] + [(-1.0) ** (k + 1) / k for k in range(1, g.level + 1)]
    if g.level == 0:
        return TruncatedTensor.zero(g.dim, 0)
    return TruncatedTensor(_poly_levels(h, coeffs, g.dim, g.level), g.dim)


def antipode(g: TruncatedTensor) -> TruncatedTensor:
    """Reverse every multi-index of block k and multiply by (-1)^k."""
    blocks = _antipode_levels(g.levels, g.dim)
    if isinstance(g, GroupElement):
        return GroupElement(blocks, g.dim, certified=g.certified)
    return TruncatedTensor(blocks, g.dim)


def level_norm(g: TruncatedTensor, k: int) -> float:
    """Euclidean (Hilbert-Schmidt) norm of the level-k block."""
    if not 0 <= k <= g.level:
        raise ShapeError(f"level {k} outside 0..{g.level}")
    return float(np.linalg.norm(g.levels[k]))


def homogeneous_norm(g: TruncatedTensor) -> float:
    """max over k >= 1 of level_norm(g, k) ** (1/k); zero for level-0 tensors."""
    return float(_homogeneous_norm_levels(g.levels))


def group_distance(a: TruncatedTensor, b: TruncatedTensor) -> float:
    """||a^{-1} (x) b|| evaluated as ||1 + a^{-1} (x) (b - a)||.

    Subtracting first avoids the cancellation in ``a^{-1} (x) b``, so equal
    inputs are at distance exactly 0.
    """
    _check_compatible(a, b)
    _require_unit_scalar(a, "group_distance")
    _require_unit_scalar(b, "group_distance")
    diff = [y - x for x, y in zip(a.levels, b.levels)]
    diff[0] = np.zeros(1)
    inv = _inverse_levels(a.levels, a.dim, a.level)
    return float(_homogeneous_norm_levels(_mul_levels(inv, diff, a.dim, a.level)))
