"""Finite heighted posets as tree metrics.

A poset with a least element, totally ordered down-sets, unique maximal
common lower bounds and a height function strictly increasing along every
down-set carries the metric ``d(a, b) = alpha(a) + alpha(b) - 2 alpha(a ^ b)``.
This module validates those hypotheses on finite posets and certifies the
conclusions (triangle inequality, the meet inequality that makes the space
0-hyperbolic, the Gromov-product identity, and the four-point condition) by
exhaustive scans.

Heights given as ints or :class:`fractions.Fraction` are handled exactly;
float heights are compared with an absolute tolerance of ``1e-12`` times the
largest height.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, InputError

FLOAT_TOL = 1e-12

CONDITIONS = {
    0: "the relation is a partial order (antisymmetric)",
    1: "there is a least element",
    2: "every down-set is totally ordered",
    3: "every pair has a unique maximal common lower bound",
    4: "alpha(root) = 0 and alpha is non-negative and strictly increasing on down-sets",
}


@dataclass(frozen=True)
class Violation:
    condition: int
    message: str
    witness: tuple

    def to_json(self) -> dict:
        return {"condition": self.condition, "message": self.message, "witness": list(self.witness)}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def conditions(self) -> set[int]:
        return {v.condition for v in self.violations}

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class Certificate:
    """Outcome of an exhaustive scan: ``worst`` is the largest violation amount (<= 0 is a pass)."""

    name: str
    ok: bool
    worst: float
    witness: tuple
    checked: int

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "worst": self.worst, "witness": list(self.witness), "checked": self.checked}


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


class HeightedPoset:
    """A finite poset with a root and heights.

    The order is given either by a ``parent`` map (a rooted forest; the order
    is "is an ancestor of") or by ``relation``, an iterable of pairs
    ``(a, b)`` meaning ``a <= b``, closed reflexively and transitively.  When
    both are given they must generate the same order.
    """

    def __init__(self, nodes, root, alpha: dict, parent: dict | None = None, relation=None):
        self.nodes = list(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise InputError("node ids must be unique")
        self.index = {v: i for i, v in enumerate(self.nodes)}
        self.root = root
        self.parent = dict(parent) if parent is not None else None
        missing = [v for v in self.nodes if v not in alpha]
        if missing:
            raise InputError(f"alpha is missing for nodes {missing}")
        values = [alpha[v] for v in self.nodes]
        self.exact = _is_exact(values)
        if self.exact:
            self.alpha = np.array([Fraction(v) for v in values], dtype=object)
        else:
            self.alpha = np.array([float(v) for v in values])
        n = len(self.nodes)
        if parent is None and relation is None:
            relation = []
        leq_parent = leq_relation = None
        if parent is not None:
            gen = np.zeros((n, n), dtype=bool)
            for child, par in parent.items():
                if par is None:
                    continue
                if child not in self.index or par not in self.index:
                    raise InputError(f"parent entry {child!r} -> {par!r} names an unknown node")
                gen[self.index[par], self.index[child]] = True
            leq_parent = _closure(gen)
        if relation is not None:
            gen = np.zeros((n, n), dtype=bool)
            for a, b in relation:
                if a not in self.index or b not in self.index:
                    raise InputError(f"relation pair ({a!r}, {b!r}) names an unknown node")
                gen[self.index[a], self.index[b]] = True
            leq_relation = _closure(gen)
        if leq_parent is not None and leq_relation is not None and not np.array_equal(leq_parent, leq_relation):
            raise InputError("parent map and relation generate different orders")
        self.leq = leq_parent if leq_parent is not None else leq_relation
        self.leq.flags.writeable = False
        self._report = None
        self._meet = None

    # -- construction helpers ---------------------------------------------

    @classmethod
    def from_json(cls, data: dict) -> HeightedPoset:
        try:
            nodes = data["nodes"]
            root = data.get("root")
            raw_alpha = data["alpha"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"poset JSON needs 'nodes' and 'alpha': {exc}") from None
        if not isinstance(nodes, list) or not isinstance(raw_alpha, dict):
            raise InputError("'nodes' must be a list and 'alpha' an object")
        by_key = {str(v): v for v in nodes}

        def node(key):
            if str(key) not in by_key:
                raise InputError(f"unknown node id {key!r}")
            return by_key[str(key)]

        alpha = {node(k): _parse_height(v) for k, v in raw_alpha.items()}
        parent = None
        if "parent" in data:
            parent = {node(k): (None if v is None else node(v)) for k, v in data["parent"].items()}
        relation = None
        if "relation" in data:
            try:
                relation = [(node(a), node(b)) for a, b in data["relation"]]
            except (TypeError, ValueError):
                raise InputError("'relation' must be a list of [lower, upper] pairs") from None
        if parent is None and relation is None:
            parent = {}
        return cls(nodes, None if root is None else node(root), alpha, parent=parent, relation=relation)

    @classmethod
    def load(cls, path: str | os.PathLike) -> HeightedPoset:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed poset JSON: {exc}") from None
        return cls.from_json(data)

    def to_json(self) -> dict:
        out = {"nodes": list(self.nodes), "root": self.root}
        if self.parent is not None:
            out["parent"] = {str(k): v for k, v in self.parent.items() if v is not None}
        else:
            out["relation"] = [
                [self.nodes[i], self.nodes[j]] for i, j in zip(*np.nonzero(self.leq)) if i != j
            ]
        out["alpha"] = {str(v): _format_height(a) for v, a in zip(self.nodes, self.alpha)}
        return out

    def __len__(self):
        return len(self.nodes)

    # -- validation -------------------------------------------------------

    @property
    def tol(self) -> float:
        if self.exact or len(self.alpha) == 0:
            return 0
        return FLOAT_TOL * max(1.0, float(np.max(np.abs(self.alpha))))

    def validate(self) -> ValidationReport:
        """Check the four hypotheses (plus antisymmetry); report every violated condition."""
        if self._report is None:
            self._report = ValidationReport(tuple(self._violations()))
        return self._report

    def _violations(self):
        leq, names, n = self.leq, self.nodes, len(self.nodes)
        out = []
        strict = leq & ~np.eye(n, dtype=bool)
        both = strict & strict.T
        if both.any():
            i, j = np.argwhere(both)[0]
            out.append(Violation(0, "two distinct nodes lie below each other", (names[i], names[j])))

        if self.root is None or self.root not in self.index:
            least = [i for i in range(n) if leq[i].all()]
            if least:
                root = least[0]
                out.append(Violation(1, "no root given; a least element exists", (names[root],)))
            else:
                minimal = [names[i] for i in range(n) if not strict[:, i].any()]
                out.append(Violation(1, "no least element", tuple(minimal)))
                root = None
        else:
            root = self.index[self.root]
            above = leq[root]
            if not above.all():
                j = int(np.argmin(above))
                out.append(Violation(1, f"node is not above the root {self.root!r}", (names[j],)))

        comparable = leq | leq.T
        # bad_down[t, a, b]: a, b both below t and incomparable
        bad_down = leq.T[:, :, None] & leq.T[:, None, :] & ~comparable[None, :, :]
        if bad_down.any():
            t, a, b = np.argwhere(bad_down)[0]
            out.append(Violation(2, "down-set is not totally ordered", (names[t], names[a], names[b])))

        # common[a, b, c]: c below both a and b; c is maximal when nothing above it is common
        common = leq.T[:, None, :] & leq.T[None, :, :]
        above = common.astype(np.int64) @ strict.T.astype(np.int64)
        n_max = (common & (above == 0)).sum(axis=2)
        bad_pairs = np.argwhere(np.triu(n_max != 1))
        if len(bad_pairs):
            a, b = bad_pairs[0]
            maximal = np.nonzero(common[a, b] & (above[a, b] == 0))[0]
            out.append(
                Violation(
                    3,
                    f"{len(maximal)} maximal common lower bounds",
                    (names[a], names[b], tuple(names[m] for m in maximal)),
                )
            )

        tol = self.tol
        alpha = self.alpha
        negative = [i for i in range(n) if alpha[i] < -tol]
        if root is not None and abs(alpha[root]) > tol:
            out.append(Violation(4, "alpha(root) != 0", (names[root],)))
        elif negative:
            out.append(Violation(4, "alpha is negative", (names[negative[0]],)))
        else:
            for i, j in np.argwhere(strict):
                if not alpha[j] - alpha[i] > tol:
                    out.append(Violation(4, "alpha does not increase from lower to upper node", (names[i], names[j])))
                    break
        return out

    def _require_valid(self):
        report = self.validate()
        if not report.valid:
            v = report.first
            raise DomainError(f"poset violates condition {v.condition} ({v.message}); witness {v.witness}")

    # -- metric -----------------------------------------------------------

    def meet_matrix(self) -> np.ndarray:
        """Index of ``a ^ b`` for every pair of node indices."""
        self._require_valid()
        if self._meet is None:
            leq = self.leq
            depth = leq.sum(axis=0)
            common = leq[:, :, None] & leq[:, None, :]
            self._meet = np.argmax(common * (depth + 1)[:, None, None], axis=0)
        return self._meet

    def meet(self, a, b):
        m = self.meet_matrix()
        return self.nodes[m[self.index[a], self.index[b]]]

    def distance_matrix(self) -> np.ndarray:
        alpha = self.alpha
        am = alpha[self.meet_matrix()]
        return alpha[:, None] + alpha[None, :] - 2 * am

    def distance(self, a, b):
        i, j = self.index[a], self.index[b]
        m = self.meet_matrix()[i, j]
        return self.alpha[i] + self.alpha[j] - 2 * self.alpha[m]


def _closure(gen: np.ndarray) -> np.ndarray:
    n = len(gen)
    reach = gen | np.eye(n, dtype=bool)
    while True:
        nxt = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def _parse_height(v):
    if isinstance(v, bool):
        raise InputError(f"height must be a number, got {v!r}")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            raise InputError(f"cannot parse height {v!r}") from None
    raise InputError(f"height must be a number or a rational string, got {v!r}")


def _format_height(a):
    if isinstance(a, Fraction):
        return a.numerator if a.denominator == 1 else str(a)
    return float(a)


def _as_float(v) -> float:
    return float(v)


# ---------------------------------------------------------------------------
# operations


def validate(poset: HeightedPoset) -> ValidationReport:
    return poset.validate()


def meet(poset: HeightedPoset, a, b):
    return poset.meet(a, b)


def tree_distance(poset: HeightedPoset, a, b):
    return poset.distance(a, b)


def _witness(poset, idx):
    return tuple(poset.nodes[int(i)] for i in idx)


def check_triangle(poset: HeightedPoset) -> Certificate:
    D = poset.distance_matrix()
    n = len(poset)
    # excess[a, b, c] = d(a, c) - d(a, b) - d(b, c)
    excess = D[:, None, :] - D[:, :, None] - D[None, :, :]
    idx = np.unravel_index(np.argmax(excess), excess.shape)
    worst = excess[idx]
    return Certificate("triangle", bool(worst <= poset.tol * 4), _as_float(worst), _witness(poset, idx), n**3)


def check_zero_hyperbolic(poset: HeightedPoset) -> tuple[Certificate, Certificate]:
    """alpha(a ^ b) >= min(alpha(a ^ c), alpha(b ^ c)) on all triples, and

    the Gromov product at the root, (a.b) = (d(v,a) + d(v,b) - d(a,b)) / 2,
    equals alpha(a ^ b) on all pairs.
    """
    A = poset.alpha[poset.meet_matrix()]
    n = len(poset)
    rhs = np.minimum(A[:, None, :], A[None, :, :])
    gap = rhs - A[:, :, None]
    idx = np.unravel_index(np.argmax(gap), gap.shape)
    worst = gap[idx]
    hyper = Certificate("zero_hyperbolic", bool(worst <= poset.tol * 2), _as_float(worst), _witness(poset, idx), n**3)

    D = poset.distance_matrix()
    r = poset.index[poset.root]
    gromov = (D[r][:, None] + D[r][None, :] - D) / 2
    diff = np.abs(gromov - A)
    gidx = np.unravel_index(np.argmax(diff), diff.shape)
    gworst = diff[gidx]
    gcert = Certificate("gromov_product", bool(gworst <= poset.tol * 4), _as_float(gworst), _witness(poset, gidx), n**2)
    return hyper, gcert


def check_four_point(poset: HeightedPoset) -> Certificate:
    """d(x,y) + d(z,w) <= max(d(x,z) + d(y,w), d(x,w) + d(y,z)) on all quadruples."""
    D = poset.distance_matrix()
    n = len(poset)
    worst, witness = None, ()
    for x in range(n):
        lhs = D[x][:, None, None] + D[None, :, :]
        r1 = D[x][None, :, None] + D[:, None, :]
        r2 = D[x][None, None, :] + D[:, :, None]
        excess = lhs - np.maximum(r1, r2)
        idx = np.unravel_index(np.argmax(excess), excess.shape)
        if worst is None or excess[idx] > worst:
            worst, witness = excess[idx], (x,) + tuple(int(i) for i in idx)
    if worst is None:
        return Certificate("four_point", True, 0.0, (), 0)
    return Certificate("four_point", bool(worst <= poset.tol * 8), _as_float(worst), _witness(poset, witness), n**4)


@dataclass(frozen=True)
class TreeReport:
    validation: ValidationReport
    certificates: tuple[Certificate, ...] = field(default_factory=tuple)

    @property
    def certified(self) -> bool:
        return self.validation.valid and all(c.ok for c in self.certificates)

    def to_json(self) -> dict:
        return {
            "valid": self.validation.valid,
            "violations": [v.to_json() for v in self.validation.violations],
            "certificates": [c.to_json() for c in self.certificates],
            "certified": self.certified,
        }


def certify(poset: HeightedPoset) -> TreeReport:
    """Validate and, when the hypotheses hold, run every metric certificate."""
    report = poset.validate()
    if not report.valid:
        return TreeReport(report)
    hyper, gromov = check_zero_hyperbolic(poset)
    return TreeReport(report, (check_triangle(poset), hyper, gromov, check_four_point(poset)))


def random_heighted_tree(rng: np.random.Generator, n: int) -> HeightedPoset:
    """Random recursive tree on nodes 0..n-1 rooted at 0 with positive edge lengths."""
    parent = {i: int(rng.integers(0, i)) for i in range(1, n)}
    alpha = {0: 0.0}
    for i in range(1, n):
        alpha[i] = alpha[parent[i]] + float(rng.uniform(0.1, 1.0))
    return HeightedPoset(list(range(n)), 0, alpha, parent=parent)
