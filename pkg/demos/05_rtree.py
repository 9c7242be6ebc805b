"""Heighted posets, their tree metric, and what goes wrong when a hypothesis fails."""

import numpy as np

from sigalg.rtree import HeightedPoset, certify, random_heighted_tree, tree_distance, validate

tree = random_heighted_tree(np.random.default_rng(2), 30)
report = certify(tree)
print("random tree certified:", report.certified)
for c in report.certificates:
    print(f"  {c.name:16s} worst={c.worst:+.1e}  checked={c.checked}")

star = HeightedPoset(["v", "l1", "l2"], "v", {"v": 0, "l1": 2, "l2": 5}, parent={"l1": "v", "l2": "v"})
print("star d(l1, l2) =", tree_distance(star, "l1", "l2"))

diamond = HeightedPoset(
    list("vabcd"),
    "v",
    {"v": 0, "a": 1, "b": 1, "c": 2, "d": 2},
    relation=[("v", "a"), ("v", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")],
)
for v in validate(diamond).violations:
    print(f"diamond: condition {v.condition}: {v.message}; witness {v.witness}")
