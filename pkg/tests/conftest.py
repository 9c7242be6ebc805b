import itertools
import math
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sigalg import PiecewiseLinearPath, TruncatedTensor

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def lpath():
    """e1 then e2."""
    return PiecewiseLinearPath([0.0, 1.0, 2.0], [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])


def random_tensor(rng, dim, level, scalar=None, scale=1.0):
    blocks = [rng.normal(size=dim**k) * scale for k in range(level + 1)]
    if scalar is not None:
        blocks[0] = np.array([scalar])
    return TruncatedTensor(blocks, dim)


def words(dim, k):
    return list(itertools.product(range(1, dim + 1), repeat=k))


def as_dict(t):
    """Word -> coefficient dictionary, an independent representation for oracles."""
    out = {}
    for k in range(t.level + 1):
        for w in words(t.dim, k):
            off = 0
            for c in w:
                off = off * t.dim + (c - 1)
            out[w] = float(t.levels[k][off])
    return out


def from_dict(coeffs, dim, level):
    blocks = []
    for k in range(level + 1):
        block = np.zeros(dim**k)
        for i, w in enumerate(words(dim, k)):
            block[i] = coeffs.get(w, 0.0)
        blocks.append(block)
    return TruncatedTensor(blocks, dim)


def dict_mul(a, b, level):
    """Concatenation product over word dictionaries."""
    out = {}
    for u, x in a.items():
        for v, y in b.items():
            if len(u) + len(v) <= level:
                out[u + v] = out.get(u + v, 0.0) + x * y
    return out


def segment_signature_dict(a, level):
    """Closed form <exp(a), w> = prod a_{w_i} / |w|!."""
    d = len(a)
    return {w: math.prod(a[c - 1] for c in w) / math.factorial(len(w)) for k in range(level + 1) for w in words(d, k)}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
