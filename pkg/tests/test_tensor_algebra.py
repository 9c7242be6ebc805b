import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import as_dict, dict_mul, from_dict, random_tensor
from sigalg import (
    CapacityError,
    DomainError,
    GroupElement,
    PiecewiseLinearPath,
    ShapeError,
    TruncatedTensor,
    antipode,
    exp,
    group_distance,
    homogeneous_norm,
    inverse,
    level_norm,
    log,
    mul,
    signature,
    unit,
)
from sigalg.paths import random_path
from sigalg.tensor_algebra import MAX_COEFFICIENTS, check_capacity


def T(*blocks, dim=None):
    return TruncatedTensor(blocks, dim)


# -- construction -----------------------------------------------------------


def test_blocks_are_read_only():
    t = T([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        t.levels[1][0] = 5.0


def test_block_size_checked():
    with pytest.raises(ShapeError):
        TruncatedTensor([[1.0], [1.0, 2.0], [1.0, 2.0, 3.0]])


def test_capacity_guard():
    check_capacity(10, 7)
    with pytest.raises(CapacityError):
        check_capacity(10, 8)
    with pytest.raises(CapacityError):
        TruncatedTensor.zero(4, 12)
    assert 10**7 == MAX_COEFFICIENTS


def test_level_zero_is_scalar_field():
    a, b = TruncatedTensor([[3.0]], dim=2), TruncatedTensor([[4.0]], dim=2)
    assert mul(a, b).scalar == 12.0
    assert homogeneous_norm(a) == 0.0
    assert log(TruncatedTensor([[1.0]], dim=2)).scalar == 0.0


def test_json_roundtrip(rng):
    t = random_tensor(rng, 3, 3)
    back = TruncatedTensor.from_json(t.to_json())
    assert back.max_abs_diff(t) == 0.0
    with pytest.raises(ShapeError):
        TruncatedTensor.from_json({"dim": 2, "level": 2, "levels": [[1.0], [0.0, 0.0]]})


def test_group_element_needs_unit_scalar():
    with pytest.raises(DomainError):
        GroupElement([[2.0], [0.0]], 1)


def test_certify_rejects_non_group_like():
    bad = T([1.0], [0.0, 0.0], [0.0, 1.0, 0.0, 0.0])
    with pytest.raises(DomainError, match="not group-like"):
        GroupElement.certify(bad)
    g = GroupElement.certify(exp(T([0.0], [1.0, -2.0], [0.0, 0.5, -0.5, 0.0])))
    assert g.certified


# -- mul --------------------------------------------------------------------


def test_mul_unit_is_identity(rng):
    a = random_tensor(rng, 2, 4)
    assert mul(unit(2, 4), a).max_abs_diff(a) == 0.0
    assert mul(a, unit(2, 4)).max_abs_diff(a) == 0.0


def test_mul_scalar_levels_hand_expanded():
    out = mul(T([1.0], [2.0], [3.0]), T([1.0], [5.0], [7.0]))
    np.testing.assert_array_equal(out.flat(), [1.0, 7.0, 20.0])


def test_mul_level_two_block(rng):
    a, b = rng.normal(size=2), rng.normal(size=2)
    A, B = rng.normal(size=4), rng.normal(size=4)
    out = mul(T([1.0], a, A), T([1.0], b, B))
    np.testing.assert_allclose(out.levels[2], A + B + np.outer(a, b).ravel(), rtol=0, atol=1e-15)


@pytest.mark.parametrize("dim,level", [(1, 5), (2, 4), (3, 3), (4, 2)])
def test_mul_matches_word_convolution(rng, dim, level):
    a, b = random_tensor(rng, dim, level), random_tensor(rng, dim, level)
    expected = from_dict(dict_mul(as_dict(a), as_dict(b), level), dim, level)
    assert mul(a, b).max_abs_diff(expected) < 1e-12


def test_mul_shape_mismatch():
    with pytest.raises(ShapeError):
        mul(unit(2, 3), unit(2, 2))
    with pytest.raises(ShapeError):
        mul(unit(2, 3), unit(3, 3))


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2**31))
def test_mul_associative(dim, level, seed):
    if dim**level > 5000:
        level = 3
    rng = np.random.default_rng(seed)
    a, b, c = (random_tensor(rng, dim, level) for _ in range(3))
    lhs, rhs = mul(mul(a, b), c), mul(a, mul(b, c))
    scale = max(np.max(np.abs(blk)) for blk in rhs.levels)
    assert lhs.max_abs_diff(rhs) <= 1e-12 * max(1.0, scale)


def test_matmul_operator(rng):
    a, b = random_tensor(rng, 2, 3), random_tensor(rng, 2, 3)
    assert (a @ b).max_abs_diff(mul(a, b)) == 0.0
    assert ((a + b) - b).max_abs_diff(a) < 1e-15
    assert (2 * a).max_abs_diff(a + a) == 0.0


# -- inverse ----------------------------------------------------------------


def test_inverse_of_unit():
    assert inverse(unit(3, 4)).max_abs_diff(unit(3, 4)) == 0.0


def test_inverse_two_term_neumann(rng):
    a, A = rng.normal(size=2), rng.normal(size=4)
    inv = inverse(T([1.0], a, A))
    np.testing.assert_allclose(inv.levels[1], -a)
    np.testing.assert_allclose(inv.levels[2], -A + np.outer(a, a).ravel(), atol=1e-15)


def test_inverse_of_signature_seed_42():
    x = random_path(np.random.default_rng(42), 2, segments=3)
    g = signature(x, 4)
    assert mul(g, inverse(g)).max_abs_diff(unit(2, 4)) < 1e-12
    assert mul(inverse(g), g).max_abs_diff(unit(2, 4)) < 1e-12


def test_inverse_matches_explicit_neumann_series(rng):
    g = random_tensor(rng, 2, 4, scalar=1.0)
    h = as_dict(g)
    h[()] = 0.0
    total, power = {(): 1.0}, {(): 1.0}
    for j in range(1, 5):
        power = dict_mul(power, h, 4)
        for w, c in power.items():
            total[w] = total.get(w, 0.0) + (-1) ** j * c
    assert inverse(g).max_abs_diff(from_dict(total, 2, 4)) < 1e-12


def test_inverse_rejects_non_unit_scalar():
    with pytest.raises(DomainError, match="not invertible in the group"):
        inverse(T([2.0], [1.0]))


@given(st.integers(0, 2**31))
def test_inverse_antihomomorphism_and_involution(seed):
    rng = np.random.default_rng(seed)
    a, b = random_tensor(rng, 2, 4, scalar=1.0), random_tensor(rng, 2, 4, scalar=1.0)
    assert inverse(mul(a, b)).max_abs_diff(mul(inverse(b), inverse(a))) < 1e-10
    assert inverse(inverse(a)).max_abs_diff(a) < 1e-11


# -- exp / log --------------------------------------------------------------


def test_exp_examples():
    assert exp(TruncatedTensor.zero(2, 3)).max_abs_diff(unit(2, 3)) == 0.0
    np.testing.assert_allclose(exp(T([0.0], [2.0], [0.0])).flat(), [1.0, 2.0, 2.0])
    e = exp(T([0.0], [1.0, 0.0], [0.0] * 4))
    np.testing.assert_array_equal(e.levels[1], [1.0, 0.0])
    np.testing.assert_array_equal(e.levels[2], [0.5, 0.0, 0.0, 0.0])


def test_exp_rejects_scalar_part():
    with pytest.raises(DomainError):
        exp(T([1.0], [0.0]))


def test_log_examples(lpath):
    assert log(unit(2, 3)).max_abs_diff(TruncatedTensor.zero(2, 3)) == 0.0
    np.testing.assert_allclose(log(T([1.0], [2.0], [2.0])).flat(), [0.0, 2.0, 0.0], atol=1e-15)
    l = log(signature(lpath, 2))
    np.testing.assert_allclose(l.levels[1], [1.0, 1.0])
    np.testing.assert_allclose(l.levels[2], [0.0, 0.5, -0.5, 0.0], atol=1e-15)


def test_log_rejects_bad_scalar():
    with pytest.raises(DomainError):
        log(T([0.5], [1.0]))


def _random_lie(rng, dim, level, scale):
    """Sums of iterated brackets [[v1, v2], ...] of random vectors, scaled to max level norm ``scale``."""
    from sigalg.words import is_lie_element

    blocks = [np.zeros(1)] + [np.zeros(dim**k) for k in range(1, level + 1)]
    blocks[1] = rng.normal(size=dim)
    for k in range(2, level + 1):
        acc = np.zeros(dim**k)
        for _ in range(3):
            v = rng.normal(size=dim)
            for _ in range(k - 1):
                w = rng.normal(size=dim)
                v = np.outer(v, w).ravel() - np.outer(w, v).ravel()
            acc += v
        blocks[k] = acc
    l = TruncatedTensor(blocks, dim)
    norm = max(np.linalg.norm(b) for b in l.levels[1:])
    l = l * (scale / norm)
    assert is_lie_element(l)
    return l


@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**31))
def test_exp_log_roundtrip_on_lie_elements(dim, level, seed):
    from sigalg.words import is_group_like, is_lie_element

    rng = np.random.default_rng(seed)
    l = _random_lie(rng, dim, level, scale=1.0)
    g = exp(l)
    assert is_group_like(g)
    back = log(g)
    assert back.max_abs_diff(l) < 1e-10
    assert is_lie_element(back)
    assert exp(back).max_abs_diff(g) < 1e-10


def test_log_of_signature_is_lie(rng):
    from sigalg.words import is_lie_element

    g = signature(random_path(rng, 3, segments=4), 4)
    assert is_lie_element(log(g))


# -- antipode ---------------------------------------------------------------


def test_antipode_examples():
    assert antipode(unit(2, 2)).max_abs_diff(unit(2, 2)) == 0.0
    t = T([0.0], [1.0, 2.0], [0.0, 1.0, 0.0, 0.0])
    a = antipode(t)
    np.testing.assert_array_equal(a.levels[1], [-1.0, -2.0])
    np.testing.assert_array_equal(a.levels[2], [0.0, 0.0, 1.0, 0.0])


def test_antipode_matches_inverse_on_signature():
    x = random_path(np.random.default_rng(7), 3, segments=4)
    g = signature(x, 4)
    a, i = antipode(g), inverse(g)
    assert max(np.linalg.norm(a.levels[k] - i.levels[k]) for k in range(5)) < 1e-12


@given(st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**31))
def test_antipode_equals_inverse_levelwise(dim, level, seed):
    rng = np.random.default_rng(seed)
    g = signature(random_path(rng, dim), level)
    assert antipode(g).max_abs_diff(inverse(g)) < 1e-12
    assert antipode(antipode(g)).max_abs_diff(g) == 0.0


# -- norms ------------------------------------------------------------------


def test_level_norm_examples(rng):
    assert level_norm(unit(2, 2), 0) == 1.0
    assert level_norm(T([0.0], [3.0, 4.0]), 1) == 5.0
    with pytest.raises(ShapeError):
        level_norm(unit(2, 2), 3)
    a, b = rng.normal(size=2), rng.normal(size=4)
    assert abs(np.linalg.norm(np.outer(a, b)) - np.linalg.norm(a) * np.linalg.norm(b)) < 1e-14


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_permutation_invariance_on_elementary_tensors(dim, k, seed):
    rng = np.random.default_rng(seed)
    vs = [rng.normal(size=dim) for _ in range(k)]
    perm = rng.permutation(k)

    def elem(seq):
        out = np.ones(1)
        for v in seq:
            out = np.outer(out, v).ravel()
        return out

    a, b = elem(vs), elem([vs[i] for i in perm])
    assert abs(np.linalg.norm(a) - np.linalg.norm(b)) <= 1e-14 * max(1.0, np.linalg.norm(a))


def test_homogeneous_norm_examples():
    assert homogeneous_norm(unit(3, 4)) == 0.0
    assert homogeneous_norm(T([1.0], [2.0], [2.0])) == 2.0
    assert homogeneous_norm(T([1.0], [0.5], [4.0])) == 2.0


def test_norm_symmetry_on_signatures(rng):
    for _ in range(20):
        g = signature(random_path(rng, 3), 4)
        n = homogeneous_norm(g)
        assert abs(n - homogeneous_norm(inverse(g))) <= 1e-12 * n


def test_group_distance_examples(rng):
    g = signature(random_path(rng, 2), 4)
    assert group_distance(g, g) <= 1e-12
    h = signature(random_path(rng, 2), 4)
    assert abs(group_distance(g, h) - group_distance(h, g)) < 1e-12
    assert group_distance(T([1.0], [0.0]), T([1.0], [3.0])) == 3.0
    with pytest.raises(ShapeError):
        group_distance(unit(2, 2), unit(2, 3))


def test_homogeneous_norm_subadditive_on_group(rng):
    for _ in range(20):
        a = signature(random_path(rng, 2), 4)
        b = signature(random_path(rng, 2), 4)
        assert homogeneous_norm(mul(a, b)) <= 3 * (homogeneous_norm(a) + homogeneous_norm(b))


def test_signature_increment_one_segment():
    g = signature(PiecewiseLinearPath([0, 1], [[0.0, 0.0], [1.0, 2.0]]), 2)
    np.testing.assert_allclose(g.levels[2], [0.5, 1.0, 1.0, 2.0])
