"""Vector-space behavior of block-structured points."""

import numpy as np
import pytest

from fastalm.blocks import BlockPoint
from fastalm.errors import DimensionError


def random_point(rng, shapes=((3, 2), (1, 4))):
    return BlockPoint([rng.standard_normal(s) for s in shapes])


def concat(p):
    return np.concatenate([b.ravel() for b in p.blocks])


def test_construction_and_views():
    p = BlockPoint([np.ones((2, 2)), np.zeros((1, 3))])
    assert len(p) == 2
    assert p.shapes == ((2, 2), (1, 3))
    np.testing.assert_array_equal(p[0], np.ones((2, 2)))
    assert [b.shape for b in p] == [(2, 2), (1, 3)]
    assert all(b.dtype == np.float64 for b in p.blocks)


def test_zeros():
    p = BlockPoint.zeros([(2, 3), (4, 1)])
    assert p.shapes == ((2, 3), (4, 1))
    assert p.norm() == 0.0


def test_rejects_non_matrix_blocks():
    with pytest.raises(DimensionError):
        BlockPoint([np.ones(3)])
    with pytest.raises(DimensionError):
        BlockPoint([np.ones((2, 2, 2))])


def test_arithmetic_matches_concatenated_vectors():
    rng = np.random.default_rng(20)
    for _ in range(25):
        x = random_point(rng)
        z = random_point(rng)
        theta = float(rng.uniform(0, 1))
        y = (1.0 - theta) * x + theta * z
        np.testing.assert_allclose(
            concat(y), (1.0 - theta) * concat(x) + theta * concat(z), atol=1e-15
        )
        np.testing.assert_allclose(concat(x - z), concat(x) - concat(z))
        assert x.norm() == pytest.approx(float(np.linalg.norm(concat(x))), rel=1e-12)
        assert x.dot(z) == pytest.approx(float(concat(x) @ concat(z)), rel=1e-10, abs=1e-12)
        assert x.dist(z) == pytest.approx(
            float(np.linalg.norm(concat(x) - concat(z))), rel=1e-12
        )


def test_max_block_norm():
    p = BlockPoint([np.array([[3.0, 4.0]]), np.array([[1.0]])])
    assert p.max_block_norm() == pytest.approx(5.0)


def test_is_finite():
    assert BlockPoint([np.ones((2, 2))]).is_finite()
    assert not BlockPoint([np.array([[np.nan, 1.0]])]).is_finite()
    assert not BlockPoint([np.ones((1, 1)), np.array([[np.inf]])]).is_finite()


def test_copy_is_independent():
    p = BlockPoint([np.ones((2, 2))])
    q = p.copy()
    q.blocks[0][0, 0] = 99.0
    assert p[0][0, 0] == 1.0


def test_conformity_guards():
    a = BlockPoint([np.ones((2, 2))])
    b = BlockPoint([np.ones((2, 3))])
    with pytest.raises(DimensionError):
        _ = a + b
    with pytest.raises(DimensionError):
        a.dot([np.ones((2, 2))])
    with pytest.raises(DimensionError):
        _ = a - BlockPoint([np.ones((2, 2)), np.ones((1, 1))])


def test_scalar_multiplication_both_sides():
    p = BlockPoint([np.array([[1.0, -2.0]])])
    np.testing.assert_array_equal((2 * p)[0], [[2.0, -4.0]])
    np.testing.assert_array_equal((p * 2)[0], [[2.0, -4.0]])
