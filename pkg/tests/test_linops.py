"""Adjoint, norm, stacking, and file-format checks for the linear maps."""

import numpy as np
import pytest

from fastalm.errors import DimensionError
from fastalm.linops import (
    DenseMatrix,
    Identity,
    LeftMultiply,
    Negation,
    RowSum,
    Scale,
    VStack,
    Zero,
    load_matrix,
    op_norm_sq,
    save_matrix,
)


def densify(op):
    """Materialize a LinearMap as a dense matrix acting on raveled inputs."""
    rows = op.output_shape[0] * op.output_shape[1]
    cols = op.input_shape[0] * op.input_shape[1]
    mat = np.zeros((rows, cols))
    for j in range(cols):
        e = np.zeros(cols)
        e[j] = 1.0
        mat[:, j] = op.apply(e.reshape(op.input_shape)).ravel()
    return mat


def sample_maps(rng):
    """A representative map of every kind, on small random shapes."""
    a = rng.standard_normal((4, 6))
    return [
        LeftMultiply(a, 3),
        DenseMatrix(rng.standard_normal((5, 2))),
        RowSum((7, 3)),
        Identity((4, 2)),
        Scale(-2.5, (3, 3)),
        Negation((2, 5)),
        Zero((3, 2), (4, 1)),
        VStack([Identity((4, 2)), RowSum((4, 2)), LeftMultiply(a[:, :4], 2)]),
    ]


def test_adjoint_identity_all_kinds():
    rng = np.random.default_rng(0)
    for op in sample_maps(rng):
        for _ in range(100):
            x = rng.standard_normal(op.input_shape)
            y = rng.standard_normal(op.output_shape)
            lhs = float(np.sum(op.apply(x) * y))
            rhs = float(np.sum(x * op.adjoint(y)))
            scale = max(1.0, abs(lhs), abs(rhs))
            assert abs(lhs - rhs) <= 1e-10 * scale


def test_norm_sq_matches_dense_eigensolve():
    rng = np.random.default_rng(1)
    for op in sample_maps(rng):
        dense = densify(op)
        expected = 0.0 if dense.size == 0 else float(np.linalg.norm(dense, 2)) ** 2
        got = op.norm_sq()
        assert got == pytest.approx(expected, rel=1e-8, abs=1e-12)


def test_norm_sq_is_cached():
    op = DenseMatrix(np.diag([1.0, 2.0, 3.0]))
    first = op.norm_sq()
    assert first == pytest.approx(9.0, rel=1e-10)
    op._norm_sq = 123.0  # cache poke: second call must not recompute
    assert op.norm_sq() == 123.0


def test_norm_sq_known_values():
    assert Identity((6, 2)).norm_sq() == pytest.approx(1.0, rel=1e-10)
    assert RowSum((50, 1)).norm_sq() == pytest.approx(50.0, rel=1e-10)
    assert Scale(3.0, (4, 4)).norm_sq() == pytest.approx(9.0, rel=1e-10)
    assert Negation((2, 2)).norm_sq() == pytest.approx(1.0, rel=1e-10)
    assert Zero((3, 2), (2, 2)).norm_sq() == 0.0


def test_norm_sq_scaling_law():
    rng = np.random.default_rng(2)
    mat = rng.standard_normal((5, 7))
    base = DenseMatrix(mat).norm_sq()
    scaled = DenseMatrix(2.5 * mat).norm_sq()
    assert scaled == pytest.approx(2.5**2 * base, rel=1e-8)


def test_row_sum_example():
    op = RowSum((2, 2))
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(op.apply(x), [[4.0, 6.0]])
    np.testing.assert_array_equal(
        op.adjoint(np.array([[1.0, -2.0]])), [[1.0, -2.0], [1.0, -2.0]]
    )


def test_vstack_example():
    op = VStack([Identity((2, 2)), RowSum((2, 2))])
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(
        op.apply(x), [[1.0, 2.0], [3.0, 4.0], [4.0, 6.0]]
    )
    y = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, -1.0]])
    # adjoint = I^T y_top + RowSum^T y_bottom
    np.testing.assert_array_equal(
        op.adjoint(y), [[3.0, -1.0], [2.0, 0.0]]
    )


def test_vstack_rejects_mismatched_components():
    with pytest.raises(DimensionError):
        VStack([Identity((2, 2)), Identity((3, 2))])
    with pytest.raises(DimensionError):
        VStack([Identity((2, 2)), Zero((2, 2), (1, 3))])
    with pytest.raises(ValueError):
        VStack([])


def test_shape_guards():
    op = LeftMultiply(np.ones((3, 4)), 2)
    with pytest.raises(DimensionError):
        op.apply(np.ones((4, 3)))
    with pytest.raises(DimensionError):
        op.adjoint(np.ones((4, 2)))
    with pytest.raises(DimensionError):
        op.apply(np.ones(4))  # 1-D input


def test_dimension_error_is_value_error():
    assert issubclass(DimensionError, ValueError)


def test_op_norm_sq_zero_map():
    assert op_norm_sq(Zero((4, 2), (3, 1))) == 0.0


def test_op_norm_sq_deterministic():
    rng = np.random.default_rng(3)
    mat = rng.standard_normal((8, 8))
    a = op_norm_sq(LeftMultiply(mat, 1))
    b = op_norm_sq(LeftMultiply(mat, 1))
    assert a == b


def test_matrix_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(4)
    mat = rng.standard_normal((6, 3))
    path = tmp_path / "mat.mtx"
    save_matrix(path, mat)
    back = load_matrix(path)
    np.testing.assert_array_equal(back, mat)
    assert back.dtype == np.float64
    assert back.flags["C_CONTIGUOUS"]


def test_matrix_file_bytes_stable(tmp_path):
    rng = np.random.default_rng(5)
    mat = rng.standard_normal((4, 4))
    p1 = tmp_path / "a.mtx"
    p2 = tmp_path / "b.mtx"
    save_matrix(p1, mat)
    save_matrix(p2, mat)
    assert p1.read_bytes() == p2.read_bytes()
