import math

import numpy as np
import pytest

from smoothlab.errors import InvalidInputError
from smoothlab.numkit import (
    condition_number,
    distance_to_span,
    height,
    inverse_norm,
    operator_norm,
)


def power_iteration_norm(m, iters=2000):
    """Independent oracle: largest singular value via power iteration on M^T M."""
    m = np.asarray(m, dtype=float)
    v = np.ones(m.shape[1]) / math.sqrt(m.shape[1])
    for _ in range(iters):
        w = m.T @ (m @ v)
        v = w / np.linalg.norm(w)
    return math.sqrt(v @ (m.T @ (m @ v)))


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert operator_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0)

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(42)
        m = rng.standard_normal((4, 4))
        assert operator_norm(m) == pytest.approx(power_iteration_norm(m), rel=1e-10)

    def test_zero_matrix(self):
        assert operator_norm(np.zeros((2, 3))) == 0.0

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            operator_norm(np.array([[1.0, np.inf], [0.0, 1.0]]))


class TestInverseNorm:
    def test_identity(self):
        for d in (1, 2, 5):
            assert inverse_norm(np.eye(d)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert inverse_norm(np.diag([2.0, 0.5])) == pytest.approx(2.0)

    def test_singular_gives_inf(self):
        assert inverse_norm(np.ones((2, 2))) == math.inf

    def test_rejects_nonsquare(self):
        with pytest.raises(InvalidInputError):
            inverse_norm(np.ones((2, 3)))


class TestConditionNumber:
    def test_identity(self):
        assert condition_number(np.eye(4)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert condition_number(np.diag([4.0, 1.0])) == pytest.approx(4.0)

    def test_matches_eig_oracle(self):
        # independent oracle: eigendecomposition of M^T M
        rng = np.random.default_rng(7)
        m = rng.standard_normal((5, 5))
        eigs = np.linalg.eigvalsh(m.T @ m)
        expected = math.sqrt(eigs[-1] / eigs[0])
        assert condition_number(m) == pytest.approx(expected, rel=1e-9)

    def test_at_least_one(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = rng.standard_normal((4, 4))
            assert condition_number(m) >= 1.0

    def test_singular(self):
        assert condition_number(np.ones((3, 3))) == math.inf


class TestDistanceToSpan:
    def test_orthogonal(self):
        assert distance_to_span([0.0, 1.0], [[1.0, 0.0]]) == pytest.approx(1.0)

    def test_membership(self):
        assert distance_to_span([1.0, 0.0], [[1.0, 0.0]]) == pytest.approx(0.0, abs=1e-12)

    def test_hand_projection(self):
        # project (1,0) onto span{(1,1)}: residual norm 1/sqrt(2)
        assert distance_to_span([1.0, 0.0], [[1.0, 1.0]]) == pytest.approx(1 / math.sqrt(2))

    def test_empty_basis(self):
        assert distance_to_span([3.0, 4.0], []) == pytest.approx(5.0)

    def test_dependent_basis_vectors(self):
        # duplicated basis vector must not shrink the distance
        d1 = distance_to_span([0.0, 1.0, 0.0], [[1.0, 0.0, 0.0]])
        d2 = distance_to_span([0.0, 1.0, 0.0], [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        assert d1 == pytest.approx(d2)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            distance_to_span([1.0, 0.0], [[1.0, 0.0, 0.0]])

    def test_zero_exactly_on_membership_cases(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            basis = [rng.standard_normal(4) for _ in range(2)]
            v = 0.3 * basis[0] - 1.7 * basis[1]
            assert distance_to_span(v, basis) < 1e-10


class TestHeight:
    def test_orthonormal(self):
        assert height(list(np.eye(3))) == pytest.approx(1.0)

    def test_hand_case(self):
        # min of dist((1,0), span{(1,1)}) = 1/sqrt(2) and dist((1,1), span{(1,0)}) = 1
        assert height([[1.0, 0.0], [1.0, 1.0]]) == pytest.approx(1 / math.sqrt(2))

    def test_collinear(self):
        assert height([[1.0, 0.0], [2.0, 0.0]]) == pytest.approx(0.0, abs=1e-12)

    def test_wrong_count(self):
        with pytest.raises(InvalidInputError):
            height([[1.0, 0.0]])


class TestInvariants:
    def test_inverse_norm_height_inequality(self):
        # inverse_norm <= sqrt(d)/height on random matrices
        rng = np.random.default_rng(5)
        for _ in range(200):
            d = int(rng.integers(2, 8))
            m = rng.standard_normal((d, d))
            cols = list(m.T)
            h = height(cols)
            assert inverse_norm(m) <= math.sqrt(d) / h * (1 + 1e-8)

    def test_scale_covariance(self):
        rng = np.random.default_rng(9)
        m = rng.standard_normal((4, 4))
        for c in (2.0, -0.5, 1e3):
            assert operator_norm(c * m) == pytest.approx(abs(c) * operator_norm(m), rel=1e-12)
            assert inverse_norm(c * m) == pytest.approx(inverse_norm(m) / abs(c), rel=1e-12)

    def test_column_permutation_invariance(self):
        rng = np.random.default_rng(13)
        m = rng.standard_normal((5, 5))
        perm = rng.permutation(5)
        mp = m[:, perm]
        assert operator_norm(mp) == pytest.approx(operator_norm(m), rel=1e-12)
        assert inverse_norm(mp) == pytest.approx(inverse_norm(m), rel=1e-12)
        assert height(list(mp.T)) == pytest.approx(height(list(m.T)), rel=1e-9)
