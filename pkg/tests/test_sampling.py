import numpy as np
import pytest

from lapdmd import (
    DataMatrix,
    SamplingPlan,
    ValidationError,
    build_pairs,
    invert_permutation,
    reshape_series,
    shuffle_columns,
    take_partial,
)
from lapdmd.sampling import apply_permutation


def random_matrix(n, m, seed=0, dt=0.5):
    return DataMatrix(np.random.default_rng(seed).standard_normal((n, m)), dt=dt)


class TestShuffle:
    def test_same_seed_same_permutation(self):
        m = random_matrix(4, 101)
        _, p1 = shuffle_columns(m, 7)
        _, p2 = shuffle_columns(m, 7)
        assert np.array_equal(p1, p2)

    def test_different_seeds_differ(self):
        m = random_matrix(4, 101)
        _, p1 = shuffle_columns(m, 7)
        _, p2 = shuffle_columns(m, 8)
        assert not np.array_equal(p1, p2)

    def test_entry_multiset_preserved(self):
        m = random_matrix(5, 20, seed=1)
        out, _ = shuffle_columns(m, 3)
        assert np.array_equal(np.sort(out.values, axis=None), np.sort(m.values, axis=None))

    def test_permutation_record_is_consistent(self):
        m = random_matrix(3, 12, seed=2)
        out, perm = shuffle_columns(m, 5)
        assert np.array_equal(out.values, m.values[:, perm])

    def test_inverse_restores_exactly(self):
        m = random_matrix(3, 17, seed=3)
        out, perm = shuffle_columns(m, 9)
        restored = apply_permutation(out, invert_permutation(perm))
        assert np.array_equal(restored.values, m.values)

    def test_dt_carried_through(self):
        m = random_matrix(2, 6, dt=0.25)
        out, _ = shuffle_columns(m, 1)
        assert out.dt == 0.25


class TestTakePartial:
    def test_identity_when_keeping_all(self):
        m = random_matrix(3, 10)
        out = take_partial(m, 10)
        assert np.array_equal(out.values, m.values)

    def test_bit_exact_submatrix(self):
        m = random_matrix(6, 30, seed=4)
        out = take_partial(m, 12)
        assert np.array_equal(out.values, m.values[:, :12])

    def test_table_shapes(self):
        burgers = random_matrix(256, 101)
        assert take_partial(burgers, 40).shape == (256, 40)
        duffing = random_matrix(2, 50_000, seed=5)
        assert take_partial(duffing, 35_000).shape == (2, 35_000)

    def test_out_of_range(self):
        m = random_matrix(3, 10)
        with pytest.raises(ValidationError):
            take_partial(m, 11)
        with pytest.raises(ValidationError):
            take_partial(m, 0)


class TestReshape:
    def test_identity_reshape(self):
        m = random_matrix(4, 6, seed=6)
        out = reshape_series(m, 4, 6)
        assert np.array_equal(out.values, m.values)

    def test_lorenz_shape(self):
        m = random_matrix(3, 200_000, seed=7)
        out = reshape_series(m, 20_000, 30)
        assert out.shape == (20_000, 30)
        assert out.values.size == 600_000

    def test_rossler_shape_with_truncation(self):
        m = random_matrix(3, 64_000, seed=8)
        partial = take_partial(m, 60_000)
        out = reshape_series(partial, 10_000, 18)
        assert out.shape == (10_000, 18)

    def test_column_major_order_and_multiset(self):
        m = DataMatrix(np.array([[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]]))
        out = reshape_series(m, 3, 2)
        assert np.array_equal(out.values, [[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]])

    def test_truncation_keeps_prefix_elements(self):
        m = random_matrix(4, 8, seed=9)
        out = reshape_series(m, 5, 3)
        flat = m.values.reshape(-1, order="F")[:15]
        assert np.array_equal(out.values.reshape(-1, order="F"), flat)

    def test_target_too_large(self):
        m = random_matrix(2, 4)
        with pytest.raises(ValidationError):
            reshape_series(m, 3, 3)


class TestBuildPairs:
    def test_two_columns(self):
        m = DataMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
        X, Y = build_pairs(m)
        assert np.array_equal(X, [[1.0], [3.0]])
        assert np.array_equal(Y, [[2.0], [4.0]])

    def test_counts(self):
        m = random_matrix(3, 11, seed=10)
        X, Y = build_pairs(m)
        assert X.shape == (3, 10) and Y.shape == (3, 10)

    def test_pairs_follow_shuffled_adjacency(self):
        m = random_matrix(2, 9, seed=11)
        out, perm = shuffle_columns(m, 13)
        X, Y = build_pairs(out)
        for j in range(8):
            assert np.array_equal(X[:, j], m.values[:, perm[j]])
            assert np.array_equal(Y[:, j], m.values[:, perm[j + 1]])


class TestPlan:
    def test_full_pipeline(self):
        m = random_matrix(4, 40, seed=12)
        plan = SamplingPlan(seed=2, n_keep=20, reshape=(8, 10))
        out, perm = plan.apply(m)
        assert out.shape == (8, 10)
        assert len(perm) == 40

    def test_validation(self):
        with pytest.raises(ValidationError):
            SamplingPlan(seed=-1)
        with pytest.raises(ValidationError):
            SamplingPlan(seed=0, n_keep=0)
