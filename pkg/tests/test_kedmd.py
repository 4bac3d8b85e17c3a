import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lapdmd import (
    DataMatrix,
    GramRankError,
    KernelDmd,
    NumericalError,
    ValidationError,
    gram_matrix,
    load_model,
    save_model,
)


@pytest.fixture(scope="module")
def geometric_1d():
    """x_{k+1} = 0.9 x_k from x0 = 20, 30 snapshots."""
    x = 20.0 * 0.9 ** np.arange(30)
    return KernelDmd(kernel="laplacian", sigma=1.0).fit(x[None, :]), x


@pytest.fixture(scope="module")
def linear_2d():
    """50 sampled states of x -> diag(0.9, 0.5) x on [-1, 1]^2."""
    rng = np.random.default_rng(0)
    X = rng.uniform(-1.0, 1.0, size=(2, 50))
    Y = np.diag([0.9, 0.5]) @ X
    return KernelDmd(kernel="laplacian", sigma=1.0).fit(X, Y), X, Y


class TestEstimatorApi:
    def test_get_set_params_roundtrip(self):
        est = KernelDmd(kernel="grbf", sigma=0.7, rank_tol=1e-6)
        params = est.get_params()
        assert params["kernel"] == "grbf" and params["sigma"] == 0.7
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_fit_returns_self(self):
        x = np.linspace(1.0, 2.0, 10)[None, :]
        est = KernelDmd()
        assert est.fit(x) is est

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            KernelDmd().reconstruct(0)

    def test_accepts_data_matrix(self):
        m = DataMatrix(np.random.default_rng(1).standard_normal((3, 12)))
        est = KernelDmd().fit(m)
        assert est.n_space_ == 3
        assert est.training_states_.shape == (3, 11)

    def test_unknown_kernel_rejected(self):
        with pytest.raises(ValidationError):
            KernelDmd(kernel="cubic").fit(np.ones((1, 5)))


class TestFit:
    def test_leading_eigenvalue_geometric(self, geometric_1d):
        est, _ = geometric_1d
        lam = est.eigenvalues_
        leading = lam[np.argmax(np.abs(lam))]
        assert abs(leading - 0.9) < 1e-3

    def test_linear_2d_spectrum(self, linear_2d):
        est, _, _ = linear_2d
        lam = est.eigenvalues_
        assert np.min(np.abs(lam - 0.9)) < 1e-3
        assert np.min(np.abs(lam - 0.5)) < 1e-3

    def test_repeated_column_degenerate(self):
        X = np.tile([[1.0], [2.0]], (1, 8))
        with pytest.raises(GramRankError, match="rank zero"):
            KernelDmd().fit(X)

    def test_eigen_residual(self, linear_2d):
        est, _, _ = linear_2d
        for n in range(est.rank_):
            v = est.eigvec_coeffs_[:, n]
            res = np.linalg.norm(est.khat_ @ v - est.eigenvalues_[n] * v)
            assert res <= 1e-8 * np.linalg.norm(v)

    def test_pseudoinverse_route_equivalence(self):
        # at full retained rank the truncated operator is G^+ A expressed in
        # the scaled feature basis Q S^-1
        rng = np.random.default_rng(2)
        for m in (4, 6, 8):
            X = rng.uniform(-1, 1, (2, m))
            Y = rng.uniform(-1, 1, (2, m))
            est = KernelDmd(kernel="laplacian", rank_tol=1e-13).fit(X, Y)
            assert est.rank_ == m
            G = gram_matrix(X, est.kernel_spec_)
            from lapdmd import cross_gram

            A = cross_gram(Y, X, est.kernel_spec_)
            oracle = np.linalg.pinv(G) @ A
            s = est.singular_values_
            Q = est.feature_basis_
            reconstructed = Q @ ((1.0 / s)[:, None] * est.khat_ * s[None, :]) @ Q.T
            assert np.linalg.norm(reconstructed - oracle) <= 1e-8
            assert np.allclose(
                np.sort_complex(np.linalg.eigvals(oracle)),
                np.sort_complex(est.eigenvalues_),
                atol=1e-8,
            )

    def test_mode_residual_nonincreasing_in_rank(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(-1, 1, (2, 30))
        Y = np.diag([0.8, 0.6]) @ X
        residuals = []
        for rank in (5, 10, 20, 29):
            est = KernelDmd(kernel="laplacian", rank_tol=1e-13, max_rank=rank).fit(X, Y)
            pred = est.eigenfunctions_ @ est.modes_
            residuals.append(np.linalg.norm(pred - X.T))
        assert all(b <= a + 1e-12 for a, b in zip(residuals, residuals[1:]))

    def test_max_rank_cap(self, linear_2d):
        _, X, Y = linear_2d
        est = KernelDmd(kernel="laplacian", max_rank=7).fit(X, Y)
        assert est.rank_ == 7

    def test_sinh_kernel_is_exact_on_linear_dynamics(self):
        # the sinh kernel's feature space is spanned by monomials, so a
        # geometric sequence is represented exactly
        x = 2.0 * 0.9 ** np.arange(30)
        est = KernelDmd(kernel="hl_sinh", sigma=1.0).fit(x[None, :])
        assert np.min(np.abs(est.eigenvalues_ - 0.9)) < 1e-9
        rec = est.reconstruct(0)
        assert abs(rec.values[0] - 2.0) < 1e-10

    def test_eigenvalue_magnitude_guard_at_fit(self):
        # a GRBF fit on this shuffled pulse blows up past the 1e3 cap
        from lapdmd import burgers_solve, shuffle_columns, take_partial

        src = burgers_solve()
        shuffled, _ = shuffle_columns(src, 3)
        part = take_partial(shuffled, 40)
        with pytest.raises(NumericalError, match="1000"):
            KernelDmd(kernel="grbf", sigma=1.0).fit(part)

    def test_reconstruct_overflow_guard(self):
        est = KernelDmd().fit(np.linspace(0, 1, 8)[None, :])
        est.eigenvalues_ = np.array([2.0 + 0.0j])
        est.eigenfunctions_ = np.ones((7, 1), dtype=complex)
        est.modes_ = np.ones((1, 1), dtype=complex)
        with pytest.raises(NumericalError, match="overflow"):
            est.reconstruct(5000)


class TestReconstruct:
    def test_m0_matches_x0(self, geometric_1d):
        est, x = geometric_1d
        rec = est.reconstruct(0)
        assert np.linalg.norm(rec.values - x[0]) / abs(x[0]) < 1e-6

    def test_m5_geometric_oracle(self, geometric_1d):
        est, x = geometric_1d
        rec = est.reconstruct(5)
        assert abs(rec.values[0] - 0.9 ** 5 * x[0]) < 1e-3

    def test_m0_exact_least_squares_2d(self, linear_2d):
        est, X, _ = linear_2d
        rec = est.reconstruct(0)
        assert np.linalg.norm(rec.values - X[:, 0]) / np.linalg.norm(X[:, 0]) < 1e-6

    def test_realness_of_reconstruction(self, linear_2d):
        est, _, _ = linear_2d
        for m in range(11):
            rec = est.reconstruct(m)
            scale = max(np.linalg.norm(rec.values), 1e-30)
            assert rec.imag_norm / scale < 1e-6

    def test_predict_stacks_columns(self, geometric_1d):
        est, _ = geometric_1d
        out = est.predict([0, 1, 2])
        assert out.shape == (1, 3)
        assert np.array_equal(out[:, 1], est.reconstruct(1).values)

    def test_negative_index_rejected(self, geometric_1d):
        est, _ = geometric_1d
        with pytest.raises(ValidationError):
            est.reconstruct(-1)


class TestEigenfunctions:
    def test_consistency_at_training_points(self, linear_2d):
        est, X, _ = linear_2d
        for n in (0, 1, min(4, est.rank_ - 1)):
            for i in (0, 10, 25):
                val = est.eval_eigenfunction(n, X[:, i])
                assert abs(val - est.eigenfunctions_[i, n]) < 1e-8

    def test_eigen_equation_in_sample(self, geometric_1d):
        est, x = geometric_1d
        lam = est.eigenvalues_
        n = int(np.argmax(np.abs(lam)))
        for i in range(5, 15):
            zx = est.eval_eigenfunction(n, x[i:i + 1])
            zfx = est.eval_eigenfunction(n, x[i + 1:i + 2])
            assert abs(abs(zfx) - abs(lam[n]) * abs(zx)) <= 0.05 * abs(lam[n]) * abs(zx)

    def test_index_out_of_range(self, geometric_1d):
        est, _ = geometric_1d
        with pytest.raises(ValidationError):
            est.eval_eigenfunction(est.rank_, np.array([1.0]))


class TestDominantModes:
    def test_picks_eigenvalue_near_one(self):
        est = KernelDmd().fit(np.linspace(0, 1, 8)[None, :])
        est.eigenvalues_ = np.array([1.0 + 0.0j, 0.2 + 0.0j])
        assert est.dominant_modes(0.1) == [0]

    def test_empty_when_all_far(self):
        est = KernelDmd().fit(np.linspace(0, 1, 8)[None, :])
        est.eigenvalues_ = np.array([0.5 + 0.0j, -0.3 + 0.0j])
        assert est.dominant_modes(0.01) == []

    def test_sorted_by_magnitude_stable(self):
        est = KernelDmd().fit(np.linspace(0, 1, 8)[None, :])
        est.eigenvalues_ = np.array([1.0 + 0.0j, 0.98 + 0.3j, 1.0 - 0.0j])
        out = est.dominant_modes(0.05)
        mags = np.abs(est.eigenvalues_)[out]
        assert np.all(np.diff(mags) <= 0)
        assert out[0] == 1  # |0.98+0.3j| > 1, ties broken by index


class TestSerialization:
    def test_roundtrip_bitexact(self, tmp_path, linear_2d):
        est, X, _ = linear_2d
        path = tmp_path / "model.txt"
        save_model(est, path)
        loaded = load_model(path)
        assert loaded.rank_ == est.rank_
        assert np.array_equal(loaded.eigenvalues_, est.eigenvalues_)
        for m in (0, 3, 7):
            a, b = est.reconstruct(m), loaded.reconstruct(m)
            assert np.array_equal(a.values, b.values)
        x = np.array([0.3, -0.4])
        assert loaded.eval_eigenfunction(2, x) == est.eval_eigenfunction(2, x)

    def test_rejects_unknown_version(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("lapdmd-model-version=99\n")
        with pytest.raises(ValidationError, match="version"):
            load_model(path)

    def test_file_is_text_key_value_plus_blocks(self, tmp_path, geometric_1d):
        est, _ = geometric_1d
        path = tmp_path / "model.txt"
        save_model(est, path)
        text = path.read_text()
        assert text.startswith("lapdmd-model-version=1\n")
        assert "[eigenvalues complex" in text
        assert "[training_states real" in text
