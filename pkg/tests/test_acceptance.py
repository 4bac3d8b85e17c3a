"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
lines as they execute.
"""

import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from lapdmd import (
    AffineMap,
    KernelDmd,
    McIntegrator,
    closability_probe_grbf,
    closability_probe_hl,
    faithful_difference,
    frobenius_gap_identity,
    kernel_series_check,
    laplacian_kernel_norm,
    mc_inner_product,
    orthonormal_basis_1d,
    pi_statistic,
)
from lapdmd.config import ExperimentConfig, read_config
from lapdmd.experiment import run_experiment

MC_SEED = 0  # documented seed for every Monte Carlo criterion


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[criterion {num:02d}] FAIL  {description}")
        raise
    print(f"[criterion {num:02d}] PASS  {description}")


@pytest.fixture(scope="module")
def burgers_result(tmp_path_factory):
    cfg = ExperimentConfig.from_mapping(read_config("burgers_exp1"))
    cfg.out_dir = tmp_path_factory.mktemp("burgers_exp1")
    start = time.perf_counter()
    result = run_experiment(cfg)
    result["elapsed"] = time.perf_counter() - start
    return result


def test_criterion_1_burgers_kernel_ordering(burgers_result):
    with criterion(1, "Burgers 256x101 -> 40: Laplacian mean EWE beats GRBF at snapshot 39"):
        reports = burgers_result["reports"]
        lap = reports["laplacian"][39]
        grbf = reports["grbf"][39]
        assert lap.mean < grbf.mean
        assert burgers_result["elapsed"] < 60.0
        # snapshot 39 artifacts in the four panel formats
        out = burgers_result["out_dir"]
        for name in ("actual.pgm", "sampled.pgm",
                     "recon_laplacian.pgm", "recon_grbf.pgm"):
            assert (out / name).exists()
        assert (out / "snapshot_039_actual.csv").exists()


def test_criterion_2_linear_spectral_oracle():
    with criterion(2, "spectrum of fitted diag(0.9, 0.5) system contains both rates to 1e-3"):
        start = time.perf_counter()
        rng = np.random.default_rng(0)  # documented snapshot-sampling seed
        X = rng.uniform(-1.0, 1.0, size=(2, 50))
        Y = np.diag([0.9, 0.5]) @ X
        est = KernelDmd(kernel="laplacian", sigma=1.0).fit(X, Y)
        lam = est.eigenvalues_
        assert np.min(np.abs(lam - 0.9)) < 1e-3
        assert np.min(np.abs(lam - 0.5)) < 1e-3
        assert time.perf_counter() - start < 5.0


def test_criterion_3_faithful_partial_sums():
    with criterion(3, "faithful mode difference vanishes for matching affine dynamics"):
        start = time.perf_counter()
        a = np.diag([0.8, 0.4])  # ||a||_Frob = sqrt(0.8) < 1
        x0 = np.array([1.0, 1.0])
        traj = np.stack([np.linalg.matrix_power(a, k) @ x0 for k in range(50)], axis=1)
        est = KernelDmd(kernel="laplacian", sigma=1.0).fit(traj)
        phi = AffineMap(a.astype(complex), np.zeros(2))
        report0 = faithful_difference(est, phi, 0, est.rank_)
        assert np.all(report0.partial_sums == 0)
        for m in (1, 2, 3):
            report = faithful_difference(est, phi, m, est.rank_)
            assert np.linalg.norm(report.converged_value) < 1e-3 * np.linalg.norm(x0)
        assert time.perf_counter() - start < 5.0


def test_criterion_4_orthonormality():
    with criterion(4, "monomial basis orthonormal to 0.05 at 1e6 samples, sigma in {0.5,1,2}"):
        start = time.perf_counter()
        for sigma in (0.5, 1.0, 2.0):
            ctx = McIntegrator(n_samples=1_000_000, seed=MC_SEED, sigma=sigma, dim=1)
            basis = [orthonormal_basis_1d(n, sigma) for n in range(5)]
            for i in range(5):
                for j in range(i, 5):
                    est = mc_inner_product(basis[i], basis[j], ctx)
                    target = 1.0 if i == j else 0.0
                    assert abs(est.value - target) < 0.05
        assert time.perf_counter() - start < 30.0


def test_criterion_5_kernel_norm_bound():
    with criterion(5, "kernel section norm within the exponential bound; 1/3 at the origin"):
        ctx = McIntegrator(n_samples=1_000_000, seed=MC_SEED, sigma=1.0, dim=1)
        origin = laplacian_kernel_norm([0.0], ctx)
        assert abs(origin.real - 1.0 / 3.0) < 0.01
        for x in (0.0, 0.5, 1.0, 2.0):
            est = laplacian_kernel_norm([x], ctx)
            bound = (1.0 / 3.0) * math.exp(abs(x))
            assert est.real <= bound + 3.0 * est.stderr


def test_criterion_6_pi_decay():
    with criterion(6, "compactness statistic strictly decreasing, < 1e-4 at z = 80"):
        phi = AffineMap(np.array([[0.5]]), np.array([0.0]))
        values = [pi_statistic([z], phi, 1.0) for z in (10.0, 20.0, 40.0, 80.0)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-4


def test_criterion_7_closability_contrast():
    with criterion(7, "affine operator bounded on H_L, divergent on the GRBF space"):
        ctx = McIntegrator(n_samples=200_000, seed=MC_SEED, sigma=1.0, dim=1)
        phi = AffineMap(np.array([[0.5]]), np.array([0.0]))
        hl = closability_probe_hl(phi, 10, ctx)
        assert hl.verdict == "bounded"
        for seq in hl.ratios.values():
            assert max(seq) <= seq[0] * 1.1
        grbf = closability_probe_grbf(phi, (2.0, 4.0, 8.0), ctx)
        assert grbf.verdict == "divergent"
        assert grbf.final_ratio > 1.5


def test_criterion_8_frobenius_identity():
    with criterion(8, "||I - a||_F^2 = D + ||a||_F^2 - 2 Re Tr(a) to 1e-12"):
        rng = np.random.default_rng(17)
        for d in (2, 5, 10):
            for _ in range(100):
                a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                direct = float(np.linalg.norm(np.eye(d) - a) ** 2)
                assert abs(direct - frobenius_gap_identity(a)) < 1e-12 * max(1.0, direct)


def test_criterion_9_kernel_series():
    with criterion(9, "orthonormal series rebuilds the kernel; residual decays in terms"):
        for sigma in (0.5, 1.0, 2.0):
            assert kernel_series_check(sigma, sigma, sigma, 12) < 1e-10
        residuals = [kernel_series_check(2.0, 2.0, 1.0, n) for n in (4, 6, 8, 10, 12)]
        assert all(b < a for a, b in zip(residuals, residuals[1:]))


def test_criterion_10_run_determinism(tmp_path):
    with criterion(10, "byte-identical artifacts across runs and LAPDMD_THREADS"):
        from lapdmd.cli import main

        def run_into(directory, threads):
            env_before = os.environ.get("LAPDMD_THREADS")
            os.environ["LAPDMD_THREADS"] = threads
            try:
                assert main(["run", "--config", "burgers_small",
                             "--out", str(directory)]) == 0
            finally:
                if env_before is None:
                    os.environ.pop("LAPDMD_THREADS", None)
                else:
                    os.environ["LAPDMD_THREADS"] = env_before

        dirs = [tmp_path / "a", tmp_path / "b", tmp_path / "c"]
        for directory, threads in zip(dirs, ("1", "1", "4")):
            run_into(directory, threads)
        names = sorted(p.name for p in dirs[0].iterdir())
        assert any(n.endswith(".csv") for n in names)
        assert any(n.endswith(".pgm") for n in names)
        for other in dirs[1:]:
            assert sorted(p.name for p in other.iterdir()) == names
            for name in names:
                assert (dirs[0] / name).read_bytes() == (other / name).read_bytes()
