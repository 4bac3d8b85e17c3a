"""Experiment orchestration: generate/load, sample, fit, reconstruct, report.

Artifacts per run (all deterministic given the config):

* ``actual.pgm`` / ``sampled.pgm``: the ground-truth-ordered and the
  shuffled ("irregular & sparse") data panels at the same shape.
* ``recon_<kernel>.pgm``: full-matrix reconstructions per kernel.
* ``snapshot_<m>_*.csv``: per-snapshot actual, reconstruction, and
  element-wise error columns per kernel.
* ``permutation.csv``: the recorded shuffle permutation.
* ``summary.txt``: machine-readable ``key=value`` report including which
  kernel achieved the lower mean element-wise error.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from . import dynamics, parallel
from .config import ExperimentConfig
from .data import DataMatrix
from .dataio import format_float, load_csv, save_csv, save_heatmap_pgm
from .errors import ValidationError
from .kedmd import KernelDmd, save_model
from .metrics import ewe
from .rkhs import (
    AffineMap,
    McIntegrator,
    closability_probe_grbf,
    closability_probe_hl,
    kernel_series_check,
    laplacian_kernel_norm,
    mc_inner_product,
    orthonormal_basis_1d,
    pi_statistic,
)
from .sampling import SamplingPlan, reshape_series, take_partial

_ODE_DEFAULT_X0 = {
    "lorenz63": [1.0, 1.0, 1.0],
    "rossler": [1.0, 1.0, 1.0],
    "duffing": list(dynamics.DUFFING_INITIAL_STATE),
}


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        exc.args = (f"[stage {name}] {exc}",)
        raise


def load_source(cfg: ExperimentConfig) -> DataMatrix:
    if cfg.source_kind == "csv":
        return load_csv(cfg.csv_path)
    if cfg.system == "burgers":
        return dynamics.burgers_solve(
            nu=cfg.burgers_nu, n_x=cfg.burgers_nx, n_t=cfg.burgers_nt
        )
    x0 = cfg.ode_x0 or _ODE_DEFAULT_X0.get(cfg.system)
    if x0 is None:
        raise ValidationError(f"no initial condition for system {cfg.system!r}")
    return dynamics.generate(cfg.system, dt=cfg.ode_dt, steps=cfg.ode_steps, x0=x0)


def _sample(cfg: ExperimentConfig, source: DataMatrix):
    plan = SamplingPlan(cfg.seed, cfg.n_keep, cfg.reshape)
    sampled, perm = plan.apply(source)
    ordered = source
    if cfg.n_keep is not None:
        ordered = take_partial(ordered, cfg.n_keep)
    if cfg.reshape is not None:
        ordered = reshape_series(ordered, *cfg.reshape)
    return sampled, perm, ordered


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the full pipeline and emit artifacts; returns a summary mapping."""
    source = _stage("source", load_source, cfg)
    sampled, perm, ordered = _stage("sampling", _sample, cfg, source)

    for m in cfg.snapshots:
        if not 0 <= m < sampled.m_time:
            raise ValidationError(
                f"snapshot index {m} out of range for {sampled.m_time} columns"
            )

    def fit_one(name: str) -> KernelDmd:
        est = KernelDmd(kernel=name, sigma=cfg.sigma,
                        rank_tol=cfg.rank_tol, max_rank=cfg.max_rank)
        return est.fit(sampled)

    models = dict(zip(cfg.kernels,
                      _stage("fit", parallel.ordered_map, fit_one, cfg.kernels)))

    recon_matrices = {}
    for name, model in models.items():
        recon_matrices[name] = _stage(
            "reconstruct", model.predict, range(sampled.m_time)
        )

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def emit():
        lines = [
            f"source.shape={source.n_space}x{source.m_time}",
            f"sampled.shape={sampled.n_space}x{sampled.m_time}",
            f"sampling.seed={cfg.seed}",
            f"fit.sigma={format_float(cfg.sigma)}",
            f"fit.rank_tol={format_float(cfg.rank_tol)}",
        ]
        save_heatmap_pgm(ordered.values, out / "actual.pgm")
        save_heatmap_pgm(sampled.values, out / "sampled.pgm")
        with open(out / "permutation.csv", "w", encoding="ascii") as fh:
            fh.write(",".join(str(int(j)) for j in perm) + "\r\n")

        reports: dict[str, dict[int, object]] = {name: {} for name in cfg.kernels}
        for name, model in models.items():
            save_heatmap_pgm(recon_matrices[name], out / f"recon_{name}.pgm")
            lines.append(f"kernel.{name}.rank={model.rank_}")
            lines.append(
                f"kernel.{name}.max_abs_eigenvalue="
                f"{format_float(np.max(np.abs(model.eigenvalues_)))}"
            )
            if cfg.save_models:
                save_model(model, out / f"model_{name}.txt")

        for m in cfg.snapshots:
            actual = sampled.column(m)
            save_csv(actual, out / f"snapshot_{m:03d}_actual.csv")
            if cfg.reshape is None:
                lines.append(f"snapshot.{m}.source_column={int(perm[m])}")
            best_name, best_mean = None, math.inf
            for name in cfg.kernels:
                recon = recon_matrices[name][:, m]
                save_csv(recon, out / f"snapshot_{m:03d}_recon_{name}.csv")
                report = ewe(recon, actual, cfg.zero_tol)
                reports[name][m] = report
                save_csv(report.per_element, out / f"snapshot_{m:03d}_ewe_{name}.csv")
                lines.extend(report.to_lines(f"kernel.{name}.snapshot.{m}.ewe"))
                if report.mean < best_mean:
                    best_name, best_mean = name, report.mean
            if best_name is not None:
                lines.append(f"snapshot.{m}.better_kernel={best_name}")

        if cfg.snapshots and len(cfg.kernels) > 1:
            overall = {
                name: float(np.mean([reports[name][m].mean for m in cfg.snapshots]))
                for name in cfg.kernels
            }
            winner = min(overall, key=overall.get)
            lines.append(f"verdict.better_kernel={winner}")
        with open(out / "summary.txt", "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
        return reports, lines

    reports, lines = _stage("report", emit)
    return {
        "models": models,
        "reports": reports,
        "summary_lines": lines,
        "out_dir": out,
        "permutation": perm,
        "sampled": sampled,
        "source": source,
    }


# ---------------------------------------------------------------------------
# Numerical verification suite for the H_L theory (CLI: rkhs-verify)
# ---------------------------------------------------------------------------

def rkhs_verification_report(
    sigma: float = 1.0,
    seed: int = 0,
    n_samples: int = 1_000_000,
    a: float = 0.5,
    b: float = 0.0,
    radii=(2.0, 4.0, 8.0),
    m_max: int = 10,
) -> list[str]:
    """Run the desk-scale verification probes and report key=value lines.

    Covers: orthonormality of the monomial basis under the sampled weight,
    the kernel series reconstruction residual, the kernel-section norm
    bound, decay of the compactness statistic, and the closability contrast
    between the Laplacian-weighted space and the GRBF space.
    """
    ctx = McIntegrator(n_samples=n_samples, seed=seed, sigma=sigma, dim=1)
    lines = [
        f"params.sigma={format_float(sigma)}",
        f"params.seed={seed}",
        f"params.n_samples={n_samples}",
        f"params.a={format_float(a)}",
        f"params.b={format_float(b)}",
    ]

    basis = [orthonormal_basis_1d(n, sigma) for n in range(5)]
    worst = 0.0
    for i, ei in enumerate(basis):
        for j, ej in enumerate(basis):
            est = mc_inner_product(ei, ej, ctx)
            err = abs(est.value - (1.0 if i == j else 0.0))
            worst = max(worst, err)
    lines.append(f"orthonormality.max_abs_error={format_float(worst)}")
    lines.append(f"orthonormality.ok={'true' if worst < 0.05 else 'false'}")

    res12 = kernel_series_check(sigma, sigma, sigma, 12)
    res4 = kernel_series_check(2 * sigma, 2 * sigma, sigma, 4)
    res8 = kernel_series_check(2 * sigma, 2 * sigma, sigma, 8)
    lines.append(f"series.residual_12_terms={format_float(res12)}")
    lines.append(f"series.residual_4_terms_2sigma={format_float(res4)}")
    lines.append(f"series.residual_8_terms_2sigma={format_float(res8)}")
    lines.append(
        f"series.ok={'true' if res12 < 1e-10 and res4 > res8 else 'false'}"
    )

    norm_ok = True
    for x in (0.0, 0.5 * sigma, 1.0 * sigma, 2.0 * sigma):
        est = laplacian_kernel_norm(np.array([x]), ctx)
        bound = (1.0 / 3.0) * math.exp(abs(x) / sigma)
        ok = est.real <= bound + 3.0 * est.stderr
        norm_ok &= ok
        tag = format_float(x)
        lines.append(f"normbound.x_{tag}.value={format_float(est.real)}")
        lines.append(f"normbound.x_{tag}.stderr={format_float(est.stderr)}")
        lines.append(f"normbound.x_{tag}.bound={format_float(bound)}")
    lines.append(f"normbound.ok={'true' if norm_ok else 'false'}")

    phi = AffineMap(np.array([[a]]), np.array([b]))
    pis = [pi_statistic(np.array([z]), phi, sigma) for z in (10.0, 20.0, 40.0, 80.0)]
    for z, val in zip((10, 20, 40, 80), pis):
        lines.append(f"pi.z_{z}={format_float(val)}")
    pi_ok = all(p2 < p1 for p1, p2 in zip(pis, pis[1:])) and pis[-1] < 1e-4
    lines.append(f"pi.ok={'true' if pi_ok else 'false'}")

    hl = closability_probe_hl(phi, m_max, ctx)
    lines.extend(hl.to_lines())
    grbf = closability_probe_grbf(phi, radii, ctx)
    lines.extend(grbf.to_lines())
    contrast_ok = hl.verdict == "bounded" and grbf.verdict == "divergent"
    lines.append(f"closability.contrast_ok={'true' if contrast_ok else 'false'}")
    return lines
