"""Command-line interface.

Subcommands: ``generate``, ``sample``, ``fit``, ``reconstruct``, ``ewe``,
``run`` (full pipeline), ``rkhs-verify`` (H_L verification probes).

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ExperimentConfig, read_config
from .dataio import read_csv_values, save_csv, save_heatmap_pgm
from .errors import NumericalError, ValidationError
from .experiment import load_source, run_experiment, rkhs_verification_report
from .kedmd import KernelDmd, load_model, save_model
from .metrics import ewe
from .sampling import SamplingPlan


def _add_common(p: argparse.ArgumentParser, config_required=True):
    p.add_argument("--config", required=config_required,
                   help="config file path or bundled config name")
    p.add_argument("--seed", type=int, help="override sampling.seed")
    p.add_argument("--kernel", help="restrict to a single kernel")
    p.add_argument("--sigma", type=float, help="override fit.sigma")
    p.add_argument("--rank-tol", type=float, help="override fit.rank_tol")
    p.add_argument("--out", help="override report.out_dir")


def _load_cfg(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_mapping(read_config(args.config))
    cfg.apply_overrides(seed=args.seed, kernel=args.kernel, sigma=args.sigma,
                        rank_tol=getattr(args, "rank_tol", None), out_dir=args.out)
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg = _load_cfg(args)
    source = load_source(cfg)
    out = _outdir(cfg)
    save_csv(source.values, out / "source.csv")
    save_heatmap_pgm(source.values, out / "source.pgm")
    print(f"wrote {out / 'source.csv'} ({source.n_space}x{source.m_time})")
    return 0


def cmd_sample(args) -> int:
    cfg = _load_cfg(args)
    source = load_source(cfg)
    sampled, perm = SamplingPlan(cfg.seed, cfg.n_keep, cfg.reshape).apply(source)
    out = _outdir(cfg)
    save_csv(sampled.values, out / "sampled.csv")
    with open(out / "permutation.csv", "w", encoding="ascii") as fh:
        fh.write(",".join(str(int(j)) for j in perm) + "\r\n")
    print(f"wrote {out / 'sampled.csv'} ({sampled.n_space}x{sampled.m_time})")
    return 0


def cmd_fit(args) -> int:
    cfg = _load_cfg(args)
    source = load_source(cfg)
    sampled, _ = SamplingPlan(cfg.seed, cfg.n_keep, cfg.reshape).apply(source)
    out = _outdir(cfg)
    for name in cfg.kernels:
        model = KernelDmd(kernel=name, sigma=cfg.sigma, rank_tol=cfg.rank_tol,
                          max_rank=cfg.max_rank).fit(sampled)
        path = out / f"model_{name}.txt"
        save_model(model, path)
        print(f"wrote {path} (rank {model.rank_})")
    return 0


def cmd_reconstruct(args) -> int:
    model = load_model(args.model)
    snapshots = [int(v) for v in args.snapshots.split(",") if v.strip()]
    if not snapshots:
        raise ValidationError("--snapshots must list at least one index")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for m in snapshots:
        result = model.reconstruct(m)
        path = out / f"reconstruction_{m:03d}.csv"
        save_csv(result.values, path)
        print(f"wrote {path} (imag residual {result.imag_norm:.3e})")
    return 0


def cmd_ewe(args) -> int:
    recon = read_csv_values(args.reconstructed)
    actual = read_csv_values(args.actual)
    report = ewe(recon, actual, args.zero_tol)
    for line in report.to_lines():
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_csv(report.per_element, out / "ewe_per_element.csv")
    return 0


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    result = run_experiment(cfg)
    for line in result["summary_lines"]:
        print(line)
    print(f"artifacts in {result['out_dir']}")
    return 0


def cmd_rkhs_verify(args) -> int:
    params = {}
    if args.config:
        raw = read_config(args.config)
        for key, cast in (("rkhs.sigma", float), ("rkhs.seed", int),
                          ("rkhs.n_samples", int), ("rkhs.a", float),
                          ("rkhs.b", float), ("rkhs.m_max", int)):
            if key in raw:
                params[key.split(".", 1)[1]] = cast(raw[key])
        if "rkhs.radii" in raw:
            params["radii"] = [float(v) for v in raw["rkhs.radii"].split(",")]
    if args.sigma is not None:
        params["sigma"] = args.sigma
    if args.seed is not None:
        params["seed"] = args.seed
    if args.samples is not None:
        params["n_samples"] = args.samples
    lines = rkhs_verification_report(**params)
    for line in lines:
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "rkhs_report.txt", "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lapdmd",
        description="Kernel DMD reconstruction from irregular sparse snapshots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("generate", cmd_generate), ("sample", cmd_sample),
                     ("fit", cmd_fit), ("run", cmd_run)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("reconstruct")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.add_argument("--model", required=True, help="model file from 'fit'")
    p.add_argument("--snapshots", required=True, help="comma-separated indices")
    p.add_argument("--out", help="output directory (default: cwd)")
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("ewe")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.add_argument("--reconstructed", required=True)
    p.add_argument("--actual", required=True)
    p.add_argument("--zero-tol", type=float, default=1e-12, dest="zero_tol")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_ewe)

    p = sub.add_parser("rkhs-verify")
    p.add_argument("--config", help="optional config with rkhs.* keys")
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_rkhs_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
