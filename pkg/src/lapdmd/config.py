"""Line-oriented ``key = value`` experiment configuration.

The format is deliberately primitive: one dotted key per line, ``#`` starts
a comment, values are scalars or comma-separated lists.  Bundled configs
live under ``lapdmd/configs`` and can be referenced by bare name from the
CLI.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

BUNDLED_SUFFIX = ".cfg"


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ValidationError(f"config line {lineno}: empty key")
        out[key] = value
    return out


def bundled_config_names() -> list[str]:
    root = importlib.resources.files("lapdmd").joinpath("configs")
    return sorted(
        p.name[: -len(BUNDLED_SUFFIX)]
        for p in root.iterdir()
        if p.name.endswith(BUNDLED_SUFFIX)
    )


def read_config(name_or_path) -> dict[str, str]:
    """Read a config from a path, or from the bundled set by bare name."""
    path = Path(name_or_path)
    if path.exists():
        return parse_config_text(path.read_text(encoding="utf-8"))
    candidate = importlib.resources.files("lapdmd").joinpath(
        "configs", f"{name_or_path}{BUNDLED_SUFFIX}"
    )
    if candidate.is_file():
        return parse_config_text(candidate.read_text(encoding="utf-8"))
    raise ValidationError(
        f"config {name_or_path!r} not found (not a file, not one of the "
        f"bundled configs {bundled_config_names()})"
    )


def _get(cfg, key, convert, default=None, required=False):
    if key not in cfg:
        if required:
            raise ValidationError(f"missing config key {key!r}")
        return default
    try:
        return convert(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config key {key!r}: {exc}") from exc


def _int_list(value: str) -> list[int]:
    return [int(v.strip()) for v in value.split(",") if v.strip()]


def _float_list(value: str) -> list[float]:
    return [float(v.strip()) for v in value.split(",") if v.strip()]


def _str_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


KNOWN_KERNELS = ("laplacian", "grbf", "hl_sinh")


@dataclass
class ExperimentConfig:
    """Validated pipeline configuration for ``run`` and friends."""

    source_kind: str                      # "generate" | "csv"
    system: str | None = None             # burgers | lorenz63 | rossler | duffing
    csv_path: Path | None = None
    # ODE generation
    ode_dt: float = 0.01
    ode_steps: int = 1000
    ode_x0: list[float] | None = None
    # Burgers generation
    burgers_nu: float = 0.1
    burgers_nx: int = 256
    burgers_nt: int = 101
    # sampling plan
    seed: int = 0
    n_keep: int | None = None
    reshape: tuple[int, int] | None = None
    # fitting
    kernels: list[str] = field(default_factory=lambda: ["laplacian", "grbf"])
    sigma: float = 1.0
    rank_tol: float = 1e-8
    max_rank: int | None = None
    # reporting
    snapshots: list[int] = field(default_factory=list)
    out_dir: Path = Path("out")
    zero_tol: float = 1e-12
    save_models: bool = False

    @classmethod
    def from_mapping(cls, cfg: dict[str, str]) -> "ExperimentConfig":
        kind = _get(cfg, "source.kind", str, required=True)
        if kind not in ("generate", "csv"):
            raise ValidationError(f"source.kind must be 'generate' or 'csv', got {kind!r}")
        self = cls(source_kind=kind)
        if kind == "generate":
            self.system = _get(cfg, "source.system", str, required=True)
        else:
            self.csv_path = _get(cfg, "source.csv", Path, required=True)
            if not self.csv_path.exists():
                raise ValidationError(f"source.csv does not exist: {self.csv_path}")
        self.ode_dt = _get(cfg, "ode.dt", float, self.ode_dt)
        self.ode_steps = _get(cfg, "ode.steps", int, self.ode_steps)
        self.ode_x0 = _get(cfg, "ode.x0", _float_list, self.ode_x0)
        self.burgers_nu = _get(cfg, "burgers.nu", float, self.burgers_nu)
        self.burgers_nx = _get(cfg, "burgers.n_x", int, self.burgers_nx)
        self.burgers_nt = _get(cfg, "burgers.n_t", int, self.burgers_nt)
        self.seed = _get(cfg, "sampling.seed", int, self.seed)
        self.n_keep = _get(cfg, "sampling.n_keep", int, self.n_keep)
        rows = _get(cfg, "sampling.reshape_rows", int)
        cols = _get(cfg, "sampling.reshape_cols", int)
        if (rows is None) != (cols is None):
            raise ValidationError(
                "sampling.reshape_rows and sampling.reshape_cols must be set together"
            )
        if rows is not None:
            self.reshape = (rows, cols)
        self.kernels = _get(cfg, "fit.kernels", _str_list, self.kernels)
        for k in self.kernels:
            if k not in KNOWN_KERNELS:
                raise ValidationError(
                    f"fit.kernels entry {k!r} not one of {KNOWN_KERNELS}"
                )
        if not self.kernels:
            raise ValidationError("fit.kernels must name at least one kernel")
        self.sigma = _get(cfg, "fit.sigma", float, self.sigma)
        self.rank_tol = _get(cfg, "fit.rank_tol", float, self.rank_tol)
        self.max_rank = _get(cfg, "fit.max_rank", int, self.max_rank)
        self.snapshots = _get(cfg, "report.snapshots", _int_list, self.snapshots)
        self.out_dir = _get(cfg, "report.out_dir", Path, self.out_dir)
        self.zero_tol = _get(cfg, "report.zero_tol", float, self.zero_tol)
        self.save_models = _get(
            cfg, "report.save_models", lambda v: v.lower() in ("1", "true", "yes"),
            self.save_models,
        )
        self.validate()
        return self

    def validate(self):
        if self.sigma <= 0:
            raise ValidationError(f"fit.sigma must be > 0, got {self.sigma}")
        if self.rank_tol <= 0:
            raise ValidationError(f"fit.rank_tol must be > 0, got {self.rank_tol}")
        if self.zero_tol < 0:
            raise ValidationError(f"report.zero_tol must be >= 0, got {self.zero_tol}")
        if self.seed < 0:
            raise ValidationError(f"sampling.seed must be >= 0, got {self.seed}")
        limit = self.final_columns()
        if limit is not None:
            for m in self.snapshots:
                if not 0 <= m < limit:
                    raise ValidationError(
                        f"report.snapshots entry {m} out of range "
                        f"[0, {limit}) for this sampling plan"
                    )

    def final_columns(self) -> int | None:
        """Column count of the matrix the model sees, when known up front."""
        if self.reshape is not None:
            return self.reshape[1]
        if self.n_keep is not None:
            return self.n_keep
        if self.source_kind == "generate" and self.system != "burgers":
            return self.ode_steps + 1
        if self.source_kind == "generate":
            return self.burgers_nt
        return None

    def apply_overrides(self, seed=None, kernel=None, sigma=None,
                        rank_tol=None, out_dir=None):
        if seed is not None:
            self.seed = int(seed)
        if kernel is not None:
            if kernel not in KNOWN_KERNELS:
                raise ValidationError(f"--kernel must be one of {KNOWN_KERNELS}")
            self.kernels = [kernel]
        if sigma is not None:
            self.sigma = float(sigma)
        if rank_tol is not None:
            self.rank_tol = float(rank_tol)
        if out_dir is not None:
            self.out_dir = Path(out_dir)
        self.validate()
        return self
