"""Kernel extended dynamic mode decomposition.

The finite-rank surrogate of the composition (Koopman) operator is computed
entirely from kernel matrices: with Ghat_ij = k(x_i, x_j) and
Ahat_ij = k(y_i, x_j),

    Ghat = Q S^2 Q*   (Hermitian eigendecomposition)
    Khat = S_r^+ Q_r* Ahat Q_r S_r^+

where only singular values above ``rank_tol * s_max`` (optionally capped at
``max_rank``) are retained.  Eigenpairs of Khat give eigenvalues, eigenfunction
values at the data Phi = Q_r S_r V, and kernel-space coefficients
B = Q_r S_r^+ V for out-of-sample evaluation.  Full-state Koopman modes are
the least-squares solution of X^T ~= Phi W.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .data import DataMatrix
from .errors import GramRankError, NumericalError, ValidationError
from .kernels import KernelSpec, cross_gram, gram_matrix, kernel_column
from .sampling import build_pairs
from .validation import as_snapshot_matrix, as_vector, require_int, require_positive

# fitted eigenvalues beyond this magnitude are numerically spurious
MAX_EIGENVALUE_MAGNITUDE = 1e3

_KERNEL_NAMES = {
    "laplacian": KernelSpec.laplacian,
    "grbf": KernelSpec.grbf,
    "hl_sinh": KernelSpec.hl_sinh,
}


class ReconstructionResult(NamedTuple):
    """Real snapshot reconstruction plus the norm of the imaginary residual."""

    values: np.ndarray
    imag_norm: float


def resolve_kernel(kernel, sigma, gamma) -> KernelSpec:
    if isinstance(kernel, KernelSpec):
        return kernel
    if kernel in _KERNEL_NAMES:
        return _KERNEL_NAMES[kernel](sigma=sigma)
    if kernel == "exp_power":
        if gamma is None:
            raise ValidationError("kernel='exp_power' requires gamma")
        return KernelSpec("exp_power", sigma=sigma, gamma=gamma)
    raise ValidationError(
        f"unknown kernel {kernel!r}; expected one of "
        f"{sorted(_KERNEL_NAMES) + ['exp_power']} or a KernelSpec"
    )


class KernelDmd(BaseEstimator):
    """Kernel DMD estimator with an sklearn-style interface.

    Parameters
    ----------
    kernel : str or KernelSpec, default "laplacian"
        "laplacian", "grbf", "hl_sinh", "exp_power" (with ``gamma``), or an
        explicit :class:`KernelSpec`.
    sigma : float, default 1.0
        Kernel bandwidth (ignored when ``kernel`` is a KernelSpec).
    gamma : float or None
        Exponential-power shape, only for ``kernel="exp_power"``.
    rank_tol : float, default 1e-8
        Relative singular-value cutoff for the Gram truncation.
    max_rank : int or None
        Optional hard cap on the retained rank.

    Snapshot matrices are column-oriented: ``fit(X)`` with a single matrix
    (or :class:`DataMatrix`) treats adjacent columns as successor pairs;
    ``fit(X, Y)`` takes explicit pair matrices of equal shape.
    """

    def __init__(self, kernel="laplacian", sigma=1.0, gamma=None,
                 rank_tol=1e-8, max_rank=None):
        self.kernel = kernel
        self.sigma = sigma
        self.gamma = gamma
        self.rank_tol = rank_tol
        self.max_rank = max_rank

    # ------------------------------------------------------------------
    def fit(self, X, Y=None):
        spec = resolve_kernel(self.kernel, self.sigma, self.gamma)
        require_positive("rank_tol", self.rank_tol)
        if self.max_rank is not None:
            require_int("max_rank", self.max_rank, minimum=1)

        if Y is None:
            if isinstance(X, DataMatrix):
                X, Y = build_pairs(X)
            else:
                arr = as_snapshot_matrix(X, "X", min_cols=2)
                X, Y = arr[:, :-1], arr[:, 1:]
        else:
            X = as_snapshot_matrix(X, "X", min_cols=2)
            Y = as_snapshot_matrix(Y, "Y", min_cols=2)
            if X.shape != Y.shape:
                raise ValidationError(
                    f"X and Y must have identical shapes, got {X.shape} vs {Y.shape}"
                )

        G = gram_matrix(X, spec)
        A = cross_gram(Y, X, spec)
        if float(np.ptp(np.abs(G))) < 1e-15:
            raise GramRankError(
                "Gram rank zero after tolerance: all snapshots are identical "
                "up to kernel resolution"
            )

        evals, Q = np.linalg.eigh(G)
        order = np.argsort(evals)[::-1]
        evals, Q = evals[order], Q[:, order]
        s = np.sqrt(np.clip(evals, 0.0, None))
        keep = s > self.rank_tol * s[0]
        if self.max_rank is not None:
            keep &= np.arange(s.shape[0]) < self.max_rank
        rank = int(np.count_nonzero(keep))
        if rank == 0:
            raise GramRankError("all singular values fell below rank_tol")
        Qr, sr = Q[:, keep], s[keep]

        khat = (Qr.conj().T @ A @ Qr) / sr[None, :] / sr[:, None]
        try:
            lam, V = np.linalg.eig(khat)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
        if not np.all(np.isfinite(lam)):
            raise NumericalError("eigendecomposition produced non-finite eigenvalues")
        worst = float(np.max(np.abs(lam)))
        if worst > MAX_EIGENVALUE_MAGNITUDE:
            raise NumericalError(
                f"spurious eigenvalue magnitude {worst:.3g} exceeds "
                f"{MAX_EIGENVALUE_MAGNITUDE:g}; tighten rank_tol or max_rank"
            )

        Phi = Qr @ (sr[:, None] * V)
        B = Qr @ (V / sr[:, None])
        W, residuals, *_ = np.linalg.lstsq(Phi, X.T, rcond=None)

        self.kernel_spec_ = spec
        self.eigenvalues_ = lam
        self.eigvec_coeffs_ = V
        self.feature_basis_ = Qr
        self.singular_values_ = sr
        self.eigenfunctions_ = Phi
        self.coefficient_basis_ = B
        self.modes_ = W
        self.khat_ = khat
        self.x0_ = X[:, 0].copy()
        self.training_states_ = X.copy()
        self.rank_ = rank
        self.n_space_ = X.shape[0]
        self.fit_residual_ = float(np.sum(residuals)) if residuals.size else 0.0
        return self

    # ------------------------------------------------------------------
    def _check_fitted(self):
        if not hasattr(self, "eigenvalues_"):
            raise NotFittedError("this KernelDmd instance is not fitted yet")

    def reconstruct(self, m: int) -> ReconstructionResult:
        """Koopman mode reconstruction Re(sum_n c_n lambda_n^m zeta_n(x0))."""
        self._check_fitted()
        require_int("m", m, minimum=0)
        mags = np.abs(self.eigenvalues_)
        worst = float(mags.max())
        if worst > 1.0 and m * np.log(worst) > 700.0:
            offender = self.eigenvalues_[int(np.argmax(mags))]
            raise NumericalError(
                f"|lambda|^m overflows at m={m} for eigenvalue {offender!r}"
            )
        weights = self.eigenvalues_ ** m * self.eigenfunctions_[0, :]
        out = weights @ self.modes_
        return ReconstructionResult(np.real(out), float(np.linalg.norm(np.imag(out))))

    def predict(self, snapshot_indices) -> np.ndarray:
        """Reconstructions for several snapshot indices, stacked as columns."""
        cols = [self.reconstruct(int(m)).values for m in snapshot_indices]
        return np.stack(cols, axis=1)

    def eval_eigenfunction(self, n: int, x) -> complex:
        """Evaluate the n-th eigenfunction at an arbitrary state x."""
        self._check_fitted()
        require_int("n", n, minimum=0, maximum=self.rank_ - 1)
        xv = as_vector(x, "x", dim=self.training_states_.shape[0])
        if not np.iscomplexobj(self.training_states_) and np.all(xv.imag == 0):
            xv = xv.real
        k_vec = kernel_column(xv, self.training_states_, self.kernel_spec_)
        return complex(k_vec @ self.coefficient_basis_[:, n])

    def dominant_modes(self, tol: float) -> list[int]:
        """Indices with Re(lambda) close to 1, sorted by |lambda| descending."""
        self._check_fitted()
        require_positive("tol", tol)
        close = np.flatnonzero(np.abs(self.eigenvalues_.real - 1.0) <= tol)
        order = np.argsort(-np.abs(self.eigenvalues_[close]), kind="stable")
        return [int(i) for i in close[order]]


# ---------------------------------------------------------------------------
# Text serialization (versioned, binary-free)
# ---------------------------------------------------------------------------

MODEL_FORMAT_VERSION = 1


def _format_cell(v, is_complex: bool) -> str:
    if is_complex:
        c = complex(v)
        return f"{c.real:.17g}{c.imag:+.17g}j"
    return f"{float(v):.17g}"


def _write_block(lines, name, arr):
    arr = np.atleast_2d(np.asarray(arr))
    is_complex = np.iscomplexobj(arr)
    kind = "complex" if is_complex else "real"
    lines.append(f"[{name} {kind} {arr.shape[0]} {arr.shape[1]}]")
    for row in arr:
        lines.append(",".join(_format_cell(v, is_complex) for v in row))


def save_model(model: KernelDmd, path):
    """Write a fitted model as a key=value header plus CSV matrix blocks."""
    model._check_fitted()
    spec = model.kernel_spec_
    lines = [
        f"lapdmd-model-version={MODEL_FORMAT_VERSION}",
        f"kernel.family={spec.family}",
        f"kernel.sigma={spec.sigma:.17g}",
    ]
    if spec.gamma is not None:
        lines.append(f"kernel.gamma={spec.gamma:.17g}")
    lines.append(f"rank={model.rank_}")
    lines.append(f"n_space={model.n_space_}")
    lines.append(f"n_train={model.training_states_.shape[1]}")
    _write_block(lines, "eigenvalues", model.eigenvalues_[None, :])
    _write_block(lines, "eigvec_coeffs", model.eigvec_coeffs_)
    _write_block(lines, "feature_basis", model.feature_basis_)
    _write_block(lines, "singular_values", model.singular_values_[None, :])
    _write_block(lines, "modes", model.modes_)
    _write_block(lines, "x0", model.x0_[None, :])
    _write_block(lines, "training_states", model.training_states_)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_blocks(lines):
    header = {}
    blocks = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if line.startswith("["):
            name, kind, rows, cols = line[1:-1].split()
            rows, cols = int(rows), int(cols)
            dtype = complex if kind == "complex" else float
            data = np.empty((rows, cols), dtype=dtype)
            for r in range(rows):
                cells = lines[i + 1 + r].strip().split(",")
                if len(cells) != cols:
                    raise ValidationError(
                        f"model block {name!r} row {r} has {len(cells)} cells, "
                        f"expected {cols}"
                    )
                data[r] = [dtype(c) for c in cells]
            blocks[name] = data
            i += 1 + rows
        else:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
            i += 1
    return header, blocks


def load_model(path) -> KernelDmd:
    """Load a model written by :func:`save_model` and return it fitted."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    header, blocks = _parse_blocks(lines)
    version = int(header.get("lapdmd-model-version", "-1"))
    if version != MODEL_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported model format version {version}; expected {MODEL_FORMAT_VERSION}"
        )
    family = header["kernel.family"]
    sigma = float(header["kernel.sigma"])
    gamma = float(header["kernel.gamma"]) if "kernel.gamma" in header else None
    spec = KernelSpec(family, sigma=sigma, gamma=gamma)

    model = KernelDmd(kernel=spec)
    model.kernel_spec_ = spec
    model.eigenvalues_ = blocks["eigenvalues"][0]
    model.eigvec_coeffs_ = blocks["eigvec_coeffs"]
    model.feature_basis_ = blocks["feature_basis"]
    model.singular_values_ = np.real(blocks["singular_values"][0])
    model.modes_ = blocks["modes"]
    x0 = blocks["x0"][0]
    training = blocks["training_states"]
    model.x0_ = x0
    model.training_states_ = training
    model.rank_ = int(header["rank"])
    model.n_space_ = int(header["n_space"])
    sr = model.singular_values_
    V = model.eigvec_coeffs_
    model.eigenfunctions_ = model.feature_basis_ @ (sr[:, None] * V)
    model.coefficient_basis_ = model.feature_basis_ @ (V / sr[:, None])
    model.khat_ = None
    model.fit_residual_ = float(header.get("fit_residual", "0"))
    return model
