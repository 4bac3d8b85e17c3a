"""Quantitative comparison: element-wise error, Koopman mode-decomposition
differences between the fitted operator and an affine symbol, and the
closed-form spectral approximation bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .kedmd import KernelDmd
from .rkhs import AffineMap
from .validation import require_int, require_positive, require_square_matrix

DEFAULT_ZERO_TOL = 1e-12


@dataclass
class EweReport:
    """Element-wise error grid with entries near zero ground truth masked out."""

    per_element: np.ndarray
    mean: float
    max: float
    masked_count: int

    def to_lines(self, prefix: str = "ewe") -> list[str]:
        return [
            f"{prefix}.mean={self.mean:.17g}",
            f"{prefix}.max={self.max:.17g}",
            f"{prefix}.masked={self.masked_count}",
        ]


def ewe(reconstructed, actual, zero_tol: float = DEFAULT_ZERO_TOL) -> EweReport:
    """Element-wise error (1/N) |1 - F/A| with near-zero actuals masked.

    N counts the compared (unmasked) elements; masked positions carry 0 in
    the per-element grid and are excluded from the mean and max.
    """
    if zero_tol < 0:
        raise ValidationError(f"zero_tol must be >= 0, got {zero_tol!r}")
    F = np.asarray(reconstructed, dtype=float)
    A = np.asarray(actual, dtype=float)
    if F.shape != A.shape:
        raise ValidationError(f"shape mismatch: {F.shape} vs {A.shape}")
    mask = np.abs(A) <= zero_tol
    n_compared = int(A.size - mask.sum())
    per = np.zeros(A.shape, dtype=float)
    if n_compared:
        per[~mask] = np.abs(1.0 - F[~mask] / A[~mask]) / n_compared
        mean = float(per[~mask].mean())
        peak = float(per[~mask].max())
    else:
        mean = peak = 0.0
    return EweReport(per, mean, peak, int(mask.sum()))


@dataclass
class ModeDifferenceReport:
    """Partial sums of the 0th-snapshot m-th mode-decomposition difference.

    ``terms[n]`` is the n-th summand c_n [lambda_n^m zeta_n(x0) -
    zeta_n(phi^m(x0))]; ``partial_sums[n]`` their running sum.  Both are
    arrays of shape (n_terms, n_space).
    """

    m: int
    terms: np.ndarray
    partial_sums: np.ndarray
    faithful: bool = False

    @property
    def converged_value(self) -> np.ndarray:
        return self.partial_sums[-1]

    def partial_norms(self) -> np.ndarray:
        return np.linalg.norm(self.partial_sums, axis=1)

    def to_lines(self, prefix: str = "mode_diff") -> list[str]:
        return [
            f"{prefix}.m={self.m}",
            f"{prefix}.faithful={'true' if self.faithful else 'false'}",
            f"{prefix}.n_terms={self.terms.shape[0]}",
            f"{prefix}.partial_norms="
            + ",".join(f"{v:.17g}" for v in self.partial_norms()),
            f"{prefix}.converged_norm="
            + f"{float(np.linalg.norm(self.converged_value)):.17g}",
        ]


def _difference(model: KernelDmd, phi: AffineMap, m: int, n_terms: int,
                faithful: bool) -> ModeDifferenceReport:
    model._check_fitted()
    require_int("m", m, minimum=0)
    require_int("n_terms", n_terms, minimum=1, maximum=model.rank_)
    if phi.dim != model.x0_.shape[0]:
        raise ValidationError(
            f"affine map dimension {phi.dim} does not match state dimension "
            f"{model.x0_.shape[0]}"
        )
    x0 = model.x0_
    target = phi.iterate(m, x0)
    lam = model.eigenvalues_
    terms = np.empty((n_terms, model.n_space_), dtype=complex)
    for n in range(n_terms):
        zeta_x0 = model.eval_eigenfunction(n, x0)
        zeta_target = model.eval_eigenfunction(n, target)
        terms[n] = model.modes_[n] * (lam[n] ** m * zeta_x0 - zeta_target)
    if not np.all(np.isfinite(terms)):
        raise NumericalError(
            f"mode-difference terms are non-finite at m={m}"
        )
    partial = np.cumsum(terms, axis=0)
    return ModeDifferenceReport(m, terms, partial, faithful)


def mode_difference(model: KernelDmd, phi: AffineMap, m: int,
                    n_terms: int) -> ModeDifferenceReport:
    """Partial sums of the mode-decomposition difference against phi.

    The data-driven side realises the m-step operator action as
    lambda_n^m zeta_n(x0); the symbol side evaluates zeta_n at
    phi^m(x0) = A^m x0 + (sum_{i<m} A^i) b through the fitted
    eigenfunctions.  At m = 0 both sides coincide exactly.
    """
    return _difference(model, phi, m, n_terms, faithful=False)


def faithful_difference(model: KernelDmd, phi: AffineMap, m: int,
                        n_terms: int) -> ModeDifferenceReport:
    """Mode difference gated on the faithfulness preconditions of phi.

    Requires an invertible matrix with Frobenius norm strictly inside
    (0, 1); :class:`AffineMap` construction already enforces this, and the
    check is repeated here so a clear reason accompanies any rejection.
    The limit vanishes when the fitted dynamics genuinely are phi.
    """
    fro = phi.frobenius_norm
    if not 0.0 < fro < 1.0:
        raise ValidationError(
            f"faithfulness requires 0 < ||a||_Frob < 1, got {fro:.6g}"
        )
    det = abs(np.linalg.det(phi.a))
    if det <= 1e-12:
        raise ValidationError(
            f"faithfulness requires invertible a, got |det a| = {det:.3g}"
        )
    return _difference(model, phi, m, n_terms, faithful=True)


class SpectralBounds(NamedTuple):
    lower: float
    upper: float
    epsilon: float
    frob_identity: float


def frobenius_gap_identity(a) -> float:
    """||I - a||_Frob^2 written as D + ||a||_Frob^2 - 2 Re(Tr a)."""
    a = require_square_matrix(a, "a")
    d = a.shape[0]
    return float(d + np.linalg.norm(a) ** 2 - 2.0 * np.real(np.trace(a)))


def spectral_bounds(g_norm: float, x_norm: float, a, v_rho: float) -> SpectralBounds:
    """Closed-form operator-difference bounds for a linear symbol a.

    lower = g_norm * v_rho * x_norm * sqrt(D + 1 - 2 Re(Tr a)),
    upper = g_norm * x_norm * sqrt(D + 1),
    epsilon = (D + 1) / (D + 1 - 2 Re(Tr a)),
    plus the exact identity value ||I - a||_Frob^2 used internally.
    """
    require_positive("g_norm", g_norm)
    require_positive("x_norm", x_norm)
    if not 0.0 < v_rho <= 1.0:
        raise ValidationError(f"v_rho must lie in (0, 1], got {v_rho!r}")
    a = require_square_matrix(a, "a")
    d = a.shape[0]
    gap = d + 1.0 - 2.0 * float(np.real(np.trace(a)))
    if gap <= 0.0:
        raise ValidationError(
            f"degenerate bound: D + 1 - 2 Re(Tr a) = {gap:.6g} <= 0"
        )
    lower = g_norm * v_rho * x_norm * np.sqrt(gap)
    upper = g_norm * x_norm * np.sqrt(d + 1.0)
    epsilon = (d + 1.0) / gap
    return SpectralBounds(float(lower), float(upper), float(epsilon),
                          frobenius_gap_identity(a))
