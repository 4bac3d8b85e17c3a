"""Monte Carlo machinery for the Laplacian-weighted Hilbert space H_L.

The weight on C^D (identified with R^{2D}) is

    (2 pi sigma^2)^{-D} exp(-||z||_2 / sigma) dV.

For D = 1 this has total mass 1; sampling draws the radius from
Gamma(shape 2D, scale sigma) with a uniform direction on the unit sphere of
R^{2D}, which reproduces the Euclidean-norm reading of the weight for every
D.  For D > 1 the total mass is 2^(1-D) (2D-1)!/(D-1)!, applied explicitly
wherever the unnormalised integral is needed.

Everything here is deterministic: sampling is split into fixed-size chunks
with per-chunk seeds derived from the context seed, and chunk results are
reduced in index order, so estimates are bit-identical across runs and
thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import parallel
from .errors import NumericalError, ValidationError
from .kernels import sinhc_sqrt
from .validation import as_vector, require_int, require_positive

# probes that emit a verdict refuse to run on fewer samples than this
MIN_VERDICT_SAMPLES = 10_000


@dataclass(frozen=True)
class McIntegrator:
    """Seeded Monte Carlo context over the Laplacian weight.

    Identical field values give bit-identical estimates, independent of the
    thread count used to evaluate chunks.
    """

    n_samples: int
    seed: int = 0
    sigma: float = 1.0
    dim: int = 1
    chunk_size: int = 65536

    def __post_init__(self):
        require_int("n_samples", self.n_samples, minimum=1)
        require_int("seed", self.seed, minimum=0)
        require_positive("sigma", self.sigma)
        require_int("dim", self.dim, minimum=1)
        require_int("chunk_size", self.chunk_size, minimum=1)

    @property
    def n_chunks(self) -> int:
        return (self.n_samples + self.chunk_size - 1) // self.chunk_size

    @property
    def measure_mass(self) -> float:
        return measure_mass(self.dim)


def measure_mass(dim: int) -> float:
    """Total mass of the Laplacian weight on C^dim: 2^(1-D) (2D-1)!/(D-1)!."""
    require_int("dim", dim, minimum=1)
    return 2.0 ** (1 - dim) * math.factorial(2 * dim - 1) / math.factorial(dim - 1)


def measure_density(z, sigma: float) -> float:
    """Density (2 pi sigma^2)^{-D} exp(-||z||_2 / sigma) of the weight."""
    require_positive("sigma", sigma)
    zv = as_vector(z, "z")
    d = zv.shape[0]
    return float(
        (2.0 * math.pi * sigma * sigma) ** (-d)
        * math.exp(-np.linalg.norm(zv) / sigma)
    )


def _chunk_plan(ctx: McIntegrator):
    """Per-chunk (seed, size) pairs; seeds are spawned from the context seed."""
    children = np.random.SeedSequence(ctx.seed).spawn(ctx.n_chunks)
    sizes = [ctx.chunk_size] * (ctx.n_chunks - 1)
    sizes.append(ctx.n_samples - ctx.chunk_size * (ctx.n_chunks - 1))
    return list(zip(children, sizes))


def _draw_chunk(seed_seq, size: int, dim: int, sigma: float) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    radius = rng.gamma(2 * dim, 1.0, size=size)
    direction = rng.standard_normal((size, 2 * dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    points = (sigma * radius)[:, None] * direction
    return points[:, :dim] + 1j * points[:, dim:]


def sample_chunks(ctx: McIntegrator):
    """Yield sample chunks as complex arrays of shape (chunk, dim)."""
    for seed_seq, size in _chunk_plan(ctx):
        yield _draw_chunk(seed_seq, size, ctx.dim, ctx.sigma)


def sample_measure(ctx: McIntegrator):
    """Yield individual samples (complex vectors of length dim)."""
    for chunk in sample_chunks(ctx):
        yield from chunk


@dataclass(frozen=True)
class HlFunction:
    """An observable on C^D: a vectorised evaluator plus a display label.

    The evaluator maps an (n, D) complex array to an (n,) complex array and
    must return finite values on every sample drawn from the weight.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(z), dtype=complex)


def constant_one() -> HlFunction:
    return HlFunction(lambda z: np.ones(z.shape[0], dtype=complex), "1")


def coordinate(index: int = 0, scale: float = 1.0) -> HlFunction:
    return HlFunction(lambda z: z[:, index] / scale, f"z_{index}/{scale:g}")


class McEstimate(NamedTuple):
    """Monte Carlo estimate with the standard error of the mean."""

    value: complex
    stderr: float
    n_samples: int

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def _check_finite(values: np.ndarray, chunk_start: int, label: str):
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise NumericalError(
            f"{label} produced a non-finite value at sample {chunk_start + idx}: "
            f"{values[idx]!r}"
        )


def _mc_moments(ctx: McIntegrator, integrand, label: str):
    """Chunked mean/variance of a per-sample integrand, fixed reduction order."""
    plan = _chunk_plan(ctx)
    offsets = np.concatenate([[0], np.cumsum([size for _, size in plan])])

    def one_chunk(args):
        i, (seed_seq, size) = args
        z = _draw_chunk(seed_seq, size, ctx.dim, ctx.sigma)
        with np.errstate(invalid="ignore", over="ignore"):
            w = np.asarray(integrand(z), dtype=complex)
        _check_finite(w, int(offsets[i]), label)
        return np.sum(w), np.sum(np.abs(w) ** 2)

    partials = parallel.ordered_map(one_chunk, list(enumerate(plan)))
    total = 0.0 + 0.0j
    total_sq = 0.0
    for s, s2 in partials:
        total += s
        total_sq += s2
    n = ctx.n_samples
    mean = total / n
    var = max(total_sq / n - abs(mean) ** 2, 0.0)
    stderr = math.sqrt(var / n)
    return mean, stderr


def mc_inner_product(f: HlFunction, g: HlFunction, ctx: McIntegrator) -> McEstimate:
    """Estimate the inner product int f conj(g) under the normalised weight.

    For dim = 1 the weight is a probability measure, so this is the H_L
    inner product itself; for dim > 1 multiply by ``ctx.measure_mass`` to
    recover the unnormalised integral.
    """
    label = f"<{f.description or 'f'}, {g.description or 'g'}>"
    mean, stderr = _mc_moments(ctx, lambda z: f(z) * np.conj(g(z)), label)
    return McEstimate(complex(mean), stderr, ctx.n_samples)


def mc_norm(f: HlFunction, ctx: McIntegrator) -> McEstimate:
    """Estimate the H_L norm sqrt(int |f|^2 d mu); mass-corrected for dim > 1."""
    label = f"||{f.description or 'f'}||"
    mean, stderr = _mc_moments(ctx, lambda z: np.abs(f(z)) ** 2, label)
    mass = ctx.measure_mass
    sq = max(float(np.real(mean)) * mass, 0.0)
    norm = math.sqrt(sq)
    norm_stderr = (mass * stderr / (2.0 * norm)) if norm > 0 else mass * stderr
    return McEstimate(norm, norm_stderr, ctx.n_samples)


MAX_BASIS_INDEX = 12  # factorial overflow guard for (2n+1)!


def orthonormal_basis_1d(n: int, sigma: float) -> HlFunction:
    """Orthonormal basis element e_n(z) = z^n / (sigma^n sqrt((2n+1)!)) at D=1."""
    require_int("n", n, minimum=0, maximum=MAX_BASIS_INDEX)
    require_positive("sigma", sigma)
    scale = sigma ** n * math.sqrt(math.factorial(2 * n + 1))
    return HlFunction(lambda z: z[:, 0] ** n / scale, f"e_{n}")


def kernel_series_check(z, w, sigma: float, n_terms: int) -> float:
    """Residual |sum_{n<n_terms} e_n(z) conj(e_n(w)) - K(z, w)| at D = 1."""
    require_int("n_terms", n_terms, minimum=1, maximum=MAX_BASIS_INDEX)
    zv = np.asarray([[complex(z)]])
    wv = np.asarray([[complex(w)]])
    partial = 0.0 + 0.0j
    for k in range(n_terms):
        e = orthonormal_basis_1d(k, sigma)
        partial += e(zv)[0] * np.conj(e(wv)[0])
    u = complex(z) * np.conj(complex(w)) / (sigma * sigma)
    return float(abs(partial - sinhc_sqrt(u)))


def laplacian_kernel_norm(x, ctx: McIntegrator) -> McEstimate:
    """H_L norm of the Laplacian kernel section exp(-||. - x||_2 / sigma)."""
    xv = as_vector(x, "x", dim=ctx.dim)
    sigma = ctx.sigma

    def section(z):
        return np.exp(-np.linalg.norm(z - xv[None, :], axis=1) / sigma)

    return mc_norm(HlFunction(section, "laplacian section"), ctx)


# ---------------------------------------------------------------------------
# Affine composition symbols and operator probes
# ---------------------------------------------------------------------------

MIN_ABS_DET = 1e-12


@dataclass(frozen=True)
class AffineMap:
    """Affine symbol phi(z) = a z + b with invertible a, 0 < ||a||_F < 1."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"a must be square, got shape {a.shape}")
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if b.shape != (a.shape[0],):
            raise ValidationError(
                f"b must be a vector of length {a.shape[0]}, got shape {b.shape}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("affine map contains non-finite entries")
        fro = float(np.linalg.norm(a))
        if not 0.0 < fro < 1.0:
            raise ValidationError(
                f"||a||_Frob must lie in (0, 1), got {fro:.6g}"
            )
        det = abs(np.linalg.det(a))
        if not det > MIN_ABS_DET:
            raise ValidationError(
                f"a must be invertible (|det a| > {MIN_ABS_DET:g}), got {det:.3g}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.a))

    def __call__(self, z: np.ndarray) -> np.ndarray:
        """Apply to a single vector (1-D) or a batch of row vectors (2-D)."""
        z = np.asarray(z, dtype=complex)
        if z.ndim == 1:
            return self.a @ z + self.b
        return z @ self.a.T + self.b[None, :]

    def iterate(self, m: int, x0) -> np.ndarray:
        """m-fold composition: a^m x0 + (sum_{i<m} a^i) b."""
        require_int("m", m, minimum=0)
        x = as_vector(x0, "x0", dim=self.dim)
        a_pow = np.linalg.matrix_power(self.a, m)
        geom = np.zeros_like(self.a)
        term = np.eye(self.dim, dtype=complex)
        for _ in range(m):
            geom = geom + term
            term = term @ self.a
        return a_pow @ x + geom @ self.b

    def realified(self) -> np.ndarray:
        """The 2D x 2D real matrix acting on (Re z, Im z)."""
        re, im = self.a.real, self.a.imag
        return np.block([[re, -im], [im, re]])


def pi_statistic(z, phi: AffineMap, sigma: float) -> float:
    """Compactness statistic K(phi(z), phi(z)) / K(z, z).

    Uses the composition-operator adjoint identity, which collapses the
    adjoint-image energy onto a diagonal kernel ratio.  Both diagonal values
    are real and >= 1, so the ratio is real and positive.
    """
    require_positive("sigma", sigma)
    zv = as_vector(z, "z", dim=phi.dim)
    wv = phi(zv)
    s2 = sigma * sigma
    num = float(np.real(sinhc_sqrt(np.vdot(wv, wv) / s2)))
    den = float(np.real(sinhc_sqrt(np.vdot(zv, zv) / s2)))
    return num / den


def _require_verdict_samples(ctx: McIntegrator):
    if ctx.n_samples < MIN_VERDICT_SAMPLES:
        raise ValidationError(
            f"verdict-producing probes need n_samples >= {MIN_VERDICT_SAMPLES}, "
            f"got {ctx.n_samples}"
        )


@dataclass
class HlClosabilityReport:
    """Bounded-image probe for the affine composition operator on H_L."""

    m_values: list[int]
    ratios: dict[str, list[float]]
    image_norms: dict[str, list[float]]
    verdict: str
    ratio_bound: float

    def to_lines(self) -> list[str]:
        lines = [f"hl.verdict={self.verdict}", f"hl.ratio_bound={self.ratio_bound:.17g}"]
        lines.append("hl.m=" + ",".join(str(m) for m in self.m_values))
        for name in sorted(self.ratios):
            lines.append(
                f"hl.ratio.{name}=" + ",".join(f"{v:.17g}" for v in self.ratios[name])
            )
            lines.append(
                f"hl.image_norm.{name}="
                + ",".join(f"{v:.17g}" for v in self.image_norms[name])
            )
        return lines


def closability_probe_hl(
    phi: AffineMap, m_max: int, ctx: McIntegrator
) -> HlClosabilityReport:
    """Probe boundedness of g -> g o phi on H_L along a vanishing sequence.

    The sequence is g_m = e/m for e in {constant 1, first coordinate}: the
    simplest functions with exactly known limits.  Ratios
    rho_m = ||K_phi g_m|| / ||g_m|| of a linear operator on scalar multiples
    are constant, so the verdict is "bounded" whenever max_m rho_m stays
    within 10% of rho_1 (and every image norm is finite).
    """
    require_int("m_max", m_max, minimum=3)
    _require_verdict_samples(ctx)
    if phi.dim != ctx.dim:
        raise ValidationError(
            f"phi dimension {phi.dim} does not match integrator dim {ctx.dim}"
        )

    bases = {
        "e0": constant_one(),
        "e1": coordinate(0, ctx.sigma * math.sqrt(6.0)),
    }
    m_values = list(range(1, m_max + 1))
    ratios: dict[str, list[float]] = {}
    image_norms: dict[str, list[float]] = {}
    verdict = "bounded"
    for name, base in bases.items():
        composed = HlFunction(lambda z, _f=base: _f(phi(z)), f"{base.description} o phi")
        try:
            norm_image = mc_norm(composed, ctx).real
            norm_base = mc_norm(base, ctx).real
        except NumericalError:
            verdict = "unbounded"
            ratios[name] = [math.inf] * len(m_values)
            image_norms[name] = [math.inf] * len(m_values)
            continue
        image_norms[name] = [norm_image / m for m in m_values]
        seq = [(norm_image / m) / (norm_base / m) for m in m_values]
        ratios[name] = seq
        if not all(math.isfinite(r) for r in seq) or max(seq) > seq[0] * 1.1:
            verdict = "unbounded"

    a_real = phi.realified()
    bound = (1.0 / abs(np.linalg.det(a_real))) * math.exp(
        np.linalg.norm(phi.b) / (phi.frobenius_norm * ctx.sigma)
    )
    return HlClosabilityReport(m_values, ratios, image_norms, verdict, float(bound))


@dataclass
class GrbfClosabilityReport:
    """Truncated-ball norm growth probe for the GRBF-space operator."""

    radii: list[float]
    norms: list[float]
    final_ratio: float
    verdict: str

    def to_lines(self) -> list[str]:
        return [
            f"grbf.verdict={self.verdict}",
            "grbf.radii=" + ",".join(f"{r:.17g}" for r in self.radii),
            "grbf.norms=" + ",".join(f"{v:.17g}" for v in self.norms),
            f"grbf.final_ratio={self.final_ratio:.17g}",
        ]


def grbf_reproducing_element(sigma: float, w0=None, dim: int = 1) -> HlFunction:
    """Holomorphic GRBF-space reproducing element exp(-sum (z_i - w0_i)^2 / sigma)."""
    require_positive("sigma", sigma)
    if w0 is None:
        w0 = np.zeros(dim)
    w0v = as_vector(w0, "w0")

    def ev(z):
        return np.exp(-np.sum((z - w0v[None, :]) ** 2, axis=1) / sigma)

    return HlFunction(ev, "grbf section")


def grbf_space_weight(z: np.ndarray, sigma: float) -> np.ndarray:
    """GRBF-space weight exp(sigma^2 sum_i |Im z_i|^2) for batched z."""
    return np.exp(sigma * sigma * np.sum(np.imag(z) ** 2, axis=1))


def closability_probe_grbf(
    phi: AffineMap,
    radii,
    ctx: McIntegrator,
    g: HlFunction | None = None,
) -> GrbfClosabilityReport:
    """Estimate truncated-ball GRBF-space norms of g o phi over growing radii.

    The full-space integral diverges whenever g o phi is nonzero, so the
    probe reports the truncated norms and declares "divergent" when they
    increase monotonically with a last-step ratio above 1.5 (or overflow).
    """
    _require_verdict_samples(ctx)
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise ValidationError("need at least 3 radii")
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValidationError("radii must be strictly increasing")
    if phi.dim != ctx.dim:
        raise ValidationError(
            f"phi dimension {phi.dim} does not match integrator dim {ctx.dim}"
        )
    if g is None:
        g = grbf_reproducing_element(ctx.sigma, dim=ctx.dim)

    d = ctx.dim
    sigma = ctx.sigma
    prefactor = 2.0 ** d * sigma ** (2 * d) / math.pi ** d
    ball_volume = lambda r: math.pi ** d * r ** (2 * d) / math.factorial(d)

    def chunk_sums(args):
        seed_seq, size = args
        rng = np.random.default_rng(seed_seq)
        direction = rng.standard_normal((size, 2 * d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        unit_radius = rng.uniform(0.0, 1.0, size=size) ** (1.0 / (2 * d))
        unit = unit_radius[:, None] * direction
        z_unit = unit[:, :d] + 1j * unit[:, d:]
        sums = []
        with np.errstate(over="ignore"):
            for r in radii:
                z = r * z_unit
                vals = np.abs(g(phi(z))) ** 2 * grbf_space_weight(z, sigma)
                sums.append(float(np.sum(vals)))
        return sums

    partials = parallel.ordered_map(chunk_sums, _chunk_plan(ctx))
    norms = []
    overflow = False
    for j, r in enumerate(radii):
        total = 0.0
        for p in partials:
            total += p[j]
        mean = total / ctx.n_samples
        sq = prefactor * ball_volume(r) * mean
        if not math.isfinite(sq):
            overflow = True
            norms.append(math.inf)
        else:
            norms.append(math.sqrt(sq))

    increasing = all(n2 > n1 for n1, n2 in zip(norms, norms[1:]))
    if norms[-2] > 0 and math.isfinite(norms[-2]):
        final_ratio = norms[-1] / norms[-2]
    else:
        final_ratio = math.inf if norms[-1] > 0 else 0.0
    if overflow or (increasing and final_ratio > 1.5):
        verdict = "divergent"
    else:
        verdict = "convergent"
    return GrbfClosabilityReport(radii, norms, float(final_ratio), verdict)
