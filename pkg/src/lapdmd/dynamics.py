"""Ground-truth generators: chaotic ODE benchmarks and the viscous Burgers PDE.

All integrators are fixed-step RK4: determinism and exact reproducibility
matter more than efficiency at this scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data import DataMatrix
from .errors import IntegrationError, StabilityError
from .validation import as_vector, require_int, require_positive

# initial condition used for the Duffing phase-portrait benchmark
DUFFING_INITIAL_STATE = np.array([-1.8760, 1.7868])


@dataclass(frozen=True)
class OdeSystem:
    """Autonomous vector field dx/dt = field(x)."""

    dim: int
    field: Callable[[np.ndarray], np.ndarray]
    name: str

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.field(x)


def lorenz63() -> OdeSystem:
    """Lorenz 1963 system with the classical parameters (10, 28, 8/3)."""

    def field(s):
        x, y, z = s
        return np.array([10.0 * (y - x), x * (28.0 - z) - y, x * y - (8.0 / 3.0) * z])

    return OdeSystem(3, field, "lorenz63")


def rossler() -> OdeSystem:
    """Roessler system with a = b = 0.2, c = 5.7."""

    def field(s):
        x, y, z = s
        return np.array([-y - z, x + 0.2 * y, 0.2 + z * (x - 5.7)])

    return OdeSystem(3, field, "rossler")


def duffing() -> OdeSystem:
    """Unforced Duffing oscillator with damping 0.5: x' = y, y' = -0.5y + x - x^3."""

    def field(s):
        x, y = s
        return np.array([y, -0.5 * y + x - x ** 3])

    return OdeSystem(2, field, "duffing")


SYSTEMS = {
    "lorenz63": lorenz63,
    "rossler": rossler,
    "duffing": duffing,
}


def integrate_rk4(sys: OdeSystem, x0, dt: float, steps: int) -> DataMatrix:
    """Classical RK4 trajectory; column k is the state after k steps."""
    require_positive("dt", dt)
    require_int("steps", steps, minimum=1)
    x = as_vector(x0, "x0", dim=sys.dim, dtype=float).astype(float)
    out = np.empty((sys.dim, steps + 1))
    out[:, 0] = x
    f = sys.field
    # blow-ups are detected on the state itself, so intermediate overflow
    # warnings carry no information
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            k1 = f(x)
            k2 = f(x + 0.5 * dt * k1)
            k3 = f(x + 0.5 * dt * k2)
            k4 = f(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise IntegrationError(
                    f"{sys.name}: non-finite state at step {k} (dt={dt})"
                )
            out[:, k] = x
    return DataMatrix(out, dt=dt)


def _burgers_rhs(u: np.ndarray, nu: float, dx: float) -> np.ndarray:
    # conservative form: u u_x = (u^2/2)_x, 2nd-order central differences
    flux = 0.5 * u * u
    advection = -(np.roll(flux, -1) - np.roll(flux, 1)) / (2.0 * dx)
    diffusion = nu * (np.roll(u, -1) - 2.0 * u + np.roll(u, 1)) / (dx * dx)
    return advection + diffusion


def burgers_substeps(nu: float, dx: float, dt_sample: float, u_max: float) -> int:
    """Sub-steps per sample interval keeping RK4 inside its stability region."""
    # RK4 real-axis limit ~2.785 with diffusion eigenvalue 4 nu / dx^2;
    # imaginary-axis limit 2*sqrt(2) with advection eigenvalue u_max / dx
    dt_diff = 2.785 * dx * dx / (4.0 * nu)
    dt_adv = 2.828 * dx / max(u_max, 1e-12)
    dt_stable = 0.5 * min(dt_diff, dt_adv)
    return max(1, int(math.ceil(dt_sample / dt_stable)))


def burgers_solve(
    nu: float = 0.1,
    n_x: int = 256,
    n_t: int = 101,
    *,
    x_min: float = -8.0,
    x_max: float = 8.0,
    t_final: float = 10.0,
    u0: np.ndarray | None = None,
    substeps: int | None = None,
) -> DataMatrix:
    """Periodic viscous Burgers solve, sampled at n_t uniform times.

    Space is discretised with 2nd-order central differences on a periodic
    grid; time stepping is RK4 with internal sub-stepping for stability.
    The default setup (domain [-8, 8], Gaussian pulse at x = -2, nu = 0.1,
    t in [0, 10]) yields a smooth advecting-diffusing pulse on a 256 x 101
    grid.
    """
    require_positive("nu", nu)
    require_int("n_x", n_x, minimum=16)
    require_int("n_t", n_t, minimum=2)
    if x_max <= x_min:
        raise IntegrationError(f"invalid domain [{x_min}, {x_max}]")
    length = x_max - x_min
    dx = length / n_x
    x = x_min + dx * np.arange(n_x)
    if u0 is None:
        u = np.exp(-((x + 2.0) ** 2))
    else:
        u = np.asarray(u0, dtype=float).copy()
        if u.shape != (n_x,):
            raise IntegrationError(f"u0 must have shape ({n_x},), got {u.shape}")
    dt_sample = t_final / (n_t - 1)
    if substeps is None:
        substeps = burgers_substeps(nu, dx, dt_sample, float(np.max(np.abs(u))))
    h = dt_sample / substeps

    out = np.empty((n_x, n_t))
    out[:, 0] = u
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_t):
            for _ in range(substeps):
                k1 = _burgers_rhs(u, nu, dx)
                k2 = _burgers_rhs(u + 0.5 * h * k1, nu, dx)
                k3 = _burgers_rhs(u + 0.5 * h * k2, nu, dx)
                k4 = _burgers_rhs(u + h * k3, nu, dx)
                u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(u)):
                raise StabilityError(
                    f"Burgers step went unstable at sample {k} with {substeps} "
                    f"sub-steps; retry with substeps={2 * substeps}",
                    suggested_substeps=2 * substeps,
                )
            out[:, k] = u
    return DataMatrix(out, dt=dt_sample)


def generate(system: str, *, dt: float, steps: int, x0) -> DataMatrix:
    """Generate a named ODE trajectory (see ``SYSTEMS``)."""
    if system not in SYSTEMS:
        raise IntegrationError(
            f"unknown system {system!r}; available: {sorted(SYSTEMS)}"
        )
    return integrate_rk4(SYSTEMS[system](), x0, dt, steps)
