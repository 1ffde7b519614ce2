"""Time integration of the interconnected systems and steady-state metrics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .problems import Problem
from .rom import ReducedOrderModel


@dataclass(frozen=True)
class SimConfig:
    t_span: tuple = (0.0, 50.0)
    method: str = "adaptive_rk45"
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    fixed_step: float = 1e-3
    steady_window_fraction: float = 0.4

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.steady_window_fraction < 1.0:
            raise ValueError("steady_window_fraction must lie in (0, 1)")
        if self.method not in ("adaptive_rk45", "fixed_rk4"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray   # (T, nstates)
    outputs: np.ndarray  # (T, p)

    def to_csv(self, path, label: str = "y"):
        p = self.outputs.shape[1]
        header = "t," + ",".join(f"{label}_{i + 1}" for i in range(p))
        data = np.column_stack([self.times, self.outputs])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def _integrate(rhs, z0: np.ndarray, config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    t0, t1 = config.t_span
    if config.method == "fixed_rk4":
        nsteps = max(1, int(np.ceil((t1 - t0) / config.fixed_step)))
        times = np.linspace(t0, t1, nsteps + 1)
        states = np.empty((nsteps + 1, z0.shape[0]))
        states[0] = z0
        z = z0.astype(float).copy()
        for i in range(nsteps):
            t, dt = times[i], times[i + 1] - times[i]
            k1 = rhs(t, z)
            k2 = rhs(t + dt / 2, z + dt / 2 * k1)
            k3 = rhs(t + dt / 2, z + dt / 2 * k2)
            k4 = rhs(t + dt, z + dt * k3)
            z = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            states[i + 1] = z
        return times, states
    sol = solve_ivp(
        rhs, (t0, t1), z0, method="RK45",
        rtol=config.rel_tol, atol=config.abs_tol,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol.t, sol.y.T


def simulate_fom(problem: Problem, omega0, x0, config: SimConfig | None = None) -> Trajectory:
    """Integrate the coupled generator/full-order system; outputs y = h(x)."""
    config = config or SimConfig()
    gen, sys = problem.generator, problem.system
    omega0 = np.asarray(omega0, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    d = gen.d

    def rhs(t, z):
        omega, x = z[:d], z[d:]
        u = np.atleast_1d(gen.l(omega))
        return np.concatenate([np.atleast_1d(gen.s(omega)), sys.f(x, u)])

    times, states = _integrate(rhs, np.concatenate([omega0, x0]), config)
    outputs = np.array([np.atleast_1d(sys.h(z[d:])) for z in states])
    return Trajectory(times=times, states=states, outputs=outputs)


def simulate_rom(
    rom: ReducedOrderModel, generator, omega0, r0, config: SimConfig | None = None
) -> Trajectory:
    """Integrate the coupled generator/reduced model; outputs y_r = h(pi^N(r))."""
    config = config or SimConfig()
    omega0 = np.asarray(omega0, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    d = generator.d

    def rhs(t, z):
        omega, r = z[:d], z[d:]
        u = np.atleast_1d(generator.l(omega))
        return np.concatenate([np.atleast_1d(generator.s(omega)), rom.dynamics(r, u)])

    times, states = _integrate(rhs, np.concatenate([omega0, r0]), config)
    domain = rom.pi_solution.domain if rom.pi_solution is not None else None
    if domain is not None:
        r_states = states[:, d:]
        if np.any(r_states < domain.lo) or np.any(r_states > domain.hi):
            warnings.warn(
                "reduced state left the expansion domain; output values are extrapolated",
                stacklevel=2,
            )
    outputs = np.array([rom.output(z[d:]) for z in states])
    return Trajectory(times=times, states=states, outputs=outputs)


def steady_state_rms(
    y: Trajectory, y_r: Trajectory, config: SimConfig | None = None, npoints: int = 2000
) -> dict:
    """RMS mismatch of the two scalar outputs over the trailing window.

    Both outputs are resampled by linear interpolation on a uniform grid over
    the final steady_window_fraction of the common time span; the amplitude
    normalizer is half the peak-to-peak range of the first trajectory.
    """
    config = config or SimConfig()
    t0 = max(y.times[0], y_r.times[0])
    t1 = min(y.times[-1], y_r.times[-1])
    w0 = t1 - config.steady_window_fraction * (t1 - t0)
    grid = np.linspace(w0, t1, npoints)
    yi = np.interp(grid, y.times, y.outputs[:, 0])
    yri = np.interp(grid, y_r.times, y_r.outputs[:, 0])
    amplitude = 0.5 * (yi.max() - yi.min())
    if amplitude < 1e-12:
        raise ValueError("degenerate signal: amplitude below 1e-12")
    rms = float(np.sqrt(np.mean((yi - yri) ** 2)))
    return {
        "rms_error": rms,
        "amplitude": float(amplitude),
        "relative_rms": rms / float(amplitude),
    }
