"""Time propagation of density matrices and trajectory analysis.

Generators are in cm^-1 and times in fs; the product ``L * t`` is converted
to radians with :data:`~unified_qme.units.CM_TO_RAD_PER_FS`.  Nothing is
renormalised or projected during propagation: trace drift and negative
eigenvalues are recorded as data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import InvariantError, as_square, matrix_exp, trace_distance, unvec, vec
from .units import CM_TO_RAD_PER_FS

__all__ = [
    "PropagationDiverged",
    "TimeGrid",
    "Trajectory",
    "default_dt",
    "propagate",
    "rk4_propagate_linear",
    "coherence_series",
    "trace_distance_series",
    "positivity_monitor",
    "fit_decay_rate",
]


class PropagationDiverged(RuntimeError):
    def __init__(self, step: int, message: str = "non-finite state"):
        super().__init__(f"{message} at step {step}")
        self.step = step


@dataclass(frozen=True)
class TimeGrid:
    """``steps + 1`` equally spaced times ``t0 + k*dt`` (fs)."""

    t0: float
    dt: float
    steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(self.steps) < 1:
            raise ValueError("steps must be a positive integer")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @property
    def t_max(self) -> float:
        return self.t0 + self.dt * self.steps

    @classmethod
    def spanning(cls, t_max: float, dt: float, t0: float = 0.0) -> "TimeGrid":
        steps = max(1, int(np.ceil((t_max - t0) / dt - 1e-9)))
        return cls(t0, (t_max - t0) / steps, steps)


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray  # (steps + 1, d, d)
    method: str = ""

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def traces(self) -> np.ndarray:
        return np.real(np.trace(self.states, axis1=1, axis2=2))

    def __len__(self):
        return len(self.states)


def default_dt(generator) -> float:
    """(1/40) * min(2 pi / w_max, 1 / gamma_max) in fs."""
    h = generator.hamiltonian + generator.lamb_shift
    e = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    w_max = (e[-1] - e[0]) * CM_TO_RAD_PER_FS
    g_max = 0.0
    for d in generator.dissipators.values():
        if d.size:
            g_max = max(g_max, float(np.max(np.abs(np.linalg.eigvals(d)))) * CM_TO_RAD_PER_FS)
    candidates = [v for v in (2 * np.pi / w_max if w_max > 0 else np.inf,
                              1.0 / g_max if g_max > 0 else np.inf) if np.isfinite(v)]
    return (min(candidates) if candidates else 1.0) / 40.0


def _spectral_radius_bound(m) -> float:
    return float(np.max(np.sum(np.abs(m), axis=0), initial=0.0))


def rk4_propagate_linear(matvec, y0: np.ndarray, dt: float, steps: int, substeps: int,
                         record=lambda y: y) -> list:
    """Classic RK4 for ``y' = matvec(y)``; returns ``record(y)`` at every outer step."""
    h = dt / substeps
    y = y0.copy()
    out = [record(y)]
    for n in range(steps):
        for _ in range(substeps):
            k1 = matvec(y)
            k2 = matvec(y + 0.5 * h * k1)
            k3 = matvec(y + 0.5 * h * k2)
            k4 = matvec(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise PropagationDiverged(n + 1)
        out.append(record(y))
    return out


def propagate(g, rho0, grid: TimeGrid, method: str = "expm_step") -> Trajectory:
    """Propagate ``rho0`` under generator ``g`` (a :class:`Generator` or raw superoperator).

    ``expm_step`` precomputes ``exp(L dt)`` once; ``rk4`` sub-steps so that
    ``||L|| dt_sub <= 0.1``.
    """
    total = getattr(g, "total", g)
    total = np.asarray(total, dtype=complex) * CM_TO_RAD_PER_FS  # rad / fs
    rho0 = as_square(rho0)
    dim = rho0.shape[0]
    if total.shape != (dim * dim, dim * dim):
        raise InvariantError(f"generator of shape {total.shape} does not act on {dim}x{dim} states")
    v = vec(rho0).astype(complex)
    if method == "expm_step":
        prop = matrix_exp(total * grid.dt)
        states = np.empty((grid.steps + 1, dim, dim), complex)
        states[0] = rho0
        for n in range(1, grid.steps + 1):
            v = prop @ v
            if not np.all(np.isfinite(v)):
                raise PropagationDiverged(n)
            states[n] = unvec(v, dim)
    elif method == "rk4":
        norm = _spectral_radius_bound(total)
        substeps = max(1, int(np.ceil(norm * grid.dt / 0.1)))
        vs = rk4_propagate_linear(lambda y: total @ y, v, grid.dt, grid.steps, substeps)
        states = np.array([unvec(y, dim) for y in vs])
    else:
        raise ValueError(f"unknown propagation method {method!r}")
    return Trajectory(grid=grid, states=states, method=getattr(g, "kind", method))


def coherence_series(traj: Trajectory, basis, i: int, j: int) -> np.ndarray:
    """``<e_i| rho(t) |e_j>`` for an orthonormal basis given as a list of vectors (or matrix columns)."""
    b = np.asarray(basis, dtype=complex)
    if b.ndim == 2 and isinstance(basis, (list, tuple)):
        b = b.T  # list of vectors -> columns
    if b.shape[0] != traj.dim or np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))) > 1e-10:
        raise InvariantError("basis is not orthonormal")
    return np.einsum("i,tij,j->t", b[:, i].conj(), traj.states, b[:, j])


def trace_distance_series(a: Trajectory, b: Trajectory) -> np.ndarray:
    if len(a) != len(b) or not np.allclose(a.times, b.times, rtol=0, atol=1e-9):
        raise InvariantError("trajectories live on different time grids")
    return np.array([trace_distance(x, y) for x, y in zip(a.states, b.states)])


def positivity_monitor(traj: Trajectory) -> np.ndarray:
    """Minimum eigenvalue of the Hermitian part of every state."""
    s = traj.states
    return np.linalg.eigvalsh(0.5 * (s + np.conj(np.swapaxes(s, 1, 2))))[:, 0]


def fit_decay_rate(times, values, window: tuple[float, float]) -> float:
    """Least-squares slope of ``ln|values|`` over ``window`` (per fs; negative for decay)."""
    t = np.asarray(times)
    mask = (t >= window[0]) & (t <= window[1])
    y = np.log(np.abs(np.asarray(values)[mask]))
    slope, _ = np.polyfit(t[mask], y, 1)
    return float(slope)
