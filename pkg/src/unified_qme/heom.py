"""Hierarchical equations of motion for exponential-mode baths.

Reference solver used to judge the master equations.  Each bath with
correlation ``C(s) = sum_m c_m exp(-nu_m s)`` (real ``nu_m``) contributes one
hierarchy dimension per mode.  Auxiliary density operators (ADOs) are indexed
by occupation vectors ``n`` with ``|n| <= depth`` and obey

    d rho_n/dt = -i[H, rho_n] - (sum_m n_m nu_m) rho_n
                 - i sum_m [A_m, rho_{n+e_m}]
                 - i sum_m n_m (c_m A_m rho_{n-e_m} - conj(c_m) rho_{n-e_m} A_m)

with ADOs beyond ``depth`` set to zero.  ``rho_0`` is the system state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dynamics import PropagationDiverged, TimeGrid, Trajectory, rk4_propagate_linear, trace_distance_series
from .linalg import InvariantError, as_hermitian, as_square, lift_commutator, lift_left, lift_right, unvec, vec
from .units import CM_TO_RAD_PER_FS

__all__ = [
    "UnsupportedBathError",
    "Hierarchy",
    "ado_indices",
    "build_hierarchy",
    "propagate_heom",
    "ConvergenceScan",
    "convergence_scan",
]


class UnsupportedBathError(ValueError):
    """Bath cannot be represented by the real-decay exponential hierarchy."""


def ado_indices(n_modes: int, depth: int) -> list[tuple[int, ...]]:
    """All occupation vectors of length ``n_modes`` with total at most ``depth``, by depth."""
    out = []
    for total in range(depth + 1):
        for combo in itertools.combinations_with_replacement(range(n_modes), total):
            n = [0] * n_modes
            for m in combo:
                n[m] += 1
            out.append(tuple(n))
    return out


@dataclass(frozen=True, eq=False)
class Hierarchy:
    hamiltonian: np.ndarray
    depth: int
    amplitudes: np.ndarray  # c_m (cm^-2)
    decays: np.ndarray  # nu_m (cm^-1)
    operators: tuple[np.ndarray, ...]  # A_m
    indices: tuple[tuple[int, ...], ...]
    matrix: sp.csr_matrix  # (n_ado d^2) square, cm^-1

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def n_ado(self) -> int:
        return len(self.indices)

    def rhs(self, x: np.ndarray) -> np.ndarray:
        """Time derivative (cm^-1 units) of the stacked ADO vector ``x``."""
        return self.matrix @ x

    def stack(self, rho0) -> np.ndarray:
        x = np.zeros(self.n_ado * self.dim**2, complex)
        x[: self.dim**2] = vec(rho0)
        return x

    def system_state(self, x) -> np.ndarray:
        return unvec(x[: self.dim**2], self.dim)

    def ado(self, x, n) -> np.ndarray:
        k = self.indices.index(tuple(n))
        d2 = self.dim**2
        return unvec(x[k * d2:(k + 1) * d2], self.dim)


def build_hierarchy(hamiltonian, couplings, baths, depth: int) -> Hierarchy:
    """Assemble the HEOM generator for couplings paired one-to-one with baths.

    Couplings whose baths share a label are summed into one operator.
    """
    if int(depth) < 1:
        raise ValueError("HEOM depth must be at least 1")
    h = as_hermitian(hamiltonian)
    dim = h.shape[0]
    couplings = [as_square(a) for a in couplings]
    baths = list(baths)
    if len(couplings) != len(baths):
        raise InvariantError("couplings and baths must pair one-to-one")
    grouped: dict = {}
    for a, b in zip(couplings, baths):
        if a.shape != h.shape:
            raise InvariantError("coupling dimension mismatch")
        if b.label in grouped:
            grouped[b.label] = (b, grouped[b.label][1] + a)
        else:
            grouped[b.label] = (b, a.copy())
    cs, nus, ops = [], [], []
    for b, a in grouped.values():
        if b.gamma_mode != "exp_sum":
            raise UnsupportedBathError(f"bath {b.label!r}: only exponential-sum baths are supported")
        for m in b.modes:
            if abs(np.imag(m.nu)) > 0:
                raise UnsupportedBathError(f"bath {b.label!r}: complex decay {m.nu} is not supported")
            cs.append(complex(m.c))
            nus.append(float(np.real(m.nu)))
            ops.append(a)
    n_modes = len(cs)
    indices = ado_indices(n_modes, depth)
    pos = {n: k for k, n in enumerate(indices)}
    n_ado = len(indices)

    eye_d2 = sp.identity(dim * dim, format="csr")
    free = sp.csr_matrix(-1j * lift_commutator(h))
    damping = np.array([sum(nm * nu for nm, nu in zip(n, nus)) for n in indices])
    mat = sp.kron(sp.identity(n_ado), free) - sp.kron(sp.diags(damping), eye_d2)
    for m in range(n_modes):
        up_r, up_c, dn_r, dn_c, dn_v = [], [], [], [], []
        for k, n in enumerate(indices):
            if sum(n) < depth:
                nu_ = list(n)
                nu_[m] += 1
                up_r.append(k)
                up_c.append(pos[tuple(nu_)])
            if n[m] > 0:
                nd = list(n)
                nd[m] -= 1
                dn_r.append(k)
                dn_c.append(pos[tuple(nd)])
                dn_v.append(n[m])
        up = sp.csr_matrix((np.ones(len(up_r)), (up_r, up_c)), shape=(n_ado, n_ado))
        dn = sp.csr_matrix((np.array(dn_v, float), (dn_r, dn_c)), shape=(n_ado, n_ado))
        a = ops[m]
        mat = mat + sp.kron(up, sp.csr_matrix(-1j * lift_commutator(a)))
        mat = mat + sp.kron(dn, sp.csr_matrix(-1j * (cs[m] * lift_left(a) - np.conj(cs[m]) * lift_right(a))))
    return Hierarchy(hamiltonian=h, depth=int(depth), amplitudes=np.array(cs), decays=np.array(nus),
                     operators=tuple(ops), indices=tuple(indices), matrix=sp.csr_matrix(mat))


def _spectral_radius(mat) -> float:
    try:
        v0 = np.ones(mat.shape[0], dtype=complex)  # fixed start vector keeps runs reproducible
        lam = spla.eigs(mat, k=1, which="LM", tol=1e-3, return_eigenvectors=False, maxiter=5000, v0=v0)
        return float(np.abs(lam[0]))
    except (spla.ArpackNoConvergence, ValueError, TypeError):
        return float(spla.norm(mat, 1))


def propagate_heom(h: Hierarchy, rho0, grid: TimeGrid, max_substep_phase: float = 0.2) -> Trajectory:
    """RK4 integration of the stacked hierarchy; returns the system-ADO trajectory.

    The internal step keeps ``spectral_radius * dt_sub <= max_substep_phase``.
    """
    rho0 = as_square(rho0)
    if rho0.shape[0] != h.dim:
        raise InvariantError("initial state dimension mismatch")
    mat = (h.matrix * CM_TO_RAD_PER_FS).tocsr()
    radius = _spectral_radius(mat)
    substeps = max(1, int(np.ceil(radius * grid.dt / max_substep_phase)))
    d2 = h.dim**2
    try:
        states = rk4_propagate_linear(lambda y: mat @ y, h.stack(rho0), grid.dt, grid.steps, substeps,
                                      record=lambda y: unvec(y[:d2].copy(), h.dim))
    except PropagationDiverged as exc:
        raise PropagationDiverged(exc.step, "HEOM hierarchy diverged") from None
    return Trajectory(grid=grid, states=np.array(states), method="heom")


@dataclass
class ConvergenceScan:
    depths: list[int]
    trajectories: dict
    table: list[dict]  # rows {"depth_a", "depth_b", "max_trace_distance"}

    def as_dict(self) -> dict:
        return {"depths": list(self.depths), "table": list(self.table)}


def convergence_scan(builder, rho0, grid: TimeGrid, depths) -> ConvergenceScan:
    """Propagate with every depth in ``depths`` (``builder(depth) -> Hierarchy``) and compare.

    Rows compare each depth with the next entry of ``depths``.
    """
    depths = list(depths)
    trajs = {}
    for L in depths:
        if L not in trajs:
            trajs[L] = propagate_heom(builder(L), rho0, grid)
    table = []
    for a, b in zip(depths[:-1], depths[1:]):
        dist = float(np.max(trace_distance_series(trajs[a], trajs[b])))
        table.append({"depth_a": a, "depth_b": b, "max_trace_distance": dist})
    return ConvergenceScan(depths=depths, trajectories=trajs, table=table)
