"""Thermodynamic consistency checks for generators and trajectories.

Entropy production follows the Spohn form with the reference Hamiltonian
``H0`` in the heat flows,

    sigma = -Tr[(L rho) ln rho] - sum_n beta_n Tr[H0 L_n(rho)],

where ``L_n`` is the part of the generator belonging to bath ``n``.  Rates are
in cm^-1 (multiply by ``CM_TO_RAD_PER_FS`` for per-fs values).  The heat
current into bath ``n`` is ``-Tr[H0 L_n(rho)]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import apply_super, as_hermitian, trace_norm
from .units import CM_TO_RAD_PER_FS

__all__ = [
    "EntropyProduction",
    "ThermoReport",
    "gibbs_state",
    "stationarity_residual",
    "covariance_residual",
    "entropy_production",
    "von_neumann_entropy",
    "log_floor",
]

EIG_FLOOR = 1e-14


def gibbs_state(h0, beta: float) -> np.ndarray:
    """``exp(-beta h0) / Tr exp(-beta h0)`` built in the eigenbasis of ``h0``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    h0 = as_hermitian(h0)
    w, v = np.linalg.eigh(0.5 * (h0 + h0.conj().T))
    p = np.exp(-beta * (w - w[0]))
    p /= p.sum()
    rho = (v * p) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def stationarity_residual(g, rho_beta) -> float:
    """Trace norm of ``L(rho_beta)`` (cm^-1)."""
    return trace_norm(apply_super(g.total, rho_beta))


def covariance_residual(g, h0, samples) -> float:
    """Largest trace-norm violation of ``U L(rho) U^dag = L(U rho U^dag)``, ``U = exp(-i h0 t)``.

    ``samples`` is an iterable of ``(t_fs, rho)``.
    """
    h0 = as_hermitian(h0)
    w, v = np.linalg.eigh(0.5 * (h0 + h0.conj().T))
    worst = 0.0
    for t, rho in samples:
        u = (v * np.exp(-1j * w * t * CM_TO_RAD_PER_FS)) @ v.conj().T
        lhs = u @ apply_super(g.total, rho) @ u.conj().T
        rhs = apply_super(g.total, u @ rho @ u.conj().T)
        worst = max(worst, trace_norm(lhs - rhs))
    return worst


def log_floor(rho, floor: float = EIG_FLOOR):
    """Matrix logarithm of the Hermitian part of ``rho`` with eigenvalues floored at ``floor``.

    Returns ``(log, min_eigenvalue)``.
    """
    rho = np.asarray(rho)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return (v * np.log(np.maximum(w, floor))) @ v.conj().T, float(w[0])


def von_neumann_entropy(rho) -> float:
    """``-Tr rho ln rho`` with ``0 ln 0 = 0``."""
    rho = np.asarray(rho)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


@dataclass
class EntropyProduction:
    times: np.ndarray
    sigma: np.ndarray  # cm^-1
    entropy_rate: np.ndarray  # -Tr[(L rho) ln rho]
    heat_currents: dict  # label -> series, current into the bath
    flagged: list[int] = field(default_factory=list)

    @property
    def min_sigma(self) -> float:
        return float(np.min(self.sigma))


def entropy_production(traj, g, betas, h0=None, floor: float = EIG_FLOOR,
                       negativity_tol: float = 1e-8) -> EntropyProduction:
    """Entropy production series along a trajectory.

    Parameters
    ----------
    traj : Trajectory
    g : Generator
        Supplies the total generator and the per-bath parts.
    betas : dict or sequence
        Inverse temperatures by bath label (or in ``g.baths`` order).
    h0 : array_like, optional
        Reference Hamiltonian; defaults to ``g.split.h0`` or ``g.hamiltonian``.
    """
    labels = list(g.baths)
    if not isinstance(betas, dict):
        betas = dict(zip(labels, betas))
    if h0 is None:
        h0 = g.split.h0 if g.split is not None else g.hamiltonian
    h0 = np.asarray(h0)
    parts = {lab: g.bath_part(lab) for lab in labels}
    sigma = np.empty(len(traj))
    srate = np.empty(len(traj))
    heat = {lab: np.empty(len(traj)) for lab in labels}
    flagged = []
    for k, rho in enumerate(traj.states):
        log_rho, lam_min = log_floor(rho, floor)
        if lam_min < -negativity_tol:
            flagged.append(k)
        lr = apply_super(g.total, rho)
        srate[k] = -np.real(np.trace(lr @ log_rho))
        flow = 0.0
        for lab in labels:
            q = -np.real(np.trace(h0 @ apply_super(parts[lab], rho)))
            heat[lab][k] = q
            flow += betas[lab] * q
        sigma[k] = srate[k] + flow
    return EntropyProduction(times=traj.times, sigma=sigma, entropy_rate=srate,
                             heat_currents=heat, flagged=flagged)


@dataclass
class ThermoReport:
    stationarity_residual: float | None
    covariance_residuals: list  # (t_fs, residual)
    entropy_production: EntropyProduction | None = None

    def as_dict(self) -> dict:
        out = {
            "stationarity_residual": self.stationarity_residual,
            "covariance_residuals": [[float(t), float(r)] for t, r in self.covariance_residuals],
        }
        ep = self.entropy_production
        if ep is not None:
            out["entropy_production_min"] = ep.min_sigma
            out["entropy_production_flagged_steps"] = list(ep.flagged)
            out["heat_current_final"] = {k: float(v[-1]) for k, v in ep.heat_currents.items()}
        return out
