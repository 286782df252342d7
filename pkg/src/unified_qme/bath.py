"""Thermal bath descriptors and their half-Fourier coefficient functions.

A bath correlation function is represented as a sum of exponential modes,
``C(s) = sum_k c_k exp(-nu_k s)``, whose one-sided transform

    Gamma(w) = int_0^inf exp(i w s) C(s) ds = sum_k c_k / (nu_k - i w)

is exact and quadrature free.  From ``Gamma`` the dissipative and Lamb-shift
coefficients follow:

    gamma(w, w') = Gamma(w) + conj(Gamma(w'))
    S(w, w')     = (Gamma(w) - conj(Gamma(w'))) / (2 i)

The Drude-Lorentz bath is available in the high-temperature form (one mode)
and in a variant whose dissipative part uses the full Bose factor, which
satisfies the KMS relation exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .units import KB_REPRODUCTION, inverse_temperature

__all__ = [
    "ExponentialMode",
    "BathDescriptor",
    "eval_Gamma",
    "gamma_S_pair",
    "drude_lorentz_high_temp",
    "drude_lorentz_exact_gamma",
    "kms_residual",
    "kms_mismatch",
]


@dataclass(frozen=True)
class ExponentialMode:
    """One term ``c * exp(-nu * s)`` of a correlation function (c in cm^-2, nu in cm^-1)."""

    c: complex
    nu: complex

    def __post_init__(self):
        if not np.real(self.nu) > 0:
            raise ValueError(f"mode decay must have positive real part, got {self.nu}")


@dataclass(frozen=True)
class BathDescriptor:
    """Thermal bath coupled to one system operator.

    Parameters
    ----------
    label : str
        Baths with the same label are the same physical bath; coupling
        operators sharing a label are cross-correlated.
    beta : float
        Inverse temperature in cm.
    modes : tuple of ExponentialMode
        Exponential decomposition of the correlation function.
    gamma_mode : {"exp_sum", "drude_exact"}
        ``"drude_exact"`` replaces the real part of ``Gamma`` by half the
        exact Drude-Lorentz rate (with the Bose factor); the imaginary part
        stays that of ``modes``.
    drude : (eta, cutoff) or None
        Drude-Lorentz parameters, required for ``"drude_exact"``.
    """

    label: str
    beta: float
    modes: tuple[ExponentialMode, ...]
    gamma_mode: str = "exp_sum"
    drude: tuple[float, float] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.gamma_mode not in ("exp_sum", "drude_exact"):
            raise ValueError(f"unknown gamma_mode {self.gamma_mode!r}")
        if self.gamma_mode == "drude_exact" and self.drude is None:
            raise ValueError("drude_exact mode needs the (eta, cutoff) parameters")
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def decay_scale(self) -> float:
        """Slowest correlation decay rate (cm^-1); the bath memory scale."""
        return float(min(np.real(m.nu) for m in self.modes))

    def correlation(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape, dtype=complex)
        for m in self.modes:
            out += m.c * np.exp(-m.nu * s)
        return out

    def Gamma(self, w):
        return eval_Gamma(self, w)

    def rate(self, w):
        """Single-frequency rate ``gamma(w, w) = 2 Re Gamma(w)``."""
        return 2.0 * np.real(eval_Gamma(self, w))

    def lamb(self, w):
        """Single-frequency Lamb coefficient ``S(w, w) = Im Gamma(w)``."""
        return np.imag(eval_Gamma(self, w))


def _gamma_exp_sum(modes, w):
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape, dtype=complex)
    for m in modes:
        out += m.c / (m.nu - 1j * w)
    return out


def _drude_exact_rate(eta, cutoff, beta, w):
    w = np.asarray(w, dtype=float)
    prefactor = 4.0 * eta * cutoff / (w**2 + cutoff**2)
    x = beta * w
    small = np.abs(x) < 1e-5
    safe_x = np.where(small, 1.0, x)
    # w / (1 - exp(-beta w)) = (1/beta) * x / (1 - exp(-x)); series near x = 0
    bose = np.where(small, (1.0 + x / 2.0 + x**2 / 12.0) / beta, w / -np.expm1(-safe_x))
    return prefactor * bose


def eval_Gamma(b: BathDescriptor, w):
    """One-sided Fourier transform ``Gamma(w)`` of the bath correlation (cm^-1)."""
    if b.gamma_mode == "exp_sum":
        return _gamma_exp_sum(b.modes, w)
    eta, cutoff = b.drude
    return 0.5 * _drude_exact_rate(eta, cutoff, b.beta, w) + 1j * np.imag(_gamma_exp_sum(b.modes, w))


def gamma_S_pair(b: BathDescriptor, w, wp):
    """Return ``(gamma(w, w'), S(w, w'))`` for a single bath.

    Both are complex in general; for ``w == w'`` they are real and equal to
    ``2 Re Gamma(w)`` and ``Im Gamma(w)``.
    """
    g1 = eval_Gamma(b, w)
    g2 = np.conj(eval_Gamma(b, wp))
    return g1 + g2, (g1 - g2) / 2j


def drude_lorentz_high_temp(eta: float, cutoff: float, temperature: float,
                            kB: float = KB_REPRODUCTION, label: str = "bath") -> BathDescriptor:
    """High-temperature Drude-Lorentz bath, ``C(s) = eta*cutoff*(2/(beta*cutoff) - i) exp(-cutoff*s)``."""
    if eta <= 0 or cutoff <= 0:
        raise ValueError("eta and cutoff must be positive")
    beta = inverse_temperature(temperature, kB)
    if beta * cutoff >= 1.0:
        warnings.warn(
            f"beta*cutoff = {beta * cutoff:.3g} >= 1: high-temperature approximation is not valid",
            stacklevel=2,
        )
    c = eta * cutoff * (2.0 / (beta * cutoff) - 1j)
    return BathDescriptor(
        label=label,
        beta=beta,
        modes=(ExponentialMode(complex(c), complex(cutoff)),),
        meta={"model": "drude_lorentz", "eta": eta, "cutoff": cutoff,
              "temperature": temperature, "kB": kB},
    )


def drude_lorentz_exact_gamma(eta: float, cutoff: float, temperature: float,
                              kB: float = KB_REPRODUCTION, label: str = "bath") -> BathDescriptor:
    """Drude-Lorentz bath with exact-KMS rates and high-temperature Lamb coefficients.

    ``gamma(w) = 4 eta cutoff w / ((w^2 + cutoff^2)(1 - exp(-beta w)))``, and
    ``S`` is taken from the high-temperature single-mode correlation.
    """
    ht = drude_lorentz_high_temp(eta, cutoff, temperature, kB, label)
    return BathDescriptor(
        label=label,
        beta=ht.beta,
        modes=ht.modes,
        gamma_mode="drude_exact",
        drude=(float(eta), float(cutoff)),
        meta=dict(ht.meta),
    )


def kms_mismatch(b: BathDescriptor, w) -> float:
    """Absolute detailed-balance violation ``|gamma(-w) - exp(-beta w) gamma(w)|`` (cm^-1)."""
    return float(np.abs(b.rate(-w) - np.exp(-b.beta * w) * b.rate(w)))


def kms_residual(b: BathDescriptor, w) -> float:
    """KMS violation relative to the larger of the two rates (dimensionless)."""
    if w == 0:
        return 0.0
    scale = max(float(b.rate(w)), float(b.rate(-w)))
    return kms_mismatch(b, w) / scale
