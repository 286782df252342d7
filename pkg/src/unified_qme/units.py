"""Unit conventions.

Energies and frequencies are wavenumbers (cm^-1), times are femtoseconds and
temperatures are kelvin.  A generator expressed in cm^-1 is turned into a rate
in rad/fs by multiplying with :data:`CM_TO_RAD_PER_FS` (= 2 pi c).
"""

from __future__ import annotations

import numpy as np

#: 2 pi c with c in cm/fs.
CM_TO_RAD_PER_FS = 1.883651567e-4

#: Boltzmann constant (cm^-1 / K) used to reproduce the published numbers.
KB_REPRODUCTION = 0.734

#: CODATA value (cm^-1 / K), for users who prefer it.
KB_CODATA = 0.6950348


def wavenumber_to_angular_per_fs(energy):
    """Convert an energy in cm^-1 to an angular frequency in rad/fs."""
    return CM_TO_RAD_PER_FS * np.asarray(energy)


def angular_per_fs_to_wavenumber(omega):
    return np.asarray(omega) / CM_TO_RAD_PER_FS


def rate_from_lifetime_fs(tau_fs: float) -> float:
    """Wavenumber whose angular frequency is ``1 / tau_fs``."""
    return 1.0 / (tau_fs * CM_TO_RAD_PER_FS)


def inverse_temperature(temperature: float, kB: float = KB_REPRODUCTION) -> float:
    """beta = 1 / (kB T) in cm."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return 1.0 / (kB * temperature)
