"""Atomic-unit constants and conversions used at the I/O boundary.

Everything inside the package works in atomic units (hbar = e = m_e = 1,
eps0 = 1/(4 pi)). Only the helpers below touch SI/CGS numbers.
"""

from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc

_pc = _sc.physical_constants

# speed of light in a.u., fixed
C_AU = 137.035999
EPS0_AU = 1.0 / (4.0 * np.pi)


@dataclass(frozen=True)
class UnitContext:
    hartree_to_ev: float = _pc["Hartree energy in eV"][0]
    hartree_to_hz: float = _pc["hartree-hertz relationship"][0]
    bohr_to_cm: float = _pc["Bohr radius"][0] * 1e2
    au_time_to_s: float = _pc["atomic unit of time"][0]


UNITS = UnitContext()


def convert_energy(value, units=UNITS):
    """Energy in hartree -> (eV, Hz). Frequency is E/h, not E/hbar."""
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise ValueError("energy must be finite")
    ev = value * units.hartree_to_ev
    hz = value * units.hartree_to_hz
    if ev.ndim == 0:
        return float(ev), float(hz)
    return ev, hz


def ev_to_hartree(value, units=UNITS):
    return value / units.hartree_to_ev


def hz_to_hartree(value, units=UNITS):
    return value / units.hartree_to_hz


def convert_density(value, units=UNITS):
    """Number density in cm^-3 -> atoms per cubic bohr."""
    value = np.asarray(value, dtype=float)
    if np.any(value < 0) or not np.all(np.isfinite(value)):
        raise ValueError(f"density must be finite and non-negative, got {value}")
    out = value * units.bohr_to_cm**3
    return float(out) if out.ndim == 0 else out


def density_to_cm3(value, units=UNITS):
    return value / units.bohr_to_cm**3


def cm_to_bohr(value, units=UNITS):
    return value / units.bohr_to_cm


def bohr_to_cm(value, units=UNITS):
    return value * units.bohr_to_cm


def ns_to_au_time(value, units=UNITS):
    return value * 1e-9 / units.au_time_to_s


def au_time_to_ns(value, units=UNITS):
    return value * units.au_time_to_s * 1e9
