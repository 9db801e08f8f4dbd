"""Closed-form susceptibility of the dressed medium.

Conventions
-----------
* ``x`` is the probe detuning E_b + omega1 - E_a from the autoionizing
  resonance (hartree). The textbook form is often written with
  ``omega1 - E_a``; the pole of the continuum integral sits at
  E = E_b + omega1, so the bound-state energy belongs in the detuning.
* R_ij = B_i B_j F(x), where F is the dimensionless Fano factor below.
  F(s) = pi [(q^2 - 1) s - 2q - i (s + q)^2] / (s^2 + 1), s = x/gamma, is
  the boundary value of pi (q - i)^2/(s + i) - i pi. Its real and
  imaginary parts are a Hilbert pair; a +2q constant would break that.
  Dipole amplitudes for b and c share the same Fano shape and are real,
  so R_bc R_cb = R_bb R_cc holds identically.
* Atomic units, eps0 = 1/(4 pi): the prefactor -N/(2 eps0) is -2 pi N.
"""

from dataclasses import dataclass, asdict
import hashlib
import json

import numpy as np

from .params import two_photon_detuning, window_center

METHODS = ("closed_form", "quadrature", "steady_state")


class DegenerateInputError(ArithmeticError):
    """The resolvent denominator vanished exactly."""


class FiniteDifferenceError(ArithmeticError):
    pass


def prefactor(system):
    return -2.0 * np.pi * system.density_n


def fano_profile(energy, system, which):
    """|d_iE|^2 for the structured continuum at absolute energy ``energy``."""
    b = system.coupling(which)
    energy = np.asarray(energy, dtype=float)
    if system.flat_continuum:
        return np.full(energy.shape, b * b) if energy.ndim else b * b
    s = (energy - system.e_a) / system.gamma
    return b * b * (s + system.q) ** 2 / (s * s + 1.0)


def dipole_amplitude(offset, system, which):
    """Signed real amplitude d_iE at energy E_a + offset; squares to the profile."""
    b = system.coupling(which)
    offset = np.asarray(offset, dtype=float)
    if system.flat_continuum:
        return np.full(offset.shape, b)
    s = offset / system.gamma
    return b * (s + system.q) / np.sqrt(s * s + 1.0)


def fano_factor(x, system):
    """Dimensionless F(x) with R_ij = B_i B_j F(x)."""
    x = np.asarray(x, dtype=float)
    if system.flat_continuum:
        return np.full(x.shape, -1j * np.pi)
    q = system.q
    s = x / system.gamma
    num = s * (q * q - 1.0) - 2.0 * q - 1j * (s + q) ** 2
    return np.pi * num / (s * s + 1.0)


def fano_factor_derivative(x, system):
    """dF/dx in 1/hartree."""
    x = np.asarray(x, dtype=float)
    if system.flat_continuum:
        return np.zeros(x.shape, dtype=complex)
    q = system.q
    s = x / system.gamma
    num = s * (q * q - 1.0) - 2.0 * q - 1j * (s + q) ** 2
    dnum = (q * q - 1.0) - 2j * (s + q)
    den = s * s + 1.0
    return np.pi * (dnum * den - num * 2.0 * s) / (den * den) / system.gamma


def r_closed(x, system, i, j):
    """R_ij(x) for the continuum extended to -infinity."""
    return system.coupling(i) * system.coupling(j) * fano_factor(x, system)


def _control_strength(system, field):
    return 0.25 * field.eps2**2 * system.b_c**2


def chi_from_factor(factor, x, system, field):
    """chi given the Fano factor at each detuning (any route that produced it).

    Uses chi = pre * R_bb * u / (u - c F), u = Delta + i gamma_cb, which is
    algebraically equal to the termwise form and vanishes exactly at u = 0.
    """
    factor = np.asarray(factor, dtype=complex)
    pre = prefactor(system) * system.b_b**2
    if field.eps2 == 0.0:
        return pre * factor
    u = two_photon_detuning(x, system, field) + 1j * system.gamma_cb
    den = u - _control_strength(system, field) * factor
    if np.any(den == 0):
        bad = np.asarray(x)[den == 0] if np.ndim(x) else x
        raise DegenerateInputError(f"resolvent denominator vanishes at x = {bad}")
    return pre * factor * u / den


def chi(x, system, field):
    """Complex susceptibility at probe detuning(s) ``x``."""
    return chi_from_factor(fano_factor(x, system), x, system, field)


def chi_termwise(x, system, field):
    """Literal R_bb + (eps2^2/4) R_bc R_cb / D form; kept as a consistency check."""
    r_bb = r_closed(x, system, "b", "b")
    r_bc = r_closed(x, system, "b", "c")
    r_cb = r_closed(x, system, "c", "b")
    r_cc = r_closed(x, system, "c", "c")
    quarter = 0.25 * field.eps2**2
    d = two_photon_detuning(x, system, field) + 1j * system.gamma_cb - quarter * r_cc
    return prefactor(system) * (r_bb + quarter * r_bc * r_cb / d)


def chi_at_omega1(omega1, system, field):
    return chi(np.asarray(omega1, dtype=float) - system.resonance_omega1, system, field)


def dchi_dx(x, system, field):
    """Analytic derivative of chi with respect to the probe frequency."""
    x = np.asarray(x, dtype=float)
    f = fano_factor(x, system)
    fp = fano_factor_derivative(x, system)
    pre = prefactor(system) * system.b_b**2
    if field.eps2 == 0.0:
        return pre * fp
    c = _control_strength(system, field)
    u = two_photon_detuning(x, system, field) + 1j * system.gamma_cb
    den = u - c * f
    return pre * (fp * u * u - c * f * f) / (den * den)


def feature_scale(x, system, field):
    """Local frequency scale over which chi changes appreciably."""
    x = np.asarray(x, dtype=float)
    scale = np.full(x.shape, system.gamma)
    if field.eps2 > 0.0:
        u = two_photon_detuning(x, system, field) + 1j * system.gamma_cb
        den = np.abs(u - _control_strength(system, field) * fano_factor(x, system))
        scale = np.minimum(scale, den)
    return scale


def dre_chi_finite_difference(x, system, field, step=None):
    """Richardson-extrapolated central difference of Re chi."""
    x = np.asarray(x, dtype=float)
    h = 1e-3 * feature_scale(x, system, field) if step is None else np.broadcast_to(
        np.asarray(step, dtype=float), x.shape)
    if np.any(h <= 0) or np.any(x + h == x) or np.any(x + 0.5 * h == x):
        raise FiniteDifferenceError("finite-difference step underflows at this detuning")

    def central(hh):
        return (chi(x + hh, system, field).real - chi(x - hh, system, field).real) / (2.0 * hh)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def group_index(x, system, field, derivative_mode="analytic", step=None):
    """n_g = 1 + (omega1/2) d Re chi / d omega1 at detuning(s) ``x``."""
    x = np.asarray(x, dtype=float)
    omega1 = system.resonance_omega1 + x
    if derivative_mode == "analytic":
        slope = dchi_dx(x, system, field).real
    elif derivative_mode == "finite_difference":
        slope = dre_chi_finite_difference(x, system, field, step)
    else:
        raise ValueError(f"unknown derivative_mode {derivative_mode!r}")
    return 1.0 + 0.5 * omega1 * slope


@dataclass(frozen=True)
class SusceptibilitySpectrum:
    detunings: np.ndarray
    chi: np.ndarray
    method: str
    params_fingerprint: str
    omega_offset: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.detunings.shape != self.chi.shape:
            raise ValueError("grid and chi must have equal length")
        if self.detunings.size > 1 and not np.all(np.diff(self.detunings) > 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def omega1(self):
        return self.omega_offset + self.detunings

    def __len__(self):
        return self.detunings.size


def fingerprint(system, field):
    payload = {
        "system": asdict(system),
        "eps2": field.eps2,
        "omega2": field.omega2,
        "grid": hashlib.sha256(np.ascontiguousarray(field.detunings).tobytes()).hexdigest(),
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def compute_spectrum(system, field, method="closed_form", **options):
    """Evaluate chi on the field's probe grid with the chosen route.

    ``options`` are forwarded to the oracle routes (quadrature settings,
    eta for the discretized continuum).
    """
    x = field.detunings
    if method == "closed_form":
        values = chi(x, system, field)
    elif method == "quadrature":
        from .oracle import QuadratureSettings, fano_factor_quadrature

        settings = options.get("settings") or QuadratureSettings()
        factor = np.array([fano_factor_quadrature(xi, system, settings) for xi in x])
        values = chi_from_factor(factor, x, system, field)
    elif method == "steady_state":
        from .oracle import chi_steady_state_extrapolated

        values = chi_steady_state_extrapolated(x, system, field, **options)
    else:
        raise ValueError(f"unknown method {method!r}")
    values = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise ArithmeticError("non-finite susceptibility values")
    return SusceptibilitySpectrum(
        detunings=np.array(x),
        chi=values,
        method=method,
        params_fingerprint=fingerprint(system, field),
        omega_offset=system.resonance_omega1,
    )


def default_window_halfwidth(system, field):
    """Rough half-width of the transparency window, (eps2^2/4) B_c^2 |F| at the center."""
    if field.eps2 == 0.0:
        return 0.0
    xc = window_center(system, field)
    return float(_control_strength(system, field) * np.abs(fano_factor(xc, system)))


__all__ = [
    "DegenerateInputError",
    "SusceptibilitySpectrum",
    "chi",
    "chi_at_omega1",
    "chi_from_factor",
    "chi_termwise",
    "compute_spectrum",
    "dchi_dx",
    "dipole_amplitude",
    "fano_factor",
    "fano_profile",
    "group_index",
    "r_closed",
]
