"""Validated parameter records for the atomic medium and the fields.

The probe frequency is carried as a detuning ``x = E_b + omega1 - E_a``
from the autoionizing resonance. Near omega1 ~ 0.3 a.u. a float64 has a
spacing of ~5e-17 a.u., too coarse for windows of 1e-13 a.u.; the
detuning keeps full relative precision.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np


class ParameterError(ValueError):
    """Raised when a parameter record violates its invariants."""


def _finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class AtomicSystem:
    """Lambda-like medium: bound states b, c below threshold, Fano continuum above.

    All energies in hartree, ``density_n`` in atoms per cubic bohr.
    ``flat_continuum`` switches the dipole profile to the structureless
    limit instead of relying on a large-q value.
    """

    e_b: float
    e_c: float
    e_a: float
    gamma: float
    q: float
    b_b: float
    b_c: float
    gamma_cb: float
    density_n: float
    flat_continuum: bool = False

    def __post_init__(self):
        for name in ("e_b", "e_c", "e_a", "gamma", "q", "b_b", "b_c", "gamma_cb", "density_n"):
            _finite(name, getattr(self, name))
        if self.gamma <= 0:
            raise ParameterError("gamma must be > 0")
        if self.b_b <= 0 or self.b_c <= 0:
            raise ParameterError("b_b and b_c must be > 0")
        if self.gamma_cb < 0:
            raise ParameterError("gamma_cb must be >= 0")
        if self.density_n <= 0:
            raise ParameterError("density_n must be > 0")
        if self.e_b >= 0 or self.e_c >= 0:
            raise ParameterError("bound states must lie below the threshold at 0")
        if self.e_a <= 0:
            raise ParameterError("autoionizing resonance must lie above the threshold")

    def coupling(self, which):
        if which == "b":
            return self.b_b
        if which == "c":
            return self.b_c
        raise ParameterError(f"unknown state {which!r}, expected 'b' or 'c'")

    @property
    def resonance_omega1(self):
        """Probe frequency at which x = 0 (hbar = 1)."""
        return self.e_a - self.e_b

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class FieldConfig:
    """Control field and probe grid.

    ``detunings`` are probe detunings x = E_b + omega1 - E_a (hartree),
    strictly increasing.
    """

    eps2: float
    omega2: float
    detunings: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        _finite("eps2", self.eps2)
        _finite("omega2", self.omega2)
        if self.eps2 < 0:
            raise ParameterError("eps2 must be >= 0")
        if self.omega2 <= 0:
            raise ParameterError("omega2 must be > 0")
        grid = np.array(self.detunings, dtype=float).ravel()
        if grid.size == 0:
            raise ParameterError("probe grid must be nonempty")
        if not np.all(np.isfinite(grid)):
            raise ParameterError("probe grid contains non-finite values")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ParameterError("probe grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "detunings", grid)

    def omega1(self, system):
        return system.resonance_omega1 + self.detunings

    def with_(self, **changes):
        return replace(self, **changes)


def two_photon_offset(system, field):
    """Delta - x, i.e. E_a - E_c - omega2. Zero when the control field is
    aligned so that the two-photon resonance sits on the autoionizing state."""
    return (system.e_a - system.e_c) - field.omega2


def two_photon_detuning(x, system, field):
    return np.asarray(x, dtype=float) + two_photon_offset(system, field)


def window_center(system, field):
    """Detuning x at which the two-photon detuning vanishes."""
    return 0.0 - two_photon_offset(system, field)


def detuning_from_omega1(omega1, system):
    return (system.e_b - system.e_a) + np.asarray(omega1, dtype=float)
