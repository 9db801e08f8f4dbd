"""Frequency-domain propagation of a weak probe pulse through the dressed medium.

The medium is homogeneous and linear in the probe, so one multiplication
by the transfer function exp[i (omega/c) (chi/2) L] per spectral component
is exact within the model (refractive index n = 1 + chi/2 since |chi| << 1).
The vacuum phase omega L / c is left out, so delays are measured relative
to free-space transit.
"""

from dataclasses import dataclass
import math

import numpy as np

from .analysis import find_window
from .params import window_center
from .susceptibility import chi as chi_closed, group_index
from .units import C_AU

FOUR_LN2 = 4.0 * math.log(2.0)
EDGE_CLEARANCE_FWHM = 3.0


class SupportError(ValueError):
    """The pulse spectrum reaches frequencies where chi was not computed."""


class PulseGridError(ValueError):
    pass


@dataclass(frozen=True)
class ProbePulse:
    carrier: float             # probe detuning x of the carrier
    envelope_fwhm_time: float  # intensity FWHM, a.u. of time
    samples: np.ndarray
    grid_dt: float
    t0: float = 0.0            # time of the first sample

    def __post_init__(self):
        if self.grid_dt <= 0 or self.envelope_fwhm_time <= 0:
            raise ValueError("grid_dt and envelope_fwhm_time must be > 0")
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 8:
            raise ValueError("samples must be a 1-d array with at least 8 points")
        object.__setattr__(self, "samples", samples)

    @property
    def times(self):
        return self.t0 + self.grid_dt * np.arange(self.samples.size)

    @property
    def spectral_fwhm(self):
        """Angular-frequency FWHM of the spectral intensity (Gaussian envelope)."""
        return FOUR_LN2 / self.envelope_fwhm_time

    def offsets(self):
        """Angular offsets Omega of the FFT bins; the physical frequency is carrier - Omega."""
        return 2.0 * np.pi * np.fft.fftfreq(self.samples.size, self.grid_dt)

    def with_samples(self, samples):
        return ProbePulse(self.carrier, self.envelope_fwhm_time, samples, self.grid_dt, self.t0)


def gaussian_pulse(carrier, fwhm_time, span_fwhm=40.0, samples_per_fwhm=32, lead_fwhm=8.0,
                   amplitude=1.0):
    """Transform-limited Gaussian, centered ``lead_fwhm`` widths after the grid start."""
    dt = fwhm_time / samples_per_fwhm
    n = int(round(span_fwhm * samples_per_fwhm))
    t = dt * np.arange(n)
    tc = lead_fwhm * fwhm_time
    env = amplitude * np.exp(-2.0 * math.log(2.0) * ((t - tc) / fwhm_time) ** 2)
    return ProbePulse(carrier=float(carrier), envelope_fwhm_time=float(fwhm_time),
                      samples=env.astype(complex), grid_dt=dt, t0=0.0)


def pulse_for_window(system, field, window_width, bandwidth_fraction=0.1, **kw):
    """Pulse at the window center whose spectral FWHM is a fraction of the window width."""
    fwhm_time = FOUR_LN2 / (bandwidth_fraction * window_width)
    return gaussian_pulse(window_center(system, field), fwhm_time, **kw)


@dataclass(frozen=True)
class PropagationResult:
    delay: float
    transmitted_energy_fraction: float
    output_samples: np.ndarray
    input_centroid: float
    output_centroid: float


def centroid(times, samples):
    weight = np.abs(samples) ** 2
    return float(np.sum(times * weight) / np.sum(weight))


def _chi_from_spectrum(spectrum, x):
    grid = spectrum.detunings
    if np.min(x) < grid[0] or np.max(x) > grid[-1]:
        raise SupportError(
            f"pulse spectrum spans [{np.min(x):.3e}, {np.max(x):.3e}] but chi is known on "
            f"[{grid[0]:.3e}, {grid[-1]:.3e}]")
    return np.interp(x, grid, spectrum.chi.real) + 1j * np.interp(x, grid, spectrum.chi.imag)


def propagate(pulse, system, field, length_l, spectrum=None, chi_fn=None, support_level=1e-10):
    """Transmit ``pulse`` through ``length_l`` bohr of medium.

    chi comes from ``chi_fn(x)`` if given, else from ``spectrum`` by linear
    interpolation (its grid must cover the pulse's spectral support),
    else from the closed form.
    """
    if length_l < 0:
        raise ValueError("length must be >= 0")
    spec_in = np.fft.fft(pulse.samples)
    x = pulse.carrier - pulse.offsets()
    if chi_fn is not None:
        chi_vals = np.asarray(chi_fn(x), dtype=complex)
    elif spectrum is not None:
        mag = np.abs(spec_in)
        support = mag > support_level * mag.max()
        chi_vals = np.zeros(x.shape, dtype=complex)
        chi_vals[support] = _chi_from_spectrum(spectrum, x[support])
    else:
        chi_vals = chi_closed(x, system, field)
    omega = system.resonance_omega1 + x
    transfer = np.exp(1j * (omega / C_AU) * (0.5 * chi_vals) * length_l)
    out = np.fft.ifft(spec_in * transfer)

    t = pulse.times
    c_in, c_out = centroid(t, pulse.samples), centroid(t, out)
    clearance = EDGE_CLEARANCE_FWHM * pulse.envelope_fwhm_time
    if c_out - clearance < t[0] or c_out + clearance > t[-1]:
        raise PulseGridError(
            f"delayed pulse centroid {c_out:.3e} is within {EDGE_CLEARANCE_FWHM:g} FWHM of "
            f"the time-grid edge [{t[0]:.3e}, {t[-1]:.3e}]; lengthen the grid")
    energy = float(np.sum(np.abs(out) ** 2) / np.sum(np.abs(pulse.samples) ** 2))
    return PropagationResult(delay=c_out - c_in, transmitted_energy_fraction=energy,
                             output_samples=out, input_centroid=c_in, output_centroid=c_out)


def delay_prediction(system, field, length_l):
    """(n_g - 1) L / c at the window center."""
    n_g = float(group_index(window_center(system, field), system, field))
    return (n_g - 1.0) * length_l / C_AU


def is_narrowband(pulse, window_width, fraction=0.3):
    return pulse.spectral_fwhm < fraction * window_width


def delay_run(system, field, spectrum, length_l=None, bandwidth_fraction=0.1,
              delay_in_fwhm=2.0):
    """Measured vs predicted delay for a pulse sized to the window of ``spectrum``.

    Without an explicit length, L is chosen so the predicted delay equals
    ``delay_in_fwhm`` pulse durations.
    """
    report = find_window(spectrum, system, field)
    pulse = pulse_for_window(system, field, report.width, bandwidth_fraction)
    if length_l is None:
        n_g = report.n_g_center
        length_l = delay_in_fwhm * pulse.envelope_fwhm_time * C_AU / max(n_g - 1.0, 1e-30)
    # keep the delayed pulse clear of the grid edge
    predicted = delay_prediction(system, field, length_l)
    needed = 8.0 + predicted / pulse.envelope_fwhm_time + 8.0
    if needed > 40.0:
        pulse = pulse_for_window(system, field, report.width, bandwidth_fraction,
                                 span_fwhm=math.ceil(needed))
    result = propagate(pulse, system, field, length_l)
    return pulse, result, predicted, length_l
