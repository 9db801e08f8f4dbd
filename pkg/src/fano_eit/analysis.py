"""Transparency-window geometry, group index and width scaling fits."""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np
from scipy.optimize import brentq

from .params import ParameterError, window_center
from .susceptibility import chi, compute_spectrum, dchi_dx, group_index

MIN_POINTS_IN_WINDOW = 20
MIN_SWEEP_POINTS = 4
FIT_MAX_WIDTH_GAMMA = 10.0


class WindowResolutionError(ValueError):
    """The probe grid does not resolve the transparency window."""


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class WindowReport:
    center: float            # omega1 of the window center
    center_detuning: float   # same, as x = E_b + omega1 - E_a
    width: float
    width_over_gamma: float
    threshold_used: float
    n_g_center: float
    dispersion_slope: float
    fano_zero: float
    left_edge: float = math.nan
    right_edge: float = math.nan
    points_inside: int = 0

    def to_json(self):
        return {
            "center_au": self.center,
            "center_detuning_au": self.center_detuning,
            "width_au": self.width,
            "width_over_gamma": self.width_over_gamma,
            "n_g_center": self.n_g_center,
            "threshold_used": self.threshold_used,
            "fano_zero_au": self.fano_zero,
            "dispersion_slope_au": self.dispersion_slope,
            "left_edge_detuning_au": self.left_edge,
            "right_edge_detuning_au": self.right_edge,
            "points_inside": self.points_inside,
        }


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float
    swept_variable: str
    values: tuple = dc_field(default=())
    widths: tuple = dc_field(default=())

    def to_json(self):
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "swept_variable": self.swept_variable,
            "values": list(self.values),
            "widths_au": list(self.widths),
        }


def fano_zero_detuning(system):
    return -system.q * system.gamma


def _absorption_ratio(x, system, field):
    ref = chi(x, system, field.with_(eps2=0.0)).imag
    return chi(x, system, field).imag / ref


def find_window(spectrum, system, field, threshold_fraction=0.5):
    """Locate the transparency window around the two-photon resonance.

    The window is the contiguous interval about Delta = 0 where
    Im chi <= threshold_fraction * Im chi(eps2 = 0). Edges are bracketed on
    the grid and refined by root finding on the closed form (linear
    interpolation for spectra from the numerical routes).
    """
    if field.eps2 <= 0:
        raise ParameterError("a transparency window needs eps2 > 0")
    if not 0 < threshold_fraction < 1:
        raise ParameterError("threshold_fraction must lie in (0, 1)")
    x = spectrum.detunings
    xc = window_center(system, field)
    ref = chi(x, system, field.with_(eps2=0.0)).imag
    ratio = spectrum.chi.imag / ref
    above = ratio > threshold_fraction

    right = np.flatnonzero((x > xc) & above)
    left = np.flatnonzero((x < xc) & above)
    if right.size == 0 or left.size == 0:
        raise WindowResolutionError(
            f"window extends past the grid; widen the grid beyond +-{np.ptp(x) / 2:.3e} a.u.")
    r_out, l_out = right[0], left[-1]
    inside = r_out - l_out - 1
    if inside < MIN_POINTS_IN_WINDOW:
        needed = (x[r_out] - x[l_out]) / (2 * MIN_POINTS_IN_WINDOW)
        raise WindowResolutionError(
            f"only {inside} grid points inside the window; use spacing <= {needed:.3e} a.u. "
            f"over +-{x[r_out] - xc:.3e} a.u. about x = {xc:.3e}")

    def edge(i_in, i_out):
        a, b = x[i_in], x[i_out]
        if spectrum.method == "closed_form":
            return brentq(lambda t: _absorption_ratio(t, system, field) - threshold_fraction,
                          a, b, xtol=1e-15 * max(abs(b - a), 1e-300) + 1e-300, rtol=1e-14)
        ra, rb = ratio[i_in], ratio[i_out]
        return a + (threshold_fraction - ra) * (b - a) / (rb - ra)

    x_right = edge(r_out - 1, r_out)
    x_left = edge(l_out + 1, l_out)
    width = x_right - x_left
    slope = float(dchi_dx(xc, system, field).real)
    return WindowReport(
        center=system.resonance_omega1 + xc,
        center_detuning=float(xc),
        width=float(width),
        width_over_gamma=float(width / system.gamma),
        threshold_used=threshold_fraction,
        n_g_center=float(group_index(xc, system, field)),
        dispersion_slope=slope,
        fano_zero=system.resonance_omega1 + fano_zero_detuning(system),
        left_edge=float(x_left),
        right_edge=float(x_right),
        points_inside=int(inside),
    )


def predicted_center_group_index(system, field):
    """Small-detuning expansion: 1 + (omega1/2) 2 pi N 4 B_b^2 / (eps2^2 B_c^2)."""
    omega1 = system.resonance_omega1 + window_center(system, field)
    slope = 2 * math.pi * system.density_n * 4 * system.b_b**2 / (field.eps2**2 * system.b_c**2)
    return 1.0 + 0.5 * omega1 * slope


def window_for(system, field, threshold_fraction=0.5):
    """Window of a closed-form spectrum on the default grid for these parameters."""
    from .presets import default_grid

    grid = default_grid(system, field.eps2, field.omega2)
    fld = field.with_(detunings=grid)
    return find_window(compute_spectrum(system, fld), system, fld, threshold_fraction)


def _swept(system, field, variable, value):
    if variable == "eps2":
        return system, field.with_(eps2=float(value))
    if variable == "q":
        return system.with_(q=float(value)), field
    raise ParameterError(f"unknown sweep variable {variable!r}")


def sweep_point(system, field, variable, value, threshold_fraction=0.5):
    sys_v, fld_v = _swept(system, field, variable, value)
    return window_for(sys_v, fld_v, threshold_fraction)


def fit_power_law(values, widths, variable, gamma=None):
    values = np.asarray(values, dtype=float)
    widths = np.asarray(widths, dtype=float)
    keep = np.isfinite(widths) & (widths > 0)
    if gamma is not None:
        keep &= widths <= FIT_MAX_WIDTH_GAMMA * gamma
    if keep.sum() < MIN_SWEEP_POINTS:
        raise SweepError(f"only {int(keep.sum())} usable sweep points; need {MIN_SWEEP_POINTS}")
    lx, ly = np.log(values[keep]), np.log(widths[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(
        exponent=float(slope), prefactor=float(np.exp(intercept)),
        r_squared=float(min(max(r2, 0.0), 1.0)), swept_variable=variable,
        values=tuple(float(v) for v in values), widths=tuple(float(w) for w in widths))


def width_scaling_sweep(system, base_field, variable, values, threshold_fraction=0.5):
    """Log-log fit of window width against eps2 or q."""
    values = list(values)
    if len(values) < MIN_SWEEP_POINTS:
        raise SweepError(f"a scaling fit needs at least {MIN_SWEEP_POINTS} values, got {len(values)}")
    widths = []
    for v in values:
        try:
            widths.append(sweep_point(system, base_field, variable, v, threshold_fraction).width)
        except WindowResolutionError as exc:
            raise SweepError(f"{variable} = {v:g}: {exc}") from exc
    return fit_power_law(values, widths, variable, gamma=system.gamma)


def discrete_limit_width(gamma_upper, eps2):
    """Window width eps2^2 / Gamma for a discrete upper level with coherence decay Gamma."""
    if gamma_upper <= 0:
        raise ParameterError("gamma_upper must be > 0")
    return eps2**2 / gamma_upper


def flat_continuum_width(system, eps2, which="c"):
    """Width 2 pi eps2^2 B_j^2 / 4 induced on a lower state by a flat continuum."""
    return 2.0 * math.pi * eps2**2 * system.coupling(which) ** 2 / 4.0


def comparable_q(gamma_upper):
    """q at which eps2^2 q^2 equals eps2^2 / Gamma (order-of-magnitude estimates)."""
    return 1.0 / math.sqrt(gamma_upper)
