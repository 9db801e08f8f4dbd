"""Numerical cross-checks of the closed-form susceptibility.

Two routes, independent of the closed form and of each other:

* principal-value quadrature of the continuum integral with the Fano
  profile, optionally truncated at the ionization threshold;
* a discretized continuum ("bins") in which the stationary first-order
  density-matrix equations are solved as a linear system and the
  polarization is read off the bin coherences.

The profile is split as |d|^2 = B^2 (1 + h(s)), s = (E - E_a)/gamma. The
flat part gives -i pi B^2 at the pole; its real part is a constant level
shift (divergent for an unbounded continuum) and is dropped, which is
exactly what extending the integral to -infinity does. Only the
structured part h, which decays like 1/s, is integrated numerically.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate

from .params import two_photon_detuning
from .susceptibility import chi as chi_closed, dipole_amplitude, prefactor
from .units import EPS0_AU


class QuadratureError(ArithmeticError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class ThresholdError(ValueError):
    """Pole too close to (or below) the finite lower limit of the continuum."""


class InfeasibleResolution(ValueError):
    pass


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    pole_exclusion_halfwidth: float = 1e-6
    lower_limit: float = 0.0
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (0 < self.abs_tol < 1 and 0 < self.rel_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.pole_exclusion_halfwidth <= 0:
            raise ValueError("pole_exclusion_halfwidth must be > 0")
        if self.lower_limit != -math.inf and not math.isfinite(self.lower_limit):
            raise ValueError("lower_limit must be finite or -inf")


EXTENDED = QuadratureSettings(lower_limit=-math.inf)


def _structure(s, q):
    """h(s) = profile/B^2 - 1."""
    return (2.0 * q * s + q * q - 1.0) / (s * s + 1.0)


def _quad(f, a, b, settings, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        kw = {}
        if points is not None and np.isfinite(a) and np.isfinite(b):
            pts = [p for p in points if a < p < b]
            if pts:
                kw["points"] = pts
        val, err = integrate.quad(
            f, a, b, epsabs=settings.abs_tol * 1e-2, epsrel=settings.rel_tol * 1e-2,
            limit=settings.max_subdivisions, **kw)
    return val, err


def _geometric_pieces(start, stop, first, factor=8.0):
    """Breakpoints between start and stop growing geometrically away from ``start``."""
    direction = 1.0 if stop > start else -1.0
    edges = [start]
    step = first
    while True:
        nxt = start + direction * step
        if not np.isfinite(stop):
            if step > 1e14:
                edges.append(stop)
                break
        elif direction * (stop - nxt) <= 0:
            edges.append(stop)
            break
        edges.append(nxt)
        step *= factor
    return edges


def fano_factor_quadrature(x, system, settings=QuadratureSettings()):
    """F(x) from the continuum integral, R_ij = B_i B_j F."""
    x = float(x)
    g = system.gamma
    lower = settings.lower_limit
    if np.isfinite(lower):
        gap = (system.e_a + x) - lower
        if gap <= settings.pole_exclusion_halfwidth:
            raise ThresholdError(
                f"pole at E = {system.e_a + x:.6g} lies within "
                f"{settings.pole_exclusion_halfwidth:g} of the lower limit {lower:g}")
        s_lo = (lower - system.e_a) / g
    else:
        s_lo = -math.inf

    if system.flat_continuum:
        return complex(0.0, -math.pi)

    q = system.q
    s_p = x / g
    width = 50.0 * (abs(s_p) + abs(q) + 1.0)
    if np.isfinite(s_lo):
        width = min(width, s_p - s_lo)

    total, err = 0.0, 0.0

    # symmetric pairing about the pole removes the singularity
    def near(t):
        return -(_structure(s_p + t, q) - _structure(s_p - t, q)) / t

    features = sorted({abs(s_p), abs(s_p + q)})
    edges = [0.0] + [f for f in features if 0.0 < f < width] + [width]
    for a, b in zip(edges[:-1], edges[1:]):
        for lo, hi in _pairs(_geometric_pieces(a, b, max(1.0, 0.25 * (b - a)), 4.0)):
            v, e = _quad(near, lo, hi, settings)
            total += v
            err += e

    def outer(s):
        return _structure(s, q) / (s_p - s)

    for lo, hi in _pairs(_geometric_pieces(s_p + width, math.inf, width)):
        v, e = _quad(outer, lo, hi, settings)
        total += v
        err += e
    if s_p - width > s_lo:
        for lo, hi in _pairs(_geometric_pieces(s_p - width, s_lo, width)):
            v, e = _quad(outer, hi, lo, settings)
            total += v
            err += e

    allowed = max(settings.abs_tol, settings.rel_tol * abs(total))
    if err > allowed:
        raise QuadratureError(f"principal value did not converge at x = {x:g}", err)
    # Sokhotski-Plemelj: -i pi (1 + h) at the pole
    return complex(total, -math.pi * (1.0 + _structure(s_p, q)))


def _pairs(edges):
    return list(zip(edges[:-1], edges[1:]))


def r_quadrature(x, system, i, j, settings=QuadratureSettings()):
    return system.coupling(i) * system.coupling(j) * fano_factor_quadrature(x, system, settings)


# --- discretized continuum -------------------------------------------------


@dataclass(frozen=True)
class BinSet:
    """Discretized continuum. ``offsets`` are energies relative to E_a."""

    offsets: np.ndarray
    weights: np.ndarray
    eta: float
    e_ref: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if self.offsets.shape != self.weights.shape:
            raise ValueError("offsets and weights must have equal length")
        if not np.all(np.diff(self.offsets) > 0):
            raise ValueError("bin energies must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("bin weights must be positive")

    @property
    def energies(self):
        return self.e_ref + self.offsets

    def __len__(self):
        return self.offsets.size

    def max_spacing_near(self, offset, radius):
        inside = np.abs(self.offsets - offset) <= radius
        idx = np.flatnonzero(inside)
        if idx.size < 2:
            return math.inf
        lo, hi = max(idx[0] - 1, 0), min(idx[-1] + 1, self.offsets.size - 1)
        return float(np.max(np.diff(self.offsets[lo:hi + 1])))


SPACING_PER_ETA = 5.0
COARSE_SPAN_GAMMA = 1e4
DENSE_SPAN_GAMMA = 50.0
POLE_SPAN_ETA = 50.0
MIN_COARSE_PER_SIDE = 20


def _dense_region(system, detuning_range, eta):
    g = system.gamma
    x_lo, x_hi = detuning_range
    lo = min(-DENSE_SPAN_GAMMA * g, x_lo - POLE_SPAN_ETA * eta)
    hi = max(DENSE_SPAN_GAMMA * g, x_hi + POLE_SPAN_ETA * eta)
    h = eta / SPACING_PER_ETA
    count = int(math.ceil((hi - lo) / h)) + 2
    return lo, hi, count


def required_bins(system, detuning_range, eta, coarse_per_side=300):
    return _dense_region(system, detuning_range, eta)[2] + 2 * coarse_per_side


def build_binset(system, detuning_range, n_bins, eta):
    """Bins dense (spacing < eta/5) around the resonance and every pole in
    ``detuning_range``; geometrically coarsening out to +-1e4 gamma."""
    if n_bins < 100:
        raise ValueError("n_bins must be >= 100")
    if eta <= 0:
        raise ValueError("eta must be > 0")
    x_lo, x_hi = float(np.min(detuning_range)), float(np.max(detuning_range))
    g = system.gamma
    lo, hi, count = _dense_region(system, (x_lo, x_hi), eta)
    per_side = (n_bins - count) // 2
    if per_side < MIN_COARSE_PER_SIDE:
        raise InfeasibleResolution(
            f"{n_bins} bins cannot meet spacing eta/{SPACING_PER_ETA:g}; "
            f"need at least {count + 2 * MIN_COARSE_PER_SIDE}")
    dense = np.linspace(lo, hi, count)
    h = dense[1] - dense[0]
    left_edge = max(min(-COARSE_SPAN_GAMMA * g, lo - 100 * g), -system.e_a * (1 - 1e-9))
    right_edge = max(COARSE_SPAN_GAMMA * g, hi + 100 * g)
    left = lo - np.geomspace(h, max(lo - left_edge, 2 * h), per_side)[::-1]
    right = hi + np.geomspace(h, max(right_edge - hi, 2 * h), per_side)
    offsets = np.concatenate([left, dense, right])
    gaps = np.diff(offsets)
    weights = np.empty_like(offsets)
    weights[0] = 0.5 * gaps[0]
    weights[-1] = 0.5 * gaps[-1]
    weights[1:-1] = 0.5 * (gaps[:-1] + gaps[1:])
    return BinSet(offsets=offsets, weights=weights, eta=float(eta), e_ref=system.e_a)


def auto_binset(system, detuning_range, eta):
    x_lo, x_hi = float(np.min(detuning_range)), float(np.max(detuning_range))
    return build_binset(system, (x_lo, x_hi), required_bins(system, (x_lo, x_hi), eta), eta)


@dataclass(frozen=True)
class StationaryState:
    sigma_eb: np.ndarray
    sigma_cb: complex
    probe_amplitude: float


def _folded_dipoles(system, bins):
    root_w = np.sqrt(bins.weights)
    return (root_w * dipole_amplitude(bins.offsets, system, "b"),
            root_w * dipole_amplitude(bins.offsets, system, "c"))


def _system_matrix(system, field, x, bins, eps1):
    """Dense form of the stationary equations in the unknowns
    (sqrt(w_k) sigma_k ..., sigma_cb)."""
    db, dc = _folded_dipoles(system, bins)
    n = len(bins)
    a = np.zeros((n + 1, n + 1), dtype=complex)
    a[np.arange(n), np.arange(n)] = bins.offsets - x - 1j * bins.eta
    a[:n, n] = -0.5 * dc * field.eps2
    a[n, :n] = -0.5 * field.eps2 * dc
    delta = float(two_photon_detuning(x, system, field))
    a[n, n] = -(delta + 1j * system.gamma_cb)
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[:n] = 0.5 * db * eps1
    return a, rhs


def stationary_solve(system, field, x, bins, eps1=1e-12, dense=False):
    """Stationary coherences of the discretized first-order equations at detuning ``x``.

    The default path eliminates the bins (each couples only to sigma_cb)
    and solves one scalar equation; ``dense=True`` runs a full LU solve.
    """
    x = float(x)
    root_w = np.sqrt(bins.weights)
    if dense:
        a, rhs = _system_matrix(system, field, x, bins, eps1)
        try:
            sol = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError:
            raise SingularSystemError(f"singular stationary system at x = {x:g}")
        return StationaryState(sigma_eb=sol[:-1] / root_w, sigma_cb=complex(sol[-1]),
                               probe_amplitude=eps1)

    db, dc = _folded_dipoles(system, bins)
    resolvent = 1.0 / (bins.offsets - x - 1j * bins.eta)
    sigma_cb = 0.0j
    if field.eps2 != 0.0:
        s_cb = np.sum(dc * db * resolvent)
        s_cc = np.sum(dc * dc * resolvent)
        u = complex(two_photon_detuning(x, system, field)) + 1j * system.gamma_cb
        den = u + 0.25 * field.eps2**2 * s_cc
        if den == 0:
            raise SingularSystemError(f"singular stationary system at x = {x:g}")
        sigma_cb = -0.25 * eps1 * field.eps2 * s_cb / den
    folded = 0.5 * (db * eps1 + dc * field.eps2 * sigma_cb) * resolvent
    return StationaryState(sigma_eb=folded / root_w, sigma_cb=complex(sigma_cb),
                           probe_amplitude=eps1)


def residual(state, system, field, x, bins):
    """Relative residual of the defining linear system."""
    a, rhs = _system_matrix(system, field, x, bins, state.probe_amplitude)
    sol = np.concatenate([state.sigma_eb * np.sqrt(bins.weights), [state.sigma_cb]])
    r = a @ sol - rhs
    scale = np.linalg.norm(np.abs(a) @ np.abs(sol)) + np.linalg.norm(rhs)
    return float(np.linalg.norm(r) / scale) if scale else 0.0


def chi_from_state(state, system, bins):
    """chi = (N/eps0) sum_k w_k d_bk sigma_k / eps1."""
    db = dipole_amplitude(bins.offsets, system, "b")
    p = np.sum(bins.weights * db * state.sigma_eb)
    return complex(system.density_n / EPS0_AU * p / state.probe_amplitude)


def chi_steady_state(x, system, field, eta, bins=None, eps1=1e-12):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if bins is None:
        bins = auto_binset(system, (x.min(), x.max()), eta)
    out = np.empty(x.shape, dtype=complex)
    for k, xk in enumerate(x):
        out[k] = chi_from_state(stationary_solve(system, field, xk, bins, eps1), system, bins)
    return out


def default_eta(system):
    return 0.04 * system.gamma


def chi_steady_state_extrapolated(x, system, field, eta=None, eps1=1e-12):
    """Richardson extrapolation in eta from eta and eta/2 (error linear in eta)."""
    eta = default_eta(system) if eta is None else eta
    coarse = chi_steady_state(x, system, field, eta, eps1=eps1)
    fine = chi_steady_state(x, system, field, 0.5 * eta, eps1=eps1)
    return 2.0 * fine - coarse


def convergence_table(x, system, field, etas, reference=None):
    """Rows (eta, n_bins, re_chi, im_chi, deviation) at a single detuning.

    Deviation is |chi - reference|, reference defaulting to the closed form.
    """
    x = float(x)
    ref = complex(chi_closed(x, system, field)) if reference is None else reference
    rows = []
    for eta in etas:
        bins = auto_binset(system, (x, x), eta)
        val = chi_steady_state([x], system, field, eta, bins=bins)[0]
        rows.append((float(eta), len(bins), val.real, val.imag, abs(val - ref)))
    return rows


def observed_orders(rows):
    """log2 of successive deviation ratios for a halving eta sequence."""
    dev = np.array([r[4] for r in rows])
    return np.log2(dev[:-1] / dev[1:])


def peak_reference(system, field):
    """Peak |Im chi| with the control field off, a scale for absolute tolerances."""
    q = system.q
    b2 = system.b_b**2
    if system.flat_continuum:
        return abs(prefactor(system)) * b2 * math.pi
    return abs(prefactor(system)) * b2 * math.pi * (1.0 + q * q)
