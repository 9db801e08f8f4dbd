"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 numerical failure (including an
oracle check outside tolerance).
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import io as fio
from .analysis import (MIN_SWEEP_POINTS, SweepError, WindowResolutionError, find_window,
                       fit_power_law, sweep_point)
from .oracle import (EXTENDED, InfeasibleResolution, QuadratureError, QuadratureSettings,
                     SingularSystemError, ThresholdError, chi_steady_state_extrapolated,
                     convergence_table, fano_factor_quadrature, peak_reference)
from .params import ParameterError, window_center
from .presets import (PRESETS, default_grid, paper_preset, params_from_mapping,
                      params_to_mapping, read_param_mapping, uniform_grid)
from .propagation import (PulseGridError, SupportError, delay_prediction, gaussian_pulse,
                          pulse_for_window, propagate)
from .susceptibility import (DegenerateInputError, FiniteDifferenceError, chi, compute_spectrum,
                             fano_factor)
from .units import cm_to_bohr, ns_to_au_time

log = logging.getLogger("fano_eit")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

METHOD_NAMES = {"closed": "closed_form", "quadrature": "quadrature", "steady": "steady_state"}

# oracle pass thresholds
QUADRATURE_REL_TOL = 1e-6
STEADY_PEAK_FRACTION = 0.02

INPUT_ERRORS = (ParameterError, OSError, ThresholdError, InfeasibleResolution)
NUMERIC_ERRORS = (ArithmeticError, QuadratureError, SingularSystemError, WindowResolutionError,
                  SweepError, DegenerateInputError, FiniteDifferenceError, SupportError,
                  PulseGridError)


class CheckFailed(Exception):
    pass


def _add_common(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--params", type=Path, help="key = value parameter file")
    p.add_argument("--method", choices=tuple(METHOD_NAMES), default="closed")
    p.add_argument("--eps2", type=float, help="override control amplitude (a.u.)")
    p.add_argument("--q", type=float, help="override Fano asymmetry")
    p.add_argument("--gamma-cb", type=float, help="override coherence relaxation (a.u.)")
    p.add_argument("--grid-center", type=float, help="probe grid center, detuning from E_a - E_b (a.u.)")
    p.add_argument("--grid-halfwidth", type=float, help="probe grid half-width (a.u.)")
    p.add_argument("--grid-points", type=int, help="number of probe grid points")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--eta", type=float, help="continuum smoothing for --method steady (a.u.)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fano-eit",
        description="Susceptibility of a Lambda-like medium whose upper level is a Fano continuum.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="chi on the probe grid -> spectrum.csv, summary.json")
    _add_common(p)

    p = sub.add_parser("window", help="transparency-window report -> window.json")
    _add_common(p)
    p.add_argument("--threshold", type=float, default=0.5)

    p = sub.add_parser("sweep", help="width scaling fit -> scaling_fit.json, sweep_windows.csv")
    _add_common(p)
    p.add_argument("--sweep-var", choices=("eps2", "q"), required=True)
    p.add_argument("--sweep-values", required=True, help="comma-separated values")
    p.add_argument("--threshold", type=float, default=0.5)

    p = sub.add_parser("oracle", help="closed form vs quadrature vs steady state -> oracle_report.json")
    _add_common(p)
    p.add_argument("--flat-continuum", action="store_true", help="structureless continuum")
    p.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)

    p = sub.add_parser("propagate", help="pulse delay through the medium -> propagation.json")
    _add_common(p)
    p.add_argument("--length-cm", type=float, required=True)
    p.add_argument("--pulse-fwhm-ns", type=float,
                   help="intensity FWHM; default gives a spectral width of 0.1 x window")
    return parser


def resolve(args):
    """Apply preset/file, overrides and grid choice. Returns (system, field, provenance)."""
    if args.preset:
        system, field = paper_preset(args.preset)
        mapping = params_to_mapping(system, field)
        explicit_grid = None
    else:
        mapping = read_param_mapping(args.params)
        explicit_grid = tuple(mapping.get(k) for k in ("grid_center_au", "grid_halfwidth_au",
                                                       "grid_points"))
        if explicit_grid[0] is None:
            explicit_grid = None
        system, field = params_from_mapping(mapping)

    if args.q is not None:
        system = system.with_(q=args.q)
    if args.gamma_cb is not None:
        system = system.with_(gamma_cb=args.gamma_cb)
    if args.eps2 is not None:
        field = field.with_(eps2=args.eps2)
    if getattr(args, "flat_continuum", False):
        system = system.with_(flat_continuum=True)

    grid_flags = (args.grid_center, args.grid_halfwidth, args.grid_points)
    if any(v is not None for v in grid_flags):
        center = 0.0 if args.grid_center is None else args.grid_center
        half = 50 * system.gamma if args.grid_halfwidth is None else args.grid_halfwidth
        points = 4001 if args.grid_points is None else args.grid_points
        grid_spec = (center, half, points)
        detunings = uniform_grid(*grid_spec)
    elif explicit_grid is not None:
        grid_spec = explicit_grid
        detunings = uniform_grid(*grid_spec)
    else:
        grid_spec = None
        detunings = default_grid(system, field.eps2, field.omega2)
    field = field.with_(detunings=detunings)

    provenance = {
        "preset": args.preset,
        "params_file": str(args.params) if args.params else None,
        "params": params_to_mapping(system, field, grid_spec),
        "flat_continuum": system.flat_continuum,
        "grid": {"kind": "uniform" if grid_spec else "default_nested",
                 "points": int(detunings.size),
                 "min_detuning_au": float(detunings[0]),
                 "max_detuning_au": float(detunings[-1])},
    }
    return system, field, provenance


def _outdir(args):
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ParameterError(f"output directory {out} is not writable")
    return out


def _spectrum(args, system, field):
    options = {}
    if args.method == "steady" and args.eta is not None:
        options["eta"] = args.eta
    return compute_spectrum(system, field, METHOD_NAMES[args.method], **options)


def run_spectrum(args):
    system, field, prov = resolve(args)
    out = _outdir(args)
    spec = _spectrum(args, system, field)
    fio.write_spectrum_csv(out / "spectrum.csv", spec)
    window, window_error = None, None
    if field.eps2 > 0:
        try:
            window = find_window(spec, system, field).to_json()
        except WindowResolutionError as exc:
            window_error = str(exc)
    summary = {
        "command": "spectrum",
        "method": spec.method,
        "fingerprint": spec.params_fingerprint,
        "peak_abs_re_chi": float(np.max(np.abs(spec.chi.real))),
        "peak_im_chi": float(np.max(spec.chi.imag)),
        "peak_abs_im_chi": float(np.max(np.abs(spec.chi.imag))),
        "min_im_chi": float(np.min(spec.chi.imag)),
        "window": window,
        "window_error": window_error,
        **prov,
    }
    fio.write_json(out / "summary.json", summary)
    log.info("wrote %s", out / "spectrum.csv")
    return summary


def run_window(args):
    system, field, prov = resolve(args)
    out = _outdir(args)
    spec = _spectrum(args, system, field)
    report = find_window(spec, system, field, args.threshold)
    payload = {"command": "window", "method": spec.method, **report.to_json(), **prov}
    fio.write_json(out / "window.json", payload)
    return payload


def _parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse sweep values {text!r}")


def _sweep_task(task):
    system, field, variable, value, threshold = task
    try:
        return value, sweep_point(system, field, variable, value, threshold), None
    except (WindowResolutionError, ParameterError, ArithmeticError) as exc:
        return value, None, str(exc)


def run_sweep(args):
    system, field, prov = resolve(args)
    out = _outdir(args)
    values = sorted(_parse_values(args.sweep_values))
    if len(values) < MIN_SWEEP_POINTS:
        raise ParameterError(
            f"a sweep needs at least {MIN_SWEEP_POINTS} values, got {len(values)}")
    tasks = [(system, field, args.sweep_var, v, args.threshold) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    fio.write_windows_csv(out / "sweep_windows.csv", results)
    ok = [(v, r) for v, r, err in results if r is not None]
    failures = {fio.fmt(v): err for v, r, err in results if r is None}
    if len(ok) < MIN_SWEEP_POINTS:
        fio.write_json(out / "scaling_fit.json", {"command": "sweep", "fit": None,
                                                  "failures": failures, **prov})
        raise SweepError(f"only {len(ok)} sweep points succeeded; fit aborted")
    fit = fit_power_law([v for v, _ in ok], [r.width for _, r in ok], args.sweep_var,
                        gamma=system.gamma)
    payload = {"command": "sweep", **fit.to_json(), "failures": failures, **prov}
    fio.write_json(out / "scaling_fit.json", payload)
    return payload


def oracle_sample(system, field):
    """21 detunings: 11 across the window (when there is one) and 10 on +-5 gamma."""
    g = system.gamma
    if field.eps2 > 0:
        spec = compute_spectrum(system, field)
        w = find_window(spec, system, field).width
        xc = window_center(system, field)
        return np.unique(np.concatenate([xc + np.linspace(-w, w, 11),
                                         np.linspace(-5 * g, 5 * g, 10)]))
    return np.linspace(-5 * g, 5 * g, 21)


def run_oracle(args):
    system, field, prov = resolve(args)
    out = _outdir(args)
    xs = oracle_sample(system, field)
    closed_f = fano_factor(xs, system)
    report = {"command": "oracle", "sample_detunings_au": xs.tolist(), **prov}
    checks = {}
    for label, settings in (("quadrature_threshold", QuadratureSettings()),
                            ("quadrature_extended", EXTENDED)):
        quad_f = np.array([fano_factor_quadrature(x, system, settings) for x in xs])
        dev = float(np.max(np.abs(quad_f - closed_f) / np.abs(closed_f)))
        checks[label] = {"max_rel_deviation_r": dev, "tolerance": QUADRATURE_REL_TOL}
    chi_c = chi(xs, system, field)
    eta = args.eta
    chi_s = chi_steady_state_extrapolated(xs, system, field, eta=eta)
    peak = peak_reference(system, field)
    checks["steady_state"] = {
        "max_deviation_over_peak": float(np.max(np.abs(chi_s - chi_c)) / peak),
        "tolerance": STEADY_PEAK_FRACTION,
        "peak_reference": peak,
    }
    scale = args.tolerance_scale
    for name, c in checks.items():
        value = c.get("max_rel_deviation_r", c.get("max_deviation_over_peak"))
        c["passed"] = bool(value < c["tolerance"] * scale)
    report["checks"] = checks
    report["passed"] = all(c["passed"] for c in checks.values())

    g = system.gamma
    probe_x = float(xs[len(xs) // 2 + 1])
    etas = [0.16 * g, 0.08 * g, 0.04 * g, 0.02 * g]
    rows = convergence_table(probe_x, system, field, etas)
    fio.write_convergence_csv(out / "convergence.csv", rows)
    report["convergence_detuning_au"] = probe_x
    fio.write_json(out / "oracle_report.json", report)
    if not report["passed"]:
        failed = ", ".join(k for k, c in checks.items() if not c["passed"])
        raise CheckFailed(f"oracle checks outside tolerance: {failed}")
    return report


def run_propagate(args):
    system, field, prov = resolve(args)
    out = _outdir(args)
    if field.eps2 <= 0:
        raise ParameterError("propagate needs a control field (eps2 > 0)")
    spec = compute_spectrum(system, field)
    report = find_window(spec, system, field)
    length = cm_to_bohr(args.length_cm)
    predicted = delay_prediction(system, field, length)
    if args.pulse_fwhm_ns is None:
        pulse = pulse_for_window(system, field, report.width, 0.1)
    else:
        pulse = gaussian_pulse(window_center(system, field), ns_to_au_time(args.pulse_fwhm_ns))
    span = 8.0 + predicted / pulse.envelope_fwhm_time + 8.0
    if span > 40.0:
        pulse = gaussian_pulse(pulse.carrier, pulse.envelope_fwhm_time, span_fwhm=math.ceil(span))
    result = propagate(pulse, system, field, length, spectrum=spec)
    fio.write_pulse_csv(out / "pulse_in.csv", pulse.times, pulse.samples)
    fio.write_pulse_csv(out / "pulse_out.csv", pulse.times, result.output_samples)
    payload = {
        "command": "propagate",
        "length_au": length,
        "pulse_fwhm_au": pulse.envelope_fwhm_time,
        "pulse_spectral_fwhm_au": pulse.spectral_fwhm,
        "window_width_au": report.width,
        "narrowband": bool(pulse.spectral_fwhm < 0.3 * report.width),
        "delay_au": result.delay,
        "predicted_delay_au": predicted,
        "delay_ratio": result.delay / predicted if predicted else None,
        "transmitted_energy_fraction": result.transmitted_energy_fraction,
        "n_g_center": report.n_g_center,
        **prov,
    }
    fio.write_json(out / "propagation.json", payload)
    return payload


COMMANDS = {
    "spectrum": run_spectrum,
    "window": run_window,
    "sweep": run_sweep,
    "oracle": run_oracle,
    "propagate": run_propagate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CheckFailed, *NUMERIC_ERRORS) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
