"""CSV/JSON emission and the matching readers.

Floats are written with 17 significant digits so files round-trip exactly
and identical runs produce identical bytes.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .susceptibility import SusceptibilitySpectrum

SPECTRUM_COLUMNS = ("detuning_au", "omega1_au", "re_chi", "im_chi")
PULSE_COLUMNS = ("t_au", "re_amp", "im_amp", "intensity")
CONVERGENCE_COLUMNS = ("eta", "n_bins", "re_chi", "im_chi", "deviation")
WINDOW_COLUMNS = ("swept_value", "status", "center_au", "width_au", "width_over_gamma",
                  "n_g_center", "threshold_used", "fano_zero_au", "error")


def fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_spectrum_csv(path, spectrum):
    x, w, c = spectrum.detunings, spectrum.omega1, spectrum.chi
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(x))):
        raise ArithmeticError("spectrum contains NaN/Inf; refusing to write it")
    order = np.argsort(w, kind="stable")
    _write_rows(path, SPECTRUM_COLUMNS,
                ((x[k], w[k], c[k].real, c[k].imag) for k in order))


def read_spectrum_csv(path, method="closed_form"):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SPECTRUM_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    x, w = data[:, 0], data[:, 1]
    offset = float(np.median(w - x)) if len(w) else 0.0
    return SusceptibilitySpectrum(detunings=x, chi=data[:, 2] + 1j * data[:, 3],
                                  method=method, params_fingerprint="", omega_offset=offset)


def write_pulse_csv(path, times, samples):
    samples = np.asarray(samples)
    _write_rows(path, PULSE_COLUMNS,
                zip(times, samples.real, samples.imag, np.abs(samples) ** 2))


def read_pulse_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def write_convergence_csv(path, rows):
    _write_rows(path, CONVERGENCE_COLUMNS, rows)


def write_windows_csv(path, rows):
    """``rows``: (value, report-or-None, error-message-or-None)."""
    out = []
    for value, report, error in rows:
        if report is None:
            out.append((value, "failed", "nan", "nan", "nan", "nan", "nan", "nan", error or ""))
        else:
            out.append((value, "ok", report.center, report.width, report.width_over_gamma,
                        report.n_g_center, report.threshold_used, report.fano_zero, ""))
    _write_rows(path, WINDOW_COLUMNS, out)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload):
    Path(path).write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
