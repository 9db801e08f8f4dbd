import numpy as np
import pytest

from fano_eit.cli import main
from fano_eit.io import read_json, read_pulse_csv, read_spectrum_csv, write_spectrum_csv
from fano_eit.oracle import peak_reference
from fano_eit.presets import paper_preset, write_params


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_spectrum_fig1(tmp_path):
    assert run(tmp_path, "spectrum", "--preset", "fig1") == 0
    summary = read_json(tmp_path / "summary.json")
    assert summary["peak_im_chi"] < 1e-9 and summary["peak_abs_re_chi"] < 1e-9
    s, f = paper_preset("fig1")
    assert summary["peak_im_chi"] == pytest.approx(peak_reference(s, f), rel=0.01)
    assert summary["window"] is None
    assert summary["params"]["q"] == 10.0
    spec = read_spectrum_csv(tmp_path / "spectrum.csv")
    assert np.all(np.diff(spec.omega1) > 0) and len(spec) == summary["grid"]["points"]


def test_fig5_vs_fig4_peak(tmp_path):
    peaks = {}
    for name in ("fig4", "fig5"):
        d = tmp_path / name
        assert run(d, "spectrum", "--preset", name) == 0
        peaks[name] = read_json(d / "summary.json")["peak_abs_im_chi"]
    assert peaks["fig5"] / peaks["fig4"] == pytest.approx(100, rel=0.15)


def test_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "spectrum", "--preset", "fig2", "--eps2", "0") == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
    assert read_json(a / "summary.json")["params"]["eps2_au"] == 0.0


def test_csv_round_trip(tmp_path):
    assert run(tmp_path, "spectrum", "--preset", "fig3") == 0
    spec = read_spectrum_csv(tmp_path / "spectrum.csv")
    write_spectrum_csv(tmp_path / "again.csv", spec)
    assert (tmp_path / "again.csv").read_bytes() == (tmp_path / "spectrum.csv").read_bytes()


def test_params_file_with_grid(tmp_path):
    s, f = paper_preset("fig3")
    path = tmp_path / "p.txt"
    write_params(path, s, f, grid=(0.0, 2e-11, 801))
    assert main(["window", "--params", str(path), "--out", str(tmp_path)]) == 0
    rep = read_json(tmp_path / "window.json")
    assert rep["grid"]["kind"] == "uniform" and rep["grid"]["points"] == 801
    assert 3e-3 <= rep["width_over_gamma"] <= 3e-2
    assert rep["threshold_used"] == 0.5


def test_window_threshold(tmp_path):
    assert run(tmp_path, "window", "--preset", "fig4", "--threshold", "0.3") == 0
    assert read_json(tmp_path / "window.json")["threshold_used"] == 0.3


def test_sweep_q(tmp_path):
    assert run(tmp_path, "sweep", "--preset", "fig4", "--sweep-var", "q",
               "--sweep-values", "20,40,80,160", "--jobs", "2") == 0
    fit = read_json(tmp_path / "scaling_fit.json")
    assert fit["exponent"] == pytest.approx(2.0, abs=0.2)
    lines = (tmp_path / "sweep_windows.csv").read_text().splitlines()
    assert len(lines) == 5 and all(",ok," in ln for ln in lines[1:])


def test_sweep_too_few(tmp_path):
    assert run(tmp_path, "sweep", "--preset", "fig3", "--sweep-var", "eps2",
               "--sweep-values", "1e-8,1e-7,1e-6") == 2


def test_unresolved_window_exit(tmp_path, capsys):
    code = run(tmp_path, "window", "--preset", "fig4", "--grid-halfwidth", "5e-8",
               "--grid-points", "101")
    assert code == 3
    assert "spacing" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--preset", "fig9"],
    ["spectrum", "--preset", "fig1", "--params", "x.txt"],
    ["spectrum", "--params", "missing-file.txt"],
    ["spectrum", "--preset", "fig2", "--eps2", "-1"],
    ["spectrum", "--preset", "fig2", "--grid-points", "1"],
])
def test_input_errors(tmp_path, argv):
    try:
        code = run(tmp_path, *argv)
    except SystemExit as exc:  # argparse rejects before dispatch
        code = exc.code
    assert code == 2


def test_bad_params_file(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("q = 10\nbogus = 1\n")
    assert run(tmp_path, "spectrum", "--params", str(path)) == 2


def test_oracle_passes(tmp_path):
    assert run(tmp_path, "oracle", "--preset", "fig3") == 0
    rep = read_json(tmp_path / "oracle_report.json")
    assert rep["passed"] and len(rep["sample_detunings_au"]) == 21
    assert (tmp_path / "convergence.csv").exists()


def test_oracle_flat_continuum(tmp_path):
    assert run(tmp_path, "oracle", "--preset", "fig1", "--flat-continuum") == 0
    rep = read_json(tmp_path / "oracle_report.json")
    assert rep["flat_continuum"] is True
    assert rep["checks"]["quadrature_extended"]["max_rel_deviation_r"] <= 1e-12


def test_oracle_broken_tolerance(tmp_path):
    assert run(tmp_path, "oracle", "--preset", "fig2", "--tolerance-scale", "0") == 3
    assert read_json(tmp_path / "oracle_report.json")["passed"] is False


def test_propagate(tmp_path):
    assert run(tmp_path, "propagate", "--preset", "fig3", "--length-cm", "1") == 0
    rep = read_json(tmp_path / "propagation.json")
    assert rep["narrowband"]
    assert rep["delay_ratio"] == pytest.approx(1.0, abs=0.1)
    assert rep["transmitted_energy_fraction"] <= 1.0
    t, amp = read_pulse_csv(tmp_path / "pulse_out.csv")
    assert t.size == amp.size and np.all(np.isfinite(amp))


def test_propagate_needs_control(tmp_path):
    assert run(tmp_path, "propagate", "--preset", "fig1", "--length-cm", "1") == 2


def test_propagate_negative_length(tmp_path):
    assert run(tmp_path, "propagate", "--preset", "fig3", "--length-cm", "-1") == 2


def test_steady_method(tmp_path):
    assert run(tmp_path, "spectrum", "--preset", "fig2", "--method", "steady",
               "--grid-halfwidth", "2e-9", "--grid-points", "41") == 0
    summary = read_json(tmp_path / "summary.json")
    assert summary["method"] == "steady_state"
    assert summary["min_im_chi"] > -0.02 * summary["peak_abs_im_chi"]
    assert summary["window"] is None and "grid points inside" in summary["window_error"]
