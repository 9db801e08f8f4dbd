import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fano_eit.params import AtomicSystem, FieldConfig
from fano_eit.susceptibility import (DegenerateInputError, FiniteDifferenceError, chi,
                                     chi_termwise, compute_spectrum, dchi_dx, dipole_amplitude,
                                     fano_factor, fano_profile, group_index, prefactor, r_closed)

GAMMA = 1e-9


def make_system(q=10.0, **kw):
    base = dict(e_b=-0.2, e_c=-0.1, e_a=0.1, gamma=GAMMA, q=q, b_b=2.0, b_c=3.0,
                gamma_cb=0.0, density_n=9.928e-14)
    base.update(kw)
    return AtomicSystem(**base)


def make_field(eps2, x=(0.0,)):
    return FieldConfig(eps2=eps2, omega2=0.2, detunings=np.atleast_1d(x))


qs = st.floats(min_value=0.5, max_value=300.0)
eps = st.floats(min_value=1e-10, max_value=1e-5)
detuning = st.floats(min_value=-200.0, max_value=200.0).map(lambda s: s * GAMMA)


class TestFanoProfile:
    def test_zero(self):
        s = make_system()
        assert dipole_amplitude(-s.q * s.gamma, s, "b") == 0.0
        # absolute energies lose ~1e-17 to rounding near 0.1 hartree
        assert fano_profile(s.e_a - s.q * s.gamma, s, "b") < 1e-12 * s.b_b**2 * s.q**2

    @pytest.mark.parametrize("which, b", [("b", 2.0), ("c", 3.0)])
    def test_peak_value(self, which, b):
        s = make_system()
        assert fano_profile(s.e_a, s, which) == pytest.approx(b * b * s.q**2, rel=1e-14)

    @pytest.mark.parametrize("sign", [-1, 1])
    def test_far_wings(self, sign):
        s = make_system()
        # offsets relative to E_a avoid 0.1 + 1e-3 rounding
        v = sign * 1e6 * s.gamma
        expected = 4.0 * (1 + 2 * s.q / (sign * 1e6))
        assert dipole_amplitude(v, s, "b") ** 2 == pytest.approx(expected, rel=1e-9)
        assert fano_profile(s.e_a + v, s, "b") == pytest.approx(4.0, rel=1e-4)

    def test_flat(self):
        s = make_system(flat_continuum=True)
        assert fano_profile(0.2, s, "c") == 9.0

    @given(st.floats(min_value=-1e4, max_value=1e4), qs)
    def test_amplitude_squares_to_profile(self, s_off, q):
        s = make_system(q=q)
        v = s_off * s.gamma
        assert dipole_amplitude(v, s, "c") ** 2 == pytest.approx(
            9.0 * (s_off + q) ** 2 / (s_off**2 + 1), rel=1e-12, abs=1e-12)


class TestRClosed:
    def test_at_resonance(self):
        # B_i = B_j = 2, q = 10, x = 0; the constant term carries -2q (see module docstring)
        s = make_system(b_c=2.0)
        assert r_closed(0.0, s, "b", "c") == pytest.approx(4 * math.pi * (-20 - 100j), rel=1e-14)

    def test_fano_zero_is_real(self):
        s = make_system()
        x = -s.q * s.gamma
        r = r_closed(x, s, "b", "b")
        assert abs(r.imag) < 1e-12 * abs(r.real)
        s_ = x / s.gamma
        expected = 4 * math.pi * (s_ * (s.q**2 - 1) - 2 * s.q) / (s_**2 + 1)
        assert r.real == pytest.approx(expected, rel=1e-12)

    def test_flat(self):
        s = make_system(flat_continuum=True)
        assert r_closed(3e-9, s, "b", "c") == -1j * math.pi * 6.0

    @given(detuning, qs)
    def test_absorptive_sign(self, x, q):
        assert r_closed(x, make_system(q=q), "c", "c").imag <= 0

    @given(detuning, qs)
    def test_factorization(self, x, q):
        s = make_system(q=q)
        lhs = r_closed(x, s, "b", "c") * r_closed(x, s, "c", "b")
        rhs = r_closed(x, s, "b", "b") * r_closed(x, s, "c", "c")
        assert abs(lhs - rhs) <= 4e-16 * abs(lhs)

    @given(st.floats(min_value=-10.0, max_value=10.0))
    def test_discrete_state_limit(self, s_off):
        # B = 2 c0 / q keeps B^2 q^2 fixed while q -> 1e4
        q, c0 = 1e4, 1.5
        s = make_system(q=q, b_b=2 * c0 / q, b_c=2 * c0 / q)
        x = s_off * s.gamma
        lorentz = (2 * c0 / q) ** 2 * math.pi * q**2 * s.gamma * (x - 1j * s.gamma) / (
            x * x + s.gamma**2)
        assert abs(r_closed(x, s, "b", "c") - lorentz) <= 1e-3 * abs(lorentz)


class TestChi:
    def test_control_off(self):
        s = make_system()
        x = np.linspace(-5, 5, 11) * GAMMA
        np.testing.assert_allclose(chi(x, s, make_field(0.0)),
                                   -2 * math.pi * s.density_n * r_closed(x, s, "b", "b"),
                                   rtol=1e-15)

    def test_prefactor_is_minus_n_over_two_eps0(self):
        s = make_system()
        assert prefactor(s) == pytest.approx(-s.density_n / (2 / (4 * math.pi)), rel=1e-15)

    def test_fig1_magnitude(self, presets):
        s, f = presets["fig1"]
        c = chi(f.detunings, s, f)
        assert c.imag.max() < 1e-9 and np.abs(c.real).max() < 1e-9

    @given(qs, eps)
    def test_dark_state(self, q, e):
        s = make_system(q=q)
        assert chi(0.0, s, make_field(e)) == 0

    @given(detuning, qs, eps)
    def test_passive(self, x, q, e):
        assert chi(x, make_system(q=q), make_field(e)).imag >= -1e-18

    @given(detuning, qs, eps, st.floats(min_value=0, max_value=1e-9))
    def test_termwise_matches_factored(self, x, q, e, gcb):
        s = make_system(q=q, gamma_cb=gcb)
        f = make_field(e)
        scale = abs(prefactor(s) * r_closed(x, s, "b", "b"))
        assert abs(chi_termwise(x, s, f) - chi(x, s, f)) <= 1e-12 * scale

    def test_termwise_relative_away_from_center(self, presets):
        s, f = presets["fig3"]
        x = f.detunings[np.abs(f.detunings) > 1e-3 * GAMMA]
        np.testing.assert_allclose(chi_termwise(x, s, f), chi(x, s, f), rtol=1e-12)

    def test_decoherence_fills_the_window(self):
        s = make_system(gamma_cb=1e-11)
        assert chi(0.0, s, make_field(1e-7)).imag > 0

    def test_degenerate_pole(self):
        # gamma_cb = 0 at the Fano zero makes R_cc real; pick Delta to cancel it
        s = make_system()
        x = -s.q * s.gamma
        f = make_field(1e-6)
        c = 0.25 * f.eps2**2 * s.b_c**2
        omega2 = f.omega2 + (x - c * fano_factor(x, s).real)
        f2 = FieldConfig(eps2=f.eps2, omega2=omega2, detunings=[x])
        if (x + (s.e_a - s.e_c - omega2)) - c * fano_factor(x, s) == 0:
            with pytest.raises(DegenerateInputError):
                chi(x, s, f2)
        else:
            assert np.isfinite(chi(x, s, f2))


class TestGroupIndex:
    def test_far_from_resonance_is_flat(self):
        s = make_system()
        n_g = group_index(1e6 * GAMMA, s, make_field(0.0))
        assert abs(n_g - 1) < 1e-6

    def test_analytic_derivative_against_complex_step_free_fd(self, presets):
        # independent check: plain central differences at a tiny step
        s, f = presets["fig2"]
        for x in np.array([-3.0, -0.4, 0.0, 0.2, 2.5]) * GAMMA:
            h = 1e-6 * GAMMA
            fd = (chi(x + h, s, f) - chi(x - h, s, f)) / (2 * h)
            assert dchi_dx(x, s, f) == pytest.approx(fd, rel=1e-6)

    @pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4", "fig5"])
    def test_modes_agree(self, presets, name):
        s, f = presets[name]
        x = f.detunings[:: max(1, f.detunings.size // 100)][:100]
        slope = dchi_dx(x, s, f).real
        keep = np.abs(slope) > 1e-3 * np.abs(slope).max()  # drop dispersion extrema
        ana = group_index(x[keep], s, f)
        fd = group_index(x[keep], s, f, derivative_mode="finite_difference")
        np.testing.assert_allclose(fd, ana, rtol=1e-6)

    def test_center_values(self, presets):
        s, f = presets["fig2"]
        assert 1.05 <= group_index(0.0, s, f) <= 1.3
        s, f = presets["fig4"]
        assert 300 <= group_index(0.0, s, f) <= 3000

    def test_step_underflow(self):
        with pytest.raises(FiniteDifferenceError):
            group_index(1.0, make_system(), make_field(1e-7), "finite_difference", step=1e-30)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            group_index(0.0, make_system(), make_field(1e-7), "spline")


def test_spectrum_record(presets):
    s, f = presets["fig2"]
    spec = compute_spectrum(s, f)
    assert len(spec) == f.detunings.size and spec.method == "closed_form"
    np.testing.assert_allclose(spec.omega1, s.resonance_omega1 + f.detunings)
    assert spec.params_fingerprint == compute_spectrum(s, f).params_fingerprint
    assert spec.params_fingerprint != compute_spectrum(s, f.with_(eps2=2e-6)).params_fingerprint
    with pytest.raises(ValueError):
        compute_spectrum(s, f, method="magic")


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4", "fig5"])
def test_passive_on_preset_grids(spectra, name):
    assert spectra[name].chi.imag.min() >= -1e-18
