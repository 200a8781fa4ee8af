"""Wavelength bookkeeping, loss budget and conversion-curve unit tests."""

import math

import pytest
from hypothesis import given, strategies as st

from qfcsim.optics import (
    ElementTransmissions,
    GaussianPulse,
    LossBudget,
    WaveguideParams,
    bandwidth_ghz_to_nm,
    bandwidth_nm_to_ghz,
    cascade,
    combined_linewidth,
    conversion_fraction,
    dfg_output_wavelength,
    external_efficiency,
    optimal_pump_power,
    pulse_bandwidth,
)

WG = WaveguideParams(length_cm=3.0, normalized_efficiency=0.72, max_external_efficiency=0.25)


class TestDfgWavelength:
    def test_reference_pair(self):
        # frozen from independent evaluation of 1/(1/780.24 - 1/1569.4)
        assert dfg_output_wavelength(780.24, 1569.4) == pytest.approx(
            1551.6608241674694, rel=1e-12
        )

    def test_round_numbers(self):
        assert dfg_output_wavelength(800.0, 1600.0) == pytest.approx(1600.0, rel=1e-12)

    def test_pump_must_be_longer(self):
        with pytest.raises(ValueError, match="must exceed"):
            dfg_output_wavelength(1569.4, 780.24)

    def test_positive_wavelengths(self):
        with pytest.raises(ValueError):
            dfg_output_wavelength(-780.0, 1569.4)

    @given(
        lam_in=st.floats(200.0, 2000.0),
        lam_p=st.floats(2000.1, 20000.0),
    )
    def test_energy_conservation(self, lam_in, lam_p):
        lam_out = dfg_output_wavelength(lam_in, lam_p)
        assert lam_out > lam_in
        assert 1.0 / lam_out == pytest.approx(1.0 / lam_in - 1.0 / lam_p, rel=1e-9)


class TestConversionCurve:
    def test_frozen_values(self):
        # frozen from an independent evaluation of 0.25 sin^2(3 sqrt(0.72 P))
        assert external_efficiency(0.4, WG) == pytest.approx(0.24961657270173657, rel=1e-12)
        assert external_efficiency(0.12, WG) == pytest.approx(0.14895542230487846, rel=1e-12)

    def test_zero_pump(self):
        assert external_efficiency(0.0, WG) == 0.0

    def test_peak_reaches_cap(self):
        p_star = optimal_pump_power(WG)
        assert external_efficiency(p_star, WG) == pytest.approx(0.25, rel=1e-12)
        assert conversion_fraction(p_star, WG) == pytest.approx(1.0, rel=1e-12)

    def test_optimal_pump_frozen(self):
        # (pi/2)^2 / (9 * 0.72), independently evaluated
        assert optimal_pump_power(WG) == pytest.approx(0.38077177473338575, rel=1e-12)

    def test_negative_pump_rejected(self):
        with pytest.raises(ValueError):
            external_efficiency(-0.1, WG)

    @given(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
    def test_monotone_below_optimum(self, f1, f2):
        p_star = optimal_pump_power(WG)
        p1, p2 = sorted((f1 * p_star, f2 * p_star))
        assert external_efficiency(p1, WG) <= external_efficiency(p2, WG) + 1e-15

    @given(st.floats(0.0, 2.0))
    def test_bounded_by_cap(self, pump_w):
        assert 0.0 <= external_efficiency(pump_w, WG) <= WG.max_external_efficiency


class TestLossBudget:
    def test_signal_total(self):
        t = ElementTransmissions(0.99, 0.61, 0.61, 0.80)
        assert t.total == pytest.approx(0.99 * 0.61 * 0.61 * 0.80, rel=1e-12)
        assert t.total == pytest.approx(0.29, abs=0.005)

    def test_pump_total(self):
        t = ElementTransmissions(0.66, 0.58, 0.78, 0.98)
        assert t.total == pytest.approx(0.29, abs=0.005)

    def test_fraction_validation(self):
        with pytest.raises(ValueError, match="coupling"):
            ElementTransmissions(0.99, 1.2, 0.61, 0.80)


class TestCascade:
    def test_reference_numbers(self):
        budget = LossBudget(
            signal=ElementTransmissions(0.99, 0.61, 0.61, 0.80),
            pump=ElementTransmissions(0.66, 0.58, 0.78, 0.98),
        )
        cas = cascade(budget, eta_int_max=0.41, eta_filter=0.26, eta_detection=0.04)
        assert cas.eta_ext_max == pytest.approx(0.25, abs=0.005)
        assert cas.eta_dev_max == pytest.approx(0.066, abs=0.002)
        assert cas.eta_tot_max == pytest.approx(2.6e-3, abs=1e-4)

    def test_nesting(self):
        budget = LossBudget(
            signal=ElementTransmissions(1.0, 0.5, 1.0, 1.0),
            pump=ElementTransmissions(1.0, 1.0, 1.0, 1.0),
        )
        cas = cascade(budget, eta_int_max=0.4, eta_filter=0.3, eta_detection=0.1)
        assert cas.eta_ext_max == pytest.approx(0.2)
        assert cas.eta_dev_max == pytest.approx(0.06)
        assert cas.eta_tot_max == pytest.approx(0.006)


class TestLinewidths:
    def test_combined_linewidth_frozen(self):
        # 0.5346 * 6 + sqrt(0.2166 * 36 + 14.667^2), independently evaluated
        assert combined_linewidth(6.0, 14.667) == pytest.approx(18.138055083486236, rel=1e-12)

    def test_pure_gaussian(self):
        assert combined_linewidth(0.0, 10.0) == pytest.approx(10.0, rel=1e-12)

    def test_pure_lorentzian(self):
        # approximation constant: 0.5346 + sqrt(0.2166) = 1.0000031
        assert combined_linewidth(10.0, 0.0) == pytest.approx(10.0, rel=1e-5)

    def test_pulse_bandwidth(self):
        assert pulse_bandwidth(GaussianPulse(fwhm_ns=30.0)) == pytest.approx(
            14.666666666666666, rel=1e-12
        )

    @given(st.floats(0.1, 100.0), st.floats(100.0, 2000.0))
    def test_bandwidth_roundtrip(self, bw_ghz, lam_nm):
        bw_nm = bandwidth_ghz_to_nm(bw_ghz, lam_nm)
        assert bandwidth_nm_to_ghz(bw_nm, lam_nm) == pytest.approx(bw_ghz, rel=1e-12)

    def test_reference_filter_bandwidth(self):
        # 0.68 nm at the converted wavelength is about 85 GHz
        ghz = bandwidth_nm_to_ghz(0.68, 1551.6608241674694)
        assert ghz == pytest.approx(84.67126045934967, rel=1e-12)


class TestGaussianPulse:
    def test_sigma(self):
        p = GaussianPulse(fwhm_ns=30.0)
        assert p.sigma_ns == pytest.approx(30.0 / (2.0 * math.sqrt(2.0 * math.log(2.0))), rel=1e-12)
        assert p.sigma_ns == pytest.approx(12.739827004320286, rel=1e-12)

    def test_positive_fwhm(self):
        with pytest.raises(ValueError):
            GaussianPulse(fwhm_ns=0.0)


class TestWaveguideParams:
    def test_total_normalized(self):
        assert WG.total_normalized_efficiency == pytest.approx(6.48, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            WaveguideParams(length_cm=-1.0, normalized_efficiency=0.72, max_external_efficiency=0.25)
        with pytest.raises(ValueError):
            WaveguideParams(length_cm=3.0, normalized_efficiency=0.72, max_external_efficiency=1.2)
