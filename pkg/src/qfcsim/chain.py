"""Full experiment description: source, waveguide, filter, detector, noise.

``ConversionChain`` ties the static optics to the noise and detection
models and exposes the derived per-gate means that both the analytic
module and the Monte Carlo simulator consume.  ``reference_chain`` builds
the chain with the published apparatus values (780.24 nm input, 1569.4 nm
pump, 3 cm PPLN waveguide, 0.68 nm filter, 7% gated InGaAs detector).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .noise import DetectorConfig, FilterStage, NoiseModel, beta_factor
from .optics import (
    EfficiencyCascade,
    ElementTransmissions,
    GaussianPulse,
    LossBudget,
    WaveguideParams,
    cascade,
    conversion_fraction,
    dfg_output_wavelength,
    optimal_pump_power,
)

__all__ = ["ConversionChain", "reference_chain"]


@dataclass(frozen=True)
class ConversionChain:
    input_wavelength_nm: float
    pump_wavelength_nm: float
    pulse: GaussianPulse
    waveguide: WaveguideParams
    budget: LossBudget
    filter_stage: FilterStage
    detector: DetectorConfig
    noise: NoiseModel
    repetition_rate_mhz: float = 1.0

    def __post_init__(self):
        if self.repetition_rate_mhz <= 0:
            raise ValueError("repetition rate must be positive")
        # validates the down-conversion ordering
        dfg_output_wavelength(self.input_wavelength_nm, self.pump_wavelength_nm)

    @property
    def output_wavelength_nm(self) -> float:
        return dfg_output_wavelength(self.input_wavelength_nm, self.pump_wavelength_nm)

    @property
    def gate_period_ns(self) -> float:
        return 1e3 / self.repetition_rate_mhz

    @property
    def beta(self) -> float:
        """Detected signal fraction for the configured pulse and gate."""
        return beta_factor(self.pulse, self.detector)

    @property
    def eta_detection(self) -> float:
        """Detection efficiency including the gate fraction beta."""
        return self.detector.efficiency * self.beta

    def cascade(self) -> EfficiencyCascade:
        eta_int_max = (
            self.waveguide.max_external_efficiency / self.budget.signal.coupling
        )
        return cascade(
            self.budget,
            eta_int_max=eta_int_max,
            eta_filter=self.filter_stage.total_transmission,
            eta_detection=self.eta_detection,
        )

    @property
    def eta_tot_max(self) -> float:
        return self.cascade().eta_tot_max

    @property
    def eta_device_no_gate(self) -> float:
        """Waveguide-to-click efficiency at peak conversion, excluding the
        gate fraction (used by the Monte Carlo thinning; the gate cut
        supplies beta there)."""
        return (
            self.waveguide.max_external_efficiency
            * self.filter_stage.total_transmission
            * self.detector.efficiency
        )

    def conversion_fraction(self, pump_mw: float) -> float:
        """sin^2 conversion factor, normalized to 1 at the optimum."""
        return conversion_fraction(pump_mw * 1e-3, self.waveguide)

    @property
    def optimal_pump_mw(self) -> float:
        return optimal_pump_power(self.waveguide) * 1e3

    def signal_mean_per_gate(self, mu_in: float, pump_mw: float) -> float:
        """Mean detected signal photons per gate."""
        return mu_in * self.eta_tot_max * self.conversion_fraction(pump_mw)

    def noise_mean_per_gate(self, pump_mw: float) -> float:
        """Mean noise counts per gate (pump-induced plus dark)."""
        alpha = self.noise.alpha_per_gate(
            self.detector.gate_width_ns, self.filter_stage.bandwidth_nm
        )
        return alpha * pump_mw + self.detector.dark_counts_per_gate

    def with_filter_bandwidth(self, bandwidth_nm: float) -> "ConversionChain":
        return replace(
            self, filter_stage=replace(self.filter_stage, bandwidth_nm=bandwidth_nm)
        )

    def with_gate_width(self, gate_width_ns: float) -> "ConversionChain":
        return replace(
            self, detector=replace(self.detector, gate_width_ns=gate_width_ns)
        )


def reference_chain() -> ConversionChain:
    """Chain with the published apparatus values."""
    return ConversionChain(
        input_wavelength_nm=780.24,
        pump_wavelength_nm=1569.4,
        pulse=GaussianPulse(fwhm_ns=30.0),
        waveguide=WaveguideParams(
            length_cm=3.0,
            normalized_efficiency=0.72,
            max_external_efficiency=0.25,
        ),
        budget=LossBudget(
            signal=ElementTransmissions(
                input_lens=0.99, coupling=0.61, propagation=0.61, output_lens=0.80
            ),
            pump=ElementTransmissions(
                input_lens=0.66, coupling=0.58, propagation=0.78, output_lens=0.98
            ),
        ),
        filter_stage=FilterStage(
            bandwidth_nm=0.68,
            fiber_coupling=0.50,
            grating=0.70,
            bandpass_longpass=0.74,
            total_transmission=0.26,
        ),
        detector=DetectorConfig(
            gate_width_ns=20.0,
            efficiency=0.07,
            dark_rate_per_ns=1e-5,
            dead_time_us=20.0,
        ),
        noise=NoiseModel(
            alpha_detected_per_mw=6e-6,
            alpha_crystal_per_mw_ns=5e-6,
            reference_bandwidth_nm=0.68,
            dark_rate_per_ns=1e-5,
            reference_gate_ns=20.0,
        ),
        repetition_rate_mhz=1.0,
    )
