"""Where do the photons go?

Walks the efficiency chain of the converter: the sin^2 dependence of the
external conversion efficiency on pump power, the per-element loss
budget, and the nested cascade down to the total detection efficiency.
"""

from qfcsim import external_efficiency, optimal_pump_power, reference_chain

chain = reference_chain()
wg = chain.waveguide

# ----------------------------------------------------------------------
# Conversion efficiency versus pump power
# ----------------------------------------------------------------------
print("external conversion efficiency eta_ext(P) = cap * sin^2(L sqrt(P eta_n))")
print(f"  L = {wg.length_cm} cm, eta_n = {wg.normalized_efficiency} /(W cm^2), "
      f"cap = {wg.max_external_efficiency}")
print()
for pump_mw in (50, 120, 200, 300, 380, 500):
    eta = external_efficiency(pump_mw * 1e-3, wg)
    bar = "#" * int(eta * 200)
    print(f"  {pump_mw:4d} mW  eta_ext = {eta:.4f}  {bar}")

p_star = optimal_pump_power(wg)
print(f"\noptimal pump power: {p_star * 1e3:.1f} mW "
      f"(quarter-wave condition L sqrt(P eta_n) = pi/2)")

# ----------------------------------------------------------------------
# Loss budget and cascade
# ----------------------------------------------------------------------
print("\nper-element transmissions at the input wavelength:")
sig = chain.budget.signal
for name in ("input_lens", "coupling", "propagation", "output_lens"):
    print(f"  {name:12s} {getattr(sig, name):.2f}")
print(f"  {'total':12s} {sig.total:.3f}")

cas = chain.cascade()
print("\nnested efficiency cascade (values at the conversion peak):")
print(f"  internal conversion   {cas.eta_int_max:.3f}")
print(f"  external (x coupling) {cas.eta_ext_max:.3f}")
print(f"  device   (x filter)   {cas.eta_dev_max:.4f}")
print(f"  total    (x detector) {cas.eta_tot_max:.2e}")
print(f"\ngate fraction of the {chain.pulse.fwhm_ns:.0f} ns pulse in a "
      f"{chain.detector.gate_width_ns:.0f} ns gate: beta = {chain.beta:.3f}")

lam_out = chain.output_wavelength_nm
print(f"\nwavelengths: {chain.input_wavelength_nm} nm + {chain.pump_wavelength_nm} nm pump "
      f"-> {lam_out:.2f} nm (telecom C band)")
