"""Counting clicks one gate at a time.

Runs the shot-level simulator against the closed-form click
probabilities and draws a text-mode start-stop histogram: a Gaussian
signal peak riding on a flat noise pedestal over a flat dark floor.
"""

import numpy as np

from qfcsim import (
    ExperimentScenario,
    detection_probabilities,
    gate_integrate,
    reference_chain,
    simulate,
    start_stop_histogram,
)

chain = reference_chain()

# ----------------------------------------------------------------------
# Monte Carlo versus analytic probabilities
# ----------------------------------------------------------------------
print("Monte Carlo click probabilities versus the analytic model (300k shots):")
for pump in (50.0, 120.0, 380.0):
    sc = ExperimentScenario(chain=chain, mu_in=6.1, pump_mw=pump, n_shots=300000, seed=17)
    res = simulate(sc)
    rb = detection_probabilities(6.1, pump, chain)
    print(f"  {pump:5.0f} mW  p_S: MC {res.p_signal:.5f} vs model {rb.p_signal:.5f}   "
          f"p_N: MC {res.p_noise:.6f} vs model {rb.p_noise:.6f}")
    print(f"           dead time skipped {res.skipped_signal} of {sc.n_shots} gates")

# ----------------------------------------------------------------------
# Start-stop histogram
# ----------------------------------------------------------------------
sc = ExperimentScenario(chain=chain, mu_in=5.0, pump_mw=120.0, n_shots=300000, seed=17)
triple = start_stop_histogram(sc, bin_width_ns=0.64, window_ns=100.0)

print("\nstart-stop histogram, 100 ns window (rebinned to 2.56 ns for display):")
counts = triple.signal_on.counts
rebin = counts[: (counts.size // 4) * 4].reshape(-1, 4).sum(axis=1)
peak = rebin.max()
for i, c in enumerate(rebin):
    t = (i + 0.5) * 2.56
    print(f"  {t:5.1f} ns  {int(c):4d}  {'*' * int(50 * c / peak)}")

inside = gate_integrate(triple.signal_on, 20.0)
print(f"\ncounts inside the 20 ns gate: {inside:.0f} of {triple.signal_on.total} "
      f"({inside / triple.signal_on.total:.0%})")
print(f"pump-only pedestal: {triple.pump_only.total} counts; "
      f"dark floor: {triple.dark_only.total} counts")
