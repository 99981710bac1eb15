"""Ring-downs with pump-induced nonlinear friction.

Free decay of the plate mode with the pump off, on the upper secondary
sideband (negative nonlinear friction: decay slows down at large
amplitude), and on the lower sideband (positive nonlinear friction).
The instantaneous decay rate is plotted against squared amplitude and
compared with the weak-pump line Gamma1 + alpha*A^2.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidebandlab import (RwaState, Sideband, alpha_beta, instantaneous_rate,
                         integrate_rwa, paper_device, scaled_from_amplitude)
from sidebandlab.adiabatic import slaved_v2, solve_extended_adiabatic

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

a_start = 35e-9  # 35 nm initial amplitude
cases = {
    "no pump": paper_device(f_p=0.0),
    "upper sideband": paper_device(),
    "lower sideband": paper_device(sideband=Sideband.LOWER),
}

fig, (ax_decay, ax_rate) = plt.subplots(1, 2, figsize=(10, 4))
colors = {"no pump": "k", "upper sideband": "tab:blue",
          "lower sideband": "tab:red"}

for label, system in cases.items():
    v1 = complex(scaled_from_amplitude(a_start, system.mode1,
                                       system.scaling), 0.0)
    if system.rwa.f_p > 0.0:
        ad = solve_extended_adiabatic(abs(v1) ** 2, system.rwa,
                                      system.gamma1, system.gamma2)
        v2 = slaved_v2(v1, ad, system.rwa)
    else:
        v2 = 0.0j
    trace = integrate_rwa(RwaState(v1, v2), system, horizon=1.5)
    ax_decay.semilogy(trace.times, trace.a1 * 1e9, color=colors[label],
                      label=label)
    rate = instantaneous_rate(trace, window_s=0.031)
    ax_rate.plot(rate.a1_sq * 1e18, rate.gamma_inst, color=colors[label])
    alpha, _ = alpha_beta(system.rwa, system.gamma2)
    scale = scaled_from_amplitude(1.0, system.mode1, system.scaling) ** 2
    a_sq = np.linspace(0.0, (a_start * 1e9) ** 2, 50)  # nm^2
    ax_rate.plot(a_sq, system.gamma1 + alpha * scale * a_sq * 1e-18, "--",
                 color=colors[label], lw=0.8)
    print(f"{label:16s}: alpha = {alpha:+.4f} /s, final amplitude "
          f"{trace.a1[-1] * 1e9:.2f} nm")

ax_decay.set_xlabel("time (s)")
ax_decay.set_ylabel("amplitude (nm)")
ax_decay.legend(frameon=False)
ax_rate.set_xlabel("squared amplitude (nm$^2$)")
ax_rate.set_ylabel("instantaneous decay rate (1/s)")
ax_rate.axhline(3.26, color="gray", lw=0.5)
fig.tight_layout()
fig.savefig(OUT / "01_nonlinear_friction_ringdown.png", dpi=160)
print(f"wrote {OUT / '01_nonlinear_friction_ringdown.png'}")
