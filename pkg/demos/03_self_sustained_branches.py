"""Self-sustained vibration branches and their activated excitation.

Left: the closed-form stable/unstable branch amplitudes against pump
detuning, ending at the saddle-node onset.  Right: trajectories started
below and above the activation threshold at one detuning, showing decay
to zero versus ring-up into the limit cycle.
"""

import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidebandlab import (Branch, RwaState, amplitude_from_scaled, delta_b,
                         integrate_rwa, paper_device, solve_limit_cycles,
                         thresholds)
from sidebandlab.adiabatic import slaved_v2, solve_extended_adiabatic

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

system = paper_device()
onset = delta_b(system.rwa, system.gamma1, system.gamma2)
print(f"self-sustained onset at {onset.delta_b / (2 * np.pi):.2f} Hz "
      f"for the nominal pump")

fig, (ax_branch, ax_time) = plt.subplots(1, 2, figsize=(10, 4))

deltas = np.linspace(onset.delta_b, 2 * np.pi * 5.0, 300)
for branch, style in ((Branch.PLUS, "-"), (Branch.MINUS, "--")):
    amp = []
    for d in deltas:
        sols = solve_limit_cycles(system.with_rwa(delta=float(d)).rwa,
                                  system.gamma1, system.gamma2)
        match = [s for s in sols if s.branch is branch]
        amp.append(amplitude_from_scaled(math.sqrt(match[0].c1_sq),
                                         system.mode1, system.scaling)
                   if match else np.nan)
    ax_branch.plot(deltas / (2 * np.pi), np.array(amp) * 1e9, style,
                   color="tab:red",
                   label="stable" if branch is Branch.PLUS else "unstable")
ax_branch.axvline(onset.delta_b / (2 * np.pi), color="gray", lw=0.6)
ax_branch.set_xlabel("pump detuning (Hz)")
ax_branch.set_ylabel("mode-1 amplitude (nm)")
ax_branch.legend(frameon=False)

basin_sys = paper_device(delta=-2 * np.pi * 15.0)
thr = thresholds(basin_sys)
print(f"at -15 Hz: threshold {thr.a_th * 1e9:.1f} nm, "
      f"stable {thr.a_st * 1e9:.1f} nm")
for frac, color in ((0.8, "tab:purple"), (1.15, "tab:orange"),
                    (1.9, "darkred")):
    a0 = frac * thr.a_th
    from sidebandlab import scaled_from_amplitude
    v1 = complex(scaled_from_amplitude(a0, basin_sys.mode1,
                                       basin_sys.scaling), 0.0)
    ad = solve_extended_adiabatic(abs(v1) ** 2, basin_sys.rwa,
                                  basin_sys.gamma1, basin_sys.gamma2)
    tr = integrate_rwa(RwaState(v1, slaved_v2(v1, ad, basin_sys.rwa)),
                       basin_sys, horizon=5.0, sample_dt=2e-3)
    ax_time.plot(tr.times, tr.a1 * 1e9, color=color,
                 label=f"start {frac:g} x threshold")
ax_time.axhline(thr.a_st * 1e9, color="k", lw=0.6, ls=":")
ax_time.axhline(thr.a_th * 1e9, color="k", lw=0.6, ls="--")
ax_time.set_xlabel("time (s)")
ax_time.set_ylabel("mode-1 amplitude (nm)")
ax_time.legend(frameon=False)
fig.tight_layout()
fig.savefig(OUT / "03_self_sustained_branches.png", dpi=160)
print(f"wrote {OUT / '03_self_sustained_branches.png'}")
