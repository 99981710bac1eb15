"""Peak width bistability and force-sweep hysteresis.

Left: the equivalent peak width F_d1/(4 m1 w1 a1_max) per response branch
against drive amplitude - constant at Gamma1/2 with nonlinear friction
negligible, two-valued where the isolated branch coexists with the main
peak.  Right: amplitude against drive amplitude at fixed drive frequency,
hysteretic below the conservative threshold only because of negative
nonlinear friction.
"""

import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidebandlab import (amplitude_from_scaled, force_sweep,
                         gamma_peak_curve, paper_device,
                         scaled_drive_from_force)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

nominal = paper_device()
far = paper_device(delta=-2 * np.pi * 1000.0)
pn = scaled_drive_from_force(1e-12, nominal.mode1, nominal.scaling)
drives = np.linspace(0.2 * pn, 1.1 * pn, 13)

fig, (ax_peak, ax_force) = plt.subplots(1, 2, figsize=(10, 4))

for system, color, label in ((far, "k", "detuning -1000 Hz"),
                             (nominal, "tab:blue", "detuning -35 Hz")):
    table = gamma_peak_curve(system, drives, (-2 * np.pi * 1.0,
                                              2 * np.pi * 4.0),
                             n_points=121)
    fd = [e["fd1_per_s"] / pn for e in table]
    gp = [e["gamma_peak_per_s"] for e in table]
    ax_peak.plot(fd, gp, "o", ms=4, color=color, label=label)
    n_two = sum(1 for e in table if e["multivalued"]) // 2
    print(f"{label}: gamma_peak two-valued at "
          f"{n_two} of {len(drives)} drives")

ax_peak.axhline(3.26 / 2.0, color="gray", lw=0.6, ls=":")
ax_peak.set_xlabel("drive amplitude (pN)")
ax_peak.set_ylabel(r"$\Gamma_{peak}$ (1/s)")
ax_peak.legend(frameon=False)

for system, detune_hz, color, label in (
        (far, 1.1, "tab:blue", "-1000 Hz pump, drive offset 1.1 Hz"),
        (far, 0.4, "tab:purple", "-1000 Hz pump, drive offset 0.4 Hz"),
        (nominal, 0.4, "tab:red", "-35 Hz pump, drive offset 0.4 Hz")):
    sweep = force_sweep(system, 2 * np.pi * detune_hz, (0.3, 8.0), 120)
    fd = [f / pn for f, _ in sweep.rows]
    amp = [amplitude_from_scaled(math.sqrt(st.u1_sq), system.mode1,
                                 system.scaling) * 1e9
           for _, st in sweep.rows]
    ax_force.plot(fd, amp, ".", ms=2.5, color=color, label=label)
    print(f"{label}: hysteretic = {sweep.hysteretic}")

ax_force.set_xlabel("drive amplitude (pN)")
ax_force.set_ylabel("response amplitude (nm)")
ax_force.legend(frameon=False, fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "05_peak_width_and_hysteresis.png", dpi=160)
print(f"wrote {OUT / '05_peak_width_and_hysteresis.png'}")
