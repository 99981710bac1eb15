"""Effective decay rate versus squared amplitude for several detunings.

Closer to the combination resonance the pump digs a deeper minimum into
the amplitude-dependent decay rate; once the minimum crosses zero, the
zero crossings mark the activation threshold and the stable amplitude of
self-sustained vibrations.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidebandlab import paper_device, thresholds
from sidebandlab.adiabatic import adiabatic_curve

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

xs = np.geomspace(1e-3, 60.0, 300)
fig, ax = plt.subplots(figsize=(6, 4))

for d_hz in (-50.0, -35.0, -26.0, -20.0, -12.0):
    system = paper_device(delta=2.0 * np.pi * d_hz)
    curve = adiabatic_curve(xs, system.rwa, system.gamma1, system.gamma2)
    ax.plot(xs, curve.gamma_ad, label=f"{d_hz:g} Hz")
    thr = thresholds(system)
    if thr.exists:
        ax.plot([thr.x_th, thr.x_st], [0.0, 0.0], "o", ms=4,
                color=ax.lines[-1].get_color())
        print(f"detuning {d_hz:6.1f} Hz: threshold x = {thr.x_th:.3f}, "
              f"stable x = {thr.x_st:.3f}")
    else:
        print(f"detuning {d_hz:6.1f} Hz: decay rate positive everywhere")

ax.axhline(0.0, color="k", lw=0.6)
ax.axhline(3.26, color="gray", lw=0.6, ls=":")
ax.set_xscale("log")
ax.set_xlabel("squared slow amplitude $x = |v_1|^2$")
ax.set_ylabel("effective decay rate (1/s)")
ax.legend(frameon=False, title="pump detuning")
fig.tight_layout()
fig.savefig(OUT / "02_decay_rate_landscape.png", dpi=160)
print(f"wrote {OUT / '02_decay_rate_landscape.png'}")
