"""Cross-validation of the slow-flow reduction against the fast equations.

Integrates the laboratory-frame equations of motion (resolving every
oscillation cycle of both modes) over ten milliseconds and compares the
mode-1 envelope with the rotating-frame trajectory.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidebandlab import (RwaState, envelope_mode1, full_state_from_rwa,
                         integrate_full_eom, integrate_rwa, omega_pump,
                         paper_device, raw_from_scaled)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

system = paper_device()
raw = raw_from_scaled(system.rwa, system.mode1, system.mode2,
                      system.scaling)
omega_f = omega_pump(system)
v1, v2 = 1.2 + 0.0j, 0.05 - 0.02j

state0 = full_state_from_rwa(v1, v2, system, omega_f)
full = integrate_full_eom(state0, raw, system.mode1, system.mode2,
                          (raw.big_f_p, omega_f), horizon=0.010)
env = envelope_mode1(full, system.mode1)
slow = integrate_rwa(RwaState(v1, v2), system, horizon=0.010,
                     sample_dt=1e-5)
a1 = np.interp(full.times, slow.times, slow.a1)
rel = np.abs(env - a1) / a1
print(f"max relative envelope mismatch: {rel.max():.2e}")

fig, (ax_env, ax_err) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
ax_env.plot(full.times * 1e3, env * 1e9, "k", lw=1.2,
            label="fast equations")
ax_env.plot(full.times * 1e3, a1 * 1e9, "tab:orange", ls="--",
            label="slow flow")
ax_env.set_ylabel("mode-1 envelope (nm)")
ax_env.legend(frameon=False)
ax_err.semilogy(full.times * 1e3, rel)
ax_err.set_xlabel("time (ms)")
ax_err.set_ylabel("relative mismatch")
fig.tight_layout()
fig.savefig(OUT / "06_rwa_validation.png", dpi=160)
print(f"wrote {OUT / '06_rwa_validation.png'}")
