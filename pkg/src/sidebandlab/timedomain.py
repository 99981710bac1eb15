"""Time-domain integration: slow-flow trajectories, ring-down rate
extraction, basins of attraction, and the full fast-oscillation integrator
used to cross-validate the rotating-frame reduction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import adiabatic
from .errors import ParameterDomainError, SolverError, StiffnessError
from .params import (DriveConfig, ModeParams, RawCouplings, RwaParams,
                     ScalingConfig, Sideband, SystemParams,
                     amplitude_from_scaled, scaled_from_amplitude)


@dataclass(frozen=True)
class RwaState:
    """Slow complex amplitudes of the two modes at time t."""

    v1: complex
    v2: complex
    t: float = 0.0


@dataclass(frozen=True)
class RingdownTrace:
    """Uniformly sampled slow-flow trajectory with dimensional amplitudes.

    ``gamma_inst`` holds the sliding-window decay rate where defined and NaN
    elsewhere (window touching the ends, or nonpositive amplitude).
    """

    times: np.ndarray       # [s]
    a1: np.ndarray          # [m]
    a2: np.ndarray          # [m]
    v1: np.ndarray          # complex
    v2: np.ndarray          # complex
    gamma_inst: np.ndarray  # [1/s], NaN where undefined
    sample_dt: float


@dataclass(frozen=True)
class FullState:
    """Laboratory-frame displacements and velocities."""

    q1: float  # [m]
    q2: float
    p1: float  # [m/s]
    p2: float
    t: float = 0.0


class BasinOutcome(enum.Enum):
    DECAYS_TO_ZERO = "decays-to-zero"
    LIMIT_CYCLE = "limit-cycle"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class BasinResult:
    outcome: BasinOutcome
    final_a1: float          # mean amplitude over the decision window [m]
    a_st: float              # stable self-sustained amplitude [m]
    a_th: float              # activation threshold [m]


# ---------------------------------------------------------------------------
# slow-flow vector field

def h_rwa(v1: complex, v2: complex, p: RwaParams) -> float:
    """Rotating-frame Hamiltonian; conserved when both decay rates vanish."""
    n1 = abs(v1) ** 2
    n2 = abs(v2) ** 2
    h = -p.delta * n2 + p.lambda12 * n1 * n2 \
        + 0.5 * (p.lambda11 * n1**2 + p.lambda22 * n2**2)
    if p.sideband is Sideband.UPPER:
        pump = v1 * v1 * v2
    else:
        pump = v1 * v1 * np.conj(v2)
    return float(h - p.f_p * 2.0 * pump.real)


def rwa_rhs(state: RwaState, p: RwaParams, gamma1: float, gamma2: float,
            drive: DriveConfig | None = None) -> tuple[complex, complex]:
    """Slow-flow velocity (dv1/dt, dv2/dt) at the given state.

    The conservative part is i dH/dconj(v_i); the optional resonant drive
    adds -i f_d1 exp(i detune t) to the mode-1 equation.
    """
    v1, v2, t = state.v1, state.v2, state.t
    n1 = abs(v1) ** 2
    n2 = abs(v2) ** 2
    if p.sideband is Sideband.UPPER:
        pump1 = -2j * p.f_p * np.conj(v1) * np.conj(v2)
        pump2 = -1j * p.f_p * np.conj(v1) ** 2
    else:
        pump1 = -2j * p.f_p * np.conj(v1) * v2
        pump2 = -1j * p.f_p * v1 * v1
    dv1 = -gamma1 * v1 + 1j * (p.lambda11 * n1 + p.lambda12 * n2) * v1 + pump1
    dv2 = -gamma2 * v2 \
        + 1j * (-p.delta + p.lambda12 * n1 + p.lambda22 * n2) * v2 + pump2
    if drive is not None and drive.f_d1 != 0.0:
        dv1 = dv1 - 1j * drive.f_d1 * np.exp(1j * drive.detune * t)
    return complex(dv1), complex(dv2)


def _pack(v1: complex, v2: complex) -> np.ndarray:
    return np.array([v1.real, v1.imag, v2.real, v2.imag])


def integrate_rwa(state0: RwaState, system: SystemParams,
                  drive: DriveConfig | None = None, horizon: float = 1.0,
                  sample_dt: float = 1e-3, rtol: float = 1e-10,
                  atol: float = 1e-13, rate_window: float = 0.051,
                  gammas: tuple[float, float] | None = None) -> RingdownTrace:
    """Integrate the slow flow over ``horizon`` seconds.

    Adaptive high-order Runge-Kutta with dense output sampled every
    ``sample_dt``; deterministic for fixed inputs.  The returned trace
    carries the sliding-window instantaneous decay rate (width
    ``rate_window`` seconds) alongside the amplitudes.  ``gammas`` replaces
    the two decay rates, e.g. (0, 0) for conservation checks.
    """
    if horizon <= 0.0:
        raise ParameterDomainError(f"horizon must be > 0, got {horizon!r}")
    p = system.rwa
    g1, g2 = gammas if gammas is not None else (system.gamma1,
                                                system.gamma2)

    def rhs(t, yv):
        v1 = complex(yv[0], yv[1])
        v2 = complex(yv[2], yv[3])
        dv1, dv2 = rwa_rhs(RwaState(v1, v2, t), p, g1, g2, drive)
        return [dv1.real, dv1.imag, dv2.real, dv2.imag]

    t_eval = np.arange(0.0, horizon + 0.5 * sample_dt, sample_dt)
    t_eval[-1] = min(t_eval[-1], horizon)
    sol = solve_ivp(rhs, (0.0, horizon), _pack(state0.v1, state0.v2),
                    method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval,
                    dense_output=False)
    if not sol.success:
        raise StiffnessError(
            f"slow-flow integration failed: {sol.message} "
            f"(reached t = {sol.t[-1] if sol.t.size else 0.0:g} s)")
    v1 = sol.y[0] + 1j * sol.y[1]
    v2 = sol.y[2] + 1j * sol.y[3]
    scale1 = amplitude_from_scaled(1.0, system.mode1, system.scaling)
    scale2 = amplitude_from_scaled(1.0, system.mode2, system.scaling)
    a1 = scale1 * np.abs(v1)
    a2 = scale2 * np.abs(v2)
    rate, _ = _sliding_rate(sol.t, a1, rate_window)
    return RingdownTrace(times=sol.t, a1=a1, a2=a2, v1=v1, v2=v2,
                         gamma_inst=rate, sample_dt=sample_dt)


def _sliding_rate(times: np.ndarray, a1: np.ndarray,
                  window_s: float) -> tuple[np.ndarray, int]:
    """Centered least-squares slope of -ln(a1) per sliding window; also
    returns the half-width actually used."""
    if times.size < 3:
        return np.full(times.shape, np.nan), 0
    dt = times[1] - times[0]
    w = max(3, int(round(window_s / dt)))
    if w % 2 == 0:
        w += 1
    w = min(w, times.size if times.size % 2 == 1 else times.size - 1)
    half = w // 2
    out = np.full(times.shape, np.nan)
    positive = a1 > 0.0
    logs = np.where(positive, np.log(np.where(positive, a1, 1.0)), np.nan)
    k = (np.arange(w) - half) * dt
    norm = np.sum(k * k)
    # windows containing any nonpositive amplitude stay NaN
    ok = np.convolve(positive.astype(float), np.ones(w), mode="valid") == w
    slopes = np.convolve(np.nan_to_num(logs), k[::-1] / norm, mode="valid")
    centers = np.arange(half, times.size - half)
    out[centers[ok]] = -slopes[ok]
    return out, half


@dataclass(frozen=True)
class InstantaneousRate:
    """Decay-rate series paired with the window-center squared amplitude."""

    a1_sq: np.ndarray       # [m^2]
    gamma_inst: np.ndarray  # [1/s]
    times: np.ndarray       # [s]
    n_skipped: int


def instantaneous_rate(trace: RingdownTrace,
                       window_s: float = 0.051) -> InstantaneousRate:
    """Extract gamma_inst = -d ln(a1)/dt from a trace.

    The printed convention makes decay positive.  Windows touching a
    nonpositive amplitude are skipped and counted in ``n_skipped``.
    """
    if trace.times.size < 3:
        raise ParameterDomainError("trace too short for rate extraction")
    rate, half = _sliding_rate(trace.times, trace.a1, window_s)
    defined = np.isfinite(rate)
    interior = np.zeros_like(defined)
    interior[half:trace.times.size - half] = True
    n_skipped = int(np.sum(interior & ~defined))
    return InstantaneousRate(a1_sq=trace.a1[defined] ** 2,
                             gamma_inst=rate[defined],
                             times=trace.times[defined],
                             n_skipped=n_skipped)


# ---------------------------------------------------------------------------
# basins of attraction

def classify_basin(a1_initial: float, system: SystemParams,
                   horizon: float | None = None,
                   v2_start: str = "slaved") -> BasinResult:
    """Decide whether a perturbation of amplitude ``a1_initial`` [m] decays
    or rings up into the self-sustained state.

    The trajectory starts from (v1 real, v2 slaved or zero) and the decision
    compares the mean amplitude over the final 1% of the horizon against
    deciders placed around half the self-sustained amplitude.
    """
    thr = adiabatic.thresholds(system)
    if not thr.exists:
        raise ParameterDomainError(
            "no self-sustained state at these settings; basin is trivial")
    g1 = system.gamma1
    horizon = 20.0 / g1 if horizon is None else horizon
    v1 = complex(scaled_from_amplitude(a1_initial, system.mode1,
                                       system.scaling), 0.0)
    if v2_start == "slaved" and abs(v1) > 0.0:
        st = adiabatic.solve_extended_adiabatic(abs(v1) ** 2, system.rwa,
                                                g1, system.gamma2)
        v2 = adiabatic.slaved_v2(v1, st, system.rwa)
    elif v2_start in ("slaved", "zero"):
        v2 = 0.0 + 0.0j
    else:
        raise ParameterDomainError(f"unknown v2_start: {v2_start!r}")
    trace = integrate_rwa(RwaState(v1, v2), system, horizon=horizon,
                          sample_dt=horizon / 4000.0)
    tail = trace.a1[trace.times >= 0.99 * horizon]
    final = float(np.mean(tail))
    if final >= 0.75 * thr.a_st:
        outcome = BasinOutcome.LIMIT_CYCLE
    elif final <= 0.25 * thr.a_st:
        outcome = BasinOutcome.DECAYS_TO_ZERO
    else:
        outcome = BasinOutcome.UNDECIDED
    return BasinResult(outcome=outcome, final_a1=final, a_st=thr.a_st,
                       a_th=thr.a_th)


# ---------------------------------------------------------------------------
# full fast-oscillation oracle

@dataclass(frozen=True)
class FullTrace:
    times: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray


def omega_pump(system: SystemParams) -> float:
    """Laboratory pump frequency for the configured sideband and detuning."""
    w1, w2 = system.mode1.omega, system.mode2.omega
    if system.rwa.sideband is Sideband.UPPER:
        return w2 + 2.0 * w1 + system.rwa.delta
    return w2 - 2.0 * w1 + system.rwa.delta


def full_state_from_rwa(v1: complex, v2: complex, system: SystemParams,
                        omega_f: float) -> FullState:
    """Laboratory-frame state matching slow amplitudes at t = 0."""
    m1, w1 = system.mode1.mass, system.mode1.omega
    m2, w2 = system.mode2.mass, system.mode2.omega
    c = system.scaling.c_sc
    if system.rwa.sideband is Sideband.UPPER:
        w_ref = omega_f - 2.0 * w1
    else:
        w_ref = omega_f + 2.0 * w1
    s1 = math.sqrt(2.0 * w1 * c / m1)
    s2 = math.sqrt(2.0 * w2 * c / m2)
    return FullState(q1=s1 * v1.real / w1, p1=-s1 * v1.imag,
                     q2=s2 * v2.real / w_ref, p2=-s2 * v2.imag)


def integrate_full_eom(state0: FullState, raw: RawCouplings,
                       mode1: ModeParams, mode2: ModeParams,
                       pump: tuple[float, float], horizon: float,
                       steps_per_period: int = 200,
                       sample_every: int = 50) -> FullTrace:
    """Fixed-step fourth-order integration of the laboratory-frame equations.

    ``pump`` is (F_p, omega_F).  The step is tied to the fast mode-2 period;
    requesting fewer than 50 steps per period or a horizon beyond 50 ms is
    rejected (this integrator exists for short cross-validation runs, not
    production sweeps).
    """
    if horizon > 0.05:
        raise ParameterDomainError(
            f"horizon {horizon:g} s too long for the fast integrator "
            "(limit 0.05 s)")
    if steps_per_period < 50:
        raise ParameterDomainError(
            "need at least 50 steps per fast period")
    big_f_p, omega_f = pump
    w1sq = mode1.omega ** 2
    w2sq = mode2.omega ** 2
    g1, g2 = mode1.gamma, mode2.gamma
    c1 = raw.gamma_disp / mode1.mass
    c2 = raw.gamma_disp / mode2.mass
    d1 = raw.gamma1 / mode1.mass
    d2 = raw.gamma2 / mode2.mass
    fp1 = big_f_p / mode1.mass
    fp2 = big_f_p / mode2.mass
    cos = math.cos

    def accel(t, q1, q2, p1, p2):
        drive = cos(omega_f * t)
        a1 = (-w1sq * q1 - 2.0 * g1 * p1 - c1 * q1 * q2 * q2
              - d1 * q1**3 + fp1 * 2.0 * q1 * q2 * drive)
        a2 = (-w2sq * q2 - 2.0 * g2 * p2 - c2 * q1 * q1 * q2
              - d2 * q2**3 + fp2 * q1 * q1 * drive)
        return a1, a2

    h = 2.0 * math.pi / (steps_per_period * mode2.omega)
    n_steps = int(math.ceil(horizon / h))
    q1, q2, p1, p2 = state0.q1, state0.q2, state0.p1, state0.p2
    t = state0.t
    times = [t]
    q1s, q2s, p1s, p2s = [q1], [q2], [p1], [p2]
    half = 0.5 * h
    sixth = h / 6.0
    for step in range(n_steps):
        a1a, a2a = accel(t, q1, q2, p1, p2)
        k1q1, k1q2, k1p1, k1p2 = p1, p2, a1a, a2a
        a1b, a2b = accel(t + half, q1 + half * k1q1, q2 + half * k1q2,
                         p1 + half * k1p1, p2 + half * k1p2)
        k2q1, k2q2 = p1 + half * k1p1, p2 + half * k1p2
        k2p1, k2p2 = a1b, a2b
        a1c, a2c = accel(t + half, q1 + half * k2q1, q2 + half * k2q2,
                         p1 + half * k2p1, p2 + half * k2p2)
        k3q1, k3q2 = p1 + half * k2p1, p2 + half * k2p2
        k3p1, k3p2 = a1c, a2c
        a1d, a2d = accel(t + h, q1 + h * k3q1, q2 + h * k3q2,
                         p1 + h * k3p1, p2 + h * k3p2)
        k4q1, k4q2 = p1 + h * k3p1, p2 + h * k3p2
        k4p1, k4p2 = a1d, a2d
        q1 += sixth * (k1q1 + 2.0 * (k2q1 + k3q1) + k4q1)
        q2 += sixth * (k1q2 + 2.0 * (k2q2 + k3q2) + k4q2)
        p1 += sixth * (k1p1 + 2.0 * (k2p1 + k3p1) + k4p1)
        p2 += sixth * (k1p2 + 2.0 * (k2p2 + k3p2) + k4p2)
        t += h
        if (step + 1) % sample_every == 0 or step == n_steps - 1:
            times.append(t)
            q1s.append(q1)
            q2s.append(q2)
            p1s.append(p1)
            p2s.append(p2)
    return FullTrace(times=np.array(times), q1=np.array(q1s),
                     q2=np.array(q2s), p1=np.array(p1s), p2=np.array(p2s))


def envelope_mode1(trace: FullTrace, mode1: ModeParams) -> np.ndarray:
    """Oscillation envelope of q1: sqrt(q1^2 + (p1/w1)^2) [m]."""
    return np.sqrt(trace.q1**2 + (trace.p1 / mode1.omega) ** 2)
