import math

import numpy as np
import pytest

from sidebandlab import (BasinOutcome, DriveConfig, ParameterDomainError,
                         RawCouplings, RwaState, alpha_beta, classify_basin,
                         envelope_mode1, full_state_from_rwa, h_rwa,
                         instantaneous_rate, integrate_full_eom,
                         integrate_rwa, omega_pump, paper_device,
                         raw_from_scaled, rwa_rhs, scaled_from_amplitude,
                         thresholds)
from sidebandlab.adiabatic import slaved_v2, solve_extended_adiabatic

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# vector field identities

def test_origin_is_fixed_point(device):
    dv1, dv2 = rwa_rhs(RwaState(0j, 0j), device.rwa, device.gamma1,
                       device.gamma2)
    assert dv1 == 0j and dv2 == 0j


def test_origin_not_fixed_under_drive(device):
    dv1, _ = rwa_rhs(RwaState(0j, 0j), device.rwa, device.gamma1,
                     device.gamma2, drive=DriveConfig(1.0, 0.0))
    assert abs(dv1) == pytest.approx(1.0)


def test_decoupled_linear_decay(linear_system):
    sys_ = linear_system.with_rwa(delta=0.0)
    s = RwaState(0.3 + 0.4j, -0.2 + 0.1j)
    dv1, dv2 = rwa_rhs(s, sys_.rwa, sys_.gamma1, sys_.gamma2)
    assert dv1 == pytest.approx(-sys_.gamma1 * s.v1, rel=1e-15)
    assert dv2 == pytest.approx(-sys_.gamma2 * s.v2, rel=1e-15)


def test_conservative_part_is_hamiltonian_gradient(device):
    """Oracle: central finite differences of the rotating-frame energy.

    With the Wirtinger convention d/dconj(v) = (d/da + i d/db)/2, the
    undamped flow is i times that gradient.
    """
    rng = np.random.default_rng(11)
    p = device.rwa
    h = 1e-6
    for _ in range(20):
        v1 = complex(*rng.normal(0.0, 1.0, 2))
        v2 = complex(*rng.normal(0.0, 1.0, 2))
        dv1, dv2 = rwa_rhs(RwaState(v1, v2), p, 0.0, 0.0)

        def energy(a, b):
            return h_rwa(a, b, p)

        g1 = ((energy(v1 + h, v2) - energy(v1 - h, v2))
              + 1j * (energy(v1 + 1j * h, v2)
                      - energy(v1 - 1j * h, v2))) / (4.0 * h)
        g2 = ((energy(v1, v2 + h) - energy(v1, v2 - h))
              + 1j * (energy(v1, v2 + 1j * h)
                      - energy(v1, v2 - 1j * h))) / (4.0 * h)
        assert dv1 == pytest.approx(1j * g1, rel=1e-6)
        assert dv2 == pytest.approx(1j * g2, rel=1e-6)


def test_hamiltonian_conserved_without_damping(device):
    trace = integrate_rwa(RwaState(0.8 + 0.3j, 0.2 - 0.1j), device,
                          horizon=1.0, gammas=(0.0, 0.0), rtol=1e-11,
                          atol=1e-14)
    energies = np.array([h_rwa(a, b, device.rwa)
                         for a, b in zip(trace.v1, trace.v2)])
    drift = np.max(np.abs(energies - energies[0])) / abs(energies[0])
    assert drift < 1e-7


# ---------------------------------------------------------------------------
# integration and rate extraction

def test_linear_ringdown_exact(linear_system):
    trace = integrate_rwa(RwaState(1.0 + 0j, 0j), linear_system,
                          horizon=1.0)
    ratio = trace.a1[-1] / trace.a1[0]
    assert ratio == pytest.approx(math.exp(-3.26), rel=1e-8)
    rate = instantaneous_rate(trace)
    assert rate.gamma_inst == pytest.approx(
        np.full_like(rate.gamma_inst, 3.26), rel=1e-8)
    assert rate.n_skipped == 0


def test_tolerance_refinement_converges(device):
    s0 = RwaState(1.5 + 0j, 0.05j)
    coarse = integrate_rwa(s0, device, horizon=2.0, rtol=1e-8, atol=1e-11)
    fine = integrate_rwa(s0, device, horizon=2.0, rtol=1e-11, atol=1e-14)
    diff = abs(coarse.v1[-1] - fine.v1[-1])
    assert diff < 1e-6 * abs(fine.v1[-1])


def test_pumped_decay_slower_than_linear(device):
    v1 = 1.0 + 0j
    ad = solve_extended_adiabatic(1.0, device.rwa, device.gamma1,
                                  device.gamma2)
    pumped = integrate_rwa(RwaState(v1, slaved_v2(v1, ad, device.rwa)),
                           device, horizon=0.5)
    linear = integrate_rwa(RwaState(v1, 0j),
                           device.with_rwa(f_p=0.0), horizon=0.5)
    assert pumped.a1[-1] > linear.a1[-1]


def test_small_amplitude_rate_slope(device):
    """The rate-vs-squared-amplitude slope at small amplitude matches the
    weak-pump friction coefficient in dimensional units."""
    alpha, _ = alpha_beta(device.rwa, device.gamma2)
    v1 = complex(math.sqrt(0.35), 0.0)
    ad = solve_extended_adiabatic(abs(v1) ** 2, device.rwa, device.gamma1,
                                  device.gamma2)
    trace = integrate_rwa(RwaState(v1, slaved_v2(v1, ad, device.rwa)),
                          device, horizon=1.2)
    rate = instantaneous_rate(trace, window_s=0.031)
    scale = scaled_from_amplitude(1.0, device.mode1, device.scaling) ** 2
    # alpha in 1/(s m^2): gamma t= Gamma1 + alpha_m * a1^2
    slope_expected = alpha * scale
    mask = rate.a1_sq < 0.3 / scale
    coef = np.polyfit(rate.a1_sq[mask], rate.gamma_inst[mask], 1)
    assert coef[0] == pytest.approx(slope_expected, rel=0.05)
    assert coef[1] == pytest.approx(device.gamma1, rel=0.02)


def test_large_amplitude_rate_non_monotonic(device):
    """Ring-down from large amplitude: the rate passes through an interior
    minimum and returns toward the linear rate at the large-amplitude end."""
    v1 = complex(math.sqrt(100.0), 0.0)
    ad = solve_extended_adiabatic(100.0, device.rwa, device.gamma1,
                                  device.gamma2)
    trace = integrate_rwa(RwaState(v1, slaved_v2(v1, ad, device.rwa)),
                          device, horizon=2.5)
    rate = instantaneous_rate(trace, window_s=0.031)
    order = np.argsort(rate.a1_sq)
    rates_by_amp = rate.gamma_inst[order]
    i_min = int(np.argmin(rates_by_amp))
    assert 0 < i_min < len(rates_by_amp) - 1
    g_min = rates_by_amp[i_min]
    g_large = rates_by_amp[-1]
    assert g_min < 0.7 * device.gamma1
    assert g_large > g_min + 0.5 * (device.gamma1 - g_min)


def test_rate_extraction_skips_zeros(linear_system):
    trace = integrate_rwa(RwaState(1e-6 + 0j, 0j), linear_system,
                          horizon=0.2)
    # manufacture an interior zero
    a1 = trace.a1.copy()
    a1[50] = 0.0
    import dataclasses
    broken = dataclasses.replace(trace, a1=a1)
    rate = instantaneous_rate(broken)
    assert rate.n_skipped > 0


def test_rejects_nonpositive_horizon(device):
    with pytest.raises(ParameterDomainError):
        integrate_rwa(RwaState(1 + 0j, 0j), device, horizon=0.0)


# ---------------------------------------------------------------------------
# basins of attraction

@pytest.fixture(scope="module")
def basin_system():
    return paper_device(delta=-TWO_PI * 15.0)


def test_basin_below_threshold_decays(basin_system):
    thr = thresholds(basin_system)
    res = classify_basin(0.80 * thr.a_th, basin_system)
    assert res.outcome is BasinOutcome.DECAYS_TO_ZERO


def test_basin_above_threshold_locks(basin_system):
    thr = thresholds(basin_system)
    res = classify_basin(1.25 * thr.a_th, basin_system)
    assert res.outcome is BasinOutcome.LIMIT_CYCLE
    assert res.final_a1 == pytest.approx(thr.a_st, rel=1e-2)


def test_basin_from_above_settles_down(basin_system):
    thr = thresholds(basin_system)
    res = classify_basin(1.8 * thr.a_st, basin_system)
    assert res.outcome is BasinOutcome.LIMIT_CYCLE
    assert res.final_a1 == pytest.approx(thr.a_st, rel=1e-2)


def test_basin_boundary_matches_threshold(basin_system):
    """Oracle: bisection on the initial amplitude against the adiabatic
    activation threshold."""
    thr = thresholds(basin_system)
    lo, hi = 0.5 * thr.a_th, 1.6 * thr.a_th
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        res = classify_basin(mid, basin_system)
        if res.outcome is BasinOutcome.LIMIT_CYCLE:
            hi = mid
        else:
            lo = mid
    boundary = 0.5 * (lo + hi)
    assert boundary == pytest.approx(thr.a_th, rel=0.02)


def test_basin_requires_existing_cycle(device):
    with pytest.raises(ParameterDomainError):
        classify_basin(1e-9, device)  # -35 Hz: no self-sustained state


# ---------------------------------------------------------------------------
# fast-oscillation oracle

def test_full_eom_damped_oscillator(linear_system):
    raw = RawCouplings(0.0, 0.0, 0.0, 0.0)
    omega_f = omega_pump(linear_system)
    state0 = full_state_from_rwa(2.0 + 0j, 0j, linear_system, omega_f)
    trace = integrate_full_eom(state0, raw, linear_system.mode1,
                               linear_system.mode2, (0.0, omega_f),
                               horizon=0.010, steps_per_period=60)
    env = envelope_mode1(trace, linear_system.mode1)
    expected = env[0] * np.exp(-linear_system.gamma1 * trace.times)
    assert np.max(np.abs(env - expected) / expected) < 1e-4


def test_full_eom_rejects_bad_configuration(device):
    raw = RawCouplings(0.0, 0.0, 0.0, 0.0)
    state0 = full_state_from_rwa(1 + 0j, 0j, device, omega_pump(device))
    with pytest.raises(ParameterDomainError):
        integrate_full_eom(state0, raw, device.mode1, device.mode2,
                           (0.0, 1e7), horizon=0.2)
    with pytest.raises(ParameterDomainError):
        integrate_full_eom(state0, raw, device.mode1, device.mode2,
                           (0.0, 1e7), horizon=0.01, steps_per_period=20)


@pytest.mark.slow
def test_full_eom_matches_rwa_envelope(device):
    raw = raw_from_scaled(device.rwa, device.mode1, device.mode2,
                          device.scaling)
    omega_f = omega_pump(device)
    v1, v2 = 1.2 + 0j, 0.05 - 0.02j
    state0 = full_state_from_rwa(v1, v2, device, omega_f)
    ftr = integrate_full_eom(state0, raw, device.mode1, device.mode2,
                             (raw.big_f_p, omega_f), horizon=0.004)
    env = envelope_mode1(ftr, device.mode1)
    rtr = integrate_rwa(RwaState(v1, v2), device, horizon=0.004,
                        sample_dt=1e-5)
    a1 = np.interp(ftr.times, rtr.times, rtr.a1)
    assert np.max(np.abs(env - a1) / a1) < 0.02


@pytest.mark.slow
def test_far_detuned_pump_has_no_effect(device):
    """Pump far off both sidebands leaves the envelope unchanged within 1%."""
    far = paper_device(delta=-TWO_PI * 3000.0)
    raw = raw_from_scaled(far.rwa, far.mode1, far.mode2, far.scaling)
    omega_f = omega_pump(far)
    v1 = 1.0 + 0j
    state0 = full_state_from_rwa(v1, 0j, far, omega_f)
    pumped = integrate_full_eom(state0, raw, far.mode1, far.mode2,
                                (raw.big_f_p, omega_f), horizon=0.004,
                                steps_per_period=120)
    unpumped = integrate_full_eom(state0, raw, far.mode1, far.mode2,
                                  (0.0, omega_f), horizon=0.004,
                                  steps_per_period=120)
    e1 = envelope_mode1(pumped, far.mode1)
    e0 = envelope_mode1(unpumped, far.mode1)
    assert np.max(np.abs(e1 - e0) / e0) < 0.01
