import math

import numpy as np
import pytest

from sidebandlab import (Branch, ParameterDomainError, Sideband, delta_b,
                         normal_form_fit, oscillation_frequencies,
                         paper_device, solve_limit_cycles, stability_of_cycle)
from sidebandlab.errors import FitError
from sidebandlab.selfsustained import (corotating_jacobian, corotating_rhs,
                                       stationarity_residual)

TWO_PI = 2.0 * np.pi


def cycles(system, delta=None, f_p=None):
    p = system.rwa
    changes = {}
    if delta is not None:
        changes["delta"] = delta
    if f_p is not None:
        changes["f_p"] = f_p
    if changes:
        p = system.with_rwa(**changes).rwa
    return p, solve_limit_cycles(p, system.gamma1, system.gamma2)


def test_no_pump_no_cycles(device):
    _, sols = cycles(device, f_p=0.0)
    assert sols == []


def test_below_onset_no_cycles(device):
    # -35 Hz lies below the onset detuning of the nominal pump
    _, sols = cycles(device)
    assert sols == []


def test_two_branches_at_zero_detuning(device):
    p, sols = cycles(device, delta=0.0, f_p=14.5)
    assert len(sols) == 2
    plus = next(s for s in sols if s.branch is Branch.PLUS)
    minus = next(s for s in sols if s.branch is Branch.MINUS)
    assert plus.c1_sq > minus.c1_sq
    for s in sols:
        assert stationarity_residual(s, p, device.gamma1, device.gamma2) \
            < 1e-9


def test_amplitude_ratio_identity(device):
    p, sols = cycles(device, delta=-TWO_PI * 10.0)
    assert sols
    for s in sols:
        assert device.gamma1 * s.c1_sq == pytest.approx(
            2.0 * device.gamma2 * s.c2_sq, rel=1e-10)


def test_slaved_amplitude_consistency(device_neg20):
    sys_ = device_neg20
    _, sols = cycles(sys_)
    for s in sols:
        assert abs(s.c2) ** 2 == pytest.approx(s.c2_sq, rel=1e-10)


def test_stability_labels(device):
    p, sols = cycles(device, delta=0.0, f_p=14.5)
    plus = next(s for s in sols if s.branch is Branch.PLUS)
    minus = next(s for s in sols if s.branch is Branch.MINUS)
    assert plus.stable
    assert not minus.stable
    stable, eig = stability_of_cycle(minus, p, device.gamma1, device.gamma2)
    assert not stable
    # exactly one direction grows; the free cycle phase contributes one
    # neutral eigenvalue
    margin = 1e-9 * device.gamma2
    assert np.sum(eig.real > margin) == 1
    assert np.min(np.abs(eig.real)) < margin


def test_zero_state_eigenvalues(device):
    from sidebandlab.selfsustained import SelfSustainedSolution
    p = device.with_rwa(f_p=0.0, delta=0.0).rwa
    sol = SelfSustainedSolution(c1_sq=0.0, c2_sq=0.0, delta_omega=0.0,
                                stable=True, branch=Branch.PLUS,
                                c1=0j, c2=0j)
    _, eig = stability_of_cycle(sol, p, device.gamma1, device.gamma2)
    re = np.sort(eig.real)
    assert re == pytest.approx([-device.gamma2, -device.gamma2,
                                -device.gamma1, -device.gamma1], rel=1e-12)


def test_jacobian_matches_finite_differences(device_neg20):
    sys_ = device_neg20
    p, sols = cycles(sys_)
    sol = sols[0]
    jac = corotating_jacobian(sol.c1, sol.c2, p, sys_.gamma1, sys_.gamma2,
                              sol.delta_omega)

    def field(vec):
        c1 = complex(vec[0], vec[1])
        c2 = complex(vec[2], vec[3])
        f1, f2 = corotating_rhs(c1, c2, p, sys_.gamma1, sys_.gamma2,
                                sol.delta_omega)
        return np.array([f1.real, f1.imag, f2.real, f2.imag])

    x0 = np.array([sol.c1.real, sol.c1.imag, sol.c2.real, sol.c2.imag])
    num = np.empty((4, 4))
    h = 1e-7
    for j in range(4):
        dx = np.zeros(4)
        dx[j] = h
        num[:, j] = (field(x0 + dx) - field(x0 - dx)) / (2.0 * h)
    assert jac == pytest.approx(num, rel=2e-6, abs=1e-5)


def test_lower_sideband_jacobian_matches_finite_differences(device):
    p = device.with_rwa(sideband=Sideband.LOWER).rwa
    c1, c2 = 0.8 + 0.2j, 0.1 - 0.3j
    jac = corotating_jacobian(c1, c2, p, device.gamma1, device.gamma2, 2.5)

    def field(vec):
        f1, f2 = corotating_rhs(complex(vec[0], vec[1]),
                                complex(vec[2], vec[3]), p, device.gamma1,
                                device.gamma2, 2.5)
        return np.array([f1.real, f1.imag, f2.real, f2.imag])

    x0 = np.array([c1.real, c1.imag, c2.real, c2.imag])
    num = np.empty((4, 4))
    h = 1e-7
    for j in range(4):
        dx = np.zeros(4)
        dx[j] = h
        num[:, j] = (field(x0 + dx) - field(x0 - dx)) / (2.0 * h)
    assert jac == pytest.approx(num, rel=2e-6, abs=1e-5)


def test_oscillation_frequencies_identity(device_neg20):
    sys_ = device_neg20
    _, sols = cycles(sys_)
    omega1 = sys_.mode1.omega
    omega_f = sys_.mode2.omega + 2.0 * omega1 + sys_.rwa.delta
    for s in sols:
        f1, f2 = oscillation_frequencies(s, omega1, omega_f)
        assert 2.0 * f1 + f2 == pytest.approx(omega_f, abs=1e-12 * omega_f)


def test_zero_amplitude_frequency_offset(device):
    from sidebandlab.selfsustained import delta_omega_of
    p = device.with_rwa(delta=TWO_PI * 10.0).rwa
    dw = delta_omega_of(0.0, p, device.gamma1, device.gamma2)
    expected = device.gamma1 * p.delta / (2.0 * device.gamma1
                                          + device.gamma2)
    assert dw == pytest.approx(expected, rel=1e-14)
    assert dw == pytest.approx(1.055, rel=1e-3)


def test_onset_detuning_against_existence_scan(device):
    """Oracle: scan the detuning axis for the first appearance of real
    branch amplitudes and compare with the closed-form onset."""
    onset = delta_b(device.rwa, device.gamma1, device.gamma2).delta_b
    assert onset == pytest.approx(-150.068, rel=1e-4)  # -23.884 Hz
    lo, hi = onset - 30.0, onset + 30.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        _, sols = cycles(device, delta=mid)
        if sols:
            hi = mid
        else:
            lo = mid
    assert 0.5 * (lo + hi) == pytest.approx(onset, rel=1e-9)


def test_onset_zero_when_pump_balances(device):
    from sidebandlab import g_constant
    g = g_constant(device.gamma1, device.gamma2, device.rwa.lambda11,
                   device.rwa.lambda22, device.rwa.lambda12)
    f_p = math.sqrt(device.gamma1 * g / (2.0 * device.gamma1
                                         + device.gamma2))
    p = device.with_rwa(f_p=f_p).rwa
    assert delta_b(p, device.gamma1, device.gamma2).delta_b \
        == pytest.approx(0.0, abs=1e-9)


def test_existence_window_scan(device):
    """Cycles exist exactly for detunings above the onset (200-point scan)."""
    onset = delta_b(device.rwa, device.gamma1, device.gamma2).delta_b
    for d in np.linspace(onset - 120.0, onset + 120.0, 200):
        _, sols = cycles(device, delta=float(d))
        if d < onset:
            assert sols == []
        elif d > onset + 1e-6:
            assert len(sols) == 2
            assert sum(s.stable for s in sols) == 1


def test_branch_coalescence_at_onset(device):
    onset = delta_b(device.rwa, device.gamma1, device.gamma2).delta_b
    _, sols = cycles(device, delta=onset + 1e-11)
    assert len(sols) == 2
    c_hi = max(s.c1_sq for s in sols)
    c_lo = min(s.c1_sq for s in sols)
    assert (c_hi - c_lo) / c_hi < 1e-6


def test_time_domain_convergence_to_plus_branch(device):
    """Oracle: long-horizon integration from above threshold settles on the
    closed-form stable amplitude."""
    from sidebandlab import RwaState, integrate_rwa
    from sidebandlab.adiabatic import slaved_v2, solve_extended_adiabatic
    sys_ = paper_device(delta=-TWO_PI * 15.0)
    p, sols = cycles(sys_)
    plus = next(s for s in sols if s.branch is Branch.PLUS)
    v1 = complex(math.sqrt(1.3 * plus.c1_sq), 0.0)
    ad = solve_extended_adiabatic(abs(v1) ** 2, p, sys_.gamma1, sys_.gamma2)
    tr = integrate_rwa(RwaState(v1, slaved_v2(v1, ad, p)), sys_,
                       horizon=14.0, sample_dt=5e-3)
    assert abs(tr.v1[-1]) ** 2 == pytest.approx(plus.c1_sq, rel=1e-6)


# ---------------------------------------------------------------------------
# saddle-node normal form

def test_normal_form_self_fit():
    """Exact synthetic branches recover their own (r0, k)."""
    from sidebandlab.selfsustained import fit_sqrt_splitting
    k_true, r0_true = 0.0321, 1.73
    eps = np.linspace(1e-4, 4.0, 80)
    r_plus = r0_true + np.sqrt(k_true * eps)
    r_minus = r0_true - np.sqrt(k_true * eps)
    fit = fit_sqrt_splitting(eps, r_plus, r_minus)
    assert fit.epsilon_slope == pytest.approx(k_true, rel=1e-9)
    assert fit.r0 == pytest.approx(r0_true, rel=1e-9)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)


def test_normal_form_fit_on_branches(device):
    onset = delta_b(device.rwa, device.gamma1, device.gamma2).delta_b
    fit = normal_form_fit(device.rwa, device.gamma1, device.gamma2,
                          window=(onset - 5.0, onset + 5.0), n_points=50)
    assert fit.n_points >= 40
    assert fit.r0 > 0.0
    # branch splitting follows a square root: log-log slope of the
    # separation against the detuning excess is one half
    eps = np.geomspace(1e-4, 2.0, 25)
    seps = []
    for e in eps:
        _, sols = cycles(device, delta=onset + float(e))
        rs = sorted(math.sqrt(s.c1_sq) for s in sols)
        seps.append(rs[1] - rs[0])
    slope = np.polyfit(np.log(eps), np.log(seps), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.02)
    # the fitted splitting coefficient reproduces the actual separation
    mid = onset + 1.0
    _, sols = cycles(device, delta=mid)
    rs = sorted(math.sqrt(s.c1_sq) for s in sols)
    assert (rs[1] - rs[0]) / 2.0 == pytest.approx(
        math.sqrt(fit.epsilon_slope * 1.0), rel=0.05)


def test_normal_form_fit_declines_below_onset(device):
    onset = delta_b(device.rwa, device.gamma1, device.gamma2).delta_b
    with pytest.raises(FitError):
        normal_form_fit(device.rwa, device.gamma1, device.gamma2,
                        window=(onset - 10.0, onset - 1.0))


def test_requires_upper_sideband(device):
    p = device.with_rwa(sideband=Sideband.LOWER).rwa
    with pytest.raises(ParameterDomainError):
        solve_limit_cycles(p, device.gamma1, device.gamma2)
