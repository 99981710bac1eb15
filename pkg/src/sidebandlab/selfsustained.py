"""Closed-form limit cycles of the pumped pair: amplitudes, frequencies,
stability, and the saddle-node onset of self-sustained vibrations.

Upper-sideband pumping only: on the lower sideband the induced nonlinear
friction is positive and no limit cycle exists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import FitError, ParameterDomainError, SolverError
from .params import RwaParams, Sideband, g_constant


class Branch(enum.Enum):
    PLUS = "plus"    # larger amplitude, stable
    MINUS = "minus"  # smaller amplitude, unstable (activation threshold)


@dataclass(frozen=True)
class SelfSustainedSolution:
    """One stationary limit-cycle solution in the co-rotating frame.

    c1 is real by gauge choice; c2 follows from the slaved stationarity
    condition.  delta_omega is the frequency offset of mode 1 from its
    eigenfrequency.
    """

    c1_sq: float
    c2_sq: float
    delta_omega: float  # [rad/s]
    stable: bool
    branch: Branch
    c1: complex
    c2: complex


@dataclass(frozen=True)
class BifurcationResult:
    delta_b: float  # onset detuning [rad/s]
    kind: str = "saddle-node-of-cycles"


@dataclass(frozen=True)
class NormalFormFit:
    """Square-root branch-splitting fit near the onset detuning."""

    r0: float             # common amplitude |c1| at onset
    epsilon_slope: float  # k in |c1| = r0 +/- sqrt(k (delta - delta_b))
    residual_rms: float
    n_points: int


def _require_upper(p: RwaParams) -> None:
    if p.sideband is not Sideband.UPPER:
        raise ParameterDomainError(
            "limit cycles require pumping the upper sideband")


def _discriminant(p: RwaParams, gamma1: float, gamma2: float) -> float:
    """Argument of the square root in the closed-form |c1|^2.

    Positive exactly where the stationary limit-cycle pair exists:
    2 Gamma1 f_p^2 G delta + (2 Gamma1 + Gamma2)^2 f_p^4 - Gamma1^2 G^2.
    """
    g = g_constant(gamma1, gamma2, p.lambda11, p.lambda22, p.lambda12)
    return (2.0 * gamma1 * p.f_p**2 * g * p.delta
            + (2.0 * gamma1 + gamma2) ** 2 * p.f_p**4
            - (gamma1 * g) ** 2)


def delta_omega_of(c1_sq: float, p: RwaParams, gamma1: float,
                   gamma2: float) -> float:
    """Frequency offset of a stationary solution with squared amplitude
    c1_sq (valid for the zero-amplitude limit as well)."""
    k = (0.5 * gamma1 * p.lambda12
         + 0.5 * (gamma1**2 / gamma2) * p.lambda22
         - gamma2 * p.lambda11)
    return (gamma1 * p.delta - c1_sq * k) / (2.0 * gamma1 + gamma2)


def _assemble(c1_sq: float, p: RwaParams, gamma1: float, gamma2: float,
              branch: Branch, stable: bool) -> SelfSustainedSolution:
    c2_sq = gamma1 * c1_sq / (2.0 * gamma2)
    d_omega = delta_omega_of(c1_sq, p, gamma1, gamma2)
    c1 = complex(math.sqrt(c1_sq), 0.0)
    # slaved mode-2 amplitude from the stationary mode-2 equation
    d_c = gamma2 + 1j * (p.delta - 2.0 * d_omega
                         - p.lambda12 * c1_sq - p.lambda22 * c2_sq)
    c2 = -1j * p.f_p * c1 * c1 / d_c
    return SelfSustainedSolution(c1_sq=c1_sq, c2_sq=c2_sq,
                                 delta_omega=d_omega, stable=stable,
                                 branch=branch, c1=c1, c2=c2)


def solve_limit_cycles(p: RwaParams, gamma1: float,
                       gamma2: float) -> list[SelfSustainedSolution]:
    """All physical limit-cycle solutions at the given pump settings.

    Evaluates the closed-form squared amplitude for both square-root signs,
    discards negative/complex results, and labels stability by eigenvalue
    analysis of the co-rotating linearization.  Empty list when the pump is
    below threshold for the given detuning.
    """
    _require_upper(p)
    if p.f_p == 0.0:
        return []
    disc = _discriminant(p, gamma1, gamma2)
    if disc < 0.0:
        return []
    g = g_constant(gamma1, gamma2, p.lambda11, p.lambda22, p.lambda12)
    two_g = 2.0 * gamma1 + gamma2
    root = math.sqrt(disc)
    base = gamma1 * g * p.delta + two_g**2 * p.f_p**2
    out = []
    for sign, branch in ((+1.0, Branch.PLUS), (-1.0, Branch.MINUS)):
        c1_sq = (gamma2 / gamma1) / g**2 * (base + sign * two_g * root)
        if c1_sq <= 0.0:
            continue
        sol = _assemble(c1_sq, p, gamma1, gamma2, branch, stable=False)
        stable, _ = stability_of_cycle(sol, p, gamma1, gamma2)
        out.append(replace(sol, stable=stable))
    return out


def oscillation_frequencies(sol: SelfSustainedSolution, omega1: float,
                            omega_f: float) -> tuple[float, float]:
    """Laboratory-frame oscillation frequencies (mode 1, mode 2) [rad/s].

    Phase matching ties them to the pump: 2*f1 + f2 == omega_f exactly.
    """
    return omega1 + sol.delta_omega, omega_f - 2.0 * omega1 - 2.0 * sol.delta_omega


def delta_b(p: RwaParams, gamma1: float, gamma2: float) -> BifurcationResult:
    """Onset detuning of self-sustained vibrations (saddle-node of cycles).

    delta_b = (Gamma1^2 G^2 - (2 Gamma1+Gamma2)^2 f_p^4) / (2 Gamma1 f_p^2 G);
    the cycle pair exists for delta > delta_b and not below.
    """
    if p.f_p <= 0.0:
        raise ParameterDomainError("delta_b requires f_p > 0")
    g = g_constant(gamma1, gamma2, p.lambda11, p.lambda22, p.lambda12)
    if g <= 0.0:
        raise ParameterDomainError(f"G = {g:g} <= 0: no saddle-node exists")
    value = ((gamma1 * g) ** 2 - (2.0 * gamma1 + gamma2) ** 2 * p.f_p**4) \
        / (2.0 * gamma1 * p.f_p**2 * g)
    return BifurcationResult(delta_b=value)


# ---------------------------------------------------------------------------
# linear stability in the co-rotating frame

def corotating_jacobian(c1: complex, c2: complex, p: RwaParams,
                        gamma1: float, gamma2: float,
                        delta_rot: float) -> np.ndarray:
    """Real 4x4 Jacobian of the co-rotating slow-flow equations at (c1, c2).

    ``delta_rot`` is the rotation rate of the frame (the stationary
    delta_omega for free cycles, the drive detuning for forced states).
    Additive drive terms do not enter the Jacobian, so the same matrix
    serves both problems.  Variables ordered (Re c1, Im c1, Re c2, Im c2).
    """
    l11, l22, l12, f_p = p.lambda11, p.lambda22, p.lambda12, p.f_p
    n1 = abs(c1) ** 2
    n2 = abs(c2) ** 2
    if p.sideband is Sideband.UPPER:
        a11 = -(gamma1 + 1j * delta_rot) + 2j * l11 * n1 + 1j * l12 * n2
        b11 = 1j * l11 * c1 * c1 - 2j * f_p * np.conj(c2)
        a12 = 1j * l12 * c1 * np.conj(c2)
        b12 = 1j * l12 * c1 * c2 - 2j * f_p * np.conj(c1)
        a21 = 1j * l12 * c2 * np.conj(c1)
        b21 = 1j * l12 * c2 * c1 - 2j * f_p * np.conj(c1)
        a22 = -(gamma2 + 1j * p.delta - 2j * delta_rot) \
            + 1j * l12 * n1 + 2j * l22 * n2
        b22 = 1j * l22 * c2 * c2
    else:
        a11 = -(gamma1 + 1j * delta_rot) + 2j * l11 * n1 + 1j * l12 * n2
        b11 = 1j * l11 * c1 * c1 - 2j * f_p * c2
        a12 = 1j * l12 * c1 * np.conj(c2) - 2j * f_p * np.conj(c1)
        b12 = 1j * l12 * c1 * c2
        a21 = 1j * l12 * c2 * np.conj(c1) - 2j * f_p * c1
        b21 = 1j * l12 * c2 * c1
        a22 = -(gamma2 + 1j * p.delta + 2j * delta_rot) \
            + 1j * l12 * n1 + 2j * l22 * n2
        b22 = 1j * l22 * c2 * c2

    def block(a, b):
        # d/dt (re, im) of F = A z + B conj(z) linearization
        return np.array([[a.real + b.real, -a.imag + b.imag],
                         [a.imag + b.imag, a.real - b.real]])

    jac = np.zeros((4, 4))
    jac[0:2, 0:2] = block(a11, b11)
    jac[0:2, 2:4] = block(a12, b12)
    jac[2:4, 0:2] = block(a21, b21)
    jac[2:4, 2:4] = block(a22, b22)
    return jac


def corotating_rhs(c1: complex, c2: complex, p: RwaParams, gamma1: float,
                   gamma2: float, delta_rot: float,
                   f_d1: float = 0.0) -> tuple[complex, complex]:
    """Slow-flow velocity in the frame rotating at ``delta_rot``; stationary
    solutions make both components vanish.  ``f_d1`` adds the resonant
    drive to the mode-1 equation."""
    n1 = abs(c1) ** 2
    n2 = abs(c2) ** 2
    if p.sideband is Sideband.UPPER:
        pump1 = -2j * p.f_p * np.conj(c1) * np.conj(c2)
        pump2 = -1j * p.f_p * np.conj(c1) ** 2
        rot2 = p.delta - 2.0 * delta_rot
    else:
        pump1 = -2j * p.f_p * np.conj(c1) * c2
        pump2 = -1j * p.f_p * c1 * c1
        rot2 = p.delta + 2.0 * delta_rot
    f1 = -(gamma1 + 1j * delta_rot) * c1 \
        + 1j * (p.lambda11 * n1 + p.lambda12 * n2) * c1 + pump1 - 1j * f_d1
    f2 = -(gamma2 + 1j * rot2) * c2 \
        + 1j * (p.lambda12 * n1 + p.lambda22 * n2) * c2 + pump2
    return f1, f2


def stability_of_cycle(sol: SelfSustainedSolution, p: RwaParams,
                       gamma1: float, gamma2: float
                       ) -> tuple[bool, np.ndarray]:
    """Eigenvalues of the co-rotating linearization about a limit cycle.

    One eigenvalue is zero by the free phase of the cycle; stability means no
    eigenvalue real part exceeds the margin 1e-9*Gamma2 (which tolerates that
    neutral mode).
    """
    jac = corotating_jacobian(sol.c1, sol.c2, p, gamma1, gamma2,
                              sol.delta_omega)
    eig = np.linalg.eigvals(jac)
    if not np.all(np.isfinite(eig)):
        raise SolverError("eigenvalue computation returned non-finite values")
    margin = 1e-9 * gamma2
    return bool(np.max(eig.real) < margin), eig


def stationarity_residual(sol: SelfSustainedSolution, p: RwaParams,
                          gamma1: float, gamma2: float) -> float:
    """Worst-case magnitude of the co-rotating slow-flow velocity at the
    solution, normalized by the decay terms (dimensionless)."""
    f1, f2 = corotating_rhs(sol.c1, sol.c2, p, gamma1, gamma2,
                            sol.delta_omega)
    scale1 = max(gamma1 * abs(sol.c1), p.f_p * max(abs(sol.c2), 1e-30), 1e-30)
    scale2 = max(gamma2 * abs(sol.c2), p.f_p * abs(sol.c1) ** 2, 1e-30)
    return max(abs(f1) / scale1, abs(f2) / scale2)


# ---------------------------------------------------------------------------
# saddle-node normal form near onset

def fit_sqrt_splitting(eps, r_plus, r_minus) -> NormalFormFit:
    """Regress a branch pair onto r0 +/- sqrt(k * eps).

    The half-splitting squared is fitted through the origin against the
    control-parameter excess eps; the branch midpoints, which drift
    linearly in eps, are extrapolated back to eps = 0 for r0.
    """
    eps = np.asarray(eps, dtype=float)
    r_plus = np.asarray(r_plus, dtype=float)
    r_minus = np.asarray(r_minus, dtype=float)
    if eps.size < 3:
        raise FitError("need at least three branch-pair points")
    splits_sq = ((r_plus - r_minus) / 2.0) ** 2
    mids = (r_plus + r_minus) / 2.0
    k = float(np.sum(eps * splits_sq) / np.sum(eps * eps))
    de = eps - eps.mean()
    slope = float(np.dot(de, mids - mids.mean()) / np.dot(de, de))
    r0 = float(mids.mean() - slope * eps.mean())
    resid = splits_sq - k * eps
    return NormalFormFit(r0=r0, epsilon_slope=k,
                         residual_rms=float(np.sqrt(np.mean(resid**2))),
                         n_points=int(eps.size))


def normal_form_fit(p: RwaParams, gamma1: float, gamma2: float,
                    window: tuple[float, float],
                    n_points: int = 60) -> NormalFormFit:
    """Fit the branch pair near onset to |c1| = r0 +/- sqrt(k (delta - delta_b)).

    ``window`` is a detuning interval [rad/s] that must straddle the onset.
    """
    onset = delta_b(p, gamma1, gamma2).delta_b
    lo, hi = min(window), max(window)
    if not (lo < onset < hi):
        raise FitError(
            f"window [{lo:g}, {hi:g}] does not straddle the onset at "
            f"{onset:g} rad/s")
    deltas = np.linspace(onset, hi, n_points + 1)[1:]
    eps, r_plus, r_minus = [], [], []
    for d in deltas:
        sols = solve_limit_cycles(
            RwaParams(p.lambda11, p.lambda22, p.lambda12, p.f_p, d,
                      p.sideband), gamma1, gamma2)
        if len(sols) != 2:
            continue
        eps.append(d - onset)
        r_plus.append(math.sqrt(max(s.c1_sq for s in sols)))
        r_minus.append(math.sqrt(min(s.c1_sq for s in sols)))
    if len(eps) < 3:
        raise FitError("too few branch points above onset inside the window")
    return fit_sqrt_splitting(eps, r_plus, r_minus)
