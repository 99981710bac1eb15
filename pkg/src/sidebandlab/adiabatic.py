"""Amplitude-dependent decay of mode 1 with mode 2 adiabatically slaved.

The slow dynamics are reduced to an effective decay rate gamma_ad(x) and a
phase velocity phi_dot(x) of mode 1 as functions of its squared slow
amplitude x.  Two levels are provided: the weak-pump closed form (linear in
x) and the self-consistent extension that keeps all conservative shifts in
the slaved-mode denominator.  Zero crossings of gamma_ad give the activation
threshold and the stable amplitude of self-sustained vibrations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousRootsError, ParameterDomainError, SolverError
from .params import (RwaParams, ScalingConfig, Sideband, SystemParams,
                     alpha_beta, amplitude_from_scaled)

_FP_DAMPING = 0.5
_FP_TOL = 1e-10
_FP_MAX_ITER = 1000
_VALIDITY_FACTOR = 0.1  # adiabatic reduction trusted while |gamma_ad| < 0.1 |D|


@dataclass(frozen=True)
class AdiabaticState:
    """Self-consistent slaved state at one squared amplitude x."""

    x: float           # |v1|^2, dimensionless
    y: float           # slaved |v2|^2
    phi_dot: float     # phase velocity of mode 1 [rad/s]
    d_value: complex   # slaved-mode denominator D [1/s]; Re D = Gamma2
    gamma_ad: float    # effective decay rate of mode 1 [1/s]
    residual: float    # worst relative residual of the two closed equations
    valid: bool        # adiabatic validity flag |gamma_ad| < 0.1 |D|


@dataclass(frozen=True)
class AdiabaticCurve:
    grid: np.ndarray      # strictly increasing x values
    gamma_ad: np.ndarray  # [1/s]
    phi_dot: np.ndarray   # [rad/s]
    y: np.ndarray
    valid: np.ndarray     # bool per point


@dataclass(frozen=True)
class ThresholdResult:
    """Zero crossings of gamma_ad converted to dimensional amplitudes."""

    exists: bool
    a_th: float | None = None  # activation threshold amplitude [m]
    a_st: float | None = None  # stable self-sustained amplitude [m]
    x_th: float | None = None  # same crossings in squared scaled units
    x_st: float | None = None


def gamma_ad_simple(x: float, p: RwaParams, gamma1: float,
                    gamma2: float) -> float:
    """Weak-pump decay rate Gamma1 + alpha*x, linear in squared amplitude."""
    if x < 0.0:
        raise ParameterDomainError(f"x must be >= 0, got {x!r}")
    alpha, _ = alpha_beta(p, gamma2)
    return gamma1 + alpha * x


def _rhs(x: float, phi_dot: float, y: float, p: RwaParams, gamma1: float,
         gamma2: float) -> tuple[complex, float, float, float]:
    """One evaluation of the slaved-mode closure: returns (D, y_new,
    phi_dot_new, gamma_ad) at frozen (phi_dot, y)."""
    sigma = 1.0 if p.sideband is Sideband.UPPER else -1.0
    d = complex(gamma2, p.delta - sigma * 2.0 * phi_dot
                - p.lambda12 * x - p.lambda22 * y)
    abs_d2 = d.real * d.real + d.imag * d.imag
    y_new = p.f_p**2 * x * x / abs_d2
    d_inv = d.conjugate() / abs_d2
    phi_new = p.lambda11 * x + p.lambda12 * y_new \
        - 2.0 * p.f_p**2 * x * d_inv.imag
    gamma_ad = gamma1 - sigma * 2.0 * p.f_p**2 * x * d_inv.real
    return d, y_new, phi_new, gamma_ad


def _residuals(x, phi_dot, y, p, gamma1, gamma2) -> float:
    sigma = 1.0 if p.sideband is Sideband.UPPER else -1.0
    d = complex(gamma2, p.delta - sigma * 2.0 * phi_dot
                - p.lambda12 * x - p.lambda22 * y)
    abs_d2 = abs(d) ** 2
    target = p.f_p**2 * x * x
    res_y = abs(y * abs_d2 - target) / max(target, abs_d2 * abs(y), 1e-300)
    d_inv = d.conjugate() / abs_d2
    phi_rhs = p.lambda11 * x + p.lambda12 * y - 2.0 * p.f_p**2 * x * d_inv.imag
    scale = max(abs(phi_dot), abs(p.lambda11 * x), abs(p.lambda12 * y),
                abs(2.0 * p.f_p**2 * x * d_inv.imag), 1e-300)
    res_phi = abs(phi_dot - phi_rhs) / scale
    return max(res_y, res_phi)


def _solve_at(x: float, p: RwaParams, gamma1: float, gamma2: float,
              seed: tuple[float, float]) -> tuple[float, float]:
    """Damped fixed-point iteration on (phi_dot, y); Newton fallback."""
    phi_dot, y = seed
    for _ in range(_FP_MAX_ITER):
        _, y_new, phi_new, _ = _rhs(x, phi_dot, y, p, gamma1, gamma2)
        phi_dot += _FP_DAMPING * (phi_new - phi_dot)
        y += _FP_DAMPING * (y_new - y)
        if _residuals(x, phi_dot, y, p, gamma1, gamma2) < _FP_TOL:
            return phi_dot, y

    # Newton with finite-difference Jacobian on the residual vector
    def fvec(v):
        ph, yy = v
        sigma = 1.0 if p.sideband is Sideband.UPPER else -1.0
        d = complex(gamma2, p.delta - sigma * 2.0 * ph
                    - p.lambda12 * x - p.lambda22 * yy)
        abs_d2 = abs(d) ** 2
        d_inv = d.conjugate() / abs_d2
        f1 = yy * abs_d2 - p.f_p**2 * x * x
        f2 = ph - (p.lambda11 * x + p.lambda12 * yy
                   - 2.0 * p.f_p**2 * x * d_inv.imag)
        return np.array([f1, f2])

    v = np.array([phi_dot, y])
    for _ in range(100):
        f0 = fvec(v)
        jac = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * max(abs(v[j]), 1e-6)
            vp = v.copy()
            vp[j] += h
            jac[:, j] = (fvec(vp) - f0) / h
        try:
            step = np.linalg.solve(jac, -f0)
        except np.linalg.LinAlgError:
            break
        # halve the step until the residual norm decreases
        lam = 1.0
        n0 = np.linalg.norm(f0)
        for _ in range(40):
            trial = v + lam * step
            if np.linalg.norm(fvec(trial)) < n0:
                v = trial
                break
            lam *= 0.5
        else:
            break
        if _residuals(x, v[0], v[1], p, gamma1, gamma2) < _FP_TOL:
            return float(v[0]), float(v[1])
    raise SolverError(
        f"slaved-mode closure did not converge at x = {x:g}",
        residual=_residuals(x, v[0], v[1], p, gamma1, gamma2))


def solve_extended_adiabatic(x: float, p: RwaParams, gamma1: float,
                             gamma2: float,
                             seed: tuple[float, float] | None = None
                             ) -> AdiabaticState:
    """Self-consistent (phi_dot, y) at squared amplitude x.

    Without a seed the solution continuously connected to x = 0 is selected
    by a short continuation in x; pass ``seed=(phi_dot, y)`` (e.g. from a
    neighbouring x) to skip it.
    """
    if x < 0.0:
        raise ParameterDomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        d = complex(gamma2, p.delta)
        return AdiabaticState(x=0.0, y=0.0, phi_dot=0.0, d_value=d,
                              gamma_ad=gamma1, residual=0.0, valid=True)
    if seed is None:
        phi_dot, y = 0.0, 0.0
        for xk in np.geomspace(min(x, 1e-4), x, 24):
            phi_dot, y = _solve_at(xk, p, gamma1, gamma2, (phi_dot, y))
    else:
        phi_dot, y = _solve_at(x, p, gamma1, gamma2, seed)
    d, _, _, gamma_ad = _rhs(x, phi_dot, y, p, gamma1, gamma2)
    res = _residuals(x, phi_dot, y, p, gamma1, gamma2)
    valid = abs(gamma_ad) < _VALIDITY_FACTOR * abs(d)
    return AdiabaticState(x=x, y=y, phi_dot=phi_dot, d_value=d,
                          gamma_ad=gamma_ad, residual=res, valid=valid)


def adiabatic_curve(xs, p: RwaParams, gamma1: float,
                    gamma2: float) -> AdiabaticCurve:
    """gamma_ad, phi_dot and y over an increasing grid of squared
    amplitudes, with the continuation seed carried point to point."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or np.any(np.diff(xs) <= 0.0):
        raise ParameterDomainError("grid must be strictly increasing")
    gamma_ad = np.empty_like(xs)
    phi_dot = np.empty_like(xs)
    y_arr = np.empty_like(xs)
    valid = np.empty(xs.shape, dtype=bool)
    seed = None
    for i, x in enumerate(xs):
        state = solve_extended_adiabatic(x, p, gamma1, gamma2, seed=seed)
        gamma_ad[i] = state.gamma_ad
        phi_dot[i] = state.phi_dot
        y_arr[i] = state.y
        valid[i] = state.valid
        seed = (state.phi_dot, state.y)
    return AdiabaticCurve(grid=xs, gamma_ad=gamma_ad, phi_dot=phi_dot,
                          y=y_arr, valid=valid)


def _bisect_zero(x_lo, x_hi, seed_lo, p, gamma1, gamma2, tol=1e-12):
    """Root of gamma_ad between bracketing amplitudes, seeds carried along."""
    s_lo = solve_extended_adiabatic(x_lo, p, gamma1, gamma2, seed=seed_lo)
    g_lo = s_lo.gamma_ad
    seed = (s_lo.phi_dot, s_lo.y)
    while x_hi - x_lo > max(tol, 4.0 * math.ulp(x_hi)):
        x_mid = 0.5 * (x_lo + x_hi)
        s_mid = solve_extended_adiabatic(x_mid, p, gamma1, gamma2, seed=seed)
        seed = (s_mid.phi_dot, s_mid.y)
        if (g_lo < 0.0) == (s_mid.gamma_ad < 0.0):
            x_lo, g_lo = x_mid, s_mid.gamma_ad
        else:
            x_hi = x_mid
    return 0.5 * (x_lo + x_hi)


def thresholds(system: SystemParams, x_lo: float = 1e-4, x_hi: float = 1e3,
               n_grid: int = 400) -> ThresholdResult:
    """Activation threshold and stable self-sustained amplitude of mode 1.

    Brackets the sign changes of gamma_ad on a logarithmic grid and refines
    them by bisection.  ``exists`` is False when the decay rate is positive
    everywhere (pump below threshold at this detuning).
    """
    p = system.rwa
    if p.sideband is not Sideband.UPPER:
        raise ParameterDomainError(
            "self-sustained thresholds require the upper sideband")
    g1, g2 = system.gamma1, system.gamma2
    if p.f_p == 0.0:
        return ThresholdResult(exists=False)
    grid = np.geomspace(x_lo, x_hi, n_grid)
    curve = adiabatic_curve(grid, p, g1, g2)
    signs = np.sign(curve.gamma_ad)
    flips = list(np.nonzero(signs[:-1] * signs[1:] < 0.0)[0])
    brackets = [(grid[i], grid[i + 1], (curve.phi_dot[i], curve.y[i]))
                for i in flips]
    if not flips:
        # a nearly coalesced root pair dips below zero between grid nodes;
        # polish interior minima of the rate to catch it
        i = int(np.argmin(curve.gamma_ad))
        if 0 < i < n_grid - 1 and curve.gamma_ad[i] > 0.0:
            from scipy.optimize import minimize_scalar
            seed = (curve.phi_dot[i], curve.y[i])

            def rate(x):
                return solve_extended_adiabatic(x, p, g1, g2,
                                                seed=seed).gamma_ad

            opt = minimize_scalar(rate, bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded",
                                  options={"xatol": 1e-13 * grid[i + 1]})
            if opt.fun < 0.0:
                x_star = float(opt.x)
                brackets = [(grid[i - 1], x_star, seed),
                            (x_star, grid[i + 1], seed)]
    if not brackets:
        return ThresholdResult(exists=False)
    roots = [_bisect_zero(lo, hi, seed, p, g1, g2)
             for lo, hi, seed in brackets]
    if len(roots) != 2:
        raise AmbiguousRootsError(
            f"expected two zero crossings of gamma_ad, found {len(roots)}",
            roots=roots)
    x_th, x_st = sorted(roots)
    return ThresholdResult(
        exists=True,
        a_th=amplitude_from_scaled(math.sqrt(x_th), system.mode1,
                                   system.scaling),
        a_st=amplitude_from_scaled(math.sqrt(x_st), system.mode1,
                                   system.scaling),
        x_th=x_th, x_st=x_st)


def slaved_v2(v1: complex, state: AdiabaticState, p: RwaParams) -> complex:
    """Mode-2 amplitude slaved to a given mode-1 amplitude, evaluated from a
    self-consistent state at x = |v1|^2.  Used to start ring-downs without
    the fast initial transient."""
    if p.sideband is Sideband.UPPER:
        return -1j * p.f_p * np.conj(v1) ** 2 / state.d_value
    return -1j * p.f_p * v1**2 / state.d_value
