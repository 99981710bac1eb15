"""Parameters, unit conversions and calibrations for the pumped two-mode model.

Internal convention: every frequency-like quantity is angular (rad/s).
Interface values quoted in Hz (configuration files, CLI flags) are multiplied
by 2*pi once on ingestion and never again.  Scaled quantities (lambda_ij, f_p,
f_d1) carry dimension 1/s; slow complex amplitudes are dimensionless.
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import CalibrationError, ConfigError, FitError, ParameterDomainError

TWO_PI = 2.0 * math.pi


class Sideband(enum.Enum):
    """Which secondary sideband the pump addresses.

    UPPER (pump near the sum combination) yields negative nonlinear friction,
    LOWER (difference combination) yields positive nonlinear friction.
    """

    UPPER = "upper"
    LOWER = "lower"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterDomainError(f"{name} must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise ParameterDomainError(f"{name} must be > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class ModeParams:
    """Linear parameters of one vibrational mode."""

    omega: float  # angular eigenfrequency [rad/s]
    gamma: float  # amplitude decay rate [rad/s]
    mass: float   # effective mass [kg]

    def __post_init__(self):
        _require_positive("omega", self.omega)
        _require_positive("gamma", self.gamma)
        _require_positive("mass", self.mass)


@dataclass(frozen=True)
class ScalingConfig:
    """Action-scale constant used to de-dimensionalize the slow amplitudes."""

    c_sc: float = 1e-21  # [J s]

    def __post_init__(self):
        _require_positive("c_sc", self.c_sc)


@dataclass(frozen=True)
class RwaParams:
    """Scaled parameters of the rotating-frame dynamics.

    lambda11/lambda22 are the self-Kerr (Duffing) coefficients of modes 1 and
    2, lambda12 the cross-Kerr (dispersive) coefficient, f_p the scaled pump
    amplitude and delta the pump detuning from the combination resonance.
    All in 1/s (delta in rad/s).
    """

    lambda11: float
    lambda22: float
    lambda12: float
    f_p: float
    delta: float
    sideband: Sideband = Sideband.UPPER

    def __post_init__(self):
        for name in ("lambda11", "lambda22", "lambda12", "delta"):
            _require_finite(name, getattr(self, name))
        if self.f_p < 0.0 or not math.isfinite(self.f_p):
            raise ParameterDomainError(f"f_p must be >= 0, got {self.f_p!r}")
        if self.lambda22 < 0.0:
            raise ParameterDomainError(
                f"lambda22 must be >= 0, got {self.lambda22!r}")
        if not isinstance(self.sideband, Sideband):
            raise ParameterDomainError(f"not a sideband: {self.sideband!r}")


@dataclass(frozen=True)
class RawCouplings:
    """Dimensional nonlinear coefficients of the laboratory-frame equations.

    gamma_disp couples the squared displacements of the two modes (coupling
    energy gamma_disp*q1^2*q2^2/2), gamma1/gamma2 are the cubic restoring
    force coefficients, big_f_p the dimensional pump amplitude.
    """

    gamma_disp: float
    gamma1: float
    gamma2: float
    big_f_p: float

    def __post_init__(self):
        for name in ("gamma_disp", "gamma1", "gamma2", "big_f_p"):
            _require_finite(name, getattr(self, name))


@dataclass(frozen=True)
class DriveConfig:
    """Resonant drive on mode 1: scaled amplitude [1/s] and the offset of
    the drive frequency from the mode-1 eigenfrequency [rad/s]."""

    f_d1: float
    detune: float = 0.0

    def __post_init__(self):
        _require_finite("detune", self.detune)
        if self.f_d1 < 0.0 or not math.isfinite(self.f_d1):
            raise ParameterDomainError(f"f_d1 must be >= 0, got {self.f_d1!r}")


@dataclass(frozen=True)
class CalibrationData:
    """Measured dispersive-shift data: (squared amplitude [m^2], frequency
    shift [rad/s]) pairs, optionally with previously fitted slopes attached.

    For reference: a dispersive coupling energy gamma_disp*q1^2*q2^2/2
    shifts mode 1 by gamma_disp*A2^2/(4*m1*omega1), so the fitted slope of
    shift against squared partner amplitude estimates gamma_disp up to the
    mass/frequency prefactor.  The fit itself stays convention-agnostic;
    nothing downstream consumes this relation.
    """

    points: tuple[tuple[float, float], ...]
    gamma12_slope: float | None = None  # [rad^2 s^-2 m^-2]
    gamma21_slope: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "points",
                           tuple((float(a), float(s)) for a, s in self.points))
        for a, s in self.points:
            _require_finite("squared amplitude", a)
            _require_finite("frequency shift", s)


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set: both modes, pump, and the scaling constant."""

    mode1: ModeParams
    mode2: ModeParams
    rwa: RwaParams
    scaling: ScalingConfig = ScalingConfig()

    def __post_init__(self):
        if self.mode2.omega <= self.mode1.omega:
            raise ParameterDomainError("mode2.omega must exceed mode1.omega")
        if self.mode2.gamma <= self.mode1.gamma:
            raise ParameterDomainError("mode2.gamma must exceed mode1.gamma")
        # The rotating-frame reduction needs |delta| small against omega1; we
        # enforce a 10% bound, generous enough for kHz-scale detunings.
        if abs(self.rwa.delta) >= self.mode1.omega / 10.0:
            raise ParameterDomainError(
                f"|delta| = {abs(self.rwa.delta):g} rad/s too large for the "
                f"rotating-frame model (limit {self.mode1.omega / 10.0:g})")

    @property
    def gamma1(self) -> float:
        return self.mode1.gamma

    @property
    def gamma2(self) -> float:
        return self.mode2.gamma

    def with_rwa(self, **changes) -> "SystemParams":
        """Copy with selected rotating-frame parameters replaced."""
        return replace(self, rwa=replace(self.rwa, **changes))


# ---------------------------------------------------------------------------
# scaled <-> raw conversions

def scaled_params_from_raw(raw: RawCouplings, mode1: ModeParams,
                           mode2: ModeParams, sc: ScalingConfig,
                           delta: float = 0.0,
                           sideband: Sideband = Sideband.UPPER) -> RwaParams:
    """Map dimensional couplings to the scaled rotating-frame parameters.

    lambda12 = gamma_disp*C/(2 m1 m2 w1 w2), lambda_ii = 3 gamma_i C/(4 m_i^2 w_i^2),
    f_p = F_p sqrt(C) / (4 sqrt(2 m2 w2) m1 w1); all outputs in 1/s.
    """
    # prefactors grouped first so extreme couplings cannot underflow
    k12, k11, k22, kp = _conversion_factors(mode1, mode2, sc)
    return RwaParams(lambda11=raw.gamma1 * k11, lambda22=raw.gamma2 * k22,
                     lambda12=raw.gamma_disp * k12, f_p=raw.big_f_p * kp,
                     delta=delta, sideband=sideband)


def _conversion_factors(mode1: ModeParams, mode2: ModeParams,
                        sc: ScalingConfig) -> tuple[float, float, float,
                                                    float]:
    """(k12, k11, k22, kp): scaled coefficient per unit raw coupling."""
    c = sc.c_sc
    k12 = c / (2.0 * mode1.mass * mode2.mass * mode1.omega * mode2.omega)
    k11 = 3.0 * c / (4.0 * mode1.mass**2 * mode1.omega**2)
    k22 = 3.0 * c / (4.0 * mode2.mass**2 * mode2.omega**2)
    kp = math.sqrt(c) / (4.0 * math.sqrt(2.0 * mode2.mass * mode2.omega)
                         * mode1.mass * mode1.omega)
    return k12, k11, k22, kp


def raw_from_scaled(p: RwaParams, mode1: ModeParams, mode2: ModeParams,
                    sc: ScalingConfig) -> RawCouplings:
    """Inverse of :func:`scaled_params_from_raw` (exact algebraic inversion)."""
    k12, k11, k22, kp = _conversion_factors(mode1, mode2, sc)
    return RawCouplings(gamma_disp=p.lambda12 / k12, gamma1=p.lambda11 / k11,
                        gamma2=p.lambda22 / k22, big_f_p=p.f_p / kp)


def amplitude_from_scaled(v_mag: float, mode: ModeParams,
                          sc: ScalingConfig) -> float:
    """Dimensional vibration amplitude [m] of a mode with slow amplitude
    magnitude ``v_mag``: A = sqrt(2 C / (m w)) * |v|."""
    if v_mag < 0.0:
        raise ParameterDomainError(f"v_mag must be >= 0, got {v_mag!r}")
    return math.sqrt(2.0 * sc.c_sc / (mode.mass * mode.omega)) * v_mag


def scaled_from_amplitude(a: float, mode: ModeParams,
                          sc: ScalingConfig) -> float:
    """Inverse of :func:`amplitude_from_scaled`."""
    if a < 0.0:
        raise ParameterDomainError(f"amplitude must be >= 0, got {a!r}")
    return a / math.sqrt(2.0 * sc.c_sc / (mode.mass * mode.omega))


# ---------------------------------------------------------------------------
# weak-pump friction coefficients

def alpha_beta(p: RwaParams, gamma2: float) -> tuple[float, float]:
    """Leading-order nonlinear friction and frequency-pull coefficients.

    With mode 2 adiabatically slaved and conservative shifts dropped, the
    slow amplitude of mode 1 obeys
    dv1/dt = -(Gamma1 + alpha |v1|^2) v1 + i beta |v1|^2 v1 with

        alpha = -2 f_p^2 Gamma2 / (Gamma2^2 + delta^2)
        beta  = lambda11 + 2 f_p^2 delta / (Gamma2^2 + delta^2)

    for the upper sideband; pumping the lower sideband reverses the sign of
    alpha (friction becomes positive).
    """
    gamma2 = _require_positive("gamma2", gamma2)
    denom = gamma2 * gamma2 + p.delta * p.delta
    alpha = -2.0 * p.f_p**2 * gamma2 / denom
    beta = p.lambda11 + 2.0 * p.f_p**2 * p.delta / denom
    if p.sideband is Sideband.LOWER:
        alpha = -alpha
    return alpha, beta


# ---------------------------------------------------------------------------
# calibrations

@dataclass(frozen=True)
class DispersiveFit:
    """Least-squares line through (A^2, frequency shift) calibration data."""

    slope: float        # [rad^2 s^-2 m^-2] when fed shift*omega style data
    intercept: float
    residual_rms: float
    max_abs_residual: float


def fit_dispersive_slope(data: CalibrationData) -> DispersiveFit:
    """Ordinary least squares (with intercept) of frequency shift against
    squared amplitude.  Raises :class:`FitError` on degenerate abscissas."""
    if len(data.points) < 2:
        raise FitError("need at least two calibration points")
    a_sq = np.array([pt[0] for pt in data.points])
    shift = np.array([pt[1] for pt in data.points])
    if np.ptp(a_sq) == 0.0:
        raise FitError("all squared-amplitude abscissas are equal")
    # centered form: well conditioned for the ~1e-16 m^2 abscissa scale
    da = a_sq - a_sq.mean()
    ds = shift - shift.mean()
    slope = float(np.dot(da, ds) / np.dot(da, da))
    intercept = float(shift.mean() - slope * a_sq.mean())
    resid = shift - (slope * a_sq + intercept)
    return DispersiveFit(slope=slope, intercept=intercept,
                         residual_rms=float(np.sqrt(np.mean(resid**2))),
                         max_abs_residual=float(np.max(np.abs(resid))))


def scaled_drive_from_force(force: float, mode1: ModeParams,
                            sc: ScalingConfig) -> float:
    """Scaled resonant-drive amplitude f_d1 = F_d1 / sqrt(8 m1 w1 C) [1/s]."""
    _require_finite("force", force)
    return force / math.sqrt(8.0 * mode1.mass * mode1.omega * sc.c_sc)


def force_from_scaled_drive(f_d1: float, mode1: ModeParams,
                            sc: ScalingConfig) -> float:
    """Inverse of :func:`scaled_drive_from_force` [N]."""
    return f_d1 * math.sqrt(8.0 * mode1.mass * mode1.omega * sc.c_sc)


def calibrate_mass_from_drive(force: float, f_d1: float, omega1: float,
                              sc: ScalingConfig) -> float:
    """Effective mass implied by a known force/scaled-drive pair:
    m1 = F_d1^2 / (8 f_d1^2 w1 C)."""
    _require_positive("force", force)
    _require_positive("omega1", omega1)
    if f_d1 <= 0.0 or not math.isfinite(f_d1):
        raise ParameterDomainError(f"f_d1 must be > 0, got {f_d1!r}")
    return force**2 / (8.0 * f_d1**2 * omega1 * sc.c_sc)


def g_constant(gamma1: float, gamma2: float, lambda11: float,
               lambda22: float, lambda12: float) -> float:
    """Decay-weighted combination of the Kerr coefficients that controls the
    limit-cycle existence window:
    G = (Gamma1+Gamma2) lambda12 + 2 Gamma2 lambda11 + Gamma1 lambda22 / 2."""
    return (gamma1 + gamma2) * lambda12 + 2.0 * gamma2 * lambda11 \
        + 0.5 * gamma1 * lambda22


def calibrate_fp_from_bifurcation(delta_b: float, mode1: ModeParams,
                                  mode2: ModeParams, lambda11: float,
                                  lambda22: float, lambda12: float) -> float:
    """Pump amplitude whose limit-cycle onset detuning equals ``delta_b``.

    Solves the quadratic in f_p^2,

        (2 Gamma1 + Gamma2)^2 f_p^4 + 2 Gamma1 G delta_b f_p^2 - Gamma1^2 G^2 = 0,

    and returns the positive root.  The onset condition is the vanishing of
    the square-root argument of the closed-form branch amplitudes, so feeding
    the result back through the onset-detuning computation reproduces
    ``delta_b`` exactly.
    """
    _require_finite("delta_b", delta_b)
    if delta_b >= 0.0:
        raise CalibrationError(
            f"onset detuning must be negative, got {delta_b!r}")
    g1, g2 = mode1.gamma, mode2.gamma
    g = g_constant(g1, g2, lambda11, lambda22, lambda12)
    if g <= 0.0:
        raise CalibrationError(f"G = {g:g} <= 0: no pump threshold exists")
    a = (2.0 * g1 + g2) ** 2
    b = 2.0 * g1 * g * delta_b
    c = -(g1 * g) ** 2
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise CalibrationError("no real pump amplitude matches this onset")
    u = (-b + math.sqrt(disc)) / (2.0 * a)  # positive root of f_p^2
    if u <= 0.0:
        raise CalibrationError("no positive pump amplitude matches this onset")
    return math.sqrt(u)


# ---------------------------------------------------------------------------
# presets and configuration files

def paper_device(delta: float = -TWO_PI * 35.0,
                 f_p: float = 18.332,
                 sideband: Sideband = Sideband.UPPER) -> SystemParams:
    """Built-in parameter set of the measured plate/beam device.

    lambda11 carries one digit beyond its published truncation (2.2018 rather
    than 2.201): the published friction coefficients alpha/beta at 35 Hz red
    detuning are reproduced only with the extra digit.  m1 comes from the
    drive calibration, m2 is a geometry estimate; the scaled dynamics do not
    depend on either.
    """
    return SystemParams(
        mode1=ModeParams(omega=272599.72, gamma=3.26, mass=7.62e-11),
        mode2=ModeParams(omega=9942136.19, gamma=187.57, mass=5e-13),
        rwa=RwaParams(lambda11=2.2018, lambda22=1627.7, lambda12=33.234,
                      f_p=f_p, delta=delta, sideband=sideband),
        scaling=ScalingConfig(c_sc=1e-21),
    )


PRESETS = {
    "paper-device": paper_device,
}


_CONFIG_SECTIONS = {
    "mode1": ("omega_rad_s", "gamma_rad_s", "mass_kg"),
    "mode2": ("omega_rad_s", "gamma_rad_s", "mass_kg"),
    "rwa": ("lambda11_per_s", "lambda22_per_s", "lambda12_per_s",
            "fp_per_s", "delta_hz", "sideband"),
    "scaling": ("c_sc_joule_s",),
}


def system_to_config(params: SystemParams) -> str:
    """Serialize a parameter set to the key-value/section text format."""
    cp = configparser.ConfigParser()
    cp["mode1"] = {
        "omega_rad_s": repr(params.mode1.omega),
        "gamma_rad_s": repr(params.mode1.gamma),
        "mass_kg": repr(params.mode1.mass),
    }
    cp["mode2"] = {
        "omega_rad_s": repr(params.mode2.omega),
        "gamma_rad_s": repr(params.mode2.gamma),
        "mass_kg": repr(params.mode2.mass),
    }
    cp["rwa"] = {
        "lambda11_per_s": repr(params.rwa.lambda11),
        "lambda22_per_s": repr(params.rwa.lambda22),
        "lambda12_per_s": repr(params.rwa.lambda12),
        "fp_per_s": repr(params.rwa.f_p),
        "delta_hz": repr(params.rwa.delta / TWO_PI),
        "sideband": params.rwa.sideband.value,
    }
    cp["scaling"] = {"c_sc_joule_s": repr(params.scaling.c_sc)}
    out = []
    for section in _CONFIG_SECTIONS:
        out.append(f"[{section}]")
        for key in _CONFIG_SECTIONS[section]:
            out.append(f"{key} = {cp[section][key]}")
        out.append("")
    return "\n".join(out)


def _config_float(cp: configparser.ConfigParser, section: str,
                  key: str) -> float:
    try:
        text = cp[section][key]
    except KeyError:
        raise ConfigError(f"missing key {section}.{key}") from None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(
            f"{section}.{key}: not a number: {text!r}") from None


def system_from_config(text: str) -> SystemParams:
    """Parse the section/key-value format back into :class:`SystemParams`.

    Raises :class:`ConfigError` with a field path on any malformed entry.
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable configuration: {exc}") from None
    for section in _CONFIG_SECTIONS:
        if section not in cp:
            raise ConfigError(f"missing section [{section}]")
    sideband_text = cp["rwa"].get("sideband", "upper").strip().lower()
    try:
        sideband = Sideband(sideband_text)
    except ValueError:
        raise ConfigError(
            f"rwa.sideband: expected 'upper' or 'lower', got "
            f"{sideband_text!r}") from None
    try:
        return SystemParams(
            mode1=ModeParams(
                omega=_config_float(cp, "mode1", "omega_rad_s"),
                gamma=_config_float(cp, "mode1", "gamma_rad_s"),
                mass=_config_float(cp, "mode1", "mass_kg")),
            mode2=ModeParams(
                omega=_config_float(cp, "mode2", "omega_rad_s"),
                gamma=_config_float(cp, "mode2", "gamma_rad_s"),
                mass=_config_float(cp, "mode2", "mass_kg")),
            rwa=RwaParams(
                lambda11=_config_float(cp, "rwa", "lambda11_per_s"),
                lambda22=_config_float(cp, "rwa", "lambda22_per_s"),
                lambda12=_config_float(cp, "rwa", "lambda12_per_s"),
                f_p=_config_float(cp, "rwa", "fp_per_s"),
                delta=TWO_PI * _config_float(cp, "rwa", "delta_hz"),
                sideband=sideband),
            scaling=ScalingConfig(
                c_sc=_config_float(cp, "scaling", "c_sc_joule_s")),
        )
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> SystemParams:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_config(fh.read())


def save_config(params: SystemParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(system_to_config(params))
