"""Command-line interface: one subcommand per numerical experiment, with
deterministic CSV and manifest emission.

All user-facing frequencies are in Hz (converted once on ingestion); CSV
column names carry explicit units.  Exit codes: 0 success, 2 configuration
error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import adiabatic, response, selfsustained, timedomain
from .errors import (CalibrationError, ConfigError, ParameterDomainError,
                     SolverError)
from .params import (TWO_PI, DriveConfig, PRESETS, Sideband, SystemParams,
                     alpha_beta, amplitude_from_scaled,
                     calibrate_fp_from_bifurcation, calibrate_mass_from_drive,
                     force_from_scaled_drive, g_constant, load_config,
                     scaled_drive_from_force, scaled_from_amplitude,
                     system_to_config)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

ENV_OUT_DIR = "SIDEBANDLAB_OUT"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.17g}"


def write_csv(path, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_manifest(path, params: SystemParams, experiment: str,
                  derived: dict, timestamp: bool) -> None:
    """Record the resolved parameters and every derived constant, each with
    the name of the formula it came from, so downstream figure scripts
    never recompute physics."""
    alpha, beta = alpha_beta(params.rwa, params.gamma2)
    base = {
        "experiment": experiment,
        "params": {
            "mode1": {"omega_rad_s": params.mode1.omega,
                      "gamma_rad_s": params.mode1.gamma,
                      "mass_kg": params.mode1.mass},
            "mode2": {"omega_rad_s": params.mode2.omega,
                      "gamma_rad_s": params.mode2.gamma,
                      "mass_kg": params.mode2.mass},
            "rwa": {"lambda11_per_s": params.rwa.lambda11,
                    "lambda22_per_s": params.rwa.lambda22,
                    "lambda12_per_s": params.rwa.lambda12,
                    "fp_per_s": params.rwa.f_p,
                    "delta_hz": params.rwa.delta / TWO_PI,
                    "sideband": params.rwa.sideband.value},
            "scaling": {"c_sc_joule_s": params.scaling.c_sc},
        },
        "derived": {
            "alpha_per_s": {
                "value": alpha,
                "formula": "pump-induced friction coefficient"},
            "beta_per_s": {
                "value": beta,
                "formula": "pump-induced frequency-pull coefficient"},
            "g_constant_per_s2": {
                "value": g_constant(params.gamma1, params.gamma2,
                                    params.rwa.lambda11, params.rwa.lambda22,
                                    params.rwa.lambda12),
                "formula": "decay-weighted Kerr combination G"},
            "fd1_per_s_per_pn": {
                "value": scaled_drive_from_force(1e-12, params.mode1,
                                                 params.scaling),
                "formula": "scaled drive per piconewton"},
            "a1_scale_m": {
                "value": amplitude_from_scaled(1.0, params.mode1,
                                               params.scaling),
                "formula": "mode-1 displacement per unit slow amplitude"},
            "a2_scale_m": {
                "value": amplitude_from_scaled(1.0, params.mode2,
                                               params.scaling),
                "formula": "mode-2 displacement per unit slow amplitude"},
        },
    }
    if params.rwa.f_p > 0.0 and params.rwa.sideband is Sideband.UPPER:
        onset = selfsustained.delta_b(params.rwa, params.gamma1,
                                      params.gamma2)
        base["derived"]["delta_b_rad_s"] = {
            "value": onset.delta_b,
            "formula": "self-sustained onset detuning"}
    base["derived"].update(derived)
    if timestamp:
        base["generated_utc"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(base, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_params(args) -> SystemParams:
    if args.config:
        params = load_config(args.config)
    else:
        name = args.preset or "paper-device"
        if name not in PRESETS:
            raise ConfigError(
                f"unknown preset {name!r}; available: {sorted(PRESETS)}")
        params = PRESETS[name]()
    changes = {}
    if args.delta_hz is not None:
        changes["delta"] = TWO_PI * args.delta_hz
    if args.fp_per_s is not None:
        changes["f_p"] = args.fp_per_s
    if args.sideband is not None:
        try:
            changes["sideband"] = Sideband(args.sideband)
        except ValueError:
            raise ConfigError(
                f"rwa.sideband: expected 'upper' or 'lower', got "
                f"{args.sideband!r}") from None
    try:
        return params.with_rwa(**changes) if changes else params
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from None


def _fd1_from_args(args, params) -> float:
    if args.fd1_per_s is not None and args.fd1_pn is not None:
        raise ConfigError("give either --fd1-per-s or --fd1-pn, not both")
    if args.fd1_per_s is not None:
        return args.fd1_per_s
    if args.fd1_pn is not None:
        return scaled_drive_from_force(args.fd1_pn * 1e-12, params.mode1,
                                       params.scaling)
    raise ConfigError("a drive amplitude is required (--fd1-per-s/--fd1-pn)")


def _out_dir(args) -> str:
    out = args.out or os.environ.get(ENV_OUT_DIR) or "."
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# experiments

def _run_ringdown(args, params, out):
    v1 = scaled_from_amplitude(args.a1_nm * 1e-9, params.mode1,
                               params.scaling)
    state0 = timedomain.RwaState(complex(v1, 0.0), 0.0j)
    if args.v2_start == "slaved" and v1 > 0.0 and params.rwa.f_p > 0.0:
        ad = adiabatic.solve_extended_adiabatic(
            v1 * v1, params.rwa, params.gamma1, params.gamma2)
        state0 = timedomain.RwaState(
            complex(v1, 0.0), adiabatic.slaved_v2(complex(v1, 0.0), ad,
                                                  params.rwa))
    trace = timedomain.integrate_rwa(state0, params, horizon=args.horizon_s,
                                     sample_dt=args.sample_dt_s)
    rows = [(t, a1, a2, v1c.real, v1c.imag, v2c.real, v2c.imag, g)
            for t, a1, a2, v1c, v2c, g in zip(trace.times, trace.a1,
                                              trace.a2, trace.v1, trace.v2,
                                              trace.gamma_inst)]
    write_csv(os.path.join(out, "ringdown.csv"),
              ("t_s", "a1_m", "a2_m", "re_v1", "im_v1", "re_v2", "im_v2",
               "gamma_inst_per_s"), rows)
    return {"initial_a1_m": {"value": args.a1_nm * 1e-9,
                             "formula": "configured start amplitude"}}, \
        ["ringdown.csv"]


def _run_adiabatic_curve(args, params, out):
    xs = np.geomspace(args.x_min, args.x_max, args.points)
    curve = adiabatic.adiabatic_curve(xs, params.rwa, params.gamma1,
                                      params.gamma2)
    rows = list(zip(curve.grid, curve.gamma_ad, curve.phi_dot, curve.y,
                    curve.valid))
    write_csv(os.path.join(out, "adiabatic_curve.csv"),
              ("x", "gamma_ad_per_s", "phi_dot_rad_s", "y", "valid"), rows)
    derived = {}
    try:
        thr = adiabatic.thresholds(params)
        if thr.exists:
            derived["a_th_m"] = {"value": thr.a_th,
                                 "formula": "activation threshold amplitude"}
            derived["a_st_m"] = {"value": thr.a_st,
                                 "formula": "self-sustained amplitude"}
    except ParameterDomainError:
        pass
    return derived, ["adiabatic_curve.csv"]


def _run_selfsustained_sweep(args, params, out):
    deltas = TWO_PI * np.linspace(args.sweep_start_hz, args.sweep_stop_hz,
                                  args.points)
    rows = []
    for d in deltas:
        p = params.with_rwa(delta=float(d)).rwa
        for sol in selfsustained.solve_limit_cycles(p, params.gamma1,
                                                    params.gamma2):
            rows.append((d, sol.branch.value, sol.c1_sq, sol.c2_sq,
                         amplitude_from_scaled(math.sqrt(sol.c1_sq),
                                               params.mode1, params.scaling),
                         amplitude_from_scaled(math.sqrt(sol.c2_sq),
                                               params.mode2, params.scaling),
                         sol.delta_omega, sol.stable))
    write_csv(os.path.join(out, "selfsustained_sweep.csv"),
              ("delta_rad_s", "branch", "c1_sq", "c2_sq", "a1_m", "a2_m",
               "delta_omega_rad_s", "stable"), rows)
    return {}, ["selfsustained_sweep.csv"]


def _run_basin(args, params, out):
    amps = np.linspace(args.a1_min_nm, args.a1_max_nm, args.points) * 1e-9
    rows = []
    for a in amps:
        res = timedomain.classify_basin(float(a), params,
                                        horizon=args.horizon_s)
        rows.append((a, res.outcome.value, res.final_a1))
    write_csv(os.path.join(out, "basin.csv"),
              ("a1_initial_m", "outcome", "final_a1_m"), rows)
    thr = adiabatic.thresholds(params)
    return {"a_th_m": {"value": thr.a_th,
                       "formula": "activation threshold amplitude"},
            "a_st_m": {"value": thr.a_st,
                       "formula": "self-sustained amplitude"}}, ["basin.csv"]


def _sweep_rows(sweep, params):
    rows = []
    for axis_val, st in sweep.rows:
        rows.append((axis_val, st.branch_id,
                     amplitude_from_scaled(math.sqrt(st.u1_sq),
                                           params.mode1, params.scaling),
                     amplitude_from_scaled(math.sqrt(st.u2_sq),
                                           params.mode2, params.scaling),
                     st.u1_sq, st.u2_sq, st.stable, st.residual))
    return rows


def _run_forced_response(args, params, out):
    f_d1 = _fd1_from_args(args, params)
    rng = (TWO_PI * args.sweep_start_hz, TWO_PI * args.sweep_stop_hz)
    sweep = response.frequency_sweep(params, f_d1, rng, args.points,
                                     threads=args.threads)
    write_csv(os.path.join(out, "forced_response.csv"),
              ("detune_rad_s", "branch_id", "a1_m", "a2_m", "u1_sq",
               "u2_sq", "stable", "residual"), _sweep_rows(sweep, params))
    summary = sweep.summary
    derived = {"fd1_per_s": {"value": f_d1, "formula": "scaled drive"}}
    summary_obj = {
        "omega_l_rad_s": summary.omega_l,
        "omega_h_rad_s": summary.omega_h,
        "isolated_branch_ids": list(summary.isolated_branch_ids),
        "branches": [{"branch_id": b.branch_id, "a1_max_m": b.a1_max,
                      "gamma_peak_per_s": b.gamma_peak,
                      "any_stable": b.any_stable}
                     for b in summary.branches],
    }
    with open(os.path.join(out, "forced_response_summary.json"), "w",
              encoding="utf-8") as fh:
        json.dump(summary_obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return derived, ["forced_response.csv", "forced_response_summary.json"]


def _run_force_sweep(args, params, out):
    lo = scaled_drive_from_force(args.fd1_start_pn * 1e-12, params.mode1,
                                 params.scaling)
    hi = scaled_drive_from_force(args.fd1_stop_pn * 1e-12, params.mode1,
                                 params.scaling)
    sweep = response.force_sweep(params, TWO_PI * args.drive_detune_hz,
                                 (lo, hi), args.points,
                                 threads=args.threads)
    write_csv(os.path.join(out, "force_sweep.csv"),
              ("fd1_per_s", "branch_id", "a1_m", "a2_m", "u1_sq", "u2_sq",
               "stable", "residual"), _sweep_rows(sweep, params))
    derived = {
        "hysteretic": {"value": 1.0 if sweep.hysteretic else 0.0,
                       "formula": "multivalued amplitude vs drive"},
        "fold_drives_per_s": {"value": list(sweep.fold_positions),
                              "formula": "saddle-node drives"},
        "isolated_in_force_cut": {
            "value": 1.0 if sweep.summary.isolated_branch_ids else 0.0,
            "formula": "isolated branch in the force cut (expected 0)"},
    }
    return derived, ["force_sweep.csv"]


def _run_gamma_peak(args, params, out):
    drives = np.linspace(
        scaled_drive_from_force(args.fd1_start_pn * 1e-12, params.mode1,
                                params.scaling),
        scaled_drive_from_force(args.fd1_stop_pn * 1e-12, params.mode1,
                                params.scaling), args.points)
    rng = (TWO_PI * args.sweep_start_hz, TWO_PI * args.sweep_stop_hz)
    table = response.gamma_peak_curve(params, drives, rng,
                                      n_points=args.freq_points,
                                      threads=args.threads)
    rows = [(e["fd1_per_s"], e["branch_id"], e["a1_max_m"],
             e["gamma_peak_per_s"], e["multivalued"]) for e in table]
    write_csv(os.path.join(out, "gamma_peak.csv"),
              ("fd1_per_s", "branch_id", "a1_max_m", "gamma_peak_per_s",
               "multivalued"), rows)
    return {}, ["gamma_peak.csv"]


def _run_branch_merge(args, params, out):
    f_lo = scaled_drive_from_force(args.fd1_start_pn * 1e-12, params.mode1,
                                   params.scaling)
    f_hi = scaled_drive_from_force(args.fd1_stop_pn * 1e-12, params.mode1,
                                   params.scaling)
    rng = (TWO_PI * args.sweep_start_hz, TWO_PI * args.sweep_stop_hz)
    merge = response.locate_branch_merge(params, rng, (f_lo, f_hi),
                                         rel_tol=args.rel_tol)
    derived = {
        "fd1_critical_per_s": {"value": merge.f_d1_critical,
                               "formula": "isolated-branch merge drive"},
        "force_critical_n": {"value": merge.force_critical,
                             "formula": "merge drive in newtons"},
        "omega_c_rad_s": {"value": merge.omega_c,
                          "formula": "merge frequency offset"},
        "normal_form_consistent": {
            "value": 1.0 if merge.normal_form_consistent else 0.0,
            "formula": "square-root retreat of the multivalued lobe"},
    }
    write_csv(os.path.join(out, "branch_merge.csv"),
              ("fd1_critical_per_s", "force_critical_n", "omega_c_rad_s",
               "normal_form_consistent"),
              [(merge.f_d1_critical, merge.force_critical, merge.omega_c,
                merge.normal_form_consistent)])
    return derived, ["branch_merge.csv"]


def _run_calibrate(args, params, out):
    derived = {}
    if args.fd1_pn is not None and args.fd1_per_s is not None:
        m1 = calibrate_mass_from_drive(args.fd1_pn * 1e-12, args.fd1_per_s,
                                       params.mode1.omega, params.scaling)
        derived["m1_kg"] = {"value": m1,
                            "formula": "mass from force/drive pair"}
    if args.delta_b_hz is not None:
        f_p = calibrate_fp_from_bifurcation(
            TWO_PI * args.delta_b_hz, params.mode1, params.mode2,
            params.rwa.lambda11, params.rwa.lambda22, params.rwa.lambda12)
        derived["fp_per_s_calibrated"] = {
            "value": f_p, "formula": "pump from onset detuning"}
    if not derived:
        raise ConfigError(
            "calibrate needs --delta-b-hz and/or --fd1-pn with --fd1-per-s")
    rows = [(k, v["value"]) for k, v in sorted(derived.items())]
    write_csv(os.path.join(out, "calibration.csv"),
              ("quantity", "value"), rows)
    return derived, ["calibration.csv"]


def _run_full_eom_check(args, params, out):
    from .params import raw_from_scaled
    raw = raw_from_scaled(params.rwa, params.mode1, params.mode2,
                          params.scaling)
    omega_f = timedomain.omega_pump(params)
    v1 = scaled_from_amplitude(args.a1_nm * 1e-9, params.mode1,
                               params.scaling)
    ad = adiabatic.solve_extended_adiabatic(v1 * v1, params.rwa,
                                            params.gamma1, params.gamma2)
    v2 = adiabatic.slaved_v2(complex(v1, 0.0), ad, params.rwa)
    full0 = timedomain.full_state_from_rwa(complex(v1, 0.0), v2, params,
                                           omega_f)
    ftr = timedomain.integrate_full_eom(full0, raw, params.mode1,
                                        params.mode2,
                                        (raw.big_f_p, omega_f),
                                        horizon=args.horizon_s)
    env = timedomain.envelope_mode1(ftr, params.mode1)
    rtr = timedomain.integrate_rwa(
        timedomain.RwaState(complex(v1, 0.0), v2), params,
        horizon=args.horizon_s, sample_dt=args.horizon_s / 1000.0)
    a1_rwa = np.interp(ftr.times, rtr.times, rtr.a1)
    rel = np.abs(env - a1_rwa) / np.maximum(a1_rwa, 1e-300)
    rows = list(zip(ftr.times, env, a1_rwa, rel))
    write_csv(os.path.join(out, "full_eom_check.csv"),
              ("t_s", "a1_full_m", "a1_rwa_m", "rel_diff"), rows)
    return {"max_rel_envelope_diff": {
        "value": float(rel.max()),
        "formula": "full-equations vs slow-flow envelope"}}, \
        ["full_eom_check.csv"]


_EXPERIMENTS = {
    "ringdown": _run_ringdown,
    "adiabatic-curve": _run_adiabatic_curve,
    "self-sustained-sweep": _run_selfsustained_sweep,
    "basin": _run_basin,
    "forced-response": _run_forced_response,
    "force-sweep": _run_force_sweep,
    "gamma-peak": _run_gamma_peak,
    "branch-merge": _run_branch_merge,
    "calibrate": _run_calibrate,
    "full-eom-check": _run_full_eom_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidebandlab",
        description="Sideband-pumped coupled-mode simulator and "
                    "branch-analysis toolkit")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(sp):
        sp.add_argument("--config", help="parameter file (section/key text)")
        sp.add_argument("--preset", help="built-in parameter set name")
        sp.add_argument("--out", help="output directory "
                                      f"(default ${ENV_OUT_DIR} or .)")
        sp.add_argument("--no-timestamp", action="store_true",
                        help="omit the manifest timestamp for "
                             "byte-reproducible output")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--delta-hz", type=float, default=None,
                        help="pump detuning override [Hz]")
        sp.add_argument("--fp-per-s", type=float, default=None,
                        help="pump amplitude override [1/s]")
        sp.add_argument("--sideband", choices=None, default=None,
                        help="'upper' or 'lower'")

    sp = sub.add_parser("ringdown", help="free decay of mode 1")
    common(sp)
    sp.add_argument("--a1-nm", type=float, required=True)
    sp.add_argument("--horizon-s", type=float, default=3.0)
    sp.add_argument("--sample-dt-s", type=float, default=1e-3)
    sp.add_argument("--v2-start", choices=("slaved", "zero"),
                    default="slaved")

    sp = sub.add_parser("adiabatic-curve",
                        help="effective decay rate vs squared amplitude")
    common(sp)
    sp.add_argument("--x-min", type=float, default=1e-4)
    sp.add_argument("--x-max", type=float, default=1e3)
    sp.add_argument("--points", type=int, default=400)

    sp = sub.add_parser("self-sustained-sweep",
                        help="limit-cycle branches vs pump detuning")
    common(sp)
    sp.add_argument("--sweep-start-hz", type=float, required=True)
    sp.add_argument("--sweep-stop-hz", type=float, required=True)
    sp.add_argument("--points", type=int, default=200)

    sp = sub.add_parser("basin", help="ring-up/ring-down classification")
    common(sp)
    sp.add_argument("--a1-min-nm", type=float, required=True)
    sp.add_argument("--a1-max-nm", type=float, required=True)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--horizon-s", type=float, default=None)

    sp = sub.add_parser("forced-response",
                        help="stationary response vs drive frequency")
    common(sp)
    sp.add_argument("--fd1-per-s", type=float, default=None)
    sp.add_argument("--fd1-pn", type=float, default=None)
    sp.add_argument("--sweep-start-hz", type=float, required=True)
    sp.add_argument("--sweep-stop-hz", type=float, required=True)
    sp.add_argument("--points", type=int, default=200)

    sp = sub.add_parser("force-sweep",
                        help="stationary response vs drive amplitude")
    common(sp)
    sp.add_argument("--drive-detune-hz", type=float, required=True)
    sp.add_argument("--fd1-start-pn", type=float, required=True)
    sp.add_argument("--fd1-stop-pn", type=float, required=True)
    sp.add_argument("--points", type=int, default=120)

    sp = sub.add_parser("gamma-peak",
                        help="peak width vs drive amplitude")
    common(sp)
    sp.add_argument("--fd1-start-pn", type=float, required=True)
    sp.add_argument("--fd1-stop-pn", type=float, required=True)
    sp.add_argument("--points", type=int, default=15)
    sp.add_argument("--sweep-start-hz", type=float, default=-1.0)
    sp.add_argument("--sweep-stop-hz", type=float, default=4.0)
    sp.add_argument("--freq-points", type=int, default=141)

    sp = sub.add_parser("branch-merge",
                        help="critical drive of the isolated-branch merge")
    common(sp)
    sp.add_argument("--fd1-start-pn", type=float, required=True)
    sp.add_argument("--fd1-stop-pn", type=float, required=True)
    sp.add_argument("--sweep-start-hz", type=float, default=-1.0)
    sp.add_argument("--sweep-stop-hz", type=float, default=4.0)
    sp.add_argument("--rel-tol", type=float, default=1e-6)

    sp = sub.add_parser("calibrate", help="device calibrations")
    common(sp)
    sp.add_argument("--fd1-pn", type=float, default=None,
                    help="drive force [pN] for the mass calibration")
    sp.add_argument("--fd1-per-s", type=float, default=None,
                    help="matching scaled drive [1/s]")
    sp.add_argument("--delta-b-hz", type=float, default=None,
                    help="measured onset detuning [Hz] for the pump "
                         "calibration")

    sp = sub.add_parser("full-eom-check",
                        help="fast-oscillation integration vs slow flow")
    common(sp)
    sp.add_argument("--a1-nm", type=float, default=10.0)
    sp.add_argument("--horizon-s", type=float, default=0.01)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sideband", None) is not None \
            and args.sideband not in ("upper", "lower"):
        print(f"error: rwa.sideband: expected 'upper' or 'lower', got "
              f"{args.sideband!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        params = _resolve_params(args)
        out = _out_dir(args)
    except (ConfigError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    run = _EXPERIMENTS[args.experiment]
    before = _dir_snapshot(out)
    try:
        derived, _files = run(args, params, out)
    except (ConfigError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _remove_new_files(out, before)
        return EXIT_CONFIG
    except (SolverError, CalibrationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        _remove_new_files(out, before)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        _remove_new_files(out, before)
        return EXIT_IO
    try:
        emit_manifest(os.path.join(out, "manifest.json"), params,
                      args.experiment, derived,
                      timestamp=not args.no_timestamp)
        with open(os.path.join(out, "params.cfg"), "w",
                  encoding="utf-8") as fh:
            fh.write(system_to_config(params))
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _dir_snapshot(out):
    try:
        return set(os.listdir(out))
    except OSError:
        return set()


def _remove_new_files(out, before):
    """Drop files an aborted experiment left behind."""
    try:
        for name in set(os.listdir(out)) - before:
            os.remove(os.path.join(out, name))
    except OSError:
        pass


if __name__ == "__main__":
    sys.exit(main())
