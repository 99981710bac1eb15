"""Forced resonant response of mode 1 under sideband pumping.

The stationary states of the driven, pumped pair satisfy two coupled real
algebraic equations in the squared amplitudes (r, s) = (|u1|^2, |u2|^2):

  slaving:  s * (Gamma2^2 + (m - lambda22 s)^2) = f_p^2 r^2,
            m = delta -/+ 2*detune - lambda12 r      (upper/lower sideband)
  modulus:  |Z1 -/+ 2 f_p^2 r / Z2~|^2 * r = f_d1^2  (~ = conj for upper)

with Z1 = Gamma1 + i(detune - lambda12 s - lambda11 r) and
Z2 = Gamma2 + i(m - lambda22 s).  Enumeration walks a logarithmic grid in r,
keeps every real nonnegative root of the slaving cubic, brackets sign
changes of the modulus residual along each root branch, and additionally
resolves near-degenerate solution pairs through local extrema of the
residual, so multivalued structure (isolated branches, hysteresis loops)
is not missed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ParameterDomainError, SolverError
from .params import (DriveConfig, RwaParams, Sideband, SystemParams,
                     amplitude_from_scaled, force_from_scaled_drive)
from .selfsustained import corotating_jacobian

_R_GRID_LO = 1e-10
_R_GRID_HI = 1e4
_R_GRID_N = 8000
_DEDUP_TOL = 1e-8
_EDGE_TOL = 1e-4       # rad/s, fold-frequency bisection
_STABLE_MARGIN = 1e-9  # times Gamma2, on eigenvalue real parts


@dataclass(frozen=True)
class ResponseState:
    """One stationary forced-vibration state."""

    u1_sq: float
    u2_sq: float
    u1: complex
    u2: complex
    stable: bool
    eigenvalues: np.ndarray = field(repr=False)
    residual: float = 0.0   # worst relative residual of the two equations
    branch_id: int = -1     # connected-component label, set by sweeps


@dataclass(frozen=True)
class BranchSummary:
    branch_id: int
    a1_max: float       # [m]
    gamma_peak: float   # [1/s]
    n_states: int
    any_stable: bool


@dataclass(frozen=True)
class ResponseSummary:
    branches: tuple[BranchSummary, ...]
    omega_l: float | None = None  # isolated-branch endpoints [rad/s]
    omega_h: float | None = None
    isolated_branch_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class SweepResult:
    """Flat table of stationary states along a swept axis."""

    axis_name: str                 # "detune_rad_s" or "fd1_per_s"
    axis: np.ndarray
    rows: tuple[tuple, ...]        # (axis_value, state) pairs flattened
    n_components: int
    summary: ResponseSummary | None = None
    hysteretic: bool | None = None
    fold_positions: tuple[float, ...] = ()

    def states_at(self, i: int) -> list[ResponseState]:
        val = self.axis[i]
        return [s for v, s in self.rows if v == val]


@dataclass(frozen=True)
class MergeResult:
    f_d1_critical: float          # [1/s]
    force_critical: float         # [N]
    omega_c: float                # merge frequency offset [rad/s]
    bracket: tuple[float, float]  # final bisection bracket on f_d1
    normal_form_consistent: bool


# ---------------------------------------------------------------------------
# slaving cubic

def _slaving_roots(r: np.ndarray, p: RwaParams, gamma2: float,
                   detune: float) -> np.ndarray:
    """Real nonnegative roots of the slaving cubic for each r.

    Returns an (n, 3) array, ascending, NaN-padded.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    sigma = 1.0 if p.sideband is Sideband.UPPER else -1.0
    m = p.delta - sigma * 2.0 * detune - p.lambda12 * r
    out = np.full((r.size, 3), np.nan)
    if p.f_p == 0.0:
        out[:, 0] = 0.0
        return out
    if p.lambda22 == 0.0:
        out[:, 0] = p.f_p**2 * r**2 / (gamma2**2 + m * m)
        return out
    l22 = p.lambda22
    # companion matrices of the monic cubic s^3 + a s^2 + b s + c
    a = -2.0 * m / l22
    b = (gamma2**2 + m * m) / l22**2
    c = -p.f_p**2 * r**2 / l22**2
    comp = np.zeros((r.size, 3, 3))
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    comp[:, 0, 2] = -c
    comp[:, 1, 2] = -b
    comp[:, 2, 2] = -a
    roots = np.linalg.eigvals(comp)
    scale = np.maximum(1.0, np.abs(roots))
    real = np.abs(roots.imag) < 1e-8 * scale
    vals = np.where(real & (roots.real >= -1e-30), roots.real, np.nan)
    vals = np.where(vals < 0.0, 0.0, vals)
    out = np.sort(vals, axis=1)  # NaN sorts to the end
    return out


class _ResponseProblem:
    """All fixed quantities of one (drive, pump) stationary problem."""

    def __init__(self, d: DriveConfig, p: RwaParams, gamma1: float,
                 gamma2: float):
        self.d = d
        self.p = p
        self.g1 = gamma1
        self.g2 = gamma2
        self.sigma = 1.0 if p.sideband is Sideband.UPPER else -1.0

    def slaving_roots(self, r) -> np.ndarray:
        return _slaving_roots(r, self.p, self.g2, self.d.detune)

    def z1(self, r, s):
        return self.g1 + 1j * (self.d.detune - self.p.lambda12 * s
                               - self.p.lambda11 * r)

    def z2(self, r, s):
        m = self.p.delta - self.sigma * 2.0 * self.d.detune \
            - self.p.lambda12 * r
        return self.g2 + 1j * (m - self.p.lambda22 * s)

    def bracket(self, r, s):
        """Effective mode-1 impedance with the slaved pump back-action."""
        z2 = self.z2(r, s)
        if self.sigma > 0.0:
            return self.z1(r, s) - 2.0 * self.p.f_p**2 * r / np.conj(z2)
        return self.z1(r, s) + 2.0 * self.p.f_p**2 * r / z2

    def modulus_residual(self, r, s):
        with np.errstate(invalid="ignore"):
            return np.abs(self.bracket(r, s)) ** 2 * r - self.d.f_d1**2

    def slaving_residual(self, r, s):
        z2 = self.z2(r, s)
        return s * np.abs(z2) ** 2 - self.p.f_p**2 * r * r

    def rel_residual(self, r, s) -> float:
        mod = abs(self.modulus_residual(r, s)) / self.d.f_d1**2
        target = self.p.f_p**2 * r * r
        slav = abs(self.slaving_residual(r, s)) \
            / max(target, abs(self.z2(r, s)) ** 2 * abs(s), 1e-300)
        return max(float(mod), float(slav))

    def reconstruct(self, r, s) -> tuple[complex, complex]:
        u1 = -1j * self.d.f_d1 / self.bracket(r, s)
        z2 = self.z2(r, s)
        if self.sigma > 0.0:
            u2 = -1j * self.p.f_p * np.conj(u1) ** 2 / z2
        else:
            u2 = -1j * self.p.f_p * u1 * u1 / z2
        return complex(u1), complex(u2)


def _track_root(prob: _ResponseProblem, r: float, s_guess: float) -> float:
    """Cubic root at r nearest a continuation guess."""
    roots = prob.slaving_roots(np.array([r]))[0]
    roots = roots[np.isfinite(roots)]
    if roots.size == 0:
        raise SolverError(f"slaving cubic lost all real roots at r = {r:g}")
    return float(roots[np.argmin(np.abs(roots - s_guess))])


def _bisect_modulus(prob, r_lo, r_hi, s_lo, s_hi, rel_tol=1e-12):
    f_lo = prob.modulus_residual(r_lo, s_lo)
    while (r_hi - r_lo) > rel_tol * r_hi:
        r_mid = 0.5 * (r_lo + r_hi)
        s_mid = _track_root(prob, r_mid, 0.5 * (s_lo + s_hi))
        f_mid = prob.modulus_residual(r_mid, s_mid)
        if (f_lo < 0.0) == (f_mid < 0.0):
            r_lo, s_lo, f_lo = r_mid, s_mid, f_mid
        else:
            r_hi, s_hi = r_mid, s_mid
    return 0.5 * (r_lo + r_hi), 0.5 * (s_lo + s_hi)


def _newton_polish(prob, r, s, iters=12):
    """Drive both residuals to rounding level with a damped 2D Newton."""
    def fvec(v):
        return np.array([prob.slaving_residual(v[0], v[1]),
                         prob.modulus_residual(v[0], v[1])])

    v = np.array([r, s])
    for _ in range(iters):
        f0 = fvec(v)
        jac = np.empty((2, 2))
        for j in range(2):
            h = 1e-8 * max(abs(v[j]), 1e-12)
            vp = v.copy()
            vp[j] += h
            jac[:, j] = (fvec(vp) - f0) / h
        try:
            step = np.linalg.solve(jac, -f0)
        except np.linalg.LinAlgError:
            break
        lam, n0 = 1.0, np.linalg.norm(f0)
        for _ in range(30):
            trial = v + lam * step
            if trial[0] > 0.0 and trial[1] >= 0.0 \
                    and np.linalg.norm(fvec(trial)) <= n0:
                v = trial
                break
            lam *= 0.5
        else:
            break
        if np.linalg.norm(fvec(v)) == 0.0:
            break
    return float(v[0]), float(v[1])


def _extremum_candidates(prob, rs, res_k, roots_k):
    """Bracket pairs hiding behind same-sign residual dips.

    A nearly coincident solution pair shows up as a local extremum of the
    residual that pokes through zero between grid nodes.  Each discrete
    extremum is refined by bounded scalar minimization along the tracked
    root; when the refined extremum crosses zero the two enclosing brackets
    are returned.
    """
    finite = np.isfinite(res_k)
    cands = []
    for i in range(1, len(rs) - 1):
        if not (finite[i - 1] and finite[i] and finite[i + 1]):
            continue
        trio = res_k[i - 1:i + 2]
        if res_k[i] > 0.0 and res_k[i] <= trio.min():
            sign = 1.0
        elif res_k[i] < 0.0 and res_k[i] >= trio.max():
            sign = -1.0
        else:
            continue

        def f(r, _s=roots_k[i], _sign=sign):
            s = _track_root(prob, r, _s)
            return _sign * prob.modulus_residual(r, s)

        opt = minimize_scalar(f, bounds=(rs[i - 1], rs[i + 1]),
                              method="bounded",
                              options={"xatol": 1e-14 * rs[i + 1]})
        if opt.fun < 0.0:
            r_star = float(opt.x)
            s_star = _track_root(prob, r_star, roots_k[i])
            cands.append((rs[i - 1], r_star, roots_k[i - 1], s_star))
            cands.append((r_star, rs[i + 1], s_star, roots_k[i + 1]))
    return cands


def stationary_states(d: DriveConfig, p: RwaParams, gamma1: float,
                      gamma2: float,
                      r_span: tuple[float, float] = (_R_GRID_LO, _R_GRID_HI),
                      n_grid: int = _R_GRID_N) -> list[ResponseState]:
    """Enumerate every stationary forced state at one drive setting.

    States are returned in order of increasing amplitude with stability
    labels from the co-rotating linearization.  At least one state exists
    for any positive drive.
    """
    if d.f_d1 <= 0.0:
        raise ParameterDomainError("stationary_states requires f_d1 > 0")
    prob = _ResponseProblem(d, p, gamma1, gamma2)
    rs = np.geomspace(r_span[0], r_span[1], n_grid)
    roots = prob.slaving_roots(rs)                     # (n, 3)
    res = prob.modulus_residual(rs[:, None], roots)    # NaN where no root
    counts = np.sum(np.isfinite(roots), axis=1)

    brackets: list[tuple[float, float, float, float]] = []

    def scan_segment(idx):
        """Sign changes + hidden dips along maximal equal-count runs."""
        for k in range(int(counts[idx].max()) if idx.size else 0):
            sub = idx[counts[idx] > k]
            if sub.size < 2:
                continue
            r_seg = rs[sub]
            res_seg = res[sub, k]
            root_seg = roots[sub, k]
            flips = np.nonzero(np.sign(res_seg[:-1])
                               * np.sign(res_seg[1:]) < 0.0)[0]
            for i in flips:
                brackets.append((r_seg[i], r_seg[i + 1],
                                 root_seg[i], root_seg[i + 1]))
            brackets.extend(
                _extremum_candidates(prob, r_seg, res_seg, root_seg))

    # split the grid into runs of equal root count and scan each; count
    # changes mark folds of the cubic, where root identity is ambiguous
    change = np.nonzero(np.diff(counts) != 0)[0]
    start = 0
    for c in list(change) + [rs.size - 1]:
        scan_segment(np.arange(start, c + 1))
        start = c + 1 if c + 1 < rs.size else c
    if change.size:
        # re-scan across each fold with a locally densified grid
        for c in change:
            lo = rs[max(c - 1, 0)]
            hi = rs[min(c + 2, rs.size - 1)]
            rs_f = np.geomspace(lo, hi, 64)
            roots_f = prob.slaving_roots(rs_f)
            res_f = prob.modulus_residual(rs_f[:, None], roots_f)
            counts_f = np.sum(np.isfinite(roots_f), axis=1)
            for k in range(3):
                ok = np.nonzero(counts_f > k)[0]
                if ok.size < 2:
                    continue
                adjacent = np.nonzero(np.diff(ok) == 1)[0]
                for j in adjacent:
                    i0, i1 = ok[j], ok[j + 1]
                    if np.sign(res_f[i0, k]) * np.sign(res_f[i1, k]) < 0.0:
                        brackets.append((rs_f[i0], rs_f[i1],
                                         roots_f[i0, k], roots_f[i1, k]))

    found: list[tuple[float, float]] = []
    for r_lo, r_hi, s_lo, s_hi in brackets:
        try:
            r_star, s_star = _bisect_modulus(prob, r_lo, r_hi, s_lo, s_hi)
            r_star, s_star = _newton_polish(prob, r_star, s_star)
        except SolverError:
            continue
        if not (r_span[0] * 0.5 <= r_star <= r_span[1] * 2.0):
            continue
        dup = any(abs(r_star - r0) <= _DEDUP_TOL * max(r_star, r0)
                  and abs(s_star - s0) <= _DEDUP_TOL * max(s_star, s0, 1e-30)
                  for r0, s0 in found)
        if not dup:
            found.append((r_star, s_star))

    if not found:
        raise SolverError(
            "no stationary state found; the enumeration grid cannot have "
            "covered the response (internal error)")

    states = []
    for r_star, s_star in sorted(found):
        u1, u2 = prob.reconstruct(r_star, s_star)
        jac = corotating_jacobian(u1, u2, p, gamma1, gamma2, d.detune)
        eig = np.linalg.eigvals(jac)
        stable = bool(np.max(eig.real) < _STABLE_MARGIN * gamma2)
        states.append(ResponseState(
            u1_sq=r_star, u2_sq=s_star, u1=u1, u2=u2, stable=stable,
            eigenvalues=eig, residual=prob.rel_residual(r_star, s_star)))
    return states


def stability_of_state(state: ResponseState, d: DriveConfig, p: RwaParams,
                       gamma1: float, gamma2: float
                       ) -> tuple[bool, np.ndarray]:
    """Eigenvalues of the driven co-rotating linearization at a state."""
    jac = corotating_jacobian(state.u1, state.u2, p, gamma1, gamma2,
                              d.detune)
    eig = np.linalg.eigvals(jac)
    return bool(np.max(eig.real) < _STABLE_MARGIN * gamma2), eig


# ---------------------------------------------------------------------------
# sweeps and branch topology

def _link_components(axis: np.ndarray, per_point: list[list[ResponseState]]
                     ) -> tuple[list[list[int]], int]:
    """Assign connected-component labels across a sweep.

    Nearest-continuation matching in (log u1_sq, log(1 + u2_sq)); states
    born or dying at a solution-count change are paired up as fold partners
    and their segments joined.  Returns per-point component ids and the
    component count (0 = component of the first axis point's states).
    """
    def coords(st):
        return (math.log(st.u1_sq), math.log1p(st.u2_sq))

    def dist(a, b):
        ca, cb = coords(a), coords(b)
        return math.hypot(ca[0] - cb[0], ca[1] - cb[1])

    n = len(per_point)
    seg_of = [[-1] * len(states) for states in per_point]
    parent: list[int] = []

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for k, st in enumerate(per_point[0]):
        parent.append(len(parent))
        seg_of[0][k] = len(parent) - 1
    for i in range(1, n):
        prev, cur = per_point[i - 1], per_point[i]
        pairs = sorted(((dist(a, b), ka, kb)
                        for ka, a in enumerate(prev)
                        for kb, b in enumerate(cur)),
                       key=lambda t: (t[0], prev[t[1]].u1_sq))
        used_prev, used_cur = set(), set()
        for _, ka, kb in pairs:
            if ka in used_prev or kb in used_cur:
                continue
            used_prev.add(ka)
            used_cur.add(kb)
            seg_of[i][kb] = seg_of[i - 1][ka]
        born = [kb for kb in range(len(cur)) if kb not in used_cur]
        died = [ka for ka in range(len(prev)) if ka not in used_prev]
        for kb in born:
            parent.append(len(parent))
            seg_of[i][kb] = len(parent) - 1
        # fold partners: born states pair among themselves, likewise dying
        for group, states_i, labels in ((born, cur, seg_of[i]),
                                        (died, prev, seg_of[i - 1])):
            rest = sorted(group, key=lambda k: states_i[k].u1_sq)
            while len(rest) >= 2:
                a = rest.pop(0)
                b = min(rest, key=lambda k: dist(states_i[a], states_i[k]))
                rest.remove(b)
                union(labels[a], labels[b])

    comp_ids = [[find(s) for s in row] for row in seg_of]
    # relabel: component of the first axis point first, then by appearance
    order: dict[int, int] = {}
    for row in comp_ids:
        for c in row:
            if c not in order:
                order[c] = len(order)
    relabeled = [[order[c] for c in row] for row in comp_ids]
    return relabeled, len(order)


def _count_at(system: SystemParams, f_d1: float, detune: float,
              n_grid: int = _R_GRID_N,
              r_span: tuple[float, float] = (_R_GRID_LO, _R_GRID_HI)) -> int:
    return len(stationary_states(DriveConfig(f_d1, detune), system.rwa,
                                 system.gamma1, system.gamma2,
                                 r_span=r_span, n_grid=n_grid))


def _bisect_count_edge(system, f_d1, d_lo, d_hi, tol=_EDGE_TOL):
    """Detune where the solution count changes, to within ``tol`` rad/s."""
    c_lo = _count_at(system, f_d1, d_lo)
    while d_hi - d_lo > tol:
        mid = 0.5 * (d_lo + d_hi)
        if _count_at(system, f_d1, mid) == c_lo:
            d_lo = mid
        else:
            d_hi = mid
    return 0.5 * (d_lo + d_hi)


def frequency_sweep(system: SystemParams, f_d1: float,
                    detune_range: tuple[float, float], n_points: int,
                    threads: int = 1,
                    refine_edges: bool = True) -> SweepResult:
    """Stationary states across a drive-frequency window.

    Links states into connected components (folds join the coalescing
    segments), flags components with no path to the far-detuned tails as
    isolated, refines the isolated-branch endpoints by bisection on the
    solution count, and summarizes per-component peak amplitude and the
    equivalent peak width Gamma_peak = F_d1 / (4 m1 w1 a1_max).
    """
    if n_points < 2:
        raise ParameterDomainError("n_points must be >= 2")
    detunes = np.linspace(detune_range[0], detune_range[1], n_points)
    p, g1, g2 = system.rwa, system.gamma1, system.gamma2

    def solve(d):
        return stationary_states(DriveConfig(f_d1, d), p, g1, g2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(solve, detunes))
    else:
        per_point = [solve(d) for d in detunes]

    comp_ids, n_comp = _link_components(detunes, per_point)
    endpoint_comps = set(comp_ids[0]) | set(comp_ids[-1])
    isolated = tuple(sorted(set(c for row in comp_ids for c in row)
                            - endpoint_comps))

    omega_l = omega_h = None
    if isolated and refine_edges:
        iso_idx = [i for i in range(n_points)
                   if any(c in isolated for c in comp_ids[i])]
        lo_idx, hi_idx = iso_idx[0], iso_idx[-1]
        if lo_idx > 0:
            omega_l = _bisect_count_edge(system, f_d1,
                                         detunes[lo_idx - 1],
                                         detunes[lo_idx])
        if hi_idx < n_points - 1:
            omega_h = _bisect_count_edge(system, f_d1, detunes[hi_idx],
                                         detunes[hi_idx + 1])

    rows = []
    per_comp_states: dict[int, list[ResponseState]] = {}
    for i, states in enumerate(per_point):
        for k, st in enumerate(states):
            st = replace(st, branch_id=comp_ids[i][k])
            rows.append((float(detunes[i]), st))
            per_comp_states.setdefault(st.branch_id, []).append(st)

    force = force_from_scaled_drive(f_d1, system.mode1, system.scaling)
    branches = []
    for cid in sorted(per_comp_states):
        states = per_comp_states[cid]
        u1_max = max(math.sqrt(st.u1_sq) for st in states)
        a1_max = amplitude_from_scaled(u1_max, system.mode1, system.scaling)
        branches.append(BranchSummary(
            branch_id=cid, a1_max=a1_max,
            gamma_peak=force / (4.0 * system.mode1.mass
                                * system.mode1.omega * a1_max),
            n_states=len(states),
            any_stable=any(st.stable for st in states)))
    summary = ResponseSummary(branches=tuple(branches), omega_l=omega_l,
                              omega_h=omega_h, isolated_branch_ids=isolated)
    return SweepResult(axis_name="detune_rad_s", axis=detunes,
                       rows=tuple(rows), n_components=n_comp,
                       summary=summary)


def force_sweep(system: SystemParams, detune: float,
                f_d1_range: tuple[float, float], n_points: int,
                threads: int = 1) -> SweepResult:
    """Stationary states against drive amplitude at fixed drive frequency.

    Reports whether the amplitude response is hysteretic (a drive interval
    with coexisting stable states), locates the fold drives by bisection,
    and checks that no isolated branch appears in this cut.
    """
    if n_points < 2:
        raise ParameterDomainError("n_points must be >= 2")
    drives = np.linspace(f_d1_range[0], f_d1_range[1], n_points)
    if drives[0] <= 0.0:
        raise ParameterDomainError("force sweep needs f_d1 > 0 everywhere")
    p, g1, g2 = system.rwa, system.gamma1, system.gamma2

    def solve(fd):
        return stationary_states(DriveConfig(fd, detune), p, g1, g2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(solve, drives))
    else:
        per_point = [solve(fd) for fd in drives]

    comp_ids, n_comp = _link_components(drives, per_point)
    endpoint_comps = set(comp_ids[0]) | set(comp_ids[-1])
    isolated = tuple(sorted(set(c for row in comp_ids for c in row)
                            - endpoint_comps))
    counts = [len(s) for s in per_point]
    hysteretic = any(c >= 3 for c in counts)

    folds = []
    for i in range(n_points - 1):
        if counts[i] != counts[i + 1]:
            lo, hi = drives[i], drives[i + 1]
            c_lo = counts[i]
            while hi - lo > 1e-9 * drives[-1]:
                mid = 0.5 * (lo + hi)
                if _count_at(system, mid, detune) == c_lo:
                    lo = mid
                else:
                    hi = mid
            folds.append(0.5 * (lo + hi))

    rows = []
    for i, states in enumerate(per_point):
        for k, st in enumerate(states):
            rows.append((float(drives[i]),
                         replace(st, branch_id=comp_ids[i][k])))
    summary = ResponseSummary(branches=(), isolated_branch_ids=isolated)
    return SweepResult(axis_name="fd1_per_s", axis=drives, rows=tuple(rows),
                       n_components=n_comp, summary=summary,
                       hysteretic=hysteretic, fold_positions=tuple(folds))


# ---------------------------------------------------------------------------
# isolated-branch existence and the codimension-2 merge

def _upper_dip(prob: _ResponseProblem, r_floor: float,
               n: int = 600) -> float:
    """Minimum of the modulus residual above the small-amplitude response.

    Negative exactly when a high-amplitude solution pair exists at this
    drive frequency.  The discrete minimum is polished by bounded scalar
    minimization so pairs much closer than the grid spacing still register.
    """
    rs = np.geomspace(max(r_floor, 1e-9), _R_GRID_HI, n)
    roots = prob.slaving_roots(rs)
    res = prob.modulus_residual(rs[:, None], roots)
    res = np.where(np.isfinite(res), res, np.inf)
    flat = np.argmin(res)
    i, k = np.unravel_index(flat, res.shape)
    best = float(res[i, k])
    if 0 < i < n - 1 and np.isfinite(roots[i, k]):
        def f(r, _s=float(roots[i, k])):
            s = _track_root(prob, r, _s)
            return float(prob.modulus_residual(r, s))

        opt = minimize_scalar(f, bounds=(rs[i - 1], rs[i + 1]),
                              method="bounded",
                              options={"xatol": 1e-13 * rs[i + 1]})
        best = min(best, float(opt.fun))
    return best


def isola_clearance(system: SystemParams, f_d1: float,
                    detune_range: tuple[float, float],
                    n_detune: int = 41) -> float:
    """How far the high-amplitude solution pair is from existing.

    Scans drive frequency across ``detune_range``, measuring at each point
    the minimum of the modulus residual above the small-amplitude branch,
    then refines around the most favourable frequency.  Negative values
    mean an isolated/high-amplitude pair exists somewhere in the window;
    the zero crossing in drive amplitude is its birth.
    """
    p, g1, g2 = system.rwa, system.gamma1, system.gamma2
    # safely past the small-amplitude branch (its peak sits at f_d1^2/G1^2)
    lorentz_floor = 4.0 * f_d1**2 / (g1 * g1)

    def dip(detune: float) -> float:
        prob = _ResponseProblem(DriveConfig(f_d1, detune), p, g1, g2)
        return _upper_dip(prob, lorentz_floor)

    detunes = np.linspace(detune_range[0], detune_range[1], n_detune)
    vals = np.array([dip(d) for d in detunes])
    i = int(np.argmin(vals))
    lo = detunes[max(i - 1, 0)]
    hi = detunes[min(i + 1, n_detune - 1)]
    opt = minimize_scalar(dip, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6 * max(abs(hi), 1.0)})
    return min(float(vals[i]), float(opt.fun))


def locate_isola_birth(system: SystemParams,
                       f_d1_bracket: tuple[float, float],
                       detune_range: tuple[float, float],
                       rel_tol: float = 1e-4) -> float:
    """Drive amplitude at which the isolated branch first appears.

    Bisection on the sign of :func:`isola_clearance`; the bracket must
    straddle the birth (no pair at the low end, pair at the high end).
    """
    lo, hi = f_d1_bracket
    c_lo = isola_clearance(system, lo, detune_range)
    c_hi = isola_clearance(system, hi, detune_range)
    if not (c_lo > 0.0 and c_hi < 0.0):
        raise ParameterDomainError(
            f"bracket does not straddle the branch birth "
            f"(clearances {c_lo:g}, {c_hi:g})")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if isola_clearance(system, mid, detune_range) < 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


_FAST_N_GRID = 3000
_FAST_R_SPAN = (1e-10, 1e3)


def _probe_window(system: SystemParams, f_d1: float,
                  detune: float) -> tuple[int, float]:
    """(state count, log-amplitude separation of the two lowest states);
    the separation is inf when fewer than three states coexist."""
    states = stationary_states(DriveConfig(f_d1, detune), system.rwa,
                               system.gamma1, system.gamma2,
                               r_span=_FAST_R_SPAN, n_grid=_FAST_N_GRID)
    if len(states) < 3:
        return len(states), np.inf
    r0, r1 = sorted(st.u1_sq for st in states)[:2]
    return len(states), math.log(r1) - math.log(r0)


def _fast_states(system: SystemParams, f_d1: float,
                 detune: float) -> list[ResponseState]:
    return stationary_states(DriveConfig(f_d1, detune), system.rwa,
                             system.gamma1, system.gamma2,
                             r_span=_FAST_R_SPAN, n_grid=_FAST_N_GRID)


def _newborn_pair_above(system: SystemParams, f_d1: float, edge_lo: float,
                        edge_hi: float) -> bool | None:
    """At a 1 -> 3 state-count edge, whether the pair born there sits above
    the persisting branch (isolated-branch signature) or below it
    (reconnected, folded-over curve)."""
    edge = _bisect_count_edge(system, f_d1, edge_lo, edge_hi, tol=2e-4)
    eps = 2e-3
    for _ in range(10):
        out_states = _fast_states(system, f_d1, edge - eps)
        in_states = _fast_states(system, f_d1, edge + eps)
        if len(out_states) == 1 and len(in_states) == 3:
            r_out = math.log(out_states[0].u1_sq)
            rs_in = sorted(math.log(st.u1_sq) for st in in_states)
            persist = min(range(3), key=lambda k: abs(rs_in[k] - r_out))
            return persist == 0
        eps *= 2.0
    return None


def _interior_gap(samples: dict[float, int]) -> bool:
    """Whether some sampled frequency with fewer than three states lies
    strictly between frequencies carrying three."""
    detunes = sorted(samples)
    counts = [samples[d] for d in detunes]
    tri = [i for i, c in enumerate(counts) if c >= 3]
    if len(tri) < 2:
        return False
    return any(counts[i] < 3 for i in range(tri[0], tri[-1] + 1))


def _is_isolated_at(system: SystemParams, f_d1: float,
                    detune_range: tuple[float, float],
                    n_scan: int = 25) -> bool | None:
    """True: isolated branch; False: merged multivalued curve; None: single
    branch everywhere.

    Three scale-free signatures decide the topology.  (1) The pair of
    states born at the left edge of the multivalued window lies above the
    persisting branch for an isolated branch, below it for a folded-over
    single curve.  (2) Just past the merge the edge signature is still
    'above', but a frequency gap with a single state opens between
    multivalued regions; the probe zooms onto the closest approach of the
    two lowest states and samples a window proportional to that separation,
    so the gap stays resolvable arbitrarily close to the merge.  (3) A
    closest approach at rounding level counts as touching (merged).
    """
    detunes = np.linspace(detune_range[0], detune_range[1], n_scan)
    samples: dict[float, int] = {}
    seps: dict[float, float] = {}

    def probe(d: float) -> float:
        d = float(d)
        if d not in seps:
            count, sep = _probe_window(system, f_d1, d)
            samples[d] = count
            # keep the minimizer in finite arithmetic where count < 3
            seps[d] = min(sep, 1e9)
        return seps[d]

    for d in detunes:
        probe(d)
    tri = [d for d in detunes if samples[float(d)] >= 3]
    if not tri:
        return None
    if _interior_gap(samples):
        return False

    # (1) newborn-pair signature at the left edge of the leftmost window
    first = float(tri[0])
    left_neighbors = [float(d) for d in detunes if d < first]
    if left_neighbors:
        above = _newborn_pair_above(system, f_d1, left_neighbors[-1], first)
        if above is False:
            return False

    # (2) gap probe around the closest approach, window tied to separation
    step = detunes[1] - detunes[0]
    best = min(tri, key=probe)
    opt = minimize_scalar(probe, bounds=(best - step, best + step),
                          method="bounded",
                          options={"xatol": 1e-7 * max(abs(best), 1.0)})
    d_star = float(opt.x)
    sep_star = min(float(opt.fun), probe(best))
    if not math.isfinite(sep_star) or sep_star < 1e-7:
        return False  # (3) touching at rounding level
    slope = abs(probe(d_star + 1e-3) - sep_star) / 1e-3
    width = 8.0 * sep_star / max(slope, 1e-3)
    width = min(max(width, 1e-4), step)
    for d in np.linspace(d_star - width, d_star + width, 61):
        probe(d)
    return not _interior_gap(samples)


def locate_branch_merge(system: SystemParams,
                        detune_range: tuple[float, float],
                        f_d1_bracket: tuple[float, float],
                        rel_tol: float = 1e-6) -> MergeResult:
    """Critical drive where the isolated branch reconnects with the main
    response curve (codimension-2 point), by bisection between the two
    topologies, plus the merge frequency and a local normal-form check.
    """
    lo, hi = f_d1_bracket
    if _is_isolated_at(system, lo, detune_range) is not True:
        raise ParameterDomainError(
            "no isolated branch at the low end of the drive bracket")
    if _is_isolated_at(system, hi, detune_range) is not False:
        raise ParameterDomainError(
            "branches not merged at the high end of the drive bracket")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _is_isolated_at(system, mid, detune_range):
            lo = mid
        else:
            hi = mid
    critical = 0.5 * (lo + hi)

    # merge frequency: closest approach of the two lowest states just below
    detunes = np.linspace(detune_range[0], detune_range[1], 65)
    probes = [_probe_window(system, lo, d) for d in detunes]
    tri = [i for i, (c, _) in enumerate(probes) if c >= 3]
    if not tri:
        raise SolverError("no multivalued window found below the merge")
    center = detunes[min(tri, key=lambda i: probes[i][1])]
    span = detunes[1] - detunes[0]
    for _ in range(6):
        local = np.linspace(center - span, center + span, 13)
        lp = [_probe_window(system, lo, d) for d in local]
        ok = [i for i, (c, _) in enumerate(lp) if c >= 3]
        if ok:
            center = local[min(ok, key=lambda i: lp[i][1])]
        span /= 4.0
    omega_c = float(center)

    # normal-form consistency: above the merge the main multivalued lobe
    # retreats from the touch point like the square root of the drive excess
    def lobe_left_edge(fd):
        scan = omega_c + np.linspace(0.0, 1.5, 41)
        cc = [_count_at(system, fd, d, _FAST_N_GRID, _FAST_R_SPAN)
              for d in scan]
        for i in range(len(scan) - 1, 0, -1):
            if cc[i] >= 3 and cc[i - 1] < 3:
                return _bisect_count_edge(system, fd, scan[i - 1], scan[i],
                                          tol=1e-5)
        return None

    eps = np.array([1e-3, 4e-3, 16e-3])
    edges = [lobe_left_edge(critical * (1.0 + e)) for e in eps]
    consistent = False
    if all(e is not None for e in edges) and edges[0] < edges[1] < edges[2]:
        # with e(eps) = omega_c + sqrt(k eps) the edge-difference ratio is 2
        ratio = (edges[2] - edges[1]) / max(edges[1] - edges[0], 1e-12)
        consistent = 1.4 < ratio < 2.9
    return MergeResult(
        f_d1_critical=critical,
        force_critical=force_from_scaled_drive(critical, system.mode1,
                                               system.scaling),
        omega_c=omega_c, bracket=(lo, hi),
        normal_form_consistent=bool(consistent))


def gamma_peak_curve(system: SystemParams, f_d1_values,
                     detune_range: tuple[float, float], n_points: int = 160,
                     threads: int = 1) -> list[dict]:
    """Per-drive peak summary: one entry per (drive, branch) with the peak
    amplitude, Gamma_peak, and whether Gamma_peak is multivalued there
    (an isolated branch coexists with the main one)."""
    out = []
    for f_d1 in np.asarray(f_d1_values, dtype=float):
        sweep = frequency_sweep(system, float(f_d1), detune_range, n_points,
                                threads=threads, refine_edges=False)
        multivalued = bool(sweep.summary.isolated_branch_ids)
        for br in sweep.summary.branches:
            out.append({
                "fd1_per_s": float(f_d1),
                "branch_id": br.branch_id,
                "a1_max_m": br.a1_max,
                "gamma_peak_per_s": br.gamma_peak,
                "multivalued": multivalued,
            })
    return out


@dataclass(frozen=True)
class PeakSharpening:
    drive_ratio: float
    peak_ratio: float
    detunes: np.ndarray
    pointwise_ratio: np.ndarray  # NaN where either response is missing


def peak_sharpening_check(system: SystemParams,
                          f_d1_pair: tuple[float, float],
                          detune_range: tuple[float, float],
                          n_points: int = 121) -> PeakSharpening:
    """Compare main-branch response curves at two drive amplitudes.

    For a linear (or purely conservative) mode the response scales exactly
    with the drive, so the pointwise ratio equals the drive ratio; pumping
    the upper sideband makes the peak grow faster than the drive, the lower
    sideband slower.
    """
    f_small, f_large = sorted(f_d1_pair)

    def main_curve(f_d1):
        sweep = frequency_sweep(system, f_d1, detune_range, n_points,
                                refine_edges=False)
        curve = np.full(len(sweep.axis), np.nan)
        for i in range(len(sweep.axis)):
            states = [st for st in sweep.states_at(i)
                      if st.branch_id == 0 and st.stable]
            if states:
                best = max(states, key=lambda st: st.u1_sq)
                curve[i] = math.sqrt(best.u1_sq)
        return sweep.axis, curve

    detunes, small = main_curve(f_small)
    _, large = main_curve(f_large)
    ratio = large / small
    return PeakSharpening(drive_ratio=f_large / f_small,
                          peak_ratio=float(np.nanmax(large)
                                           / np.nanmax(small)),
                          detunes=detunes, pointwise_ratio=ratio)
