"""Experiment orchestration for filter-scale convergence studies.

A sweep runs the unfiltered reference once on a finer grid, every filtered
run once on the study grid, measures velocity/vorticity/flow-map errors
against the spectrally restricted reference at shared sample times, fits
log-log rates, and persists a CSV table plus a JSON summary.  Runs are
independent jobs; a bounded thread pool executes them and the assembled
report does not depend on the worker count.
"""

from __future__ import annotations

import configparser
import datetime
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import linregress
from scipy.stats import t as student_t

from .bounds import BoundParams, velocity_rate_K
from .bounds import gamma0 as initial_velocity_gap
from .initial_data import approximating_family, disc_patch, fractal_patch, shear, smooth_random
from .lagrangian import (
    ParticleSet,
    VelocityHistory,
    advect_particles,
    seed_particles,
    velocity_l1_gap,
)
from .solver import SimState, SolverConfig, SolverError, run
from .spectral import TWO_PI, Grid, PhysicalField, SpectralField, restrict, to_physical
from .vorticity import AlphaParam, biot_savart, lp_norm, torus_distance, velocity_l2

CSV_COLUMNS = (
    "alpha,t,vel_l2_err,vort_l1_err,vort_l2_err,vort_l4_err,"
    "flow_dist,delta,alphanorm_drift,energy"
)
CSV_PS = (1.0, 2.0, 4.0)

WORKERS_ENV = "AEUL_WORKERS"


class SweepError(RuntimeError):
    """Sweep-level failure (e.g. the reference failed its consistency check)."""


@dataclass(frozen=True)
class DatumSpec:
    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("smooth_random", "disc_patch", "fractal_patch", "shear")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown datum kind {self.kind!r}")


def build_datum(spec: DatumSpec, grid: Grid, default_seed: int = 0) -> SpectralField:
    p = dict(spec.params)
    scale = float(p.get("scale", 1.0))
    if spec.kind == "smooth_random":
        datum = smooth_random(
            seed=int(p.get("seed", default_seed)),
            spectrum_slope=float(p.get("spectrum_slope", 2.0)),
            k_max=int(p.get("k_max", 4)),
            grid=grid,
        )
    elif spec.kind == "disc_patch":
        center = (float(p.get("center_x", math.pi)), float(p.get("center_y", math.pi)))
        datum = disc_patch(
            center=center,
            radius=float(p.get("radius", 1.0)),
            amplitude=float(p.get("amplitude", 1.0)),
            grid=grid,
        )
    elif spec.kind == "fractal_patch":
        datum, _ = fractal_patch(
            generator=p.get("generator", "koch-like"),
            depth=int(p.get("depth", 2)),
            amplitude=float(p.get("amplitude", 1.0)),
            grid=grid,
        )
    else:
        datum = shear(grid, wavenumber=int(p.get("wavenumber", 1)))
    if scale != 1.0:
        datum = SpectralField(grid, datum.coeffs * scale)
    return datum


@dataclass
class ExperimentConfig:
    datum: DatumSpec
    alpha_list: tuple
    n: int
    n_ref: int
    t_end: float
    p_list: tuple = CSV_PS
    seed: int = 0
    output_dir: Path | None = None
    cfl: float = 0.5
    samples: int = 32
    particle_stride: int = 1
    substeps: int = 4
    family: str = "identity"
    workers: int | None = None
    richardson: bool = True
    richardson_factor: float = 0.1

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alpha_list)
        if len(alphas) == 0:
            raise ValueError("alpha_list must not be empty")
        if any(a <= 0 for a in alphas):
            raise ValueError("alpha_list entries must be positive")
        if any(b >= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha_list must be strictly decreasing")
        self.alpha_list = alphas
        if self.n_ref < self.n:
            raise ValueError("the reference grid must be at least as fine")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.family not in ("identity", "mollified"):
            raise ValueError(f"unknown approximating family {self.family!r}")
        self.p_list = tuple(sorted(set(float(p) for p in self.p_list) | set(CSV_PS)))
        if self.output_dir is not None:
            self.output_dir = Path(self.output_dir)

    def effective_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        env = os.environ.get(WORKERS_ENV)
        return max(1, int(env)) if env else 1


@dataclass
class RateFit:
    slope: float
    intercept: float
    r2: float
    stderr: float
    ci95: float


def fit_rate(pairs) -> RateFit:
    """Log-log least squares of error against alpha: err ~ exp(b) alpha^slope."""
    pairs = [(float(a), float(e)) for a, e in pairs]
    if len(pairs) < 3:
        raise ValueError("rate fits need at least 3 (alpha, err) pairs")
    if any(e <= 0 for _, e in pairs):
        raise ValueError("rate fits require strictly positive errors")
    xs = np.log([a for a, _ in pairs])
    ys = np.log([e for _, e in pairs])
    res = linregress(xs, ys)
    tq = float(student_t.ppf(0.975, len(pairs) - 2)) if len(pairs) > 2 else float("nan")
    return RateFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        r2=float(res.rvalue**2),
        stderr=float(res.stderr),
        ci95=tq * float(res.stderr),
    )


@dataclass
class AlphaRecord:
    alpha: float
    times: np.ndarray | None = None
    vel_l2_err: np.ndarray | None = None
    vort_err: dict = field(default_factory=dict)
    flow_dist: np.ndarray | None = None
    delta: np.ndarray | None = None
    alphanorm_drift: np.ndarray | None = None
    alpha_norm: np.ndarray | None = None
    energy: np.ndarray | None = None
    q_l2_drift: np.ndarray | None = None
    gamma0: float = float("nan")
    failed: bool = False
    error: str = ""

    def sup_vel_err(self) -> float:
        return float(np.max(self.vel_l2_err))

    def sup_vort_err(self, p: float) -> float:
        return float(np.max(self.vort_err[p]))


@dataclass
class BoundsComparison:
    params: BoundParams
    curves: dict
    exceeded: list
    rescaled_c: float | None


@dataclass
class ConvergenceReport:
    n: int
    n_ref: int
    t_end: float
    times: np.ndarray
    p_list: tuple
    records: list
    velocity_rate: RateFit | None
    vorticity_rates: dict
    richardson_error: float
    u0_l2: float
    bounds: BoundsComparison | None = None

    def ok_records(self) -> list:
        return [r for r in self.records if not r.failed]


def _velocity_err_l2(
    q_alpha: SpectralField, alpha: float, q_ref: SpectralField, grid: Grid
) -> float:
    """||u^alpha - u_ref||_{L2} straight from the vorticity coefficients."""
    filt = 1.0 / (1.0 + alpha * grid.ksq)
    diff = q_alpha.coeffs * filt - q_ref.coeffs
    return TWO_PI * math.sqrt(float(np.sum(np.abs(diff) ** 2 * grid.inv_ksq)))


def _trajectory(history: VelocityHistory, p0: ParticleSet, times, substeps: int):
    positions = [p0.positions.copy()]
    p = p0
    for t1 in times[1:]:
        p = advect_particles(p, history, float(t1), substeps=substeps)
        positions.append(p.positions.copy())
    return positions


def _self_errors(times: np.ndarray, p_list) -> AlphaRecord:
    zeros = np.zeros_like(times)
    return AlphaRecord(
        alpha=0.0,
        times=times,
        vel_l2_err=zeros.copy(),
        vort_err={p: zeros.copy() for p in p_list},
        flow_dist=zeros.copy(),
        delta=zeros.copy(),
        alphanorm_drift=zeros.copy(),
        energy=zeros.copy(),
        q_l2_drift=zeros.copy(),
        gamma0=0.0,
    )


def compare_states(
    qs_a, alpha_a: float, qs_b, alpha_b: float, grid: Grid, p_list=CSV_PS
):
    """Per-sample velocity and vorticity errors between two sampled runs on
    the same grid; comparing a run against itself yields exact zeros."""
    vel = np.array(
        [
            _velocity_err_l2_pair(qa, alpha_a, qb, alpha_b, grid)
            for qa, qb in zip(qs_a, qs_b)
        ]
    )
    vort = {}
    for p in p_list:
        vals = []
        for qa, qb in zip(qs_a, qs_b):
            diff = PhysicalField(grid, to_physical(qa).values - to_physical(qb).values)
            vals.append(lp_norm(diff, p))
        vort[p] = np.asarray(vals)
    return vel, vort


def _velocity_err_l2_pair(qa, alpha_a, qb, alpha_b, grid) -> float:
    fa = 1.0 / (1.0 + alpha_a * grid.ksq)
    fb = 1.0 / (1.0 + alpha_b * grid.ksq)
    diff = qa.coeffs * fa - qb.coeffs * fb
    return TWO_PI * math.sqrt(float(np.sum(np.abs(diff) ** 2 * grid.inv_ksq)))


def _run_alpha(
    alpha: float,
    omega0: SpectralField,
    cfg: ExperimentConfig,
    times: np.ndarray,
    ref_qs,
    ref_history: VelocityHistory,
    ref_traj,
) -> AlphaRecord:
    grid = omega0.grid
    a = AlphaParam(alpha)
    q0 = approximating_family(omega0, a, cfg.family)
    try:
        sim = run(
            q0,
            a,
            SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, sample_times=times),
        )
    except SolverError as exc:
        return AlphaRecord(alpha=alpha, failed=True, error=str(exc))

    qs = [s.q for s in sim.states]
    vel_err = np.array(
        [_velocity_err_l2(qa, alpha, qr, grid) for qa, qr in zip(qs, ref_qs)]
    )
    vort_err = {}
    for p in cfg.p_list:
        vals = []
        for qa, qr in zip(qs, ref_qs):
            diff = PhysicalField(grid, to_physical(qa).values - to_physical(qr).values)
            vals.append(lp_norm(diff, p))
        vort_err[p] = np.asarray(vals)

    hist = VelocityHistory.from_states(sim.states)
    p0 = seed_particles(grid, cfg.particle_stride)
    traj = _trajectory(hist, p0, times, cfg.substeps)
    flow_dist = np.array(
        [float(torus_distance(pa, pr).mean()) for pa, pr in zip(traj, ref_traj)]
    )
    delta = velocity_l1_gap(hist, ref_history)

    return AlphaRecord(
        alpha=alpha,
        times=times,
        vel_l2_err=vel_err,
        vort_err=vort_err,
        flow_dist=flow_dist,
        delta=delta,
        alphanorm_drift=sim.monitor.alpha_norm_drift(),
        alpha_norm=sim.monitor.alpha_norm,
        energy=sim.monitor.energy,
        q_l2_drift=sim.monitor.q_l2_drift(),
        gamma0=initial_velocity_gap(q0, omega0, a),
    )


def run_sweep(cfg: ExperimentConfig) -> ConvergenceReport:
    grid = Grid(cfg.n)
    grid_ref = Grid(cfg.n_ref)
    times = np.linspace(0.0, cfg.t_end, cfg.samples + 1)
    euler = AlphaParam(0.0)

    omega0_ref = build_datum(cfg.datum, grid_ref, cfg.seed)
    omega0 = restrict(omega0_ref, grid)

    # Reference: unfiltered run on the fine grid, kept as its restriction.
    ref_qs = []
    run(
        omega0_ref,
        euler,
        SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, sample_times=times),
        on_sample=lambda s: ref_qs.append(restrict(s.q, grid)),
        keep_states=False,
    )
    ref_states = [SimState(float(t), q, euler) for t, q in zip(times, ref_qs)]
    ref_history = VelocityHistory.from_states(ref_states)
    ref_traj = _trajectory(
        ref_history, seed_particles(grid, cfg.particle_stride), times, cfg.substeps
    )

    # Same-resolution unfiltered run: its gap to the restricted reference
    # estimates the discretization error floor (Richardson consistency).
    coarse_qs = []
    run(
        omega0,
        euler,
        SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, sample_times=times),
        on_sample=lambda s: coarse_qs.append(s.q.copy()),
        keep_states=False,
    )
    richardson_error = max(
        _velocity_err_l2(qc, 0.0, qr, grid) for qc, qr in zip(coarse_qs, ref_qs)
    )

    workers = cfg.effective_workers()
    job = lambda alpha: _run_alpha(
        alpha, omega0, cfg, times, ref_qs, ref_history, ref_traj
    )
    if workers == 1:
        records = [job(alpha) for alpha in cfg.alpha_list]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(job, cfg.alpha_list))

    ok = [r for r in records if not r.failed]
    if not ok:
        raise SweepError("every filtered run failed; nothing to report")

    if cfg.richardson:
        min_err = min(r.sup_vel_err() for r in ok)
        if richardson_error > cfg.richardson_factor * min_err:
            raise SweepError(
                "reference self-consistency failure: restriction gap "
                f"{richardson_error:.3e} exceeds {cfg.richardson_factor} x the "
                f"smallest filtered velocity error ({min_err:.3e})"
            )

    velocity_rate = None
    vorticity_rates = {}
    if len(ok) >= 3:
        try:
            velocity_rate = fit_rate([(r.alpha, r.sup_vel_err()) for r in ok])
        except ValueError:
            velocity_rate = None
        for p in cfg.p_list:
            try:
                vorticity_rates[p] = fit_rate([(r.alpha, r.sup_vort_err(p)) for r in ok])
            except ValueError:
                continue

    report = ConvergenceReport(
        n=cfg.n,
        n_ref=cfg.n_ref,
        t_end=cfg.t_end,
        times=times,
        p_list=cfg.p_list,
        records=records,
        velocity_rate=velocity_rate,
        vorticity_rates=vorticity_rates,
        richardson_error=richardson_error,
        u0_l2=velocity_l2(biot_savart(omega0)),
    )
    if cfg.output_dir is not None:
        persist_report(report, cfg)
    return report


def compare_bounds(report: ConvergenceReport, params: BoundParams) -> ConvergenceReport:
    """Overlay the closed-form velocity rate on the measured errors.

    Each record is compared to K(alpha, t) evaluated with its own measured
    initial gap; alphas where the measurement exceeds the bound are
    flagged, and the minimal uniform constant c1 = c2 = c restoring
    domination (if any) is reported.
    """
    if params.horizon < report.t_end:
        raise ValueError("bound horizon must cover the report's time span")
    curves = {}
    exceeded = []
    for rec in report.ok_records():
        p_rec = replace(params, gamma0=rec.gamma0)
        curve = np.array(
            [velocity_rate_K(AlphaParam(rec.alpha), float(t), p_rec) for t in rec.times]
        )
        curves[rec.alpha] = curve
        if np.any(rec.vel_l2_err > curve):
            exceeded.append(rec.alpha)

    rescaled_c = None
    if exceeded:
        for c in np.logspace(-3.0, 3.0, 601):
            covered = True
            for rec in report.ok_records():
                p_c = BoundParams(
                    c1=c,
                    c2=c,
                    c=c,
                    m=params.m,
                    gamma0=rec.gamma0,
                    alpha_bar=params.alpha_bar,
                    horizon=params.horizon,
                )
                curve = np.array(
                    [
                        velocity_rate_K(AlphaParam(rec.alpha), float(t), p_c)
                        for t in rec.times
                    ]
                )
                if np.any(rec.vel_l2_err > curve):
                    covered = False
                    break
            if covered:
                rescaled_c = float(c)
                break

    report.bounds = BoundsComparison(params, curves, exceeded, rescaled_c)
    return report


def sweep_csv_lines(report: ConvergenceReport, timestamp: str | None = None) -> list:
    """CSV rows, floats rendered as their shortest round-trip decimals."""
    if timestamp is None:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    lines = [f"# generated {timestamp}", CSV_COLUMNS]
    for rec in report.ok_records():
        for j, t in enumerate(rec.times):
            cells = [
                repr(float(rec.alpha)),
                repr(float(t)),
                repr(float(rec.vel_l2_err[j])),
                repr(float(rec.vort_err[1.0][j])),
                repr(float(rec.vort_err[2.0][j])),
                repr(float(rec.vort_err[4.0][j])),
                repr(float(rec.flow_dist[j])),
                repr(float(rec.delta[j])),
                repr(float(rec.alphanorm_drift[j])),
                repr(float(rec.energy[j])),
            ]
            lines.append(",".join(cells))
    return lines


def _ratefit_dict(fit: RateFit | None):
    return None if fit is None else asdict(fit)


def summary_dict(report: ConvergenceReport) -> dict:
    return {
        "n": report.n,
        "n_ref": report.n_ref,
        "t_end": report.t_end,
        "u0_l2": report.u0_l2,
        "richardson_error": report.richardson_error,
        "velocity_rate": _ratefit_dict(report.velocity_rate),
        "vorticity_rates": {
            repr(p): _ratefit_dict(f) for p, f in report.vorticity_rates.items()
        },
        "alphas": [r.alpha for r in report.records],
        "gamma0": {repr(r.alpha): r.gamma0 for r in report.ok_records()},
        "sup_vel_err": {repr(r.alpha): r.sup_vel_err() for r in report.ok_records()},
        "sup_vort_err_l2": {
            repr(r.alpha): r.sup_vort_err(2.0) for r in report.ok_records()
        },
        "failures": {
            repr(r.alpha): r.error for r in report.records if r.failed
        },
        "bounds": None
        if report.bounds is None
        else {
            "exceeded": report.bounds.exceeded,
            "rescaled_c": report.bounds.rescaled_c,
        },
    }


def persist_report(report: ConvergenceReport, cfg: ExperimentConfig) -> None:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text("\n".join(sweep_csv_lines(report)) + "\n")
    (out / "summary.json").write_text(
        json.dumps(summary_dict(report), indent=2, sort_keys=True) + "\n"
    )


# --- configuration files -------------------------------------------------

_DATUM_KEYS = {
    "smooth_random": ("seed", "spectrum_slope", "k_max"),
    "disc_patch": ("center_x", "center_y", "radius", "amplitude"),
    "fractal_patch": ("generator", "depth", "amplitude"),
    "shear": ("wavenumber",),
}


def load_config(path) -> ExperimentConfig:
    """Parse a flat key-value experiment file with [section] headers."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read(path, encoding="utf-8")

    if "datum" not in parser:
        raise ValueError("config requires a [datum] section")
    datum_kind = parser.get("datum", "kind", fallback=None)
    if datum_kind is None:
        raise ValueError("[datum] requires a 'kind' key")
    params = {
        key: value for key, value in parser["datum"].items() if key != "kind"
    }
    datum = DatumSpec(datum_kind, params)

    def getval(section, key, cast, fallback=None, required=False):
        if parser.has_option(section, key):
            return cast(parser.get(section, key))
        if required:
            raise ValueError(f"config is missing [{section}] {key}")
        return fallback

    alphas_raw = getval("sweep", "alphas", str, required=True)
    alpha_list = tuple(float(tok) for tok in alphas_raw.replace(",", " ").split())

    p_raw = getval("sweep", "p_list", str, fallback=None)
    p_list = (
        tuple(float(tok) for tok in p_raw.replace(",", " ").split())
        if p_raw
        else CSV_PS
    )

    out_raw = getval("output", "dir", str, fallback=None)

    return ExperimentConfig(
        datum=datum,
        alpha_list=alpha_list,
        n=getval("grid", "n", int, required=True),
        n_ref=getval("grid", "n_ref", int, fallback=getval("grid", "n", int, required=True)),
        t_end=getval("time", "t_end", float, required=True),
        p_list=p_list,
        seed=getval("sweep", "seed", int, fallback=0),
        output_dir=Path(out_raw) if out_raw else None,
        cfl=getval("time", "cfl", float, fallback=0.5),
        samples=getval("time", "samples", int, fallback=32),
        particle_stride=getval("sweep", "particle_stride", int, fallback=1),
        substeps=getval("sweep", "substeps", int, fallback=4),
        family=getval("sweep", "family", str, fallback="identity"),
        workers=getval("sweep", "workers", int, fallback=None),
        richardson=getval("sweep", "richardson", lambda v: v.lower() in ("1", "true", "on", "yes"), fallback=True),
    )
