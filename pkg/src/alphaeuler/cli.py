"""Batch command-line interface.

Subcommands: `simulate` (one run with conservation monitors), `sweep`
(filter-scale convergence study), `flows` (Lagrangian flow comparison for
one filter scale), `bounds` (tabulate the closed-form rate bounds), and
`report` (merge sweep CSVs into plot-ready tables plus a gnuplot script).
Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

import numpy as np

from .bounds import BoundParams, ModulusEstimate, flow_rate_bound, velocity_rate_K, vorticity_rate_bound
from .harness import (
    SweepError,
    build_datum,
    compare_bounds,
    load_config,
    run_sweep,
)
from .lagrangian import (
    ParticleSet,
    VelocityHistory,
    flow_distance,
    seed_particles,
    velocity_l1_gap,
)
from .solver import SimState, SolverConfig, SolverError, run, save_checkpoint
from .spectral import Grid, restrict
from .vorticity import AlphaParam


class UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alphaeuler", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="single run with conservation monitors")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--output", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="filter-scale convergence sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--output", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_flows = sub.add_parser("flows", help="Lagrangian flow comparison for one alpha")
    p_flows.add_argument("--config", required=True)
    p_flows.add_argument("--alpha", type=float, default=None)
    p_flows.add_argument("--c-cal", type=float, default=1.0)
    p_flows.add_argument("--output", default=None)
    p_flows.set_defaults(func=cmd_flows)

    p_bounds = sub.add_parser("bounds", help="tabulate the closed-form bounds")
    p_bounds.add_argument("--c1", type=float, default=1.0)
    p_bounds.add_argument("--c2", type=float, default=1.0)
    p_bounds.add_argument("--c", type=float, default=1.0)
    p_bounds.add_argument("--T", type=float, default=1.0, dest="horizon")
    p_bounds.add_argument("--gamma0", type=float, default=0.0)
    p_bounds.add_argument("--alpha-bar", type=float, default=1.0)
    p_bounds.add_argument("--m", type=float, default=1.0)
    p_bounds.add_argument("--p", type=float, default=2.0)
    p_bounds.add_argument("--besov-s", type=float, default=0.5)
    p_bounds.add_argument("--alphas", required=True, help="comma-separated list")
    p_bounds.add_argument("--nt", type=int, default=5)
    p_bounds.add_argument("--output", default=None, help="CSV path (default stdout)")
    p_bounds.set_defaults(func=cmd_bounds)

    p_report = sub.add_parser("report", help="merge sweep CSVs into tables")
    p_report.add_argument("--inputs", nargs="+", required=True)
    p_report.add_argument("--output", required=True)
    p_report.set_defaults(func=cmd_report)

    return parser


def _resolve_output(cfg_dir, flag_dir, fallback: str) -> Path:
    if flag_dir is not None:
        return Path(flag_dir)
    if cfg_dir is not None:
        return Path(cfg_dir)
    return Path(fallback)


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    alpha = args.alpha if args.alpha is not None else cfg.alpha_list[0]
    grid = Grid(cfg.n)
    q0 = build_datum(cfg.datum, grid, cfg.seed)
    times = np.linspace(0.0, cfg.t_end, cfg.samples + 1)
    sim = run(
        q0,
        AlphaParam(alpha),
        SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, sample_times=times),
        keep_states=False,
    )
    out = _resolve_output(cfg.output_dir, args.output, "simulate_output")
    out.mkdir(parents=True, exist_ok=True)
    mon = sim.monitor
    lines = [
        f"# generated {_timestamp()}",
        "t,energy,alpha_norm,q_l1,q_l2,q_l4,q_linf",
    ]
    for j in range(mon.times.size):
        lines.append(
            ",".join(
                repr(float(v))
                for v in (
                    mon.times[j],
                    mon.energy[j],
                    mon.alpha_norm[j],
                    mon.q_l1[j],
                    mon.q_l2[j],
                    mon.q_l4[j],
                    mon.q_linf[j],
                )
            )
        )
    (out / "monitor.csv").write_text("\n".join(lines) + "\n")
    save_checkpoint(sim.final, out / "checkpoint.aeul")
    drift = float(np.max(mon.alpha_norm_drift()))
    print(f"simulate: alpha={alpha} t_end={cfg.t_end} alpha-norm drift {drift:.3e}")
    print(f"wrote {out / 'monitor.csv'}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    cfg.output_dir = _resolve_output(cfg.output_dir, args.output, "sweep_output")
    report = run_sweep(cfg)
    compare_bounds(report, BoundParams(horizon=max(1.0, cfg.t_end)))
    from .harness import persist_report

    persist_report(report, cfg)
    if report.velocity_rate is not None:
        print(
            f"sweep: velocity rate {report.velocity_rate.slope:.3f} "
            f"(r2={report.velocity_rate.r2:.3f})"
        )
    print(f"wrote {cfg.output_dir / 'sweep.csv'}")
    return 0


def cmd_flows(args) -> int:
    cfg = load_config(args.config)
    alpha = args.alpha if args.alpha is not None else cfg.alpha_list[0]
    grid = Grid(cfg.n)
    grid_ref = Grid(cfg.n_ref)
    times = np.linspace(0.0, cfg.t_end, cfg.samples + 1)
    sol = SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, sample_times=times)

    omega0_ref = build_datum(cfg.datum, grid_ref, cfg.seed)
    omega0 = restrict(omega0_ref, grid)

    ref_qs = []
    run(
        omega0_ref,
        AlphaParam(0.0),
        sol,
        on_sample=lambda s: ref_qs.append(restrict(s.q, grid)),
        keep_states=False,
    )
    ref_states = [SimState(float(t), q, AlphaParam(0.0)) for t, q in zip(times, ref_qs)]
    ref_history = VelocityHistory.from_states(ref_states)

    sim = run(omega0, AlphaParam(alpha), sol)
    hist = VelocityHistory.from_states(sim.states)

    from .harness import _trajectory

    p0 = seed_particles(grid, cfg.particle_stride)
    traj = _trajectory(hist, p0, times, cfg.substeps)
    ref_traj = _trajectory(ref_history, p0, times, cfg.substeps)
    delta_curve = velocity_l1_gap(hist, ref_history)
    delta_total = float(delta_curve[-1])

    out = _resolve_output(cfg.output_dir, args.output, "flows_output")
    out.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# generated {_timestamp()}",
        "t,mean_distance,l2_distance,g_delta,delta,log_bound",
    ]
    for j, t in enumerate(times):
        comp = flow_distance(
            ParticleSet(traj[j], float(t)),
            ParticleSet(ref_traj[j], float(t)),
            delta=max(delta_total, 1e-300),
            c_cal=args.c_cal,
        )
        lines.append(
            ",".join(
                repr(float(v))
                for v in (
                    t,
                    comp.mean_distance,
                    comp.l2_distance,
                    comp.g_delta,
                    delta_curve[j],
                    comp.log_bound,
                )
            )
        )
    (out / "flows.csv").write_text("\n".join(lines) + "\n")
    print(f"flows: alpha={alpha} delta={delta_total:.3e}")
    print(f"wrote {out / 'flows.csv'}")
    return 0


def cmd_bounds(args) -> int:
    alphas = [float(tok) for tok in args.alphas.replace(",", " ").split()]
    if not alphas:
        raise ValueError("--alphas must name at least one value")
    params = BoundParams(
        c1=args.c1,
        c2=args.c2,
        c=args.c,
        m=args.m,
        gamma0=args.gamma0,
        alpha_bar=args.alpha_bar,
        horizon=args.horizon,
    )
    modulus = ModulusEstimate(kind="besov", s=args.besov_s)
    ts = np.linspace(0.0, args.horizon, args.nt)
    lines = ["alpha,t,K,flow_bound,vort_bound"]
    for alpha in alphas:
        for t in ts:
            k_val = velocity_rate_K(AlphaParam(alpha), float(t), params)
            fb = flow_rate_bound(k_val, float(t), 0.0, args.c, args.horizon)
            vb = vorticity_rate_bound(k_val, modulus, args.p, params)
            lines.append(
                ",".join(
                    repr(float(v)) for v in (alpha, t, k_val, fb, vb)
                )
            )
    text = "\n".join(lines) + "\n"
    if args.output is None or args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    return 0


def _read_csv(path: Path):
    rows = []
    header = None
    for line in path.read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path} holds no CSV header")
    return header, rows


def cmd_report(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    merged = [f"# generated {_timestamp()}"]
    summary: dict[tuple[str, str], dict[str, float]] = {}
    header_out = None
    for raw in args.inputs:
        path = Path(raw)
        header, rows = _read_csv(path)
        cols = {name: i for i, name in enumerate(header)}
        if header_out is None:
            header_out = "source," + ",".join(header)
            merged.append(header_out)
        for row in rows:
            merged.append(f"{path.stem}," + ",".join(row))
            key = (path.stem, row[cols["alpha"]])
            entry = summary.setdefault(
                key, {"sup_vel": 0.0, "sup_vort_l2": 0.0, "final_flow": 0.0, "final_delta": 0.0}
            )
            entry["sup_vel"] = max(entry["sup_vel"], float(row[cols["vel_l2_err"]]))
            entry["sup_vort_l2"] = max(
                entry["sup_vort_l2"], float(row[cols["vort_l2_err"]])
            )
            entry["final_flow"] = float(row[cols["flow_dist"]])
            entry["final_delta"] = float(row[cols["delta"]])
    (out / "merged.csv").write_text("\n".join(merged) + "\n")

    lines = ["source,alpha,sup_vel_l2_err,sup_vort_l2_err,final_flow_dist,final_delta"]
    for (source, alpha), entry in sorted(summary.items()):
        lines.append(
            f"{source},{alpha},{entry['sup_vel']!r},{entry['sup_vort_l2']!r},"
            f"{entry['final_flow']!r},{entry['final_delta']!r}"
        )
    (out / "rates.csv").write_text("\n".join(lines) + "\n")

    gp = [
        "set logscale xy",
        "set datafile separator ','",
        "set xlabel 'alpha'",
        "set ylabel 'sup_t error'",
        "set key left top",
        f"plot '{out / 'rates.csv'}' every ::1 using 2:3 with linespoints title 'velocity L2', \\",
        f"     '{out / 'rates.csv'}' every ::1 using 2:4 with linespoints title 'vorticity L2'",
    ]
    (out / "plot.gp").write_text("\n".join(gp) + "\n")
    print(f"wrote {out / 'merged.csv'}, {out / 'rates.csv'}, {out / 'plot.gp'}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, SweepError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
