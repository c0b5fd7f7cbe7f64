"""Command line interface: classify, run, profile, ips, compare.

Exit codes: 0 success, 2 configuration error, 3 solver instability.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analytic
from .classification import Exact, Interval, Region, classify, interface_law
from .harness import (
    IPSIC,
    Scenario,
    ScenarioError,
    ScenarioRunFailed,
    fit_powerlaw,
    load_scenario_file,
    load_track_csv,
    run_scenario,
    write_profile_csv,
)
from .params import ProblemParams
from .profiles import (
    integrate_region1,
    integrate_region2,
    region2_asymptotic_seed,
    seed_from_pde,
    similarity_exponents,
)
from .weno import Field, Grid, SolverInstability, StepControl, evolve, locate_interface


def _describe_law(law) -> str:
    if law.sign == 0:
        return "interface initially stationary"
    direction = "expands" if law.sign > 0 else "shrinks"
    msg = f"interface {direction}: |eta(t)| ~ K * t^{law.exponent:.6g}"
    if isinstance(law.prefactor, Exact):
        msg += f", K = {law.prefactor.value:.6g}"
    elif isinstance(law.prefactor, Interval):
        msg += f", K in [{law.prefactor.lo:.6g}, {law.prefactor.hi:.6g}]"
    else:
        msg += ", K set by the self-similar profile"
    return msg


def _cmd_classify(args) -> int:
    scenario = load_scenario_file(args.scenario)
    report = classify(scenario.params)
    law = interface_law(report, scenario.params)
    print(f"scenario:  {scenario.name}")
    print(f"region:    {report.region.value}")
    for key, val in report.thresholds.items():
        print(f"threshold {key}: {val if val is not None else 'undefined'}")
    if report.c_star is not None:
        print(f"C_*:       {report.c_star:.6g}  (C = {scenario.params.C:.6g})")
    print(_describe_law(law))
    return 0


def _cmd_run(args) -> int:
    scenario = load_scenario_file(args.scenario)
    try:
        result = run_scenario(scenario, out_dir=args.out_dir, threshold=args.threshold)
    except ScenarioRunFailed as exc:
        print(f"solver instability: {exc}", file=sys.stderr)
        return 3
    if result.report is not None:
        print(f"region: {result.report.region.value}")
        print(_describe_law(result.law))
    if result.fit is not None:
        f = result.fit
        print(
            f"fit over t in [{f.window[0]:.6g}, {f.window[1]:.6g}]: "
            f"|eta| ~ {f.prefactor:.6g} * t^{f.exponent:.6g} "
            f"(rms log residual {f.rms_log_residual:.3g}, {f.n_points} points)"
        )
    for kind, path in result.paths.items():
        print(f"{kind}: {path}")
    return 0


def _seed_times(raw: str):
    times = tuple(float(v) for v in raw.split(",") if v.strip())
    if len(times) != 3:
        raise ScenarioError("--seed-times needs exactly three comma-separated times")
    return times


def _cmd_profile(args) -> int:
    scenario = load_scenario_file(args.scenario)
    params = scenario.params
    report = classify(params)
    law = interface_law(report, params)
    region = report.region
    step = args.step

    if region in (Region.R1, Region.B0_CASE1, Region.R2_EXPAND):
        seed_times = _seed_times(args.seed_times)
        grid = scenario.grid
        i0 = int(round((0.0 - grid.x_left) / grid.dx))
        if abs(grid.x_left + i0 * grid.dx) > 1e-9 * max(1.0, grid.dx):
            raise ScenarioError("grid must contain x = 0 for profile seeding")
        from .harness import make_initial_condition

        u0 = make_initial_condition(scenario.ic, grid, params)
        traj = evolve(u0, params, scenario.control, max(seed_times), output_times=seed_times)
        samples = [
            (snap.t, snap.u[i0], snap.u[i0 + 1], snap.u[i0 + 2]) for snap in traj.snapshots
        ]
        f0, fp0 = seed_from_pde(samples, grid.dx, params, law)
        print(f"f(0)  = {f0:.6g}")
        print(f"f'(0) = {fp0:.6g}")
        if region is Region.R2_EXPAND:
            table = integrate_region2(f0, fp0, params, step=step)
        else:
            table = integrate_region1(f0, fp0, params, step=step)
    elif region is Region.R2_SHRINK:
        f0, fp0 = region2_asymptotic_seed(params, args.seed_zeta)
        print(f"seeding at zeta = {args.seed_zeta}: f = {f0:.6g}, f' = {fp0:.6g}")
        table = integrate_region2(f0, fp0, params, step=step, zeta0=args.seed_zeta)
    else:
        print(f"region {region.value}: no self-similar profile ODE to integrate", file=sys.stderr)
        return 2

    print(f"front = {table.front:.6g}")
    if table.front_refined is not None:
        print(f"front (half step) = {table.front_refined:.6g}")
    if args.out_dir is not None:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{scenario.name}_profile.csv"
        write_profile_csv(path, table)
        print(f"profile: {path}")
    return 0


def _cmd_ips(args) -> int:
    params = ProblemParams(m=args.m, p=args.p, b=0.0, beta=1.0, C=1.0, alpha=1.0)
    grid = Grid(-5.0, 5.0, args.n)
    control = StepControl(cfl=args.cfl)
    scenario = Scenario(
        name=f"ips_p{args.p:g}",
        params=params,
        grid=grid,
        control=control,
        ic=IPSIC(gamma=args.gamma, t0=args.t0),
        t_end=args.t_end,
        output_times=tuple(t for t in (0.5, 1.0, 2.0) if args.t0 < t <= args.t_end),
    )
    try:
        result = run_scenario(scenario, out_dir=args.out_dir)
    except ScenarioRunFailed as exc:
        print(f"solver instability: {exc}", file=sys.stderr)
        return 3
    worst_u = 0.0
    worst_eta = 0.0
    for snap in result.snapshots:
        exact = analytic.ips_eval(params.m, params.p, args.gamma, grid.nodes, snap.t)
        err = float(np.max(np.abs(snap.u - exact)))
        eta = locate_interface(snap, control.interface_threshold)
        eta_exact = float(analytic.ips_interface(params.m, params.p, args.gamma, snap.t))
        eta_err = abs(eta - eta_exact) if eta is not None else float("inf")
        worst_u = max(worst_u, err)
        worst_eta = max(worst_eta, eta_err)
        print(
            f"t = {snap.t:4.2f}: sup|u - exact| = {err:.3e}, "
            f"|eta - exact| = {eta_err:.3e} (dx = {grid.dx:.3e})"
        )
    print(f"worst sup error {worst_u:.3e}, worst interface error {worst_eta:.3e}")
    return 0


def _cmd_compare(args) -> int:
    ts, etas = load_track_csv(args.track)
    sign = args.sign
    window = None
    predicted = None
    if args.config is not None:
        scenario = load_scenario_file(args.config)
        report = classify(scenario.params)
        predicted = interface_law(report, scenario.params)
        if sign == 0:
            sign = predicted.sign
        window = scenario.fit_window
    if sign == 0:
        sign = 1
    if args.window is not None:
        a, b = (float(v) for v in args.window.split(","))
        window = (a, b)
    if window is None:
        window = (0.02 * ts[-1], 0.2 * ts[-1])
    fit = fit_powerlaw(ts, etas, window, sign)
    print(
        f"fit over t in [{window[0]:.6g}, {window[1]:.6g}]: "
        f"|eta| ~ {fit.prefactor:.6g} * t^{fit.exponent:.6g} "
        f"(rms log residual {fit.rms_log_residual:.3g}, {fit.n_points} points)"
    )
    if predicted is not None and predicted.sign != 0:
        print(f"predicted: {_describe_law(predicted)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turbfilt",
        description="Interface dynamics toolkit for doubly degenerate diffusion with absorption",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="classify a scenario's parameters")
    p_classify.add_argument("scenario")
    p_classify.set_defaults(fn=_cmd_classify)

    p_run = sub.add_parser("run", help="run a scenario and emit CSVs")
    p_run.add_argument("scenario")
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--threshold", type=float, default=None, help="interface threshold")
    p_run.set_defaults(fn=_cmd_run)

    p_prof = sub.add_parser("profile", help="compute the self-similar profile for a scenario")
    p_prof.add_argument("scenario")
    p_prof.add_argument("--out-dir", default=None)
    p_prof.add_argument("--seed-times", default="0.01,0.02,0.03")
    p_prof.add_argument("--seed-zeta", type=float, default=-6.0)
    p_prof.add_argument("--step", type=float, default=1e-4)
    p_prof.set_defaults(fn=_cmd_profile)

    p_ips = sub.add_parser("ips", help="benchmark against the point-source solution")
    p_ips.add_argument("--m", type=float, default=6.0)
    p_ips.add_argument("--p", type=float, default=2.0)
    p_ips.add_argument("--gamma", type=float, default=1.0)
    p_ips.add_argument("--n", type=int, default=1024)
    p_ips.add_argument("--t0", type=float, default=0.05)
    p_ips.add_argument("--t-end", type=float, default=2.0)
    p_ips.add_argument("--cfl", type=float, default=0.4)
    p_ips.add_argument("--out-dir", default=None)
    p_ips.set_defaults(fn=_cmd_ips)

    p_cmp = sub.add_parser("compare", help="fit a power law to an interface track CSV")
    p_cmp.add_argument("track")
    p_cmp.add_argument("--config", default=None)
    p_cmp.add_argument("--window", default=None, help="t_a,t_b")
    p_cmp.add_argument("--sign", type=int, default=0, choices=(-1, 0, 1))
    p_cmp.set_defaults(fn=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverInstability, ScenarioRunFailed) as exc:
        print(f"solver instability: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
