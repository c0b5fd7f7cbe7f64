"""Scenario configuration, experiment orchestration, fitting and CSV emission."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import analytic
from .classification import Exact, InterfaceLaw, Region, RegionReport, classify, interface_law
from .params import ProblemParams
from .weno import Field, Grid, SolverInstability, StepControl, evolve, locate_interface


class ScenarioError(ValueError):
    """Configuration problem; carries the offending line number when known."""

    def __init__(self, message, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class PowerFrontIC:
    C: float
    alpha: float
    taper_center: float = -1.0
    taper_width: float = 0.5


@dataclass(frozen=True)
class IPSIC:
    gamma: float
    t0: float


@dataclass(frozen=True)
class ExplicitIC:
    kind: str
    t0: float = 0.0


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ProblemParams
    grid: Grid
    control: StepControl
    ic: PowerFrontIC | IPSIC | ExplicitIC
    t_end: float
    output_times: tuple = ()
    fit_window: tuple | None = None

    def __post_init__(self):
        t0 = self.ic.t0 if isinstance(self.ic, (IPSIC, ExplicitIC)) else 0.0
        last = t0
        for t in self.output_times:
            if not (t0 < t <= self.t_end):
                raise ScenarioError(f"output time {t} outside ({t0}, {self.t_end}]")
            if t < last:
                raise ScenarioError("output_times must be sorted")
            last = t


def make_initial_condition(ic, grid: Grid, params: ProblemParams) -> Field:
    """Sample the configured initial condition on the grid."""
    x = grid.nodes
    if isinstance(ic, PowerFrontIC):
        lo, hi = ic.taper_center - 2 * ic.taper_width, ic.taper_center + ic.taper_width
        if lo <= grid.x_left or hi >= 0.0:
            raise ScenarioError("taper window outside the usable domain")
        u = ic.C * np.maximum(-x, 0.0) ** ic.alpha
        # exact power law on [taper_center + taper_width, 0]; smooth cut below
        taper = 0.5 * (1.0 + np.tanh((x - ic.taper_center) / (ic.taper_width / 4.0)))
        u = np.where(x < hi, u * taper, u)
        u[x >= 0.0] = 0.0
        return Field(grid, 0.0, u).validate()
    if isinstance(ic, IPSIC):
        u = analytic.ips_eval(params.m, params.p, ic.gamma, x, ic.t0)
        return Field(grid, ic.t0, u).validate()
    if isinstance(ic, ExplicitIC):
        u = np.asarray(analytic.explicit_eval(ic.kind, params, x, ic.t0), dtype=float)
        return Field(grid, ic.t0, u).validate()
    raise ScenarioError(f"unknown initial condition {ic!r}")


@dataclass(frozen=True)
class FitReport:
    prefactor: float
    exponent: float
    rms_log_residual: float
    window: tuple
    n_points: int
    predicted_sign: int | None = None
    predicted_exponent: float | None = None
    predicted_prefactor: float | None = None


def fit_powerlaw(ts, etas, window, sign: int) -> FitReport:
    """Least-squares power law through (t, sign*eta) in log-log coordinates."""
    ts = np.asarray(ts, dtype=float)
    etas = np.asarray(etas, dtype=float)
    t_a, t_b = window
    keep = (ts >= t_a) & (ts <= t_b) & np.isfinite(etas) & (sign * etas > 0.0)
    if int(keep.sum()) < 5:
        raise ValueError(f"need at least 5 usable points in window {window}")
    lt = np.log(ts[keep])
    le = np.log(sign * etas[keep])
    slope, intercept = np.polyfit(lt, le, 1)
    resid = le - (slope * lt + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return FitReport(
        prefactor=float(np.exp(intercept)),
        exponent=float(slope),
        rms_log_residual=rms,
        window=(t_a, t_b),
        n_points=int(keep.sum()),
    )


@dataclass
class RunResult:
    scenario: Scenario
    report: RegionReport | None
    law: InterfaceLaw | None
    track_t: np.ndarray
    track_eta: np.ndarray
    snapshots: list
    fit: FitReport | None
    paths: dict = dc_field(default_factory=dict)
    instability: SolverInstability | None = None


def _predicted_law(scenario: Scenario):
    """(report, law) for power-front data; a synthetic exact law for IPS data."""
    params = scenario.params
    if isinstance(scenario.ic, IPSIC):
        m, p = params.m, params.p
        exponent = 1.0 / (p * (m + 1.0))
        pref = (scenario.ic.gamma / analytic.ips_coefficient(m, p)) ** (p / (p + 1.0))
        return None, InterfaceLaw(Region.B0_CASE1, +1, exponent, Exact(pref))
    report = classify(params)
    return report, interface_law(report, params)


def run_scenario(scenario: Scenario, out_dir=None, threshold: float | None = None) -> RunResult:
    """Evolve a scenario, record the interface every step, fit, and emit CSVs.

    Deterministic: identical scenarios produce byte-identical CSV files.  If
    the solver goes unstable the partial outputs are still written and the
    instability is attached to the result.
    """
    params = scenario.params
    report, law = _predicted_law(scenario)
    thr = scenario.control.interface_threshold if threshold is None else threshold
    u0 = make_initial_condition(scenario.ic, scenario.grid, params)

    ts: list[float] = []
    etas: list[float] = []

    def track(field: Field):
        eta = locate_interface(field, thr)
        ts.append(field.t)
        etas.append(math.nan if eta is None else eta)

    instability = None
    snapshots: list[Field] = []
    try:
        traj = evolve(
            u0,
            params,
            scenario.control,
            scenario.t_end,
            output_times=scenario.output_times,
            on_step=track,
        )
        snapshots = traj.snapshots
    except SolverInstability as exc:
        instability = exc

    track_t = np.asarray(ts)
    track_eta = np.asarray(etas)

    fit = None
    if instability is None and law is not None and law.sign != 0:
        window = scenario.fit_window
        if window is None:
            window = (0.02 * scenario.t_end, 0.2 * scenario.t_end)
        try:
            fit = fit_powerlaw(track_t, track_eta, window, law.sign)
        except ValueError:
            fit = None
        if fit is not None:
            pred_pref = law.prefactor.value if isinstance(law.prefactor, Exact) else None
            fit = FitReport(
                prefactor=fit.prefactor,
                exponent=fit.exponent,
                rms_log_residual=fit.rms_log_residual,
                window=fit.window,
                n_points=fit.n_points,
                predicted_sign=law.sign,
                predicted_exponent=law.exponent,
                predicted_prefactor=pred_pref,
            )

    paths = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        track_path = out / f"{scenario.name}_track.csv"
        write_track_csv(track_path, track_t, track_eta)
        paths["track"] = track_path
        snap_path = out / f"{scenario.name}_snapshots.csv"
        write_snapshots_csv(snap_path, snapshots)
        paths["snapshots"] = snap_path

    result = RunResult(
        scenario=scenario,
        report=report,
        law=law,
        track_t=track_t,
        track_eta=track_eta,
        snapshots=snapshots,
        fit=fit,
        paths=paths,
        instability=instability,
    )
    if instability is not None:
        raise ScenarioRunFailed(result)
    return result


class ScenarioRunFailed(RuntimeError):
    """Solver instability during a scenario; partial outputs are attached."""

    def __init__(self, result: RunResult):
        super().__init__(str(result.instability))
        self.result = result


# -- CSV emission --------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_track_csv(path, ts, etas):
    with open(path, "w") as fh:
        fh.write("t,eta\n")
        for t, e in zip(ts, etas):
            if math.isnan(e):
                continue
            fh.write(f"{_fmt(t)},{_fmt(e)}\n")


def load_track_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,eta":
            raise ValueError(f"unexpected track header {header!r}")
        ts, etas = [], []
        for line in fh:
            a, b = line.strip().split(",")
            ts.append(float(a))
            etas.append(float(b))
    return np.asarray(ts), np.asarray(etas)


def write_snapshots_csv(path, snapshots):
    with open(path, "w") as fh:
        fh.write("t,x,u\n")
        for snap in snapshots:
            xs = snap.grid.nodes
            for x, u in zip(xs, snap.u):
                fh.write(f"{_fmt(snap.t)},{_fmt(x)},{_fmt(u)}\n")


def write_profile_csv(path, table):
    with open(path, "w") as fh:
        fh.write("xi,f\n")
        for xi, f in zip(table.xi, table.f):
            fh.write(f"{_fmt(xi)},{_fmt(f)}\n")


# -- scenario config parsing ----------------------------------------------------

_REQUIRED = ("name", "m", "p", "b", "beta", "C", "alpha", "x_left", "x_right", "n", "t_end")

_KNOWN = set(_REQUIRED) | {
    "dt",
    "cfl",
    "output_times",
    "fit_window",
    "interface_threshold",
    "clip_negative",
    "ic.kind",
    "ic.C",
    "ic.alpha",
    "ic.taper_center",
    "ic.taper_width",
    "ic.gamma",
    "ic.t0",
    "ic.explicit_kind",
}


def _parse_float(raw, key, line):
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f"cannot parse number for {key!r}: {raw!r}", line) from None


def load_scenario(text: str) -> Scenario:
    """Parse a flat key = value scenario description."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected key = value, got {line!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN:
            raise ScenarioError(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ScenarioError(f"empty value for {key!r}", lineno)
        entries[key] = (value, lineno)

    for key in _REQUIRED:
        if key not in entries:
            raise ScenarioError(f"missing required key {key!r}")
    if ("dt" in entries) == ("cfl" in entries):
        raise ScenarioError("exactly one of 'dt' and 'cfl' is required")
    if "ic.kind" not in entries:
        raise ScenarioError("missing required key 'ic.kind'")

    def num(key, default=None):
        if key not in entries:
            return default
        value, line = entries[key]
        return _parse_float(value, key, line)

    def numlist(key):
        if key not in entries:
            return ()
        value, line = entries[key]
        return tuple(_parse_float(v.strip(), key, line) for v in value.split(",") if v.strip())

    name = entries["name"][0]
    params = ProblemParams(
        m=num("m"), p=num("p"), b=num("b"), beta=num("beta"), C=num("C"), alpha=num("alpha")
    )
    value, line = entries["n"]
    try:
        n = int(value)
    except ValueError:
        raise ScenarioError(f"cannot parse integer for 'n': {value!r}", line) from None
    grid = Grid(num("x_left"), num("x_right"), n)

    clip = True
    if "clip_negative" in entries:
        value, line = entries["clip_negative"]
        if value not in ("true", "false"):
            raise ScenarioError("clip_negative must be true or false", line)
        clip = value == "true"
    control = StepControl(
        dt=num("dt"),
        cfl=num("cfl"),
        clip_negative=clip,
        interface_threshold=num("interface_threshold", 1e-10),
    )

    kind, line = entries["ic.kind"]
    if kind == "power_front":
        ic = PowerFrontIC(
            C=num("ic.C", params.C),
            alpha=num("ic.alpha", params.alpha),
            taper_center=num("ic.taper_center", -1.0),
            taper_width=num("ic.taper_width", 0.5),
        )
    elif kind == "ips":
        gamma = num("ic.gamma")
        t0 = num("ic.t0")
        if gamma is None or t0 is None:
            raise ScenarioError("ips initial condition needs ic.gamma and ic.t0", line)
        ic = IPSIC(gamma=gamma, t0=t0)
    elif kind == "explicit":
        if "ic.explicit_kind" not in entries:
            raise ScenarioError("explicit initial condition needs ic.explicit_kind", line)
        ekind = entries["ic.explicit_kind"][0]
        if ekind not in analytic.EXPLICIT_KINDS:
            raise ScenarioError(f"unknown explicit kind {ekind!r}", entries["ic.explicit_kind"][1])
        ic = ExplicitIC(kind=ekind, t0=num("ic.t0", 0.0))
    else:
        raise ScenarioError(f"unknown ic.kind {kind!r}", line)

    fw = numlist("fit_window")
    if fw and len(fw) != 2:
        raise ScenarioError("fit_window needs exactly two times")
    return Scenario(
        name=name,
        params=params,
        grid=grid,
        control=control,
        ic=ic,
        t_end=num("t_end"),
        output_times=numlist("output_times"),
        fit_window=fw or None,
    )


def load_scenario_file(path) -> Scenario:
    return load_scenario(Path(path).read_text())
