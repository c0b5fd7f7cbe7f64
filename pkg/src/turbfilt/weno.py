"""Fifth-order WENO finite differences with TVD-RK3 time stepping.

The diffusion term (|(u^m)_x|^{p-1}(u^m)_x)_x is discretized conservatively:
the nodal derivative of u^m comes from the mean of left/right-biased
fifth-order WENO interpolations, the pointwise flux values are read as cell
averages of an auxiliary function, and that function is reconstructed at the
half nodes by fifth-order WENO before taking the flux difference.

Periodic boundaries only.  Node values are kept nonnegative by flooring after
each Runge-Kutta stage (the degenerate powers are evaluated on clipped data).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


#: regularization of the WENO smoothness weights
WENO_EPS = 1e-6
#: floor for the measured diffusivity in the adaptive time-step rule
DIFFUSIVITY_FLOOR = 1e-12


class SolverInstability(RuntimeError):
    """Raised when the time stepper produces non-finite values."""

    def __init__(self, message, t=None, u=None):
        super().__init__(message)
        self.t = t
        self.u = u


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with nodes x_left + i*dx, i = 0..n-1."""

    x_left: float
    x_right: float
    n: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("need at least 16 nodes")
        if not self.x_right > self.x_left:
            raise ValueError("need x_right > x_left")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n)


@dataclass
class Field:
    """Grid-sampled solution at one time level."""

    grid: Grid
    t: float
    u: np.ndarray

    def validate(self):
        if self.u.shape != (self.grid.n,):
            raise ValueError("field length does not match grid")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("field contains non-finite values")
        if np.any(self.u < 0.0):
            raise ValueError("field contains negative values")
        return self

    def copy(self) -> "Field":
        return Field(self.grid, self.t, self.u.copy())


@dataclass(frozen=True)
class StepControl:
    """Either a fixed dt or an adaptive step dt = cfl*dx^2/D_max."""

    dt: float | None = None
    cfl: float | None = None
    clip_negative: bool = True
    interface_threshold: float = 1e-10

    def __post_init__(self):
        if (self.dt is None) == (self.cfl is None):
            raise ValueError("set exactly one of dt and cfl")
        if self.dt is not None and not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if self.cfl is not None and not 0.0 < self.cfl <= 0.9:
            raise ValueError("cfl must be in (0, 0.9]")


def flux_phi(g, p: float):
    """Odd degenerate flux |g|^{p-1} g with phi(0) = 0 for every p > 0."""
    if p <= 0.0:
        raise ValueError("need p > 0")
    g = np.asarray(g, dtype=float)
    out = np.sign(g) * np.abs(g) ** p
    if out.ndim == 0:
        return float(out)
    return out


def _pow_nonneg(u, e: float):
    return np.power(np.maximum(u, 0.0), e)


def _weno_edge_numpy(v1, v2, v3, v4, v5):
    # smoothness indicators of the three candidate stencils
    b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - 4 * v2 + 3 * v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    b3 = 13.0 / 12.0 * (v3 - 2 * v4 + v5) ** 2 + 0.25 * (3 * v3 - 4 * v4 + v5) ** 2
    a1 = 0.1 / (WENO_EPS + b1) ** 2
    a2 = 0.6 / (WENO_EPS + b2) ** 2
    a3 = 0.3 / (WENO_EPS + b3) ** 2
    p1 = (2 * v1 - 7 * v2 + 11 * v3) / 6.0
    p2 = (-v2 + 5 * v3 + 2 * v4) / 6.0
    p3 = (2 * v3 + 5 * v4 - v5) / 6.0
    return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3)


def weno5_node_derivative(v: np.ndarray, dx: float, boundary: str = "periodic"):
    """Mean of the left- and right-biased fifth-order WENO derivatives at the nodes."""
    v = np.asarray(v, dtype=float)
    if v.size < 6:
        raise ValueError("need at least 6 samples")
    if boundary != "periodic":
        raise ValueError("only periodic boundaries are supported")
    d = (np.roll(v, -1) - v) / dx  # one-sided difference living on cell [x_j, x_{j+1}]
    dm3, dm2, dm1 = np.roll(d, 3), np.roll(d, 2), np.roll(d, 1)
    dp1, dp2 = np.roll(d, -1), np.roll(d, -2)
    left = _weno_edge_numpy(dm3, dm2, dm1, d, dp1)
    right = _weno_edge_numpy(dp2, dp1, d, dm1, dm2)
    return 0.5 * (left + right)


def weno5_halfnode_reconstruct(cellavg: np.ndarray, boundary: str = "periodic"):
    """Point values at x_{i+1/2} from cell averages, mean of the two biased stencils."""
    a = np.asarray(cellavg, dtype=float)
    if a.size < 6:
        raise ValueError("need at least 6 samples")
    if boundary != "periodic":
        raise ValueError("only periodic boundaries are supported")
    am2, am1 = np.roll(a, 2), np.roll(a, 1)
    ap1, ap2, ap3 = np.roll(a, -1), np.roll(a, -2), np.roll(a, -3)
    left = _weno_edge_numpy(am2, am1, a, ap1, ap2)
    right = _weno_edge_numpy(ap3, ap2, ap1, a, am1)
    return 0.5 * (left + right)


def degenerate_diffusion(field: Field, m: float, p: float):
    """Conservative WENO5 approximation of (|(u^m)_x|^{p-1}(u^m)_x)_x at the nodes."""
    u = field.u
    dx = field.grid.dx
    v = _pow_nonneg(u, m)
    g = weno5_node_derivative(v, dx)
    H = flux_phi(g, p)  # pointwise flux values = cell averages of the auxiliary h
    h_half = weno5_halfnode_reconstruct(H)
    return (h_half - np.roll(h_half, 1)) / dx


def rhs(field: Field, params):
    """Diffusion minus absorption; u^beta is 0 at u = 0 for every beta > 0."""
    out = degenerate_diffusion(field, params.m, params.p)
    if params.b > 0.0:
        out = out - params.b * _pow_nonneg(field.u, params.beta)
    return out


# -- fused kernels -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _pow1(x, e):
        # x >= 0; fast paths for the small integer / half-integer exponents
        if x <= 0.0:
            return 0.0
        if e == 1.0:
            return x
        if e == 2.0:
            return x * x
        if e == 0.5:
            return math.sqrt(x)
        k = int(e)
        if e == k and 0 < k <= 8:
            acc = x
            for _ in range(k - 1):
                acc *= x
            return acc
        if e == k + 0.5 and 0 <= k <= 8:
            acc = math.sqrt(x)
            for _ in range(k):
                acc *= x
            return acc
        return x**e

    @njit(cache=True, inline="always")
    def _signed_pow1(g, e):
        if g > 0.0:
            return _pow1(g, e)
        if g < 0.0:
            return -_pow1(-g, e)
        return 0.0

    @njit(cache=True, inline="always")
    def _edge1(v1, v2, v3, v4, v5):
        b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - 4 * v2 + 3 * v3) ** 2
        b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
        b3 = 13.0 / 12.0 * (v3 - 2 * v4 + v5) ** 2 + 0.25 * (3 * v3 - 4 * v4 + v5) ** 2
        a1 = 0.1 / (WENO_EPS + b1) ** 2
        a2 = 0.6 / (WENO_EPS + b2) ** 2
        a3 = 0.3 / (WENO_EPS + b3) ** 2
        p1 = (2 * v1 - 7 * v2 + 11 * v3) / 6.0
        p2 = (-v2 + 5 * v3 + 2 * v4) / 6.0
        p3 = (2 * v3 + 5 * v4 - v5) / 6.0
        return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3)

    @njit(cache=True)
    def _rhs_into(u, dx, m, p, b, beta, v, d, H, h, out):
        n = u.shape[0]
        for i in range(n):
            v[i] = _pow1(u[i], m)
        for i in range(n - 1):
            d[i] = (v[i + 1] - v[i]) / dx
        d[n - 1] = (v[0] - v[n - 1]) / dx
        for i in range(n):
            dm3 = d[(i - 3) % n]
            dm2 = d[(i - 2) % n]
            dm1 = d[(i - 1) % n]
            d0 = d[i]
            dp1 = d[(i + 1) % n]
            dp2 = d[(i + 2) % n]
            left = _edge1(dm3, dm2, dm1, d0, dp1)
            right = _edge1(dp2, dp1, d0, dm1, dm2)
            H[i] = _signed_pow1(0.5 * (left + right), p)
        for i in range(n):
            hm2 = H[(i - 2) % n]
            hm1 = H[(i - 1) % n]
            h0 = H[i]
            hp1 = H[(i + 1) % n]
            hp2 = H[(i + 2) % n]
            hp3 = H[(i + 3) % n]
            left = _edge1(hm2, hm1, h0, hp1, hp2)
            right = _edge1(hp3, hp2, hp1, h0, hm1)
            h[i] = 0.5 * (left + right)
        if b > 0.0:
            for i in range(n):
                out[i] = (h[i] - h[(i - 1) % n]) / dx - b * _pow1(u[i], beta)
        else:
            for i in range(n):
                out[i] = (h[i] - h[(i - 1) % n]) / dx

    @njit(cache=True)
    def _rk3_into(u, dt, dx, m, p, b, beta, clip, u1, u2, v, d, H, h, L, out):
        n = u.shape[0]
        _rhs_into(u, dx, m, p, b, beta, v, d, H, h, L)
        for i in range(n):
            ui = u[i] + dt * L[i]
            u1[i] = 0.0 if (clip and ui < 0.0) else ui
        _rhs_into(u1, dx, m, p, b, beta, v, d, H, h, L)
        for i in range(n):
            ui = 0.75 * u[i] + 0.25 * u1[i] + 0.25 * dt * L[i]
            u2[i] = 0.0 if (clip and ui < 0.0) else ui
        _rhs_into(u2, dx, m, p, b, beta, v, d, H, h, L)
        ok = True
        for i in range(n):
            ui = u[i] / 3.0 + 2.0 / 3.0 * u2[i] + 2.0 / 3.0 * dt * L[i]
            if clip and ui < 0.0:
                ui = 0.0
            out[i] = ui
            if not math.isfinite(ui):
                ok = False
        return ok

    @njit(cache=True)
    def _diffusivity_max(u, dx, m, p):
        n = u.shape[0]
        best = 0.0
        for i in range(n):
            ui = u[i]
            if ui <= 0.0:
                continue
            g = (_pow1(u[(i + 1) % n], m) - _pow1(u[(i - 1) % n], m)) / (2.0 * dx)
            ag = abs(g)
            if ag == 0.0:
                continue
            di = p * ag ** (p - 1.0) * m * ui ** (m - 1.0)
            if math.isfinite(di) and di > best:
                best = di
        return best


def _rhs_numpy(u, dx, m, p, b, beta):
    v = _pow_nonneg(u, m)
    g = weno5_node_derivative(v, dx)
    h_half = weno5_halfnode_reconstruct(flux_phi(g, p))
    out = (h_half - np.roll(h_half, 1)) / dx
    if b > 0.0:
        out = out - b * _pow_nonneg(u, beta)
    return out


def _diffusivity_max_numpy(u, dx, m, p):
    v = _pow_nonneg(u, m)
    g = (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * dx)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = p * np.abs(g) ** (p - 1.0) * m * np.power(u, m - 1.0, where=u > 0, out=np.zeros_like(u))
    d = np.where((u > 0) & (np.abs(g) > 0) & np.isfinite(d), d, 0.0)
    return float(d.max())


class _Stepper:
    """Owns the work arrays for repeated RK3 steps on one grid."""

    def __init__(self, n: int, dx: float, params, clip: bool):
        self.dx = dx
        self.m, self.p = params.m, params.p
        self.b, self.beta = params.b, params.beta
        self.clip = clip
        if HAVE_NUMBA:
            self._w = [np.empty(n) for _ in range(7)]
            self._out = np.empty(n)

    def rhs(self, u):
        return _rhs_numpy(u, self.dx, self.m, self.p, self.b, self.beta)

    def step(self, u, dt):
        if HAVE_NUMBA:
            u1, u2, v, d, H, h, L = self._w
            ok = _rk3_into(
                u, dt, self.dx, self.m, self.p, self.b, self.beta, self.clip,
                u1, u2, v, d, H, h, L, self._out,
            )
            return self._out.copy(), bool(ok)
        u1 = u + dt * self.rhs(u)
        if self.clip:
            u1 = np.maximum(u1, 0.0)
        u2 = 0.75 * u + 0.25 * u1 + 0.25 * dt * self.rhs(u1)
        if self.clip:
            u2 = np.maximum(u2, 0.0)
        out = u / 3.0 + 2.0 / 3.0 * u2 + 2.0 / 3.0 * dt * self.rhs(u2)
        if self.clip:
            out = np.maximum(out, 0.0)
        return out, bool(np.all(np.isfinite(out)))

    def diffusivity_max(self, u):
        if HAVE_NUMBA:
            return float(_diffusivity_max(u, self.dx, self.m, self.p))
        return _diffusivity_max_numpy(u, self.dx, self.m, self.p)


def rk3_step(field: Field, dt: float, params, clip_negative: bool = True) -> Field:
    """One TVD-RK3 step; raises SolverInstability on non-finite output."""
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    stepper = _Stepper(field.grid.n, field.grid.dx, params, clip_negative)
    out, ok = stepper.step(field.u, dt)
    if not ok:
        raise SolverInstability("non-finite values after RK3 step", t=field.t + dt, u=out)
    return Field(field.grid, field.t + dt, out)


@dataclass
class Trajectory:
    final: Field
    snapshots: list = dc_field(default_factory=list)
    n_steps: int = 0


def evolve(
    u0: Field,
    params,
    control: StepControl,
    t_end: float,
    output_times=(),
    on_step=None,
) -> Trajectory:
    """March u0 to t_end, landing exactly on every requested output time.

    `on_step` (if given) is called with the live Field after every step; it
    must not mutate or retain the array.  Snapshot fields are copies.
    """
    if not t_end > u0.t:
        raise ValueError("t_end must exceed the initial time")
    targets = sorted(set(float(t) for t in output_times))
    for t in targets:
        if not (u0.t < t <= t_end):
            raise ValueError(f"output time {t} outside ({u0.t}, {t_end}]")

    grid = u0.grid
    dx = grid.dx
    stepper = _Stepper(grid.n, dx, params, control.clip_negative)
    u = u0.u.copy()
    t = u0.t
    live = Field(grid, t, u)
    snapshots: list[Field] = []
    pending = targets + [t_end]
    n_steps = 0

    while t < t_end:
        if control.dt is not None:
            dt = control.dt
        else:
            dmax = stepper.diffusivity_max(u)
            dt = control.cfl * dx * dx / max(dmax, DIFFUSIVITY_FLOOR)
        t_next = pending[0]
        hit = t + dt >= t_next
        if hit:
            dt = t_next - t
        if dt <= 1e-15 * max(abs(t), 1.0):
            raise SolverInstability("time step collapsed", t=t, u=u)
        u, ok = stepper.step(u, dt)
        if not ok:
            raise SolverInstability("non-finite values during evolution", t=t + dt, u=u)
        t = t_next if hit else t + dt
        n_steps += 1
        live.t, live.u = t, u
        if hit:
            pending.pop(0)
            if t in targets:
                snapshots.append(Field(grid, t, u.copy()))
        if on_step is not None:
            on_step(live)

    return Trajectory(final=Field(grid, t, u.copy()), snapshots=snapshots, n_steps=n_steps)


def locate_interface(field: Field, threshold: float = 1e-10):
    """First node right of the solution peak where u < threshold, or None.

    Scanning starts at the maximum of u (the right front is the one tracked);
    None means no node reaches the threshold at all, or the support touches
    the right end of the scan.
    """
    u = field.u
    if float(u.max(initial=0.0)) < threshold:
        return None
    i0 = int(np.argmax(u))
    below = np.nonzero(u[i0:] < threshold)[0]
    if below.size == 0:
        return None
    return float(field.grid.nodes[i0 + int(below[0])])
