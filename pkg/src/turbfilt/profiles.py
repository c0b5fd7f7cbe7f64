"""Self-similar profile computation by forward ODE integration.

The profile equations are integrated as first-order systems in (f, G) where
G = |g|^{p-1} g and g = (f^m)'.  Seeds come either from early-time PDE
measurements at the origin (expanding fronts) or from the far-field power-law
behavior at a point deep inside the support (shrinking fronts, where the
profile vanishes at the origin).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classification import InterfaceLaw, Region
from .params import ProblemParams

#: integration stops once f drops below this floor
F_FLOOR = 1e-6
#: ... or the profile slope exceeds this magnitude
SLOPE_LIMIT = 1e6

REGION1_KIND = "region1"
REGION2_KIND = "region2"


@dataclass
class ProfileTable:
    """Sampled profile with the extracted front coordinate.

    `front` is the abscissa of the smallest recorded f; `front_refined` is the
    same quantity from a half-step rerun when the self-consistency check ran.
    """

    xi: np.ndarray
    f: np.ndarray
    front: float
    seed: tuple[float, float]
    ode_kind: str
    front_refined: float | None = None


@dataclass
class PhasePlaneTable:
    """Traveling-wave phase-plane samples Y(X) for wave speed k."""

    X: np.ndarray
    Y: np.ndarray
    k: float
    params: ProblemParams


def similarity_exponents(law: InterfaceLaw, params: ProblemParams) -> tuple[float, float]:
    """Amplitude and spreading exponents (a, c) with u ~ t^a f(x t^-c)."""
    if law.region in (Region.R1, Region.B0_CASE1):
        c = law.exponent
        return params.alpha * c, c
    if law.region in (Region.R2_EXPAND, Region.R2_SHRINK, Region.R2_STATIONARY):
        return 1.0 / (1.0 - params.beta), (params.m * params.p - params.beta) / (
            (1.0 + params.p) * (1.0 - params.beta)
        )
    raise ValueError(f"no self-similar profile for region {law.region}")


def seed_from_pde(samples, dx: float, params: ProblemParams, law: InterfaceLaw):
    """Profile seed (f(0), f'(0)) from PDE values at x = 0, dx, 2*dx.

    `samples` holds exactly three tuples (t_i, u(0,t_i), u(dx,t_i), u(2dx,t_i)).
    The three rescaled ordinates are averaged, and f'(0) is the derivative at
    zero of the quadratic through (0, f0), (xi0, f1), (2*xi0, f2) where xi0 is
    the averaged rescaled spacing.
    """
    samples = list(samples)
    if len(samples) != 3:
        raise ValueError("need exactly three sample times")
    a, c = similarity_exponents(law, params)
    f_cols = [0.0, 0.0, 0.0]
    xi0 = 0.0
    for t_i, *u_vals in samples:
        if len(u_vals) != 3:
            raise ValueError("each sample must hold (t, u0, u1, u2)")
        if not all(math.isfinite(v) for v in (t_i, *u_vals)):
            raise ValueError("non-finite sample")
        if not (u_vals[0] > u_vals[1] > u_vals[2] >= 0.0):
            raise ValueError("samples must decrease toward the front")
        scale = t_i ** (-a)
        for j in range(3):
            f_cols[j] += u_vals[j] * scale / 3.0
        xi0 += dx * t_i ** (-c) / 3.0
    f0, f1, f2 = f_cols
    fp0 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * xi0)
    return f0, fp0


def region1_asymptotic_seed(params: ProblemParams, xi: float):
    """Far-field seed on the power-law branch f ~ C(-xi)^alpha (xi << 0)."""
    if xi >= 0.0:
        raise ValueError("seed point must be negative")
    C, alpha = params.C, params.alpha
    return C * (-xi) ** alpha, -alpha * C * (-xi) ** (alpha - 1.0)


def region2_asymptotic_seed(params: ProblemParams, zeta: float):
    """Far-field seed at the critical steepness (1+p)/(mp-beta)."""
    if zeta >= 0.0:
        raise ValueError("seed point must be negative")
    a_crit = (1.0 + params.p) / (params.m * params.p - params.beta)
    C = params.C
    return C * (-zeta) ** a_crit, -a_crit * C * (-zeta) ** (a_crit - 1.0)


def _integrate(f0, fp0, params, step, x0, max_span, ode_kind, g_rhs):
    m, p = params.m, params.p

    def derivs(x, f, G):
        # g = (f^m)' recovered from G = |g|^{p-1} g
        if f <= 0.0:
            return None
        g = math.copysign(abs(G) ** (1.0 / p), G) if G != 0.0 else 0.0
        denom = m * f ** (m - 1.0)
        fp = g / denom
        if not math.isfinite(fp):
            return None
        return fp, g_rhs(x, f, fp)

    if not f0 > 0.0:
        raise ValueError("seed value must be positive")
    g0 = m * f0 ** (m - 1.0) * fp0
    G = math.copysign(abs(g0) ** p, g0) if g0 != 0.0 else 0.0
    f = f0
    x = x0
    xs = [x]
    fs = [f]
    n_max = int(max_span / step)
    for it in range(n_max):
        d1 = derivs(x, f, G)
        if d1 is None:
            break
        k1f, k1G = d1
        d2 = derivs(x + 0.5 * step, f + 0.5 * step * k1f, G + 0.5 * step * k1G)
        if d2 is None:
            break
        k2f, k2G = d2
        d3 = derivs(x + 0.5 * step, f + 0.5 * step * k2f, G + 0.5 * step * k2G)
        if d3 is None:
            break
        k3f, k3G = d3
        d4 = derivs(x + step, f + step * k3f, G + step * k3G)
        if d4 is None:
            break
        k4f, k4G = d4
        f_new = f + step / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f)
        G_new = G + step / 6.0 * (k1G + 2 * k2G + 2 * k3G + k4G)
        x_new = x + step
        if not (math.isfinite(f_new) and math.isfinite(G_new)):
            break
        if f_new >= f:
            if it == 0:
                raise ValueError("profile increases at the seed point (bad seed)")
            break
        x, f, G = x_new, f_new, G_new
        xs.append(x)
        fs.append(f)
        if f < F_FLOOR:
            break
        fp_now = derivs(x, f, G)
        if fp_now is None or abs(fp_now[0]) > SLOPE_LIMIT:
            break

    xi = np.asarray(xs)
    fv = np.asarray(fs)
    front = float(xi[int(np.argmin(fv))])
    return ProfileTable(xi, fv, front, (f0, fp0), ode_kind)


def integrate_region1(
    f0: float,
    fp0: float,
    params: ProblemParams,
    step: float = 1e-4,
    xi0: float = 0.0,
    max_span: float = 50.0,
    check_halfstep: bool = True,
) -> ProfileTable:
    """Integrate the expanding-region profile ODE forward from (xi0, f0, fp0).

    Classical RK4 with fixed step; stops when f crosses the floor, stops
    decreasing, or its slope blows up.  The front is the abscissa of the
    smallest recorded f.
    """
    m, p, alpha = params.m, params.p, params.alpha
    mp = m * p
    if not mp > 1.0:
        raise ValueError("need m*p > 1")
    if not alpha * (mp - 1.0) < 1.0 + p:
        raise ValueError("need alpha < (1+p)/(mp-1)")
    s = 1.0 / (1.0 + p - alpha * (mp - 1.0))

    def g_rhs(x, f, fp):
        return -s * (x * fp - alpha * f)

    table = _integrate(f0, fp0, params, step, xi0, max_span, REGION1_KIND, g_rhs)
    if check_halfstep:
        fine = _integrate(f0, fp0, params, step / 2.0, xi0, max_span, REGION1_KIND, g_rhs)
        table.front_refined = fine.front
    return table


def integrate_region2(
    f0: float,
    fp0: float,
    params: ProblemParams,
    step: float = 1e-4,
    zeta0: float = 0.0,
    max_span: float = 50.0,
    check_halfstep: bool = True,
) -> ProfileTable:
    """Integrate the borderline-case profile ODE forward from (zeta0, f0, fp0).

    For shrinking fronts the profile vanishes at the origin, so the caller
    seeds at a negative zeta0 (see region2_asymptotic_seed); the front is then
    found at negative zeta.
    """
    m, p, b, beta = params.m, params.p, params.b, params.beta
    if not 0.0 < beta < 1.0:
        raise ValueError("need 0 < beta < 1")
    q = (m * p - beta) / ((1.0 + p) * (1.0 - beta))
    r = 1.0 / (1.0 - beta)

    def g_rhs(x, f, fp):
        return -q * x * fp + r * f + b * f**beta

    table = _integrate(f0, fp0, params, step, zeta0, max_span, REGION2_KIND, g_rhs)
    if check_halfstep:
        fine = _integrate(f0, fp0, params, step / 2.0, zeta0, max_span, REGION2_KIND, g_rhs)
        table.front_refined = fine.front
    return table


def phase_plane(
    k: float,
    params: ProblemParams,
    X_max: float = 1000.0,
    step: float = 0.01,
) -> PhasePlaneTable:
    """Integrate dY/dX = k + b m X^{m+beta-1} Y^{-1/p} from a near-origin seed.

    Valid for 0 < beta < 1 and p(m+beta) > 1+p, where the source term vanishes
    at the origin and the seed balance is Y ~ kX.
    """
    m, p, b, beta = params.m, params.p, params.b, params.beta
    if not 0.0 < beta < 1.0:
        raise ValueError("need 0 < beta < 1")
    if not p * (m + beta) > 1.0 + p:
        raise ValueError("need p*(m+beta) > 1+p")
    if not k > 0.0:
        raise ValueError("need wave speed k > 0")

    ex = m + beta - 1.0

    def dY(X, Y):
        if Y <= 0.0:
            raise ValueError("Y hit zero during integration (step too large)")
        return k + b * m * X**ex * Y ** (-1.0 / p)

    X = 1e-8
    Y = k * X
    Xs = [X]
    Ys = [Y]
    n = int((X_max - X) / step) + 1
    for _ in range(n):
        h = min(step, X_max - X)
        if h <= 0.0:
            break
        k1 = dY(X, Y)
        k2 = dY(X + 0.5 * h, Y + 0.5 * h * k1)
        k3 = dY(X + 0.5 * h, Y + 0.5 * h * k2)
        k4 = dY(X + h, Y + h * k3)
        Y = Y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        X = X + h
        Xs.append(X)
        Ys.append(Y)
    return PhasePlaneTable(np.asarray(Xs), np.asarray(Ys), k, params)


def wave_profile(table: PhasePlaneTable, params: ProblemParams, y_grid):
    """Traveling-wave profile phi on y_grid by quadrature of the phase table.

    Tabulates y(phi) = m * integral_0^phi X^{m-1} Y^{-1/p} dX (trapezoid, with
    the integrable near-origin piece handled by the Y ~ kX balance), then
    inverts the monotone map onto y_grid.
    """
    m, p = params.m, params.p
    X, Y = table.X, table.Y
    w = m * X ** (m - 1.0) * Y ** (-1.0 / p)
    # analytic near-origin contribution with Y ~ kX: integrable since mp > 1
    y0 = m * table.k ** (-1.0 / p) * X[0] ** (m - 1.0 / p) / (m - 1.0 / p)
    dXs = np.diff(X)
    y = np.concatenate(([y0], y0 + np.cumsum(0.5 * (w[1:] + w[:-1]) * dXs)))
    y_grid = np.asarray(y_grid, dtype=float)
    if np.any(y_grid < 0.0) or np.any(y_grid > y[-1]):
        raise ValueError(f"requested y beyond tabulated range [0, {y[-1]}]")
    y_full = np.concatenate(([0.0], y))
    X_full = np.concatenate(([0.0], X))
    return np.interp(y_grid, y_full, X_full)
