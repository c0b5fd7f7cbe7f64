"""Parameter-space classification of interface behavior and its constant catalog.

Pure functions only: given (m, p, b, beta, C, alpha) they decide whether the
interface initially expands, shrinks or waits, report the short-time power law
eta(t) ~ sign * prefactor * t^exponent, and evaluate the catalog of auxiliary
constants used by the envelope bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .params import EQ_RTOL, ProblemParams, rel_close

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Region(Enum):
    R1 = "R1"
    R2_EXPAND = "R2_expand"
    R2_SHRINK = "R2_shrink"
    R2_STATIONARY = "R2_stationary"
    R3 = "R3"
    R4A = "R4a"
    R4B = "R4b"
    R4C = "R4c"
    R4D = "R4d"
    B0_CASE1 = "B0_case1"
    B0_CASE2 = "B0_case2"
    B0_CASE3 = "B0_case3"


#: regions whose interface initially stays put
STATIONARY_REGIONS = frozenset(
    {
        Region.R2_STATIONARY,
        Region.R4A,
        Region.R4B,
        Region.R4C,
        Region.R4D,
        Region.B0_CASE2,
        Region.B0_CASE3,
    }
)


@dataclass(frozen=True)
class RegionReport:
    region: Region
    thresholds: dict
    c_star: float | None


@dataclass(frozen=True)
class Exact:
    value: float


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float


@dataclass(frozen=True)
class ProfileDetermined:
    pass


@dataclass(frozen=True)
class InterfaceLaw:
    """Short-time law sign * prefactor * t^exponent for the interface.

    `prefactor` quantifies |eta|/t^exponent; the direction is carried by
    `sign`.  Stationary regions have sign 0 and no exponent.
    """

    region: Region
    sign: int
    exponent: float | None
    prefactor: Exact | Interval | ProfileDetermined | None


def critical_constant(m: float, p: float, b: float, beta: float) -> float:
    """Critical front prefactor separating expansion from shrinkage.

    Defined for 0 < beta < 1, m*p > beta, b > 0.
    """
    mp = m * p
    if not 0.0 < beta < 1.0:
        raise ValueError(f"need 0 < beta < 1, got {beta}")
    if mp <= beta:
        raise ValueError(f"need m*p > beta, got m*p = {mp}, beta = {beta}")
    if b <= 0.0:
        raise ValueError(f"need b > 0, got {b}")
    return (b * (mp - beta) ** (1 + p) / ((m * (1 + p)) ** p * p * (m + beta))) ** (
        1.0 / (mp - beta)
    )


def vanishing_front_constant(m: float, p: float) -> float:
    """Datum prefactor at which the critical-steepness separable solution blows up."""
    mp = m * p
    if mp <= 1.0:
        raise ValueError("need m*p > 1")
    return ((mp - 1) ** (1 + p) / (p * (m + 1) * (m * (1 + p)) ** p)) ** (1.0 / (mp - 1))


def classify(params: ProblemParams) -> RegionReport:
    """Assign the unique region label for the given parameters.

    Threshold comparisons resolve equality at relative tolerance 1e-12 and
    boundary values go to the borderline region.
    """
    m, p, b, beta, C, alpha = (
        params.m,
        params.p,
        params.b,
        params.beta,
        params.C,
        params.alpha,
    )
    mp = m * p

    thr_stationary = (1 + p) / (mp - 1) if mp > 1 + EQ_RTOL else math.inf
    thr_critical = (1 + p) / (mp - beta) if mp > beta else None
    thr_expand = thr_critical if beta < 1 else thr_stationary
    thr_linear = p / (mp - 1) if mp > 1 + EQ_RTOL else math.inf
    thresholds = {
        "expand": thr_expand,
        "critical": thr_critical,
        "stationary": thr_stationary,
        "linear_front": thr_linear,
    }

    if b == 0.0:
        if rel_close(alpha, thr_stationary):
            region = Region.B0_CASE2
        elif alpha < thr_stationary:
            region = Region.B0_CASE1
        else:
            region = Region.B0_CASE3
        return RegionReport(region, thresholds, None)

    if beta < 1.0 and not rel_close(beta, 1.0):
        c_star = critical_constant(m, p, b, beta)
        if rel_close(alpha, thr_critical):
            if rel_close(C, c_star):
                region = Region.R2_STATIONARY
            elif C > c_star:
                region = Region.R2_EXPAND
            else:
                region = Region.R2_SHRINK
        elif alpha < thr_critical:
            region = Region.R1
        else:
            region = Region.R3
        return RegionReport(region, thresholds, c_star)

    # beta >= 1: absorption can no longer move the interface inward
    if alpha < thr_stationary and not rel_close(alpha, thr_stationary):
        return RegionReport(Region.R1, thresholds, None)
    if rel_close(beta, 1.0):
        region = Region.R4A if rel_close(alpha, thr_stationary) else Region.R4B
    elif beta < mp:
        # thr_critical is defined here since beta < mp
        if alpha > thr_critical or rel_close(alpha, thr_critical):
            region = Region.R4C
        else:
            region = Region.R4D
    else:
        region = Region.R4D
    return RegionReport(region, thresholds, None)


def _shrink_interval(params: ProblemParams, c_star: float) -> Interval:
    """Bracket for |eta|/t^exponent in the shrinking borderline case."""
    m, p, b, beta, C = params.m, params.p, params.b, params.beta, params.C
    mp = m * p
    gamma = (mp - beta) / ((1 + p) * (1 - beta))
    if p * (m + beta) > (1 + p):
        lo_mag = C ** (-(mp - beta) / (1 + p)) * (
            b * (1 - beta) * (1 - (C / c_star) ** (mp - beta))
        ) ** gamma
        hi_mag = C ** (-(mp - beta) / (1 + p)) * (b * (1 - beta)) ** gamma
        return Interval(lo_mag, hi_mag)
    cs = appendix_constants(params)
    return Interval(cs.zeta4, cs.zeta3)


def interface_law(report: RegionReport, params: ProblemParams) -> InterfaceLaw:
    """Short-time interface law for a classified parameter set."""
    m, p, b, beta, C, alpha = (
        params.m,
        params.p,
        params.b,
        params.beta,
        params.C,
        params.alpha,
    )
    mp = m * p
    region = report.region

    if region in STATIONARY_REGIONS:
        return InterfaceLaw(region, 0, None, None)

    if region in (Region.R1, Region.B0_CASE1):
        exponent = 1.0 / (1 + p - alpha * (mp - 1))
        if b == 0.0 and rel_close(alpha, p / (mp - 1)):
            pref = Exact(C ** (mp - 1) * (mp / (mp - 1)) ** p)
        else:
            pref = ProfileDetermined()
        return InterfaceLaw(region, +1, exponent, pref)

    if region in (Region.R2_EXPAND, Region.R2_SHRINK):
        exponent = (mp - beta) / ((1 + p) * (1 - beta))
        sign = +1 if region is Region.R2_EXPAND else -1
        if rel_close(p * (m + beta), 1 + p):
            speed = b * (1 - beta) * C ** (beta - 1) * (
                (C / report.c_star) ** (mp - beta) - 1.0
            )
            return InterfaceLaw(region, sign, exponent, Exact(abs(speed)))
        if region is Region.R2_SHRINK:
            return InterfaceLaw(region, sign, exponent, _shrink_interval(params, report.c_star))
        return InterfaceLaw(region, sign, exponent, ProfileDetermined())

    if region is Region.R3:
        exponent = 1.0 / (alpha * (1 - beta))
        ell = C ** (-1.0 / alpha) * (b * (1 - beta)) ** exponent
        return InterfaceLaw(region, -1, exponent, Exact(ell))

    raise AssertionError(f"unhandled region {region}")  # pragma: no cover


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-11):
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def shrink_gain(params: ProblemParams, delta):
    """Gain curve whose maximizer fixes the sharp shrinking-envelope width."""
    m, p, b, beta, C = params.m, params.p, params.b, params.beta, params.C
    mp = m * p
    c_star = critical_constant(m, p, b, beta)
    Gam = 1.0 - (C / c_star) ** ((mp - beta) / (1 + p))
    kappa = (C / c_star) ** (mp - beta)
    q = (1 + p - p * (m + beta)) / (mp - beta)
    delta = np.asarray(delta, dtype=float)
    core = 1.0 - delta * Gam
    return delta**q * (core - core ** (-p) * kappa)


def delta_star(params: ProblemParams) -> tuple[float, float]:
    """Maximizer of the shrink gain over [0, 1] and its value.

    Requires p(m+beta) < 1+p and 0 < C < C_*.  Located by a 1000-point grid
    scan followed by golden-section refinement (|delta - delta_*| <= 1e-8);
    the coarse grid guards against non-unimodality.
    """
    m, p, beta, C = params.m, params.p, params.beta, params.C
    if p * (m + beta) >= (1 + p) * (1.0 - EQ_RTOL):
        raise ValueError("need p*(m+beta) < 1+p")
    c_star = critical_constant(m, p, params.b, beta)
    if not 0.0 < C < c_star:
        raise ValueError(f"need 0 < C < C_* = {c_star}, got C = {C}")

    grid = np.linspace(0.0, 1.0, 1001)
    vals = shrink_gain(params, grid)
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, 1000)]
    fn = lambda d: float(shrink_gain(params, d))
    d_opt, g_opt = _golden_max(fn, lo, hi)
    if g_opt < vals[k]:
        d_opt, g_opt = float(grid[k]), float(vals[k])
    return d_opt, g_opt


@dataclass(frozen=True)
class ConstantSet:
    """Catalog of envelope constants; entries are None where the regime does not define them.

    The measured inputs a0 (centerline amplitude of the unit-prefactor b=0
    solution at unit time) and a1 (centerline profile amplitude in the
    borderline expanding case) are recorded alongside, as are eps and the
    free bracketing radius ell used by the shrinking-envelope pair.
    """

    a0: float | None = None
    a1: float | None = None
    eps: float | None = None
    ell: float | None = None
    c_star: float | None = None
    xi1: float | None = None
    xi2: float | None = None
    xi3: float | None = None
    xi4: float | None = None
    zeta1: float | None = None
    zeta2: float | None = None
    zeta3: float | None = None
    zeta4: float | None = None
    zeta5: float | None = None
    ell0: float | None = None
    ell1: float | None = None
    theta_star: float | None = None
    delta_star: float | None = None
    gain_at_delta_star: float | None = None
    r1: float | None = None
    r2: float | None = None
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    c4: float | None = None
    c5: float | None = None
    c6: float | None = None
    c_bar: float | None = None
    gamma_eps: float | None = None
    ell_star: float | None = None

    def present(self) -> dict:
        return {f.name: v for f in fields(self) if (v := getattr(self, f.name)) is not None}


def appendix_constants(
    params: ProblemParams,
    a0: float | None = None,
    a1: float | None = None,
    eps: float | None = None,
    ell: float | None = None,
) -> ConstantSet:
    """Evaluate every catalog constant whose parameter regime holds.

    Constants whose regime is active but whose required measured input
    (a0, a1 or eps) was not supplied are reported as None rather than raising,
    so the catalog stays usable for partial queries.
    """
    m, p, b, beta, C, alpha = (
        params.m,
        params.p,
        params.b,
        params.beta,
        params.C,
        params.alpha,
    )
    mp = m * p
    for name, v in (("a0", a0), ("a1", a1), ("eps", eps)):
        if v is not None and v <= 0.0:
            raise ValueError(f"{name} must be > 0 when given")
    out: dict = {"a0": a0, "a1": a1, "eps": eps}

    slow = mp > 1 + EQ_RTOL

    # Expanding-region profile bracket, defined for 0 < alpha < (1+p)/(mp-1).
    if slow and alpha * (mp - 1) < (1 + p) * (1 - EQ_RTOL):
        s = (p / (alpha * (mp - 1))) ** (1.0 / (1 + p))
        if alpha * (mp - 1) >= p:
            out["xi1"], out["xi2"] = s, 1.0
        else:
            out["xi1"], out["xi2"] = 1.0, s
        if a0 is not None:
            k2 = ((mp**p) * (1 + p - alpha * (mp - 1)) / (mp - 1) ** p) ** (1.0 / (1 + p))
            cc = C ** ((mp - 1) / (1 + p - alpha * (mp - 1)))
            out["xi3"] = a0 ** ((mp - 1) / (1 + p)) * k2 * cc * out["xi1"]
            out["xi4"] = a0 ** ((mp - 1) / (1 + p)) * k2 * cc * out["xi2"]
            amp = C ** ((1 + p) / (1 + p - alpha * (mp - 1))) * a0
            out["c4"] = amp * out["xi3"] ** (p / (1 - mp))
            out["c5"] = amp * out["xi4"] ** (p / (1 - mp))

    borderline = (
        0.0 < beta < 1.0
        and not rel_close(beta, 1.0)
        and b > 0.0
        and mp > beta
        and rel_close(alpha, (1 + p) / (mp - beta))
    )
    if borderline:
        c_star = critical_constant(m, p, b, beta)
        out["c_star"] = c_star
        out["r1"] = (m * (1 + p)) ** p * p * (1 + p - p * (m + beta)) / (b * (mp - beta) ** (1 + p))
        out["r2"] = (m * (1 + p)) ** p * (1 + p) * p * (m + beta - 1) / (b * (mp - beta) ** (1 + p))
        gamma = (mp - beta) / ((1 + p) * (1 - beta))
        balance = p * (m + beta) - (1 + p)

        if C > c_star and not rel_close(C, c_star):
            if a1 is not None and slow:
                common = a1 ** ((mp - 1) / (1 + p)) * (
                    1 + b * (1 - beta) * a1 ** (beta - 1)
                ) ** (-1.0 / (1 + p))
                z_narrow = common * (p * mp**p * (1 - beta)) ** (1.0 / (1 + p)) / (mp - 1)
                z_wide = common * ((m * (1 + p)) ** p * p * (m + beta) * (1 - beta)) ** (
                    1.0 / (1 + p)
                ) / (mp - beta)
                if balance > 0:
                    out["zeta1"] = z_narrow
                    out["c1"] = a1 * z_narrow ** (-p / (mp - 1))
                    out["zeta2"] = z_wide
                    out["c2"] = a1 * z_wide ** (-(1 + p) / (mp - beta))
                elif balance < 0:
                    out["zeta1"] = z_wide
                    out["c1"] = a1 * z_wide ** (-(1 + p) / (mp - beta))
                    out["zeta2"] = (a1 / c_star) ** ((mp - beta) / (1 + p))
                    out["c2"] = c_star
        elif C < c_star and not rel_close(C, c_star):
            if balance > 0:
                out["zeta1"] = -(C ** (-(mp - beta) / (1 + p))) * (b * (1 - beta)) ** gamma
            elif balance < 0:
                out["zeta2"] = -(C ** (-(mp - beta) / (1 + p))) * (
                    b * (1 - beta) * (1 - (C / c_star) ** (mp - beta))
                ) ** gamma
                ratio = (c_star / C) ** ((mp - beta) * (1 - beta) / (1 + p - p * (m + beta)))
                theta = (1 - (C / c_star) ** (mp - beta)) / (ratio - 1.0)
                out["theta_star"] = theta
                scale = (b * (1 - beta) * theta) ** gamma
                out["ell0"] = c_star ** (-(mp - beta) / (1 + p)) * ratio * scale
                out["zeta3"] = c_star ** (-(mp - beta) / (1 + p)) * (ratio - 1.0) * scale
                d_opt, g_opt = delta_star(params)
                out["delta_star"], out["gain_at_delta_star"] = d_opt, g_opt
                Gam = 1.0 - (C / c_star) ** ((mp - beta) / (1 + p))
                core = 1.0 - d_opt * Gam
                inner = core - core ** (-p) * (C / c_star) ** (mp - beta)
                out["ell1"] = C ** (-(mp - beta) / (1 + p)) * (
                    b * (1 - beta) * inner / (d_opt * Gam)
                ) ** gamma
                out["zeta4"] = d_opt * Gam * out["ell1"]
                out["c3"] = C * core ** (-(1 + p) / (mp - beta))

    if slow:
        out["c_bar"] = vanishing_front_constant(m, p)
        if eps is not None:
            out["gamma_eps"] = (
                p * (m + 1) * (m * (1 + p)) ** p * (C + eps) ** (mp - 1) / (mp - 1) ** p + eps
            )

    if 0.0 < beta < 1.0 and not rel_close(beta, 1.0) and b > 0.0:
        ell_star = C ** (-1.0 / alpha) * (b * (1 - beta)) ** (1.0 / (alpha * (1 - beta)))
        out["ell_star"] = ell_star
        shrinking = mp > beta and alpha * (mp - beta) > (1 + p) * (1 + EQ_RTOL)
        if shrinking and eps is not None:
            L = 2.0 * ell_star if ell is None else ell
            if L <= ell_star:
                raise ValueError(f"ell must exceed ell_star = {ell_star}")
            out["ell"] = L
            frac = (ell_star / L) ** (alpha * (1 - beta)) * (1 - eps)
            out["zeta5"] = frac * L
            out["c6"] = (1 - frac) ** (-alpha) * (
                C ** (1 - beta) - L ** (-alpha * (1 - beta)) * b * (1 - beta) * (1 - eps)
            ) ** (1.0 / (1 - beta))

    return ConstantSet(**out)
