"""Closed-form solutions and envelope bounds used as solver oracles.

Every evaluator returns exactly 0 outside the spatial support (positive-part
brackets are hard max(., 0), no smoothing) and is vectorized over x and t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classification import ConstantSet, critical_constant, vanishing_front_constant
from .params import ProblemParams, rel_close

POINT_SOURCE = "point_source"
TRAVELING_WAVE = "traveling_wave"
LINEAR_FRONT = "linear_front"
SEPARABLE_BETA1 = "separable_beta1"
SEPARABLE_BLOWUP = "separable_blowup"
REACTION_LIMIT = "reaction_limit"

EXPLICIT_KINDS = (TRAVELING_WAVE, LINEAR_FRONT, SEPARABLE_BETA1, SEPARABLE_BLOWUP)


def _pos(x):
    return np.maximum(x, 0.0)


# -- instantaneous point-source solution --------------------------------------

def ips_coefficient(m: float, p: float) -> float:
    return (m * p - 1) / (m * (1 + p)) * (1.0 / (p * (m + 1))) ** (1.0 / p)


def ips_eval(m: float, p: float, gamma: float, x, t):
    """Source-type solution with mass constant gamma, b = 0."""
    if m * p <= 1.0:
        raise ValueError("need m*p > 1")
    if gamma <= 0.0:
        raise ValueError("need gamma > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("need t > 0")
    a = 1.0 / (p * (m + 1))
    z = np.abs(np.asarray(x, dtype=float)) * t ** (-a)
    bracket = gamma - ips_coefficient(m, p) * z ** ((1 + p) / p)
    return t ** (-a) * _pos(bracket) ** (p / (m * p - 1))


def ips_interface(m: float, p: float, gamma: float, t):
    """Right support endpoint of the point-source solution."""
    if m * p <= 1.0 or gamma <= 0.0:
        raise ValueError("need m*p > 1 and gamma > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("need t > 0")
    return t ** (1.0 / (p * (m + 1))) * (gamma / ips_coefficient(m, p)) ** (p / (p + 1))


# -- explicit solutions for power-law initial data -----------------------------

def traveling_wave_speed(params: ProblemParams) -> float:
    """Signed front speed of the exact traveling wave (p(m+beta) = 1+p)."""
    m, p, b, beta, C = params.m, params.p, params.b, params.beta, params.C
    c_star = critical_constant(m, p, b, beta)
    return b * (1 - beta) * C ** (beta - 1) * ((C / c_star) ** (m * p - beta) - 1.0)


def linear_front_speed(params: ProblemParams) -> float:
    """Front speed of the explicit b = 0 solution at the linear-front steepness."""
    mp = params.m * params.p
    return params.C ** (mp - 1) * (mp / (mp - 1)) ** params.p


def blowup_constants(params: ProblemParams) -> tuple[float, float]:
    """Separable-solution rate and blow-up time for b = 0 at critical steepness."""
    m, p, C = params.m, params.p, params.C
    mp = m * p
    lam = -(C ** (mp - 1)) * p * (m + 1) * (m * (1 + p)) ** p / (mp - 1) ** (1 + p)
    return lam, 1.0 / (lam * (1 - mp))


def beta1_horizon(params: ProblemParams) -> float:
    """Existence time of the separable beta = 1 solution (inf when global)."""
    m, p, b, C = params.m, params.p, params.b, params.C
    mp = m * p
    q = (C / vanishing_front_constant(m, p)) ** (mp - 1)
    if b >= q:
        return math.inf
    return math.log(1.0 - b / q) / (b * (1 - mp))


def _check_regime(kind: str, params: ProblemParams):
    m, p, b, beta, alpha = params.m, params.p, params.b, params.beta, params.alpha
    mp = m * p
    if kind == TRAVELING_WAVE:
        ok = (
            rel_close(p * (m + beta), 1 + p)
            and 0 < beta < 1
            and b > 0
            and mp > beta
            and rel_close(alpha, (1 + p) / (mp - beta))
        )
    elif kind == LINEAR_FRONT:
        ok = b == 0.0 and mp > 1 and rel_close(alpha, p / (mp - 1))
    elif kind == SEPARABLE_BETA1:
        ok = rel_close(beta, 1.0) and b > 0 and mp > 1 and rel_close(alpha, (1 + p) / (mp - 1))
    elif kind == SEPARABLE_BLOWUP:
        ok = b == 0.0 and mp > 1 and rel_close(alpha, (1 + p) / (mp - 1))
    else:
        raise ValueError(f"unknown explicit kind {kind!r}")
    if not ok:
        raise ValueError(f"parameters violate the regime of {kind!r}")


def explicit_eval(kind: str, params: ProblemParams, x, t):
    """Pointwise value of one of the closed-form solutions."""
    _check_regime(kind, params)
    m, p, b, beta, C = params.m, params.p, params.b, params.beta, params.C
    mp = m * p
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)

    if kind == TRAVELING_WAVE:
        speed = traveling_wave_speed(params)
        return C * _pos(speed * t - x) ** ((1 + p) / (mp - beta))

    if kind == LINEAR_FRONT:
        speed = linear_front_speed(params)
        return C * _pos(speed * t - x) ** (p / (mp - 1))

    if kind == SEPARABLE_BETA1:
        horizon = beta1_horizon(params)
        if np.any(t >= horizon):
            raise ValueError(f"t beyond blow-up time {horizon}")
        q = (C / vanishing_front_constant(m, p)) ** (mp - 1)
        factor = np.exp(-b * t) * (
            1.0 - q / b * (1.0 - np.exp(-b * (mp - 1) * t))
        ) ** (1.0 / (1 - mp))
        return C * _pos(-x) ** ((1 + p) / (mp - 1)) * factor

    # separable blow-up, b = 0
    lam, t_star = blowup_constants(params)
    if np.any(t >= t_star):
        raise ValueError(f"t beyond blow-up time {t_star}")
    factor = (lam * (t_star - t) * (1 - mp)) ** (1.0 / (1 - mp))
    return C * _pos(-x) ** ((1 + p) / (mp - 1)) * factor


def reaction_limit_eval(params: ProblemParams, x, t):
    """Absorption-dominated local solution for steep data, 0 < beta < 1."""
    beta, C, alpha, b = params.beta, params.C, params.alpha, params.b
    if not 0.0 < beta < 1.0:
        raise ValueError("need 0 < beta < 1")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    inner = C ** (1 - beta) * _pos(-x) ** (alpha * (1 - beta)) - b * (1 - beta) * t
    return _pos(inner) ** (1.0 / (1 - beta))


def power_datum_residual(params: ProblemParams, x):
    """Residual L[u0] of the pure power datum, in closed form (x < 0).

    L[u] = u_t - (|(u^m)_x|^{p-1}(u^m)_x)_x + b*u^beta; the datum is
    time-independent so only the last two terms contribute.
    """
    m, p, b, beta, C, alpha = (
        params.m,
        params.p,
        params.b,
        params.beta,
        params.C,
        params.alpha,
    )
    x = np.asarray(x, dtype=float)
    if np.any(x >= 0.0):
        raise ValueError("residual defined for x < 0")
    am = alpha * m
    diffusion = C ** (m * p) * am**p * (am - 1) * p * (-x) ** ((am - 1) * p - 1)
    return -diffusion + b * C**beta * (-x) ** (alpha * beta)


@dataclass(frozen=True)
class AnalyticSolution:
    """A closed-form solution tagged with its validity horizon."""

    kind: str
    params: ProblemParams
    gamma: float | None = None

    @property
    def t_max(self) -> float:
        if self.kind == SEPARABLE_BETA1:
            return beta1_horizon(self.params)
        if self.kind == SEPARABLE_BLOWUP:
            return blowup_constants(self.params)[1]
        return math.inf

    def eval(self, x, t):
        if self.kind == POINT_SOURCE:
            return ips_eval(self.params.m, self.params.p, self.gamma, x, t)
        if self.kind == REACTION_LIMIT:
            return reaction_limit_eval(self.params, x, t)
        return explicit_eval(self.kind, self.params, x, t)

    def interface(self, t):
        if self.kind == POINT_SOURCE:
            return ips_interface(self.params.m, self.params.p, self.gamma, t)
        if self.kind == TRAVELING_WAVE:
            return traveling_wave_speed(self.params) * np.asarray(t, dtype=float)
        if self.kind == LINEAR_FRONT:
            return linear_front_speed(self.params) * np.asarray(t, dtype=float)
        if self.kind in (SEPARABLE_BETA1, SEPARABLE_BLOWUP):
            return np.zeros_like(np.asarray(t, dtype=float))
        raise ValueError(f"no explicit interface for {self.kind!r}")


# -- envelope bounds -----------------------------------------------------------

CRITICAL_EXPANDING = "critical_expanding"
CRITICAL_SHRINKING_WIDE = "critical_shrinking_wide"
CRITICAL_SHRINKING_SHARP = "critical_shrinking_sharp"
CRITICAL_SHRINKING_ROUGH = "critical_shrinking_rough"
WAITING_BETA1 = "waiting_beta1"
WAITING_SUPERLINEAR = "waiting_superlinear"
WAITING_CRITICAL = "waiting_critical"
WAITING_GENERIC = "waiting_generic"
EXPANDING_B0 = "expanding_b0"
STATIONARY_B0 = "stationary_b0"

ENVELOPE_TAGS = (
    CRITICAL_EXPANDING,
    CRITICAL_SHRINKING_WIDE,
    CRITICAL_SHRINKING_SHARP,
    CRITICAL_SHRINKING_ROUGH,
    WAITING_BETA1,
    WAITING_SUPERLINEAR,
    WAITING_CRITICAL,
    WAITING_GENERIC,
    EXPANDING_B0,
    STATIONARY_B0,
)


def _need(constants: ConstantSet, *names):
    vals = []
    for name in names:
        v = getattr(constants, name)
        if v is None:
            raise ValueError(f"envelope needs constant {name!r}, absent from the set")
        vals.append(v)
    return vals


def envelope_eval(
    tag: str,
    params: ProblemParams,
    constants: ConstantSet | None,
    x,
    t,
    eps: float | None = None,
):
    """Evaluate the (lower, upper) bound pair of the tagged envelope.

    Where a one-sided validity window applies, points outside it are NaN.
    The waiting-time envelopes take the perturbation size eps explicitly; the
    caller is responsible for restricting to the near-front window in which
    they hold.
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
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)

    if tag == CRITICAL_EXPANDING:
        z1, z2, c1, c2 = _need(constants, "zeta1", "zeta2", "c1", "c2")
        mu = p / (mp - 1) if p * (m + beta) > 1 + p else (1 + p) / (mp - beta)
        gamma = (mp - beta) / ((1 + p) * (1 - beta))
        zeta = x * t ** (-gamma)
        amp = t ** (1.0 / (1 - beta))
        lower = c1 * amp * _pos(z1 - zeta) ** mu
        upper = c2 * amp * _pos(z2 - zeta) ** mu
        invalid = x < 0
        return _mask(lower, invalid), _mask(upper, invalid)

    if tag == CRITICAL_SHRINKING_WIDE:
        if p * (m + beta) <= 1 + p:
            raise ValueError("wide shrinking bound needs p(m+beta) > 1+p")
        base = C ** (1 - beta) * _pos(-x) ** ((1 + p) * (1 - beta) / (mp - beta))
        c_star = critical_constant(m, p, b, beta)
        lower = _pos(base - b * (1 - beta) * t) ** (1.0 / (1 - beta))
        upper = _pos(base - b * (1 - beta) * (1 - (C / c_star) ** (mp - beta)) * t) ** (
            1.0 / (1 - beta)
        )
        return lower, upper

    if tag == CRITICAL_SHRINKING_ROUGH:
        if p * (m + beta) >= 1 + p:
            raise ValueError("rough shrinking bound needs p(m+beta) < 1+p")
        c_star = critical_constant(m, p, b, beta)
        base = C ** (1 - beta) * _pos(-x) ** ((1 + p) * (1 - beta) / (mp - beta))
        lower = _pos(base - b * (1 - beta) * (1 - (C / c_star) ** (mp - beta)) * t) ** (
            1.0 / (1 - beta)
        )
        upper = C * _pos(-x) ** ((1 + p) / (mp - beta))
        return lower, upper

    if tag == CRITICAL_SHRINKING_SHARP:
        z3, z4, l0, l1, c3 = _need(constants, "zeta3", "zeta4", "ell0", "ell1", "c3")
        c_star = critical_constant(m, p, b, beta)
        gamma = (mp - beta) / ((1 + p) * (1 - beta))
        tg = t**gamma
        mu = (1 + p) / (mp - beta)
        lower = c_star * _pos(-z3 * tg - x) ** mu
        upper = c3 * _pos(-z4 * tg - x) ** mu
        return _mask(lower, x < -l0 * tg), _mask(upper, x < -l1 * tg)

    if tag == WAITING_BETA1:
        if eps is None:
            raise ValueError("eps required")
        decay = np.exp(-b * t)
        lower = (C - eps) * _pos(-x) ** alpha * decay
        upper = (
            (C + eps)
            * _pos(-x) ** alpha
            * decay
            * (1.0 - eps / (b * (mp - 1)) * (1.0 - np.exp(-b * (mp - 1) * t)))
            ** (1.0 / (1 - mp))
        )
        return lower, upper

    if tag == WAITING_SUPERLINEAR:
        if eps is None:
            raise ValueError("eps required")

        def g(sgn):
            Ce = C + sgn * eps
            # the absorption discount kappa enters only at critical steepness
            crit = rel_close(alpha, (1 + p) / (mp - beta))
            kap = ((Ce / critical_constant(m, p, b, beta)) ** (mp - beta)) if crit else 0.0
            inner = Ce ** (1 - beta) * np.abs(x) ** (alpha * (1 - beta)) + b * (beta - 1) * (
                1 - sgn * eps - kap
            ) * t
            vals = _pos(inner) ** (1.0 / (1 - beta))
            return np.where(x < 0, vals, 0.0)

        return g(-1.0), g(+1.0)

    if tag == WAITING_CRITICAL:
        if eps is None:
            raise ValueError("eps required")
        base = _pos(-x) ** ((1 + p) / (mp - 1))

        def gam(sgn):
            return (
                p * (m + 1) * (m * (1 + p)) ** p * (C + sgn * eps) ** (mp - 1) / (mp - 1) ** p
                + sgn * eps
            )

        lower = (C - eps) * base * _pos(1.0 - gam(-1.0) * t) ** (1.0 / (1 - mp))
        upper = (C + eps) * base * _pos(1.0 - gam(+1.0) * t) ** (1.0 / (1 - mp))
        return lower, upper

    if tag in (WAITING_GENERIC, STATIONARY_B0):
        if eps is None:
            raise ValueError("eps required")
        base = _pos(-x) ** alpha
        lower = (C - eps) * base
        upper = (C + eps) * base * _pos(1.0 - eps * t) ** (1.0 / (1 - mp))
        return lower, upper

    if tag == EXPANDING_B0:
        x3, x4, c4, c5 = _need(constants, "xi3", "xi4", "c4", "c5")
        a = alpha / (1 + p - alpha * (mp - 1))
        cexp = 1.0 / (1 + p - alpha * (mp - 1))
        xi = x * t ** (-cexp)
        amp = t**a
        mu = p / (mp - 1)
        lower = c4 * amp * _pos(x3 - xi) ** mu
        upper = c5 * amp * _pos(x4 - xi) ** mu
        invalid = x < 0
        return _mask(lower, invalid), _mask(upper, invalid)

    raise ValueError(f"unknown envelope tag {tag!r}")


def _mask(values, invalid):
    values = np.asarray(values, dtype=float)
    if np.isscalar(invalid) or invalid.shape == ():
        return np.where(invalid, np.nan, values)
    out = values.copy()
    out[invalid] = np.nan
    return out
