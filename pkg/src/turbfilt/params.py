"""Problem parameters for u_t = (|(u^m)_x|^{p-1}(u^m)_x)_x - b u^beta."""
from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance for resolving equality against regime thresholds.
EQ_RTOL = 1e-12


def rel_close(a: float, b: float, rtol: float = EQ_RTOL) -> bool:
    """True when a and b agree to within `rtol` relative (or both are 0)."""
    return abs(a - b) <= rtol * max(abs(a), abs(b))


@dataclass(frozen=True)
class ProblemParams:
    """Nonlinearity exponents and initial-front data.

    m, p are the diffusion exponents; b >= 0 and beta > 0 control absorption;
    the initial datum behaves like C*(-x)_+^alpha near its front at x = 0.
    """

    m: float
    p: float
    b: float
    beta: float
    C: float
    alpha: float

    def __post_init__(self):
        for name in ("m", "p", "beta", "C", "alpha"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise ValueError(f"b must be finite and >= 0, got {self.b}")
        # Slow diffusion. The boundary m*p == 1 is admitted (it is exercised
        # by standard benchmark parameter sets); anything below is rejected.
        if self.m * self.p < 1.0 - EQ_RTOL:
            raise ValueError(f"need m*p >= 1, got m*p = {self.m * self.p}")

    @property
    def mp(self) -> float:
        return self.m * self.p
