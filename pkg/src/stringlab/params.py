"""Domain types for string physics and pluck initial conditions.

The string lives on the centered domain [-L/2, +L/2] and is described in the
scaled coefficient form: wave speed gamma (1/s), stiffness kappa (1/s),
tension ratio alpha (dimensionless, >= 1), frequency-independent damping
sigma0 (1/s) and frequency-dependent damping sigma1.  Dimensional material
constants (density, Young's modulus, tension, ...) are deliberately not
exposed; everything downstream consumes the scaled form.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateSpec, InvalidProfile, NegativeDamping

LOG10 = math.log(10.0)


@dataclass(frozen=True)
class StringParams:
    """Physical coefficients of one string.

    The underdamping admissibility check uses the ideal-string lower bound
    mu1 >= pi/L for the first wavenumber, so a params object that validates
    here is guaranteed to produce a real first mode frequency.
    """

    gamma: float
    kappa: float
    alpha: float = 1.0
    sigma0: float = 0.0
    sigma1: float = 0.0
    length: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.sigma0 < 0 or self.sigma1 < 0:
            raise ValueError("damping coefficients must be nonnegative")
        if not (self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")
        mu1 = math.pi / self.length  # lower bound for the first wavenumber
        if self.sigma0 ** 2 >= mu1 ** 4 * self.kappa ** 2 + mu1 ** 2 * self.gamma ** 2:
            raise ValueError(
                "sigma0 too large: first mode would not be underdamped"
            )

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "StringParams":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class T60Spec:
    """Two decay-time probes (f1, t1) and (f2, t2) used to calibrate damping.

    t_i is the time for a component at probe frequency f_i to decay by the
    T60 convention used throughout: amplitude factor exp(-sigma * t) reaching
    1e-6.  Whether that is an amplitude or energy convention is ambiguous in
    the source material; the formulas here are applied as written.
    """

    f1: float
    f2: float
    t1: float
    t2: float

    def __post_init__(self):
        if self.f1 <= 0 or self.f2 <= 0:
            raise ValueError("probe frequencies must be positive")
        if self.f1 == self.f2:
            raise ValueError("probe frequencies must differ")
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("decay times must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "T60Spec":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class PluckProfile:
    """Parametric initial displacement: position px (fraction of length in
    (0,1)), peak amplitude pa, and shape.

    The raised-cosine default is C1 everywhere, so its zero boundary slope is
    compatible with the clamped condition; the triangular tent is kept for
    comparison but carries a slope discontinuity.
    """

    px: float
    pa: float
    shape: str = "raised-cosine"
    width: float | None = None

    def __post_init__(self):
        if not (0.0 < self.px < 1.0):
            raise ValueError(f"px must lie in (0,1), got {self.px}")
        if self.pa < 0:
            raise ValueError(f"pa must be nonnegative, got {self.pa}")
        if self.shape not in ("raised-cosine", "triangular"):
            raise ValueError(f"unknown pluck shape {self.shape!r}")
        if self.width is not None and self.width <= 0:
            raise ValueError("width must be positive when given")

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "PluckProfile":
        return cls(**json.loads(text))


def gamma_from_f0(f0: float, length: float = 1.0) -> float:
    """Map a fundamental frequency to the wave-speed coefficient.

    Uses the ideal-string relation f0 = gamma / (2 L).  With stiffness the
    realized fundamental comes out slightly sharp of f0 (inharmonicity);
    that sharpening is accepted and measured, not corrected.
    """
    if f0 <= 0:
        raise ValueError(f"f0 must be positive, got {f0}")
    return 2.0 * length * f0


def damping_from_t60(spec: T60Spec, gamma: float, kappa: float) -> tuple[float, float]:
    """Derive (sigma0, sigma1) from two decay-time probes.

    sigma0 = 6 ln10 / (xi1 - xi2) * (xi1/t2 - xi2/t1)
    sigma1 = 6 ln10 / (xi1 - xi2) * (1/t1 - 1/t2)
    xi_i   = -gamma^2 + sqrt(gamma^4 + 4 kappa^2 (2 pi f_i)^2)

    Specs producing a negative coefficient are rejected rather than clamped,
    so the simulated system is always dissipative.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")

    def xi(f):
        w = 2.0 * math.pi * f
        return -gamma ** 2 + math.sqrt(gamma ** 4 + 4.0 * kappa ** 2 * w ** 2)

    xi1, xi2 = xi(spec.f1), xi(spec.f2)
    if xi1 == xi2:
        raise DegenerateSpec(
            f"xi collapses (xi1 = xi2 = {xi1:g}); kappa = 0 or equal probes"
        )
    a = 6.0 * LOG10 / (xi1 - xi2)
    sigma0 = a * (xi1 / spec.t2 - xi2 / spec.t1)
    sigma1 = a * (1.0 / spec.t1 - 1.0 / spec.t2)
    if sigma0 < 0 or sigma1 < 0:
        raise NegativeDamping(
            f"spec implies sigma0={sigma0:g}, sigma1={sigma1:g}"
        )
    return sigma0, sigma1


def decay_xi(f: float, gamma: float, kappa: float) -> float:
    """The xi term of the decay-time formulas at probe frequency f."""
    w = 2.0 * math.pi * f
    return -gamma ** 2 + math.sqrt(gamma ** 4 + 4.0 * kappa ** 2 * w ** 2)


def make_pluck(profile: PluckProfile, n_points: int, length: float = 1.0) -> np.ndarray:
    """Sample the pluck displacement on a uniform grid over [-L/2, +L/2].

    Raised cosine: u0(x) = (pa/2) (1 + cos(pi (x - xp)/w)) for |x - xp| <= w,
    zero elsewhere, with xp = -L/2 + px L.  The default half-width is the
    distance from xp to the nearer boundary, so the support just reaches it
    with value zero.  Triangular: tent with apex pa at xp; by default the
    tent spans the whole string (the classic pluck), an explicit width gives
    a symmetric tent instead.

    The apex is snapped to the nearest grid node (at most half a cell away)
    so the discrete maximum equals pa exactly.  Raises InvalidProfile if an
    explicit width pushes nonzero displacement onto a boundary.
    """
    if n_points < 8:
        raise ValueError(f"n_points must be >= 8, got {n_points}")
    half = 0.5 * length
    x = np.linspace(-half, half, n_points)
    j = int(np.argmin(np.abs(x - (-half + profile.px * length))))
    j = min(max(j, 1), n_points - 2)  # apex must stay interior
    xp = float(x[j])
    u = np.zeros(n_points)
    if profile.pa == 0.0:
        return u

    if profile.shape == "raised-cosine":
        w = profile.width * length if profile.width is not None else min(xp + half, half - xp)
        if xp - w < -half - 1e-15 or xp + w > half + 1e-15:
            # support sticks out: value at the boundary would be nonzero
            raise InvalidProfile(
                f"raised-cosine support [{xp - w:g}, {xp + w:g}] exceeds the domain"
            )
        inside = np.abs(x - xp) <= w
        u[inside] = 0.5 * profile.pa * (1.0 + np.cos(np.pi * (x[inside] - xp) / w))
    else:  # triangular
        if profile.width is None:
            wl, wr = xp + half, half - xp
        else:
            wl = wr = profile.width * length
            if xp - wl < -half - 1e-15 or xp + wr > half + 1e-15:
                raise InvalidProfile(
                    f"tent support [{xp - wl:g}, {xp + wr:g}] exceeds the domain"
                )
        left = (x >= xp - wl) & (x <= xp)
        right = (x > xp) & (x <= xp + wr)
        u[left] = profile.pa * (1.0 - (xp - x[left]) / wl)
        u[right] = profile.pa * (1.0 - (x[right] - xp) / wr)

    u[0] = 0.0
    u[-1] = 0.0
    return u
