"""Modal decomposition of the clamped damped linear stiff string.

The offline step of modal synthesis: find the wavenumber pairs (mu_n, nu_n)
allowed by the clamped boundary, attach frequencies omega_n, and fit shape
amplitudes to an initial displacement.

Mode shapes split into two parity families about x = 0:

  odd  (antisymmetric, sin/sinh branch):  nu tan(mu L/2) = mu tanh(nu L/2)
  even (symmetric,    cos/cosh branch):   mu tan(mu L/2) = -nu tanh(nu L/2)

with nu = sqrt(mu^2 + 2 l), l = gamma^2 / (2 kappa^2).  The symmetric family
contains the fundamental; roots of the two families interleave.  Root
finding scans each family's pole-free residual for sign changes at
resolution pi/(4L) and refines each bracket with a safeguarded bracketed
solver, then polishes against the raw residual at float resolution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConvergenceFailure,
    EmptyModeSet,
    IllConditioned,
    NoRoots,
    OutOfDomain,
    Overdamped,
)
from .params import StringParams

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Mode:
    """One (shape, frequency) eigenpair.

    Exactly one of c1 (odd family, sin/sinh branch) and c2 (even family,
    cos/cosh branch) is nonzero; projection rescales that coefficient.
    """

    index: int
    mu: float
    nu: float
    omega: float
    family: str  # "even" | "odd"
    c1: float = 0.0
    c2: float = 0.0

    @property
    def amplitude(self) -> float:
        return self.c1 if self.family == "odd" else self.c2


@dataclass(frozen=True)
class ModeSet:
    """Ordered modes of one string, sorted by ascending frequency."""

    params: StringParams
    modes: tuple[Mode, ...]
    nyquist_hz: float

    def __len__(self):
        return len(self.modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.omegas / (2.0 * math.pi)

    def truncated(self, n_modes: int) -> "ModeSet":
        """Keep the n_modes lowest-frequency modes."""
        return replace(self, modes=self.modes[:n_modes])

    def to_json(self) -> str:
        return json.dumps(
            {
                "params": json.loads(self.params.to_json()),
                "nyquist_hz": self.nyquist_hz,
                "mu": [m.mu for m in self.modes],
                "nu": [m.nu for m in self.modes],
                "omega": [m.omega for m in self.modes],
                "family": [m.family for m in self.modes],
                "amplitude": [m.amplitude for m in self.modes],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ModeSet":
        d = json.loads(text)
        params = StringParams(**d["params"])
        modes = []
        for i, (mu, nu, om, fam, amp) in enumerate(
            zip(d["mu"], d["nu"], d["omega"], d["family"], d["amplitude"])
        ):
            c1 = amp if fam == "odd" else 0.0
            c2 = amp if fam == "even" else 0.0
            modes.append(Mode(i + 1, mu, nu, om, fam, c1, c2))
        return cls(params=params, modes=tuple(modes), nyquist_hz=d["nyquist_hz"])


def mode_frequency(mu: float, params: StringParams) -> float:
    """Angular frequency omega = sqrt(mu^4 kappa^2 + mu^2 gamma^2 - sigma0^2).

    Raises Overdamped when the radicand is not positive; only the
    underdamped branch is modeled.
    """
    radicand = (
        mu ** 4 * params.kappa ** 2 + mu ** 2 * params.gamma ** 2 - params.sigma0 ** 2
    )
    if radicand <= 0.0:
        raise Overdamped(f"mode at mu={mu:g} is not underdamped")
    return math.sqrt(radicand)


def _nu_of(mu, params):
    # nu = sqrt(mu^2 + 2l), l = gamma^2 / (2 kappa^2)
    two_l = (params.gamma / params.kappa) ** 2
    return np.sqrt(mu * mu + two_l)


def _residual_raw(mu: float, family: str, params: StringParams) -> float:
    """Raw transcendental residual (lhs - rhs of the family equation)."""
    h = 0.5 * params.length
    nu = float(_nu_of(mu, params))
    th = math.tanh(nu * h)
    if family == "even":
        return mu * math.tan(mu * h) + nu * th
    return nu * math.tan(mu * h) - mu * th


def _family_fn(family: str, params: StringParams):
    """Pole-free form of the family equation (original multiplied by cos)."""
    h = 0.5 * params.length

    def f(mu):
        nu = _nu_of(mu, params)
        th = np.tanh(nu * h)
        if family == "even":
            return mu * np.sin(mu * h) + nu * th * np.cos(mu * h)
        return nu * np.sin(mu * h) - mu * th * np.cos(mu * h)

    return f


def _polish(mu: float, family: str, params: StringParams) -> tuple[float, float, float]:
    """Refine against the raw residual down to float resolution.

    brentq converges on the pole-free form; the raw form is much steeper
    near tan poles, so a secant step plus a search over the adjacent float
    lattice recovers the last few ulps.  Returns (mu, |residual|, floor)
    where floor is the one-ulp residual scale |g'| * spacing(mu): below
    that, float64 cannot express a better root.
    """
    up = float(np.nextafter(mu, np.inf))
    dn = float(np.nextafter(mu, -np.inf))
    g_up = _residual_raw(up, family, params)
    g_dn = _residual_raw(dn, family, params)
    slope = (g_up - g_dn) / (up - dn)
    floor = abs(slope) * float(np.spacing(mu))
    g_mu = _residual_raw(mu, family, params)
    if np.isfinite(slope) and slope != 0.0:
        step = g_mu / slope
        if abs(step) < 1e3 * np.spacing(mu):  # only trust a local correction
            mu = mu - step
    best_mu, best_r = mu, abs(_residual_raw(mu, family, params))
    for direction in (np.inf, -np.inf):
        cand = mu
        for _ in range(6):
            cand = float(np.nextafter(cand, direction))
            r = abs(_residual_raw(cand, family, params))
            if r < best_r:
                best_mu, best_r = cand, r
    return best_mu, best_r, floor


def _scan_family(family: str, params: StringParams, mu_max: float) -> list[float]:
    """Bracket roots by sign change at resolution pi/(4L), refine with brentq."""
    f = _family_fn(family, params)
    step = math.pi / (4.0 * params.length)
    grid = np.arange(1e-9 * step, mu_max + step, step)
    vals = f(grid)
    signs = np.sign(vals)
    roots = []
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        lo, hi = grid[i], grid[i + 1]
        try:
            # xtol effectively zero: iterate down to the relative-tolerance
            # floor (~4 ulps); the default xtol would stop ~1e3 ulps early
            r = brentq(f, lo, hi, xtol=5e-324, rtol=9e-16, maxiter=200)
        except (RuntimeError, ValueError) as exc:
            raise ConvergenceFailure(
                f"{family} family refinement failed in bracket [{lo:g}, {hi:g}]: {exc}"
            ) from None
        roots.append(float(r))
    return roots


def find_mode_roots(
    params: StringParams,
    max_order: int = 100,
    nyquist_hz: float = 24000.0,
) -> ModeSet:
    """Find up to max_order modes of the clamped string below the Nyquist cut.

    Both parity families are scanned and merged in ascending wavenumber.
    Each returned root satisfies its family equation with raw residual
    below 1e-10, or within a few ulp-equivalents of the float64 floor when
    the raw form is too steep for that tolerance to be expressible (deep
    small-kappa regime); anything worse raises ConvergenceFailure.  Shape
    coefficients are initialized to 1 in the family branch; use
    project_initial_condition to fit amplitudes.
    """
    if params.kappa <= 0:
        raise ValueError("find_mode_roots requires kappa > 0")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")

    # ideal-string spacing is pi/L; scan enough to cover max_order roots,
    # growing the window until the count or the Nyquist cut is reached
    mu_max = (max_order + 2) * math.pi / params.length
    for _ in range(8):
        roots = [(mu, "even") for mu in _scan_family("even", params, mu_max)]
        roots += [(mu, "odd") for mu in _scan_family("odd", params, mu_max)]
        roots.sort()
        if len(roots) >= max_order:
            break
        if roots and mode_frequency(roots[-1][0], params) / (2 * math.pi) >= nyquist_hz:
            break
        mu_max *= 1.6
    modes = []
    for mu, fam in roots:
        mu, res, floor = _polish(mu, fam, params)
        if res > max(RESIDUAL_TOL, 4.0 * floor):
            raise ConvergenceFailure(
                f"{fam} root near mu={mu:g} stalled at residual {res:.3e}"
                f" (float64 floor {floor:.3e})"
            )
        omega = mode_frequency(mu, params)
        if omega / (2.0 * math.pi) >= nyquist_hz:
            break
        n = len(modes) + 1
        c1, c2 = (1.0, 0.0) if fam == "odd" else (0.0, 1.0)
        modes.append(Mode(n, mu, float(_nu_of(mu, params)), omega, fam, c1, c2))
        if len(modes) >= max_order:
            break
    if not modes:
        raise NoRoots(f"no mode below {nyquist_hz} Hz")
    return ModeSet(params=params, modes=tuple(modes), nyquist_hz=nyquist_hz)


def _shape_components(mu, nu, family, x, length):
    """Stable evaluation of the clamped shape for one (mu, nu) pair.

    The hyperbolic ratios sinh(nu x)/sinh(nu L/2) and cosh(nu x)/cosh(nu L/2)
    are computed through scaled exponentials: the exponent nu(|x| - L/2) is
    never positive, so nothing overflows even for nu in the 1e5 range.
    """
    h = 0.5 * length
    ax = np.abs(x)
    s = np.sign(x)
    expo = np.exp(nu * (ax - h))
    if family == "odd":
        ratio = s * expo * (1.0 - np.exp(-2.0 * nu * ax)) / (1.0 - math.exp(-2.0 * nu * h))
        return np.sin(mu * x) - math.sin(mu * h) * ratio
    ratio = expo * (1.0 + np.exp(-2.0 * nu * ax)) / (1.0 + math.exp(-2.0 * nu * h))
    return np.cos(mu * x) - math.cos(mu * h) * ratio


def mode_shape(mode: Mode, x, params: StringParams):
    """Evaluate the mode shape X_n at position(s) x in [-L/2, +L/2]."""
    xa = np.asarray(x, dtype=float)
    half = 0.5 * params.length
    if np.any(xa < -half - 1e-12 * params.length) or np.any(xa > half + 1e-12 * params.length):
        raise OutOfDomain(f"position outside [-{half:g}, +{half:g}]")
    base = _shape_components(mode.mu, mode.nu, mode.family, xa, params.length)
    coeff = mode.c1 if mode.family == "odd" else mode.c2
    out = coeff * base
    return float(out) if np.isscalar(x) else out


def shape_matrix(mode_set: ModeSet, x: np.ndarray) -> np.ndarray:
    """Unit-coefficient shapes as columns: Phi[i, n] = X_n(x_i) with c = 1."""
    cols = [
        _shape_components(m.mu, m.nu, m.family, x, mode_set.params.length)
        for m in mode_set.modes
    ]
    return np.stack(cols, axis=1)


def project_initial_condition(u0: np.ndarray, mode_set: ModeSet) -> ModeSet:
    """Least-squares fit of the mode shapes to an initial displacement.

    u0 must be sampled on the uniform grid over [-L/2, +L/2] (inclusive).
    The grid-sampled shapes are only approximately orthogonal (root
    tolerance and sampling both break exactness), so a least-squares solve
    absorbs the cross terms.  Returns a new ModeSet whose c coefficients
    carry the fitted amplitudes.
    """
    if len(mode_set) == 0:
        raise EmptyModeSet("cannot project onto an empty mode set")
    u0 = np.asarray(u0, dtype=float)
    half = 0.5 * mode_set.params.length
    x = np.linspace(-half, half, len(u0))
    phi = shape_matrix(mode_set, x)
    sv = np.linalg.svd(phi, compute_uv=False)
    gram_cond = (sv[0] / sv[-1]) ** 2 if sv[-1] > 0 else np.inf
    if gram_cond > 1e12:
        raise IllConditioned(f"shape Gram matrix condition number {gram_cond:.3e}")
    amps, *_ = np.linalg.lstsq(phi, u0, rcond=None)
    modes = []
    for m, a in zip(mode_set.modes, amps):
        c1 = a * 1.0 if m.family == "odd" else 0.0
        c2 = a * 1.0 if m.family == "even" else 0.0
        modes.append(replace(m, c1=float(c1), c2=float(c2)))
    return replace(mode_set, modes=tuple(modes))
