"""Render the linear modal solution u(x,t) = sum_n X_n(x) T_n(t).

T_n(t) = exp(-sigma0 t) cos(omega_n t): the frequency-independent damping
factor multiplies all modes identically.  Every sample is evaluated in
closed form from the analytic phase (no recurrence filters), so any (x, t)
point costs O(n_modes) with no state and no accumulated phase error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyModeSet, OutOfDomain
from .modal import ModeSet, shape_matrix

DEFAULT_SAMPLE_RATE = 48000
DEFAULT_N_SPATIAL = 256


@dataclass(frozen=True)
class RenderSpec:
    """What to render: pickup waveform (pickup_x set) or full field."""

    duration: float
    sample_rate: float = DEFAULT_SAMPLE_RATE
    pickup_x: float | None = None
    n_spatial: int = DEFAULT_N_SPATIAL

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.n_spatial < 2:
            raise ValueError("n_spatial must be >= 2")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate


def _amplitudes_at(mode_set: ModeSet, x: np.ndarray) -> np.ndarray:
    """Per-mode waveform weights a_n X_n(x) with fitted coefficients."""
    phi = shape_matrix(mode_set, x)
    amps = np.array([m.amplitude for m in mode_set.modes])
    return phi * amps


def point_value(mode_set: ModeSet, x: float, t) -> np.ndarray | float:
    """Displacement u(x, t) for arbitrary time(s) t; stateless evaluation."""
    if len(mode_set) == 0:
        raise EmptyModeSet("no modes to render")
    half = 0.5 * mode_set.params.length
    if x < -half or x > half:
        raise OutOfDomain(f"pickup position {x:g} outside the string")
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    weights = _amplitudes_at(mode_set, np.array([x]))[0]
    phases = np.outer(ta, mode_set.omegas)
    out = (np.cos(phases) * weights).sum(axis=1) * np.exp(-mode_set.params.sigma0 * ta)
    return float(out[0]) if np.isscalar(t) else out


def render_waveform(mode_set: ModeSet, spec: RenderSpec) -> np.ndarray:
    """Waveform at spec.pickup_x: sample i = sum_n a_n X_n(x0) e^(-s0 t) cos(w_n t)."""
    if spec.pickup_x is None:
        raise ValueError("render_waveform needs spec.pickup_x")
    return point_value(mode_set, spec.pickup_x, spec.times())


def render_field(mode_set: ModeSet, spec: RenderSpec) -> np.ndarray:
    """Full field on an n_spatial x n_samples grid over [-L/2, +L/2].

    Frame 0 is the projected reconstruction of the initial condition
    (T_n(0) = 1) and the boundary rows vanish identically.
    """
    if len(mode_set) == 0:
        raise EmptyModeSet("no modes to render")
    half = 0.5 * mode_set.params.length
    x = np.linspace(-half, half, spec.n_spatial)
    weights = _amplitudes_at(mode_set, x)  # (n_spatial, n_modes)
    t = spec.times()
    envelope = np.exp(-mode_set.params.sigma0 * t)
    oscil = np.cos(np.outer(mode_set.omegas, t)) * envelope  # (n_modes, n_time)
    return weights @ oscil
