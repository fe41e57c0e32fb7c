"""Physical modeling toolkit for plucked nonlinear stiff strings.

Closed-form modal solution of the damped linear stiff string, an explicit
FDTD solver for the coupled transverse/longitudinal nonlinear system,
decay-time damping calibration, dataset generation, and waveform
evaluation metrics.
"""

from . import errors
from .params import (
    PluckProfile,
    StringParams,
    T60Spec,
    damping_from_t60,
    decay_xi,
    gamma_from_f0,
    make_pluck,
)
from .modal import (
    Mode,
    ModeSet,
    find_mode_roots,
    mode_frequency,
    mode_shape,
    project_initial_condition,
    shape_matrix,
)
from .synth import RenderSpec, point_value, render_field, render_waveform
from .fdtd import (
    FieldTrajectory,
    SimGrid,
    discrete_energy,
    pickup,
    pluck_peak_slope,
    simulate,
    stable_grid,
)
from .metrics import (
    MetricsReport,
    MssConfig,
    estimate_f0,
    evaluate,
    mss,
    pitch_glide,
    pitch_metric,
    sdr,
    si_sdr,
)
from .dataset import (
    DatasetEntry,
    SampleRanges,
    entry_id,
    generate,
    pickup_columns,
    resample_space,
    sample_params,
)
from .io import read_field, read_wav, write_field, write_wav

__version__ = "0.1.0"

__all__ = [
    "errors",
    "StringParams",
    "T60Spec",
    "PluckProfile",
    "damping_from_t60",
    "decay_xi",
    "gamma_from_f0",
    "make_pluck",
    "Mode",
    "ModeSet",
    "find_mode_roots",
    "mode_frequency",
    "mode_shape",
    "project_initial_condition",
    "shape_matrix",
    "RenderSpec",
    "render_waveform",
    "render_field",
    "point_value",
    "SimGrid",
    "FieldTrajectory",
    "stable_grid",
    "simulate",
    "pickup",
    "pluck_peak_slope",
    "discrete_energy",
    "MssConfig",
    "MetricsReport",
    "sdr",
    "si_sdr",
    "mss",
    "estimate_f0",
    "pitch_metric",
    "pitch_glide",
    "evaluate",
    "SampleRanges",
    "DatasetEntry",
    "sample_params",
    "resample_space",
    "generate",
    "entry_id",
    "pickup_columns",
    "read_wav",
    "write_wav",
    "read_field",
    "write_field",
]
