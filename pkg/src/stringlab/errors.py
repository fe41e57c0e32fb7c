"""Exception hierarchy for the toolkit.

Every domain failure derives from :class:`StringlabError` so callers (and the
CLI) can distinguish physics/usage problems from programming errors.
"""


class StringlabError(Exception):
    """Base class for all toolkit errors."""


# ---- parameter / calibration errors

class NegativeDamping(StringlabError):
    """Decay-time spec yields a negative damping coefficient."""


class DegenerateSpec(StringlabError):
    """Decay-time spec is degenerate (equal probe terms, e.g. kappa = 0)."""


class InvalidProfile(StringlabError):
    """Pluck profile is inconsistent with the clamped boundary."""


# ---- modal decomposition errors

class NoRoots(StringlabError):
    """No transcendental root below the Nyquist limit."""


class ConvergenceFailure(StringlabError):
    """Root refinement stalled; carries the offending bracket."""


class Overdamped(StringlabError):
    """Mode radicand non-positive; only underdamped strings are modeled."""


class OutOfDomain(StringlabError):
    """Position outside [-L/2, +L/2]."""


class IllConditioned(StringlabError):
    """Shape Gram matrix condition number too large for projection."""


class EmptyModeSet(StringlabError):
    """Rendering requested from a mode set with no modes."""


# ---- FDTD errors

class Underresolved(StringlabError):
    """Stable spatial grid has fewer than 8 intervals."""


class Blowup(StringlabError):
    """Simulation produced non-finite or runaway values."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"simulation blew up at step {step}")


# ---- metrics errors

class LengthMismatch(StringlabError):
    """Waveform pair has different lengths."""


class ZeroReference(StringlabError):
    """Reference waveform is identically zero."""


class ZeroEstimate(StringlabError):
    """Estimate waveform is identically zero."""


class TooShort(StringlabError):
    """Waveform shorter than the analysis requires."""


class Unvoiced(StringlabError):
    """No periodicity found by the pitch estimator."""


# ---- dataset errors

class RejectionExhausted(StringlabError):
    """Parameter rejection sampling failed 1000 times in a row."""
