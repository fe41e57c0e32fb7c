"""Waveform evaluation stack: SDR, SI-SDR, multi-scale spectral distance,
pitch estimation, pitch error, and pitch-glide measurement.

Pitch uses a deterministic YIN-style estimator (difference function with
cumulative-mean normalization, absolute threshold 0.1, parabolic lag
interpolation) rather than a learned tracker: dependency-free, testable,
and adequate for quasi-harmonic string tones.

MSS reduces each scale with the mean (not sum) of absolute differences so
values are length-independent; values are reported raw, with no dB
conversion claimed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatch,
    TooShort,
    Unvoiced,
    ZeroEstimate,
    ZeroReference,
)

SDR_CAP_DB = 300.0


@dataclass(frozen=True)
class MssConfig:
    fft_sizes: tuple[int, ...] = (1024, 512, 256)
    hop_divisor: int = 4
    lin_weight: float = 2.0
    log_weight: float = 0.5
    log_eps: float = 1e-7

    def __post_init__(self):
        for n in self.fft_sizes:
            if n & (n - 1):
                raise ValueError(f"fft size {n} is not a power of two")
        if self.lin_weight < 0 or self.log_weight < 0:
            raise ValueError("weights must be nonnegative")


@dataclass
class MetricsReport:
    """One (estimate, reference) comparison; serializes to JSON or CSV row."""

    sdr_db: float
    si_sdr_db: float
    mss: float
    pitch_err_hz: float
    est_f0_hz: float
    ref_f0_hz: float
    glide_hz: float | None = None
    id: str = ""

    CSV_HEADER = "id,sdr_db,si_sdr_db,mss,pitch_err_hz,est_f0,ref_f0,glide_hz"

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "sdr_db": self.sdr_db,
                "si_sdr_db": self.si_sdr_db,
                "mss": self.mss,
                "pitch_err_hz": self.pitch_err_hz,
                "est_f0_hz": self.est_f0_hz,
                "ref_f0_hz": self.ref_f0_hz,
                "glide_hz": self.glide_hz,
            }
        )

    def to_csv_row(self) -> str:
        glide = "" if self.glide_hz is None else f"{self.glide_hz:.6g}"
        return (
            f"{self.id},{self.sdr_db:.6g},{self.si_sdr_db:.6g},{self.mss:.6g},"
            f"{self.pitch_err_hz:.6g},{self.est_f0_hz:.6g},{self.ref_f0_hz:.6g},{glide}"
        )


def _check_pair(est, ref):
    est = np.asarray(est, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if est.shape != ref.shape:
        raise LengthMismatch(f"{est.shape} vs {ref.shape}")
    if est.size < 1:
        raise LengthMismatch("empty waveforms")
    return est, ref


def _cap_db(ratio_num, ratio_den):
    if ratio_den == 0.0:
        return SDR_CAP_DB
    val = 10.0 * math.log10(ratio_num / ratio_den)
    return max(-SDR_CAP_DB, min(SDR_CAP_DB, val))


def sdr(est, ref) -> float:
    """10 log10(||ref||^2 / ||ref - est||^2), capped at +-300 dB."""
    est, ref = _check_pair(est, ref)
    ref_e = float(ref @ ref)
    if ref_e == 0.0:
        raise ZeroReference("reference is all zeros")
    err = ref - est
    return _cap_db(ref_e, float(err @ err))


def si_sdr(est, ref) -> float:
    """Scale-invariant SDR: project est onto ref, compare to the residual."""
    est, ref = _check_pair(est, ref)
    ref_e = float(ref @ ref)
    if ref_e == 0.0:
        raise ZeroReference("reference is all zeros")
    if float(est @ est) == 0.0:
        raise ZeroEstimate("estimate is all zeros")
    s = (float(est @ ref) / ref_e) * ref
    noise = est - s
    return _cap_db(float(s @ s), float(noise @ noise))


def _hann_periodic(n):
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _stft_mag(x, nfft, hop):
    """Magnitude STFT, frames fully inside the signal, periodic Hann."""
    n_frames = 1 + (len(x) - nfft) // hop
    idx = np.arange(nfft)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx] * _hann_periodic(nfft)
    return np.abs(np.fft.rfft(frames, axis=1))


def mss(est, ref, config: MssConfig | None = None) -> float:
    """Multi-scale spectral distance between two equal-length waveforms."""
    config = config or MssConfig()
    est, ref = _check_pair(est, ref)
    if len(est) < max(config.fft_sizes):
        raise TooShort(f"need at least {max(config.fft_sizes)} samples")
    total = 0.0
    for nfft in config.fft_sizes:
        hop = nfft // config.hop_divisor
        me = _stft_mag(est, nfft, hop)
        mr = _stft_mag(ref, nfft, hop)
        total += config.lin_weight * float(np.mean(np.abs(me - mr)))
        total += config.log_weight * float(
            np.mean(np.abs(np.log(me + config.log_eps) - np.log(mr + config.log_eps)))
        )
    return total


def _yin_f0(segment, sample_rate, fmin, fmax, threshold=0.1):
    """Core YIN estimate on one analysis segment; None when unvoiced."""
    tau_min = max(2, int(sample_rate / fmax))
    tau_max = int(sample_rate / fmin)
    n = len(segment)
    if n < tau_max + tau_min:
        return None
    w = n - tau_max  # integration window
    x = np.asarray(segment, dtype=float)
    # d(tau) = e0 + e_tau - 2 C(tau) with the sums over j in [0, w)
    sq = x * x
    csum = np.concatenate(([0.0], np.cumsum(sq)))
    e0 = csum[w] - csum[0]
    taus = np.arange(1, tau_max + 1)
    e_tau = csum[taus + w] - csum[taus]
    nfft = 1
    while nfft < n + 1:
        nfft *= 2
    # C(tau) = sum_{j<w} x_j x_{j+tau}: cross-correlate the head with the
    # whole segment; zero padding to nfft >= n keeps lags < tau_max unwrapped
    spec_all = np.fft.rfft(x, nfft)
    spec_head = np.fft.rfft(x[:w], nfft)
    corr = np.fft.irfft(np.conj(spec_head) * spec_all, nfft)
    cross = corr[1 : tau_max + 1]
    d = np.maximum(e0 + e_tau - 2.0 * cross, 0.0)
    # cumulative-mean normalization
    denom = np.cumsum(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        dprime = np.where(denom > 0, d * taus / denom, 1.0)
    below = np.nonzero(dprime[tau_min - 1 :] < threshold)[0]
    if len(below) == 0:
        return None
    tau = int(below[0]) + tau_min
    # walk down to the local minimum of the dip
    while tau < tau_max and dprime[tau] < dprime[tau - 1]:
        tau += 1
    i = tau - 1  # index into dprime (tau = i+1)
    if 1 <= i <= len(dprime) - 2:
        a, b, c = dprime[i - 1], dprime[i], dprime[i + 1]
        den = a - 2.0 * b + c
        delta = 0.5 * (a - c) / den if abs(den) > 1e-30 else 0.0
        delta = max(-0.5, min(0.5, delta))
    else:
        delta = 0.0
    return sample_rate / (tau + delta)


def estimate_f0(waveform, sample_rate, fmin: float = 50.0, fmax: float = 1000.0) -> float:
    """Fundamental frequency of the steady part of a waveform.

    Skips the first 50 ms when enough signal remains, then runs the YIN
    difference-function search over lags [fs/fmax, fs/fmin] on windows of
    four fmin-periods and takes the median of the voiced estimates.  A
    single long window would smear a gliding period past the dip
    threshold; short windows track it, and the median reports the
    dominant pitch.  Raises Unvoiced when no window has a normalized dip
    below 0.1 (silence, noise) and TooShort below the 2*fs/fmin minimum
    length.
    """
    x = np.asarray(waveform, dtype=float)
    need = int(math.ceil(2.0 * sample_rate / fmin))
    if len(x) < need:
        raise TooShort(f"need {need} samples for fmin={fmin} Hz")
    skip = int(round(0.05 * sample_rate))
    if len(x) - skip < need:
        skip = len(x) - need
    seg = x[skip:]
    window = min(len(seg), 4 * int(sample_rate / fmin))
    hop = max(window // 2, 1)
    found = []
    for start in range(0, len(seg) - window + 1, hop):
        f0 = _yin_f0(seg[start : start + window], sample_rate, fmin, fmax)
        if f0 is not None:
            found.append(f0)
    if not found:
        raise Unvoiced("no periodicity above threshold")
    return float(np.median(found))


def pitch_metric(est_waveform, ref_waveform, sample_rate) -> float:
    """L1 pitch difference |f0(est) - f0(ref)| in Hz."""
    return abs(
        estimate_f0(est_waveform, sample_rate) - estimate_f0(ref_waveform, sample_rate)
    )


def pitch_glide(
    waveform,
    sample_rate,
    frame: int = 2048,
    hop: int = 512,
    fmin: float = 50.0,
    fmax: float = 1000.0,
):
    """Frame-wise f0 trajectory and onset-vs-tail glide.

    glide_hz = median(f0 of the first 5 voiced frames)
             - median(f0 of the last 10 voiced frames);
    positive for onsets sharper than the tail.  Unvoiced frames are NaN in
    the trajectory; fewer than 15 voiced frames raises Unvoiced.
    """
    x = np.asarray(waveform, dtype=float)
    if len(x) < int(0.5 * sample_rate):
        raise TooShort("need at least 0.5 s of audio")
    n_frames = 1 + (len(x) - frame) // hop
    track = np.full(n_frames, np.nan)
    for k in range(n_frames):
        f0 = _yin_f0(x[k * hop : k * hop + frame], sample_rate, fmin, fmax)
        if f0 is not None:
            track[k] = f0
    voiced = track[~np.isnan(track)]
    if len(voiced) < 15:
        raise Unvoiced(f"only {len(voiced)} voiced frames")
    glide = float(np.median(voiced[:5]) - np.median(voiced[-10:]))
    return track, glide


def evaluate(est, ref, sample_rate, entry_id: str = "") -> MetricsReport:
    """Assemble the full report for one (estimate, reference) pair."""
    try:
        _, glide = pitch_glide(est, sample_rate)
    except (Unvoiced, TooShort):
        glide = None
    return MetricsReport(
        id=entry_id,
        sdr_db=sdr(est, ref),
        si_sdr_db=si_sdr(est, ref),
        mss=mss(est, ref),
        pitch_err_hz=pitch_metric(est, ref, sample_rate),
        est_f0_hz=estimate_f0(est, sample_rate),
        ref_f0_hz=estimate_f0(ref, sample_rate),
        glide_hz=glide,
    )
