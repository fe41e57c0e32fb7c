"""Dataset protocol: draw string parameters, simulate, resample the field to
a fixed 256-point spatial grid, persist WAV audio plus JSON metadata.

Sampling is counter-based (one independent Philox stream per (seed, index))
so entries can be generated in any order or in parallel and always
reproduce.  Draws whose decay-time spec implies negative damping are
rejected and redrawn; everything that reaches disk is dissipative.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import Blowup, NegativeDamping, RejectionExhausted, Underresolved
from .fdtd import FieldTrajectory, SimGrid, simulate
from .io import write_field, write_wav
from .params import (
    PluckProfile,
    StringParams,
    T60Spec,
    damping_from_t60,
    gamma_from_f0,
)

TARGET_NX = 256
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class SampleRanges:
    """Uniform sampling bounds for the string corpus.

    f2's upper bound is tied to the drawn f1 (f1 - 1000), keeping the two
    probe frequencies well separated.
    """

    f0: tuple = (98.0, 440.0)
    kappa_rel: tuple = (0.01, 0.03)
    alpha: tuple = (1.0, 25.0)
    t1: tuple = (10.0, 25.0)
    t2: tuple = (10.0, 30.0)
    f1: tuple = (1100.0, 1200.0)
    f2_low: float = 100.0
    f2_gap: float = 1000.0
    pa: tuple = (0.001, 0.02)
    px: tuple = (0.1, 0.5)


@dataclass
class DatasetEntry:
    """Manifest record for one generated string."""

    id: str
    index: int
    status: str  # "ok" | "failed"
    params: StringParams | None = None
    pluck: PluckProfile | None = None
    t60: T60Spec | None = None
    f0_hz: float | None = None
    audio_paths: dict = field(default_factory=dict)
    field_path: str | None = None
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "index": self.index,
            "status": self.status,
            "params": asdict(self.params) if self.params else None,
            "pluck": asdict(self.pluck) if self.pluck else None,
            "t60": asdict(self.t60) if self.t60 else None,
            "f0_hz": self.f0_hz,
            "audio_paths": self.audio_paths,
            "field_path": self.field_path,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetEntry":
        return cls(
            id=d["id"],
            index=d["index"],
            status=d["status"],
            params=StringParams(**d["params"]) if d.get("params") else None,
            pluck=PluckProfile(**d["pluck"]) if d.get("pluck") else None,
            t60=T60Spec(**d["t60"]) if d.get("t60") else None,
            f0_hz=d.get("f0_hz"),
            audio_paths=d.get("audio_paths", {}),
            field_path=d.get("field_path"),
            error=d.get("error", ""),
        )


def entry_id(seed: int, index: int) -> str:
    """Stable short id for one (seed, index) pair."""
    return hashlib.sha1(f"{seed}:{index}".encode()).hexdigest()[:12]


def sample_params(
    seed: int, index: int, ranges: SampleRanges | None = None
) -> tuple[StringParams, PluckProfile, T60Spec]:
    """Deterministic parameter draw for one dataset entry.

    Each (seed, index) keys its own Philox counter stream.  A draw whose
    decay-time spec yields negative damping is discarded and redrawn in
    full; after 1000 rejections RejectionExhausted is raised.
    """
    ranges = ranges or SampleRanges()
    rng = np.random.Generator(np.random.Philox(key=np.random.SeedSequence([seed, index]).generate_state(2, np.uint64)))
    for _ in range(MAX_REJECTIONS):
        f0 = rng.uniform(*ranges.f0)
        kappa_rel = rng.uniform(*ranges.kappa_rel)
        alpha = rng.uniform(*ranges.alpha)
        t1 = rng.uniform(*ranges.t1)
        t2 = rng.uniform(*ranges.t2)
        f1 = rng.uniform(*ranges.f1)
        f2 = rng.uniform(ranges.f2_low, f1 - ranges.f2_gap)
        pa = rng.uniform(*ranges.pa)
        px = rng.uniform(*ranges.px)
        gamma = gamma_from_f0(f0)
        kappa = kappa_rel * gamma
        spec = T60Spec(f1=f1, f2=f2, t1=t1, t2=t2)
        try:
            sigma0, sigma1 = damping_from_t60(spec, gamma, kappa)
        except NegativeDamping:
            continue
        params = StringParams(
            gamma=gamma, kappa=kappa, alpha=alpha, sigma0=sigma0, sigma1=sigma1
        )
        pluck = PluckProfile(px=px, pa=pa)
        return params, pluck, spec
    raise RejectionExhausted(f"no admissible draw for seed={seed} index={index}")


def resample_space(field: FieldTrajectory, target_nx: int = TARGET_NX) -> FieldTrajectory:
    """Per-frame cubic-spline resampling onto target_nx uniform points.

    End conditions are clamped (zero value comes from the data, zero slope
    is imposed), matching the physics at the boundary.  The temporal axis is
    untouched: it is already at the audio rate.
    """
    g = field.grid
    if g.nx < 4:
        raise Underresolved(f"only {g.nx} intervals to resample from")
    x_src = field.positions()
    half = 0.5 * g.length
    x_new = np.linspace(-half, half, target_nx)
    zero_slope = np.zeros(field.u.shape[1])
    spline = CubicSpline(
        x_src, field.u, axis=0, bc_type=((1, zero_slope), (1, zero_slope))
    )
    u_new = spline(x_new)
    zeta_new = None
    if field.zeta is not None:
        # zeta has pinned ends but free slope; natural ends fit that better
        zspline = CubicSpline(x_src, field.zeta, axis=0, bc_type="natural")
        zeta_new = zspline(x_new)
    new_grid = SimGrid(
        nx=target_nx - 1,
        dx=g.length / (target_nx - 1),
        dt=g.dt,
        nt=g.nt,
        n_substeps=g.n_substeps,
        length=g.length,
    )
    return FieldTrajectory(
        u=u_new,
        grid=new_grid,
        params=field.params,
        pluck=field.pluck,
        zeta=zeta_new,
        zeta_tail=field.zeta_tail,
    )


def pickup_columns(n_pickups: int, target_nx: int = TARGET_NX) -> list[int]:
    """Evenly spread interior column indices for a pickup count."""
    pts = np.linspace(0, target_nx - 1, n_pickups + 2)[1:-1]
    return [int(round(p)) for p in pts]


def _generate_one(
    seed, index, out_dir, pickups, sample_rate, duration, ranges, store_field, oversample
) -> DatasetEntry:
    eid = entry_id(seed, index)
    edir = Path(out_dir) / eid
    params, pluck, t60 = sample_params(seed, index, ranges)
    f0 = params.gamma / (2.0 * params.length)
    entry = DatasetEntry(
        id=eid, index=index, status="ok", params=params, pluck=pluck, t60=t60, f0_hz=f0
    )
    try:
        traj = simulate(
            params, pluck, sample_rate=sample_rate, duration=duration, oversample=oversample
        )
    except (Blowup, Underresolved) as exc:
        entry.status = "failed"
        entry.error = f"{type(exc).__name__}: {exc}"
        return entry
    res = resample_space(traj)
    edir.mkdir(parents=True, exist_ok=True)
    half = 0.5 * params.length
    for k in pickups:
        wav_path = edir / f"pickup_{k}.wav"
        write_wav(wav_path, res.u[k], int(sample_rate))
        entry.audio_paths[str(k)] = str(wav_path.relative_to(out_dir))
    if store_field:
        fpath = edir / "field.f64"
        write_field(fpath, res.u, dt=res.grid.dt, x0=-half, dx=res.grid.dx)
        entry.field_path = str(fpath.relative_to(out_dir))
    meta = entry.to_dict()
    (edir / "meta.json").write_text(json.dumps(meta, indent=2))
    return entry


def generate(
    seed: int,
    count: int,
    out_dir,
    pickups=8,
    sample_rate: float = 48000.0,
    duration: float = 1.0,
    ranges: SampleRanges | None = None,
    store_field: bool = False,
    oversample: int = 1,
    jobs: int = 1,
) -> list[DatasetEntry]:
    """Generate `count` entries under out_dir and write the manifest.

    pickups is a pickup count (spread evenly over the interior of the
    256-point grid), the string "all" for every column, or an explicit
    list of column indices.  Generation is resumable: entries whose
    meta.json already exists are loaded back instead of recomputed, so a
    rerun with the same seed adds no files.  Failed simulations are
    recorded in the manifest with status "failed" and generation
    continues.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if pickups == "all":
        cols = list(range(TARGET_NX))
    elif isinstance(pickups, int):
        cols = pickup_columns(pickups)
    else:
        cols = [int(k) for k in pickups]
    for k in cols:
        if not (0 <= k < TARGET_NX):
            raise ValueError(f"pickup column {k} outside [0, {TARGET_NX})")

    todo = []
    entries: dict[int, DatasetEntry] = {}
    for index in range(count):
        eid = entry_id(seed, index)
        meta_path = out_dir / eid / "meta.json"
        if meta_path.exists():
            entries[index] = DatasetEntry.from_dict(json.loads(meta_path.read_text()))
        else:
            todo.append(index)

    if jobs > 1 and len(todo) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {
                pool.submit(
                    _generate_one,
                    seed,
                    index,
                    out_dir,
                    cols,
                    sample_rate,
                    duration,
                    ranges,
                    store_field,
                    oversample,
                ): index
                for index in todo
            }
            for fut in concurrent.futures.as_completed(futs):
                entries[futs[fut]] = fut.result()
    else:
        for index in todo:
            entries[index] = _generate_one(
                seed, index, out_dir, cols, sample_rate, duration, ranges,
                store_field, oversample,
            )

    ordered = [entries[i] for i in sorted(entries)]
    manifest = {
        "seed": seed,
        "count": count,
        "sample_rate": sample_rate,
        "duration": duration,
        "pickups": cols,
        "entries": [e.to_dict() for e in ordered],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return ordered
