"""Command-line front end: simulate, modal, compare, dataset, analyze.

Every subcommand is a thin shell over the library; results printed here are
the library's results unchanged.  Exit codes: 0 success, 1 domain error
(physics/validation/format), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import generate
from .errors import LengthMismatch, StringlabError
from .fdtd import discrete_energy, pickup, simulate
from .io import FormatError, read_wav, write_csv, write_field, write_field_csv, write_wav
from .metrics import _stft_mag, estimate_f0, evaluate, pitch_glide
from .modal import ModeSet, find_mode_roots, project_initial_condition
from .params import (
    PluckProfile,
    StringParams,
    T60Spec,
    damping_from_t60,
    gamma_from_f0,
    make_pluck,
)
from .synth import RenderSpec, render_field, render_waveform

DEFAULT_MODES = 40


def _parse_t60(text: str) -> T60Spec:
    try:
        (f1, t1), (f2, t2) = (pair.split(":") for pair in text.split(","))
        return T60Spec(f1=float(f1), f2=float(f2), t1=float(t1), t2=float(t2))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(
            "expected --t60 f1:t1,f2:t2 (e.g. 1150:15,150:25)"
        )


def _parse_pickups(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected --pickup x0[,x1,...]")


def _build_params(args) -> StringParams:
    gamma = gamma_from_f0(args.f0)
    kappa = args.kappa_rel * gamma
    if args.t60 is not None:
        sigma0, sigma1 = damping_from_t60(args.t60, gamma, kappa)
    else:
        sigma0, sigma1 = args.sigma0, args.sigma1
    return StringParams(
        gamma=gamma,
        kappa=kappa,
        alpha=args.alpha,
        sigma0=sigma0,
        sigma1=sigma1,
    )


def _emit(args, summary: dict):
    if args.json:
        print(json.dumps(summary))
    else:
        for key, val in summary.items():
            print(f"{key}: {val}")


def cmd_simulate(args) -> int:
    params = _build_params(args)
    pluck = PluckProfile(px=args.px, pa=args.pa, shape=args.shape)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    traj = simulate(
        params,
        pluck,
        sample_rate=args.sample_rate,
        duration=args.duration,
        oversample=args.oversample,
        store_zeta=args.store_zeta,
    )
    runtime = time.time() - t0
    paths = []
    for x0 in args.pickup:
        wav = out / f"pickup_{x0:g}.wav"
        write_wav(wav, pickup(traj, x0), int(args.sample_rate))
        paths.append(str(wav))
    if args.store_field:
        fpath = out / "field.f64"
        write_field(
            fpath, traj.u, dt=traj.grid.dt, x0=-0.5 * params.length, dx=traj.grid.dx
        )
        paths.append(str(fpath))
        if args.field_csv:
            cpath = out / "field.csv"
            write_field_csv(cpath, traj.u)
            paths.append(str(cpath))
        if args.store_zeta and traj.zeta is not None:
            zpath = out / "zeta.f64"
            write_field(
                zpath, traj.zeta, dt=traj.grid.dt, x0=-0.5 * params.length, dx=traj.grid.dx
            )
            paths.append(str(zpath))
    e_first = discrete_energy(traj, 1)
    e_last = discrete_energy(traj, traj.grid.nt - 1)
    summary = {
        "gamma": params.gamma,
        "kappa": params.kappa,
        "alpha": params.alpha,
        "sigma0": params.sigma0,
        "sigma1": params.sigma1,
        "nx": traj.grid.nx,
        "dx": traj.grid.dx,
        "n_substeps": traj.grid.n_substeps,
        "nt": traj.grid.nt,
        "runtime_s": round(runtime, 3),
        "energy_first": e_first,
        "energy_last": e_last,
        "energy_drift": (e_last - e_first) / e_first if e_first else 0.0,
        "files": paths,
    }
    _emit(args, summary)
    return 0


def _cache_key(params: StringParams, max_order: int, nyquist_hz: float) -> str:
    blob = json.dumps(
        [params.gamma, params.kappa, params.sigma0, params.length, max_order, nyquist_hz]
    )
    return hashlib.sha1(blob.encode()).hexdigest()[:16]


def cmd_modal(args) -> int:
    if args.alpha != 1.0:
        print("warning: modal synthesis is linear; ignoring --alpha", file=sys.stderr)
        args.alpha = 1.0
    params = _build_params(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    nyquist = 0.5 * args.sample_rate

    cache_dir = args.cache or os.environ.get("STRINGLAB_CACHE_DIR")
    cache_path = None
    cache_hit = False
    mode_set = None
    if cache_dir:
        cache_path = Path(cache_dir) / f"modes_{_cache_key(params, args.max_order, nyquist)}.json"
        if cache_path.exists():
            mode_set = ModeSet.from_json(cache_path.read_text())
            cache_hit = True
    t0 = time.time()
    if mode_set is None:
        mode_set = find_mode_roots(params, max_order=args.max_order, nyquist_hz=nyquist)
        if cache_path is not None:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            cache_path.write_text(mode_set.to_json())
    decomp_time = time.time() - t0

    u0 = make_pluck(PluckProfile(px=args.px, pa=args.pa, shape=args.shape), args.n_spatial)
    fitted = project_initial_condition(u0, mode_set).truncated(args.modes)

    paths = []
    for x0 in args.pickup:
        spec = RenderSpec(
            duration=args.duration, sample_rate=args.sample_rate, pickup_x=x0,
            n_spatial=args.n_spatial,
        )
        wav = out / f"modal_{x0:g}.wav"
        write_wav(wav, render_waveform(fitted, spec), int(args.sample_rate))
        paths.append(str(wav))
    if args.store_field:
        spec = RenderSpec(
            duration=args.duration, sample_rate=args.sample_rate, n_spatial=args.n_spatial
        )
        fpath = out / "modal_field.f64"
        field = render_field(fitted, spec)
        write_field(
            fpath, field, dt=1.0 / args.sample_rate, x0=-0.5 * params.length,
            dx=params.length / (args.n_spatial - 1),
        )
        paths.append(str(fpath))
        if args.field_csv:
            cpath = out / "modal_field.csv"
            write_field_csv(cpath, field)
            paths.append(str(cpath))

    table = [
        {"n": m.index, "f_hz": m.omega / (2.0 * np.pi), "amplitude": m.amplitude}
        for m in fitted.modes
    ]
    summary = {
        "n_modes": len(fitted),
        "cache_hit": cache_hit,
        "decomp_time_s": round(decomp_time, 3),
        "modes": table,
        "files": paths,
    }
    if args.json:
        print(json.dumps(summary))
    else:
        print(f"modes: {len(fitted)}  cache_hit: {cache_hit}")
        print(f"{'n':>4} {'f (Hz)':>12} {'amplitude':>14}")
        for row in table:
            print(f"{row['n']:>4} {row['f_hz']:>12.4f} {row['amplitude']:>14.6g}")
        for p in paths:
            print(p)
    return 0


def cmd_compare(args) -> int:
    fs_e, est = read_wav(args.estimate)
    fs_r, ref = read_wav(args.reference)
    if fs_e != fs_r:
        raise FormatError(f"sample rates differ: {fs_e} vs {fs_r}")
    if len(est) != len(ref):
        if not args.truncate:
            raise LengthMismatch(f"{len(est)} vs {len(ref)} (use --truncate)")
        n = min(len(est), len(ref))
        est, ref = est[:n], ref[:n]
    report = evaluate(est.astype(float), ref.astype(float), fs_e, entry_id=args.id)
    if args.csv:
        print(report.CSV_HEADER)
        print(report.to_csv_row())
    elif args.json:
        print(report.to_json())
    else:
        print(f"SDR     : {report.sdr_db:.3f} dB")
        print(f"SI-SDR  : {report.si_sdr_db:.3f} dB")
        print(f"MSS     : {report.mss:.6g}")
        print(f"Pitch   : {report.pitch_err_hz:.3f} Hz "
              f"(est {report.est_f0_hz:.2f}, ref {report.ref_f0_hz:.2f})")
        if report.glide_hz is not None:
            print(f"Glide   : {report.glide_hz:+.3f} Hz")
    return 0


def cmd_dataset(args) -> int:
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    entries = generate(
        seed=args.seed,
        count=args.count,
        out_dir=args.out,
        pickups=args.pickups,
        sample_rate=args.sample_rate,
        duration=args.duration,
        store_field=args.store_field,
        oversample=args.oversample,
        jobs=jobs,
    )
    ok = sum(1 for e in entries if e.status == "ok")
    summary = {
        "count": len(entries),
        "ok": ok,
        "failed": len(entries) - ok,
        "out_dir": str(args.out),
        "manifest": str(Path(args.out) / "manifest.json"),
    }
    _emit(args, summary)
    return 0


def cmd_analyze(args) -> int:
    fs, wave = read_wav(args.wav)
    wave = wave.astype(float)
    f0 = estimate_f0(wave, fs)  # Unvoiced on silence -> exit 1
    try:
        track, glide = pitch_glide(wave, fs, frame=args.fft, hop=args.hop)
    except StringlabError:
        track, glide = np.array([]), None
    summary = {"sample_rate": fs, "n_samples": len(wave), "f0_hz": f0, "glide_hz": glide}
    outputs = []
    if args.f0_csv:
        rows = (
            f"{k * args.hop / fs:.6f},{'' if np.isnan(v) else f'{v:.4f}'}"
            for k, v in enumerate(track)
        )
        write_csv(args.f0_csv, "time_s,f0_hz", rows)
        outputs.append(args.f0_csv)
    if args.spectrogram:
        mag = _stft_mag(wave, args.fft, args.hop).T  # (bins, frames)
        write_field_csv(args.spectrogram, mag)
        outputs.append(args.spectrogram)
        summary["spectrogram_bins"] = mag.shape[0]
        summary["spectrogram_frames"] = mag.shape[1]
    if outputs:
        summary["files"] = outputs
    _emit(args, summary)
    return 0


def _add_physics_flags(sp, alpha_default=1.0):
    sp.add_argument("--f0", type=float, default=220.0, help="fundamental (Hz); gamma = 2 L f0")
    sp.add_argument("--kappa-rel", type=float, default=0.02, help="stiffness as a fraction of gamma")
    sp.add_argument("--alpha", type=float, default=alpha_default, help="tension ratio (>= 1)")
    sp.add_argument("--t60", type=_parse_t60, default=None, help="damping probes f1:t1,f2:t2")
    sp.add_argument("--sigma0", type=float, default=1.0, help="direct sigma0 (ignored with --t60)")
    sp.add_argument("--sigma1", type=float, default=0.0, help="direct sigma1 (ignored with --t60)")
    sp.add_argument("--px", type=float, default=0.28, help="pluck position fraction")
    sp.add_argument("--pa", type=float, default=0.01, help="pluck amplitude")
    sp.add_argument("--shape", choices=("raised-cosine", "triangular"), default="raised-cosine")
    sp.add_argument("--pickup", type=_parse_pickups, default=[0.25], help="pickup x0[,x1,...]")
    sp.add_argument("--store-field", action="store_true")
    sp.add_argument("--field-csv", action="store_true", help="also dump the field as CSV")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stringlab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"stringlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out")
    common.add_argument("--sample-rate", type=float, default=48000.0)
    common.add_argument("--duration", type=float, default=1.0)
    common.add_argument("--json", action="store_true", help="machine-readable stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", parents=[common], help="run the FDTD solver")
    _add_physics_flags(sp)
    sp.add_argument("--store-zeta", action="store_true", help="retain the longitudinal field")
    sp.add_argument("--oversample", type=int, default=1, help="internal refinement factor")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("modal", parents=[common], help="render the linear modal solution")
    _add_physics_flags(sp)
    sp.add_argument("--modes", type=int, default=DEFAULT_MODES, help="modes used for rendering")
    sp.add_argument("--max-order", type=int, default=100, help="roots computed before truncation")
    sp.add_argument("--n-spatial", type=int, default=256)
    sp.add_argument("--cache", default=None, help="decomposition cache dir (or STRINGLAB_CACHE_DIR)")
    sp.set_defaults(fn=cmd_modal)

    sp = sub.add_parser("compare", parents=[common], help="metrics for an (estimate, reference) pair")
    sp.add_argument("estimate")
    sp.add_argument("reference")
    sp.add_argument("--truncate", action="store_true", help="compare the common prefix")
    sp.add_argument("--csv", action="store_true", help="emit one CSV row")
    sp.add_argument("--id", default="", help="id column for CSV output")
    sp.set_defaults(fn=cmd_compare)

    sp = sub.add_parser("dataset", parents=[common], help="generate a dataset")
    sp.add_argument("--count", type=int, default=32)
    sp.add_argument(
        "--pickups", type=lambda s: s if s == "all" else int(s), default=8,
        help="pickup positions per string (count, or 'all' for every column)",
    )
    sp.add_argument("--jobs", type=int, default=0, help="worker processes (0 = logical cores)")
    sp.add_argument("--store-field", action="store_true")
    sp.add_argument("--oversample", type=int, default=1)
    sp.set_defaults(fn=cmd_dataset)

    sp = sub.add_parser("analyze", parents=[common], help="pitch and spectrum of a WAV")
    sp.add_argument("wav")
    sp.add_argument("--fft", type=int, default=2048)
    sp.add_argument("--hop", type=int, default=512)
    sp.add_argument("--f0-csv", default=None, help="write frame-wise f0 CSV")
    sp.add_argument("--spectrogram", default=None, help="write magnitude CSV (frames x bins)")
    sp.set_defaults(fn=cmd_analyze)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StringlabError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(args, "json", False):
            print(json.dumps(payload))
        print(f"error: {payload['error']}: {payload['message']}", file=sys.stderr)
        return 1
    except ValueError as exc:
        if getattr(args, "json", False):
            print(json.dumps({"error": "ValueError", "message": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
