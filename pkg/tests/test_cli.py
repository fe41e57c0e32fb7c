import json

import numpy as np
import pytest

from stringlab import mss, sdr, si_sdr
from stringlab.cli import main
from stringlab.io import read_wav, write_wav

FS = 48000


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_silent_pluck(capsys, tmp_path):
    code, out, _ = run(
        capsys, "simulate", "--pa", 0, "--duration", 0.05, "--out", tmp_path, "--json"
    )
    assert code == 0
    summary = json.loads(out)
    rate, data = read_wav(tmp_path / "pickup_0.25.wav")
    assert rate == FS
    assert not data.any()
    assert summary["nx"] >= 8


def test_simulate_rejects_bad_alpha(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--alpha", 0.5, "--out", tmp_path)
    assert code == 1
    assert "alpha" in err


def test_simulate_json_error_path_is_valid_json(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--alpha", 0.5, "--out", tmp_path, "--json")
    assert code == 1
    payload = json.loads(out)
    assert payload["error"] == "ValueError"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--no-such-flag"])
    assert exc.value.code == 2


def test_modal_cache_hit_and_small_stiffness_f1(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = [
        "modal", "--f0", 220, "--kappa-rel", 0.001, "--duration", 0.05,
        "--out", tmp_path, "--cache", cache, "--json",
    ]
    code, out, _ = run(capsys, *args)
    assert code == 0
    first = json.loads(out)
    assert first["cache_hit"] is False
    assert first["n_modes"] == 40  # default mode count
    f1 = first["modes"][0]["f_hz"]
    assert abs(f1 - 220.0) / 220.0 < 0.01
    code, out, _ = run(capsys, *args)
    second = json.loads(out)
    assert second["cache_hit"] is True
    assert second["modes"][0]["f_hz"] == f1


def test_modal_warns_on_alpha(capsys, tmp_path):
    code, _, err = run(
        capsys, "modal", "--alpha", 5, "--duration", 0.05, "--out", tmp_path, "--json"
    )
    assert code == 0
    assert "ignoring --alpha" in err


def test_compare_self_and_csv(capsys, tmp_path):
    t = np.arange(int(0.4 * FS)) / FS
    wav = tmp_path / "a.wav"
    write_wav(wav, 0.01 * np.sin(2 * np.pi * 220 * t), FS)
    code, out, _ = run(capsys, "compare", wav, wav, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["sdr_db"] == 300.0
    assert rep["si_sdr_db"] == 300.0
    assert rep["mss"] == 0.0
    assert rep["pitch_err_hz"] == 0.0

    code, out, _ = run(capsys, "compare", wav, wav, "--csv", "--id", "x9")
    lines = out.strip().splitlines()
    assert lines[0] == "id,sdr_db,si_sdr_db,mss,pitch_err_hz,est_f0,ref_f0,glide_hz"
    assert lines[1].startswith("x9,300,300,0,0,")


def test_compare_is_a_thin_wrapper(capsys, tmp_path):
    rng = np.random.default_rng(0)
    t = np.arange(int(0.4 * FS)) / FS
    ref = (0.01 * np.sin(2 * np.pi * 220 * t)).astype(np.float32)
    est = (ref + 2e-4 * rng.standard_normal(ref.size)).astype(np.float32)
    pe, pr = tmp_path / "e.wav", tmp_path / "r.wav"
    write_wav(pe, est, FS)
    write_wav(pr, ref, FS)
    code, out, _ = run(capsys, "compare", pe, pr, "--json")
    rep = json.loads(out)
    e64, r64 = est.astype(float), ref.astype(float)
    assert rep["sdr_db"] == pytest.approx(sdr(e64, r64), abs=1e-12)
    assert rep["si_sdr_db"] == pytest.approx(si_sdr(e64, r64), abs=1e-12)
    assert rep["mss"] == pytest.approx(mss(e64, r64), abs=1e-12)


def test_compare_length_mismatch_and_truncate(capsys, tmp_path):
    t = np.arange(int(0.4 * FS)) / FS
    a, b = tmp_path / "a.wav", tmp_path / "b.wav"
    write_wav(a, 0.01 * np.sin(2 * np.pi * 220 * t), FS)
    write_wav(b, 0.01 * np.sin(2 * np.pi * 220 * t)[:-100], FS)
    code, _, err = run(capsys, "compare", a, b)
    assert code == 1
    code, out, _ = run(capsys, "compare", a, b, "--truncate", "--json")
    assert code == 0
    assert json.loads(out)["pitch_err_hz"] == 0.0


def test_analyze_tone_and_spectrogram(capsys, tmp_path):
    t = np.arange(FS) / FS
    wav = tmp_path / "a.wav"
    write_wav(wav, 0.01 * np.sin(2 * np.pi * 220 * t), FS)
    spec_csv = tmp_path / "spec.csv"
    f0_csv = tmp_path / "f0.csv"
    code, out, _ = run(
        capsys, "analyze", wav, "--json", "--fft", 1024, "--hop", 256,
        "--spectrogram", spec_csv, "--f0-csv", f0_csv,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["f0_hz"] == pytest.approx(220.0, abs=0.5)
    n_frames = 1 + (FS - 1024) // 256
    assert summary["spectrogram_frames"] == n_frames
    assert summary["spectrogram_bins"] == 1024 // 2 + 1
    rows = spec_csv.read_text().strip().splitlines()
    assert len(rows) == 1024 // 2 + 1
    assert len(rows[0].split(",")) == n_frames
    assert len(f0_csv.read_text().strip().splitlines()) >= 15


def test_analyze_silence_exits_one(capsys, tmp_path):
    wav = tmp_path / "s.wav"
    write_wav(wav, np.zeros(FS), FS)
    code, _, err = run(capsys, "analyze", wav)
    assert code == 1
    assert "Unvoiced" in err


def test_dataset_cli_layout(capsys, tmp_path):
    out = tmp_path / "ds"
    code, stdout, _ = run(
        capsys, "dataset", "--count", 2, "--pickups", 3, "--duration", 0.15,
        "--seed", 1, "--out", out, "--jobs", 1, "--json",
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["count"] == 2
    assert len(list(out.glob("*/pickup_*.wav"))) == 6
    assert len(list(out.glob("*/meta.json"))) == 2
    assert (out / "manifest.json").exists()


def test_cli_glide_end_to_end(capsys, tmp_path):
    # same pluck, linear vs nonlinear: only the nonlinear run glides
    common = [
        "--f0", 98, "--kappa-rel", 0.01, "--pa", 0.02, "--px", 0.28,
        "--duration", 0.7, "--sigma0", 1.0, "--sigma1", 1e-4,
        "--pickup", 0.25, "--json",
    ]
    code, _, _ = run(capsys, "simulate", "--alpha", 1, "--out", tmp_path / "lin", *common)
    assert code == 0
    code, _, _ = run(capsys, "simulate", "--alpha", 14, "--out", tmp_path / "non", *common)
    assert code == 0
    from stringlab import pitch_glide

    _, lin = read_wav(tmp_path / "lin" / "pickup_0.25.wav")
    _, non = read_wav(tmp_path / "non" / "pickup_0.25.wav")
    _, glide_lin = pitch_glide(lin.astype(float), FS)
    _, glide_non = pitch_glide(non.astype(float), FS)
    assert abs(glide_lin) < 1.0
    assert glide_non > 1.0


def test_modal_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("STRINGLAB_CACHE_DIR", str(tmp_path / "envcache"))
    args = ["modal", "--duration", "0.05", "--out", str(tmp_path), "--json"]
    code, out, _ = run(capsys, *args)
    assert code == 0 and json.loads(out)["cache_hit"] is False
    code, out, _ = run(capsys, *args)
    assert code == 0 and json.loads(out)["cache_hit"] is True
    assert list((tmp_path / "envcache").glob("modes_*.json"))


def test_store_field_and_csv(capsys, tmp_path):
    code, out, _ = run(
        capsys, "simulate", "--duration", 0.02, "--out", tmp_path,
        "--store-field", "--field-csv", "--store-zeta", "--alpha", 3, "--json",
    )
    assert code == 0
    from stringlab.io import read_field

    u, header = read_field(tmp_path / "field.f64")
    z, _ = read_field(tmp_path / "zeta.f64")
    assert u.shape == z.shape
    assert header["rows"] == u.shape[0]
    csv_rows = (tmp_path / "field.csv").read_text().strip().splitlines()
    assert len(csv_rows) == u.shape[0]
