import json
import subprocess
import sys

import numpy as np
import pytest

from scatter_imaging import cli, persist, spectral_probe
from scatter_imaging import specfun

J01 = specfun.bessel_j_zeros(0, 1)[0]
J11 = specfun.bessel_j_zeros(1, 1)[0]

SMALL = {
    "shape": {"name": "disk", "R": 1.0},
    "data": {"M": 24, "N": 24, "k_min": 2.0, "k_max": 4.0, "n_k": 81, "exact_disk": True},
    "probe": {"z": [0.2, 0.1]},
    "modes": {"method": "FTLS", "refine": True},
    "imaging": {"nx": 41, "ny": 41, "L": 2, "offset": 0.15},
    "oracle": {"n_k": 201, "n_quad": 32},
}


def write_cfg(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def pipeline(capsys, cfg_path, out):
    summaries = {}
    for cmd in ("forward", "sweep", "modes", "image", "oracle"):
        code, stdout, err = run(capsys, cmd, "--config", cfg_path, "--out", str(out))
        assert code == 0, err
        summaries[cmd] = json.loads(stdout)
        assert summaries[cmd]["status"] == "ok"
    return summaries


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    cfg = write_cfg(base / "cfg.json", SMALL)
    out = base / "out"
    for cmd in ("forward", "sweep", "modes", "image", "oracle"):
        assert cli.main([cmd, "--config", cfg, "--out", str(out)]) == 0
    return cfg, out


def test_pipeline_outputs(small_run):
    _, out = small_run
    for name in ("dataset/manifest.json", "sweep.csv", "peaks.json", "sweep.png", "kernels/kernel_00.json",
                 "indicator.csv", "indicator.pgm", "indicator.png", "oracle.json"):
        assert (out / name).exists(), name
    peaks = [p.k for p in persist.read_peaks(out / "peaks.json")]
    for e in (J01, J11):
        assert min(abs(e - k) for k in peaks) <= 0.025 + 1e-9
    oracle = json.loads((out / "oracle.json").read_text())
    assert np.allclose(oracle, spectral_probe.disk_eigenvalues(1.0, 2.0, 4.0), atol=1e-3)
    image = json.loads((out / "image_manifest.json").read_text())
    assert image["contrast"]["overall"] > 0
    assert image["contrast"]["concave_arcs"] == []


def test_modes_records_grid_gap(small_run):
    _, out = small_run
    man = json.loads((out / "modes_manifest.json").read_text())
    for rec in man["kernels"]:
        # refine searches one grid step either side of the detected peak
        assert abs(rec["k_gap"]) <= 0.025 + 1e-12
        assert rec["k"] == pytest.approx(rec["k_detected"] + rec["k_gap"])
        kern = persist.read_kernel(out / rec["file"])
        assert kern.l2_norm() == pytest.approx(1.0, abs=1e-12)


def test_config_echoed_in_every_manifest(small_run):
    _, out = small_run
    for cmd in ("forward", "sweep", "modes", "image", "oracle"):
        man = json.loads((out / f"{cmd}_manifest.json").read_text())
        assert man["config"] == SMALL
        assert man["resolved_config"]["data"]["M"] == 24
    assert json.loads((out / "dataset" / "manifest.json").read_text())["config"] == SMALL


def test_rerun_is_byte_identical(small_run, tmp_path, capsys):
    cfg, out = small_run
    before = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    pipeline(capsys, cfg, out)
    after = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    assert before.keys() == after.keys()
    changed = [str(p.relative_to(out)) for p in before if before[p] != after[p]]
    assert changed == []


def test_noisy_forward_is_deterministic(tmp_path, capsys):
    obj = dict(SMALL, data=dict(SMALL["data"], n_k=3, delta=0.05, seed=4))
    cfg = write_cfg(tmp_path / "c.json", obj)
    for out in ("a", "b"):
        assert run(capsys, "forward", "--config", cfg, "--out", str(tmp_path / out))[0] == 0
    for name in ("manifest.json", "ff_0000.csv", "ff_0002.csv"):
        assert (tmp_path / "a/dataset" / name).read_bytes() == (tmp_path / "b/dataset" / name).read_bytes()
    ds = persist.load_dataset(tmp_path / "a/dataset")
    assert ds.meta["delta"] == 0.05 and ds.meta["seed"] == 4


def test_gtls_and_explicit_eigenvalues(small_run, tmp_path, capsys):
    _, out = small_run
    obj = dict(SMALL, modes={"method": "GTLS", "alpha": 0.0, "eigenvalues": [J01]})
    cfg = write_cfg(tmp_path / "g.json", obj)
    code, _, err = run(capsys, "modes", "--config", cfg, "--out", str(tmp_path),
                       "--dataset", str(out / "dataset"))
    assert code == 0, err
    man = json.loads((tmp_path / "modes_manifest.json").read_text())
    assert man["method"] == "GTLS" and man["alpha"] == 0.0 and len(man["kernels"]) == 1
    kern = persist.read_kernel(tmp_path / man["kernels"][0]["file"])
    assert kern.method == "GTLS" and kern.representation == "nodal"


def error_of(err):
    obj = json.loads(err.strip().splitlines()[-1])
    assert {"error", "message", "command"} <= set(obj)
    return obj


def test_error_bad_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "bad.json", {"data": {"k_min": -1.0}})
    code, out, err = run(capsys, "forward", "--config", cfg, "--out", str(tmp_path))
    assert code != 0 and out == ""
    assert error_of(err)["error"] == "ConfigError"
    cfg = write_cfg(tmp_path / "typo.json", {"data": {"kmin": 1.0}})
    code, _, err = run(capsys, "forward", "--config", cfg)
    assert code != 0 and "kmin" in error_of(err)["message"]
    (tmp_path / "broken.json").write_text("{not json")
    assert run(capsys, "oracle", "--config", str(tmp_path / "broken.json"))[0] != 0
    code, _, err = run(capsys, "oracle", "--config", str(tmp_path / "missing.json"))
    assert code != 0 and "not found" in error_of(err)["message"]


def test_error_unknown_command_and_missing_args(capsys):
    code, _, err = run(capsys, "reconstruct", "--config", "x.json")
    assert code == cli.EXIT_USAGE and error_of(err)["error"] == "UsageError"
    code, _, err = run(capsys, "forward")
    assert code == cli.EXIT_USAGE and "--config" in error_of(err)["message"]


def test_error_eigenvalue_out_of_range(small_run, tmp_path, capsys):
    _, out = small_run
    obj = dict(SMALL, modes={"eigenvalues": [5.5]})
    cfg = write_cfg(tmp_path / "r.json", obj)
    code, _, err = run(capsys, "modes", "--config", cfg, "--out", str(tmp_path), "--dataset", str(out / "dataset"))
    assert code != 0 and "outside the dataset range" in error_of(err)["message"]


def test_error_missing_peaks_and_kernels(small_run, tmp_path, capsys):
    cfg, out = small_run
    code, _, err = run(capsys, "modes", "--config", cfg, "--out", str(tmp_path), "--dataset", str(out / "dataset"))
    assert code != 0 and "peaks" in error_of(err)["message"]
    code, _, err = run(capsys, "image", "--config", cfg, "--out", str(tmp_path))
    assert code != 0 and "kernel" in error_of(err)["message"]
    code, _, err = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path))
    assert code != 0 and error_of(err)["command"] == "sweep"


def test_image_L_exceeding_kernels(small_run, tmp_path, capsys):
    _, out = small_run
    obj = dict(SMALL, imaging=dict(SMALL["imaging"], L=50))
    cfg = write_cfg(tmp_path / "l.json", obj)
    code, _, err = run(capsys, "image", "--config", cfg, "--out", str(tmp_path), "--kernels", str(out / "kernels"))
    assert code != 0 and "imaging.L" in error_of(err)["message"]


def test_empty_peak_list_warns_and_succeeds(tmp_path, capsys):
    # no interior eigenvalue of the unit disk lies in [1, 2]
    obj = dict(SMALL, data=dict(SMALL["data"], k_min=1.0, k_max=2.0, n_k=21))
    cfg = write_cfg(tmp_path / "e.json", obj)
    assert run(capsys, "forward", "--config", cfg, "--out", str(tmp_path))[0] == 0
    code, out, err = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["peaks"] == []
    assert "warning" in json.loads(err.strip().splitlines()[-1])
    assert json.loads((tmp_path / "peaks.json").read_text()) == []


def test_multiple_probe_points_write_one_sweep_each(small_run, tmp_path, capsys):
    _, out = small_run
    obj = dict(SMALL, probe={"z": [[0.2, 0.1], [-0.3, 0.2]]})
    cfg = write_cfg(tmp_path / "m.json", obj)
    code, stdout, err = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path),
                            "--dataset", str(out / "dataset"))
    assert code == 0, err
    assert (tmp_path / "sweep_00.csv").exists() and (tmp_path / "sweep_01.csv").exists()
    assert len(json.loads(stdout)["z"]) == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "scatter_imaging.cli", "oracle", "--config",
                           str(tmp_path / "none.json")], capture_output=True, text=True)
    assert proc.returncode != 0
    assert json.loads(proc.stderr.strip())["error"] == "ConfigError"
