"""Text formats for datasets, sweeps, peak lists and kernels.

Every float is written with 17 significant digits (or the shortest
round-trip repr inside JSON), so reading back reproduces the values
bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .forward import FarFieldDataset
from .geometry import DirectionSet
from .modes import HerglotzKernel
from .spectral_probe import EigenvalueEstimate, SweepResult

MANIFEST = "manifest.json"


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


# ---------------------------------------------------------------- datasets


def save_dataset(dataset: FarFieldDataset, directory, config: dict | None = None) -> Path:
    """Write ``manifest.json`` plus one ``ff_{index:04d}.csv`` per wavenumber.

    CSV rows are observation directions; each cell is the quoted pair
    ``"re,im"``.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    meta = dict(dataset.meta)
    manifest = {
        "shape": meta.pop("shape", None),
        "label": meta.pop("label", None),
        "M": dataset.obs.count,
        "N": dataset.inc.count,
        "k_grid": [float(k) for k in dataset.k_grid],
        "delta": meta.pop("delta", 0.0),
        "seed": meta.pop("seed", None),
        "normalization": meta.pop("normalization", None),
        "solver": meta.pop("solver", None),
        "files": [f"ff_{i:04d}.csv" for i in range(len(dataset))],
        "config": config,
    }
    meta.pop("M", None)
    meta.pop("N", None)
    if meta:
        manifest["extra"] = meta
    for name, mat in zip(manifest["files"], dataset.matrices):
        with open(d / name, "w", newline="") as fh:
            w = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
            for row in mat:
                w.writerow([f"{_g17(z.real)},{_g17(z.imag)}" for z in row])
    write_json(d / MANIFEST, manifest)
    return d / MANIFEST


def load_dataset(directory) -> FarFieldDataset:
    d = Path(directory)
    if d.is_file():
        d = d.parent
    if not (d / MANIFEST).exists():
        raise FileNotFoundError(f"no {MANIFEST} in {d}")
    man = read_json(d / MANIFEST)
    M, N = int(man["M"]), int(man["N"])
    mats = np.empty((len(man["k_grid"]), M, N), dtype=complex)
    for i, name in enumerate(man["files"]):
        with open(d / name, newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) != M or any(len(r) != N for r in rows):
            raise ValueError(f"{name}: expected a {M}x{N} table")
        for a, row in enumerate(rows):
            for b, cell in enumerate(row):
                re, im = cell.split(",")
                mats[i, a, b] = complex(float(re), float(im))
    meta = {"shape": man["shape"], "label": man["label"], "M": M, "N": N,
            "delta": man["delta"], "seed": man["seed"],
            "normalization": man["normalization"], "solver": man["solver"]}
    meta.update(man.get("extra", {}))
    return FarFieldDataset(np.array(man["k_grid"], dtype=float), mats, DirectionSet(M), DirectionSet(N), meta)


# ---------------------------------------------------------- sweeps, peaks


def write_sweep_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["k,norm"] + [f"{_g17(k)},{_g17(v)}" for k, v in zip(result.k_grid, result.values)]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_sweep_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def peaks_to_list(peaks: list[EigenvalueEstimate]) -> list[dict]:
    return [{"k": p.k, "prominence": p.prominence, "index": p.index} for p in peaks]


def read_peaks(path) -> list[EigenvalueEstimate]:
    obj = read_json(path)
    if isinstance(obj, dict):
        obj = obj["peaks"]
    return [EigenvalueEstimate(float(p["k"]), float(p["prominence"]), int(p["index"])) for p in obj]


# ---------------------------------------------------------------- kernels


def kernel_to_dict(kernel: HerglotzKernel, **extra) -> dict:
    out = {
        "k": float(kernel.k),
        "method": kernel.method,
        "representation": kernel.representation,
        "cutoff_or_gridsize": kernel.size,
        "values": [[float(z.real), float(z.imag)] for z in kernel.values],
        "residual": float(kernel.residual),
    }
    out.update(extra)
    return out


def kernel_from_dict(d: dict) -> HerglotzKernel:
    vals = np.array([complex(re, im) for re, im in d["values"]])
    rep = d["representation"]
    if rep not in ("fourier", "nodal"):
        raise ValueError(f"unknown kernel representation {rep!r}")
    expected = 2 * int(d["cutoff_or_gridsize"]) + 1 if rep == "fourier" else int(d["cutoff_or_gridsize"])
    if len(vals) != expected:
        raise ValueError("kernel value count does not match cutoff_or_gridsize")
    return HerglotzKernel(float(d["k"]), rep, vals, d["method"], float(d["residual"]))


def write_kernel(kernel: HerglotzKernel, path, **extra) -> Path:
    return write_json(path, kernel_to_dict(kernel, **extra))


def read_kernel(path) -> HerglotzKernel:
    return kernel_from_dict(read_json(path))
