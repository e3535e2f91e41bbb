"""``scatter`` command line: forward | sweep | modes | image | oracle.

Each subcommand reads the run configuration (``--config``), consumes only
files written by earlier stages, and writes its outputs plus a
``<command>_manifest.json`` echoing the configuration into ``--out``.
A one-line JSON summary goes to stdout.  Failures print a JSON error
object on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from . import forward, geometry, imaging, modes, persist, plotting, spectral_probe
from .config import ConfigError, RunConfig, load_config

EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- helpers


def _shape(cfg: RunConfig, base: Path | None = None) -> geometry.BoundaryCurve:
    spec = cfg.shape
    if isinstance(spec, dict) and "path" in spec and base is not None:
        p = Path(spec["path"])
        if not p.is_absolute():
            spec = dict(spec, path=str(base / p))
    return geometry.make_shape(spec)


def imaging_grid(cfg: RunConfig, curve: geometry.BoundaryCurve) -> geometry.SamplingGrid:
    im = cfg.imaging
    if im.x_range is not None:
        return geometry.SamplingGrid(tuple(map(float, im.x_range)), tuple(map(float, im.y_range)), im.nx, im.ny)
    return geometry.default_grid(curve, im.nx, im.ny, im.inflate)


def probe_points(cfg: RunConfig, curve: geometry.BoundaryCurve) -> list[tuple[float, float]]:
    pts = cfg.probe.points()
    if pts is None:
        g = imaging_grid(cfg, curve)
        pts = [(0.5 * (g.x_range[0] + g.x_range[1]), 0.5 * (g.y_range[0] + g.y_range[1]))]
    return pts


def _manifest(out: Path, command: str, cfg: RunConfig, **entries) -> Path:
    obj = {"command": command, "config": cfg.raw, "resolved_config": cfg.as_dict()}
    obj.update(entries)
    return persist.write_json(out / f"{command}_manifest.json", obj)


def _warn(msg: str):
    print(json.dumps({"warning": msg}), file=sys.stderr)


# ------------------------------------------------------------ subcommands


def cmd_forward(cfg: RunConfig, out: Path, base: Path | None = None) -> dict:
    curve = _shape(cfg, base)
    d = cfg.data
    ds = forward.synthesize_dataset(curve, d.k_min, d.k_max, d.n_k, d.M, d.N, d.n_quad, d.exact_disk)
    if d.delta > 0:
        ds = forward.add_noise(ds, d.delta, d.seed)
    man = persist.save_dataset(ds, out / "dataset", config=cfg.raw)
    _manifest(out, "forward", cfg, dataset=str(man.parent))
    return {"manifest": str(man), "n_k": len(ds), "delta": ds.meta["delta"]}


def cmd_sweep(cfg: RunConfig, out: Path, dataset_path: Path, base: Path | None = None) -> dict:
    ds = persist.load_dataset(dataset_path)
    curve = _shape(cfg, base)
    trunc = spectral_probe.Truncation.from_dict(cfg.probe.truncation)
    pts = probe_points(cfg, curve)
    results, lists, files = [], [], []
    for i, z in enumerate(pts):
        res = spectral_probe.sweep(ds, z, trunc)
        name = "sweep.csv" if len(pts) == 1 else f"sweep_{i:02d}.csv"
        files.append(str(persist.write_sweep_csv(res, out / name)))
        results.append(res)
        lists.append(spectral_probe.pick_peaks(res, cfg.probe.prominence_min, cfg.probe.window, cfg.probe.merge))
    peaks = spectral_probe.union_peaks(lists) if len(lists) > 1 else lists[0]
    persist.write_json(out / "peaks.json", persist.peaks_to_list(peaks))
    ref = None
    if curve.spec.get("name") == "disk":
        ref = spectral_probe.disk_eigenvalues(curve.spec["R"], ds.k_grid[0], ds.k_grid[-1])
    plotting.plot_sweeps(results, peaks, out / "sweep.png", reference=ref)
    if not peaks:
        _warn("no peaks detected; the peak list is empty")
    _manifest(out, "sweep", cfg, dataset=str(dataset_path), z=[list(z) for z in pts],
              truncation=results[0].truncation, sweeps=files, peaks="peaks.json")
    return {"peaks": [p.k for p in peaks], "z": [list(z) for z in pts]}


def _exact_matrix(ds: forward.FarFieldDataset, k: float, index: int) -> forward.FarFieldMatrix:
    curve = geometry.make_shape(ds.meta["shape"])
    solver = ds.meta.get("solver") or {}
    if solver.get("method") == "series":
        F = forward.disk_farfield(curve.spec["R"], k, ds.obs, ds.inc)
    else:
        F = forward.nystrom_farfield(curve, k, ds.obs, ds.inc, int(solver.get("n_quad") or 128))
    delta = float(ds.meta.get("delta") or 0.0)
    if delta > 0:
        # same generator as the snapped grid index
        rng = np.random.default_rng(np.random.SeedSequence([int(ds.meta["seed"]), index]))
        E = rng.standard_normal(F.entries.shape) + 1j * rng.standard_normal(F.entries.shape)
        entries = F.entries + delta * np.linalg.norm(F.entries) * E / np.linalg.norm(E)
        F = forward.FarFieldMatrix(k, entries, ds.obs, ds.inc)
    return F


def _picard_at(F: forward.FarFieldMatrix, z, trunc) -> float:
    return spectral_probe.picard_norm(spectral_probe.singular_system(F), spectral_probe.rhs_phi(z, F.k, F.obs), trunc)


def cmd_modes(cfg: RunConfig, out: Path, dataset_path: Path, peaks_path: Path | None,
              base: Path | None = None) -> dict:
    ds = persist.load_dataset(dataset_path)
    m = cfg.modes
    if m.eigenvalues == "auto":
        if peaks_path is None or not Path(peaks_path).exists():
            raise UsageError(f"peaks file not found: {peaks_path}")
        targets = [p.k for p in persist.read_peaks(peaks_path)]
    else:
        targets = [float(k) for k in m.eigenvalues]
    if m.max_modes is not None:
        targets = targets[: m.max_modes]
    if not targets:
        _warn("no eigenvalues selected; no kernels written")
    lo, hi = float(ds.k_grid[0]), float(ds.k_grid[-1])
    for k in targets:
        if not lo <= k <= hi:
            raise ValueError(f"eigenvalue {k} outside the dataset range [{lo}, {hi}]")
    delta = float(ds.meta.get("delta") or 0.0)
    alpha = (1e-2 if delta > 0 else 0.0) if m.alpha == "auto" else float(m.alpha)
    radius = None
    if m.method == "FTLS" and m.N == "auto":
        radius = imaging_grid(cfg, _shape(cfg, base)).radius
    if m.refine:
        curve = _shape(cfg, base)
        z0 = probe_points(cfg, curve)[0]
        trunc = spectral_probe.Truncation.from_dict(cfg.probe.truncation)
        if trunc is None:
            trunc = spectral_probe.Truncation.from_noise(delta)
    kdir = out / "kernels"
    for stale in kdir.glob("kernel_*.json"):
        stale.unlink()
    records = []
    def recover(F):
        if m.method == "FTLS":
            N = modes.default_cutoff(F.k, radius, F.inc.count) if m.N == "auto" else int(m.N)
            return modes.ftls_recover(F, N)
        return modes.gtls_recover(F, alpha)

    for i, k in enumerate(targets):
        idx = ds.nearest(k)
        if m.refine:
            a, b = ds.k_grid[max(idx - 1, 0)], ds.k_grid[min(idx + 1, len(ds) - 1)]
            res = minimize_scalar(lambda kk: -_picard_at(_exact_matrix(ds, kk, idx), z0, trunc),
                                  bounds=(a, b), method="bounded", options={"xatol": 1e-7})
            F = _exact_matrix(ds, float(res.x), idx)
        elif m.exact_resolve:
            F = _exact_matrix(ds, k, idx)
        else:
            F = ds[idx]
        kern = recover(F)
        path = persist.write_kernel(kern, kdir / f"kernel_{i:02d}.json", index=idx, k_detected=k,
                                    k_gap=float(F.k - k))
        records.append({"file": str(path.relative_to(out)), "k": float(F.k), "k_detected": k,
                        "k_gap": float(F.k - k), "index": idx, "residual": kern.residual,
                        "size": kern.size})
    _manifest(out, "modes", cfg, dataset=str(dataset_path), method=m.method,
              alpha=alpha if m.method == "GTLS" else None, kernels=records)
    return {"kernels": [r["file"] for r in records], "method": m.method}


def _kernel_files(paths: list[str] | None, out: Path) -> list[Path]:
    if not paths:
        paths = [str(out / "kernels")]
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise UsageError(f"kernel path not found: {p}")
    if not files:
        raise UsageError("no kernel files found")
    return files


def contrast_report(ind: imaging.IndicatorGrid, curve: geometry.BoundaryCurve, offset: float) -> dict:
    arcs = imaging.concave_arcs(curve)
    return {"offset": offset,
            "overall": imaging.boundary_contrast(ind, curve, offset),
            "concave_arcs": [imaging.boundary_contrast(ind, curve, offset, mask=mk) for mk in arcs]}


def cmd_image(cfg: RunConfig, out: Path, kernel_paths: list[str] | None, base: Path | None = None) -> dict:
    kernels = sorted((persist.read_kernel(p) for p in _kernel_files(kernel_paths, out)), key=lambda g: g.k)
    L = cfg.imaging.L
    if L is not None:
        if L > len(kernels):
            raise ValueError(f"imaging.L = {L} but only {len(kernels)} kernels are available")
        kernels = kernels[:L]
    curve = _shape(cfg, base)
    grid = imaging_grid(cfg, curve)
    if len(kernels) == 1:
        ind = imaging.indicator_single(kernels[0], grid)
    else:
        ind = imaging.indicator_multi(kernels, grid, cfg.imaging.sup_normalize)
    csv_path, pgm_path = imaging.emit(ind, out / "indicator")
    plotting.plot_indicator(ind, out / "indicator.png", curve, title=f"L = {len(kernels)}")
    report = contrast_report(ind, curve, cfg.imaging.offset) if cfg.imaging.contrast else None
    _manifest(out, "image", cfg, kernels=[k.k for k in kernels], kind=ind.kind, ceiling=ind.ceiling,
              csv=csv_path.name, pgm=pgm_path.name, png="indicator.png", contrast=report)
    return {"csv": str(csv_path), "pgm": str(pgm_path), "L": len(kernels), "contrast": report}


def cmd_oracle(cfg: RunConfig, out: Path, base: Path | None = None) -> dict:
    curve = _shape(cfg, base)
    o = cfg.oracle
    k_min = cfg.data.k_min if o.k_min is None else o.k_min
    k_max = cfg.data.k_max if o.k_max is None else o.k_max
    vals = spectral_probe.interior_eigenvalue_oracle(curve, k_min, k_max, o.n_k, o.n_quad)
    persist.write_json(out / "oracle.json", vals)
    _manifest(out, "oracle", cfg, k_range=[k_min, k_max], eigenvalues="oracle.json")
    return {"eigenvalues": vals}


# -------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scatter", description="Obstacle imaging from far-field data via interior resonant modes")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", required=True, help="run configuration (JSON)")
        sp.add_argument("--out", default=".", help="output directory (default: current)")

    common(sub.add_parser("forward", help="synthesize far-field data"))
    sp = sub.add_parser("sweep", help="Picard-norm sweep and peak picking")
    common(sp)
    sp.add_argument("--dataset", help="dataset directory (default: OUT/dataset)")
    sp = sub.add_parser("modes", help="recover Herglotz kernels at detected eigenvalues")
    common(sp)
    sp.add_argument("--dataset", help="dataset directory (default: OUT/dataset)")
    sp.add_argument("--peaks", help="peak list JSON (default: OUT/peaks.json)")
    sp = sub.add_parser("image", help="indicator image and boundary contrast")
    common(sp)
    sp.add_argument("--kernels", nargs="+", help="kernel JSON files or directories (default: OUT/kernels)")
    common(sub.add_parser("oracle", help="interior eigenvalues from the exact boundary"))
    return p


def run(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config)
    base = Path(args.config).resolve().parent
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if args.command == "forward":
        summary = cmd_forward(cfg, out, base)
    elif args.command == "sweep":
        summary = cmd_sweep(cfg, out, Path(args.dataset or out / "dataset"), base)
    elif args.command == "modes":
        summary = cmd_modes(cfg, out, Path(args.dataset or out / "dataset"),
                            Path(args.peaks or out / "peaks.json"), base)
    elif args.command == "image":
        summary = cmd_image(cfg, out, args.kernels, base)
    else:
        summary = cmd_oracle(cfg, out, base)
    summary = {"command": args.command, "status": "ok", **summary,
               "seconds": round(time.perf_counter() - t0, 3)}
    return summary


def main(argv=None) -> int:
    command = None
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        command = next((a for a in argv if not a.startswith("-")), None)
        summary = run(argv)
    except (UsageError, ConfigError, FileNotFoundError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "command": command}), file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # report every failure as JSON
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "command": command}), file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
