"""Run configuration: one JSON file drives every pipeline stage.

Missing sections and keys fall back to the defaults below; unknown keys
are rejected so that typos do not pass silently.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class DataSpec:
    M: int = 64
    N: int = 64
    k_min: float = 1.0
    k_max: float = 4.0
    n_k: int = 301
    n_quad: int = 128
    delta: float = 0.0
    seed: int = 0
    exact_disk: bool = False

    def validate(self):
        if not self.k_min > 0:
            raise ConfigError("data.k_min must be positive")
        if not self.k_max > self.k_min:
            raise ConfigError("data.k_max must exceed data.k_min")
        if self.delta < 0:
            raise ConfigError("data.delta must be nonnegative")
        if self.n_k < 2:
            raise ConfigError("data.n_k must be at least 2")
        if self.M < 1 or self.N < 1:
            raise ConfigError("data.M and data.N must be positive")


@dataclass
class ProbeSpec:
    z: list | None = None  # one point or a list of points; None -> imaging-region centre
    truncation: object = "auto"  # "auto" | {"tau": t} | {"rank": r} | {"knee": true}
    prominence_min: float = 1.5
    window: int = 21
    merge: int | None = None

    def points(self) -> list[tuple[float, float]] | None:
        if self.z is None:
            return None
        z = self.z
        if len(z) == 2 and all(isinstance(c, (int, float)) for c in z):
            z = [z]
        pts = []
        for p in z:
            if len(p) != 2:
                raise ConfigError(f"probe.z entries must be 2-D points, got {p!r}")
            pts.append((float(p[0]), float(p[1])))
        if not pts:
            raise ConfigError("probe.z is empty")
        return pts

    def validate(self):
        self.points()
        if not self.prominence_min > 1:
            raise ConfigError("probe.prominence_min must exceed 1")
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError("probe.window must be an odd integer >= 3")


@dataclass
class ModesSpec:
    method: str = "FTLS"
    N: object = "auto"  # FTLS cutoff, int or "auto"
    alpha: object = "auto"  # GTLS penalty, float or "auto"
    eigenvalues: object = "auto"  # "auto" (read the peaks file) or a list of k
    max_modes: int | None = None
    exact_resolve: bool = False
    refine: bool = False  # re-locate each peak by maximizing the Picard norm (fresh solves)

    def validate(self):
        if self.method not in ("FTLS", "GTLS"):
            raise ConfigError("modes.method must be FTLS or GTLS")
        if self.N != "auto" and (not isinstance(self.N, int) or self.N < 0):
            raise ConfigError("modes.N must be a nonnegative integer or 'auto'")
        if self.alpha != "auto" and (not isinstance(self.alpha, (int, float)) or self.alpha < 0):
            raise ConfigError("modes.alpha must be nonnegative or 'auto'")
        if self.eigenvalues != "auto" and not isinstance(self.eigenvalues, list):
            raise ConfigError("modes.eigenvalues must be a list or 'auto'")


@dataclass
class ImagingSpec:
    nx: int = 201
    ny: int = 201
    x_range: list | None = None
    y_range: list | None = None
    inflate: float = 0.3
    L: int | None = None
    offset: float = 0.2
    sup_normalize: bool = False
    contrast: bool = True

    def validate(self):
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("imaging.nx and imaging.ny must be at least 2")
        if self.L is not None and self.L < 1:
            raise ConfigError("imaging.L must be positive")
        if not self.offset > 0:
            raise ConfigError("imaging.offset must be positive")
        if (self.x_range is None) != (self.y_range is None):
            raise ConfigError("give both imaging.x_range and imaging.y_range or neither")


@dataclass
class OracleSpec:
    k_min: float | None = None
    k_max: float | None = None
    n_k: int = 801
    n_quad: int = 64


@dataclass
class RunConfig:
    shape: object = "pear"
    data: DataSpec = field(default_factory=DataSpec)
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    modes: ModesSpec = field(default_factory=ModesSpec)
    imaging: ImagingSpec = field(default_factory=ImagingSpec)
    oracle: OracleSpec = field(default_factory=OracleSpec)
    raw: dict = field(default_factory=dict, repr=False)

    def validate(self) -> "RunConfig":
        for part in (self.data, self.probe, self.modes, self.imaging):
            part.validate()
        return self

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("raw")
        return d


_SECTIONS = {"data": DataSpec, "probe": ProbeSpec, "modes": ModesSpec,
             "imaging": ImagingSpec, "oracle": OracleSpec}


def _section(cls, obj, name):
    if obj is None:
        return cls()
    if not isinstance(obj, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return cls(**obj)


def parse_config(obj: dict) -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(obj) - set(_SECTIONS) - {"shape"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    parts = {name: _section(cls, obj.get(name), name) for name, cls in _SECTIONS.items()}
    try:
        cfg = RunConfig(shape=obj.get("shape", "pear"), raw=obj, **parts)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(obj)
