"""Run configuration: tolerances, resolutions and the flat ``key=value`` file format."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

CONFIG_ENV = "LOEWNER_CONFIG"

# Proven lower bound on the optimal Lip(1/2) constant for simple-curve hulls.
LIP_GUARD = 1.0 / 3.0


@dataclass(frozen=True)
class RunConfig:
    ode_tol: float = 1e-9
    capture_radius: float = 1e-5
    min_step: float = 1e-14
    newton_tol: float = 1e-10
    endpoint_tol: float = 1e-3
    self_hit_tol: float = 1e-6
    property_tol: float = 1e-2
    phase_tol: float = 1e-10
    tc_tol: float = 1e-3
    lip_guard: float = LIP_GUARD
    grid_nx: int = 300
    grid_ny: int = 200
    trace_samples: int = 2000
    zipper_steps: int = 10_000
    boundary_samples: int = 180
    threads: int = 0
    seed: int = 7
    output_dir: str = "out"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name.endswith("_tol") or f.name in ("capture_radius", "min_step", "lip_guard"):
                if not v > 0:
                    raise ValueError(f"{f.name} must be positive, got {v!r}")
        if self.grid_nx < 2 or self.grid_ny < 2:
            raise ValueError("grid resolution must be at least 2x2")
        if self.trace_samples < 16 or self.boundary_samples < 16:
            raise ValueError("trace and boundary resolutions must be at least 16")
        if self.zipper_steps < 1:
            raise ValueError("zipper_steps must be >= 1")

    def updated(self, **overrides) -> "RunConfig":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **overrides)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines. ``#`` starts a comment; blank lines are ignored."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        kind = types[key]
        if kind == "int":
            out[key] = int(value)
        elif kind == "float":
            out[key] = float(value)
        else:
            out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None, **overrides) -> RunConfig:
    """Defaults, then the config file (explicit path or ``$LOEWNER_CONFIG``), then overrides."""
    values = {}
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
