"""Run configuration: TOML or JSON experiment files.

A config names the grid, the initial condition (preset or CSV), the flow
coefficients, a solver, time stepping, and the output directory. Relative
paths resolve against the directory containing the config file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib as _toml
except ImportError:
    import tomli as _toml

from . import flows, geometry, hasimoto, presets, serialization
from .errors import ConfigError
from .flows import FlowSpec

CURVE_PRESETS = ("circle", "helix", "perturbed_circle")
WAVE_PRESETS = ("soliton", "plane_wave")
SOLVER_KINDS = ("general", "nls", "hirota", "powerseries")


def load_config_file(path) -> dict:
    """Parse a TOML or JSON config file into a plain dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    suffix = path.suffix.lower()
    if suffix == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    try:
        return _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        if suffix == ".toml":
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(
            f"{path} is neither valid TOML nor valid JSON") from None


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"config section [{name}] must be a table")
    return value


@dataclass
class RunConfig:
    """Validated run configuration.

    raw keeps the original dict for hashing and the manifest; base_dir is
    what relative paths resolve against.
    """

    raw: dict
    base_dir: Path
    n: int
    length: Optional[float]
    seed: int
    output_dir: Path
    initial: dict = field(default_factory=dict)
    flow: Optional[FlowSpec] = None
    flow_strings: dict = field(default_factory=dict)
    solver: str = "general"
    solver_params: dict = field(default_factory=dict)
    evolution: dict = field(default_factory=dict)
    transform: dict = field(default_factory=dict)
    diagnose: dict = field(default_factory=dict)
    compare: dict = field(default_factory=dict)

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def parse_run_config(raw: dict, base_dir=None) -> RunConfig:
    """Validate a config dict. Raises ConfigError with a pointed message on
    the first violated constraint."""
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    grid = _section(raw, "grid")
    n = grid.get("n")
    if n is None:
        raise ConfigError("config needs grid.n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"grid.n must be an integer, got {n!r}")
    if n < 8 or n & (n - 1):
        raise ConfigError(f"grid.n must be a power of two >= 8, got {n}")
    length = grid.get("length")
    if length is not None:
        length = float(length)
        if not (np.isfinite(length) and length > 0):
            raise ConfigError(f"grid.length must be positive, got {length}")

    seed = raw.get("seed", 2024)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    initial = _section(raw, "initial")
    if initial:
        has_preset = "preset" in initial
        has_csv = "csv" in initial
        if has_preset == has_csv:
            raise ConfigError(
                "section [initial] needs exactly one of 'preset' or 'csv'")
        if has_preset:
            name = initial["preset"]
            if name not in CURVE_PRESETS + WAVE_PRESETS:
                raise ConfigError(
                    f"unknown preset {name!r}; choose one of "
                    f"{', '.join(CURVE_PRESETS + WAVE_PRESETS)}")
            if name in WAVE_PRESETS and length is None:
                raise ConfigError(f"preset {name!r} needs grid.length")

    flow_section = _section(raw, "flow")
    spec = None
    flow_strings = {}
    if flow_section:
        flow_strings = {
            "a": str(flow_section.get("a", "0")),
            "b": str(flow_section.get("b", "0")),
            "c": str(flow_section.get("c", "0")),
        }
        constants = flow_section.get("constants", {})
        if not isinstance(constants, dict):
            raise ConfigError("flow.constants must be a table of numbers")
        spec = flows.parse_flow(flow_strings["a"], flow_strings["b"],
                                flow_strings["c"], constants)

    solver_section = _section(raw, "solver")
    solver = solver_section.get("kind", "general")
    if solver not in SOLVER_KINDS:
        raise ConfigError(f"solver.kind must be one of "
                          f"{', '.join(SOLVER_KINDS)}, got {solver!r}")
    solver_params = {k: v for k, v in solver_section.items() if k != "kind"}

    evolution = _section(raw, "evolution")
    # dt/t_final range checks live in EvolutionConfig; only shape here
    for key in ("dt", "t_final"):
        if key in evolution and not isinstance(evolution[key], (int, float)):
            raise ConfigError(f"evolution.{key} must be a number")

    output = _section(raw, "output")
    out_dir = Path(output.get("directory", "out"))
    if not out_dir.is_absolute():
        out_dir = base_dir / out_dir

    cfg = RunConfig(raw=raw, base_dir=base_dir, n=n, length=length,
                    seed=seed, output_dir=out_dir, initial=dict(initial),
                    flow=spec, flow_strings=flow_strings, solver=solver,
                    solver_params=dict(solver_params),
                    evolution=dict(evolution),
                    transform=dict(_section(raw, "transform")),
                    diagnose=dict(_section(raw, "diagnose")),
                    compare=dict(_section(raw, "compare")))

    if initial.get("csv"):
        csv_path = cfg.resolve(initial["csv"])
        if not csv_path.exists():
            raise ConfigError(f"initial.csv does not exist: {csv_path}")
    if cfg.diagnose.get("manifest"):
        man = cfg.resolve(cfg.diagnose["manifest"])
        if not man.exists():
            raise ConfigError(f"diagnose.manifest does not exist: {man}")
    return cfg


def load_run_config(path) -> RunConfig:
    path = Path(path)
    return parse_run_config(load_config_file(path), path.parent)


def build_initial_curve(cfg: RunConfig) -> geometry.DiscreteCurve:
    """Construct the initial curve from the [initial] section."""
    initial = cfg.initial
    if not initial:
        raise ConfigError("config needs an [initial] section")
    if "csv" in initial:
        kind = initial.get("kind", "curve")
        if kind != "curve":
            raise ConfigError(f"initial kind {kind!r} is not a curve")
        return serialization.load_curve(cfg.resolve(initial["csv"]))
    name = initial["preset"]
    if name == "circle":
        return presets.circle(cfg.n, radius=float(initial.get("radius", 1.0)))
    if name == "helix":
        return presets.helix(cfg.n, radius=float(initial.get("radius", 1.0)),
                             slope=float(initial.get("slope", 0.5)))
    if name == "perturbed_circle":
        return presets.perturbed_circle(
            cfg.n,
            amplitude=float(initial.get("amplitude", 0.05)),
            mode=int(initial.get("mode", 3)),
            radius=float(initial.get("radius", 1.0)))
    raise ConfigError(f"preset {name!r} is not a curve preset")


def build_initial_wave(cfg: RunConfig) -> hasimoto.WaveFunction:
    """Construct the initial wave: a wave preset, a wave CSV, or the
    transform of a curve initial condition."""
    initial = cfg.initial
    if not initial:
        raise ConfigError("config needs an [initial] section")
    if "csv" in initial and initial.get("kind", "curve") == "wave":
        return serialization.load_wave(cfg.resolve(initial["csv"]))
    if "preset" in initial:
        name = initial["preset"]
        if name == "soliton":
            a = float(initial.get("a", 1.0))
            if not 0 < a <= 10:
                raise ConfigError(f"soliton amplitude must be in (0, 10], "
                                  f"got {a}")
            return hasimoto.soliton_wave(cfg.n, cfg.length, a)
        if name == "plane_wave":
            return hasimoto.plane_wave(
                cfg.n, cfg.length,
                amplitude=float(initial.get("amplitude", 0.5)),
                mode=int(initial.get("mode", 1)))
    curve = build_initial_curve(cfg)
    return hasimoto.forward_transform(geometry.profile_from_curve(curve))


def build_solver_kind(cfg: RunConfig) -> hasimoto.SolverKind:
    """Instantiate the solver named by [solver]."""
    if cfg.solver == "nls":
        return hasimoto.CubicNLS()
    if cfg.solver == "hirota":
        if "w" not in cfg.solver_params:
            raise ConfigError("solver.kind = 'hirota' needs solver.w")
        return hasimoto.Hirota(float(cfg.solver_params["w"]))
    if cfg.solver == "powerseries":
        coeffs = cfg.solver_params.get("coefficients")
        if not coeffs:
            raise ConfigError(
                "solver.kind = 'powerseries' needs solver.coefficients")
        return hasimoto.PowerSeriesNLS(tuple(float(c) for c in coeffs))
    if cfg.flow is None:
        raise ConfigError("solver.kind = 'general' needs a [flow] section")
    return hasimoto.GeneralIntegroDifferential(cfg.flow)
