"""Execute one subcommand against a validated run configuration.

Each runner writes its artifacts under the config's output directory next
to a manifest that records the config, its hash, the scheme choices, and
library versions: enough to reproduce every file.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from . import (config as config_mod, diagnostics, evolver, flows, geometry,
               hasimoto, serialization)
from .config import RunConfig
from .errors import ConfigError

EVOLVER_SCHEME = "rk4-recomputed-frames"


@dataclass
class RunResult:
    summary: dict
    manifest: Path
    artifacts: List[Path]

    def all_files(self) -> List[Path]:
        return self.artifacts + [self.manifest]


def _prepare_out(cfg: RunConfig) -> Path:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_flow(cfg: RunConfig) -> flows.FlowSpec:
    if cfg.flow is None:
        raise ConfigError("this subcommand needs a [flow] section")
    return cfg.flow


def _evolution_config(cfg: RunConfig,
                      default_record: int = 1) -> evolver.EvolutionConfig:
    ev = cfg.evolution
    if "dt" not in ev or "t_final" not in ev:
        raise ConfigError("section [evolution] needs dt and t_final")
    return evolver.EvolutionConfig(
        dt=float(ev["dt"]), t_final=float(ev["t_final"]),
        reparam_every=ev.get("reparam_every"),
        record_every=int(ev.get("record_every", default_record)))


def _default_record(cfg: RunConfig) -> int:
    ev = cfg.evolution
    if "dt" in ev and "t_final" in ev and float(ev["dt"]) > 0:
        steps = int(np.ceil(float(ev["t_final"]) / float(ev["dt"])))
        return max(1, steps // 10)
    return 1


def run_evolve(cfg: RunConfig) -> RunResult:
    """Extrinsic evolution: snapshot curve and profile CSVs."""
    spec = _require_flow(cfg)
    curve = config_mod.build_initial_curve(cfg)
    econfig = _evolution_config(cfg, _default_record(cfg))
    trajectory = evolver.evolve_curve(curve, spec, econfig)

    out = _prepare_out(cfg)
    artifacts: List[Path] = []
    for i, ((snap_curve, snap_profile), t) in enumerate(
            zip(trajectory.snapshots, trajectory.times)):
        artifacts += serialization.save_curve(
            out / f"curve_{i:04d}", snap_curve, extra={"time": float(t)})
        artifacts += serialization.save_profile(
            out / f"profile_{i:04d}", snap_profile, extra={"time": float(t)})

    binormal = (flows.is_zero(spec.b, spec.constants)
                and flows.is_zero(spec.c, spec.constants))
    reparam = econfig.reparam_every
    if reparam is None:
        reparam = 0 if binormal else 1
    i1_start = diagnostics.length(trajectory.curves[0])
    i1_end = diagnostics.length(trajectory.final)
    summary = {
        "snapshots": len(trajectory.snapshots),
        "t_final": float(trajectory.times[-1]),
        "I1_initial": i1_start,
        "I1_final": i1_end,
        "I1_relative_drift": abs(i1_end - i1_start) / i1_start,
    }
    manifest = serialization.write_manifest(
        out / "manifest.json", "evolve", cfg.raw,
        schemes={"evolver": EVOLVER_SCHEME,
                 "reparam_every": int(reparam)},
        artifacts=[p.relative_to(out) for p in artifacts],
        extra={"summary": summary})
    return RunResult(summary, manifest, artifacts)


def run_solve(cfg: RunConfig) -> RunResult:
    """Intrinsic evolution: snapshot wave CSVs."""
    wave = config_mod.build_initial_wave(cfg)
    kind = config_mod.build_solver_kind(cfg)
    ev = cfg.evolution
    if "dt" not in ev or "t_final" not in ev:
        raise ConfigError("section [evolution] needs dt and t_final")
    stride = int(ev.get("record_every", _default_record(cfg)))
    trajectory = hasimoto.evolve_wave(wave, kind, float(ev["dt"]),
                                      float(ev["t_final"]),
                                      snapshot_stride=stride)

    out = _prepare_out(cfg)
    artifacts: List[Path] = []
    for i, (snap, t) in enumerate(zip(trajectory.waves, trajectory.times)):
        artifacts += serialization.save_wave(
            out / f"wave_{i:04d}", snap, extra={"time": float(t)})
    n0 = trajectory.waves[0].norm_squared()
    n1 = trajectory.final.norm_squared()
    summary = {
        "snapshots": len(trajectory.waves),
        "t_final": float(trajectory.times[-1]),
        "scheme": trajectory.scheme,
        "norm_initial": n0,
        "norm_final": n1,
        "norm_relative_drift": abs(n1 - n0) / n0 if n0 else 0.0,
    }
    manifest = serialization.write_manifest(
        out / "manifest.json", "solve", cfg.raw,
        schemes={"wave": trajectory.scheme},
        artifacts=[p.relative_to(out) for p in artifacts],
        extra={"summary": summary})
    return RunResult(summary, manifest, artifacts)


def run_transform(cfg: RunConfig) -> RunResult:
    """Map between the curve/profile and wave representations."""
    direction = cfg.transform.get("direction", "forward")
    out = _prepare_out(cfg)
    artifacts: List[Path] = []
    if direction == "forward":
        initial = cfg.initial
        if initial.get("csv") and initial.get("kind") == "profile":
            profile = serialization.load_profile(cfg.resolve(initial["csv"]))
        else:
            curve = config_mod.build_initial_curve(cfg)
            profile = geometry.profile_from_curve(curve)
        base = float(cfg.transform.get("base_point", 0.0))
        wave = hasimoto.forward_transform(profile, base_point=base)
        artifacts += serialization.save_profile(out / "profile_in", profile)
        artifacts += serialization.save_wave(out / "wave_out", wave,
                                             base_point=base)
        summary = {
            "direction": "forward",
            "mu": wave.mu,
            "norm_squared": wave.norm_squared(),
            "bending_energy": diagnostics.bending_energy(profile),
        }
    elif direction == "inverse":
        wave = config_mod.build_initial_wave(cfg)
        profile = hasimoto.inverse_transform(wave)
        artifacts += serialization.save_wave(out / "wave_in", wave)
        artifacts += serialization.save_profile(out / "profile_out", profile)
        filled = profile.tau_filled
        summary = {
            "direction": "inverse",
            "mu": wave.mu,
            "filled_nodes": int(filled.sum()) if filled is not None else 0,
            "bending_energy": diagnostics.bending_energy(profile),
        }
    else:
        raise ConfigError(f"transform.direction must be 'forward' or "
                          f"'inverse', got {direction!r}")
    manifest = serialization.write_manifest(
        out / "manifest.json", "transform", cfg.raw,
        schemes={"transform": "spectral-antiderivative-gauged"},
        artifacts=[p.relative_to(out) for p in artifacts],
        extra={"summary": summary})
    return RunResult(summary, manifest, artifacts)


def run_classify(cfg: RunConfig) -> RunResult:
    """Structural facts about the flow: binormality, the length-condition
    residual on probe profiles, power-series shape, wave-route viability."""
    spec = _require_flow(cfg)
    length = cfg.length if cfg.length else 2.0 * np.pi
    probes = flows.default_probes(n=cfg.n, length=length, seed=cfg.seed)
    result = flows.classify_flow(spec, probes)
    try:
        structure = flows.analyze_binormal(spec)
        if structure.pure_k:
            wave_route = {"kind": "quadrature", "series": None, "ktau": 0.0}
        else:
            wave_route = {"kind": "closed-form",
                          "series": [list(t) for t in structure.series],
                          "ktau": structure.ktau}
    except flows.NonGeometricFlow as exc:
        wave_route = {"kind": "unavailable", "reason": str(exc)}
    payload = {
        "is_binormal": result.is_binormal,
        "length_condition_residual": result.length_condition_residual,
        "is_power_series_binormal":
            None if result.is_power_series_binormal is None
            else [list(t) for t in result.is_power_series_binormal],
        "wave_route": wave_route,
        "coefficients": spec.coefficient_texts(),
        "constants": dict(spec.constants),
    }
    out = _prepare_out(cfg)
    path = out / "classification.json"
    serialization._write_json(path, payload)
    manifest = serialization.write_manifest(
        out / "manifest.json", "classify", cfg.raw,
        schemes={"probes": f"n={cfg.n},seed={cfg.seed}"},
        artifacts=[path.relative_to(out)],
        extra={"summary": payload})
    return RunResult(payload, manifest, [path])


def run_diagnose(cfg: RunConfig) -> RunResult:
    """Rebuild a recorded trajectory from an evolve manifest and report the
    invariants, rates, and closure defects along it."""
    if "manifest" not in cfg.diagnose:
        raise ConfigError("section [diagnose] needs manifest = <path to an "
                          "evolve manifest.json>")
    man_path = cfg.resolve(cfg.diagnose["manifest"])
    manifest = serialization.read_manifest(man_path)
    if manifest.get("subcommand") != "evolve":
        raise ConfigError(f"{man_path} is not an evolve manifest")
    src = man_path.parent
    source_cfg = manifest.get("config", {})
    flow_section = source_cfg.get("flow")
    if not flow_section:
        raise ConfigError(f"manifest {man_path} records no [flow] section")
    spec = flows.parse_flow(str(flow_section.get("a", "0")),
                            str(flow_section.get("b", "0")),
                            str(flow_section.get("c", "0")),
                            flow_section.get("constants", {}))

    curve_files = sorted(p for p in manifest["artifacts"]
                         if Path(p).name.startswith("curve_")
                         and p.endswith(".csv"))
    if not curve_files:
        raise ConfigError(f"manifest {man_path} lists no curve snapshots")
    times = []
    snaps = []
    for cf in curve_files:
        curve = serialization.load_curve(src / cf)
        meta = serialization.read_manifest((src / cf).with_suffix(".json"))
        pf = src / cf.replace("curve_", "profile_")
        if pf.exists():
            profile = serialization.load_profile(pf)
        else:
            profile = geometry.profile_from_curve(curve)
        times.append(float(meta.get("time", len(times))))
        snaps.append((curve, profile))
    trajectory = evolver.Trajectory(np.asarray(times), tuple(snaps))
    report = diagnostics.build_report(trajectory, spec)

    out = _prepare_out(cfg)
    artifacts = serialization.save_report(out / "report", report)
    summary = serialization.read_manifest(out / "report.json")
    manifest_path = serialization.write_manifest(
        out / "manifest.json", "diagnose", cfg.raw,
        schemes={"rates": "spectral-quadrature"},
        artifacts=[p.relative_to(out) for p in artifacts],
        extra={"summary": summary, "source_manifest": str(man_path)})
    return RunResult(summary, manifest_path, artifacts)


def run_compare(cfg: RunConfig) -> RunResult:
    """The dual-path experiment: evolve the curve in space, evolve its wave
    transform intrinsically, and compare the (k, tau) they imply."""
    spec = _require_flow(cfg)
    curve = config_mod.build_initial_curve(cfg)
    econfig = _evolution_config(cfg, _default_record(cfg))
    extrinsic = evolver.evolve_curve(curve, spec, econfig)

    profile0 = extrinsic.profiles[0]
    wave0 = hasimoto.forward_transform(profile0)
    kind = config_mod.build_solver_kind(cfg)
    intrinsic = hasimoto.evolve_wave(wave0, kind, econfig.dt,
                                     econfig.t_final,
                                     snapshot_stride=econfig.record_every)
    if len(intrinsic.waves) != len(extrinsic.snapshots):
        raise ConfigError(
            "intrinsic and extrinsic snapshot schedules disagree; use a dt "
            "that divides t_final")

    errors = []
    for (snap_curve, snap_profile), wave in zip(extrinsic.snapshots,
                                                intrinsic.waves):
        implied = hasimoto.inverse_transform(wave)
        err_k = float(np.max(np.abs(implied.curvature
                                    - snap_profile.curvature)))
        err_tau = float(np.max(np.abs(implied.torsion
                                      - snap_profile.torsion)))
        errors.append(max(err_k, err_tau))
    dual = np.asarray(errors)
    report = diagnostics.build_report(extrinsic, spec, dual_path_error=dual)

    out = _prepare_out(cfg)
    artifacts = serialization.save_report(out / "report", report)
    artifacts += serialization.save_profile(out / "profile_extrinsic",
                                            extrinsic.profiles[-1])
    artifacts += serialization.save_profile(
        out / "profile_intrinsic", hasimoto.inverse_transform(intrinsic.final))
    artifacts += serialization.save_wave(out / "wave_final", intrinsic.final)
    summary = {
        "t_final": float(extrinsic.times[-1]),
        "snapshots": len(errors),
        "dual_path_error_final": float(dual[-1]),
        "dual_path_error_max": float(np.max(dual)),
        "wave_scheme": intrinsic.scheme,
    }
    manifest = serialization.write_manifest(
        out / "manifest.json", "compare", cfg.raw,
        schemes={"evolver": EVOLVER_SCHEME, "wave": intrinsic.scheme},
        artifacts=[p.relative_to(out) for p in artifacts],
        extra={"summary": summary})
    return RunResult(summary, manifest, artifacts)


RUNNERS = {
    "evolve": run_evolve,
    "solve": run_solve,
    "transform": run_transform,
    "classify": run_classify,
    "diagnose": run_diagnose,
    "compare": run_compare,
}


def run(cfg: RunConfig, subcommand: str) -> RunResult:
    """Dispatch one subcommand."""
    try:
        fn = RUNNERS[subcommand]
    except KeyError:
        raise ConfigError(f"unknown subcommand {subcommand!r}") from None
    return fn(cfg)
