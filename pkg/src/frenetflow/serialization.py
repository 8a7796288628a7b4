"""File formats for curves, profiles, waves, and run manifests.

Numeric CSV columns are written with repr-faithful precision (%.17g) so a
run is bit-reproducible from its config. Each CSV gets a JSON envelope of
the same stem carrying the metadata the samples alone cannot: domain
length, drift vector, gauge wavenumber.

Wave CSVs hold the gauged (periodic) samples; the envelope records
stored = "gauged" plus mu, and readers reconstruct the physical field.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import diagnostics, geometry, hasimoto
from .errors import ConfigError

FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list, columns: list) -> None:
    rows = np.broadcast_arrays(*columns)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for values in zip(*rows):
            fh.write(",".join(_fmt(v) for v in values) + "\n")


def _read_csv(path: Path) -> np.ndarray:
    """Numeric rows of a CSV; a single header line is tolerated."""
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError:
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# --- curves -------------------------------------------------------------

def save_curve(stem: Union[str, Path], curve: geometry.DiscreteCurve,
               extra: Optional[dict] = None) -> list:
    """Write <stem>.csv (s, x, y, z) and <stem>.json; returns the paths."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    s = curve.grid
    pts = curve.points
    _write_csv(csv_path, ["s", "x", "y", "z"],
               [s, pts[:, 0], pts[:, 1], pts[:, 2]])
    payload = {
        "format": FORMAT_VERSION,
        "kind": "curve",
        "n": curve.n,
        "length": curve.length,
        "drift": [float(v) for v in curve.drift],
    }
    if extra:
        payload.update(extra)
    _write_json(json_path, payload)
    return [csv_path, json_path]


def load_curve(path: Union[str, Path]) -> geometry.DiscreteCurve:
    """Read a curve from CSV (+ envelope when present).

    Without an envelope the columns may be (x, y, z) or (s, x, y, z); the
    curve is assumed closed and is resampled to uniform arclength, with the
    length measured from the points.
    """
    path = Path(path)
    data = _read_csv(path)
    if data.shape[1] == 4:
        points = data[:, 1:4]
    elif data.shape[1] == 3:
        points = data
    else:
        raise ConfigError(f"curve CSV must have 3 or 4 columns, "
                          f"got {data.shape[1]} in {path}")
    n = points.shape[0]
    if n < 8 or n & (n - 1):
        raise ConfigError(f"curve CSV needs a power-of-two number of rows "
                          f">= 8, got {n} in {path}")
    envelope = path.with_suffix(".json")
    if envelope.exists():
        meta = _read_json(envelope)
        if meta.get("kind") == "curve":
            return geometry.DiscreteCurve(points, float(meta["length"]),
                                          drift=np.asarray(meta.get("drift",
                                                                    [0, 0, 0])))
    chord = float(np.sum(np.linalg.norm(
        np.diff(np.vstack([points, points[:1]]), axis=0), axis=1)))
    return geometry.reparameterize(geometry.DiscreteCurve(points, chord))


# --- profiles -----------------------------------------------------------

def save_profile(stem: Union[str, Path], profile: geometry.GeometryProfile,
                 extra: Optional[dict] = None) -> list:
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    _write_csv(csv_path, ["s", "k", "tau"],
               [profile.grid, profile.curvature, profile.torsion])
    payload = {
        "format": FORMAT_VERSION,
        "kind": "profile",
        "n": profile.n,
        "length": profile.length,
    }
    if profile.tau_filled is not None:
        payload["tau_filled"] = [int(i) for i in
                                 np.flatnonzero(profile.tau_filled)]
    if extra:
        payload.update(extra)
    _write_json(json_path, payload)
    return [csv_path, json_path]


def load_profile(path: Union[str, Path]) -> geometry.GeometryProfile:
    path = Path(path)
    data = _read_csv(path)
    if data.shape[1] != 3:
        raise ConfigError(f"profile CSV must have columns s,k,tau; "
                          f"got {data.shape[1]} columns in {path}")
    envelope = path.with_suffix(".json")
    n = data.shape[0]
    if envelope.exists():
        meta = _read_json(envelope)
        length = float(meta["length"])
        filled = None
        if meta.get("tau_filled"):
            filled = np.zeros(n, dtype=bool)
            filled[np.asarray(meta["tau_filled"], dtype=int)] = True
        return geometry.GeometryProfile(data[:, 1], data[:, 2], length,
                                        tau_filled=filled)
    # without metadata the grid column defines the length
    ds = data[1, 0] - data[0, 0]
    return geometry.GeometryProfile(data[:, 1], data[:, 2], float(ds * n))


# --- waves --------------------------------------------------------------

def save_wave(stem: Union[str, Path], wave: hasimoto.WaveFunction,
              base_point: float = 0.0, extra: Optional[dict] = None) -> list:
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    _write_csv(csv_path, ["s", "re", "im"],
               [wave.grid, wave.psi.real, wave.psi.imag])
    payload = {
        "format": FORMAT_VERSION,
        "kind": "wave",
        "n": wave.n,
        "length": wave.length,
        "mu": wave.mu,
        "base_point": base_point,
        "stored": "gauged",
    }
    if extra:
        payload.update(extra)
    _write_json(json_path, payload)
    return [csv_path, json_path]


def load_wave(path: Union[str, Path]) -> hasimoto.WaveFunction:
    path = Path(path)
    data = _read_csv(path)
    if data.shape[1] != 3:
        raise ConfigError(f"wave CSV must have columns s,re,im; "
                          f"got {data.shape[1]} columns in {path}")
    psi = data[:, 1] + 1j * data[:, 2]
    envelope = path.with_suffix(".json")
    if envelope.exists():
        meta = _read_json(envelope)
        return hasimoto.WaveFunction(psi, float(meta["length"]),
                                     mu=float(meta.get("mu", 0.0)))
    n = data.shape[0]
    ds = data[1, 0] - data[0, 0]
    return hasimoto.WaveFunction(psi, float(ds * n))


# --- reports ------------------------------------------------------------

def save_report(stem: Union[str, Path],
                report: diagnostics.DiagnosticsReport) -> list:
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    header = ["t", "I1", "I2", "dI1_analytic", "dI2_analytic",
              "dI1_measured", "dI2_measured", "closure_defect"]
    columns = [report.times, report.I1, report.I2, report.dI1_analytic,
               report.dI2_analytic, report.dI1_measured, report.dI2_measured,
               report.closure_defect]
    if report.dual_path_error is not None:
        header.append("dual_path_error")
        columns.append(report.dual_path_error)
    _write_csv(csv_path, header, columns)
    summary = {
        "format": FORMAT_VERSION,
        "kind": "report",
        "max_I1_drift": float(np.max(np.abs(report.I1 - report.I1[0]))),
        "max_I2_drift": float(np.max(np.abs(report.I2 - report.I2[0]))),
        "max_closure_defect": float(np.max(report.closure_defect)),
        "max_abs_dI1_analytic": float(np.max(np.abs(report.dI1_analytic))),
        "max_abs_dI2_analytic": float(np.max(np.abs(report.dI2_analytic))),
    }
    if report.dual_path_error is not None:
        summary["max_dual_path_error"] = float(np.max(report.dual_path_error))
    _write_json(json_path, summary)
    return [csv_path, json_path]


# --- manifests ----------------------------------------------------------

def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON rendering of a config dict."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_manifest(path: Union[str, Path], subcommand: str, config: dict,
                   schemes: dict, artifacts: list,
                   extra: Optional[dict] = None) -> Path:
    """Run manifest: everything needed to reproduce the artifacts."""
    import scipy

    from . import __version__
    path = Path(path)
    payload = {
        "format": FORMAT_VERSION,
        "subcommand": subcommand,
        "config": config,
        "config_hash": config_hash(config),
        "schemes": schemes,
        "artifacts": [str(a) for a in artifacts],
        "versions": {
            "frenetflow": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if extra:
        payload.update(extra)
    _write_json(path, payload)
    return path


def read_manifest(path: Union[str, Path]) -> dict:
    return _read_json(Path(path))
