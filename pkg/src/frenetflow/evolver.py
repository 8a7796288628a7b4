"""Extrinsic curve evolution: advance points under gamma_t = cT + bN + aB.

The velocity field is recomputed from the current points at every stage of
the classical 4th-order one-step method; no frame data is carried between
stages. Reparameterization keeps the sampling at uniform arclength for flows
with tangential or normal components, which shear the parameterization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import flows, geometry, spectral
from .errors import BlowUp, ConfigError
from .flows import FlowSpec

CFL_CONSTANT = 0.25


def stability_cap(n: int, spec: FlowSpec, length: float = 2.0 * np.pi) -> float:
    """Largest dt the explicit stepper tolerates on an n-node grid.

    cap = 0.25 * ds^2 / (1 + d/ds) with d the deepest d_s nesting in the
    coefficients: dispersive (NLS-type) flows need dt ~ ds^2, and each
    derivative in the velocity raises the stiffness by one power of ds.
    The constant 0.25 keeps the scaled spectral eigenvalue 0.25*pi^2 under
    the imaginary-axis stability bound 2*sqrt(2) of the stepper.
    """
    ds = length / n
    depth = max(flows.deriv_depth(spec.a), flows.deriv_depth(spec.b),
                flows.deriv_depth(spec.c))
    return CFL_CONSTANT * ds * ds / (1.0 + depth / ds)


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-stepping parameters.

    reparam_every: steps between reparameterizations; 0 disables, None picks
    automatically (every step for non-binormal flows, never for binormal
    ones, whose velocity preserves arclength spacing).
    record_every: steps between recorded snapshots; the initial and final
    states are always recorded.
    """

    dt: float
    t_final: float
    reparam_every: Optional[int] = None
    record_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.t_final) and self.t_final >= 0):
            raise ConfigError(f"t_final must be nonnegative, got {self.t_final}")
        if self.reparam_every is not None and self.reparam_every < 0:
            raise ConfigError("reparam_every must be None or >= 0")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Recorded curve states, aligned with strictly increasing times."""

    times: np.ndarray
    snapshots: Tuple[Tuple[geometry.DiscreteCurve, geometry.GeometryProfile], ...]

    @property
    def curves(self) -> tuple:
        return tuple(c for c, _ in self.snapshots)

    @property
    def profiles(self) -> tuple:
        return tuple(p for _, p in self.snapshots)

    @property
    def final(self) -> geometry.DiscreteCurve:
        return self.snapshots[-1][0]


def _velocity(points: np.ndarray, length: float, drift: np.ndarray,
              spec: FlowSpec, time: float) -> np.ndarray:
    app = geometry._Apparatus(points, length, drift)
    n = points.shape[0]
    ctx = flows.EvalContext(curvature=app.curvature, torsion=app.torsion,
                            s=spectral.grid(n, length), t=time,
                            length=length, constants=spec.constants,
                            arc_scale=app.speed)
    a, b, c = flows.evaluate_in_context(spec, ctx)
    return (c[:, None] * app.tangent + b[:, None] * app.normal
            + a[:, None] * app.binormal)


def evolve_curve(curve: geometry.DiscreteCurve, spec: FlowSpec,
                 config: EvolutionConfig) -> Trajectory:
    """Integrate the flow and return recorded (curve, profile) snapshots.

    dt is validated against stability_cap up front. Each step the velocity
    peak is checked against half a grid spacing; exceeding it rejects the
    step and raises BlowUp before node ordering can corrupt. Position updates
    use compensated summation: over the ~1/dt steps of a dispersive run the
    plain `pts += dt*v` roundoff random-walks into the high modes, where
    torsion extraction amplifies it by three powers of the wavenumber.
    """
    cap = stability_cap(curve.n, spec, curve.length)
    if config.dt > cap * (1.0 + 1e-9):
        raise ConfigError(
            f"dt={config.dt:g} exceeds the stability cap {cap:g} for "
            f"n={curve.n}, length={curve.length:g}; lower dt or the grid size")

    profile = geometry.profile_from_curve(curve)
    binormal = (flows.is_zero(spec.b, spec.constants)
                and flows.is_zero(spec.c, spec.constants))
    reparam_every = config.reparam_every
    if reparam_every is None:
        reparam_every = 0 if binormal else 1

    times = [0.0]
    snaps = [(curve, profile)]
    t = 0.0
    step = 0
    t_final = config.t_final
    eps = 1e-12 * max(1.0, t_final)
    pts = curve.points
    lost = np.zeros_like(pts)
    while t < t_final - eps:
        h = min(config.dt, t_final - t)
        length, drift = curve.length, curve.drift
        v1 = _velocity(pts, length, drift, spec, t)
        vmax = float(np.max(np.linalg.norm(v1, axis=1)))
        if vmax * h > 0.5 * length / curve.n:
            raise BlowUp(
                f"velocity {vmax:.3g} would move nodes more than half a "
                f"grid spacing in one step at t={t:.6g}")
        v2 = _velocity(pts + 0.5 * h * v1, length, drift, spec, t + 0.5 * h)
        v3 = _velocity(pts + 0.5 * h * v2, length, drift, spec, t + 0.5 * h)
        v4 = _velocity(pts + h * v3, length, drift, spec, t + h)
        incr = (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4) - lost
        new_pts = pts + incr
        lost = (new_pts - pts) - incr
        pts = new_pts
        curve = geometry.DiscreteCurve(pts, length, drift=drift)
        t += h
        step += 1
        if reparam_every and step % reparam_every == 0:
            curve = geometry.reparameterize(curve)
            pts = curve.points
            lost = np.zeros_like(pts)
        if step % config.record_every == 0 or t >= t_final - eps:
            times.append(t)
            snaps.append((curve, geometry.profile_from_curve(curve)))
    return Trajectory(np.asarray(times), tuple(snaps))
