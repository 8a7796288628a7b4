"""Closed space curves on uniform periodic grids.

A curve is n points sampled at equal arclength. Curves may close only modulo
a constant displacement per period (`drift`), which covers helical filaments
and other open-but-translationally-periodic shapes; every spectral operation
works on the de-trended periodic part and adds the ramp back analytically.

Conventions: curvature k >= 0, normal N = T'/|T'|, binormal B = T x N
(right-handed), torsion tau = <N', B>.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import spectral
from .errors import DegenerateFrame, SelfIntersectionSuspected

# Below this curvature a node cannot orient its own normal.
K_FLOOR = 1e-8
# Fraction of nodes allowed to fall below K_FLOOR before giving up.
DEGENERATE_NODE_FRACTION = 0.01

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(6)


def _frozen(arr, dtype=float, shape=None) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    if shape is not None and out.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


def _check_grid_size(n: int) -> None:
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")


@dataclass(frozen=True)
class DiscreteCurve:
    """Uniform-arclength samples of a space curve.

    points: (n, 3) positions; n is a power of two >= 8.
    length: total arclength of one period.
    drift:  displacement gained over one period, gamma(L) - gamma(0).
            Zero for closed curves.
    """

    points: np.ndarray
    length: float
    drift: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        _check_grid_size(pts.shape[0])
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite values")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "drift", _frozen(self.drift, shape=(3,)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return spectral.grid(self.n, self.length)

    def periodic_part(self) -> np.ndarray:
        """points with the drift ramp removed; a periodic sequence."""
        frac = np.arange(self.n) / self.n
        return self.points - frac[:, None] * self.drift


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal right-handed frame (tangent, normal, binormal) per node."""

    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray

    def __post_init__(self):
        t = _frozen(self.tangent)
        for name in ("tangent", "normal", "binormal"):
            arr = _frozen(getattr(self, name), shape=t.shape)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise ValueError("frame fields must have shape (n, 3)")
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.tangent.shape[0]

    def as_matrix(self, i: int) -> np.ndarray:
        """Rows (T, N, B) at node i."""
        return np.vstack([self.tangent[i], self.normal[i], self.binormal[i]])


@dataclass(frozen=True)
class GeometryProfile:
    """Curvature and torsion sampled on the uniform arclength grid.

    tau_filled marks nodes where curvature sat below K_FLOOR and the torsion
    value was copied from the nearest well-defined node.
    """

    curvature: np.ndarray
    torsion: np.ndarray
    length: float
    tau_filled: Optional[np.ndarray] = None

    def __post_init__(self):
        k = _frozen(self.curvature)
        if k.ndim != 1:
            raise ValueError("curvature must be one-dimensional")
        _check_grid_size(k.size)
        if not np.all(np.isfinite(k)) or np.any(k < 0):
            raise ValueError("curvature must be finite and non-negative")
        tau = _frozen(self.torsion, shape=k.shape)
        if not np.all(np.isfinite(tau)):
            raise ValueError("torsion contains non-finite values")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")
        object.__setattr__(self, "curvature", k)
        object.__setattr__(self, "torsion", tau)
        if self.tau_filled is not None:
            object.__setattr__(self, "tau_filled",
                               _frozen(self.tau_filled, dtype=bool, shape=k.shape))

    @property
    def n(self) -> int:
        return self.curvature.size

    @property
    def grid(self) -> np.ndarray:
        return spectral.grid(self.n, self.length)


def nearest_defined(n: int, undefined: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each True entry of `undefined`, the cyclically nearest False index.

    Returns (bad_indices, source_indices).
    """
    good = np.flatnonzero(~undefined)
    bad = np.flatnonzero(undefined)
    if good.size == 0:
        raise DegenerateFrame("no well-defined nodes to continue from")
    d = np.abs(bad[:, None] - good[None, :])
    d = np.minimum(d, n - d)
    return bad, good[np.argmin(d, axis=1)]


class _Apparatus:
    """Frame, curvature, torsion and metric data for one set of points.

    Valid for any regular parameterization: `speed` = |dgamma/du| converts
    grid-parameter derivatives to arclength derivatives, so the output is
    correct even when the nodes have drifted off uniform spacing.
    """

    __slots__ = ("speed", "tangent", "normal", "binormal",
                 "curvature", "torsion", "filled")

    def __init__(self, points: np.ndarray, length: float, drift: np.ndarray):
        n = points.shape[0]
        frac = np.arange(n) / n
        detrended = points - frac[:, None] * drift
        dgamma = spectral.derivative(detrended, length, axis=0) + drift / length
        speed = np.linalg.norm(dgamma, axis=1)
        if np.any(speed < 1e-14):
            raise DegenerateFrame("vanishing tangent vector")
        tangent = dgamma / speed[:, None]
        dtangent = spectral.derivative(tangent, length, axis=0) / speed[:, None]
        curvature = np.linalg.norm(dtangent, axis=1)

        low = curvature < K_FLOOR
        nlow = int(low.sum())
        if nlow > DEGENERATE_NODE_FRACTION * n:
            raise DegenerateFrame(
                f"curvature below {K_FLOOR:g} on {nlow}/{n} nodes")

        normal = np.empty_like(tangent)
        ok = ~low
        normal[ok] = dtangent[ok] / curvature[ok, None]
        if nlow:
            bad, src = nearest_defined(n, low)
            borrowed = normal[src]
            # Parallel transport onto the local tangent plane.
            borrowed = borrowed - (np.einsum("ij,ij->i", borrowed, tangent[bad])[:, None]
                                   * tangent[bad])
            norms = np.linalg.norm(borrowed, axis=1)
            if np.any(norms < 1e-12):
                raise DegenerateFrame("cannot transport normal onto degenerate node")
            normal[bad] = borrowed / norms[:, None]
        # spectral differentiation leaves T.N at truncation level; project it
        # out so the frame is orthonormal to roundoff
        normal -= np.einsum("ij,ij->i", normal, tangent)[:, None] * tangent
        normal /= np.linalg.norm(normal, axis=1)[:, None]
        binormal = np.cross(tangent, normal)

        dnormal = spectral.derivative(normal, length, axis=0) / speed[:, None]
        torsion = np.einsum("ij,ij->i", dnormal, binormal)
        if nlow:
            torsion[bad] = torsion[src]

        self.speed = speed
        self.tangent = tangent
        self.normal = normal
        self.binormal = binormal
        self.curvature = curvature
        self.torsion = torsion
        self.filled = low


def frames_from_curve(curve: DiscreteCurve) -> FrenetFrame:
    """Frenet frame at every node, by spectral differentiation.

    Raises DegenerateFrame when more than 1% of nodes have curvature below
    K_FLOOR; isolated degenerate nodes get their normal by parallel transport
    from the nearest well-defined node.
    """
    app = _Apparatus(curve.points, curve.length, curve.drift)
    return FrenetFrame(app.tangent, app.normal, app.binormal)


def profile_from_curve(curve: DiscreteCurve) -> GeometryProfile:
    """Curvature and torsion of the curve; torsion at degenerate nodes is
    copied from the nearest well-defined node and flagged in tau_filled."""
    app = _Apparatus(curve.points, curve.length, curve.drift)
    filled = app.filled if app.filled.any() else None
    return GeometryProfile(app.curvature, app.torsion, curve.length,
                           tau_filled=filled)


def _coerce_frame(initial_frame) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if initial_frame is None:
        m = np.eye(3)
    elif isinstance(initial_frame, FrenetFrame):
        m = initial_frame.as_matrix(0)
    else:
        m = np.array(initial_frame, dtype=float)
    if m.shape != (3, 3):
        raise ValueError("initial_frame must be a 3x3 matrix with rows (T, N, B)")
    t, nrm, b = m
    t = t / np.linalg.norm(t)
    nrm = nrm - (nrm @ t) * t
    nn = np.linalg.norm(nrm)
    if nn < 1e-10:
        raise ValueError("initial frame is singular")
    nrm = nrm / nn
    return t, nrm, np.cross(t, nrm)


def integrate_frame(profile: GeometryProfile, initial_point=None,
                    initial_frame=None):
    """March gamma' = T, T' = kN, N' = -kT + tauB, B' = -tauN across one
    period with the classical 4th-order one-step scheme.

    Coefficients at half nodes come from trigonometric interpolation, and the
    frame is re-orthonormalized after every step. Returns (points, frames)
    where points has n+1 rows — the last row is gamma(L), which differs from
    gamma(0) by the closure defect — and frames is an (n, 3, 3) array of
    (T, N, B) rows at the grid nodes.
    """
    k = np.asarray(profile.curvature, dtype=float)
    tau = np.asarray(profile.torsion, dtype=float)
    n = k.size
    length = profile.length
    h = length / n
    kmid = spectral.sample_shifted(k, length, h / 2)
    taumid = spectral.sample_shifted(tau, length, h / 2)

    gamma = (np.zeros(3) if initial_point is None
             else np.array(initial_point, dtype=float))
    t, nrm, b = _coerce_frame(initial_frame)

    points = np.empty((n + 1, 3))
    frames = np.empty((n, 3, 3))

    def rhs(tv, nv, bv, kc, tc):
        return tv, kc * nv, -kc * tv + tc * bv, -tc * nv

    for i in range(n):
        points[i] = gamma
        frames[i, 0], frames[i, 1], frames[i, 2] = t, nrm, b
        k0, t0 = k[i], tau[i]
        k1, t1 = kmid[i], taumid[i]
        k2, t2 = k[(i + 1) % n], tau[(i + 1) % n]

        dg1, dt1, dn1, db1 = rhs(t, nrm, b, k0, t0)
        dg2, dt2, dn2, db2 = rhs(t + 0.5 * h * dt1, nrm + 0.5 * h * dn1,
                                 b + 0.5 * h * db1, k1, t1)
        dg3, dt3, dn3, db3 = rhs(t + 0.5 * h * dt2, nrm + 0.5 * h * dn2,
                                 b + 0.5 * h * db2, k1, t1)
        dg4, dt4, dn4, db4 = rhs(t + h * dt3, nrm + h * dn3,
                                 b + h * db3, k2, t2)

        gamma = gamma + (h / 6.0) * (dg1 + 2 * dg2 + 2 * dg3 + dg4)
        t = t + (h / 6.0) * (dt1 + 2 * dt2 + 2 * dt3 + dt4)
        nrm = nrm + (h / 6.0) * (dn1 + 2 * dn2 + 2 * dn3 + dn4)
        b = b + (h / 6.0) * (db1 + 2 * db2 + 2 * db3 + db4)

        t = t / np.linalg.norm(t)
        nrm = nrm - (nrm @ t) * t
        nrm = nrm / np.linalg.norm(nrm)
        b = np.cross(t, nrm)

    points[n] = gamma
    return points, frames


def reconstruct_curve(profile: GeometryProfile, initial_point=None,
                      initial_frame=None) -> DiscreteCurve:
    """Curve with the given curvature and torsion, anchored at initial_point
    with the given initial frame (identity frame at the origin by default).

    Closure is never enforced: a profile that does not close produces a curve
    whose `drift` records the gap, and the gap's size is available as the
    closure defect diagnostic.
    """
    points, _ = integrate_frame(profile, initial_point, initial_frame)
    n = profile.n
    drift = points[n] - points[0]
    return DiscreteCurve(points[:n], profile.length, drift=drift)


def _spline_speed(curve: DiscreteCurve):
    """Periodic cubic spline of the curve in index parameter u in [0, n],
    returning (spline, speed function, chord lengths)."""
    n = curve.n
    p = curve.periodic_part()
    closed = np.vstack([p, p[:1]])
    u = np.arange(n + 1, dtype=float)
    spline = CubicSpline(u, closed, axis=0, bc_type="periodic")
    dspline = spline.derivative()
    per_index = curve.drift / n

    def speed(uu):
        return np.linalg.norm(dspline(uu) + per_index, axis=-1)

    full = closed + u[:, None] / n * curve.drift
    chords = np.linalg.norm(np.diff(full, axis=0), axis=1)
    return spline, speed, chords


def reparameterize(curve: DiscreteCurve) -> DiscreteCurve:
    """Resample the curve at n uniform-arclength nodes.

    Uses a periodic cubic spline through the de-trended points; the total
    length is recomputed from the spline (6-point Gauss-Legendre per segment)
    and the uniform targets are located by vectorized Newton iteration. Node 0
    stays anchored at the current first point.
    """
    n = curve.n
    spline, speed, chords = _spline_speed(curve)
    if np.any(chords < 1e-13 * curve.length):
        raise SelfIntersectionSuspected(
            "consecutive nodes coincide; cumulative chord length stalled")

    base = np.arange(n, dtype=float)
    nodes = base[:, None] + (_GAUSS_X[None, :] + 1.0) / 2.0
    seg = (speed(nodes.reshape(-1)).reshape(n, 6) * (_GAUSS_W / 2.0)).sum(axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]

    targets = total * base / n
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, n - 1)
    ut = idx + (targets - cum[idx]) / seg[idx]
    for _ in range(4):
        blen = ut - idx
        pn = idx[:, None] + (_GAUSS_X[None, :] + 1.0) / 2.0 * blen[:, None]
        part = (speed(pn.reshape(-1)).reshape(n, 6) * (_GAUSS_W / 2.0)).sum(axis=1) * blen
        resid = cum[idx] + part - targets
        ut = ut - resid / speed(ut)
    ut = np.maximum(ut, 0.0)

    new_points = spline(ut) + ut[:, None] / n * curve.drift
    return DiscreteCurve(new_points, float(total), drift=curve.drift)


def arclength_spacing(curve: DiscreteCurve) -> np.ndarray:
    """Per-segment arclengths measured on the curve's own spline."""
    n = curve.n
    _, speed, _ = _spline_speed(curve)
    nodes = np.arange(n, dtype=float)[:, None] + (_GAUSS_X[None, :] + 1.0) / 2.0
    return (speed(nodes.reshape(-1)).reshape(n, 6) * (_GAUSS_W / 2.0)).sum(axis=1)


def align_rigid(moving: np.ndarray, fixed: np.ndarray) -> np.ndarray:
    """Best rigid motion (proper rotation + translation) of `moving` onto
    `fixed` in the least-squares sense."""
    mc = moving.mean(axis=0)
    fc = fixed.mean(axis=0)
    h = (moving - mc).T @ (fixed - fc)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    return (moving - mc) @ r.T + fc


def random_profile(n: int, length: float, rng: np.random.Generator,
                   modes: int = 6, k_base: float = 1.0,
                   k_amplitude: float = 0.3, tau_amplitude: float = 0.3,
                   tau_base: float = 0.0) -> GeometryProfile:
    """Random band-limited profile with curvature bounded away from zero.

    Spectral content is confined to |m| <= modes so that products of a few
    factors stay alias-free on the grid.
    """
    s = spectral.grid(n, length)

    def band(amplitude):
        out = np.zeros(n)
        for m in range(1, modes + 1):
            a, b = rng.normal(size=2) / m
            w = 2.0 * np.pi * m / length
            out += a * np.cos(w * s) + b * np.sin(w * s)
        peak = np.max(np.abs(out))
        if peak > 0:
            out *= amplitude / peak
        return out

    k = k_base + band(k_amplitude)
    if k_amplitude >= k_base:
        k = np.maximum(k, 0.05)
    tau = tau_base + band(tau_amplitude)
    return GeometryProfile(k, tau, length)
