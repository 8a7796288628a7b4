"""Curve geometry: frames, profiles, reconstruction, reparameterization."""
import numpy as np
import numpy.testing as npt
import pytest

from frenetflow import geometry, presets, spectral
from frenetflow.errors import DegenerateFrame


def test_circle_profile():
    c = presets.circle(256, radius=1.0)
    p = geometry.profile_from_curve(c)
    npt.assert_allclose(p.curvature, 1.0, atol=1e-10)
    npt.assert_allclose(p.torsion, 0.0, atol=1e-10)
    assert abs(c.length - 2 * np.pi) < 1e-12


def test_circle_profile_scales_with_radius():
    c = presets.circle(128, radius=2.5)
    p = geometry.profile_from_curve(c)
    npt.assert_allclose(p.curvature, 1 / 2.5, atol=1e-10)


def test_helix_profile_constant():
    # radius 1, slope 0.5: k = r/(r^2+c^2) = 0.8, tau = c/(r^2+c^2) = 0.4
    c = presets.helix(256, radius=1.0, slope=0.5)
    p = geometry.profile_from_curve(c)
    npt.assert_allclose(p.curvature, 0.8, atol=1e-9)
    npt.assert_allclose(p.torsion, 0.4, atol=1e-9)
    assert abs(c.length - 2 * np.pi * np.sqrt(1.25)) < 1e-12


def test_helix_drift_is_pitch():
    c = presets.helix(128, radius=1.0, slope=0.5)
    npt.assert_allclose(c.drift, [0.0, 0.0, 2 * np.pi * 0.5], atol=1e-12)


def test_frames_satisfy_frenet_equations():
    c = presets.perturbed_circle(256, amplitude=0.05, mode=3)
    f = geometry.frames_from_curve(c)
    p = geometry.profile_from_curve(c)
    dT = spectral.derivative(f.tangent, c.length, axis=0)
    resid = dT - p.curvature[:, None] * f.normal
    assert np.max(np.abs(resid)) < 1e-7


def test_frames_orthonormal_right_handed():
    c = presets.perturbed_circle(128, amplitude=0.1, mode=4)
    f = geometry.frames_from_curve(c)
    npt.assert_allclose(np.sum(f.tangent * f.normal, axis=1), 0, atol=1e-12)
    npt.assert_allclose(np.linalg.norm(f.tangent, axis=1), 1, atol=1e-12)
    npt.assert_allclose(np.cross(f.tangent, f.normal), f.binormal,
                        atol=1e-12)


def test_profile_rigid_motion_invariant(rng):
    c = presets.perturbed_circle(128, amplitude=0.08, mode=3)
    p0 = geometry.profile_from_curve(c)
    # random rotation via QR, plus a translation
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    moved = geometry.DiscreteCurve(c.points @ q.T + np.array([1.0, -2.0, 0.5]),
                                   c.length)
    p1 = geometry.profile_from_curve(moved)
    npt.assert_allclose(p1.curvature, p0.curvature, atol=1e-10)
    npt.assert_allclose(p1.torsion, p0.torsion, atol=1e-10)


def _round_trip_error(n):
    c = presets.perturbed_circle(n, amplitude=0.05, mode=3)
    p = geometry.profile_from_curve(c)
    f = geometry.frames_from_curve(c)
    rebuilt = geometry.reconstruct_curve(p, initial_point=c.points[0],
                                         initial_frame=f.as_matrix(0))
    return float(np.max(np.abs(rebuilt.points - c.points)))


def test_round_trip_second_order_or_better():
    e1 = _round_trip_error(128)
    e2 = _round_trip_error(256)
    order = np.log2(e1 / e2)
    assert order >= 2.0, (e1, e2, order)


def test_round_trip_up_to_rigid_motion():
    # anchored at the default origin frame instead of the curve's own
    c = presets.perturbed_circle(256, amplitude=0.05, mode=3)
    p = geometry.profile_from_curve(c)
    rebuilt = geometry.reconstruct_curve(p)
    aligned = geometry.align_rigid(rebuilt.points, c.points)
    assert np.max(np.abs(aligned - c.points)) < 1e-6


def test_circle_closure_defect_small():
    c = presets.circle(512)
    p = geometry.profile_from_curve(c)
    rebuilt = geometry.reconstruct_curve(p)
    assert np.linalg.norm(rebuilt.drift) < 1e-8


def test_helix_reconstruction_recovers_drift():
    c = presets.helix(256, radius=1.0, slope=0.5)
    p = geometry.profile_from_curve(c)
    f = geometry.frames_from_curve(c)
    rebuilt = geometry.reconstruct_curve(p, initial_point=c.points[0],
                                         initial_frame=f.as_matrix(0))
    npt.assert_allclose(rebuilt.drift, c.drift, atol=1e-7)


def test_reparameterize_preserves_length():
    n = 256
    # non-uniform parameterization of the unit circle
    u = spectral.grid(n, 2 * np.pi)
    theta = u + 0.2 * np.sin(u)
    pts = np.stack([np.cos(theta), np.sin(theta), np.zeros(n)], axis=1)
    crude = geometry.DiscreteCurve(pts, 2 * np.pi)
    fixed = geometry.reparameterize(crude)
    assert abs(fixed.length - 2 * np.pi) < 1e-8
    # curvature pays two derivative orders on the spline's O(ds^4) error
    p = geometry.profile_from_curve(fixed)
    npt.assert_allclose(p.curvature, 1.0, atol=1e-5)


def test_reparameterize_uniform_curve_is_noop():
    c = presets.circle(128)
    again = geometry.reparameterize(c)
    assert np.max(np.abs(again.points - c.points)) < 1e-10


def test_degenerate_frame_raises_on_straight_line():
    n = 64
    s = spectral.grid(n, 1.0)
    pts = np.stack([s, np.zeros(n), np.zeros(n)], axis=1)
    line = geometry.DiscreteCurve(pts, 1.0, drift=np.array([1.0, 0, 0]))
    with pytest.raises(DegenerateFrame):
        geometry.frames_from_curve(line)


def test_random_profile_band_limited_and_positive(rng):
    p = geometry.random_profile(256, 2 * np.pi, rng)
    assert np.all(p.curvature >= 0.1)
    spec = np.fft.fft(p.curvature)
    modes = np.rint(np.fft.fftfreq(256) * 256).astype(int)
    assert np.max(np.abs(spec[np.abs(modes) > 6])) < 1e-10


def test_grid_size_validation():
    with pytest.raises(ValueError):
        geometry.DiscreteCurve(np.zeros((100, 3)), 1.0)
    with pytest.raises(ValueError):
        geometry.GeometryProfile(np.ones(4), np.zeros(4), 1.0)


def test_negative_curvature_rejected():
    with pytest.raises(ValueError):
        geometry.GeometryProfile(-np.ones(16), np.zeros(16), 1.0)
