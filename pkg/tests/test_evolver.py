"""Extrinsic evolution tests: exact solutions, symmetry, convergence, and
the stability/blowup guards."""

import numpy as np
import pytest

from frenetflow import errors, evolver, flows, geometry, presets

VFE = flows.parse_flow("k")


def test_circle_translates_rigidly():
    # binormal velocity k*B on a unit circle is the constant unit z vector
    circ = presets.circle(256)
    cap = evolver.stability_cap(256, VFE, circ.length)
    traj = evolver.evolve_curve(circ, VFE, evolver.EvolutionConfig(dt=cap, t_final=0.1))
    expected = circ.points + np.array([0.0, 0.0, 0.1])
    assert np.max(np.linalg.norm(traj.final.points - expected, axis=1)) < 1e-12


def test_helix_profile_is_steady():
    hel = presets.helix(256)
    cap = evolver.stability_cap(256, VFE, hel.length)
    traj = evolver.evolve_curve(hel, VFE, evolver.EvolutionConfig(dt=cap, t_final=0.05))
    prof = traj.profiles[-1]
    assert np.max(np.abs(prof.curvature - 0.8)) < 1e-8
    assert np.max(np.abs(prof.torsion - 0.4)) < 1e-8


def test_zero_flow_is_identity():
    circ = presets.circle(128)
    spec = flows.parse_flow("0")
    traj = evolver.evolve_curve(circ, spec, evolver.EvolutionConfig(dt=1e-4, t_final=0.01))
    assert np.max(np.abs(traj.final.points - circ.points)) == 0.0


def test_evolution_commutes_with_rotation(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    pert = presets.perturbed_circle(256, amplitude=0.05, mode=3)
    cfg = evolver.EvolutionConfig(
        dt=evolver.stability_cap(256, VFE, pert.length), t_final=0.05
    )
    plain = evolver.evolve_curve(pert, VFE, cfg).final
    rotated_input = geometry.DiscreteCurve(
        pert.points @ Q.T, pert.length, drift=Q @ pert.drift
    )
    rotated = evolver.evolve_curve(rotated_input, VFE, cfg).final
    assert np.max(np.abs(rotated.points - plain.points @ Q.T)) < 1e-9


def test_time_stepping_is_fourth_order():
    # coarse grid so the time error sits well above roundoff
    pert = presets.perturbed_circle(32, amplitude=0.05, mode=3)
    cap = evolver.stability_cap(32, VFE, pert.length)
    t_final = 32 * cap

    def final_at(dt):
        cfg = evolver.EvolutionConfig(dt=dt, t_final=t_final)
        return evolver.evolve_curve(pert, VFE, cfg).final.points

    ref = final_at(cap / 8)
    e1 = np.max(np.abs(final_at(cap) - ref))
    e2 = np.max(np.abs(final_at(cap / 2) - ref))
    assert np.log2(e1 / e2) > 3.4


def test_stability_cap_formula():
    ds = 2 * np.pi / 256
    assert evolver.stability_cap(256, VFE) == pytest.approx(0.25 * ds * ds)
    fm = flows.parse_flow(
        "k + W*k*tau", b="W*d_s(k)", c="(W/2)*k^2", constants={"W": 0.1}
    )
    # one d_s nesting in the coefficients tightens the cap by 1/(1 + 1/ds)
    assert evolver.stability_cap(256, fm) == pytest.approx(
        0.25 * ds * ds / (1 + 1 / ds)
    )


def test_dt_above_cap_rejected():
    circ = presets.circle(256)
    with pytest.raises(errors.ConfigError, match="stability cap"):
        evolver.evolve_curve(circ, VFE, evolver.EvolutionConfig(dt=1.0, t_final=0.01))


def test_node_crossing_velocity_raises():
    circ = presets.circle(256)
    fast = flows.parse_flow("0", c="1000")
    cfg = evolver.EvolutionConfig(
        dt=evolver.stability_cap(256, fast, circ.length), t_final=0.01
    )
    with pytest.raises(errors.BlowUp, match="half a grid spacing"):
        evolver.evolve_curve(circ, fast, cfg)


def test_config_validation():
    with pytest.raises(errors.ConfigError, match="dt"):
        evolver.EvolutionConfig(dt=0.0, t_final=1.0)
    with pytest.raises(errors.ConfigError, match="t_final"):
        evolver.EvolutionConfig(dt=1e-3, t_final=-1.0)
    with pytest.raises(errors.ConfigError, match="reparam_every"):
        evolver.EvolutionConfig(dt=1e-3, t_final=1.0, reparam_every=-1)
    with pytest.raises(errors.ConfigError, match="record_every"):
        evolver.EvolutionConfig(dt=1e-3, t_final=1.0, record_every=0)


def test_record_schedule_includes_partial_final_step():
    circ = presets.circle(64)
    cap = evolver.stability_cap(64, VFE, circ.length)
    traj = evolver.evolve_curve(
        circ, VFE, evolver.EvolutionConfig(dt=cap, t_final=10 * cap, record_every=4)
    )
    assert np.allclose(traj.times / cap, [0, 4, 8, 10])


def spacing_spread(curve):
    closed = np.vstack([curve.points, curve.points[0] + curve.drift])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    return seg.max() - seg.min()


class TestReparamPolicy:
    """A curvature-dependent tangential velocity shears the node spacing;
    the automatic policy must keep it uniform, and reparam_every=0 must
    leave the shear in place."""

    def setup_method(self):
        self.pert = presets.perturbed_circle(256, amplitude=0.05, mode=3)
        self.spec = flows.parse_flow("0", c="k")
        self.dt = evolver.stability_cap(256, self.spec, self.pert.length)

    def test_auto_reparam_keeps_uniform_spacing(self):
        cfg = evolver.EvolutionConfig(dt=self.dt, t_final=0.02)
        final = evolver.evolve_curve(self.pert, self.spec, cfg).final
        assert spacing_spread(final) < 1e-5

    def test_disabled_reparam_shears_spacing(self):
        cfg = evolver.EvolutionConfig(dt=self.dt, t_final=0.02, reparam_every=0)
        final = evolver.evolve_curve(self.pert, self.spec, cfg).final
        assert spacing_spread(final) > 1e-4
