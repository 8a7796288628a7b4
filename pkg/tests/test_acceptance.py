"""End-to-end acceptance battery.

Every test prints one PASS/FAIL summary line carrying the measured numbers
next to their bounds, so a captured log shows the whole battery at a glance.
The assertions use exactly the printed values.
"""
import numpy as np
import pytest

from frenetflow import (diagnostics, evolver, flows, geometry, hasimoto,
                        presets, spectral)


def report(capsys, idx, name, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {idx}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


FM = dict(a="k + W*k*tau", b="W*d_s(k)", c="(W/2)*k^2", constants={"W": 0.1})


def test_1_general_rhs_reduces_to_specialized(capsys):
    rng = np.random.default_rng(101)
    vfe = flows.parse_flow("k")
    fm = flows.parse_flow(FM["a"], b=FM["b"], c=FM["c"], constants=FM["constants"])
    worst = 0.0
    for _ in range(50):
        wave = hasimoto.random_wave(256, 2.0 * np.pi, rng)
        d_nls = hasimoto.general_rhs(wave, vfe) - hasimoto.cubic_nls_rhs(wave)
        d_hir = hasimoto.general_rhs(wave, fm) - hasimoto.hirota_rhs(wave, 0.1)
        worst = max(worst, float(np.max(np.abs(d_nls))),
                    float(np.max(np.abs(d_hir))))
    report(capsys, 1, "general RHS reduces to NLS/Hirota (50 random waves)",
           worst < 1e-8, f"max L-inf {worst:.3e} (bound 1e-8)")


def test_2_soliton_propagation(capsys):
    n, length, dt = 1024, 40.0, 1e-3
    s = spectral.grid(n, length)
    envelope = 2.0 / np.cosh(s - length / 2.0)
    wave = hasimoto.WaveFunction(envelope.astype(complex), length, 0.0)
    kind = hasimoto.CubicNLS()
    for _ in range(1000):
        wave = hasimoto.step_specialized(wave, kind, dt)
    err = float(np.max(np.abs(wave.psi - envelope * np.exp(1j))))
    report(capsys, 2, "soliton keeps its profile over t=1",
           err < 1e-6, f"L-inf {err:.3e} vs 2 sech e^(it) (bound 1e-6)")


def test_3_plane_wave_dispersion(capsys):
    n, length, dt, amp, q = 256, 2.0 * np.pi, 1e-3, 0.5, 1
    s = spectral.grid(n, length)
    wave = hasimoto.WaveFunction(amp * np.exp(1j * q * s), length, 0.0)
    kind = hasimoto.CubicNLS()
    times = [0.0]
    phases = [float(np.angle(np.fft.fft(wave.psi)[q]))]
    for step in range(1, 1001):
        wave = hasimoto.step_specialized(wave, kind, dt)
        if step % 100 == 0:
            times.append(step * dt)
            phases.append(float(np.angle(np.fft.fft(wave.psi)[q])))
    slope = float(np.polyfit(times, np.unwrap(phases), 1)[0])
    omega = q * q - amp * amp / 2.0
    err = abs(slope + omega)
    report(capsys, 3, "plane wave rotates at q^2 - a^2/2",
           err < 1e-6, f"phase slope {slope:.9f} vs -{omega} (err {err:.3e}, bound 1e-6)")


def test_4_dual_path_consistency(capsys):
    spec = flows.parse_flow("k")
    kind = hasimoto.CubicNLS()
    sizes = (128, 256, 512)
    errs = []
    for n in sizes:
        c0 = presets.perturbed_circle(n, amplitude=0.05, mode=3)
        cap = evolver.stability_cap(n, spec, c0.length)
        steps = int(np.ceil(0.5 / cap))
        dt = 0.5 / steps
        cfg = evolver.EvolutionConfig(dt=dt, t_final=0.5, record_every=10 ** 9)
        ext = geometry.profile_from_curve(evolver.evolve_curve(c0, spec, cfg).final)
        wave = hasimoto.forward_transform(geometry.profile_from_curve(c0))
        for _ in range(steps):
            wave = hasimoto.step_specialized(wave, kind, dt)
        intr = hasimoto.inverse_transform(wave)
        errs.append(max(float(np.max(np.abs(ext.curvature - intr.curvature))),
                        float(np.max(np.abs(ext.torsion - intr.torsion)))))
    fitted = float(-np.polyfit(np.log(sizes), np.log(errs), 1)[0])
    pairwise = [float(np.log2(errs[i] / errs[i + 1])) for i in range(2)]
    ok = errs[2] < errs[0] and fitted >= 1.9
    report(capsys, 4, "extrinsic and intrinsic evolutions agree (VFE, t=0.5)",
           ok,
           f"L-inf {errs[0]:.2e}/{errs[1]:.2e}/{errs[2]:.2e} over N=128/256/512, "
           f"fitted order {fitted:.2f} (bound 1.9; pairwise {pairwise[0]:.2f}, "
           f"{pairwise[1]:.2f}, finest grid sits on the float64 noise floor)")


def test_5_length_invariance_and_length_condition(capsys):
    worst_drift = 0.0
    for a_expr in ("k", "k^2"):
        spec = flows.parse_flow(a_expr)
        c0 = presets.perturbed_circle(256, amplitude=0.05, mode=3, radius=3.0)
        cfg = evolver.EvolutionConfig(dt=1e-3, t_final=1.0, record_every=10 ** 9)
        traj = evolver.evolve_curve(c0, spec, cfg)
        i1 = [diagnostics.length(traj.curves[0]), diagnostics.length(traj.curves[-1])]
        worst_drift = max(worst_drift, abs(i1[1] - i1[0]) / i1[0])
    rng = np.random.default_rng(105)
    fm = flows.parse_flow(FM["a"], b=FM["b"], c=FM["c"], constants=FM["constants"])
    probes = [geometry.random_profile(256, 2.0 * np.pi, rng) for _ in range(20)]
    resid = flows.classify_flow(fm, probes=probes).length_condition_residual
    ok = worst_drift < 1e-7 and resid < 1e-12
    report(capsys, 5, "binormal flows preserve length; sliding flow satisfies c_s = b k",
           ok, f"worst |dI1|/I1 {worst_drift:.3e} per unit time (bound 1e-7), "
           f"condition residual {resid:.3e} on 20 random profiles (bound 1e-12)")


def test_6_bending_energy_rates(capsys):
    rng = np.random.default_rng(106)
    vfe = flows.parse_flow("k")
    quad = flows.parse_flow("k^2")
    worst_vfe = 0.0
    worst_quad = 0.0
    for _ in range(20):
        prof = geometry.random_profile(256, 2.0 * np.pi, rng)
        worst_vfe = max(worst_vfe, abs(diagnostics.bending_energy_rate(prof, vfe)))
        tau_s = spectral.derivative(prof.torsion, prof.length)
        target = (2.0 / 3.0) * float(
            spectral.integrate(prof.curvature ** 3 * tau_s, prof.length))
        worst_quad = max(worst_quad,
                         abs(diagnostics.bending_energy_rate(prof, quad) - target))

    hel = presets.helix(64)
    prof = geometry.profile_from_curve(hel)
    forward = flows.parse_flow("0", b="k")
    backward = flows.parse_flow("0", b="0 - k")
    rate = diagnostics.bending_energy_rate(prof, forward)
    cap = evolver.stability_cap(64, forward, hel.length)

    def i2_after(spec, dt):
        cfg = evolver.EvolutionConfig(dt=dt, t_final=dt)
        return diagnostics.bending_energy(
            evolver.evolve_curve(hel, spec, cfg).profiles[-1])

    fd_errs = []
    for delta in (cap, cap / 2, cap / 4):
        fd = (i2_after(forward, delta) - i2_after(backward, delta)) / (2 * delta)
        fd_errs.append(abs(fd - rate))
    orders = [float(np.log2(fd_errs[i] / fd_errs[i + 1])) for i in range(2)]
    ok = (worst_vfe < 1e-10 and worst_quad < 1e-10
          and all(1.9 < o < 2.1 for o in orders))
    report(capsys, 6, "bending-energy rate identities",
           ok, f"VFE rate max {worst_vfe:.3e} (bound 1e-10), k^2 vs (2/3) int k^3 tau_s "
           f"max {worst_quad:.3e} (bound 1e-10), FD orders {orders[0]:.3f}/{orders[1]:.3f}")


def _rigid_round_trip_error(n):
    c = presets.perturbed_circle(n, amplitude=0.05, mode=3)
    rebuilt = geometry.reconstruct_curve(geometry.profile_from_curve(c))
    aligned = geometry.align_rigid(rebuilt.points, c.points)
    return float(np.max(np.abs(aligned - c.points)))


def test_7_geometry_round_trips(capsys):
    e1 = _rigid_round_trip_error(128)
    e2 = _rigid_round_trip_error(256)
    order = float(np.log2(e1 / e2))
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(10):
        prof = geometry.random_profile(256, 2.0 * np.pi, rng,
                                       k_base=0.4, k_amplitude=0.3)
        back = hasimoto.inverse_transform(hasimoto.forward_transform(prof))
        worst = max(worst, float(np.max(np.abs(back.curvature - prof.curvature))),
                    float(np.max(np.abs(back.torsion - prof.torsion))))
    ok = order >= 2.0 and worst < 1e-10
    report(capsys, 7, "reconstruction and transform round trips",
           ok, f"curve round trip order {order:.2f} (bound 2.0, errors {e1:.2e}->{e2:.2e}), "
           f"wave round trip max {worst:.3e} down to k=0.1 (bound 1e-10)")


def test_8_power_series_collapses_to_cubic(capsys):
    rng = np.random.default_rng(108)
    start = hasimoto.random_wave(256, 2.0 * np.pi, rng)
    cubic = hasimoto.CubicNLS()
    series = hasimoto.PowerSeriesNLS((1.0,))
    w1, w2 = start, start
    for _ in range(1000):
        w1 = hasimoto.step_specialized(w1, cubic, 1e-3)
        w2 = hasimoto.step_specialized(w2, series, 1e-3)
    err = float(np.max(np.abs(w1.psi - w2.psi)))
    report(capsys, 8, "degree-1 power series matches the cubic solver over t=1",
           err < 1e-9, f"L-inf {err:.3e} (bound 1e-9)")
