"""Spectral calculus against closed-form trigonometric oracles."""
import numpy as np
import numpy.testing as npt

from frenetflow import spectral

L = 2 * np.pi


def test_derivative_matches_closed_form():
    n = 64
    s = spectral.grid(n, L)
    f = np.sin(3 * s) + 0.5 * np.cos(5 * s)
    df = 3 * np.cos(3 * s) - 2.5 * np.sin(5 * s)
    npt.assert_allclose(spectral.derivative(f, L), df, atol=1e-12)


def test_derivative_higher_order():
    n = 64
    s = spectral.grid(n, L)
    f = np.cos(4 * s)
    npt.assert_allclose(spectral.derivative(f, L, order=2), -16 * f,
                        atol=1e-10)


def test_derivative_nonstandard_length():
    n = 128
    length = 5.0
    s = spectral.grid(n, length)
    w = 2 * np.pi / length
    f = np.sin(w * s)
    npt.assert_allclose(spectral.derivative(f, length), w * np.cos(w * s),
                        atol=1e-12)


def test_derivative_real_in_real_out():
    rng = np.random.default_rng(0)
    f = rng.normal(size=32)
    assert spectral.derivative(f, L).dtype == np.float64


def test_derivative_shift_symbol():
    # derivative of f(s)e^{i mu s} in the periodic representation:
    # (f' + i mu f) e^{i mu s}, so the shifted symbol must return f' + i mu f
    n = 64
    mu = 0.4
    s = spectral.grid(n, L)
    f = np.exp(2j * s)
    expected = (2j + 1j * mu) * f
    npt.assert_allclose(spectral.derivative(f, L, shift=mu), expected,
                        atol=1e-12)


def test_antiderivative_inverts_derivative():
    n = 64
    s = spectral.grid(n, L)
    f = np.sin(2 * s) - 0.3 * np.cos(7 * s)
    F = spectral.antiderivative(f, L)
    npt.assert_allclose(spectral.derivative(F, L), f, atol=1e-11)
    assert abs(F[0]) < 1e-14


def test_antiderivative_drops_mean():
    n = 32
    f = np.full(n, 1.7)
    npt.assert_allclose(spectral.antiderivative(f, L), 0.0, atol=1e-14)


def test_sample_shifted_exact_for_band_limited():
    n = 64
    s = spectral.grid(n, L)
    f = np.cos(3 * s) + np.sin(s)
    offset = 0.3701
    npt.assert_allclose(spectral.sample_shifted(f, L, offset),
                        np.cos(3 * (s + offset)) + np.sin(s + offset),
                        atol=1e-12)


def test_sample_shifted_keeps_real_input_real():
    rng = np.random.default_rng(1)
    f = rng.normal(size=64)
    out = spectral.sample_shifted(f, L, 0.123)
    assert out.dtype == np.float64


def test_dealias_removes_top_third():
    n = 48
    s = spectral.grid(n, L)
    low = np.cos(5 * s)
    high = np.cos(20 * s)
    out = spectral.dealias_two_thirds(low + high)
    npt.assert_allclose(out, low, atol=1e-12)


def test_integrate_exact_for_resolved_modes():
    n = 32
    s = spectral.grid(n, L)
    f = 2.0 + np.cos(3 * s)
    npt.assert_allclose(spectral.integrate(f, L), 2.0 * L, rtol=1e-14)


def test_integral_of_derivative_is_zero():
    rng = np.random.default_rng(2)
    f = rng.normal(size=64)
    npt.assert_allclose(spectral.integrate(spectral.derivative(f, L), L),
                        0.0, atol=1e-12)
