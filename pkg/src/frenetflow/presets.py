"""Built-in initial curves.

These are the only curve generators shipped; anything else enters through a
CSV file. All presets return arclength-uniform sampling.
"""
from __future__ import annotations

import numpy as np

from . import geometry
from .errors import ConfigError


def circle(n: int, radius: float = 1.0) -> geometry.DiscreteCurve:
    """Planar circle in the xy-plane, centered at the origin."""
    if radius <= 0:
        raise ConfigError("circle radius must be positive")
    theta = 2.0 * np.pi * np.arange(n) / n
    points = np.stack([radius * np.cos(theta), radius * np.sin(theta),
                       np.zeros(n)], axis=1)
    return geometry.DiscreteCurve(points, 2.0 * np.pi * radius)


def helix(n: int, radius: float = 1.0,
          slope: float = 0.5) -> geometry.DiscreteCurve:
    """One turn of a circular helix; the rise per turn is 2*pi*slope.

    The curve does not close: the axial advance is carried as the drift
    vector. Curvature is radius/(radius^2+slope^2), torsion
    slope/(radius^2+slope^2).
    """
    if radius <= 0:
        raise ConfigError("helix radius must be positive")
    u = 2.0 * np.pi * np.arange(n) / n
    points = np.stack([radius * np.cos(u), radius * np.sin(u), slope * u],
                      axis=1)
    length = 2.0 * np.pi * np.hypot(radius, slope)
    drift = np.array([0.0, 0.0, 2.0 * np.pi * slope])
    return geometry.DiscreteCurve(points, length, drift=drift)


def perturbed_circle(n: int, amplitude: float = 0.05, mode: int = 3,
                     radius: float = 1.0) -> geometry.DiscreteCurve:
    """Circle with an m-fold radial and vertical ripple.

    amplitude is relative to the radius and must stay below 0.3 so the
    curve remains embedded with a well-defined frame; mode is the integer
    ripple count, at least 2 and at most n/8 (resolvable on the grid).
    """
    if radius <= 0:
        raise ConfigError("perturbed_circle radius must be positive")
    if not 0.0 <= amplitude < 0.3:
        raise ConfigError("perturbed_circle amplitude must lie in [0, 0.3)")
    if mode != int(mode) or not 2 <= int(mode) <= n // 8:
        raise ConfigError(f"perturbed_circle mode must be an integer in "
                          f"[2, {n // 8}] for n={n}")
    mode = int(mode)
    eps = amplitude * radius
    if eps == 0.0:
        return circle(n, radius)

    # |gamma'(theta)|^2 = r^2 + (eps*mode)^2 since the radial and vertical
    # ripples are a quarter period apart
    def spd(theta):
        r = radius + eps * np.cos(mode * theta)
        return np.sqrt(r * r + (eps * mode) ** 2)

    theta = _arclength_angles(spd, n)
    r = radius + eps * np.cos(mode * theta)
    points = np.stack([r * np.cos(theta), r * np.sin(theta),
                       eps * np.sin(mode * theta)], axis=1)
    length = _loop_length(spd)
    return geometry.DiscreteCurve(points, length)


def _speed_harmonics(spd, terms: int = 1024):
    """Fourier coefficients of a smooth 2pi-periodic speed, truncated where
    they reach roundoff."""
    theta = 2.0 * np.pi * np.arange(terms) / terms
    coeff = np.fft.rfft(spd(theta)) / terms
    keep = np.abs(coeff) > 1e-17 * abs(coeff[0])
    keep[terms // 2:] = False  # drop the ambiguous top coefficient
    return coeff, np.nonzero(keep)[0]


def _loop_length(spd) -> float:
    coeff, _ = _speed_harmonics(spd)
    return float(2.0 * np.pi * coeff[0].real)


def _arclength_angles(spd, n: int) -> np.ndarray:
    """Angles theta_j at which arclength hits j/n of the loop.

    The arclength function is the term-by-term antiderivative of the speed's
    Fourier series, so both it and its Newton updates are evaluated to
    machine accuracy; a resampling built on local interpolation would leak
    broadband parameterization noise into every later spectral derivative.
    """
    coeff, idx = _speed_harmonics(spd)
    mean = coeff[0].real

    def arclen(theta):
        out = mean * theta
        for j in idx[1:]:
            out = out + 2.0 * (coeff[j] * (np.exp(1j * j * theta) - 1.0)
                               / (1j * j)).real
        return out

    theta = 2.0 * np.pi * np.arange(n) / n
    target = 2.0 * np.pi * mean * np.arange(n) / n
    for _ in range(50):
        resid = arclen(theta) - target
        if np.max(np.abs(resid)) < 1e-15 * mean:
            break
        theta = theta - resid / spd(theta)
    return theta
