"""FFT calculus on uniform periodic grids.

All routines take n equispaced samples of a function on [0, L). Odd-order
derivatives zero the (unpaired) Nyquist coefficient so differentiation maps
real input to real output.
"""
from __future__ import annotations

import numpy as np


def grid(n: int, length: float) -> np.ndarray:
    """Sample points s_j = j * L / n."""
    return np.arange(n) * (length / n)


def wavenumbers(n: int, length: float) -> np.ndarray:
    """Angular wavenumbers in numpy FFT layout."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def derivative(values, length: float, order: int = 1, shift: float = 0.0,
               axis: int = -1):
    """order-th spectral derivative along `axis`.

    `shift` offsets every wavenumber by a constant; with it, the samples are
    treated as the periodic factor f of a field f(s) * exp(i * shift * s) and
    the derivative returned is the one of the full field, still in periodic
    representation.
    """
    values = np.asarray(values)
    n = values.shape[axis]
    sym = (1j * (wavenumbers(n, length) + shift)) ** order
    if order % 2 == 1 and n % 2 == 0 and shift == 0.0:
        sym[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(values, axis=axis) * sym.reshape(shape),
                      axis=axis)
    if np.isrealobj(values) and shift == 0.0:
        return out.real
    return out


def antiderivative(values, length: float):
    """Periodic antiderivative of the zero-mean part, vanishing at s = 0.

    The mean of the input is discarded; callers that need it must add the
    mean * s ramp themselves.
    """
    values = np.asarray(values)
    n = values.shape[-1]
    q = wavenumbers(n, length)
    fhat = np.fft.fft(values)
    fhat[0] = 0.0
    if n % 2 == 0:
        fhat[n // 2] = 0.0
    q = q.copy()
    q[0] = 1.0  # dummy, coefficient already zeroed
    out = np.fft.ifft(fhat / (1j * q))
    out = out - out[0]
    if np.isrealobj(values):
        return out.real
    return out


def sample_shifted(values, length: float, offset: float, axis: int = -1):
    """Trigonometric interpolation of the samples at s + offset."""
    values = np.asarray(values)
    n = values.shape[axis]
    q = wavenumbers(n, length)
    phase = np.exp(1j * q * offset)
    if n % 2 == 0:
        # Nyquist mode has no conjugate partner; a real cosine keeps real
        # input real under the shift.
        phase[n // 2] = np.cos(q[n // 2] * offset)
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(values, axis=axis) * phase.reshape(shape),
                      axis=axis)
    if np.isrealobj(values):
        return out.real
    return out


def dealias_two_thirds(values):
    """Zero the top third of the spectrum (2/3 rule for cubic products)."""
    values = np.asarray(values)
    n = values.shape[-1]
    modes = np.rint(np.fft.fftfreq(n) * n).astype(int)
    fhat = np.fft.fft(values)
    fhat[np.abs(modes) > n // 3] = 0.0
    out = np.fft.ifft(fhat)
    if np.isrealobj(values):
        return out.real
    return out


def integrate(values, length: float, axis: int = -1):
    """Periodic quadrature: L times the sample mean (exact for resolved
    trigonometric polynomials)."""
    return np.mean(values, axis=axis) * length
