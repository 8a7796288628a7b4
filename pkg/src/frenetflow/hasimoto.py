"""Wave-side representation of curve dynamics.

A geometry profile (k, tau) maps to the complex field psi = k * exp(i*theta)
with theta the arclength antiderivative of tau. Curve flows become scalar
PDEs for psi; binormal flows with curvature-dependent speed become NLS-type
equations that spectral one-step methods integrate efficiently.

On a closed curve psi is periodic only when the total torsion is a multiple
of 2*pi. We therefore store the gauged field psi_tilde = psi * exp(-i*mu*s),
mu = mean(tau), which is always periodic; every operator acts on it through
the shifted Fourier symbol q -> q + mu. `WaveFunction.psi` holds the gauged
samples and `physical()` restores the quasi-periodic field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import flows, geometry, spectral
from .errors import BlowUp, ConfigError
from .flows import EvalContext, FlowSpec, FlowStructure

K_FLOOR = geometry.K_FLOOR

_GAUSS_X, _GAUSS_W = leggauss(32)


def _frozen_complex(values, n: Optional[int] = None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("wave samples must be one-dimensional")
    if n is not None and arr.size != n:
        raise ValueError(f"expected {n} samples, got {arr.size}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WaveFunction:
    """Gauged wave samples on a periodic grid.

    psi holds psi_tilde = k * exp(i*(theta - mu*s)); mu is the gauge
    wavenumber (mean torsion). The physical field is psi * exp(i*mu*s).
    """

    psi: np.ndarray
    length: float
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "psi", _frozen_complex(self.psi))
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "mu", float(self.mu))
        if self.length <= 0 or not np.isfinite(self.length):
            raise ValueError("domain length must be positive and finite")
        n = self.psi.size
        if n < 8 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {n}")
        if not np.all(np.isfinite(self.psi)):
            raise ValueError("wave samples must be finite")

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def grid(self) -> np.ndarray:
        return spectral.grid(self.n, self.length)

    def physical(self) -> np.ndarray:
        """Quasi-periodic field psi on the grid (gauge ramp restored)."""
        return np.asarray(self.psi * np.exp(1j * self.mu * self.grid))

    def with_psi(self, psi) -> "WaveFunction":
        return WaveFunction(psi, self.length, self.mu)

    def norm_squared(self) -> float:
        """Discrete integral of |psi|^2 (equals the bending energy)."""
        return float(spectral.integrate(np.abs(self.psi) ** 2, self.length))


# --- transforms -------------------------------------------------------------

def forward_transform(profile: geometry.GeometryProfile,
                      base_point: float = 0.0) -> WaveFunction:
    """Map (k, tau) to the wave representation.

    The phase is the arclength antiderivative of tau, zero at `base_point`;
    moving the base point multiplies the result by a single global phase.
    """
    tau = profile.torsion
    mu = float(np.mean(tau))
    osc_phase = spectral.antiderivative(tau - mu, profile.length)
    psi = profile.curvature * np.exp(1j * osc_phase)
    if base_point != 0.0:
        ramp = mu * base_point
        osc = spectral.sample_shifted(osc_phase, profile.length, base_point)[0]
        psi = psi * np.exp(-1j * (ramp + osc))
    return WaveFunction(psi, profile.length, mu)


def inverse_transform(wave: WaveFunction) -> geometry.GeometryProfile:
    """Recover (k, tau): k = |psi|, tau from the branch-cut-free quotient
    Im(psi_s * conj(psi)) / |psi|^2. Where k drops below the resolvable
    floor tau is filled from the nearest defined node and flagged."""
    k = np.abs(wave.psi)
    dpsi = spectral.derivative(wave.psi, wave.length, shift=wave.mu)
    cross = dpsi * np.conj(wave.psi)
    denom = np.maximum(k * k, K_FLOOR * K_FLOOR)
    tau = np.imag(cross) / denom
    undefined = k < K_FLOOR
    filled = None
    if np.any(undefined):
        bad, src = geometry.nearest_defined(wave.n, undefined)
        tau[bad] = tau[src]
        filled = undefined
    return geometry.GeometryProfile(k, tau, wave.length, tau_filled=filled)


@dataclass(frozen=True)
class _WaveGeometry:
    """Pointwise geometry of a wave: k, tau and their first derivatives via
    algebraic identities in psi (exact, no derivatives of quotients)."""

    k: np.ndarray
    tau: np.ndarray
    k_s: np.ndarray
    tau_s: np.ndarray
    dpsi: np.ndarray


def _wave_geometry(wave: WaveFunction) -> _WaveGeometry:
    psi = wave.psi
    k = np.abs(psi)
    dpsi = spectral.derivative(psi, wave.length, shift=wave.mu)
    ddpsi = spectral.derivative(psi, wave.length, order=2, shift=wave.mu)
    cross = dpsi * np.conj(psi)
    k2 = np.maximum(k * k, K_FLOOR * K_FLOOR)
    k_safe = np.maximum(k, K_FLOOR)
    tau = np.imag(cross) / k2
    k_s = np.real(cross) / k_safe
    tau_s = np.imag(ddpsi * np.conj(psi)) / k2 - 2.0 * tau * k_s / k_safe
    return _WaveGeometry(k, tau, k_s, tau_s, dpsi)


# --- the general equation ---------------------------------------------------

@dataclass(frozen=True)
class PotentialTerm:
    """Scalar potential entering the wave equation.

    Lambda is the curvature antiderivative of the binormal coefficient,
    nonlocal the running integral of the normal-coefficient source, and
    combined = a*k - i*b*k - Lambda + nonlocal multiplies psi in the RHS.
    """

    Lambda: np.ndarray
    nonlocal_term: np.ndarray
    combined: np.ndarray


def _lambda_of_k(structure: FlowStructure, spec: FlowSpec,
                 k: np.ndarray, time: float) -> np.ndarray:
    if structure.series is not None:
        out = np.zeros_like(k)
        for degree, coeff in structure.series:
            out += coeff / (degree + 1) * k ** (degree + 1)
        return out
    # arbitrary function of k alone: per-node Gauss-Legendre on [0, k_i]
    half = 0.5 * k
    nodes = np.outer(half, _GAUSS_X + 1.0)
    ctx = EvalContext(curvature=nodes, torsion=np.zeros_like(nodes),
                      s=np.zeros_like(nodes), t=time, length=1.0,
                      constants=spec.constants)
    values = np.asarray(flows._eval(spec.a, ctx), dtype=float)
    if values.ndim == 0:
        values = np.full_like(nodes, float(values))
    return half * (values @ _GAUSS_W)


def _coefficients_on_wave(wave: WaveFunction, spec: FlowSpec, time: float,
                          geo: _WaveGeometry):
    ctx = EvalContext(curvature=geo.k, torsion=geo.tau, s=wave.grid,
                      t=float(time), length=wave.length,
                      constants=spec.constants,
                      derivative_hints={("k", 1): geo.k_s,
                                        ("tau", 1): geo.tau_s})
    return flows.evaluate_in_context(spec, ctx)


def _potential_arrays(wave: WaveFunction, spec: FlowSpec, time: float,
                      geo: _WaveGeometry, structure: FlowStructure,
                      a: np.ndarray, b: np.ndarray) -> PotentialTerm:
    lam = _lambda_of_k(structure, spec, geo.k, time)
    source = (b - structure.ktau * geo.k_s) * geo.tau * geo.k
    mean = float(np.mean(source))
    nonlocal_term = spectral.antiderivative(source - mean, wave.length)
    nonlocal_term += mean * wave.grid
    combined = a * geo.k - 1j * b * geo.k - lam + nonlocal_term
    return PotentialTerm(lam, nonlocal_term, combined)


def potential_term(wave: WaveFunction, spec: FlowSpec,
                   time: float = 0.0) -> PotentialTerm:
    """Build the potential for the general equation on this wave state."""
    geo = _wave_geometry(wave)
    structure = flows.analyze_binormal(spec)
    a, b, _ = _coefficients_on_wave(wave, spec, time, geo)
    return _potential_arrays(wave, spec, time, geo, structure, a, b)


def general_rhs(wave: WaveFunction, spec: FlowSpec,
                time: float = 0.0) -> np.ndarray:
    """Time derivative of the gauged field under the flow's wave equation:

        psi_t = i * [ ((a/k) psi - i (b/k) psi)_ss - i c psi_s
                      + (a k - i b k - Lambda + nonlocal) psi ]

    Coefficients are sampled on the geometry implied by the wave itself;
    first derivatives of k and tau come from exact pointwise identities so
    the named reductions agree with their specialized forms to roundoff.
    """
    geo = _wave_geometry(wave)
    structure = flows.analyze_binormal(spec)
    a, b, c = _coefficients_on_wave(wave, spec, time, geo)
    k_safe = np.maximum(geo.k, K_FLOOR)
    dispersive = (a / k_safe - 1j * b / k_safe) * wave.psi
    d_ss = spectral.derivative(dispersive, wave.length, order=2, shift=wave.mu)
    pot = _potential_arrays(wave, spec, time, geo, structure, a, b)
    return 1j * (d_ss - 1j * c * geo.dpsi + pot.combined * wave.psi)


# --- specialized right-hand sides -------------------------------------------

def cubic_nls_rhs(wave: WaveFunction) -> np.ndarray:
    """i(psi_ss + |psi|^2 psi / 2) on the gauged field."""
    psi = wave.psi
    dd = spectral.derivative(psi, wave.length, order=2, shift=wave.mu)
    return 1j * (dd + 0.5 * np.abs(psi) ** 2 * psi)


def hirota_rhs(wave: WaveFunction, w: float) -> np.ndarray:
    """Cubic NLS plus the axial-velocity correction
    W(psi_sss + (3/2)|psi|^2 psi_s)."""
    psi = wave.psi
    dd = spectral.derivative(psi, wave.length, order=2, shift=wave.mu)
    ddd = spectral.derivative(psi, wave.length, order=3, shift=wave.mu)
    dpsi = spectral.derivative(psi, wave.length, shift=wave.mu)
    mod2 = np.abs(psi) ** 2
    return 1j * (dd + 0.5 * mod2 * psi) + w * (ddd + 1.5 * mod2 * dpsi)


def power_series_rhs(wave: WaveFunction, coefficients) -> np.ndarray:
    """i(((sum a_n k^(n-1)) psi)_ss + f(|psi|) psi) with
    f = sum a_n n/(n+1) |psi|^(n+1)."""
    psi = wave.psi
    k = np.abs(psi)
    speed = np.zeros_like(k)
    rotation = np.zeros_like(k)
    for degree, coeff in _series_terms(coefficients):
        speed += coeff * k ** (degree - 1)
        rotation += coeff * degree / (degree + 1) * k ** (degree + 1)
    dd = spectral.derivative(speed * psi, wave.length, order=2, shift=wave.mu)
    return 1j * (dd + rotation * psi)


def _series_terms(coefficients) -> list:
    return [(n + 1, float(c)) for n, c in enumerate(coefficients) if c != 0.0]


# --- solver kinds -----------------------------------------------------------

@dataclass(frozen=True)
class CubicNLS:
    pass


@dataclass(frozen=True)
class Hirota:
    w: float

    def __post_init__(self):
        object.__setattr__(self, "w", float(self.w))
        if not np.isfinite(self.w):
            raise ConfigError("Hirota coefficient must be finite")


@dataclass(frozen=True)
class PowerSeriesNLS:
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if not coeffs or not all(np.isfinite(c) for c in coeffs):
            raise ConfigError("power-series coefficients must be finite "
                              "and non-empty")
        if coeffs[-1] == 0.0:
            raise ConfigError("highest power-series coefficient must be "
                              "nonzero")


@dataclass(frozen=True)
class GeneralIntegroDifferential:
    spec: FlowSpec


SolverKind = Union[CubicNLS, Hirota, PowerSeriesNLS, GeneralIntegroDifferential]


def kind_name(kind: SolverKind) -> str:
    if isinstance(kind, CubicNLS):
        return "nls"
    if isinstance(kind, Hirota):
        return "hirota"
    if isinstance(kind, PowerSeriesNLS):
        return "powerseries"
    return "general"


# --- time stepping ----------------------------------------------------------

_YOSHIDA_C = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA_STAGES = (_YOSHIDA_C, 1.0 - 2.0 * _YOSHIDA_C, _YOSHIDA_C)


def _check_growth(before: np.ndarray, after: np.ndarray) -> None:
    peak0 = float(np.max(np.abs(before)))
    peak1 = float(np.max(np.abs(after)))
    if not np.isfinite(peak1) or peak1 > 10.0 * peak0 + 1e-12:
        raise BlowUp(f"wave amplitude grew from {peak0:.3g} to {peak1:.3g} "
                     "in one step")


def _strang_nls(psi: np.ndarray, length: float, mu: float, dt: float,
                a1: float) -> np.ndarray:
    """One Strang step of psi_t = i(a1 psi_ss + (a1/2)|psi|^2 psi): exact
    half-step linear phases around an exact nonlinear rotation."""
    q = spectral.wavenumbers(psi.size, length) + mu
    half_linear = np.exp(-1j * a1 * q * q * (0.5 * dt))
    psi = np.fft.ifft(half_linear * np.fft.fft(psi))
    psi = psi * np.exp(1j * (0.5 * a1 * dt) * np.abs(psi) ** 2)
    return np.fft.ifft(half_linear * np.fft.fft(psi))


def _composed_nls(psi: np.ndarray, length: float, mu: float, dt: float,
                  a1: float) -> np.ndarray:
    """Fourth-order three-stage composition of Strang steps (the middle
    stage runs backward). Each stage keeps the exact-phase structure, so
    the discrete norm is conserved to roundoff."""
    for c in _YOSHIDA_STAGES:
        psi = _strang_nls(psi, length, mu, c * dt, a1)
    return psi


def _ifrk4(psi: np.ndarray, length: float, mu: float, dt: float,
           symbol: np.ndarray, nonlinear) -> np.ndarray:
    """Integrating-factor RK4: the linear symbol is integrated exactly,
    the remainder `nonlinear` (physical space -> physical space) by RK4."""
    e_half = np.exp(0.5 * dt * symbol)
    e_full = e_half * e_half

    def n_hat(psi_hat: np.ndarray) -> np.ndarray:
        return np.fft.fft(nonlinear(np.fft.ifft(psi_hat)))

    v = np.fft.fft(psi)
    k1 = n_hat(v)
    k2 = n_hat(e_half * (v + 0.5 * dt * k1))
    k3 = n_hat(e_half * v + 0.5 * dt * k2)
    k4 = n_hat(e_full * v + dt * e_half * k3)
    v = e_full * v + dt / 6.0 * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)
    return np.fft.ifft(v)


def _step_cubic_nls(wave: WaveFunction, dt: float, a1: float = 1.0) -> WaveFunction:
    psi = _composed_nls(np.asarray(wave.psi), wave.length, wave.mu, dt, a1)
    _check_growth(wave.psi, psi)
    return wave.with_psi(psi)


def _step_hirota(wave: WaveFunction, w: float, dt: float) -> WaveFunction:
    q = spectral.wavenumbers(wave.n, wave.length) + wave.mu
    symbol = -1j * (q * q + w * q ** 3)
    length, mu = wave.length, wave.mu

    def nonlinear(psi: np.ndarray) -> np.ndarray:
        dpsi = spectral.derivative(psi, length, shift=mu)
        mod2 = np.abs(psi) ** 2
        term = 1j * 0.5 * mod2 * psi + w * 1.5 * mod2 * dpsi
        return spectral.dealias_two_thirds(term)

    psi = _ifrk4(np.asarray(wave.psi), length, mu, dt, symbol, nonlinear)
    _check_growth(wave.psi, psi)
    return wave.with_psi(psi)


def _step_power_series(wave: WaveFunction, coefficients,
                       dt: float) -> WaveFunction:
    terms = _series_terms(coefficients)
    if len(terms) == 1 and terms[0][0] == 1:
        return _step_cubic_nls(wave, dt, a1=terms[0][1])
    length, mu = wave.length, wave.mu

    def rotate(psi: np.ndarray, tau: float) -> np.ndarray:
        k = np.abs(psi)
        f = np.zeros_like(k)
        for degree, coeff in terms:
            f += coeff * degree / (degree + 1) * k ** (degree + 1)
        return psi * np.exp(1j * tau * f)

    def dispersive_rhs(psi: np.ndarray) -> np.ndarray:
        k = np.abs(psi)
        speed = np.zeros_like(k)
        for degree, coeff in terms:
            speed += coeff * k ** (degree - 1)
        prod = spectral.dealias_two_thirds(speed * psi)
        return 1j * spectral.derivative(prod, length, order=2, shift=mu)

    psi = rotate(np.asarray(wave.psi), 0.5 * dt)
    r1 = dispersive_rhs(psi)
    r2 = dispersive_rhs(psi + 0.5 * dt * r1)
    r3 = dispersive_rhs(psi + 0.5 * dt * r2)
    r4 = dispersive_rhs(psi + dt * r3)
    psi = psi + dt / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4)
    psi = rotate(psi, 0.5 * dt)
    _check_growth(wave.psi, psi)
    return wave.with_psi(psi)


def step_specialized(wave: WaveFunction, kind: SolverKind,
                     dt: float) -> WaveFunction:
    """Advance one step with the reduction-specific scheme."""
    if dt == 0.0:
        return wave
    if isinstance(kind, CubicNLS):
        return _step_cubic_nls(wave, dt)
    if isinstance(kind, Hirota):
        return _step_hirota(wave, kind.w, dt)
    if isinstance(kind, PowerSeriesNLS):
        return _step_power_series(wave, kind.coefficients, dt)
    if isinstance(kind, GeneralIntegroDifferential):
        return step_general(wave, kind.spec, dt)
    raise TypeError(f"unknown solver kind: {kind!r}")


def step_general(wave: WaveFunction, spec: FlowSpec, dt: float,
                 time: float = 0.0) -> WaveFunction:
    """One integrating-factor RK4 step of the general equation.

    The stiff symbol is frozen per step from the mean dispersive speed
    (plus the exact cubic symbol of a k*tau term in the binormal
    coefficient); the full right-hand side minus that linear part is the
    RK4 remainder.
    """
    if dt == 0.0:
        return wave
    structure = flows.analyze_binormal(spec)
    geo = _wave_geometry(wave)
    a, _, _ = _coefficients_on_wave(wave, spec, time, geo)
    mean_speed = float(np.mean(a / np.maximum(geo.k, K_FLOOR)))
    q = spectral.wavenumbers(wave.n, wave.length) + wave.mu
    symbol = -1j * (mean_speed * q * q + structure.ktau * q ** 3)
    length, mu = wave.length, wave.mu
    sym_phys = lambda psi: np.fft.ifft(symbol * np.fft.fft(psi))

    def nonlinear(psi: np.ndarray) -> np.ndarray:
        state = WaveFunction(psi, length, mu)
        residual = general_rhs(state, spec, time) - sym_phys(psi)
        return spectral.dealias_two_thirds(residual)

    psi = _ifrk4(np.asarray(wave.psi), length, mu, dt, symbol, nonlinear)
    _check_growth(wave.psi, psi)
    return wave.with_psi(psi)


def scheme_name(kind: SolverKind) -> str:
    """Identifier of the time integrator a kind dispatches to, recorded in
    run manifests."""
    if isinstance(kind, CubicNLS):
        return "splitstep-yoshida4"
    if isinstance(kind, Hirota):
        return "ifrk4-exact-symbol"
    if isinstance(kind, PowerSeriesNLS):
        terms = _series_terms(kind.coefficients)
        if len(terms) == 1 and terms[0][0] == 1:
            return "splitstep-yoshida4"
        return "splitstep-rk4-dispersive"
    return "ifrk4-frozen-mean"


@dataclass(frozen=True)
class WaveTrajectory:
    """Snapshots of a wave evolution at selected times."""

    times: np.ndarray
    waves: Tuple[WaveFunction, ...]
    scheme: str

    @property
    def final(self) -> WaveFunction:
        return self.waves[-1]


def evolve_wave(wave: WaveFunction, kind: SolverKind, dt: float,
                t_final: float, snapshot_stride: int = 0,
                start_time: float = 0.0) -> WaveTrajectory:
    """Integrate to t_final in steps of dt (last step shortened to land
    exactly). snapshot_stride > 0 keeps every stride-th state; the initial
    and final states are always kept."""
    if dt <= 0:
        raise ConfigError("dt must be positive")
    if t_final < 0:
        raise ConfigError("t_final must be nonnegative")
    times = [start_time]
    waves = [wave]
    t = 0.0
    step_index = 0
    current = wave
    while t < t_final - 1e-12 * max(1.0, t_final):
        h = min(dt, t_final - t)
        current = _dispatch_step(current, kind, h, start_time + t)
        t += h
        step_index += 1
        if snapshot_stride and step_index % snapshot_stride == 0:
            times.append(start_time + t)
            waves.append(current)
    if times[-1] != start_time + t:
        times.append(start_time + t)
        waves.append(current)
    return WaveTrajectory(np.asarray(times), tuple(waves),
                          scheme_name(kind))


def _dispatch_step(wave: WaveFunction, kind: SolverKind, dt: float,
                   time: float) -> WaveFunction:
    if isinstance(kind, GeneralIntegroDifferential):
        return step_general(wave, kind.spec, dt, time)
    return step_specialized(wave, kind, dt)


# --- wave generators --------------------------------------------------------

def soliton_wave(n: int, length: float, amplitude: float = 1.0) -> WaveFunction:
    """Bright-soliton initial state 2a*sech(a*(s - L/2)), centered so the
    periodic seam sits in the exponentially small tails."""
    s = spectral.grid(n, length)
    return WaveFunction(2.0 * amplitude / np.cosh(amplitude * (s - length / 2)),
                        length)


def plane_wave(n: int, length: float, amplitude: float,
               mode: int) -> WaveFunction:
    """Constant-modulus wave a*exp(i*q*s) with q = 2*pi*mode/L."""
    s = spectral.grid(n, length)
    q = 2.0 * np.pi * mode / length
    return WaveFunction(amplitude * np.exp(1j * q * s), length)


def random_wave(n: int, length: float, rng: np.random.Generator,
                modes: int = 0, floor: float = 0.1) -> WaveFunction:
    """Band-limited random wave with |psi| bounded away from zero.

    Modes up to n//6 by default, so cubic products stay alias-free on the
    grid."""
    modes = modes or max(1, n // 6)
    s = spectral.grid(n, length)
    w = 2.0 * np.pi / length
    bump = np.zeros(n, dtype=np.complex128)
    for m in range(1, modes + 1):
        c_re = rng.normal() + 1j * rng.normal()
        c_im = rng.normal() + 1j * rng.normal()
        bump += (c_re * np.cos(m * w * s) + c_im * np.sin(m * w * s)) / m
    peak = float(np.max(np.abs(bump)))
    if peak > 0:
        bump *= 0.45 / peak
    base = rng.uniform(0.6, 1.4)
    psi = base * (1.0 + bump)
    lowest = float(np.min(np.abs(psi)))
    if lowest < floor:
        psi += (floor - lowest) + 0.05
    return WaveFunction(psi, length)
