"""Classical mean-field dynamics under an amplitude-modulated drive.

Integrates the nonlinear equations for the cavity amplitude ``alpha`` and
mechanical amplitude ``beta``, evaluates the three-sideband long-time
ansatz, and checks that a trajectory has settled onto a periodic orbit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ._rk4 import rk4_step, step_count
from .errors import InsufficientSpan, InvalidConfig, StepTooLarge
from .params import FloquetAmplitudes, SystemParams

STEPS_PER_PERIOD_MIN = 50
STEPS_PER_PERIOD_DEFAULT = 200


@dataclass(frozen=True)
class DriveModulation:
    """Drive ``eps_m1 e^{i Omega t} + eps_0 + eps_1 e^{-i Omega t}``."""

    eps_m1: complex = 0.0
    eps_0: complex = 0.0
    eps_1: complex = 0.0
    Omega: float = 2.0

    def __post_init__(self):
        if not self.Omega > 0:
            raise InvalidConfig("drive modulation frequency must be positive")

    def __call__(self, t):
        return (
            self.eps_m1 * np.exp(1j * self.Omega * t)
            + self.eps_0
            + self.eps_1 * np.exp(-1j * self.Omega * t)
        )

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.Omega


@dataclass(frozen=True)
class MeanFieldTrajectory:
    times: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.alpha) == len(self.beta)):
            raise ValueError("times, alpha and beta must have equal lengths")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def bare_detuning(p: SystemParams) -> float:
    if p.detuning_bare is not None:
        return p.detuning_bare
    if p.detuning is not None:
        return p.detuning
    raise InvalidConfig("a bare or effective detuning is required")


def default_dt(p: SystemParams, d: DriveModulation) -> float:
    fastest = max(abs(bare_detuning(p)), p.omega_m, d.Omega)
    return 2.0 * math.pi / (STEPS_PER_PERIOD_DEFAULT * fastest)


def integrate_mean_field(
    p: SystemParams,
    d: DriveModulation,
    t_end: float,
    dt: Optional[float] = None,
    alpha0: complex = 0.0,
    beta0: complex = 0.0,
) -> MeanFieldTrajectory:
    """RK4 integration of the classical amplitude equations from ``t = 0``."""
    delta0 = bare_detuning(p)
    fastest = max(abs(delta0), p.omega_m, d.Omega)
    if dt is None:
        dt = default_dt(p, d)
    if not dt > 0 or dt > 2.0 * math.pi / (STEPS_PER_PERIOD_MIN * fastest):
        raise StepTooLarge(
            f"dt={dt} gives fewer than {STEPS_PER_PERIOD_MIN} steps per period of the fastest rate {fastest}"
        )
    kappa, gamma, g, eta, wm = p.kappa, p.gamma, p.g, p.eta, p.omega_m

    def rhs(t, y):
        a, b = y
        x = b.conjugate() + b
        da = -1j * delta0 * a - 0.5 * kappa * a + 1j * g * a * x * x + d(t)
        db = -1j * wm * b - 0.5 * gamma * b + 2j * g * abs(a) ** 2 * x - 1j * eta * wm
        return np.array([da, db])

    n = step_count(t_end, dt)
    out = np.empty((n + 1, 2), dtype=complex)
    y = np.array([alpha0, beta0], dtype=complex)
    out[0] = y
    for i in range(n):
        y = rk4_step(rhs, i * dt, y, dt)
        out[i + 1] = y
    return MeanFieldTrajectory(times=dt * np.arange(n + 1), alpha=out[:, 0], beta=out[:, 1])


def eval_floquet(f: FloquetAmplitudes, t):
    """Cavity and mechanical amplitudes of the sideband ansatz at time(s) ``t``."""
    ea = np.exp(1j * f.Omega_a * t)
    eb = np.exp(1j * f.Omega_b * t)
    alpha = f.a_m1 * ea + f.a_0 + f.a_1 / ea
    beta = f.b_m1 * eb + f.b_0 + f.b_1 / eb
    return alpha, beta


def effective_detuning(p: SystemParams, beta: complex) -> float:
    if p.detuning_bare is None:
        raise InvalidConfig("effective detuning requires detuning_bare")
    x = 2.0 * complex(beta).real
    return p.detuning_bare - p.g * x * x


@dataclass(frozen=True)
class PeriodicityReport:
    alpha_drift: float
    beta_drift: float
    alpha_scale: float
    beta_scale: float
    tol: float

    @property
    def passed(self) -> bool:
        # <= so that an identically zero amplitude counts as periodic
        return self.alpha_drift <= self.tol * self.alpha_scale and self.beta_drift <= self.tol * self.beta_scale


def _shifted(times, values, t_eval, tau):
    dt = times[1] - times[0]
    k = tau / dt
    i0 = np.searchsorted(times, t_eval[0] - 1e-9 * dt)
    if abs(k - round(k)) < 1e-9 and np.allclose(np.diff(times), dt, rtol=1e-9, atol=0):
        k = int(round(k))
        return values[i0 + k : i0 + k + len(t_eval)]
    spline = CubicSpline(times, values)
    return spline(t_eval + tau)


def check_periodicity(traj: MeanFieldTrajectory, tau: float, t_min: float, tol: float) -> PeriodicityReport:
    """Compare the trajectory over ``[t_min, t_min + tau]`` with itself one ``tau`` later."""
    times = np.asarray(traj.times)
    if times[0] > t_min + 1e-12 or times[-1] < t_min + 2 * tau - 1e-9 * max(tau, 1.0):
        raise InsufficientSpan(f"trajectory must cover [{t_min}, {t_min + 2 * tau}]")
    sel = (times >= t_min - 1e-12) & (times <= t_min + tau + 1e-12)
    t_eval = times[sel]
    drifts, scales = [], []
    for values in (np.asarray(traj.alpha), np.asarray(traj.beta)):
        now = values[sel]
        later = _shifted(times, values, t_eval, tau)
        drifts.append(float(np.max(np.abs(later - now))))
        window = (times >= t_min - 1e-12) & (times <= t_min + 2 * tau + 1e-12)
        scales.append(float(np.max(np.abs(values[window]))))
    return PeriodicityReport(drifts[0], drifts[1], scales[0], scales[1], tol)


def project_floquet(traj: MeanFieldTrajectory, Omega_a: float, Omega_b: float, t_min: float) -> FloquetAmplitudes:
    """Least-squares projection of a settled trajectory onto the three-sideband basis.

    Diagnostic only: it assumes the trajectory is already periodic after
    ``t_min`` and contains no harmonics beyond the first.
    """
    sel = traj.times >= t_min
    t = traj.times[sel]
    coeffs = []
    for values, Om in ((traj.alpha[sel], Omega_a), (traj.beta[sel], Omega_b)):
        basis = np.column_stack([np.exp(1j * Om * t), np.ones_like(t), np.exp(-1j * Om * t)])
        c, *_ = np.linalg.lstsq(basis, values, rcond=None)
        coeffs.append(c)
    (a_m1, a_0, a_1), (b_m1, b_0, b_1) = coeffs
    return FloquetAmplitudes(a_m1, a_0, a_1, b_m1, b_0, b_1, Omega_a, Omega_b)
