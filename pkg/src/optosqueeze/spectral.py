"""Frequency-domain route to the steady-state position variance.

In the Fourier domain the rotating-frame fluctuations are
``u(w) = (i w I + M)^-1 n(w)``; the mechanical position is a linear
combination of the four input noises,
``Q(w) = a_x X_in + a_y Y_in + a_q Q_in + a_p P_in``. The coefficients
are named by the input they multiply; the literature letters them
``A, B, C, D`` or ``A, B, E, F`` in the same order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .covariance import drift_rwa, is_hurwitz
from .errors import SingularResolvent, ToleranceNotMet, UnstableDrift
from .params import CouplingSet, SystemParams


@dataclass(frozen=True)
class TransferCoefficients:
    a_x: complex
    a_y: complex
    a_q: complex
    a_p: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.a_x, self.a_y, self.a_q, self.a_p])


@dataclass(frozen=True)
class SpectrumTable:
    omegas: np.ndarray
    s_q: np.ndarray


@dataclass(frozen=True)
class SpectralIntegral:
    value: float
    error: float
    window: float
    tail: float


MAX_WINDOW_DOUBLINGS = 8


def _prefactors(p: SystemParams) -> np.ndarray:
    return np.sqrt([p.kappa, p.kappa, p.gamma, p.gamma])


def _coefficient_row(m: np.ndarray, pref: np.ndarray, omega: float) -> np.ndarray:
    a = 1j * omega * np.eye(4) + m
    try:
        # row 3 of a^-1 is the solution of a^T x = e_3
        row = np.linalg.solve(a.T, np.array([0.0, 0.0, 1.0, 0.0], dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SingularResolvent(f"i w I + M is singular at w={omega}") from exc
    return row * pref


def transfer_coefficients(c: CouplingSet, p: SystemParams, omega: float) -> TransferCoefficients:
    row = _coefficient_row(drift_rwa(c, p).m, _prefactors(p), omega)
    if not np.all(np.isfinite(row)):
        raise SingularResolvent(f"i w I + M is singular at w={omega}")
    return TransferCoefficients(*row)


def printed_transfer_coefficients(c: CouplingSet, p: SystemParams, omega: float) -> TransferCoefficients:
    """Closed-form coefficients written out in terms of the couplings."""
    Gp, Gm, Gtp, Gtm = c.G_plus, c.G_minus, c.Gt_plus, c.Gt_minus
    k, gm, w = p.kappa, p.gamma, omega
    kw = k - 2j * w
    den = kw**2 * (-4 * Gtm * Gtp + (2 * w + 1j * gm) ** 2) + 8 * Gm * Gp * (2 * w + 1j * k) * (2 * w + 1j * gm) - 16 * Gm**2 * Gp**2
    if den == 0:
        raise SingularResolvent(f"closed-form denominator vanishes at w={omega}")
    sk, sg = math.sqrt(k), math.sqrt(gm)
    a_x = -8 * Gp * sk * Gtm * kw / den
    a_y = 4 * Gm * sk * (-4 * Gm * Gp + (2 * w + 1j * k) * (2 * w + 1j * gm)) / den
    a_q = 2 * kw * sg * (4 * Gm * Gp + kw * (gm - 2j * w)) / den
    a_p = -4 * Gtm * kw**2 * sg / den
    return TransferCoefficients(a_x, a_y, a_q, a_p)


def _occupations(p: SystemParams) -> np.ndarray:
    return np.array([p.n_a, p.n_a, p.n_b, p.n_b]) + 0.5


def position_spectrum(c: CouplingSet, p: SystemParams, omega: float) -> float:
    """Symmetrized position fluctuation spectrum ``S_Q(w)``."""
    row = _coefficient_row(drift_rwa(c, p).m, _prefactors(p), omega)
    return float(np.dot(np.abs(row) ** 2, _occupations(p)))


def spectrum_table(c: CouplingSet, p: SystemParams, omegas) -> SpectrumTable:
    m, pref, occ = drift_rwa(c, p).m, _prefactors(p), _occupations(p)
    omegas = np.asarray(omegas, dtype=float)
    s = np.array([np.dot(np.abs(_coefficient_row(m, pref, w)) ** 2, occ) for w in omegas])
    return SpectrumTable(omegas, s)


def integration_window(c: CouplingSet, p: SystemParams) -> float:
    return 50.0 * max(p.kappa, abs(c.G_plus), p.gamma, abs(c.Gt_plus))


def _breakpoints(eigs: np.ndarray, upper: float) -> list:
    pts = {0.0, upper}
    for lam in eigs:
        centre, width = abs(lam.imag), abs(lam.real)
        pts.add(min(centre, upper))
        step = width
        while step < upper:
            for x in (centre - step, centre + step):
                if 0.0 < x < upper:
                    pts.add(x)
            step *= 3.0
    return sorted(pts)


def integrate_spectrum(
    c: CouplingSet,
    p: SystemParams,
    epsrel: float = 1e-10,
    max_rel_error: float = 1e-6,
) -> SpectralIntegral:
    """Steady-state position variance ``(1/2pi) int S_Q(w) dw``.

    ``S_Q`` is even, so ``[0, W]`` is integrated adaptively between
    breakpoints placed around every resonance, and the ``C/w^2`` tail
    beyond ``W`` is added analytically; its ``1/w^4`` correction is
    fitted from ``S_Q(W)`` and ``S_Q(2W)`` and also bounds the tail error.
    ``W`` is doubled until the combined error estimate meets
    ``max_rel_error``.
    """
    m = drift_rwa(c, p).m
    if not is_hurwitz(m):
        raise UnstableDrift("rotating-frame drift is not Hurwitz; the spectrum has real-axis poles")
    pref, occ = _prefactors(p), _occupations(p)
    eigs = np.linalg.eigvals(m)
    window = max(integration_window(c, p), 4.0 * float(np.max(np.abs(eigs))))

    def s(w):
        return float(np.dot(np.abs(_coefficient_row(m, pref, w)) ** 2, occ))

    pts = _breakpoints(eigs, window)
    total, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, e = quad(s, lo, hi, epsrel=epsrel, epsabs=0.0, limit=200)
        total += val
        err += e
    for _ in range(MAX_WINDOW_DOUBLINGS + 1):
        tail, tail_err = _tail(s, window)
        value = (2.0 * total + 2.0 * tail) / (2.0 * math.pi)
        err_total = (2.0 * err + 2.0 * tail_err) / (2.0 * math.pi)
        if err_total <= max_rel_error * abs(value):
            break
        # the tail bound is loose while W is close to the resonances; push W out
        val, e = quad(s, window, 2.0 * window, epsrel=epsrel, epsabs=0.0, limit=200)
        total += val
        err += e
        window *= 2.0
    else:
        raise ToleranceNotMet(f"estimated error {err_total:.3g} exceeds {max_rel_error:g} relative")
    return SpectralIntegral(value, err_total, window, 2.0 * tail / (2.0 * math.pi))


def _tail(s, window: float) -> tuple[float, float]:
    """Integral of ``s`` over ``[W, inf)`` and a bound on its truncation error."""
    # S w^2 = C + C2 / w^2 + ..., fitted from S at W and 2W
    a1 = window**2 * s(window)
    a2 = 4.0 * window**2 * s(2.0 * window)
    c2 = (a1 - a2) * window**2 * 4.0 / 3.0
    c0 = a1 - c2 / window**2
    tail = c0 / window + c2 / (3.0 * window**3)
    # the first neglected order is bounded by the size of the C2 correction
    return tail, abs(c2) / (3.0 * window**3)
