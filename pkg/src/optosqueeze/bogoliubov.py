"""Bogoliubov-mode picture and the adiabatic steady-state variance.

With ``tanh r = G1/G0`` the mechanical Bogoliubov mode
``beta = cosh(r) b + sinh(r) b^dag`` couples to the cavity through a pure
beam splitter of rate ``G_eff``; its quadratures are ``X_beta = e^r Q`` and
``Y_beta = e^-r P``. Eliminating the cavity (``kappa >> G_eff``) gives a
closed-form steady-state position variance.

Two switches expose ambiguities in the closed-form route:

``a2c_sign``
    ``"printed"`` keeps a negative self-correlation for the third
    effective force; ``"positive"`` uses a positive one.
``form``
    ``"consistent"`` is the 2x2 steady-state system whose solution is the
    closed-form variance of :func:`adiabatic_variance`; ``"printed"`` is
    the literal 2x2 system, which differs from the closed form in the sign
    of the ``Y_beta`` coupling and uses ``Gt_plus`` in place of
    ``Gt_minus`` in the ``X_beta`` coupling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import drift_rwa, is_hurwitz, solve_lyapunov
from .errors import DegenerateDenominator, NonPositiveVariance, SingularSystem, UnstableDrift
from .params import CouplingSet, SystemParams

A2C_SIGNS = ("printed", "positive")
DEGENERATE_TOL = 1e-15


@dataclass(frozen=True)
class BogoliubovState:
    x_var: float
    y_var: float

    @property
    def occupancy(self) -> float:
        return 0.5 * (self.x_var + self.y_var) - 0.5


def bogoliubov_occupancy(v_mech: np.ndarray, r: float) -> float:
    """Mean phonon number of the Bogoliubov mode for a zero-mean mechanical state."""
    v_mech = np.asarray(v_mech, dtype=float)
    vqq, vpp = v_mech[0, 0], v_mech[1, 1]
    if not (vqq > 0 and vpp > 0):
        raise NonPositiveVariance("mechanical variances must be positive")
    return 0.5 * (math.exp(2 * r) * vqq + math.exp(-2 * r) * vpp) - 0.5


def _checked(c: CouplingSet):
    if not c.defined:
        raise DegenerateDenominator("Bogoliubov transform needs real couplings with |G1| < |G0|")
    if c.G_minus == 0 or c.G_plus == 0:
        raise DegenerateDenominator("G_minus and G_plus must be non-zero")
    return c.G_eff, c.r, c.h


def _sign(a2c_sign: str) -> float:
    if a2c_sign not in A2C_SIGNS:
        raise ValueError(f"a2c_sign must be one of {A2C_SIGNS}")
    return -1.0 if a2c_sign == "printed" else 1.0


def adiabatic_bogoliubov_variances(
    c: CouplingSet, p: SystemParams, a2c_sign: str = "printed", form: str = "consistent"
) -> BogoliubovState:
    """Steady-state Bogoliubov quadrature variances after adiabatic elimination."""
    Ge, r, h = _checked(c)
    s = _sign(a2c_sign)
    na, nb, k, gm = p.n_a + 0.5, p.n_b + 0.5, p.kappa, p.gamma
    cav = 2 * Ge**2 / (k * h) * na
    cx = cav + gm / (2 * h) * math.exp(2 * r) * nb
    cy = cav + s * gm / (2 * h) * math.exp(-2 * r) * nb
    if form == "consistent":
        a = c.G_plus / (c.G_minus * h) * c.Gt_minus
        b = c.G_minus / (c.G_plus * h) * c.Gt_minus
        # X = cx + a Y, Y = cy + b X
        lhs = np.array([[1.0, -a], [-b, 1.0]])
        if abs(c.Gt_minus**2 - h**2) < DEGENERATE_TOL:
            raise SingularSystem("Gt_minus^2 = h^2 makes the steady-state system singular")
    elif form == "printed":
        a = c.G_plus / (c.G_minus * h) * c.Gt_minus
        b = c.G_minus / (c.G_plus * h) * c.Gt_plus
        # X = cx - a Y, Y = cy + b X
        lhs = np.array([[1.0, a], [-b, 1.0]])
        if abs(np.linalg.det(lhs)) < DEGENERATE_TOL:
            raise SingularSystem("steady-state system is singular")
    else:
        raise ValueError("form must be 'consistent' or 'printed'")
    x, y = np.linalg.solve(lhs, [cx, cy])
    return BogoliubovState(float(x), float(y))


def adiabatic_variance(c: CouplingSet, p: SystemParams, a2c_sign: str = "printed") -> float:
    """Closed-form adiabatic steady-state position variance.

    With ``a2c_sign="printed"`` this is the closed form evaluated term by
    term; with ``"positive"`` it is ``e^{-2r} <X_beta^2>`` from the
    consistent 2x2 system with the sign flipped.
    """
    Ge, r, h = _checked(c)
    if _sign(a2c_sign) > 0:
        return math.exp(-2 * r) * adiabatic_bogoliubov_variances(c, p, "positive").x_var
    Gtm = c.Gt_minus
    denom = Gtm**2 - h**2
    if abs(denom) < DEGENERATE_TOL:
        raise DegenerateDenominator("Gt_minus^2 = h^2 is a pole of the closed form")
    na, nb, k, gm = p.n_a + 0.5, p.n_b + 0.5, p.kappa, p.gamma
    x = Gtm * c.G_plus / (c.G_minus * h)
    e2 = math.exp(2 * r)
    thermal = gm * nb * (x / e2 - e2)
    cavity = 4 * Ge**2 / k * na * (1 + x)
    return h / e2 / (2 * denom) * (thermal - cavity)


def adiabatic_elimination_covariance(c: CouplingSet, p: SystemParams) -> np.ndarray:
    """Mechanical 2x2 steady state after eliminating the cavity from the rotating-frame model.

    Sets the cavity derivative to zero in the matrix equations (no
    Bogoliubov algebra) and solves the reduced Lyapunov equation. This is
    the reference for how an adiabatic approximation should behave as
    ``kappa / G_eff`` grows.
    """
    m = drift_rwa(c, p).m
    A, B, C, M22 = m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]
    Ainv = np.linalg.inv(A)
    m_eff = M22 - C @ Ainv @ B
    # cavity inputs reach the mechanics through -C A^-1
    N = np.hstack([-C @ Ainv * math.sqrt(p.kappa), math.sqrt(p.gamma) * np.eye(2)])
    occ = np.array([p.n_a, p.n_a, p.n_b, p.n_b]) + 0.5
    if not is_hurwitz(m_eff):
        raise UnstableDrift("reduced mechanical drift is unstable")
    return solve_lyapunov(m_eff, N @ np.diag(occ) @ N.T)


def adiabatic_elimination_variance(c: CouplingSet, p: SystemParams) -> float:
    return float(adiabatic_elimination_covariance(c, p)[0, 0])
