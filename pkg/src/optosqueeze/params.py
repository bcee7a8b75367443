"""Physical parameters and effective optomechanical couplings.

All rates and frequencies are measured in units of the mechanical
frequency, so ``omega_m`` is pinned to 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import InvalidConfig, NegativeOccupancy, NonPositiveRate


@dataclass(frozen=True)
class SystemParams:
    """Rates and bath occupancies of the cavity + membrane system.

    Parameters
    ----------
    kappa, gamma : float
        Cavity and mechanical energy decay rates.
    g : float
        Single-photon quadratic coupling.
    n_a, n_b : float
        Thermal occupancies of the optical and mechanical baths.
    eta : float
        Strength of the static force on the membrane.
    detuning : float, optional
        Effective detuning of the linearized dynamics. When ``None`` it is
        derived from ``detuning_bare`` and the mechanical amplitude.
    detuning_bare : float, optional
        Cavity-laser detuning entering the classical equations.
    omega_m : float
        Mechanical frequency; the unit of everything else.
    """

    kappa: float = 0.1
    gamma: float = 1e-6
    g: float = 1e-4
    n_a: float = 0.0
    n_b: float = 10.0
    eta: float = 0.0
    detuning: Optional[float] = 1.0
    detuning_bare: Optional[float] = None
    omega_m: float = 1.0

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class FloquetAmplitudes:
    """Sideband coefficients of the long-time classical amplitudes."""

    a_m1: complex = 0.8
    a_0: complex = 2.0
    a_1: complex = 0.8
    b_m1: complex = 25.0
    b_0: complex = 100.0
    b_1: complex = 62.5
    Omega_a: float = 2.0
    Omega_b: float = 2.0

    def __post_init__(self):
        if not (self.Omega_a > 0 and self.Omega_b > 0):
            raise InvalidConfig("modulation frequencies must be positive")

    def with_(self, **changes) -> "FloquetAmplitudes":
        return replace(self, **changes)

    def with_mechanical_sum(self, total: float, ratio: float) -> "FloquetAmplitudes":
        """Set ``b_m1 + b_1 = total`` keeping ``b_1 / b_m1 = ratio``."""
        b_m1 = total / (1.0 + ratio)
        return replace(self, b_m1=b_m1, b_1=ratio * b_m1)


def validate_params(p: SystemParams) -> SystemParams:
    if p.omega_m != 1.0:
        raise InvalidConfig("omega_m is the unit of frequency and must equal 1")
    if not p.kappa > 0:
        raise NonPositiveRate(f"kappa must be positive, got {p.kappa}")
    if not p.gamma > 0:
        raise NonPositiveRate(f"gamma must be positive, got {p.gamma}")
    if p.g < 0:
        raise InvalidConfig(f"g must be non-negative, got {p.g}")
    if p.n_a < 0:
        raise NegativeOccupancy(f"n_a must be non-negative, got {p.n_a}")
    if p.n_b < 0:
        raise NegativeOccupancy(f"n_b must be non-negative, got {p.n_b}")
    return p


def _real_if_close(z: complex) -> complex | float:
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return z


@dataclass(frozen=True)
class CouplingSet:
    """Effective couplings of the rotating-frame dynamics.

    ``G0``/``G1`` are the beam-splitter and two-mode-squeezing type cavity
    couplings, ``Gt0``/``Gt1`` the mechanical self terms. ``G_eff``, ``r``
    and ``h`` are ``None`` outside the regime ``|G1| < |G0|``.
    """

    G0: complex | float
    G1: complex | float
    Gt0: complex | float
    Gt1: complex | float
    kappa: float
    gamma: float

    @property
    def G_plus(self):
        return self.G0 + self.G1

    @property
    def G_minus(self):
        return self.G0 - self.G1

    @property
    def Gt_plus(self):
        return self.Gt0 + self.Gt1

    @property
    def Gt_minus(self):
        return self.Gt0 - self.Gt1

    @property
    def is_real(self) -> bool:
        return not any(isinstance(x, complex) for x in (self.G0, self.G1, self.Gt0, self.Gt1))

    @property
    def defined(self) -> bool:
        """Whether the Bogoliubov quantities exist (real couplings, |G1| < |G0|)."""
        return self.is_real and abs(self.G1) < abs(self.G0)

    @property
    def ratio(self) -> float:
        if self.G0 == 0:
            return math.nan
        return _real_if_close(self.G1 / self.G0)

    @property
    def G_eff(self) -> Optional[float]:
        if not self.defined:
            return None
        return math.sqrt(self.G0**2 - self.G1**2)

    @property
    def r(self) -> Optional[float]:
        if not self.defined:
            return None
        return math.atanh(self.G1 / self.G0)

    @property
    def h(self) -> Optional[float]:
        if not self.defined:
            return None
        return 2.0 * self.G_eff**2 / self.kappa + self.gamma / 2.0

    def with_rates(self, kappa: float | None = None, gamma: float | None = None) -> "CouplingSet":
        return replace(
            self,
            kappa=self.kappa if kappa is None else kappa,
            gamma=self.gamma if gamma is None else gamma,
        )


def compute_couplings(p: SystemParams, f: FloquetAmplitudes) -> CouplingSet:
    g = p.g
    a_m1, a_0, a_1 = complex(f.a_m1), complex(f.a_0), complex(f.a_1)
    b_m1, b_0, b_1 = complex(f.b_m1), complex(f.b_0), complex(f.b_1)
    G0 = 2 * g * (2 * a_0 * b_0 + (a_m1 + a_1) * (b_m1 + b_1))
    G1 = 2 * g * (a_0 * (b_m1 + b_1) + 2 * a_1 * b_0)
    Gt0 = 2 * g * (a_0**2 + a_m1**2 + a_1**2)
    Gt1 = 2 * g * a_0 * (a_m1 + a_1)
    return CouplingSet(
        G0=_real_if_close(G0),
        G1=_real_if_close(G1),
        Gt0=_real_if_close(Gt0),
        Gt1=_real_if_close(Gt1),
        kappa=p.kappa,
        gamma=p.gamma,
    )


__all__ = [
    "SystemParams",
    "FloquetAmplitudes",
    "CouplingSet",
    "validate_params",
    "compute_couplings",
]

