"""Observables of Gaussian states: Wigner functions, squeezing and entanglement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix
from .errors import ComplexRoot, IsotropicState, NonPositiveVariance, SingularCovariance

SQL_VARIANCE = 0.5
THREE_DB_VARIANCE = 0.25
ROOT_TOL = 1e-12


def _matrix(v) -> np.ndarray:
    return v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)


def mechanical_block(v) -> np.ndarray:
    return _matrix(v)[2:4, 2:4].copy()


def optical_block(v) -> np.ndarray:
    return _matrix(v)[0:2, 0:2].copy()


def _check_pd(v_b: np.ndarray):
    if v_b.shape != (2, 2):
        raise ValueError("expected a 2x2 covariance block")
    if not (v_b[0, 0] > 0 and np.linalg.det(v_b) > 0):
        raise SingularCovariance("covariance block is not positive definite")


def wigner(v_b, q, p):
    """Gaussian Wigner density of a zero-mean single mode, vectorized over ``q``, ``p``."""
    v_b = np.asarray(v_b, dtype=float)
    _check_pd(v_b)
    det = np.linalg.det(v_b)
    inv = np.linalg.inv(v_b)
    q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
    quad_form = inv[0, 0] * q * q + 2 * inv[0, 1] * q * p + inv[1, 1] * p * p
    return np.exp(-0.5 * quad_form) / (2 * math.pi * math.sqrt(det))


@dataclass(frozen=True)
class WignerGrid:
    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # values[i, j] at (q_axis[j], p_axis[i])

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.q_axis, axis=1), self.p_axis))


def wigner_grid(v_b, n: int = 201, extent: float = 5.0, per_axis: bool = False) -> WignerGrid:
    """Wigner density on an ``n x n`` grid.

    The half-width is ``extent`` standard deviations of the larger
    eigenvalue, or of each marginal when ``per_axis`` is set.
    """
    v_b = np.asarray(v_b, dtype=float)
    _check_pd(v_b)
    if per_axis:
        hq, hp = extent * math.sqrt(v_b[0, 0]), extent * math.sqrt(v_b[1, 1])
    else:
        hq = hp = extent * math.sqrt(float(np.max(np.linalg.eigvalsh(v_b))))
    q_axis = np.linspace(-hq, hq, n)
    p_axis = np.linspace(-hp, hp, n)
    qq, pp = np.meshgrid(q_axis, p_axis)
    return WignerGrid(q_axis, p_axis, wigner(v_b, qq, pp))


def principal_axis_angle(v_b) -> float:
    """Angle of the squeezed (minor) axis in ``(-pi/2, pi/2]``, measured from the Q axis."""
    v_b = np.asarray(v_b, dtype=float)
    _check_pd(v_b)
    vals, vecs = np.linalg.eigh(v_b)
    if vals[1] - vals[0] <= 1e-12 * vals[1]:
        raise IsotropicState("degenerate eigenvalues leave the squeezing axis undefined")
    vq, vp = vecs[:, 0]
    angle = math.atan2(vp, vq)
    if angle <= -math.pi / 2:
        angle += math.pi
    elif angle > math.pi / 2:
        angle -= math.pi
    return angle


def angle_difference(a: float, b: float) -> float:
    """Smallest separation of two axis angles, which are only defined modulo pi."""
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def squeezing_db(variance: float) -> float:
    """Squeezing relative to the vacuum variance; positive below the SQL."""
    if not variance > 0:
        raise NonPositiveVariance(f"variance must be positive, got {variance}")
    return 10.0 * math.log10(SQL_VARIANCE / variance)


@dataclass(frozen=True)
class EntanglementResult:
    e_n: float
    nu_minus: float
    sigma: float
    det_a: float
    det_b: float
    det_c: float
    det_v: float


def logarithmic_negativity(v) -> EntanglementResult:
    """Log-negativity between the optical (first) and mechanical (second) modes.

    ``Sigma`` and the discriminant test follow the closed-form two-mode
    expressions. ``nu_minus`` itself is read off the Hermitian matrix
    ``L^T (i Omega) L`` with ``L L^T`` the partially transposed covariance,
    which has the same spectrum as ``i Omega V~`` but stays well conditioned
    where the closed form's square root does not (``nu_+ = nu_-``).
    """
    v = _matrix(v)
    A, B, C = v[:2, :2], v[2:, 2:], v[:2, 2:]
    det_a, det_b, det_c = (float(np.linalg.det(x)) for x in (A, B, C))
    det_v = float(np.linalg.det(v))
    sigma = det_a + det_b - 2.0 * det_c
    disc = sigma * sigma - 4.0 * det_v
    if disc < -ROOT_TOL:
        raise ComplexRoot(f"Sigma^2 - 4 det V = {disc:.3g} < 0")
    inner = sigma - math.sqrt(max(disc, 0.0))
    if inner < -ROOT_TOL:
        raise ComplexRoot(f"Sigma - sqrt(Sigma^2 - 4 det V) = {inner:.3g} < 0")
    nu = _smallest_symplectic_eigenvalue(_PARTIAL_TRANSPOSE @ v @ _PARTIAL_TRANSPOSE)
    e_n = max(0.0, -math.log(2.0 * nu))
    return EntanglementResult(e_n, nu, sigma, det_a, det_b, det_c, det_v)


_PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])
_I_OMEGA = 1j * np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _smallest_symplectic_eigenvalue(v: np.ndarray) -> float:
    try:
        low = np.linalg.cholesky(v)
    except np.linalg.LinAlgError as exc:
        raise ComplexRoot("partially transposed covariance is not positive definite") from exc
    nu = float(np.min(np.abs(np.linalg.eigvalsh(low.T @ _I_OMEGA @ low))))
    if nu == 0.0:
        raise ComplexRoot("vanishing symplectic eigenvalue")
    return nu
