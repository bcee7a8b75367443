import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optosqueeze.bogoliubov import (
    BogoliubovState,
    adiabatic_bogoliubov_variances,
    adiabatic_elimination_variance,
    adiabatic_variance,
    bogoliubov_occupancy,
)
from optosqueeze.covariance import drift_rwa, noise_matrix, steady_state_covariance
from optosqueeze.errors import DegenerateDenominator, NonPositiveVariance, SingularSystem
from optosqueeze.params import CouplingSet, SystemParams


def exact_v33(c, p):
    return steady_state_covariance(drift_rwa(c, p), noise_matrix(p)).v33


def test_occupancy_vacuum_and_thermal():
    assert bogoliubov_occupancy(np.diag([0.5, 0.5]), 0.0) == 0.0
    assert bogoliubov_occupancy(np.diag([10.5, 10.5]), 0.0) == pytest.approx(10.0)
    assert BogoliubovState(0.5, 0.5).occupancy == 0.0


def test_occupancy_squeezed_vacuum_is_zero():
    r = 0.7
    v = np.diag([0.5 * math.exp(-2 * r), 0.5 * math.exp(2 * r)])
    assert bogoliubov_occupancy(v, r) == pytest.approx(0.0, abs=1e-15)


def test_occupancy_rejects_non_positive():
    with pytest.raises(NonPositiveVariance):
        bogoliubov_occupancy(np.diag([0.0, 1.0]), 0.3)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(0.5, 20), b=st.floats(0.5, 20), c=st.floats(-0.4, 0.4), theta=st.floats(-math.pi, math.pi))
def test_occupancy_rotation_invariant_at_r0(a, b, c, theta):
    v = np.array([[a, c * math.sqrt(a * b)], [c * math.sqrt(a * b), b]])
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    assert bogoliubov_occupancy(rot @ v @ rot.T, 0.0) == pytest.approx(bogoliubov_occupancy(v, 0.0), rel=1e-12)


def test_ref_adiabatic_variance(ref_couplings, ref_params):
    assert adiabatic_variance(ref_couplings, ref_params) == pytest.approx(0.11862947, rel=1e-6)
    assert round(adiabatic_variance(ref_couplings, ref_params), 4) == 0.1186


def test_ref_bogoliubov_variances(ref_couplings, ref_params):
    s = adiabatic_bogoliubov_variances(ref_couplings, ref_params)
    assert s.x_var == pytest.approx(0.5063453, rel=1e-6)
    assert s.y_var == pytest.approx(0.50033, rel=1e-5)
    assert s.occupancy >= 0


def test_closed_form_consistent_with_2x2_system(ref_couplings, ref_params):
    c, p = ref_couplings, ref_params
    x = adiabatic_bogoliubov_variances(c, p).x_var
    assert adiabatic_variance(c, p) == pytest.approx(math.exp(-2 * c.r) * x, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    G0=st.floats(0.01, 1.0),
    frac=st.floats(-0.95, 0.95),
    Gt0=st.floats(-0.05, 0.05),
    Gt1=st.floats(-0.05, 0.05),
    kappa=st.floats(0.05, 5.0),
    gamma=st.floats(1e-6, 1e-2),
    n_b=st.floats(0, 1000),
)
def test_consistency_property(G0, frac, Gt0, Gt1, kappa, gamma, n_b):
    c = CouplingSet(G0, frac * G0, Gt0, Gt1, kappa, gamma)
    p = SystemParams(kappa=kappa, gamma=gamma, n_b=n_b)
    if abs(c.Gt_minus**2 - c.h**2) < 1e-6 * c.h**2 or abs(c.G_minus) < 1e-6:
        return
    x = adiabatic_bogoliubov_variances(c, p).x_var
    assert adiabatic_variance(c, p) == pytest.approx(math.exp(-2 * c.r) * x, rel=1e-10)


def test_literal_form_differs(ref_couplings, ref_params):
    lit = adiabatic_bogoliubov_variances(ref_couplings, ref_params, form="printed")
    cons = adiabatic_bogoliubov_variances(ref_couplings, ref_params, form="consistent")
    assert lit.x_var != pytest.approx(cons.x_var, rel=1e-6)


def test_a2c_sign_switch(ref_couplings, ref_params):
    pr = adiabatic_variance(ref_couplings, ref_params, "printed")
    po = adiabatic_variance(ref_couplings, ref_params, "positive")
    # the mechanical bath is tiny at these parameters, so the sign barely matters
    assert po == pytest.approx(pr, rel=1e-4)
    assert po != pr
    with pytest.raises(ValueError):
        adiabatic_variance(ref_couplings, ref_params, "negative")


def test_beam_splitter_cooling_to_vacuum():
    p = SystemParams(kappa=1.0, gamma=1e-14, n_a=0.0, n_b=10.0)
    c = CouplingSet(0.05, 0.0, 0.0, 0.0, p.kappa, p.gamma)
    s = adiabatic_bogoliubov_variances(c, p)
    assert s.x_var == pytest.approx(0.5, abs=1e-9) and s.y_var == pytest.approx(0.5, abs=1e-9)
    assert adiabatic_variance(c, p) == pytest.approx(0.5, abs=1e-9)


def test_affine_in_n_b(ref_couplings, ref_params):
    xs = [adiabatic_bogoliubov_variances(ref_couplings, ref_params.with_(n_b=n)).x_var for n in (0, 10, 20, 35)]
    slope = (xs[1] - xs[0]) / 10
    for n, x in zip((20, 35), xs[2:]):
        assert x == pytest.approx(xs[0] + slope * n, rel=1e-12)


def test_degenerate_denominator(ref_params):
    # choose Gt_minus = h exactly
    G0, G1, k, gm = 0.1, 0.0, 0.1, 1e-6
    h = 2 * G0**2 / k + gm / 2
    c = CouplingSet(G0, G1, h + 0.01, 0.01, k, gm)
    assert c.Gt_minus == pytest.approx(h, abs=1e-16)
    c = CouplingSet(G0, G1, c.Gt0 - (c.Gt_minus - h), c.Gt1, k, gm)
    p = ref_params.with_(kappa=k, gamma=gm)
    with pytest.raises(DegenerateDenominator):
        adiabatic_variance(c, p)
    with pytest.raises(SingularSystem):
        adiabatic_bogoliubov_variances(c, p)


def test_undefined_transform_rejected(ref_params):
    with pytest.raises(DegenerateDenominator):
        adiabatic_variance(CouplingSet(0.1, 0.2, 0.0, 0.0, 0.1, 1e-6), ref_params)


def test_ref_within_20_percent(ref_couplings, ref_params):
    exact = exact_v33(ref_couplings, ref_params)
    assert abs(adiabatic_variance(ref_couplings, ref_params) / exact - 1) < 0.2


RATIOS = (10.0, 20.0, 40.0, 80.0)


def _deviations(fn, c, p):
    out = []
    for q in RATIOS:
        k = q * c.G_eff
        cc, pp = c.with_rates(kappa=k), p.with_(kappa=k)
        out.append(abs(fn(cc, pp) / exact_v33(cc, pp) - 1))
    return out


def test_elimination_converges(ref_couplings, ref_params):
    dev = _deviations(adiabatic_elimination_variance, ref_couplings, ref_params)
    assert all(b < a for a, b in zip(dev, dev[1:]))
    assert dev[-1] < 1e-3


@pytest.mark.xfail(strict=True, reason="closed form drifts from the exact variance as kappa grows at fixed G_eff")
def test_closed_form_converges(ref_couplings, ref_params):
    dev = _deviations(adiabatic_variance, ref_couplings, ref_params)
    assert all(b < a for a, b in zip(dev, dev[1:]))
