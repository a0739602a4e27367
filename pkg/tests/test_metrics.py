import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from funnelkit.errors import NoPhotonFlux
from funnelkit.greens import effective_generator, retarded_green, two_time_correlator
from funnelkit.liouvillian import propagate_density
from funnelkit.metrics import (
    compute_point,
    extraction_efficiency,
    funneling_ratio,
    gauss_panels,
    indistinguishability,
    metrics_quadrature,
    metrics_spectral,
)
from funnelkit.params import BASELINE, RateParams

from conftest import point

ZERO = RateParams(0, 0, 0, 0, 0, 0)
NUMERIC = ["baseline", "plasmon_only", "ladder_g0_0", "ladder_g0_1e2", "ladder_g0_1e3", "twelvefold_g0_50", "twelvefold_g0_0"]


@pytest.mark.parametrize("name", NUMERIC)
def test_spectral_matches_frozen_oracle(frozen, name):
    ref = frozen["numeric"][name]
    r = metrics_spectral(point(name), ref["mode"])
    assert r.I == pytest.approx(ref["I"], rel=1e-9)
    assert r.beta == pytest.approx(ref["beta"], rel=1e-9)
    assert r.F_dB == pytest.approx(ref["F_dB"], abs=1e-8)


@pytest.mark.parametrize("name", NUMERIC)
def test_quadrature_matches_frozen_oracle(frozen, name):
    ref = frozen["numeric"][name]
    r = metrics_quadrature(point(name), ref["mode"])
    assert r.I == pytest.approx(ref["I"], rel=1e-4)
    assert r.beta == pytest.approx(ref["beta"], rel=1e-4)


def test_simpson_route_on_default_grids(frozen):
    traj = propagate_density(BASELINE, n_points=2000)
    prop = retarded_green(effective_generator(BASELINE), None, n_points=2000)
    I, err = indistinguishability(two_time_correlator(BASELINE, traj, prop))
    beta, berr = extraction_efficiency(BASELINE, traj)
    ref = frozen["numeric"]["baseline"]
    assert I == pytest.approx(ref["I"], rel=1e-3)
    assert abs(I - ref["I"]) <= max(err, 1e-3)
    assert beta == pytest.approx(ref["beta"], rel=1e-3)
    assert berr < 1e-6


def test_zero_dephasing_is_fully_indistinguishable():
    p = point("pure_zero_dephasing")
    assert metrics_spectral(p).I == pytest.approx(1.0, abs=1e-6)
    assert metrics_quadrature(p).I == pytest.approx(1.0, abs=1e-4)


def test_decoupled_has_no_flux():
    p = ZERO.with_(kappa1=1.0, kappa2=1.0)
    with pytest.raises(NoPhotonFlux):
        metrics_spectral(p)
    with pytest.raises(NoPhotonFlux):
        metrics_quadrature(p)
    with pytest.raises(NoPhotonFlux):
        compute_point(p)
    traj = propagate_density(p)
    assert extraction_efficiency(p, traj)[0] == 0.0


def test_no_cavity_loss_gives_zero_beta():
    beta, _ = extraction_efficiency(BASELINE.with_(kappa2=0.0), propagate_density(BASELINE.with_(kappa2=0.0)))
    assert beta == 0.0


def test_funneling_ratio():
    assert funneling_ratio(BASELINE, 0.9169, 4.65e-3) == pytest.approx(16.3, abs=0.1)
    assert funneling_ratio(BASELINE, 1.0, 1e-4) == pytest.approx(0.0, abs=1e-12)
    assert funneling_ratio(BASELINE, 0.9, 0.0) == -math.inf


def test_compute_point_reports_both():
    r = compute_point(BASELINE)
    assert r.method == "both" and not r.suspect and r.converged
    assert r.discrepancy < 1e-4
    assert r.details["spectral"].I == r.I
    assert 0 <= r.I <= 1 + 1e-6 and 0 <= r.beta <= 1 + 1e-6
    assert r.F_dB == pytest.approx(funneling_ratio(BASELINE, r.I, r.beta))


def test_compute_point_single_method():
    r = compute_point(BASELINE, methods=("quadrature",))
    assert r.method == "quadrature"
    with pytest.raises(ValueError):
        compute_point(BASELINE, methods=("monte-carlo",))


def test_tighter_tolerance_within_error_estimate():
    a = metrics_quadrature(BASELINE)
    b = metrics_quadrature(BASELINE, rtol=a.I_error / a.I / 2 if a.I_error > 0 else 5e-5)
    assert abs(a.I - b.I) <= max(a.I_error, 1e-12)


def test_rescaling_invariance():
    traj = propagate_density(BASELINE)
    corr = two_time_correlator(BASELINE, traj, retarded_green(effective_generator(BASELINE)))
    I0, _ = indistinguishability(corr)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(1e-6, 1e6))
    def check(factor):
        assert indistinguishability(corr.scaled(factor))[0] == pytest.approx(I0, rel=1e-10)

    check()


def test_gauss_panels_integrate_exactly():
    nodes, weights = gauss_panels(1e-6, 10.0, 16, 16)
    assert weights.sum() == pytest.approx(10.0, rel=1e-14)
    assert weights @ np.exp(-nodes) == pytest.approx(1 - np.exp(-10.0), rel=1e-13)


def test_random_sets_agree():
    from funnelkit.validation import oracle_agreement, random_regime_params

    assert oracle_agreement(random_regime_params(8, seed=7)) <= 1e-3
