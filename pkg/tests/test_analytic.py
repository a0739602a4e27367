import numpy as np
import pytest

from funnelkit.analytic import (
    analytic_metrics,
    coupling_from_purcell,
    direct_channel_limit,
    effective_params,
    effective_two_level,
    exchange_rates,
    purcell_report,
    rate_matrix,
    reconstruct_coherences,
    solve_rate_equations,
)
from funnelkit.errors import NoPhotonFlux, ZeroDecayRate
from funnelkit.liouvillian import propagate_density
from funnelkit.metrics import compute_point
from funnelkit.params import BASELINE, PRESETS, RateParams

from conftest import analytic_point

ZERO = RateParams(0, 0, 0, 0, 0, 0)
FIG3B = BASELINE.with_(g2=1e2)


def test_exchange_rates_against_hand_evaluation(frozen):
    for name, ref in frozen["analytic"].items():
        x = exchange_rates(analytic_point(name))
        for key in ("R1", "R2", "R3", "phi", "r"):
            assert getattr(x, key) == pytest.approx(ref[key], rel=1e-12, abs=1e-15)
    assert exchange_rates(BASELINE).R1 == pytest.approx(3636.33, abs=0.01)
    assert exchange_rates(analytic_point("r3_point")).R3 == pytest.approx(0.9433, abs=1e-3)


def test_decoupled_rates_vanish():
    x = exchange_rates(ZERO.with_(kappa1=1, kappa2=1))
    assert x.R1 == x.R2 == x.R3 == x.r == 0
    assert exchange_rates(BASELINE).r == 0


def test_rate_matrix_structure():
    A = rate_matrix(BASELINE).matrix
    np.testing.assert_allclose(A, A.T)
    assert (A - np.diag(np.diag(A)) >= 0).all()
    np.testing.assert_allclose(A.sum(axis=0), [-1, -1e5, -600])
    np.testing.assert_array_equal(rate_matrix(ZERO.with_(kappa1=2, kappa2=3)).matrix, np.diag([-1.0, -2, -3]))


def test_rate_solution_decoupled_and_bookkeeping():
    t = np.linspace(0, 5, 51)
    pops = solve_rate_equations(rate_matrix(ZERO.with_(kappa1=2, kappa2=3)), t)
    np.testing.assert_allclose(pops[:, 0], np.exp(-t), rtol=1e-12)
    # leaked probability sums to one
    p = BASELINE
    t = np.concatenate([[0], np.geomspace(1e-8, 2e-2, 4000)])
    pops = solve_rate_equations(rate_matrix(p), t)
    flux = pops @ np.array([1, p.kappa1, p.kappa2])
    from scipy.integrate import simpson

    assert simpson(flux, x=t) + pops[-1].sum() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.xfail(strict=True, reason="rho_ee is off by up to 47%, and early rho_pp, rho_cc by orders of magnitude (no coherent build-up in the rate model)")
def test_rate_populations_track_master_equation():
    traj = propagate_density(BASELINE)
    pops = solve_rate_equations(rate_matrix(BASELINE), traj.times)
    live = traj.populations[:, 0] > 1e-4
    np.testing.assert_allclose(pops[live], traj.populations[live], rtol=0.05)


def test_coherences_structure():
    assert all(v == 0 for v in reconstruct_coherences(ZERO.with_(kappa1=1), [0.5, 0.3, 0.2]).values())
    c = reconstruct_coherences(BASELINE, [0.6, 0.01, 0.001])
    assert c["pe"] == pytest.approx(np.conj(c["ep"]))
    assert c["ep"].real == 0
    arr = reconstruct_coherences(BASELINE, np.array([[0.6, 0.01, 0.001], [0.3, 0.02, 0.003]]))
    assert arr["ec"].shape == (2,)


def test_adiabatic_emitter_plasmon_coherence():
    t = 10 / BASELINE.kappa1
    traj = propagate_density(BASELINE, [0.0, t])
    exact = traj.rho[-1, 0, 1]
    approx = reconstruct_coherences(BASELINE, traj.populations[-1])["ep"]
    assert abs(approx - exact) <= 0.1 * abs(exact)


def test_effective_params(frozen):
    ref = frozen["analytic"]["effective_regime"]
    e = effective_params(analytic_point("effective_regime"))
    assert e.gamma1_eff == pytest.approx(ref["gamma1_eff"], rel=1e-12)
    assert e.kappa_eff == pytest.approx(ref["kappa_eff"], rel=1e-12)
    assert e.kappa_ratio == pytest.approx(0.086, abs=0.002)
    assert e.kappa_ratio <= 0.1
    assert e.gamma1_eff == pytest.approx(3.51e3, rel=1e-3)
    assert e.kappa_eff == pytest.approx(300.3, rel=1e-3)


def test_effective_params_limits():
    e = effective_params(ZERO.with_(kappa1=2, kappa2=3))
    assert (e.gamma1_eff, e.kappa_eff, e.R_eff) == (1.0, 3.0, 0.0)
    p = ZERO.with_(g0=40, dephasing=10, kappa1=2, kappa2=3)
    assert effective_params(p).R_eff == exchange_rates(p).R3
    for p in (BASELINE, FIG3B, BASELINE.with_(g0=100)):
        e, x = effective_params(p), exchange_rates(p)
        assert e.gamma1_eff >= 1 and e.kappa_eff >= p.kappa2 and e.R_eff >= x.R3


@pytest.mark.parametrize("name", list(PRESETS))
def test_effective_rates_reduce_to_purcell_forms(name):
    p = PRESETS[name].params
    x = exchange_rates(p)
    assert p.kappa1 > 100 * max(x.R1, x.R2)
    e = effective_params(p)
    assert e.gamma1_eff == pytest.approx(1 + purcell_report(p).F_p_generalized, rel=0.01)
    assert e.kappa_eff == pytest.approx(p.kappa2, rel=0.01)


def test_single_cavity_factor_near_one():
    for k2 in np.geomspace(1, 1e3, 20):
        for p in (FIG3B.with_(kappa2=k2), BASELINE.with_(kappa2=k2)):
            x, e = exchange_rates(p), effective_params(p)
            assert (p.kappa2 + x.R2 + x.r) / (e.kappa_eff + e.R_eff) == pytest.approx(1.0, abs=1e-3)


def test_two_level_reduction():
    t = np.concatenate([[0], np.geomspace(1e-6, 1e-2, 600)])
    ee, cc, pp = effective_two_level(ZERO.with_(kappa1=1, kappa2=1), t)
    np.testing.assert_allclose(ee, np.exp(-t), rtol=1e-12)
    assert not cc.any()
    ee, cc, pp = effective_two_level(BASELINE, t)
    three = solve_rate_equations(rate_matrix(BASELINE), t)
    peak = np.argmax(three[:, 2])
    assert cc[peak] == pytest.approx(three[peak, 2], rel=0.05)
    late = t > 10 / BASELINE.kappa1
    np.testing.assert_allclose(pp[late & (three[:, 1] > 1e-12)], three[late & (three[:, 1] > 1e-12), 1], rtol=0.05)


def test_analytic_metrics_against_hand_evaluation(frozen):
    for name, ref in frozen["analytic"].items():
        r = analytic_metrics(analytic_point(name))
        assert r.I == pytest.approx(ref["I"], rel=1e-12)
        assert r.beta == pytest.approx(ref["beta"], rel=1e-12)
    r = analytic_metrics(analytic_point("effective_regime"))
    assert r.I == pytest.approx(0.92, rel=0.02)
    assert r.beta == pytest.approx(8.0e-4, rel=0.02)
    assert r.method == "analytic"


def test_analytic_no_flux():
    with pytest.raises(NoPhotonFlux):
        analytic_metrics(BASELINE.with_(g2=0.0))
    with pytest.raises(NoPhotonFlux):
        direct_channel_limit(BASELINE)


@pytest.mark.parametrize("g0", [1e2, 1e3])
@pytest.mark.parametrize("k2", [10.0, 1e2, 1e3])
def test_limit_forms_beta(g0, k2):
    p = FIG3B.with_(g0=g0, kappa2=k2)
    assert direct_channel_limit(p).beta == pytest.approx(analytic_metrics(p).beta, rel=0.05)


@pytest.mark.xfail(strict=True, reason="the full I form keeps (kappa2+R2+r)/(kappa'+R'), which falls to 0.74 at g0=1e3; the forms differ by up to 26%")
def test_limit_forms_indistinguishability():
    for g0 in (1e2, 1e3):
        for k2 in (10.0, 1e2, 1e3):
            p = FIG3B.with_(g0=g0, kappa2=k2)
            assert direct_channel_limit(p).I == pytest.approx(analytic_metrics(p).I, rel=0.05)


@pytest.mark.xfail(strict=True, reason="closed-form beta / numerical beta spans 0.15 to 77 along this line")
def test_analytic_beta_tracks_numeric_on_fig3b_line():
    for k2 in np.geomspace(1, 1e3, 20):
        p = FIG3B.with_(kappa2=k2)
        assert analytic_metrics(p).beta == pytest.approx(compute_point(p, methods=("spectral",)).beta, rel=0.15)


def test_purcell():
    assert coupling_from_purcell(1029, 7.099e6) == pytest.approx(4.273e4, rel=1e-3)
    rep = purcell_report(BASELINE.with_(g0=50.0))
    assert rep.F_p_cavity == pytest.approx(16.66, abs=0.01)
    assert rep.F_p_generalized <= rep.F_p_plasmon
    zero = purcell_report(BASELINE.with_(g1=0.0))
    assert zero.F_p_plasmon == zero.F_p_generalized == 0
    with pytest.raises(ZeroDecayRate):
        purcell_report(BASELINE.with_(kappa2=0.0))
    with pytest.raises(ZeroDecayRate):
        coupling_from_purcell(10, 0.0)
