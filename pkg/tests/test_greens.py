import numpy as np
import pytest
from scipy.integrate import quad_vec

from funnelkit.errors import DefectiveGenerator, GridMismatch
from funnelkit.greens import (
    default_tau_grid,
    effective_generator,
    green_horizon,
    mode_index,
    resolvent,
    retarded_green,
    two_time_correlator,
)
from funnelkit.liouvillian import propagate_density
from funnelkit.params import BASELINE, RateParams

ZERO = RateParams(0, 0, 0, 0, 0, 0)


def test_decoupled_generator_is_diagonal():
    p = ZERO.with_(dephasing=4.0, kappa1=3.0, kappa2=2.0)
    np.testing.assert_allclose(effective_generator(p).matrix, -np.diag([0.5 + 2.0, 1.5, 1.0]))


def test_generator_dissipative_and_non_hermitian():
    gen = effective_generator(BASELINE)
    assert gen.eigenvalues.real.max() <= 0
    assert not np.allclose(gen.matrix, gen.matrix.conj().T)


def test_green_identity_and_decoupled_form():
    p = ZERO.with_(kappa1=3.0, kappa2=2.0)
    prop = retarded_green(effective_generator(p), np.linspace(0, 5, 11))
    np.testing.assert_allclose(prop.green[0], np.eye(3), atol=1e-12)
    np.testing.assert_allclose(prop.element(2, 2), np.exp(-2.0 * prop.taus / 2))
    off = prop.green.copy()
    off[:, [0, 1, 2], [0, 1, 2]] = 0
    assert np.abs(off).max() == 0


def test_default_tau_grid_reaches_floor():
    gen = effective_generator(BASELINE)
    taus = default_tau_grid(gen)
    prop = retarded_green(gen, taus)
    assert taus[0] == 0 and len(taus) == 401
    assert np.abs(prop.green[-1]).max() < 1e-9
    assert taus[-1] == pytest.approx(green_horizon(gen))


def test_envelope_bound():
    gen = effective_generator(BASELINE)
    prop = retarded_green(gen)
    lam = np.min(-gen.eigenvalues.real)
    # |G| <= cond(W) exp(-lam tau); the bare exponential is exceeded only by non-normal transients
    ratio = np.abs(prop.element(2, 2)) / np.exp(-lam * prop.taus)
    assert ratio.max() <= gen.condition
    assert ratio.max() <= 1.001


def test_semigroup():
    gen = effective_generator(BASELINE)
    rng = np.random.default_rng(4)
    for t1, t2 in rng.uniform(0, 2e-3, size=(10, 2)):
        g = retarded_green(gen, [t1, t2, t1 + t2]).green
        assert np.abs(g[2] - g[0] @ g[1]).max() <= 1e-8


@pytest.mark.parametrize("omega", [-1.2e4, -1e3, 0.0, 5e2, 1.3e4])
def test_fourier_matches_resolvent(omega):
    gen = effective_generator(BASELINE)
    T = green_horizon(gen)
    f = lambda tau: -1j * np.exp(1j * omega * tau) * retarded_green(gen, [tau]).green[0]  # noqa: E731
    val, _ = quad_vec(f, 0, T, epsrel=1e-10, epsabs=1e-14, limit=20000)
    R = resolvent(gen, omega)
    assert np.abs(val - R).max() <= 1e-6 * np.abs(R).max()


def test_correlator_equal_time_is_population():
    for mode in ("cavity", "plasmon"):
        traj = propagate_density(BASELINE)
        corr = two_time_correlator(BASELINE, traj, retarded_green(effective_generator(BASELINE)), mode)
        np.testing.assert_allclose(corr.values[:, 0], traj.populations[:, mode_index(mode)], atol=1e-10)


def test_decoupled_cavity_correlator_vanishes():
    p = ZERO.with_(kappa1=1.0, kappa2=1.0)
    corr = two_time_correlator(p, propagate_density(p), retarded_green(effective_generator(p)))
    assert np.abs(corr.values).max() == 0


def test_cavity_correlator_formula():
    traj = propagate_density(BASELINE, n_points=40)
    prop = retarded_green(effective_generator(BASELINE), np.linspace(0, 1e-3, 7))
    C = two_time_correlator(BASELINE, traj, prop).values
    G, rho = prop.green, traj.rho
    manual = (
        G[None, :, 2, 0] * rho[:, None, 0, 2] + G[None, :, 2, 1] * rho[:, None, 1, 2] + G[None, :, 2, 2] * rho[:, None, 2, 2]
    )
    np.testing.assert_allclose(C, manual, rtol=1e-13, atol=1e-18)


def test_factorization_without_dephasing():
    p = BASELINE.with_(dephasing=0.0)
    traj = propagate_density(p)
    prop = retarded_green(effective_generator(p))
    corr = two_time_correlator(p, traj, prop)
    c2 = np.abs(corr.values) ** 2
    pmax = corr.populations.max()
    for i in range(0, len(traj.times), 25):
        if corr.populations[i] < 1e-6 * pmax:
            continue
        later = propagate_density(p, traj.times[i] + prop.taus).populations[:, 2]
        bound = corr.populations[i] * later
        ok = bound > 1e-6 * bound.max()
        np.testing.assert_allclose(c2[i, ok], bound[ok], rtol=1e-6)


def test_grid_mismatch():
    traj = propagate_density(BASELINE)
    prop = retarded_green(effective_generator(BASELINE))
    with pytest.raises(GridMismatch):
        two_time_correlator(BASELINE.with_(g0=1.0), traj, prop)
    with pytest.raises(GridMismatch):
        two_time_correlator(BASELINE, traj, retarded_green(effective_generator(BASELINE), [1e-6, 1e-5]))
    with pytest.raises(ValueError):
        two_time_correlator(BASELINE, traj, prop, "emitter")


def test_require_diagonalizable():
    gen = effective_generator(BASELINE)
    gen.require_diagonalizable()
    bad = type(gen)(gen.matrix, gen.eigenvalues, gen.right, gen.left, 1e12, gen.params)
    with pytest.raises(DefectiveGenerator):
        bad.require_diagonalizable()
