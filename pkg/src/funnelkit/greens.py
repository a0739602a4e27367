"""Retarded Green's function of the non-Hermitian effective generator and the
two-time output-mode correlator built from it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DefectiveGenerator, GridMismatch, HorizonNotReached
from .liouvillian import (
    CONDITION_LIMIT,
    DEFAULT_POINTS,
    HORIZON_CAP,
    Trajectory,
    build_hamiltonian,
    fastest_rate,
    log_grid,
)
from .params import RateParams

MODES = {"plasmon": 1, "cavity": 2}
GREEN_FLOOR = 1e-9


def mode_index(mode: str) -> int:
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"mode must be one of {sorted(MODES)}, got {mode!r}") from None


def self_energy(params: RateParams) -> np.ndarray:
    """Diagonal anti-Hermitian self-energy carrying all widths."""
    return -1j * np.diag([params.gamma1 / 2 + params.gamma_star, params.kappa1 / 2, params.kappa2 / 2])


@dataclass(frozen=True)
class EffectiveGenerator:
    """M = -i (H + Sigma) with its eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition: float
    params: RateParams

    @property
    def diagonalizable(self) -> bool:
        return bool(np.isfinite(self.condition) and self.condition <= CONDITION_LIMIT)

    def require_diagonalizable(self):
        if not self.diagonalizable:
            raise DefectiveGenerator(f"effective generator eigenvector condition {self.condition:.2e}")


def effective_generator(params: RateParams) -> EffectiveGenerator:
    H = build_hamiltonian(params)
    M = -1j * (H + self_energy(params))
    mu, W = np.linalg.eig(M)
    cond = float(np.linalg.cond(W))
    left = np.linalg.inv(W) if np.isfinite(cond) else np.full_like(W, np.nan)
    return EffectiveGenerator(M, mu, W, left, cond, params)


def resolvent(generator: EffectiveGenerator, omega: float) -> np.ndarray:
    """Frequency-domain Green's function (omega - H - Sigma)^-1."""
    return np.linalg.inv(omega * np.eye(3) - 1j * generator.matrix)


def _green_samples(generator: EffectiveGenerator, taus: np.ndarray) -> np.ndarray:
    if generator.diagonalizable:
        W, Wi = generator.right, generator.left
        ex = np.exp(np.outer(taus, generator.eigenvalues))
        return np.einsum("ij,nj,jk->nik", W, ex, Wi)
    return np.array([expm(generator.matrix * t) for t in taus])


def green_horizon(generator: EffectiveGenerator, floor: float = GREEN_FLOOR, cap: float = HORIZON_CAP) -> float:
    """Doubling search for tau with max|G(tau)| < floor."""
    rate = float(np.min(-generator.eigenvalues.real))
    if rate <= 1e-12:
        raise HorizonNotReached("effective generator has a non-decaying mode")
    T = min(-np.log(floor) / rate, cap)
    while True:
        if np.abs(_green_samples(generator, np.array([T]))[0]).max() < floor:
            return T
        if T >= cap:
            raise HorizonNotReached(f"|G| above {floor:g} at tau cap {cap:g}")
        T = min(2 * T, cap)


def default_tau_grid(generator: EffectiveGenerator, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    T = green_horizon(generator)
    t_min = min(1e-3 / fastest_rate(generator.params), T / 10)
    return log_grid(t_min, T, n_points)


@dataclass(frozen=True)
class PropagatorGrid:
    taus: np.ndarray
    green: np.ndarray
    params: RateParams

    def element(self, i: int, j: int) -> np.ndarray:
        return self.green[:, i, j]


def retarded_green(generator: EffectiveGenerator, tau_grid=None, *, n_points: int = DEFAULT_POINTS) -> PropagatorGrid:
    """Sample G^r(tau) = exp(M tau), so that G^r(0) is the identity."""
    if tau_grid is None:
        tau_grid = default_tau_grid(generator, n_points)
    taus = np.asarray(tau_grid, dtype=float)
    return PropagatorGrid(taus, _green_samples(generator, taus), generator.params)


@dataclass(frozen=True)
class CorrelatorGrid:
    """C(t, tau) = <m^dag(t + tau) m(t)> on the product of two grids.

    Stored in factored form, C = rho_column @ green_row.T, so that large grids
    can be integrated in chunks; ``values`` materializes the full array.
    """

    mode: str
    times: np.ndarray
    taus: np.ndarray
    rho_column: np.ndarray
    green_row: np.ndarray
    populations: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.rho_column @ self.green_row.T

    def rows(self, start: int, stop: int) -> np.ndarray:
        return self.rho_column[start:stop] @ self.green_row.T

    def subsample(self, step: int) -> "CorrelatorGrid":
        return CorrelatorGrid(
            self.mode, self.times[::step], self.taus[::step], self.rho_column[::step],
            self.green_row[::step], self.populations[::step],
        )

    def scaled(self, factor: float) -> "CorrelatorGrid":
        return CorrelatorGrid(
            self.mode, self.times, self.taus, self.rho_column * factor, self.green_row, self.populations * factor
        )


def two_time_correlator(
    params: RateParams, trajectory: Trajectory, propagator: PropagatorGrid, mode: str = "cavity"
) -> CorrelatorGrid:
    """Combine populations/coherences at t with G^r(tau), row ``mode`` of G.

    For the cavity, C = G_ce rho_ec + G_cp rho_pc + G_cc rho_cc; the plasmon
    correlator uses row p of G and column p of rho in the same way.
    """
    m = mode_index(mode)
    if trajectory.params is not None and trajectory.params != params:
        raise GridMismatch("trajectory was built from different parameters")
    if propagator.params != params:
        raise GridMismatch("propagator was built from different parameters")
    if propagator.taus.size == 0 or propagator.taus[0] != 0.0:
        raise GridMismatch("tau grid must start at 0")
    return CorrelatorGrid(
        mode,
        trajectory.times,
        propagator.taus,
        trajectory.rho[:, :, m],
        propagator.green[:, m, :],
        trajectory.populations[:, m],
    )
