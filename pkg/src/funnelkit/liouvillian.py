"""Single-excitation Hamiltonian, Lindblad generator and density-matrix propagation.

Basis order is (e, p, c) = (|e,0,0>, |g,1,0>, |g,0,1>). Density matrices are
vectorized row-major, ``vec(rho)[3*i + j] = rho[i, j]``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import DefectiveGenerator, DefectiveGeneratorWarning, HorizonNotReached
from .params import RateParams

E, P, C = 0, 1, 2
CONDITION_LIMIT = 1e10
HORIZON_CAP = 1e4
TRACE_FLOOR = 1e-8
DEFAULT_POINTS = 400


def build_hamiltonian(params: RateParams) -> np.ndarray:
    """Resonant coupling Hamiltonian; real symmetric with zero diagonal."""
    g0, g1, g2 = params.g0, params.g1, params.g2
    return np.array([[0.0, g1, g0], [g1, 0.0, g2], [g0, g2, 0.0]])


def decay_widths(params: RateParams) -> np.ndarray:
    """Per-element decay rates of rho under the four Lindblad terms."""
    rates = np.array([params.gamma1, params.kappa1, params.kappa2])
    w = 0.5 * (rates[:, None] + rates[None, :])
    emitter = np.array([True, False, False])
    w = w + params.gamma_star * (emitter[:, None] ^ emitter[None, :])
    return w


@dataclass(frozen=True)
class LiouvillianMap:
    """9x9 generator acting on row-major vectorized density matrices."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition: float

    @property
    def diagonalizable(self) -> bool:
        return bool(np.isfinite(self.condition) and self.condition <= CONDITION_LIMIT)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(9)).reshape(3, 3)


def liouvillian_matrix(params: RateParams) -> np.ndarray:
    H = build_hamiltonian(params)
    eye = np.eye(3)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    L -= np.diag(decay_widths(params).reshape(9))
    return L


def build_liouvillian(params: RateParams) -> LiouvillianMap:
    L = liouvillian_matrix(params)
    lam, V = np.linalg.eig(L)
    cond = np.linalg.cond(V)
    left = np.linalg.inv(V) if np.isfinite(cond) else np.full_like(V, np.nan)
    return LiouvillianMap(L, lam, V, left, float(cond))


def initial_state() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[E, E] = 1.0
    return rho


@dataclass(frozen=True)
class Trajectory:
    """Sampled density matrices rho(t) starting from the excited emitter."""

    times: np.ndarray
    rho: np.ndarray
    t_max: float
    truncation_error: float
    method: str
    params: RateParams | None = None

    @property
    def populations(self) -> np.ndarray:
        """Array of shape (n, 3) holding rho_ee, rho_pp, rho_cc."""
        return np.real(np.einsum("nii->ni", self.rho))

    @property
    def trace(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    def element(self, i: int, j: int) -> np.ndarray:
        return self.rho[:, i, j]

    def __len__(self):
        return len(self.times)


def _modal_weights(lmap: LiouvillianMap) -> np.ndarray:
    return lmap.left @ initial_state().reshape(9)


def _eigen_states(lmap: LiouvillianMap, times: np.ndarray) -> np.ndarray:
    c = _modal_weights(lmap)
    phases = np.exp(np.outer(times, lmap.eigenvalues)) * c
    return (phases @ lmap.right.T).reshape(-1, 3, 3)


def _ode_states(L: np.ndarray, times: np.ndarray, rtol=1e-11, atol=1e-14) -> np.ndarray:
    # Radau needs a real system; split into real and imaginary parts.
    A = np.block([[L.real, -L.imag], [L.imag, L.real]])
    y0 = np.concatenate([initial_state().reshape(9).real, np.zeros(9)])
    t_eval = np.asarray(times, dtype=float)
    sol = solve_ivp(
        lambda t, y: A @ y,
        (0.0, float(t_eval[-1])),
        y0,
        method="Radau",
        t_eval=t_eval,
        jac=A,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise HorizonNotReached(f"ODE propagation failed: {sol.message}")
    y = sol.y.T
    return (y[:, :9] + 1j * y[:, 9:]).reshape(-1, 3, 3)


def _expm_states(L: np.ndarray, times: np.ndarray) -> np.ndarray:
    v0 = initial_state().reshape(9)
    return np.array([expm(L * t) @ v0 for t in times]).reshape(-1, 3, 3)


def _trace_at(lmap: LiouvillianMap, t: float, use_eigen: bool) -> float:
    if use_eigen:
        rho = _eigen_states(lmap, np.array([t]))[0]
    else:
        rho = _expm_states(lmap.matrix, np.array([t]))[0]
    return float(np.real(np.trace(rho)))


def slowest_rate(lmap: LiouvillianMap) -> float:
    """Smallest decay rate among modes that carry population from rho(0)."""
    if not lmap.diagonalizable:
        rates = -lmap.eigenvalues.real
        rates = rates[rates > 1e-12]
        return float(rates.min()) if rates.size else 0.0
    c = _modal_weights(lmap)
    diag = lmap.right[[0, 4, 8], :].sum(axis=0) * c
    scale = np.abs(diag).max()
    active = np.abs(diag) > 1e-14 * max(scale, 1e-300)
    rates = -lmap.eigenvalues.real[active]
    return float(rates.min()) if rates.size else 0.0


def auto_horizon(lmap: LiouvillianMap, floor: float = TRACE_FLOOR, cap: float = HORIZON_CAP) -> float:
    """Earliest doubling step T at which trace(rho(T)) <= floor."""
    rate = slowest_rate(lmap)
    if rate <= 1e-12:
        raise HorizonNotReached("population never decays; is some decay rate zero?")
    use_eigen = lmap.diagonalizable
    T = min(-np.log(floor) / rate, cap)
    while True:
        if _trace_at(lmap, T, use_eigen) <= floor:
            return T
        if T >= cap:
            raise HorizonNotReached(f"trace above {floor:g} at the horizon cap T = {cap:g}")
        T = min(2 * T, cap)


def fastest_rate(params: RateParams) -> float:
    return max(params.kappa1, params.kappa2, params.gamma1 + params.dephasing, params.g0, params.g1, params.g2)


def log_grid(t_min: float, t_max: float, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Zero followed by ``n_points`` log-spaced samples in [t_min, t_max]."""
    return np.concatenate([[0.0], np.geomspace(t_min, t_max, n_points)])


def default_time_grid(params: RateParams, lmap: LiouvillianMap | None = None, n_points: int = DEFAULT_POINTS):
    lmap = lmap or build_liouvillian(params)
    T = auto_horizon(lmap)
    t_min = min(1e-3 / fastest_rate(params), T / 10)
    return log_grid(t_min, T, n_points)


def propagate_density(
    params: RateParams,
    times=None,
    *,
    n_points: int = DEFAULT_POINTS,
    method: str = "auto",
    lmap: LiouvillianMap | None = None,
) -> Trajectory:
    """Solve the master equation from rho(0) = |e,0,0><e,0,0|.

    Parameters
    ----------
    times : array_like, optional
        Explicit non-decreasing sample times. When omitted a logarithmic grid
        of ``n_points`` samples (plus t = 0) up to the auto horizon is used.
    method : {"auto", "eigen", "ode", "expm"}
        ``auto`` uses the Liouvillian eigendecomposition and falls back to
        adaptive stepping when the eigenvector matrix is ill-conditioned.
    """
    lmap = lmap or build_liouvillian(params)
    if times is None:
        times = default_time_grid(params, lmap, n_points)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or np.any(times < 0):
        raise ValueError("times must be a non-decreasing 1-D array of non-negative values")

    if method == "auto":
        if lmap.diagonalizable:
            method = "eigen"
        else:
            warnings.warn(
                f"Liouvillian eigenvectors ill-conditioned (cond={lmap.condition:.2e}); using ODE stepping",
                DefectiveGeneratorWarning,
                stacklevel=2,
            )
            method = "ode"
    if method == "eigen":
        if not lmap.diagonalizable:
            raise DefectiveGenerator(f"eigenvector condition number {lmap.condition:.2e}")
        rho = _eigen_states(lmap, times)
    elif method == "ode":
        rho = _ode_states(lmap.matrix, times)
    elif method == "expm":
        rho = _expm_states(lmap.matrix, times)
    else:
        raise ValueError(f"unknown propagation method {method!r}")

    t_max = float(times[-1]) if times.size else 0.0
    rate = slowest_rate(lmap)
    tail = float(np.real(np.trace(rho[-1]))) if times.size else 1.0
    truncation = tail / rate if rate > 0 else np.inf
    return Trajectory(times, rho, t_max, truncation, method, params)
