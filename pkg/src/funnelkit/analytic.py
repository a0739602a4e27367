"""Adiabatic-elimination rate model and the effective-emitter closed forms.

Every expression keeps Gamma_1 explicit so the functions also accept rates
that are not normalized (``params.gamma1`` is 1 for :class:`RateParams`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoPhotonFlux, ZeroDecayRate
from .metrics import MetricsResult, funneling_ratio
from .params import RateParams, RegimeFlags


@dataclass(frozen=True)
class ExchangeRates:
    R1: float
    R2: float
    R3: float
    phi: float
    r: float


def exchange_rates(params: RateParams) -> ExchangeRates:
    G1, d = params.gamma1, params.dephasing
    g0, g1, g2 = params.g0, params.g1, params.g2
    k1, k2 = params.kappa1, params.kappa2
    R1 = 4 * g1**2 / (G1 + d + k1)
    phi = 4 * g1**2 / (G1 + d + k2)
    R2 = 4 * g2**2 / (k1 + k2 + phi) if g2 else 0.0
    R3 = 4 * g0**2 / (G1 + d + k2)
    r = 4 * g0**2 / (G1 + d + R1)
    return ExchangeRates(R1, R2, R3, phi, r)


@dataclass(frozen=True)
class RateMatrix:
    """Population generator over (rho_ee, rho_pp, rho_cc)."""

    matrix: np.ndarray
    flags: RegimeFlags


def rate_matrix(params: RateParams) -> RateMatrix:
    x = exchange_rates(params)
    R1, R2, R3 = x.R1, x.R2, x.R3
    A = np.array(
        [
            [-params.gamma1 - R1 - R3, R1, R3],
            [R1, -params.kappa1 - R1 - R2, R2],
            [R3, R2, -params.kappa2 - R2 - R3],
        ]
    )
    return RateMatrix(A, params.flags)


def _symmetric_expm_apply(A: np.ndarray, x0: np.ndarray, times) -> np.ndarray:
    w, U = np.linalg.eigh(A)
    coeff = U.T @ x0
    times = np.asarray(times, dtype=float)
    return (np.exp(np.outer(times, w)) * coeff) @ U.T


def solve_rate_equations(A: RateMatrix | np.ndarray, times) -> np.ndarray:
    """Populations of shape (n, 3) from (1, 0, 0) at t = 0."""
    M = A.matrix if isinstance(A, RateMatrix) else np.asarray(A, dtype=float)
    return _symmetric_expm_apply(M, np.array([1.0, 0.0, 0.0]), times)


def reconstruct_coherences(params: RateParams, populations) -> dict[str, complex]:
    """Adiabatic coherences from populations (rho_ee, rho_pp, rho_cc).

    ``populations`` may be a 3-sequence or an array whose last axis has
    length 3; the returned values broadcast accordingly.
    """
    pops = np.asarray(populations, dtype=float)
    ee, pp, cc = pops[..., 0], pops[..., 1], pops[..., 2]
    G1, d = params.gamma1, params.dephasing
    g0, g1, g2 = params.g0, params.g1, params.g2
    k1, k2 = params.kappa1, params.kappa2
    phi = exchange_rates(params).phi
    we = G1 + d + k2  # emitter-cavity coherence width (doubled)
    wp = G1 + d + k1  # emitter-plasmon coherence width (doubled)
    wc = k1 + k2 + phi
    return {
        "ec": 2j * g0 * (ee - cc) / we - 4 * g1 * g2 * (ee - pp) / (we * wp) + 4 * g1 * g2 * (pp - cc) / (we * wc),
        "ce": 2j * g0 * (cc - ee) / we + 4 * g2 * g1 * (pp - ee) / (we * wp) - 4 * g2 * g1 * (cc - pp) / (we * wc),
        "ep": 2j * g1 * (ee - pp) / wp,
        "pe": 2j * g1 * (pp - ee) / wp,
        "pc": 2j * g2 * (pp - cc) / wc - 4 * g0 * g1 * (pp - ee) / (wp * wc),
        "cp": 2j * g2 * (cc - pp) / wc + 4 * g0 * g1 * (ee - pp) / (wp * wc),
    }


@dataclass(frozen=True)
class EffectiveParams:
    gamma1_eff: float
    kappa_eff: float
    R_eff: float

    @property
    def kappa_ratio(self) -> float:
        return self.kappa_eff / self.gamma1_eff


def effective_params(params: RateParams) -> EffectiveParams:
    x = exchange_rates(params)
    k1 = params.kappa1
    s = k1 + x.R1 + x.R2
    if s == 0:
        return EffectiveParams(params.gamma1, params.kappa2, x.R3)
    return EffectiveParams(
        gamma1_eff=params.gamma1 + k1 * x.R1 / s,
        kappa_eff=params.kappa2 + k1 * x.R2 / s,
        R_eff=x.R1 * x.R2 / s + x.R3,
    )


def effective_two_level(params: RateParams, times):
    """Emitter and cavity populations of the reduced two-level model.

    Returns ``(rho_ee, rho_cc, rho_pp)`` where the plasmon population is
    slaved to the other two.
    """
    eff = effective_params(params)
    x = exchange_rates(params)
    Gp, kp, Rp = eff.gamma1_eff, eff.kappa_eff, eff.R_eff
    A = np.array([[-Gp - Rp, Rp], [Rp, -kp - Rp]])
    pops = _symmetric_expm_apply(A, np.array([1.0, 0.0]), times)
    ee, cc = pops[:, 0], pops[:, 1]
    s = params.kappa1 + x.R1 + x.R2
    pp = (x.R1 * ee + x.R2 * cc) / s if s else np.zeros_like(ee)
    return ee, cc, pp


def _closed_forms(params: RateParams):
    eff = effective_params(params)
    x = exchange_rates(params)
    Gp, kp, Rp = eff.gamma1_eff, eff.kappa_eff, eff.R_eff
    if Rp <= 0:
        raise NoPhotonFlux("no exchange channel towards the outer cavity (R' = 0)")
    total = Gp + kp + 2 * Rp
    I = (Gp + kp * Rp / (kp + Rp)) / (total * ((params.kappa2 + x.R2 + x.r) / (kp + Rp)))
    beta = kp * Rp / total
    return I, beta


def _result(params, I, beta, method):
    return MetricsResult(
        I=I,
        beta=beta,
        F_dB=funneling_ratio(params, I, beta),
        I_error=math.nan,
        beta_error=math.nan,
        F_error=math.nan,
        method=method,
        mode="cavity",
        converged=True,
        details={"regime_ok": params.flags.all_ok},
    )


def analytic_metrics(params: RateParams) -> MetricsResult:
    """Effective-emitter estimates of I, beta and F for the cavity output."""
    I, beta = _closed_forms(params)
    return _result(params, I, beta, "analytic")


def direct_channel_limit(params: RateParams) -> MetricsResult:
    """The closed forms when the direct emitter-cavity rate R3 dominates R'."""
    eff = effective_params(params)
    R3 = exchange_rates(params).R3
    if R3 <= 0:
        raise NoPhotonFlux("direct-channel limit needs g0 > 0")
    Gp, kp = eff.gamma1_eff, eff.kappa_eff
    total = Gp + kp + 2 * R3
    I = (Gp + kp * R3 / (kp + R3)) / total
    beta = kp * R3 / total
    return _result(params, I, beta, "analytic-limit")


@dataclass(frozen=True)
class PurcellReport:
    F_p_plasmon: float
    F_p_generalized: float
    F_p_cavity: float


def purcell_report(params: RateParams) -> PurcellReport:
    if params.kappa1 <= 0 or params.kappa2 <= 0:
        raise ZeroDecayRate("Purcell factors need kappa1 > 0 and kappa2 > 0")
    G1 = params.gamma1
    return PurcellReport(
        F_p_plasmon=4 * params.g1**2 / (params.kappa1 * G1),
        F_p_generalized=4 * params.g1**2 / ((G1 + params.dephasing + params.kappa1) * G1),
        F_p_cavity=4 * params.g0**2 / (params.kappa2 * G1),
    )


def coupling_from_purcell(purcell: float, kappa: float, gamma1: float = 1.0) -> float:
    """Invert F_p = 4 g^2 / (kappa Gamma_1) for the coupling rate g."""
    if kappa <= 0:
        raise ZeroDecayRate("kappa must be > 0")
    if purcell < 0:
        raise ValueError("Purcell factor must be >= 0")
    return math.sqrt(purcell * kappa * gamma1 / 4)
