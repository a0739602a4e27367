"""Rate parameters, physical-unit conversion and the named parameter presets.

All rates are stored normalized to the bare emitter decay rate Gamma_1, which
is therefore identically 1. The dephasing field holds the *full* pure
dephasing rate 2*gamma_star.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Mapping

from .errors import MissingField, NegativeRate, NonFiniteValue, UnknownPreset, ZeroDecayRate

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

# 2g counts as "much smaller" than a linewidth sum when below this fraction of it.
WEAK_COUPLING_MARGIN = 0.2

RATE_NAMES = ("dephasing", "g0", "g1", "g2", "kappa1", "kappa2")

_ALIASES = {
    "pure_dephasing": "dephasing",
    "two_gamma_star": "dephasing",
    "2gamma*": "dephasing",
    "k1": "kappa1",
    "k2": "kappa2",
}


@dataclass(frozen=True)
class RegimeFlags:
    """Advisory weak-coupling indicators; the analytic closed forms assume all three."""

    emitter_plasmon: bool
    plasmon_cavity: bool
    emitter_cavity: bool

    @property
    def all_ok(self) -> bool:
        return self.emitter_plasmon and self.plasmon_cavity and self.emitter_cavity


@dataclass(frozen=True)
class RateParams:
    """The six system rates in units of Gamma_1.

    Parameters
    ----------
    dephasing : float
        Full pure-dephasing rate 2*gamma_star.
    g0, g1, g2 : float
        Emitter-cavity, emitter-plasmon and plasmon-cavity couplings.
    kappa1, kappa2 : float
        Plasmon and outer-cavity decay rates.
    """

    dephasing: float = 0.0
    g0: float = 0.0
    g1: float = 0.0
    g2: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    gamma1: float = field(default=1.0)

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise NonFiniteValue(f"{f.name} is not a number: {value!r}") from exc
            if not math.isfinite(value):
                raise NonFiniteValue(f"{f.name} must be finite, got {value}")
            if value < 0:
                raise NegativeRate(f"{f.name} must be >= 0, got {value}")
            object.__setattr__(self, f.name, value)
        if self.gamma1 != 1.0:
            raise ValueError("gamma1 is the normalization unit and must equal 1")

    @property
    def gamma_star(self) -> float:
        return 0.5 * self.dephasing

    @property
    def flags(self) -> RegimeFlags:
        m = WEAK_COUPLING_MARGIN
        return RegimeFlags(
            emitter_plasmon=2 * self.g1 < m * (self.gamma1 + self.dephasing + self.kappa1) or self.g1 == 0,
            plasmon_cavity=2 * self.g2 < m * (self.kappa1 + self.kappa2) or self.g2 == 0,
            emitter_cavity=2 * self.g0 < m * (self.gamma1 + self.dephasing + self.kappa2) or self.g0 == 0,
        )

    def as_dict(self) -> dict[str, float]:
        d = asdict(self)
        d.pop("gamma1")
        return d

    def with_(self, **changes) -> "RateParams":
        return replace(self, **changes)


def validate_params(raw: Mapping[str, object]) -> RateParams:
    """Build a :class:`RateParams` from a mapping of rate names to numbers.

    Accepts a few common aliases (``pure_dephasing``, ``k1``...). Every one
    of the six rates must be present.
    """
    normalized = {}
    for key, value in raw.items():
        name = _ALIASES.get(key, key)
        if name in RATE_NAMES:
            normalized[name] = value
    missing = [n for n in RATE_NAMES if n not in normalized]
    if missing:
        raise MissingField(f"missing rate(s): {', '.join(missing)}")
    return RateParams(**normalized)


@dataclass(frozen=True)
class PhysicalSpec:
    """Emission wavelength and bare lifetime of the emitter."""

    wavelength_nm: float
    lifetime_ns: float

    def __post_init__(self):
        for name in ("wavelength_nm", "lifetime_ns"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NonFiniteValue(f"{name} must be finite")
            if value <= 0:
                raise NegativeRate(f"{name} must be > 0, got {value}")
            object.__setattr__(self, name, value)

    @property
    def lifetime_s(self) -> float:
        return self.lifetime_ns * 1e-9

    @property
    def gamma1_rad_s(self) -> float:
        return 1.0 / self.lifetime_s

    @property
    def angular_frequency(self) -> float:
        return 2 * math.pi * SPEED_OF_LIGHT / (self.wavelength_nm * 1e-9)


def to_normalized(spec: PhysicalSpec, physical_rate: float) -> float:
    """Convert a rate in rad/s into multiples of Gamma_1 = 1/T1."""
    physical_rate = float(physical_rate)
    if not math.isfinite(physical_rate):
        raise NonFiniteValue(f"rate must be finite, got {physical_rate}")
    return physical_rate * spec.lifetime_s


def to_physical(spec: PhysicalSpec, normalized_rate: float) -> float:
    normalized_rate = float(normalized_rate)
    if not math.isfinite(normalized_rate):
        raise NonFiniteValue(f"rate must be finite, got {normalized_rate}")
    return normalized_rate / spec.lifetime_s


def cavity_q_factor(spec: PhysicalSpec, kappa2_normalized: float) -> float:
    """Quality factor omega/kappa2 of the outer cavity."""
    kappa2_normalized = float(kappa2_normalized)
    if not math.isfinite(kappa2_normalized):
        raise NonFiniteValue("kappa2 must be finite")
    if kappa2_normalized <= 0:
        raise ZeroDecayRate("kappa2 must be > 0 to define a quality factor")
    return spec.angular_frequency / to_physical(spec, kappa2_normalized)


def q_to_kappa2(spec: PhysicalSpec, q: float) -> float:
    """Inverse of :func:`cavity_q_factor`."""
    q = float(q)
    if not math.isfinite(q) or q <= 0:
        raise NonFiniteValue("Q must be finite and positive")
    return to_normalized(spec, spec.angular_frequency / q)


@dataclass(frozen=True)
class Preset:
    name: str
    params: RateParams
    note: str = ""


BASELINE = RateParams(dephasing=1e4, g0=0.0, g1=1e4, g2=1.3e3, kappa1=1e5, kappa2=6e2)

BOWTIE_KAPPA1 = 7.099e6

_BOWTIE_NOTE = (
    "bowtie antenna at 625.13 nm, T1 = 2.5 ns; outer cavity and dephasing "
    "taken from the main operating point (2g*=1e4, g2=1.3e3, kappa2=600, g0=0)"
)

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset(
            "bowtie_optimal",
            BASELINE.with_(g1=4.273e4, kappa1=BOWTIE_KAPPA1),
            "Fp = 1029, emitter centred in the gap; " + _BOWTIE_NOTE,
        ),
        Preset(
            "bowtie_intermediate",
            BASELINE.with_(g1=3.417e4, kappa1=BOWTIE_KAPPA1),
            "conservative estimate between the centred and offset cases; " + _BOWTIE_NOTE,
        ),
        Preset(
            "bowtie_offset",
            BASELINE.with_(g1=2.56e4, kappa1=BOWTIE_KAPPA1),
            "Fp = 369.3, emitter displaced 10 nm vertically; " + _BOWTIE_NOTE,
        ),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown parameter preset {name!r}; known: {', '.join(PRESETS)}") from None
