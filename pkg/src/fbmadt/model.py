"""Degradation model with random drift and FBM noise, plus stress handling.

The degradation of a unit at standardized stress ``s*`` is::

    X(t) = a * exp(alpha1 * s*) * t**beta + sigma * B_H(t),  a ~ N(mu_a, sigma_a2)

Variants: ``M0`` full model, ``M1`` constant drift, ``M2`` Brownian noise
(H = 0.5), ``M3`` constant drift and Brownian noise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .exceptions import StressDomainError
from .fgn_fbm import H_MAX, H_MIN

KELVIN_OFFSET = 273.15


class AccelerationKind(str, enum.Enum):
    ARRHENIUS = "arrhenius"
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"


class Variant(str, enum.Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"

    @property
    def random_drift(self) -> bool:
        return self in (Variant.M0, Variant.M2)

    @property
    def free_hurst(self) -> bool:
        return self in (Variant.M0, Variant.M1)

    @property
    def n_params(self) -> int:
        return 4 + int(self.random_drift) + int(self.free_hurst)

    @property
    def free_names(self) -> tuple[str, ...]:
        names = ["mu_a", "sigma_a", "alpha1", "beta", "sigma", "h"]
        if not self.random_drift:
            names.remove("sigma_a")
        if not self.free_hurst:
            names.remove("h")
        return tuple(names)


@dataclass(frozen=True)
class StressSpec:
    """Acceleration model plus the normal (``s0``) and highest (``sH``) stress.

    Stresses are in native units; Arrhenius stresses are degrees Celsius.
    """

    kind: AccelerationKind
    s0: float
    sH: float

    def __post_init__(self):
        object.__setattr__(self, "kind", AccelerationKind(self.kind))
        if self.s0 == self.sH:
            raise StressDomainError("normal and highest stress must differ")
        if self.kind is AccelerationKind.ARRHENIUS:
            _kelvin(self.s0)
            _kelvin(self.sH)
        elif self.kind is AccelerationKind.POWER_LAW and (self.s0 <= 0 or self.sH <= 0):
            raise StressDomainError("power-law stresses must be positive")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "s0": self.s0, "sH": self.sH}

    @classmethod
    def from_dict(cls, d: dict) -> "StressSpec":
        return cls(AccelerationKind(d["kind"]), float(d["s0"]), float(d["sH"]))


def _kelvin(celsius: float) -> float:
    k = celsius + KELVIN_OFFSET
    if k <= 0:
        raise StressDomainError(f"temperature {celsius} degC is not above absolute zero")
    return k


def normalize_stress(s: float, spec: StressSpec) -> float:
    """Map a native stress to the standardized scale (0 at s0, 1 at sH)."""
    if s == spec.s0:
        return 0.0
    if s == spec.sH:
        return 1.0
    if spec.kind is AccelerationKind.ARRHENIUS:
        k, k0, kh = _kelvin(s), _kelvin(spec.s0), _kelvin(spec.sH)
        return (1.0 / k0 - 1.0 / k) / (1.0 / k0 - 1.0 / kh)
    if spec.kind is AccelerationKind.POWER_LAW:
        if s <= 0:
            raise StressDomainError("power-law stress must be positive")
        return (math.log(s) - math.log(spec.s0)) / (math.log(spec.sH) - math.log(spec.s0))
    return (s - spec.s0) / (spec.sH - spec.s0)


@dataclass(frozen=True)
class ThetaM0:
    """Parameter vector ``[mu_a, sigma_a2, alpha1, beta, sigma2, h]`` plus variant.

    ``sigma_a2`` and ``sigma2`` are variances; reports show standard deviations.
    """

    mu_a: float
    sigma_a2: float
    alpha1: float
    beta: float
    sigma2: float
    h: float = 0.5
    variant: Variant = Variant.M0

    def __post_init__(self):
        variant = Variant(self.variant)
        object.__setattr__(self, "variant", variant)
        if not variant.random_drift:
            object.__setattr__(self, "sigma_a2", 0.0)
        if not variant.free_hurst:
            object.__setattr__(self, "h", 0.5)
        if self.sigma_a2 < 0:
            raise ValueError("sigma_a2 must be >= 0")
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        if not self.sigma2 >= 0:
            raise ValueError("sigma2 must be >= 0")
        if not (H_MIN <= self.h <= H_MAX):
            raise ValueError(f"h must lie in [{H_MIN}, {H_MAX}]")

    @property
    def sigma_a(self) -> float:
        return math.sqrt(self.sigma_a2)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @classmethod
    def from_sd(cls, mu_a, sigma_a, alpha1, beta, sigma, h=0.5, variant=Variant.M0) -> "ThetaM0":
        """Build from standard deviations, the way parameter tables list them."""
        return cls(mu_a, sigma_a**2, alpha1, beta, sigma**2, h, variant)

    def with_variant(self, variant) -> "ThetaM0":
        return replace(self, variant=Variant(variant))

    def as_vector(self) -> np.ndarray:
        return np.array([self.mu_a, self.sigma_a2, self.alpha1, self.beta, self.sigma2, self.h])

    def sd_values(self) -> dict[str, float]:
        return {
            "mu_a": self.mu_a,
            "sigma_a": self.sigma_a,
            "alpha1": self.alpha1,
            "beta": self.beta,
            "sigma": self.sigma,
            "h": self.h,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaM0":
        if "sigma_a2" not in d and "sigma_a" in d:
            return cls.from_sd(
                d["mu_a"], d["sigma_a"], d["alpha1"], d["beta"], d["sigma"],
                d.get("h", 0.5), Variant(d.get("variant", "M0")),
            )
        return cls(
            float(d["mu_a"]), float(d.get("sigma_a2", 0.0)), float(d["alpha1"]),
            float(d["beta"]), float(d["sigma2"]), float(d.get("h", 0.5)),
            Variant(d.get("variant", "M0")),
        )


def drift_distribution(theta: ThetaM0, s_star: float) -> tuple[float, float]:
    """Mean and standard deviation of the degradation rate at ``s_star``."""
    factor = math.exp(theta.alpha1 * s_star)
    return theta.mu_a * factor, theta.sigma_a * factor


def trend(theta: ThetaM0, s_star: float, t):
    """Expected degradation ``mu_a * exp(alpha1 s*) * t**beta``."""
    mu_e, _ = drift_distribution(theta, s_star)
    return mu_e * np.power(t, theta.beta)


def basis_vector(theta: ThetaM0, s_star: float, grid) -> np.ndarray:
    return math.exp(theta.alpha1 * s_star) * np.power(np.asarray(grid, dtype=float), theta.beta)
