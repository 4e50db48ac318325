"""Lacunary cosine profiles and the shear initial data built on them.

A profile is the truncated series

    Σ_{j=3}^{J} w_j 2^{-js} cos(λ_j x),    λ_j = (11/8)·2^j = 11·2^{j-3},

with w_j = 1 (``uniform``) or w_j = j^{-2} (``quadratic_decay``). Each term sits
in exactly one dyadic block, which is what makes every Besov computation on
these profiles block-diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .spectral_core import TrigPolynomial

RULES = ("uniform", "quadratic_decay")
_RULE_ALIASES = {"uniform": "uniform", "quadratic_decay": "quadratic_decay", "jsq": "quadratic_decay"}
_RULE_JSON = {"uniform": "uniform", "quadratic_decay": "jsq"}

DEFAULT_J = 16


def lacunary_frequency(j: int) -> int:
    """λ_j = (11/8)·2^j as an exact integer (j >= 3)."""
    if j < 3:
        raise DomainError(f"(11/8)·2^j is an integer only for j >= 3, got j={j}")
    return 11 << (j - 3)


def _canonical_rule(rule: str) -> str:
    try:
        return _RULE_ALIASES[rule]
    except KeyError:
        raise DomainError(f"unknown weight rule {rule!r}; expected one of uniform, quadratic_decay, jsq") from None


@dataclass(frozen=True, eq=False)
class LacunaryProfile:
    s: float
    J: int
    rule: str = "uniform"
    poly: TrigPolynomial = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 3:
            raise DomainError(f"truncation index J must be an integer >= 3, got {self.J}")
        if not self.s > 0:
            raise DomainError(f"regularity s must be positive, got {self.s}")
        object.__setattr__(self, "J", int(self.J))
        object.__setattr__(self, "rule", _canonical_rule(self.rule))
        js = self.indices
        ks = [lacunary_frequency(j) for j in js]
        amps = [self.coefficient(j) for j in js]
        object.__setattr__(self, "poly", TrigPolynomial(ks, amps, np.zeros(len(ks))))

    @property
    def indices(self) -> range:
        return range(3, self.J + 1)

    @property
    def frequencies(self) -> list[int]:
        return [lacunary_frequency(j) for j in self.indices]

    @property
    def k_max(self) -> int:
        return lacunary_frequency(self.J)

    def weight(self, j: int) -> float:
        return 1.0 if self.rule == "uniform" else float(j) ** -2

    def coefficient(self, j: int) -> float:
        """Amplitude w_j 2^{-js} of cos(λ_j x)."""
        return self.weight(j) * 2.0 ** (-j * self.s)

    def __call__(self, x):
        return self.poly(x)


def build_profile(s: float, J: int = DEFAULT_J, rule: str = "uniform") -> LacunaryProfile:
    return LacunaryProfile(s, J, rule)


@dataclass(frozen=True, eq=False)
class ShearFlowState:
    """Velocity (c, h(x_axis), 0, ..., 0) on 𝕋^d with identically zero pressure.

    ``axis`` is 1 for every state the constructions produce; ``axis=2`` exists
    only to build non-solutions for residual checks, and such a state is not
    divergence-free.
    """

    d: int
    drift: float
    profile: TrigPolynomial
    viscosity: float = 0.0
    time: float = 0.0
    axis: int = 1

    def __post_init__(self):
        if self.d < 2:
            raise DomainError(f"shear flows need dimension d >= 2, got {self.d}")
        if self.viscosity < 0:
            raise DomainError(f"viscosity must be non-negative, got {self.viscosity}")
        if self.axis not in (1, 2):
            raise DomainError(f"profile axis must be 1 or 2, got {self.axis}")

    @property
    def divergence_free(self) -> bool:
        # div u = ∂_2 h(x_axis), zero unless the profile varies along x_2
        return self.axis == 1 or self.profile.k_max == 0

    @property
    def pressure(self) -> TrigPolynomial:
        return TrigPolynomial.zero()

    def components(self) -> list[TrigPolynomial]:
        zero = TrigPolynomial.zero()
        return [TrigPolynomial.constant(self.drift), self.profile] + [zero] * (self.d - 2)

    def velocity(self, x: np.ndarray) -> np.ndarray:
        """Velocity at points x of shape (..., d); returns shape (..., d)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        out[..., 0] = self.drift
        out[..., 1] = self.profile(x[..., self.axis - 1])
        return out

    def __sub__(self, other: "ShearFlowState") -> "ShearFlowState":
        if other.d != self.d or other.axis != self.axis:
            raise DomainError("states have different dimension or profile axis")
        return ShearFlowState(self.d, self.drift - other.drift, self.profile - other.profile,
                              time=self.time)

    def with_profile(self, profile: TrigPolynomial, **changes) -> "ShearFlowState":
        return replace(self, profile=profile, **changes)


def shear_initial_data(profile: LacunaryProfile | TrigPolynomial, d: int = 2,
                       drift: float = 1.0) -> ShearFlowState:
    """u₀ = (drift, profile(x₁), 0, ..., 0) at t = 0."""
    if d < 2:
        raise DomainError(f"shear flows need dimension d >= 2, got {d}")
    poly = profile.poly if isinstance(profile, LacunaryProfile) else profile
    return ShearFlowState(d=d, drift=float(drift), profile=poly)


def profile_from_descriptor(desc: dict | str) -> tuple[LacunaryProfile, ShearFlowState]:
    """Parse {"s", "J", "rule", "drift", "d"}; J, rule, drift and d are optional."""
    if isinstance(desc, str):
        desc = json.loads(desc)
    unknown = set(desc) - {"s", "J", "rule", "drift", "d"}
    if unknown:
        raise DomainError(f"unknown profile descriptor keys: {sorted(unknown)}")
    if "s" not in desc:
        raise DomainError("profile descriptor needs key 's'")
    prof = build_profile(float(desc["s"]), int(desc.get("J", DEFAULT_J)), desc.get("rule", "uniform"))
    state = shear_initial_data(prof, int(desc.get("d", 2)), float(desc.get("drift", 1.0)))
    return prof, state


def profile_descriptor(profile: LacunaryProfile, d: int = 2, drift: float = 1.0) -> dict:
    return {"s": profile.s, "J": profile.J, "rule": _RULE_JSON[profile.rule],
            "drift": drift, "d": d}
