"""
Exact shear solutions of the Euler and Navier-Stokes equations.

For u = (c, h(x₁ - ct), 0, ..., 0) the nonlinearity reduces to c ∂₁u₂ and the
pressure is zero, so

    Euler:   u₂(t) = h(x₁ - ct)
    NS:      u₂(t) = Σ e^{-ε k² t} [a_k cos k(x₁ - t) + b_k sin k(x₁ - t)]   (c = 1)

are exact. Residuals are evaluated with time derivatives taken analytically on
the coefficients, never by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError, WrongEquationError
from .lacunary import ShearFlowState, lacunary_frequency
from .spectral_core import Grid1D, TrigPolynomial, differentiate, heat_damp, translate

KINDS = ("euler_vs_data", "two_speed", "viscous")


def euler_traveling_wave(data: ShearFlowState, t: float) -> ShearFlowState:
    """(c, h(x₁ - ct), 0, ..., 0) after a further time t."""
    if data.viscosity != 0:
        raise WrongEquationError(
            f"Euler traveling wave needs an inviscid state, got viscosity {data.viscosity}")
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    # a function of x₂ is unchanged by translation along x₁
    profile = translate(data.profile, data.drift * t) if data.axis == 1 else data.profile
    return data.with_profile(profile, time=data.time + t)


def ns_damped_wave(data: ShearFlowState, eps: float, t: float) -> ShearFlowState:
    """Unit-drift Navier-Stokes shear solution after a further time t."""
    if data.drift != 1.0:
        raise DomainError(f"damped wave is built for unit drift, got c={data.drift}")
    if eps < 0 or t < 0:
        raise DomainError(f"need eps >= 0 and t >= 0, got eps={eps}, t={t}")
    profile = heat_damp(translate(data.profile, t), eps, t)
    return data.with_profile(profile, viscosity=eps, time=data.time + t)


@dataclass(frozen=True)
class BlockModulation:
    """Coefficients of cos(λ_j x₁) and sin(λ_j x₁) in one block of a difference."""

    kind: str
    j: int
    t: float
    a: float | None = None
    b: float | None = None
    c: float | None = None
    d: float | None = None
    e: float | None = None
    f: float | None = None
    g: float | None = None


def block_modulation(kind: str, j: int, t: float, *, lam_n: float | None = None,
                     eps: float | None = None) -> BlockModulation:
    lam = float(lacunary_frequency(j))
    if kind == "euler_vs_data":
        return BlockModulation(kind, j, t, a=math.cos(lam * t) - 1.0, b=math.sin(lam * t))
    if kind == "two_speed":
        if lam_n is None:
            raise UsageError("two_speed modulation needs lam_n")
        return BlockModulation(kind, j, t,
                               c=math.cos(lam * lam_n * t) - math.cos(lam * t),
                               d=math.sin(lam * lam_n * t) - math.sin(lam * t))
    if kind == "viscous":
        if eps is None:
            raise UsageError("viscous modulation needs eps")
        return BlockModulation(kind, j, t, e=math.cos(lam * t), f=math.sin(lam * t),
                               g=math.expm1(-eps * lam * lam * t))
    raise UsageError(f"unknown modulation kind {kind!r}; expected one of {KINDS}")


def _trajectory_rate(h0: TrigPolynomial, c: float, nu: float, t: float) -> TrigPolynomial:
    """∂_t of τ ↦ e^{-ν k² τ}[a_k cos k(x - cτ) + b_k sin k(x - cτ)] at τ = t."""
    k = h0.freqs.astype(float)
    ang = k * c * t
    damp = np.exp(-nu * k * k * t)
    A = damp * (h0.cos * np.cos(ang) - h0.sin * np.sin(ang))
    B = damp * (h0.cos * np.sin(ang) + h0.sin * np.cos(ang))
    return TrigPolynomial(h0.freqs, -k * c * B - nu * k * k * A, k * c * A - nu * k * k * B)


def euler_residual(data: ShearFlowState, t: float, probe: Grid1D) -> float:
    """sup over probe nodes of |∂_t u + u·∇u| for the traveling wave started at data."""
    if data.viscosity != 0:
        raise WrongEquationError("Euler residual needs an inviscid state")
    u_t = euler_traveling_wave(data, t)
    h = u_t.profile
    x = probe.nodes
    if data.axis == 1:
        dt_u2 = _trajectory_rate(data.profile, data.drift, 0.0, t)
        advection = data.drift * differentiate(h)(x)
    else:
        dt_u2 = TrigPolynomial.zero()
        advection = h(x) * differentiate(h)(x)
    # component 1 is constant in space and time
    return float(np.max(np.abs(dt_u2(x) + advection)))


def ns_residual(data: ShearFlowState, eps: float, t: float, probe: Grid1D) -> float:
    """sup-norm residual of ∂_t f + c ∂_x f - ε ∂_x² f along the state's own trajectory.

    The trajectory is the damped wave with the state's viscosity (the plain
    traveling wave when that viscosity is zero); ``eps`` is the viscosity of
    the equation being checked.
    """
    if eps < 0:
        raise DomainError(f"viscosity must be non-negative, got {eps}")
    c, nu = data.drift, data.viscosity
    k = data.profile.freqs.astype(float)
    damp = np.exp(-nu * k * k * t)
    f = translate(data.profile, c * t).apply_multiplier(damp)
    fx = differentiate(f)
    fxx = differentiate(fx)
    rate = _trajectory_rate(data.profile, c, nu, t)
    x = probe.nodes
    return float(np.max(np.abs(rate(x) + c * fx(x) - eps * fxx(x))))


def sup_distance(a: ShearFlowState, b: ShearFlowState, probe: Grid1D) -> float:
    x = probe.nodes
    return max(abs(a.drift - b.drift), float(np.max(np.abs(a.profile(x) - b.profile(x)))))
