"""
Independent numerical oracles for the closed-form shear solutions.

solve_advection_diffusion_1d
    Exact per-mode integrating factor for ∂_t f + ∂_x f = ε ∂_x² f, written on
    complex exponentials so it shares no multiplier code with ``flows``.

ns2d_solve
    Pseudo-spectral vorticity solver on 𝕋²:

        ∂_t ω + u·∇ω = ε Δω,   u = ū + ∇^⊥ Δ^{-1} ω,   ω = ∂₁u₂ - ∂₂u₁

    2/3-rule dealiasing (modes with |k_i| > N/3 zeroed), fourth-order Lawson
    Runge-Kutta with the diffusion term in the integrating factor, and the
    mean velocity ū carried explicitly (it is conserved on the torus).
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CFLWarning, DomainError, ResolutionError, SolverBlowUpError
from .spectral_core import TWO_PI, TrigPolynomial, is_power_of_two


def solve_advection_diffusion_1d(profile: TrigPolynomial, eps: float, T: float) -> TrigPolynomial:
    """f(T) for ∂_t f + ∂_x f - ε ∂_x² f = 0 with f(0) = profile."""
    if eps < 0 or T < 0:
        raise DomainError(f"need eps >= 0 and T >= 0, got eps={eps}, T={T}")
    k = profile.freqs.astype(float)
    # a cos kx + b sin kx = Re[(a - ib) e^{ikx}]
    z = (profile.cos - 1j * profile.sin) * np.exp(-1j * k * T - eps * k ** 2 * T)
    return TrigPolynomial(profile.freqs, z.real, -z.imag)


# ---------------------------------------------------------------------------
# 2-D pseudo-spectral Navier-Stokes
# ---------------------------------------------------------------------------

MAX_N = 512
MAX_T = 1.0


@dataclass(frozen=True)
class SolverConfig2D:
    N: int = 128
    dt: float = 1e-3
    eps: float = 0.01
    T: float = 0.1
    output_times: tuple[float, ...] = ()
    integrator: str = "rk4"

    def __post_init__(self):
        if not is_power_of_two(self.N) or self.N < 32 or self.N > MAX_N:
            raise DomainError(f"N must be a power of two in [32, {MAX_N}], got {self.N}")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.eps < 0:
            raise DomainError(f"viscosity must be non-negative, got {self.eps}")
        if not 0 <= self.T <= MAX_T:
            raise DomainError(f"final time must lie in [0, {MAX_T}], got {self.T}")
        if self.integrator != "rk4":
            raise DomainError(f"only the rk4 integrator is available, got {self.integrator!r}")
        object.__setattr__(self, "output_times", tuple(float(t) for t in self.output_times))

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.T / self.dt - 1e-9)) if self.T > 0 else 0

    @classmethod
    def from_json(cls, text_or_path: str) -> "SolverConfig2D":
        if os.path.exists(text_or_path):
            with open(text_or_path) as fh:
                data = json.load(fh)
        else:
            data = json.loads(text_or_path)
        allowed = {"N", "dt", "eps", "T", "output_times", "integrator"}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"unknown solver config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        d = asdict(self)
        d["output_times"] = list(self.output_times)
        return json.dumps(d, sort_keys=True)


@dataclass(frozen=True)
class _Spectral2D:
    N: int
    k1: np.ndarray
    k2: np.ndarray
    ksq: np.ndarray
    ksq_inv: np.ndarray
    keep: np.ndarray

    @classmethod
    def build(cls, N: int) -> "_Spectral2D":
        k1 = (np.fft.fftfreq(N, 1.0 / N))[:, None]
        k2 = (np.fft.rfftfreq(N, 1.0 / N))[None, :]
        ksq = k1 ** 2 + k2 ** 2
        ksq_inv = np.zeros_like(ksq)
        ksq_inv[ksq > 0] = 1.0 / ksq[ksq > 0]
        keep = (np.abs(k1) <= N / 3) & (np.abs(k2) <= N / 3)
        return cls(N, k1, k2, ksq, ksq_inv, keep)

    @property
    def to_hat(self) -> float:
        # raw rfft2 -> û(k) = ∫ e^{-ik·x} u dx
        return (TWO_PI / self.N) ** 2

    def forward(self, field: np.ndarray) -> np.ndarray:
        return np.fft.rfft2(field) * self.to_hat

    def inverse(self, hat: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(hat / self.to_hat, s=(self.N, self.N))


@dataclass(frozen=True, eq=False)
class VorticityState2D:
    """Snapshot of the vorticity solver; ``omega_hat`` is in rfft2 layout, û convention."""

    t: float
    omega_hat: np.ndarray
    mean: np.ndarray
    N: int

    @property
    def _ops(self) -> _Spectral2D:
        return _spectral(self.N)

    def vorticity(self) -> np.ndarray:
        return self._ops.inverse(self.omega_hat)

    def velocity_hat(self) -> tuple[np.ndarray, np.ndarray]:
        ops = self._ops
        psi = self.omega_hat * ops.ksq_inv
        u1 = 1j * ops.k2 * psi
        u2 = -1j * ops.k1 * psi
        u1[0, 0] = self.mean[0] * TWO_PI ** 2
        u2[0, 0] = self.mean[1] * TWO_PI ** 2
        return u1, u2

    def velocity(self) -> tuple[np.ndarray, np.ndarray]:
        """(u₁, u₂) on the grid, indexed [i₁, i₂] with x_a = 2π i_a / N."""
        u1, u2 = self.velocity_hat()
        return self._ops.inverse(u1), self._ops.inverse(u2)

    def energy(self) -> float:
        """∫_𝕋² |u|² dx."""
        u1, u2 = self.velocity()
        return TWO_PI ** 2 * float(np.mean(u1 ** 2 + u2 ** 2))

    def divergence_max(self) -> float:
        ops = self._ops
        u1, u2 = self.velocity_hat()
        return float(np.max(np.abs(ops.k1 * u1 + ops.k2 * u2)))

    def mean_velocity(self) -> np.ndarray:
        u1, u2 = self.velocity_hat()
        return np.array([u1[0, 0].real, u2[0, 0].real]) / TWO_PI ** 2


_SPECTRAL_CACHE: dict[int, _Spectral2D] = {}


def _spectral(N: int) -> _Spectral2D:
    ops = _SPECTRAL_CACHE.get(N)
    if ops is None:
        ops = _SPECTRAL_CACHE[N] = _Spectral2D.build(N)
    return ops


def grid_2d(N: int) -> tuple[np.ndarray, np.ndarray]:
    x = TWO_PI * np.arange(N) / N
    return np.meshgrid(x, x, indexing="ij")


def initial_state(u0: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]],
                  N: int, div_tol: float = 1e-10) -> VorticityState2D:
    ops = _spectral(N)
    X1, X2 = grid_2d(N)
    v1, v2 = (np.broadcast_to(np.asarray(v, dtype=float), X1.shape) for v in u0(X1, X2))
    h1, h2 = ops.forward(v1), ops.forward(v2)
    scale = max(1.0, float(np.max(np.abs(h1))), float(np.max(np.abs(h2))))
    div = float(np.max(np.abs(ops.k1 * h1 + ops.k2 * h2)))
    if div > div_tol * scale:
        raise DomainError(f"initial velocity is not divergence-free (spectral defect {div:.3e})")
    omega = 1j * ops.k1 * h2 - 1j * ops.k2 * h1
    lost = float(np.max(np.abs(omega * ~ops.keep)))
    if lost > div_tol * scale:
        raise ResolutionError(
            f"initial vorticity has modes beyond the dealiasing band |k_i| <= N/3 (size {lost:.3e})",
            required_N=None)
    omega = omega * ops.keep
    mean = np.array([h1[0, 0].real, h2[0, 0].real]) / TWO_PI ** 2
    return VorticityState2D(0.0, omega, mean, N)


def _nonlinear(omega_hat: np.ndarray, mean: np.ndarray, ops: _Spectral2D) -> np.ndarray:
    """-(u·∇ω)^ with 2/3 dealiasing."""
    psi = omega_hat * ops.ksq_inv
    u1 = ops.inverse(1j * ops.k2 * psi) + mean[0]
    u2 = ops.inverse(-1j * ops.k1 * psi) + mean[1]
    w1 = ops.inverse(1j * ops.k1 * omega_hat)
    w2 = ops.inverse(1j * ops.k2 * omega_hat)
    return -ops.forward(u1 * w1 + u2 * w2) * ops.keep


def cfl_number(state: VorticityState2D, dt: float) -> float:
    u1, u2 = state.velocity()
    umax = float(np.max(np.hypot(u1, u2)))
    return dt * umax * state.N / TWO_PI


def ns2d_solve(u0, cfg: SolverConfig2D) -> list[VorticityState2D]:
    """Integrate from u0 (a sampler (X1, X2) -> (u1, u2)) and return snapshots.

    Snapshots are taken at t = 0, at every requested output time (rounded to
    the nearest step) and at T.
    """
    state = u0 if isinstance(u0, VorticityState2D) else initial_state(u0, cfg.N)
    ops = _spectral(cfg.N)
    n = cfg.n_steps
    dt = cfg.T / n if n else 0.0
    cfl = cfl_number(state, dt)
    if cfl > 1.0:
        warnings.warn(f"CFL number {cfl:.3f} exceeds 1 (dt={dt}, N={cfg.N})", CFLWarning, stacklevel=2)
    save = {0, n}
    for t_out in cfg.output_times:
        if not 0 <= t_out <= cfg.T:
            raise DomainError(f"output time {t_out} outside [0, {cfg.T}]")
        save.add(int(round(t_out / dt)) if dt else 0)

    E_half = np.exp(-cfg.eps * ops.ksq * dt / 2)
    E_full = E_half ** 2
    mean = state.mean.copy()
    w = state.omega_hat.copy()
    out = [state]
    last_t = 0.0
    for step in range(1, n + 1):
        k1 = _nonlinear(w, mean, ops)
        k2 = _nonlinear(E_half * (w + 0.5 * dt * k1), mean, ops)
        k3 = _nonlinear(E_half * w + 0.5 * dt * k2, mean, ops)
        k4 = _nonlinear(E_full * w + dt * E_half * k3, mean, ops)
        w = E_full * w + dt / 6.0 * (E_full * k1 + 2.0 * E_half * (k2 + k3) + k4)
        if not np.all(np.isfinite(w)):
            raise SolverBlowUpError(f"non-finite vorticity at step {step}", last_stable_time=last_t)
        last_t = step * dt
        if step in save:
            out.append(VorticityState2D(last_t, w.copy(), mean.copy(), cfg.N))
    return out


# ---------------------------------------------------------------------------
# Samplers, closed forms and output
# ---------------------------------------------------------------------------


def shear_sampler(drift: float, profile: TrigPolynomial):
    def u0(X1, X2):
        return np.full(X1.shape, float(drift)), profile(X1)
    return u0


def taylor_green_sampler(amplitude: float = 1.0):
    def u0(X1, X2):
        return (amplitude * np.sin(X1) * np.cos(X2), -amplitude * np.cos(X1) * np.sin(X2))
    return u0


def taylor_green_velocity(X1, X2, eps: float, t: float, amplitude: float = 1.0):
    decay = amplitude * math.exp(-2.0 * eps * t)
    return decay * np.sin(X1) * np.cos(X2), -decay * np.cos(X1) * np.sin(X2)


def _atomic_write_rows(path: str, header: Sequence[str], rows) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_spectral_csv(state: VorticityState2D, path: str) -> None:
    """Rows (k1, k2, Re ω̂, Im ω̂) over the stored half plane k2 >= 0."""
    ops = _spectral(state.N)
    k1 = np.broadcast_to(ops.k1, state.omega_hat.shape).astype(int).ravel()
    k2 = np.broadcast_to(ops.k2, state.omega_hat.shape).astype(int).ravel()
    w = state.omega_hat.ravel()
    rows = ((a, b, repr(float(c.real)), repr(float(c.imag))) for a, b, c in zip(k1, k2, w))
    _atomic_write_rows(path, ("k1", "k2", "re_omega_hat", "im_omega_hat"), rows)


def write_field_csv(state: VorticityState2D, path: str) -> None:
    """Rows (x1, x2, u1, u2, omega) on the solver grid."""
    X1, X2 = grid_2d(state.N)
    u1, u2 = state.velocity()
    om = state.vorticity()
    cols = (X1.ravel(), X2.ravel(), u1.ravel(), u2.ravel(), om.ravel())
    rows = (tuple(repr(float(v)) for v in r) for r in zip(*cols))
    _atomic_write_rows(path, ("x1", "x2", "u1", "u2", "omega"), rows)


# ---------------------------------------------------------------------------
# Validation against closed forms
# ---------------------------------------------------------------------------


def shear_velocity(X1, drift: float, profile: TrigPolynomial, eps: float, t: float):
    """Closed-form (u₁, u₂) of the damped shear wave with profile(x₁) at t = 0."""
    k = profile.freqs.astype(float)
    ang = k * drift * t
    damp = np.exp(-eps * k * k * t)
    a = damp * (profile.cos * np.cos(ang) - profile.sin * np.sin(ang))
    b = damp * (profile.cos * np.sin(ang) + profile.sin * np.cos(ang))
    return np.full(X1.shape, float(drift)), TrigPolynomial(profile.freqs, a, b)(X1)


def velocity_error(state: VorticityState2D, exact) -> float:
    """sup-norm distance between the solver velocity and exact (u₁, u₂) on the grid."""
    u1, u2 = state.velocity()
    return max(float(np.max(np.abs(u1 - exact[0]))), float(np.max(np.abs(u2 - exact[1]))))


def validate_solver(cfg: SolverConfig2D, profile: TrigPolynomial, drift: float = 1.0) -> dict:
    """Shear and Taylor-Green errors at T, plus the shear error with dt halved."""
    if profile.k_max > cfg.N / 3:
        raise DomainError(f"profile frequency {profile.k_max} is not resolved below N/3 = {cfg.N / 3:.1f}")
    X1, X2 = grid_2d(cfg.N)

    def shear_error(c: SolverConfig2D) -> float:
        final = ns2d_solve(shear_sampler(drift, profile), c)[-1]
        return velocity_error(final, shear_velocity(X1, drift, profile, c.eps, final.t))

    coarse = shear_error(cfg)
    fine = shear_error(SolverConfig2D(cfg.N, cfg.dt / 2, cfg.eps, cfg.T))
    tg = ns2d_solve(taylor_green_sampler(), cfg)[-1]
    return {
        "shear_error": coarse,
        "shear_error_half_dt": fine,
        "shear_error_ratio": coarse / fine if fine > 0 else math.inf,
        "taylor_green_error": velocity_error(tg, taylor_green_velocity(X1, X2, cfg.eps, tg.t)),
    }
