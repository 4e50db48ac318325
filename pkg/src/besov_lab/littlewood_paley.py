"""
Periodic Littlewood-Paley blocks, Lᵖ norms and nonhomogeneous Besov norms.

The dyadic partition is built from the C^∞ step

    ψ(x) = h(1-x) / (h(1-x) + h(x)),   h(x) = exp(-1/x) for x > 0, else 0,

rescaled so that χ ≡ 1 on |ξ| ≤ 3/4 and χ ≡ 0 on |ξ| ≥ 4/3. Then
φ(ξ) = χ(ξ/2) - χ(ξ) and φ_j(ξ) = φ(2^{-j} ξ), with Δ_{-1} weighting by χ
and Δ_j (j ≥ 0) by φ_j.

Norms of functions of x₁ alone on 𝕋^d are obtained from their 𝕋 norm by the
Fubini factor (2π)^{(d-1)/p}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, PartitionRangeError, QuadratureError, ResolutionError
from .spectral_core import (
    TWO_PI,
    Field1D,
    TrigPolynomial,
    dft_forward,
    next_power_of_two,
)

CHI_INNER = 0.75
CHI_OUTER = 4.0 / 3.0

QUAD_RTOL = 1e-10
QUAD_MAX_POINTS = 2 ** 22
GAUSS_NODES = 16
SUP_OVERSAMPLE = 8
# terms × peaks per Newton batch
SUP_BATCH = 2 ** 20
# On the DFT path, coefficients below this many machine epsilons (of the
# sample dtype) times the largest coefficient are treated as round-off.
DFT_NOISE_ULPS = 64

VECTOR_NORM_CONVENTION = "max over velocity components"


def _h(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C^∞ step equal to 1 for x <= 0 and 0 for x >= 1."""
    x = np.asarray(x, dtype=float)
    left, right = _h(1.0 - x), _h(x)
    return left / (left + right)


def chi(xi):
    """Low-frequency cutoff: 1 on |ξ| ≤ 3/4, 0 on |ξ| ≥ 4/3."""
    r = np.abs(np.asarray(xi, dtype=float))
    return smooth_step((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))


def phi(xi):
    """Annulus bump χ(ξ/2) - χ(ξ), supported in 3/4 ≤ |ξ| ≤ 8/3."""
    xi = np.asarray(xi, dtype=float)
    return chi(0.5 * xi) - chi(xi)


def phi_j(j: int, xi):
    return phi(np.ldexp(np.asarray(xi, dtype=float), -j))


def normalize_p(p) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "∞"):
            return math.inf
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError(f"integrability index must lie in [1, ∞], got {p}")
    return p


def fubini_factor(p, d: int) -> float:
    """(2π)^{(d-1)/p}: lifts an Lᵖ(𝕋) norm to Lᵖ(𝕋^d) for functions of x₁."""
    p = normalize_p(p)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return 1.0 if math.isinf(p) else TWO_PI ** ((d - 1) / p)


@dataclass(frozen=True)
class BesovIndex:
    s: float
    p: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "p", normalize_p(self.p))
        object.__setattr__(self, "r", normalize_p(self.r))
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """Tabulated weights χ(k), φ_0(k), ..., φ_J(k) for integers 0 <= k <= k_max.

    ``table[0]`` holds χ and ``table[j + 1]`` holds φ_j. Every φ_j with
    j > J vanishes identically on [0, k_max].
    """

    k_max: int
    table: np.ndarray

    @property
    def J(self) -> int:
        return self.table.shape[0] - 2

    def chi(self, xi):
        return chi(xi)

    def phi(self, xi):
        return phi(xi)

    def phi_j(self, j, xi):
        return phi_j(j, xi)

    def weights(self, j: int, k) -> np.ndarray:
        """Multiplier of Δ_j at integer frequencies k (sign ignored)."""
        k = np.abs(np.asarray(k, dtype=np.int64))
        if k.size and int(k.max()) > self.k_max:
            raise PartitionRangeError(
                f"frequency {int(k.max())} exceeds partition range k_max={self.k_max}")
        if j <= -2 or j > self.J:
            return np.zeros(k.shape)
        return self.table[j + 1][k]

    def unity_defect(self, J: int | None = None) -> float:
        """max_k |χ(k) + Σ_{j<=J} φ_j(k) - 1| over the tabulated integers."""
        rows = self.table if J is None else self.table[: J + 2]
        return float(np.max(np.abs(rows.sum(axis=0) - 1.0)))


def top_block_index(k_max: int) -> int:
    """Largest j for which φ_j has support on some integer in [1, k_max]."""
    j = 0
    while CHI_INNER * 2.0 ** (j + 1) < k_max:
        j += 1
    return j


@lru_cache(maxsize=16)
def build_partition(k_max: int) -> DyadicPartition:
    if k_max < 4:
        raise DomainError(f"partition needs k_max >= 4, got {k_max}")
    k = np.arange(k_max + 1, dtype=float)
    J = top_block_index(k_max)
    rows = [chi(k)]
    for j in range(J + 1):
        rows.append(chi(np.ldexp(k, -(j + 1))) - chi(np.ldexp(k, -j)))
    table = np.vstack(rows)
    table.setflags(write=False)
    return DyadicPartition(int(k_max), table)


def _default_partition(k_needed: int) -> DyadicPartition:
    return build_partition(max(4, next_power_of_two(max(int(k_needed), 1))))


def dyadic_block(u, j: int, P: DyadicPartition | None = None):
    """Δ_j u for a TrigPolynomial or a Field1D; returns the same kind."""
    if isinstance(u, TrigPolynomial):
        P = P or _default_partition(u.k_max)
        if u.k_max > P.k_max:
            raise PartitionRangeError(
                f"polynomial frequency {u.k_max} exceeds partition range k_max={P.k_max}")
        return u.apply_multiplier(P.weights(j, u.freqs))
    if isinstance(u, Field1D):
        N = u.grid.N
        P = P or _default_partition(N // 2)
        freqs = u.grid.freqs
        spec = np.fft.fft(u.samples) * P.weights(j, freqs)
        return Field1D(u.grid, np.fft.ifft(spec).real)
    raise TypeError(f"cannot take a dyadic block of {type(u).__name__}")


# ---------------------------------------------------------------------------
# Lᵖ norms
# ---------------------------------------------------------------------------


def _reduce_by_gcd(u: TrigPolynomial) -> TrigPolynomial:
    # u(x) = v(gx) with g = gcd of the frequencies; ∫|u|ᵖ and sup|u| equal those of v.
    nonconst = u.freqs[u.freqs > 0]
    if nonconst.size == 0:
        return u
    g = int(np.gcd.reduce(nonconst))
    if g == 1:
        return u
    return TrigPolynomial(u.freqs // g, u.cos, u.sin)


def _power_integral(u: TrigPolynomial, p: float) -> float:
    """∫_0^{2π} |u|ᵖ dx, refined by doubling until successive estimates agree."""
    v = _reduce_by_gcd(u)
    if v.is_zero():
        return 0.0
    if v.k_max == 0:
        return TWO_PI * abs(v.cos[0]) ** p
    # ∫|Au|ᵖ = |A|ᵖ ∫|u|ᵖ, so cache on the shape normalised by its largest coefficient
    scale = float(max(np.max(np.abs(v.cos)), np.max(np.abs(v.sin))))
    key = (v.freqs.tobytes(), (v.cos / scale).tobytes(), (v.sin / scale).tobytes(), p)
    return scale ** p * _normalized_power_integral(key)


@lru_cache(maxsize=4096)
def _normalized_power_integral(key) -> float:
    freqs, cos, sin, p = key
    v = TrigPolynomial(np.frombuffer(freqs, dtype=np.int64), np.frombuffer(cos), np.frombuffer(sin))
    roots = _roots(v)
    if roots.size == 0:
        # |v|ᵖ is smooth and periodic: the trapezoid rule converges spectrally
        return _converge(lambda N: TWO_PI * np.mean(np.abs(v.values_on_grid(N)) ** p),
                         max(16, next_power_of_two(4 * v.k_max + 1)), 1, p)
    # composite Gauss-Legendre between consecutive zeros; x = a + (b-a)(1 - cos πτ)/2
    # turns the |x - zero|ᵖ endpoint behaviour into a smooth τ^{2p+1}
    a = roots
    b = np.append(roots[1:], roots[0] + TWO_PI)
    half = 0.5 * (b - a)[:, None]
    g, gw = _gauss_legendre(GAUSS_NODES)

    def estimate(panels):
        edges = np.arange(panels) / panels
        tau = (edges[:, None] + (g[None, :] + 1.0) / (2 * panels)).ravel()
        w = np.tile(gw / (2 * panels), panels)
        theta = np.pi * tau
        x = a[:, None] + half * (1.0 - np.cos(theta))
        jac = half * np.pi * np.sin(theta)
        return float(np.sum(np.abs(v(x)) ** p * jac * w))

    return _converge(estimate, 1, a.size * GAUSS_NODES, p)


def _converge(estimate, n, per_point: int, p: float) -> float:
    prev = estimate(n)
    last_two = (math.nan, prev)
    while 2 * n * per_point <= QUAD_MAX_POINTS:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) <= QUAD_RTOL * abs(cur):
            return cur
        last_two = (prev, cur)
        prev = cur
    raise QuadratureError(
        f"Lᵖ quadrature (p={p}) did not converge with {QUAD_MAX_POINTS} points",
        last_two=last_two)


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _roots(v: TrigPolynomial) -> np.ndarray:
    """Sign-changing zeros of v in [0, 2π), located on a fine grid and polished by brentq."""
    M = max(256, 32 * next_power_of_two(2 * v.k_max + 1))
    x = TWO_PI * np.arange(M + 1) / M
    y = v(x)
    sgn = np.sign(y)
    out = list(x[:M][sgn[:M] == 0])
    f = lambda t: float(v(np.array([t]))[0])
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        out.append(optimize.brentq(f, x[i], x[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return np.unique(np.mod(out, TWO_PI))


def _sup(u: TrigPolynomial) -> float:
    """sup |u| from an oversampled grid, polished by Newton steps on u' = 0 at every local peak."""
    v = _reduce_by_gcd(u)
    if v.is_zero():
        return 0.0
    if v.k_max == 0:
        return abs(float(v.cos[0]))
    N = max(64, SUP_OVERSAMPLE * next_power_of_two(2 * v.k_max + 1))
    vals = np.abs(v.values_on_grid(N))
    best = float(vals.max())
    # near-equal peaks can swap order on the grid, so all of them are refined
    peaks = TWO_PI * np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))) / N
    chunk = max(1, SUP_BATCH // v.n_terms)
    for start in range(0, peaks.size, chunk):
        best = max(best, _newton_peaks(v, peaks[start:start + chunk], TWO_PI / N))
    return best


def _newton_peaks(v: TrigPolynomial, x: np.ndarray, h: float) -> float:
    k = v.freqs.astype(float)[:, None]
    a, b = v.cos[:, None], v.sin[:, None]
    for _ in range(30):
        c, s = np.cos(k * x), np.sin(k * x)
        d1 = np.sum(k * (b * c - a * s), axis=0)
        d2 = np.sum(-k * k * (a * c + b * s), axis=0)
        step = np.clip(np.divide(d1, d2, out=np.zeros_like(d1), where=d2 != 0), -h, h)
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return float(np.max(np.abs(v(x))))


def _field_to_poly(f: Field1D, noise_rtol: float = 64 * np.finfo(float).eps) -> TrigPolynomial:
    c = dft_forward(f)
    return _spectrum_to_poly(c.values, noise_rtol)


def _spectrum_to_poly(values: np.ndarray, noise_rtol: float, scale: float | None = None) -> TrigPolynomial:
    """Cosine/sine coefficients from a full FFT-ordered spectrum (û convention)."""
    N = values.size
    half = N // 2
    v = values[:half].copy()
    if scale is None:
        scale = float(np.max(np.abs(values), initial=0.0))
    v[np.abs(v) <= noise_rtol * scale] = 0.0
    a = (v.real / np.pi).astype(float)
    b = (-v.imag / np.pi).astype(float)
    a[0] = float(v[0].real / TWO_PI)
    b[0] = 0.0
    return TrigPolynomial(np.arange(half), a, b)


def lp_norm(u, p, d_factor: int = 1) -> float:
    """‖u‖_{Lᵖ(𝕋)} · (2π)^{(d_factor-1)/p} for u a TrigPolynomial or Field1D."""
    p = normalize_p(p)
    lift = fubini_factor(p, d_factor)
    if isinstance(u, Field1D):
        if p == 2:
            return math.sqrt(TWO_PI * float(np.mean(u.samples.astype(float) ** 2))) * lift
        u = _field_to_poly(u)
    if not isinstance(u, TrigPolynomial):
        raise TypeError(f"cannot take an Lᵖ norm of {type(u).__name__}")
    if math.isinf(p):
        return _sup(u) * lift
    if p == 2:
        energy = np.pi * float(np.sum(u.cos ** 2 + u.sin ** 2))
        if u.freqs.size and u.freqs[0] == 0:
            energy += np.pi * float(u.cos[0]) ** 2
        return math.sqrt(energy) * lift
    return _power_integral(u, p) ** (1.0 / p) * lift


def c0(p) -> float:
    """‖cos(λx)‖_{Lᵖ(0, 2π)} for integer λ >= 1: (2∫_0^π |cos x|ᵖ dx)^{1/p}, or 1 at p = ∞."""
    p = normalize_p(p)
    if math.isinf(p):
        return 1.0
    val, _ = integrate.quad(lambda x: abs(math.cos(x)) ** p, 0.0, math.pi,
                            points=[math.pi / 2], epsabs=0.0, epsrel=1e-13, limit=200)
    return (2.0 * val) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Besov norms
# ---------------------------------------------------------------------------


def min_block_range(k_max: int) -> int:
    """Smallest J with k_max < (8/3)·2^J, i.e. every block above J vanishes."""
    J = -1
    while k_max >= (8.0 / 3.0) * 2.0 ** J:
        J += 1
    return J


def _aggregate(weighted: np.ndarray, r: float) -> float:
    if weighted.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(weighted))
    top = float(np.max(weighted))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((weighted / top) ** r)) ** (1.0 / r)


def besov_block_norms(u, s: float, p, J_max: int | None = None, d_factor: int = 1,
                      P: DyadicPartition | None = None) -> np.ndarray:
    """Array of 2^{js} ‖Δ_j u‖_{Lᵖ(𝕋^d)} for j = -1, ..., J_max."""
    p = normalize_p(p)
    if isinstance(u, Field1D):
        return _field_block_norms(u, s, p, J_max, d_factor, P)
    if not isinstance(u, TrigPolynomial):
        raise TypeError(f"cannot take a Besov norm of {type(u).__name__}")
    needed = min_block_range(u.k_max)
    if J_max is None:
        J_max = needed
    elif J_max < needed:
        raise ResolutionError(
            f"k_max={u.k_max} is not band-limited below (8/3)·2^{J_max}; needs J_max >= {needed}")
    P = P or _default_partition(u.k_max)
    if u.k_max > P.k_max:
        raise PartitionRangeError(
            f"polynomial frequency {u.k_max} exceeds partition range k_max={P.k_max}")
    out = np.zeros(J_max + 2)
    for idx, j in enumerate(range(-1, J_max + 1)):
        block = u.apply_multiplier(P.weights(j, u.freqs))
        if not block.is_zero():
            out[idx] = 2.0 ** (j * s) * lp_norm(block, p, d_factor)
    return out


def _field_block_norms(f: Field1D, s, p, J_max, d_factor, P) -> np.ndarray:
    # DFT path: one forward transform, multipliers applied to the spectrum.
    N = f.grid.N
    coeffs = dft_forward(f).values
    eps = float(np.finfo(f.samples.dtype).eps)
    floor = DFT_NOISE_ULPS * eps * float(np.max(np.abs(coeffs), initial=0.0))
    needed = min_block_range(N // 2)
    if J_max is None:
        J_max = needed
    P = P or _default_partition(N // 2)
    if N // 2 > P.k_max:
        raise PartitionRangeError(f"grid frequency {N // 2} exceeds partition range k_max={P.k_max}")
    half = N // 2
    # real samples: the non-negative half of the spectrum carries everything
    pos = coeffs[:half + 1]
    ks = np.arange(half + 1)
    lift = fubini_factor(p, d_factor)
    out = np.zeros(J_max + 2)
    for idx, j in enumerate(range(-1, J_max + 1)):
        w = P.weights(j, ks)
        support = np.flatnonzero(w)
        block = pos[support] * w[support]
        keep = np.abs(block) > floor
        support, block = support[keep], block[keep]
        if support.size == 0:
            continue
        if p == 2:
            mult = np.where((support == 0) | (support == half), 1.0, 2.0)
            norm = math.sqrt(float(np.sum(mult * np.abs(block) ** 2)) / TWO_PI) * lift
        else:
            norm = lp_norm(_half_spectrum_to_poly(support, block, N), p, d_factor)
        out[idx] = 2.0 ** (j * s) * norm
    return out


def _half_spectrum_to_poly(ks: np.ndarray, v: np.ndarray, N: int) -> TrigPolynomial:
    """TrigPolynomial from û at frequencies 0 <= k <= N/2 of a real field."""
    a = (v.real / np.pi).astype(float)
    b = (-v.imag / np.pi).astype(float)
    # the mean and Nyquist modes appear once in the full spectrum, not twice
    single = (ks == 0) | (ks == N // 2)
    a[single] = (v.real[single] / TWO_PI).astype(float)
    b[single] = 0.0
    return TrigPolynomial(ks, a, b)


def besov_norm_scalar(u, idx: BesovIndex, J_max: int | None = None, d_factor: int = 1,
                      P: DyadicPartition | None = None) -> float:
    """‖u‖_{B^s_{p,r}} of a function of x₁, measured on 𝕋^{d_factor}."""
    blocks = besov_block_norms(u, idx.s, idx.p, J_max, d_factor, P)
    return _aggregate(blocks, idx.r)


def besov_norm_shear(state, idx: BesovIndex, J_max: int | None = None,
                     P: DyadicPartition | None = None) -> float:
    """Max over components of (c, h(x₁), 0, ..., 0); see VECTOR_NORM_CONVENTION."""
    d = state.d
    drift = besov_norm_scalar(TrigPolynomial.constant(state.drift), idx, None, d, P)
    profile = besov_norm_scalar(state.profile, idx, J_max, d, P)
    return max(drift, profile)
