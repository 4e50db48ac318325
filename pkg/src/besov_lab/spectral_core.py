"""
Periodic functions on [0, 2π): exact trigonometric sums and sampled fields.

Fourier convention
------------------
    û(k) = ∫_𝕋 e^{-ikx} u(x) dx,        u(x) = (2π)^{-1} Σ_k û(k) e^{ikx}

No normalisation on the forward transform, 1/(2π) on the inverse. Every
constant downstream (Besov norms, gap constants) is computed under this
convention.

Two representations live here:

    TrigPolynomial   exact finite cosine/sine sum, the authoritative path
    Field1D          samples on an equispaced grid, the DFT cross-check path
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, MalformedCoefficientsError, ResolutionError

TWO_PI = 2.0 * np.pi


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    """Smallest power of two that is >= n."""
    return 1 << max(0, int(n - 1).bit_length())


# ---------------------------------------------------------------------------
# Grids and sampled fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid1D:
    """Equispaced nodes x_i = 2πi/N, i = 0..N-1."""

    N: int

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 4:
            raise DomainError(f"grid needs N >= 4, got {self.N!r}")
        if not is_power_of_two(int(self.N)):
            raise DomainError(f"grid size must be a power of two, got N={self.N}")

    @property
    def nodes(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N) / self.N

    @property
    def spacing(self) -> float:
        return TWO_PI / self.N

    @property
    def freqs(self) -> np.ndarray:
        """Integer frequencies in FFT order: 0, 1, ..., N/2-1, -N/2, ..., -1."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Field1D:
    """Samples on a Grid1D, in float64 or (for high-dynamic-range checks) long double."""

    grid: Grid1D
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.dtype != np.longdouble:
            samples = samples.astype(float)
        if samples.shape != (self.grid.N,):
            raise DomainError(
                f"expected {self.grid.N} samples, got shape {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], N: int) -> "Field1D":
        grid = Grid1D(N)
        return cls(grid, func(grid.nodes))

    @classmethod
    def zeros(cls, N: int) -> "Field1D":
        return cls(Grid1D(N), np.zeros(N))

    def __sub__(self, other: "Field1D") -> "Field1D":
        if other.grid != self.grid:
            raise DomainError("fields live on different grids")
        return Field1D(self.grid, self.samples - other.samples)

    def __add__(self, other: "Field1D") -> "Field1D":
        if other.grid != self.grid:
            raise DomainError("fields live on different grids")
        return Field1D(self.grid, self.samples + other.samples)


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """û(k) for k in {-N/2, ..., N/2-1}, stored in FFT order."""

    N: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        values = values.astype(np.clongdouble if values.dtype in (np.longdouble, np.clongdouble) else complex)
        if values.shape != (self.N,):
            raise DomainError(f"expected {self.N} coefficients, got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def freqs(self) -> np.ndarray:
        return Grid1D(self.N).freqs

    def __getitem__(self, k: int) -> complex:
        if not -self.N // 2 <= k < self.N // 2:
            raise IndexError(f"frequency {k} outside [-{self.N // 2}, {self.N // 2})")
        return complex(self.values[k % self.N])

    def symmetry_defect(self) -> float:
        """max_k |û(-k) - conj û(k)|; zero for the transform of a real field."""
        v = self.values
        mirrored = np.conj(v[(-np.arange(self.N)) % self.N])
        return float(np.max(np.abs(v - mirrored), initial=0.0))


def dft_forward(f: Field1D) -> SpectralCoeffs:
    """û(k) = (2π/N) Σ_i f(x_i) e^{-ik x_i}."""
    N = f.grid.N
    return SpectralCoeffs(N, np.fft.fft(f.samples) * (TWO_PI / N))


def dft_inverse(c: SpectralCoeffs, tol: float = 1e-10) -> Field1D:
    """f(x_i) = (2π)^{-1} Σ_k û(k) e^{ik x_i}; requires conjugate symmetry."""
    scale = max(1.0, float(np.max(np.abs(c.values), initial=0.0)))
    defect = c.symmetry_defect()
    if defect > tol * scale:
        raise MalformedCoefficientsError(
            f"coefficients are not conjugate symmetric (defect {defect:.3e})")
    samples = np.fft.ifft(c.values).real * (c.N / TWO_PI)
    return Field1D(Grid1D(c.N), samples)


# ---------------------------------------------------------------------------
# Exact trigonometric polynomials
# ---------------------------------------------------------------------------


def _as_int_array(k) -> np.ndarray:
    return np.asarray(k, dtype=np.int64).reshape(-1)


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Finite sum  Σ_k a_k cos(kx) + b_k sin(kx)  over non-negative integers k.

    Frequencies are kept sorted and unique; terms whose two amplitudes are
    both exactly zero are dropped, and b_0 is forced to zero.
    """

    freqs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        k = _as_int_array(self.freqs)
        a = np.asarray(self.cos, dtype=float).reshape(-1)
        b = np.asarray(self.sin, dtype=float).reshape(-1)
        if not (k.shape == a.shape == b.shape):
            raise DomainError("freqs, cos and sin must have equal length")
        if np.any(k < 0):
            raise DomainError("frequencies must be non-negative")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise DomainError("amplitudes must be finite")
        if k.size and np.any(np.diff(k) <= 0):
            uniq, inv = np.unique(k, return_inverse=True)
            a = np.bincount(inv, weights=a, minlength=uniq.size)
            b = np.bincount(inv, weights=b, minlength=uniq.size)
            k = uniq
        b = np.where(k == 0, 0.0, b)
        keep = (a != 0.0) | (b != 0.0)
        object.__setattr__(self, "freqs", k[keep])
        object.__setattr__(self, "cos", a[keep])
        object.__setattr__(self, "sin", b[keep])

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "TrigPolynomial":
        return cls()

    @classmethod
    def constant(cls, value: float) -> "TrigPolynomial":
        return cls([0], [value], [0.0])

    @classmethod
    def cosine(cls, k: int, amplitude: float = 1.0) -> "TrigPolynomial":
        return cls([k], [amplitude], [0.0])

    @classmethod
    def sine(cls, k: int, amplitude: float = 1.0) -> "TrigPolynomial":
        return cls([k], [0.0], [amplitude])

    @classmethod
    def from_terms(cls, terms: Mapping[int, tuple[float, float]]) -> "TrigPolynomial":
        ks = sorted(terms)
        return cls(ks, [terms[k][0] for k in ks], [terms[k][1] for k in ks])

    # -- inspection --------------------------------------------------------

    @property
    def k_max(self) -> int:
        return int(self.freqs[-1]) if self.freqs.size else 0

    @property
    def n_terms(self) -> int:
        return int(self.freqs.size)

    def is_zero(self) -> bool:
        return self.freqs.size == 0

    def terms(self) -> dict[int, tuple[float, float]]:
        return {int(k): (float(a), float(b)) for k, a, b in zip(self.freqs, self.cos, self.sin)}

    def coefficient(self, k: int) -> tuple[float, float]:
        idx = np.searchsorted(self.freqs, k)
        if idx < self.freqs.size and self.freqs[idx] == k:
            return float(self.cos[idx]), float(self.sin[idx])
        return 0.0, 0.0

    def amplitudes(self) -> np.ndarray:
        """Per-term amplitude sqrt(a_k² + b_k²)."""
        return np.hypot(self.cos, self.sin)

    def __repr__(self):
        body = ", ".join(f"{k}: ({a:.6g}, {b:.6g})" for k, (a, b) in self.terms().items())
        return f"TrigPolynomial({{{body}}})"

    # -- evaluation --------------------------------------------------------

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for k, a, b in zip(self.freqs, self.cos, self.sin):
            kx = float(k) * x
            if a:
                out += a * np.cos(kx)
            if b:
                out += b * np.sin(kx)
        return out

    def values_on_grid(self, N: int, dtype=float) -> np.ndarray:
        """Values at x_i = 2πi/N via one inverse real FFT (needs k_max < N/2).

        ``dtype=np.longdouble`` runs the transform in extended precision.
        """
        if self.k_max >= N // 2:
            raise ResolutionError(
                f"k_max={self.k_max} needs N > {2 * self.k_max}", next_power_of_two(2 * self.k_max + 1))
        cdtype = np.clongdouble if dtype == np.longdouble else complex
        a = self.cos.astype(dtype)
        b = self.sin.astype(dtype)
        spec = np.zeros(N // 2 + 1, dtype=cdtype)
        spec.real[self.freqs] = 0.5 * N * a
        spec.imag[self.freqs] = -0.5 * N * b
        if self.freqs.size and self.freqs[0] == 0:
            spec[0] = N * a[0]
        return np.fft.irfft(spec, n=N)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return TrigPolynomial(
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.cos, other.cos]),
            np.concatenate([self.sin, other.sin]))

    def __neg__(self) -> "TrigPolynomial":
        return TrigPolynomial(self.freqs, -self.cos, -self.sin)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + (-other)

    def __mul__(self, scalar: float) -> "TrigPolynomial":
        return TrigPolynomial(self.freqs, scalar * self.cos, scalar * self.sin)

    __rmul__ = __mul__

    def apply_multiplier(self, weights: np.ndarray) -> "TrigPolynomial":
        """Multiply the frequency-k term by weights[i] (aligned with self.freqs)."""
        return TrigPolynomial(self.freqs, weights * self.cos, weights * self.sin)

    def allclose(self, other: "TrigPolynomial", atol: float = 1e-12) -> bool:
        diff = self - other
        return bool(np.all(diff.amplitudes() <= atol))


def sample(p: TrigPolynomial, g: Grid1D, dtype=float) -> Field1D:
    """Evaluate p on the grid nodes; refuses grids that would alias p."""
    if p.k_max >= g.N // 2:
        need = 2 * p.k_max
        raise ResolutionError(
            f"k_max={p.k_max} aliases on N={g.N}; needs N > {need} "
            f"(next power of two: {next_power_of_two(need + 1)})",
            next_power_of_two(need + 1))
    return Field1D(g, p.values_on_grid(g.N, dtype))


def interpolant(f: Field1D) -> TrigPolynomial:
    """Trigonometric interpolant of a sampled field, read off its DFT."""
    c = dft_forward(f)
    N = c.N
    half = N // 2
    v = c.values
    k = np.arange(half)
    a = v[:half].real / np.pi
    b = -v[:half].imag / np.pi
    a[0] = v[0].real / TWO_PI
    b[0] = 0.0
    poly = TrigPolynomial(k, a, b)
    nyq = v[half].real / TWO_PI
    if nyq != 0.0:
        poly = poly + TrigPolynomial.cosine(half, nyq)
    return poly


def translate(p: TrigPolynomial, t: float) -> TrigPolynomial:
    """x ↦ p(x - t), expanded term by term."""
    # frequencies are integers, so t may be reduced mod 2π first (exact for t = 2π)
    kt = p.freqs.astype(float) * math.fmod(t, TWO_PI)
    c, s = np.cos(kt), np.sin(kt)
    return TrigPolynomial(p.freqs, p.cos * c - p.sin * s, p.cos * s + p.sin * c)


def differentiate(p: TrigPolynomial) -> TrigPolynomial:
    k = p.freqs.astype(float)
    return TrigPolynomial(p.freqs, k * p.sin, -k * p.cos)


def heat_damp(p: TrigPolynomial, eps: float, t: float) -> TrigPolynomial:
    """Multiply the frequency-k term by exp(-eps k² t)."""
    if eps < 0 or t < 0:
        raise DomainError(f"heat damping needs eps >= 0 and t >= 0, got eps={eps}, t={t}")
    k = p.freqs.astype(float)
    return p.apply_multiplier(np.exp(-eps * k * k * t))
