"""
Trigonometric polynomials on the torus and the norm functionals used by
every experiment.

Coefficients follow f^(n) = (2π)^{-1} ∫ f(x) e^{-inx} dx and all norms use
the normalized (probability) measure on T, so a constant 1 has every norm 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import fft as sfft
from scipy.optimize import bisect, brentq

from .errors import AliasingError, ValidationError

log = logging.getLogger("lp-lab")

DEFAULT_OVERSAMPLING = 8

# Luxemburg bisection controls
ORLICZ_RTOL = 1e-6
ORLICZ_MAXITER = 200


# ---------------------------------------------------------------------------
# Polynomial types
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class TrigPoly:
    """
    A trigonometric polynomial stored densely over [freq_lo, freq_hi].

    Leading and trailing zero coefficients are trimmed on construction, so
    the bounds are tight. The zero polynomial is stored as a single zero
    coefficient at frequency 0.
    """

    freq_lo: int
    data: np.ndarray

    def __post_init__(self):
        data = np.atleast_1d(np.asarray(self.data, dtype=np.complex128)).copy()
        if data.ndim != 1:
            raise ValidationError("TrigPoly data must be one-dimensional")
        nonzero = np.flatnonzero(data)
        if nonzero.size == 0:
            object.__setattr__(self, "freq_lo", 0)
            object.__setattr__(self, "data", np.zeros(1, dtype=np.complex128))
            return
        first, last = int(nonzero[0]), int(nonzero[-1])
        object.__setattr__(self, "freq_lo", int(self.freq_lo) + first)
        object.__setattr__(self, "data", data[first:last + 1])

    # --- constructors ------------------------------------------------------
    @classmethod
    def zero(cls) -> TrigPoly:
        return cls(0, np.zeros(1))

    @classmethod
    def monomial(cls, n: int, amplitude: complex = 1.0) -> TrigPoly:
        return cls(n, np.array([amplitude]))

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, complex]) -> TrigPoly:
        if not coeffs:
            return cls.zero()
        lo, hi = min(coeffs), max(coeffs)
        data = np.zeros(hi - lo + 1, dtype=np.complex128)
        for n, c in coeffs.items():
            data[n - lo] = c
        return cls(lo, data)

    @classmethod
    def from_json(cls, triples: Iterable[Iterable[float]]) -> TrigPoly:
        """Build from [frequency, real, imag] triples."""
        return cls.from_dict({int(n): complex(re, im) for n, re, im in triples})

    # --- views -------------------------------------------------------------
    @property
    def freq_hi(self) -> int:
        return self.freq_lo + self.data.size - 1

    @property
    def width(self) -> int:
        return self.data.size

    @property
    def is_zero(self) -> bool:
        return not np.any(self.data)

    @property
    def is_analytic(self) -> bool:
        """Membership predicate for H^p_A: no negative frequencies."""
        return self.is_zero or self.freq_lo >= 0

    @property
    def max_abs_freq(self) -> int:
        return max(abs(self.freq_lo), abs(self.freq_hi))

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.freq_lo, self.freq_hi + 1)

    @property
    def coeffs(self) -> dict[int, complex]:
        """Sparse view: frequency -> nonzero amplitude."""
        return {
            int(n): complex(c)
            for n, c in zip(self.frequencies, self.data)
            if c != 0
        }

    def coefficient(self, n: int) -> complex:
        if self.freq_lo <= n <= self.freq_hi:
            return complex(self.data[n - self.freq_lo])
        return 0j

    def coefficients_at(self, freqs: Iterable[int]) -> np.ndarray:
        freqs = np.asarray(list(freqs), dtype=np.int64)
        out = np.zeros(freqs.size, dtype=np.complex128)
        inside = (freqs >= self.freq_lo) & (freqs <= self.freq_hi)
        out[inside] = self.data[freqs[inside] - self.freq_lo]
        return out

    def to_json(self) -> list[list[float]]:
        return [[n, c.real, c.imag] for n, c in self.coeffs.items()]

    # --- arithmetic --------------------------------------------------------
    def _aligned(self, other: TrigPoly) -> tuple[int, np.ndarray, np.ndarray]:
        lo = min(self.freq_lo, other.freq_lo)
        hi = max(self.freq_hi, other.freq_hi)
        a = np.zeros(hi - lo + 1, dtype=np.complex128)
        b = np.zeros_like(a)
        a[self.freq_lo - lo:self.freq_hi - lo + 1] = self.data
        b[other.freq_lo - lo:other.freq_hi - lo + 1] = other.data
        return lo, a, b

    def __add__(self, other: TrigPoly) -> TrigPoly:
        lo, a, b = self._aligned(other)
        return TrigPoly(lo, a + b)

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        lo, a, b = self._aligned(other)
        return TrigPoly(lo, a - b)

    def __mul__(self, scalar: complex) -> TrigPoly:
        return TrigPoly(self.freq_lo, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> TrigPoly:
        return TrigPoly(self.freq_lo, -self.data)

    def __repr__(self) -> str:
        return f"TrigPoly([{self.freq_lo}, {self.freq_hi}], {self.width} coeffs)"


@dataclass(frozen=True, eq=False)
class TrigPoly2D:
    """Dense polynomial on T^2 over the box freq_lo .. freq_lo + shape - 1."""

    freq_lo: tuple[int, int]
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 2:
            raise ValidationError("TrigPoly2D data must be two-dimensional")
        rows = np.flatnonzero(np.any(data != 0, axis=1))
        cols = np.flatnonzero(np.any(data != 0, axis=0))
        if rows.size == 0:
            object.__setattr__(self, "freq_lo", (0, 0))
            object.__setattr__(self, "data", np.zeros((1, 1), dtype=np.complex128))
            return
        lo1, lo2 = (int(v) for v in self.freq_lo)
        object.__setattr__(self, "freq_lo", (lo1 + int(rows[0]), lo2 + int(cols[0])))
        object.__setattr__(
            self, "data", data[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1].copy(),
        )

    @classmethod
    def outer(cls, g: TrigPoly, h: TrigPoly) -> TrigPoly2D:
        """The product g(x)·h(y)."""
        return cls((g.freq_lo, h.freq_lo), np.outer(g.data, h.data))

    @property
    def freq_hi(self) -> tuple[int, int]:
        return (
            self.freq_lo[0] + self.data.shape[0] - 1,
            self.freq_lo[1] + self.data.shape[1] - 1,
        )

    @property
    def is_analytic(self) -> bool:
        return self.freq_lo[0] >= 0 and self.freq_lo[1] >= 0

    def axis_frequencies(self, axis: int) -> np.ndarray:
        return np.arange(self.freq_lo[axis], self.freq_hi[axis] + 1)

    def coefficient(self, n1: int, n2: int) -> complex:
        (lo1, lo2), (hi1, hi2) = self.freq_lo, self.freq_hi
        if lo1 <= n1 <= hi1 and lo2 <= n2 <= hi2:
            return complex(self.data[n1 - lo1, n2 - lo2])
        return 0j


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Samples at x_k = 2πk/M (one axis) or on the product grid (two axes)."""

    values: np.ndarray

    @property
    def grid_size(self) -> int | tuple[int, ...]:
        if self.values.ndim == 1:
            return self.values.shape[0]
        return tuple(self.values.shape)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values).ravel()

    def points(self) -> np.ndarray:
        return grid_points(self.values.shape[0])


def grid_points(M: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(M) / M


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------
def alias_free_size(freq_lo: int, freq_hi: int) -> int:
    return 2 * max(abs(freq_lo), abs(freq_hi)) + 1


def default_grid_size(poly: TrigPoly, oversampling: int = DEFAULT_OVERSAMPLING) -> int:
    """Smallest power of two covering oversampling·width and the alias-free bound."""
    need = max(oversampling * poly.width, alias_free_size(poly.freq_lo, poly.freq_hi))
    return 1 << (need - 1).bit_length()


def _check_grid(freq_lo: int, freq_hi: int, M: int):
    need = alias_free_size(freq_lo, freq_hi)
    if M < need:
        raise AliasingError(
            f"grid of {M} points aliases support [{freq_lo}, {freq_hi}]; need at least {need}"
        )


def evaluate(poly: TrigPoly, M: int | None = None) -> GridSamples:
    """Sample poly on the uniform grid of M points (inverse discrete transform)."""
    if M is None:
        M = default_grid_size(poly)
    _check_grid(poly.freq_lo, poly.freq_hi, M)
    spectrum = np.zeros(M, dtype=np.complex128)
    spectrum[poly.frequencies % M] = poly.data
    return GridSamples(sfft.ifft(spectrum, norm="forward"))


def forward_transform(samples: GridSamples, atol: float = 0.0) -> TrigPoly:
    """Recover coefficients from samples; amplitudes below atol are dropped."""
    values = np.asarray(samples.values)
    M = values.shape[0]
    coeffs = sfft.fftshift(sfft.fft(values, norm="forward"))
    if atol > 0:
        coeffs[np.abs(coeffs) < atol] = 0
    return TrigPoly(-(M // 2), coeffs)


def default_grid_shape(
    poly: TrigPoly2D, oversampling: int = DEFAULT_OVERSAMPLING,
) -> tuple[int, int]:
    shape = []
    for axis in (0, 1):
        lo, hi = poly.freq_lo[axis], poly.freq_hi[axis]
        need = max(oversampling * (hi - lo + 1), alias_free_size(lo, hi))
        shape.append(1 << (need - 1).bit_length())
    return shape[0], shape[1]


def evaluate_2d(poly: TrigPoly2D, shape: tuple[int, int] | None = None) -> GridSamples:
    if shape is None:
        shape = default_grid_shape(poly)
    M1, M2 = shape
    _check_grid(poly.freq_lo[0], poly.freq_hi[0], M1)
    _check_grid(poly.freq_lo[1], poly.freq_hi[1], M2)
    spectrum = np.zeros((M1, M2), dtype=np.complex128)
    rows = poly.axis_frequencies(0) % M1
    cols = poly.axis_frequencies(1) % M2
    spectrum[np.ix_(rows, cols)] = poly.data
    return GridSamples(sfft.ifft2(spectrum, norm="forward"))


def modulate(poly: TrigPoly, shift: int) -> TrigPoly:
    """Multiply by e^{i·shift·x}: every frequency moves by shift."""
    if poly.is_zero:
        return poly
    return TrigPoly(poly.freq_lo + shift, poly.data)


# ---------------------------------------------------------------------------
# Norm functionals (normalized measure)
# ---------------------------------------------------------------------------
def _magnitudes(samples: GridSamples) -> np.ndarray:
    a = samples.magnitudes
    if a.size == 0:
        raise ValidationError("empty sample array")
    return a


def lp_norm(samples: GridSamples, p: float) -> float:
    """Grid quadrature of (2π)^{-1/p} (∫|f|^p)^{1/p}; p = inf gives the grid max."""
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    a = _magnitudes(samples)
    if math.isinf(p):
        return float(a.max())
    return float(np.mean(a ** p) ** (1.0 / p))


def l2_norm_parseval(poly: TrigPoly | TrigPoly2D) -> float:
    return float(np.linalg.norm(poly.data.ravel()))


def h1_norm_analytic(poly: TrigPoly, M: int | None = None) -> float:
    """‖f‖_{H^1} = 2‖f‖_{L^1} for analytic f."""
    if not poly.is_analytic:
        raise ValidationError("H^1 identity needs an analytic polynomial (freq_lo >= 0)")
    return 2.0 * lp_norm(evaluate(poly, M), 1)


def weak_l1(samples: GridSamples) -> float:
    """sup_t t·μ{|f| > t} on the grid, via the sorted-suprema formula."""
    a = np.sort(_magnitudes(samples))[::-1]
    k = np.arange(1, a.size + 1)
    return float(np.max(a * k / a.size))


def orlicz_young(t, r: float):
    """Φ_r(t) = t [1 + log(1 + t)]^r."""
    return t * (1.0 + np.log1p(t)) ** r


def _young_inverse(y: float, r: float) -> float:
    # Φ_r(t) >= t, so the root lies in [0, y]
    return brentq(lambda t: orlicz_young(t, r) - y, 0.0, y, xtol=1e-14, rtol=1e-15)


def llogl_norm(
    samples: GridSamples,
    r: float = 0.5,
    rtol: float = ORLICZ_RTOL,
    maxiter: int = ORLICZ_MAXITER,
) -> float:
    """Luxemburg norm in L log^r L: the λ with mean Φ_r(|f|/λ) = 1."""
    if not r > 0:
        raise ValidationError(f"Orlicz exponent r must be > 0, got {r}")
    a = _magnitudes(samples)
    top = float(a.max())
    if top == 0.0:
        return 0.0

    lo = top / _young_inverse(float(a.size), r) * (1.0 - 1e-9)
    hi = top / _young_inverse(1.0, r) * (1.0 + 1e-9)
    if hi <= lo:
        return hi

    def excess(lam: float) -> float:
        return float(np.mean(orlicz_young(a / lam, r))) - 1.0

    return float(bisect(
        excess, lo, hi, xtol=np.finfo(float).tiny, rtol=rtol, maxiter=maxiter,
    ))


def zygmund_functional(samples: GridSamples) -> float:
    """1 + ∫ |f| log^{1/2}(e + |f|) under the normalized measure."""
    a = samples.magnitudes
    if a.size == 0:
        return 1.0
    return 1.0 + float(np.mean(a * np.sqrt(np.log(np.e + a))))
