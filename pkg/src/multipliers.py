"""
Littlewood-Paley multiplier symbols on Z.

Sharp symbols cut a polynomial to the annulus between consecutive terms;
smoothed symbols are trapezoids equal to 1 on the corresponding plateau.
Randomized sums combine either family with Rademacher signs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .sequences import LacunarySequence, ratio
from .torus import TrigPoly

log = logging.getLogger("lp-lab")


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """
    m(n) tabulated on window_lo..window_hi; `fill` everywhere outside.

    Every symbol built here is even, stored over the full symmetric window
    with is_even_extension set.
    """

    window_lo: int
    window_hi: int
    values: np.ndarray
    is_even_extension: bool = True
    kind: str = "sharp"
    degenerate: bool = False
    fill: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.window_hi - self.window_lo + 1,):
            raise ValidationError(
                f"symbol has {values.size} values for window "
                f"[{self.window_lo}, {self.window_hi}]"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value: float, half_width: int = 0) -> SymbolTable:
        size = 2 * half_width + 1
        return cls(-half_width, half_width, np.full(size, value), kind="constant", fill=value)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.window_lo, self.window_hi + 1)

    @property
    def sup_norm(self) -> float:
        return float(max(np.max(np.abs(self.values)), abs(self.fill)))

    def values_at(self, freqs: np.ndarray) -> np.ndarray:
        freqs = np.asarray(freqs, dtype=np.int64)
        out = np.full(freqs.shape, self.fill, dtype=np.float64)
        inside = (freqs >= self.window_lo) & (freqs <= self.window_hi)
        out[inside] = self.values[freqs[inside] - self.window_lo]
        return out

    def __call__(self, n: int) -> float:
        return float(self.values_at(np.array([n]))[0])

    def rows(self) -> list[tuple[int, float]]:
        """(n, value) pairs for CSV export."""
        return [(int(n), float(v)) for n, v in zip(self.frequencies, self.values)]


@dataclass(frozen=True, eq=False)
class SignVector:
    signs: np.ndarray
    seed: int

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int8)
        if not np.all((signs == 1) | (signs == -1)):
            raise ValidationError("sign vector entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    def __len__(self) -> int:
        return self.signs.size

    @classmethod
    def draw(cls, count: int, seed: int) -> SignVector:
        """Fair ±1 signs from a counter-based generator keyed by seed."""
        rng = np.random.Generator(np.random.Philox(seed))
        bits = rng.integers(0, 2, size=count, dtype=np.int8)
        return cls(1 - 2 * bits, seed)

    @classmethod
    def ones(cls, count: int) -> SignVector:
        return cls(np.ones(count, dtype=np.int8), 0)


def _check_index(seq: LacunarySequence, j: int):
    if not 0 <= j < len(seq):
        raise ValidationError(f"projection index {j} out of range for {len(seq)} terms")


def _even_table(half_width: int, profile, **kwargs) -> SymbolTable:
    """Tabulate an even symbol from its profile on |n|."""
    n = np.arange(-half_width, half_width + 1)
    return SymbolTable(-half_width, half_width, profile(np.abs(n)), **kwargs)


def sharp_symbol(seq: LacunarySequence, j: int) -> SymbolTable:
    """Indicator of {|n| < λ_0} for j = 0, of {λ_{j-1} <= |n| <= λ_j - 1} otherwise."""
    _check_index(seq, j)
    top = seq[j] - 1
    bottom = seq[j - 1] if j > 0 else 0
    return _even_table(
        top, lambda m: (m >= bottom).astype(np.float64), kind="sharp",
    )


def lower_neighbour(seq: LacunarySequence, j: int) -> int:
    """λ_{j-2}, with λ_{-1} := ⌊λ_0 / ρ⌋."""
    if j >= 2:
        return seq[j - 2]
    below = int(seq[0] // ratio(seq))
    if below == 0:
        raise ValidationError(
            f"smoothed symbol j=1 is degenerate: lambda_0={seq[0]} < rho={ratio(seq):.6g}"
        )
    return below


def smoothed_symbol(seq: LacunarySequence, j: int) -> SymbolTable:
    """
    Trapezoid with plateau {λ_{j-1}, ..., λ_j} and affine ramps reaching 0 at
    λ_{j-2} and λ_{j+1}. For j = 0 the plateau is {|n| <= λ_0} and the ramp
    ends at λ_1. Usable indices are 0 <= j <= num_terms - 2.
    """
    _check_index(seq, j)
    if j > len(seq) - 2:
        raise ValidationError(
            f"smoothed symbol needs lambda_{{j+1}}: j={j} but only {len(seq)} terms"
        )

    if j == 0:
        b, c = seq[0], seq[1]

        def profile(m):
            out = np.zeros(m.shape)
            out[m <= b] = 1.0
            ramp = (m > b) & (m < c)
            out[ramp] = (c - m[ramp]) / (c - b)
            return out

        return _even_table(c, profile, kind="smoothed", degenerate=(c == b + 1))

    a = lower_neighbour(seq, j)
    b, c, d = seq[j - 1], seq[j], seq[j + 1]

    def profile(m):
        out = np.zeros(m.shape)
        up = (m > a) & (m < b)
        out[up] = (m[up] - a) / (b - a)
        out[(m >= b) & (m <= c)] = 1.0
        down = (m > c) & (m < d)
        out[down] = (d - m[down]) / (d - c)
        return out

    return _even_table(d, profile, kind="smoothed")


def apply(symbol: SymbolTable, f: TrigPoly) -> TrigPoly:
    """Coefficient-wise product m(n)·f^(n)."""
    return TrigPoly(f.freq_lo, f.data * symbol.values_at(f.frequencies))


def project(seq: LacunarySequence, j: int, f: TrigPoly) -> TrigPoly:
    return apply(sharp_symbol(seq, j), f)


def mikhlin_constant(symbol: SymbolTable) -> float:
    """max |n|·|m(n+1) - m(n)| over the window widened by one on each side."""
    padded = np.concatenate(([symbol.fill], symbol.values, [symbol.fill]))
    n = np.arange(symbol.window_lo - 1, symbol.window_hi + 1)
    return float(np.max(np.abs(n) * np.abs(np.diff(padded))))


def usable_projections(seq: LacunarySequence, smoothed: bool) -> int:
    return len(seq) - 1 if smoothed else len(seq)


def randomized_sum(seq: LacunarySequence, signs: SignVector, smoothed: bool = False) -> SymbolTable:
    """Σ_j r_j m_j over every usable j."""
    count = usable_projections(seq, smoothed)
    if count < 1:
        raise ValidationError(f"no usable projections in a {len(seq)}-term sequence")
    if len(signs) < count:
        raise ValidationError(f"sign vector has {len(signs)} entries, need {count}")

    half_width = seq[-1] if smoothed else seq[-1] - 1
    total = np.zeros(2 * half_width + 1)
    degenerate = False
    build = smoothed_symbol if smoothed else sharp_symbol
    for j in range(count):
        m = build(seq, j)
        degenerate |= m.degenerate
        start = m.window_lo + half_width
        total[start:start + m.values.size] += signs.signs[j] * m.values

    kind = "randomized-smoothed" if smoothed else "randomized-sharp"
    return SymbolTable(-half_width, half_width, total, kind=kind, degenerate=degenerate)
