"""
Square functions S^(Λ) on T and S^(Λ1,Λ2) on T², randomized operators and
the pointwise domination check against a refinement.

Each projection Δ_j f is evaluated on f's own grid (one FFT per block) and
the squares are summed in block order, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import CoverageError, NumericalFailure, ValidationError
from .multipliers import SignVector, apply, randomized_sum
from .pool import ordered_map
from .sequences import LacunarySequence
from .torus import (
    DEFAULT_OVERSAMPLING,
    GridSamples,
    TrigPoly,
    TrigPoly2D,
    default_grid_shape,
    default_grid_size,
    evaluate,
    evaluate_2d,
    grid_points,
    l2_norm_parseval,
    lp_norm,
)

log = logging.getLogger("lp-lab")

# 0/0 threshold for pointwise ratios
ZERO_LEVEL = 1e-13


@dataclass(frozen=True, eq=False)
class SquareFunctionResult:
    samples: GridSamples
    per_block_l2: np.ndarray
    grid_size: int | tuple[int, int]
    blocks_used: tuple

    def lp_norm(self, p: float) -> float:
        return lp_norm(self.samples, p)

    def rows(self) -> list[tuple[float, float]]:
        """(x, S(f)(x)) pairs; one-dimensional results only."""
        if isinstance(self.grid_size, tuple):
            raise ValidationError("row export is only defined for one-dimensional results")
        return list(zip(grid_points(self.grid_size).tolist(), self.samples.values.tolist()))

    def summary(self) -> dict:
        return {
            "grid_size": self.grid_size,
            "blocks": [
                {"block": list(b) if isinstance(b, tuple) else b, "l2": float(v)}
                for b, v in zip(self.blocks_used, self.per_block_l2)
            ],
            "l2": float(np.sqrt(np.sum(self.per_block_l2 ** 2))),
        }


@dataclass(frozen=True)
class DominationReport:
    max_ratio: float
    cap: float
    m: int
    pieces_per_block: tuple[int, ...] = field(default=())

    @property
    def within_cap(self) -> bool:
        return self.max_ratio <= self.cap * (1 + 1e-9)


# ---------------------------------------------------------------------------
# Coverage and block bookkeeping
# ---------------------------------------------------------------------------
def check_coverage(seq: LacunarySequence, freq_lo: int, freq_hi: int):
    """Every |n| in the support must be <= λ_last - 1."""
    if not seq.terms:
        raise ValidationError("empty sequence")
    top = max(abs(freq_lo), abs(freq_hi))
    if top > seq.max_term - 1:
        raise CoverageError(
            f"support reaches |n|={top} but the prefix covers |n| <= {seq.max_term - 1}; "
            f"extend the sequence to a last term >= {top + 1}",
            required_term=top + 1,
        )


def block_index(seq: LacunarySequence, freqs: np.ndarray) -> np.ndarray:
    """j with λ_{j-1} <= |n| < λ_j (j = 0 below λ_0)."""
    return np.searchsorted(seq.as_array(), np.abs(freqs), side="right")


def block_projections(seq: LacunarySequence, f: TrigPoly) -> Iterator[tuple[int, TrigPoly]]:
    """Nonzero Δ_j f in increasing j."""
    if f.is_zero:
        return
    owner = block_index(seq, f.frequencies)
    for j in np.unique(owner[f.data != 0]):
        piece = np.where(owner == j, f.data, 0)
        yield int(j), TrigPoly(f.freq_lo, piece)


def _sum_of_squares(pieces: list, evaluate_piece, shape, jobs: int) -> np.ndarray:
    squares = ordered_map(lambda piece: np.abs(evaluate_piece(piece)) ** 2, pieces, jobs)
    total = np.zeros(shape)
    for sq in squares:
        total += sq
    return total


# ---------------------------------------------------------------------------
# Square functions
# ---------------------------------------------------------------------------
def square_function(
    seq: LacunarySequence,
    f: TrigPoly,
    M: int | None = None,
    oversampling: int = DEFAULT_OVERSAMPLING,
    jobs: int = 1,
) -> SquareFunctionResult:
    check_coverage(seq, f.freq_lo, f.freq_hi)
    if M is None:
        M = default_grid_size(f, oversampling)

    blocks = list(block_projections(seq, f))
    total = _sum_of_squares(
        [piece for _, piece in blocks], lambda piece: evaluate(piece, M).values, M, jobs,
    )
    return SquareFunctionResult(
        samples=GridSamples(np.sqrt(total)),
        per_block_l2=np.array([l2_norm_parseval(piece) for _, piece in blocks]),
        grid_size=M,
        blocks_used=tuple(j for j, _ in blocks),
    )


def square_function_2d(
    seq1: LacunarySequence,
    seq2: LacunarySequence,
    f: TrigPoly2D,
    shape: tuple[int, int] | None = None,
    oversampling: int = DEFAULT_OVERSAMPLING,
    jobs: int = 1,
) -> SquareFunctionResult:
    """Tensor projections Δ_{j1} ⊗ Δ_{j2} over every nonzero rectangle."""
    check_coverage(seq1, f.freq_lo[0], f.freq_hi[0])
    check_coverage(seq2, f.freq_lo[1], f.freq_hi[1])
    if shape is None:
        shape = default_grid_shape(f, oversampling)

    rows = block_index(seq1, f.axis_frequencies(0))
    cols = block_index(seq2, f.axis_frequencies(1))
    pieces, used = [], []
    for j1 in np.unique(rows):
        for j2 in np.unique(cols):
            mask = np.outer(rows == j1, cols == j2)
            if not np.any(f.data[mask]):
                continue
            pieces.append(TrigPoly2D(f.freq_lo, np.where(mask, f.data, 0)))
            used.append((int(j1), int(j2)))

    total = _sum_of_squares(
        pieces, lambda piece: evaluate_2d(piece, shape).values, shape, jobs,
    )
    return SquareFunctionResult(
        samples=GridSamples(np.sqrt(total)),
        per_block_l2=np.array([l2_norm_parseval(piece) for piece in pieces]),
        grid_size=tuple(shape),
        blocks_used=tuple(used),
    )


def block_norms(
    seq: LacunarySequence,
    f: TrigPoly,
    p: float,
    M: int | None = None,
    oversampling: int = DEFAULT_OVERSAMPLING,
    only: set[int] | None = None,
) -> dict[int, float]:
    """j -> ‖Δ_j f‖_p for every nonzero projection (or those in `only`), on f's grid."""
    check_coverage(seq, f.freq_lo, f.freq_hi)
    if M is None:
        M = default_grid_size(f, oversampling)
    return {
        j: lp_norm(evaluate(piece, M), p)
        for j, piece in block_projections(seq, f)
        if only is None or j in only
    }


def randomized_operator(
    seq: LacunarySequence, signs: SignVector, f: TrigPoly, smoothed: bool = False,
) -> TrigPoly:
    """Σ_j r_j Δ_j f (or the smoothed projections when `smoothed`)."""
    check_coverage(seq, f.freq_lo, f.freq_hi)
    return apply(randomized_sum(seq, signs, smoothed), f)


# ---------------------------------------------------------------------------
# Pointwise domination by a refinement
# ---------------------------------------------------------------------------
def refinement_pieces(seq: LacunarySequence, refined: LacunarySequence) -> tuple[int, ...]:
    """Number of refined blocks inside each original block."""
    missing = set(seq.terms) - set(refined.terms)
    if missing:
        raise ValidationError(f"not a refinement: missing terms {sorted(missing)[:5]}")
    r = refined.as_array()
    bounds = [0] + list(seq.terms)
    counts = [1 + int(np.count_nonzero(r < seq[0]))]
    for lo, hi in zip(bounds[1:], bounds[2:]):
        counts.append(int(np.count_nonzero((r >= lo) & (r < hi))))
    return tuple(counts)


def domination_check(
    seq: LacunarySequence,
    refined: LacunarySequence,
    f: TrigPoly,
    M: int | None = None,
    oversampling: int = DEFAULT_OVERSAMPLING,
) -> DominationReport:
    """max_x S^(Λ)f(x) / S^(Λ~)f(x), asserted against the Cauchy-Schwarz cap √m."""
    pieces = refinement_pieces(seq, refined)
    m = max(pieces)
    cap = math.sqrt(m)
    if M is None:
        M = default_grid_size(f, oversampling)

    coarse = square_function(seq, f, M).samples.values
    fine = square_function(refined, f, M).samples.values

    # 0/0 counts as 1
    vanishing = fine < ZERO_LEVEL
    if np.any(coarse[vanishing] > 2 * cap * ZERO_LEVEL):
        raise NumericalFailure("refined square function vanishes where the original does not")
    ratios = np.ones_like(fine)
    ratios[~vanishing] = coarse[~vanishing] / fine[~vanishing]

    report = DominationReport(float(np.max(ratios)), cap, m, pieces)
    if not report.within_cap:
        raise NumericalFailure(
            f"pointwise ratio {report.max_ratio:.6g} exceeds cap sqrt({m}) = {cap:.6g}"
        )
    log.debug("Domination ratio %.6g (cap %.6g, m=%d)", report.max_ratio, cap, m)
    return report
