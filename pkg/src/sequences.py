"""
Lacunary sequences: the data type, its statistics and the explicit
constructions (near-ratio sequences, dyadic refinement, σ-block examples,
splitting into ratio-2 parts).

Every sequence is a finite prefix; statistics are computed over that prefix
and report its window (num_terms, max_term).
"""

from __future__ import annotations

import json
import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from mpmath.ctx_mp import MPContext

from .errors import NumericalFailure, ValidationError

log = logging.getLogger("lp-lab")

# Working precision for ⌈λ̃^m⌉; raised automatically for large exponents.
PRECISION_BITS = 128
ORACLE_BITS = 200

# λ̃ = λ^{7/4}: midpoint exponent of the admissible range (λ^{3/2}, λ^2)
TILDE_EXPONENT = Fraction(7, 4)

REFINE_MIN_FIRST_TERM = 8


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LacunarySequence:
    terms: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        terms = tuple(int(t) for t in self.terms)
        if any(t < 1 for t in terms):
            raise ValidationError("sequence terms must be positive integers")
        if any(b <= a for a, b in zip(terms, terms[1:])):
            raise ValidationError("sequence terms must be strictly increasing")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, j: int) -> int:
        return self.terms[j]

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def max_term(self) -> int:
        return self.terms[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.terms, dtype=np.int64)

    def to_json(self) -> list[int]:
        return list(self.terms)


@dataclass(frozen=True)
class SequenceStats:
    rho: float
    sigma: int
    num_terms: int
    max_term: int

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "sigma": self.sigma,
            "num_terms": self.num_terms,
            "max_term": self.max_term,
        }


def load_sequence(path: Path, label: str = "") -> LacunarySequence:
    """Read a JSON array of integers."""
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, list):
        raise ValidationError(f"{path}: expected a JSON array of integers")
    return LacunarySequence(tuple(raw), label=label or Path(path).stem)


def save_sequence(seq: LacunarySequence, path: Path):
    with open(path, "w") as f:
        json.dump(seq.to_json(), f)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------
def _require_nonempty(seq: LacunarySequence):
    if not seq.terms:
        raise ValidationError("empty sequence")


def ratio(seq: LacunarySequence) -> float:
    """Minimum successive quotient; +inf for a single term."""
    _require_nonempty(seq)
    if len(seq) < 2:
        return math.inf
    t = seq.terms
    return min(t[k + 1] / t[k] for k in range(len(t) - 1))


def dyadic_block_counts(terms: tuple[int, ...]) -> dict[int, int]:
    """N -> #(terms ∩ {2^{N-1}, ..., 2^N}) for every block meeting the prefix."""
    if not terms:
        return {}
    counts = {}
    for N in range(1, terms[-1].bit_length() + 1):
        counts[N] = bisect_right(terms, 1 << N) - bisect_left(terms, 1 << (N - 1))
    return counts


def sigma(seq: LacunarySequence) -> int:
    """Largest number of terms in one closed dyadic block."""
    _require_nonempty(seq)
    return max(dyadic_block_counts(seq.terms).values())


def sequence_stats(seq: LacunarySequence) -> SequenceStats:
    return SequenceStats(
        rho=ratio(seq),
        sigma=sigma(seq),
        num_terms=seq.num_terms,
        max_term=seq.max_term,
    )


# ---------------------------------------------------------------------------
# Near-ratio construction
# ---------------------------------------------------------------------------
def mp_context(bits: int) -> MPContext:
    # private context per call: the global mpmath context is not thread-safe
    ctx = MPContext()
    ctx.prec = bits
    return ctx


def check_near_ratio(lam: float):
    if not lam > 1:
        raise ValidationError(f"lambda must exceed 1, got {lam}")
    if Fraction(lam) ** 3 >= 2:
        raise ValidationError(f"lambda^3 must be < 2, got lambda={lam}")


def tilde_lambda(lam: float, ctx: MPContext):
    return ctx.mpf(lam) ** (ctx.mpf(TILDE_EXPONENT.numerator) / TILDE_EXPONENT.denominator)


def start_exponent(lam: float, ctx: MPContext) -> int:
    """Smallest j >= 1 with λ̃^j / (λ̃^j + 1) >= λ / λ̃."""
    lt = tilde_lambda(lam, ctx)
    target = ctx.mpf(lam) / lt
    j = 1
    while lt ** j / (lt ** j + 1) < target:
        j += 1
    return j


def _bits_for(lam: float, top_exponent: int) -> int:
    magnitude = float(TILDE_EXPONENT) * math.log2(lam) * top_exponent
    return max(PRECISION_BITS, int(magnitude) + 96)


def check_ratio_bounds(seq: LacunarySequence, lam: float):
    """λ <= λ_{j+1}/λ_j < λ³ for every consecutive pair, exactly."""
    lam_q = Fraction(lam)
    for a, b in zip(seq.terms, seq.terms[1:]):
        if not (lam_q * a <= b < lam_q ** 3 * a):
            raise NumericalFailure(
                f"ratio {b}/{a} outside [{lam}, {lam}^3) in {seq.label or 'sequence'}"
            )


def check_first_term_bounds(seq: LacunarySequence, lam: float):
    """1/(λ-1) < λ_0 < 4/(λ-1), exactly."""
    scaled = seq.terms[0] * (Fraction(lam) - 1)
    if not (1 < scaled < 4):
        raise NumericalFailure(
            f"first term {seq.terms[0]} violates 1 < lambda_0 (lambda - 1) < 4 at lambda={lam}"
        )


def construct_near_ratio(lam: float, count: int) -> LacunarySequence:
    """λ_j = ⌈λ̃^{j + j_0}⌉ with ρ in [λ, λ³) and λ_0 ~ (λ - 1)^{-1}."""
    check_near_ratio(lam)
    if count < 2:
        raise ValidationError(f"count must be >= 2, got {count}")

    ctx = mp_context(PRECISION_BITS)
    j0 = start_exponent(lam, ctx)
    ctx.prec = _bits_for(lam, j0 + count)
    lt = tilde_lambda(lam, ctx)
    terms = tuple(int(ctx.ceil(lt ** (j + j0))) for j in range(count))

    seq = LacunarySequence(terms, label=f"near-ratio lambda={lam:g}")
    check_first_term_bounds(seq, lam)
    check_ratio_bounds(seq, lam)
    check_against_oracle(seq, lam, j0)
    log.debug("Constructed %s: j0=%d, first=%d, last=%d", seq.label, j0, terms[0], terms[-1])
    return seq


def check_against_oracle(seq: LacunarySequence, lam: float, j0: int):
    """Recompute j_0 and every term at ORACLE_BITS (or more) and compare."""
    ctx = mp_context(max(ORACLE_BITS, _bits_for(lam, j0 + seq.num_terms) + 72))
    oracle_j0 = start_exponent(lam, ctx)
    if oracle_j0 != j0:
        raise NumericalFailure(f"start exponent {j0} disagrees with oracle {oracle_j0} at lambda={lam}")
    lt = tilde_lambda(lam, ctx)
    for j, t in enumerate(seq.terms):
        expected = int(ctx.ceil(lt ** (j + j0)))
        if expected != t:
            raise NumericalFailure(f"term {j} is {t}, oracle gives {expected} at lambda={lam}")


def rescale_near_ratio(lam: float, anchor: int, upper: int) -> LacunarySequence:
    """
    The same closed form started late enough for desk-scale grids.

    Terms are ⌈λ̃^m⌉ for m >= max(j_0, m*), where m* is the largest exponent
    whose term lies below `anchor`; generation stops at the first term
    exceeding `upper`. Starting beyond j_0 keeps the ratio bounds.
    """
    check_near_ratio(lam)
    if anchor < 1 or upper < anchor:
        raise ValidationError(f"need 1 <= anchor <= upper, got anchor={anchor}, upper={upper}")

    lt_float = lam ** float(TILDE_EXPONENT)
    top = int(math.log(max(upper, 2)) / math.log(lt_float)) + 3
    ctx = mp_context(PRECISION_BITS)
    j0 = start_exponent(lam, ctx)
    ctx.prec = _bits_for(lam, max(top, j0) + 2)
    lt = tilde_lambda(lam, ctx)

    def term(m: int) -> int:
        return int(ctx.ceil(lt ** m))

    m = max(j0, int(math.log(anchor) / math.log(lt_float)) - 2)
    while term(m + 1) < anchor:
        m += 1
    m = max(j0, m)

    terms = [term(m)]
    while terms[-1] <= upper:
        m += 1
        terms.append(term(m))

    seq = LacunarySequence(tuple(terms), label=f"near-ratio lambda={lam:g} anchor={anchor}")
    check_ratio_bounds(seq, lam)
    return seq


# ---------------------------------------------------------------------------
# Dyadic refinement
# ---------------------------------------------------------------------------
def refine(seq: LacunarySequence) -> LacunarySequence:
    """
    Add every power 2^{j+3} up to the last term, then split each gap [a, b)
    inside the dyadic block [2^{j-1}, 2^j) that is longer than 2^{j-3} into
    equal integer pieces.
    """
    _require_nonempty(seq)
    if seq.terms[0] < REFINE_MIN_FIRST_TERM:
        raise ValidationError(
            f"refine needs a first term >= {REFINE_MIN_FIRST_TERM}, got {seq.terms[0]}; "
            f"shift the sequence (e.g. multiply every term by {REFINE_MIN_FIRST_TERM})"
        )

    points = set(seq.terms)
    power = REFINE_MIN_FIRST_TERM
    while power <= seq.max_term:
        points.add(power)
        power <<= 1
    base = sorted(points)

    splits = []
    for a, b in zip(base, base[1:]):
        piece = 1 << (a.bit_length() - 3)
        gap = b - a
        if gap > piece:
            parts = -(-gap // piece)
            splits.extend(a + (i * gap) // parts for i in range(1, parts))

    refined = LacunarySequence(
        tuple(sorted(points.union(splits))), label=f"{seq.label} refined".strip(),
    )
    check_refinement(seq, refined)
    return refined


def check_refinement(original: LacunarySequence, refined: LacunarySequence):
    """Containment, gap property (1) and block-count property (2), in integers."""
    missing = set(original.terms) - set(refined.terms)
    if missing:
        raise NumericalFailure(f"refinement dropped terms {sorted(missing)[:5]}")

    for a, b in zip(refined.terms, refined.terms[1:]):
        j = a.bit_length()
        if b > (1 << j) or b - a > (1 << (j - 3)):
            raise NumericalFailure(
                f"refined gap [{a}, {b}) leaves block [2^{j - 1}, 2^{j}) or exceeds 2^{j - 3}"
            )

    before = dyadic_block_counts(original.terms)
    for N, count in dyadic_block_counts(refined.terms).items():
        if count > 9 * (before.get(N, 0) + 2):
            raise NumericalFailure(
                f"block 2^{N}: {count} refined terms vs {before.get(N, 0)} original"
            )


# ---------------------------------------------------------------------------
# σ-block examples and lacunary decomposition
# ---------------------------------------------------------------------------
def sigma_block_example(sigma_value: int, M: int) -> LacunarySequence:
    """λ_j = M + j⌊M/σ⌋ for j < σ, then tripling until past 16M."""
    if M < 1 or M & (M - 1):
        raise ValidationError(f"M must be a power of two, got {M}")
    if sigma_value < 2:
        raise ValidationError(f"sigma must be >= 2, got {sigma_value}")
    if sigma_value > M:
        raise ValidationError(f"sigma={sigma_value} exceeds M={M}")

    step = M // sigma_value
    terms = [M + j * step for j in range(sigma_value)]
    while terms[-1] <= 16 * M:
        terms.append(3 * terms[-1])

    seq = LacunarySequence(tuple(terms), label=f"sigma-block sigma={sigma_value} M={M}")
    measured = sigma(seq)
    if measured != sigma_value:
        raise NumericalFailure(f"sigma-block example has sigma={measured}, expected {sigma_value}")
    return seq


def decompose_into_lacunary(seq: LacunarySequence) -> list[LacunarySequence]:
    """Greedy split into parts of ratio >= 2: each term joins the first part it more than doubles."""
    _require_nonempty(seq)
    parts: list[list[int]] = []
    for t in seq.terms:
        for part in parts:
            if t > 2 * part[-1]:
                part.append(t)
                break
        else:
            parts.append([t])

    bound = 2 * sigma(seq) + 1
    if len(parts) > bound:
        raise NumericalFailure(f"greedy decomposition used {len(parts)} parts, bound is {bound}")

    return [
        LacunarySequence(tuple(p), label=f"{seq.label} part {i}".strip())
        for i, p in enumerate(parts)
    ]
