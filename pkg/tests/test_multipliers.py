import numpy as np
import pytest

from conftest import LAMBDA_GRID
from src import envelopes
from src.errors import ValidationError
from src.kernels import dirichlet_block
from src.multipliers import (
    SignVector,
    SymbolTable,
    apply,
    lower_neighbour,
    mikhlin_constant,
    project,
    randomized_sum,
    sharp_symbol,
    smoothed_symbol,
    usable_projections,
)
from src.sequences import LacunarySequence, construct_near_ratio, ratio


def test_sharp_symbols(small_dyadic):
    first = sharp_symbol(small_dyadic, 0)
    assert (first.window_lo, first.window_hi) == (-3, 3)
    assert np.all(first.values == 1)

    middle = sharp_symbol(small_dyadic, 1)
    assert middle(4) == 1 and middle(7) == 1 and middle(-5) == 1
    assert middle(3) == 0 and middle(8) == 0


def test_sharp_symbols_partition_unity(small_dyadic):
    total = randomized_sum(small_dyadic, SignVector.ones(3))
    assert (total.window_lo, total.window_hi) == (-15, 15)
    assert np.all(total.values == 1)


def test_smoothed_symbols_reproduce_sharp_projections():
    seq = construct_near_ratio(1.2, 10)
    freqs = np.arange(-seq.max_term, seq.max_term + 1)
    for j in range(usable_projections(seq, smoothed=True)):
        sharp = sharp_symbol(seq, j).values_at(freqs)
        smooth = smoothed_symbol(seq, j).values_at(freqs)
        np.testing.assert_array_equal(sharp * smooth, sharp)
        assert smooth.min() >= 0 and smooth.max() == 1


def test_smoothed_symbol_needs_next_term(small_dyadic):
    with pytest.raises(ValidationError):
        smoothed_symbol(small_dyadic, 2)


def test_lower_neighbour(small_dyadic):
    assert lower_neighbour(small_dyadic, 1) == 2
    assert lower_neighbour(small_dyadic, 2) == 4
    with pytest.raises(ValidationError):
        lower_neighbour(LacunarySequence((1, 3, 9)), 1)


def test_mikhlin_constant_of_sharp_symbol(small_dyadic):
    # jumps at |n| = 4 and |n| = 8 on the negative side dominate
    assert mikhlin_constant(sharp_symbol(small_dyadic, 1)) == 8


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_mikhlin_bound_for_randomized_smoothed_sums(lam):
    seq = construct_near_ratio(lam, 12)
    rho = ratio(seq)
    for seed in range(32):
        signs = SignVector.draw(usable_projections(seq, smoothed=True), seed)
        symbol = randomized_sum(seq, signs, smoothed=True)
        assert mikhlin_constant(symbol) * (rho - 1) <= envelopes.MIKHLIN_C0


def test_sign_vectors_are_seeded():
    a = SignVector.draw(64, seed=1)
    assert np.array_equal(a.signs, SignVector.draw(64, seed=1).signs)
    assert not np.array_equal(a.signs, SignVector.draw(64, seed=2).signs)
    assert set(np.unique(a.signs)) <= {-1, 1}


def test_sign_vector_rejects_other_values():
    with pytest.raises(ValidationError):
        SignVector(np.array([1, 0, -1]), seed=0)


def test_randomized_sum_needs_enough_signs(small_dyadic):
    with pytest.raises(ValidationError):
        randomized_sum(small_dyadic, SignVector.ones(2))


def test_project_cuts_to_block(small_dyadic):
    piece = project(small_dyadic, 1, dirichlet_block(0, 15))
    assert piece.coeffs == {n: 1.0 for n in range(4, 8)}


def test_apply_multiplies_coefficients(small_dyadic):
    m = smoothed_symbol(small_dyadic, 1)
    piece = apply(m, dirichlet_block(0, 15))
    assert piece.coeffs == pytest.approx({n: m(n) for n in range(16) if m(n) != 0})
    assert piece.coeffs[12] == pytest.approx(0.5)


def test_symbol_table_shape_is_checked():
    with pytest.raises(ValidationError):
        SymbolTable(-2, 2, np.ones(4))


def test_constant_symbol():
    m = SymbolTable.constant(2.5, half_width=1)
    assert m(100) == 2.5
    assert m.sup_norm == 2.5
    assert mikhlin_constant(m) == 0


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_smoothed_symbols_are_even(lam):
    seq = construct_near_ratio(lam, 10)
    n = np.arange(0, seq.max_term + 2)
    for j in range(usable_projections(seq, smoothed=True)):
        m = smoothed_symbol(seq, j)
        np.testing.assert_array_equal(m.values_at(-n), m.values_at(n))


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_smoothed_symbols_overlap_at_most_three(lam):
    seq = construct_near_ratio(lam, 12)
    freqs = np.arange(0, seq.max_term + 1)
    nonzero = sum(
        (smoothed_symbol(seq, j).values_at(freqs) != 0).astype(int)
        for j in range(usable_projections(seq, smoothed=True))
    )
    assert nonzero.max() <= 3


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_randomized_symbols_are_bounded(lam):
    seq = construct_near_ratio(lam, 12)
    for seed in range(16):
        smooth_signs = SignVector.draw(usable_projections(seq, smoothed=True), seed)
        assert randomized_sum(seq, smooth_signs, smoothed=True).sup_norm <= 3
        sharp_signs = SignVector.draw(usable_projections(seq, smoothed=False), seed)
        assert randomized_sum(seq, sharp_signs).sup_norm <= 1
