import numpy as np
import pytest

from src import envelopes
from src.errors import CoverageError, ValidationError
from src.experiments.lower_bounds import admissible_blocks, desk_sequence
from src.kernels import dirichlet_block, extremal_fN, random_poly
from src.multipliers import SignVector
from src.sequences import LacunarySequence, construct_near_ratio, refine
from src.square_function import (
    block_index,
    block_norms,
    block_projections,
    domination_check,
    randomized_operator,
    refinement_pieces,
    square_function,
    square_function_2d,
)
from src.torus import TrigPoly2D, default_grid_size, evaluate, l2_norm_parseval, lp_norm


def test_l2_isometry(isometry_corpus, covered_poly):
    for seq in isometry_corpus:
        for seed in range(20):
            f = covered_poly(seq, seed)
            result = square_function(seq, f)
            norm_f = lp_norm(evaluate(f, result.grid_size), 2)
            assert result.lp_norm(2) / norm_f == pytest.approx(1.0, abs=envelopes.ISOMETRY_RTOL)


def test_isometry_does_not_depend_on_jobs(dyadic, covered_poly):
    f = covered_poly(dyadic, 3)
    serial = square_function(dyadic, f, jobs=1)
    threaded = square_function(dyadic, f, jobs=4)
    np.testing.assert_array_equal(serial.samples.values, threaded.samples.values)


def test_coverage_error_names_required_term(dyadic):
    with pytest.raises(CoverageError) as excinfo:
        square_function(dyadic, random_poly(0, 1024, seed=1))
    assert excinfo.value.required_term == 1025


def test_block_index():
    seq = LacunarySequence((1, 2, 4, 8))
    np.testing.assert_array_equal(
        block_index(seq, np.array([0, 1, 2, 3, -3, 4, 7, 8])), [0, 1, 2, 2, 2, 3, 3, 4],
    )


def test_block_projections_sum_to_f(dyadic, covered_poly):
    f = covered_poly(dyadic, 9)
    total = sum((piece for _, piece in block_projections(dyadic, f)), start=f - f)
    np.testing.assert_allclose(total.coefficients_at(f.frequencies), f.data)


def test_dirichlet_block_identity():
    N = 256
    f = extremal_fN(N)
    for lam in (1.01, 1.02, 1.05):
        seq = desk_sequence(lam, N)
        blocks = admissible_blocks(seq, N)
        assert blocks
        pieces = dict(block_projections(seq, f))
        for j in blocks:
            expected = dirichlet_block(seq[j - 1], seq[j] - 1)
            got = pieces[j]
            assert (got.freq_lo, got.freq_hi) == (expected.freq_lo, expected.freq_hi)
            assert np.max(np.abs(got.data - expected.data)) <= 1e-12


def test_block_norms_match_per_block_l2(dyadic, covered_poly):
    f = covered_poly(dyadic, 4)
    result = square_function(dyadic, f)
    norms = block_norms(dyadic, f, 2, result.grid_size)
    assert list(norms) == list(result.blocks_used)
    np.testing.assert_allclose(list(norms.values()), result.per_block_l2, rtol=1e-10)


def test_rows_follow_the_grid(small_dyadic):
    result = square_function(small_dyadic, random_poly(-15, 15, seed=2))
    rows = result.rows()
    assert len(rows) == result.grid_size
    assert rows[0][0] == 0.0


def test_square_function_2d_factorizes(small_dyadic):
    g = random_poly(-15, 15, seed=1)
    h = random_poly(-10, 12, seed=2)
    f = TrigPoly2D.outer(g, h)
    result = square_function_2d(small_dyadic, small_dyadic, f)
    M1, M2 = result.grid_size
    assert M1 == default_grid_size(g) and M2 == default_grid_size(h)
    Sg = square_function(small_dyadic, g, M1).samples.values
    Sh = square_function(small_dyadic, h, M2).samples.values
    np.testing.assert_allclose(result.samples.values, np.outer(Sg, Sh), rtol=1e-10, atol=1e-14)
    with pytest.raises(ValidationError):
        result.rows()


def test_randomized_operator_preserves_l2(dyadic, covered_poly):
    f = covered_poly(dyadic, 5)
    T = randomized_operator(dyadic, SignVector.draw(len(dyadic), seed=8), f)
    assert l2_norm_parseval(T) == pytest.approx(l2_norm_parseval(f), rel=1e-12)


def test_refinement_pieces_rejects_non_refinements(small_dyadic):
    with pytest.raises(ValidationError):
        refinement_pieces(small_dyadic, LacunarySequence((4, 16)))


def test_domination_within_cap():
    seq = LacunarySequence(tuple(8 * t for t in construct_near_ratio(1.2, 8)))
    refined = refine(seq)
    top = seq.max_term - 1
    for seed in range(50):
        report = domination_check(seq, refined, random_poly(-top, top, seed))
        assert report.within_cap
        assert report.cap == pytest.approx(np.sqrt(report.m))
        assert len(report.pieces_per_block) == len(seq)


def test_domination_by_itself_is_exact(dyadic, covered_poly):
    f = covered_poly(dyadic, 13)
    report = domination_check(dyadic, dyadic, f)
    assert report.m == 1
    assert report.max_ratio == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
def test_refinement_keeps_lp_norm_above_cap_fraction(p):
    seq = LacunarySequence(tuple(8 * t for t in construct_near_ratio(1.2, 8)))
    refined = refine(seq)
    m = max(refinement_pieces(seq, refined))
    top = seq.max_term - 1
    for seed in range(10):
        f = random_poly(-top, top, seed)
        M = default_grid_size(f)
        coarse = square_function(seq, f, M).lp_norm(p)
        fine = square_function(refined, f, M).lp_norm(p)
        assert fine >= coarse / np.sqrt(m) * (1 - 1e-9)
