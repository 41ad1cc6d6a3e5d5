from fractions import Fraction

import pytest

from conftest import LAMBDA_GRID
from src import envelopes
from src.errors import ValidationError
from src.sequences import (
    LacunarySequence,
    check_near_ratio,
    construct_near_ratio,
    decompose_into_lacunary,
    dyadic_block_counts,
    load_sequence,
    ratio,
    refine,
    rescale_near_ratio,
    save_sequence,
    sequence_stats,
    sigma,
    sigma_block_example,
)


def refinement_corpus():
    constructed = [
        LacunarySequence(tuple(8 * t for t in construct_near_ratio(lam, 10)), label=f"8x {lam}")
        for lam in LAMBDA_GRID
    ]
    return constructed + [
        LacunarySequence(tuple(2 ** k for k in range(3, 14)), label="dyadic"),
        LacunarySequence(tuple(9 * 3 ** k for k in range(8)), label="triadic"),
        sigma_block_example(4, 64),
        sigma_block_example(8, 128),
        rescale_near_ratio(1.05, 64, 4096),
    ]


# ---------------------------------------------------------------------------
# Types and statistics
# ---------------------------------------------------------------------------
def test_sequence_validation():
    with pytest.raises(ValidationError):
        LacunarySequence((1, 3, 3))
    with pytest.raises(ValidationError):
        LacunarySequence((0, 2))


def test_ratio_and_sigma(dyadic):
    assert ratio(dyadic) == 2.0
    assert sigma(dyadic) == 2
    assert ratio(LacunarySequence((5,))) == float("inf")


def test_ratio_is_the_smallest_quotient():
    assert ratio(LacunarySequence((10, 13, 17, 22, 29))) == 22 / 17


def test_sigma_of_powers_of_three():
    assert sigma(LacunarySequence(tuple(3 ** k for k in range(6)))) == 1


@pytest.mark.parametrize("lam", [1.05, 1.08, 1.1, 1.15, 1.2, 1.25])
def test_sigma_scales_like_inverse_ratio_gap(lam):
    seq = construct_near_ratio(lam, 24)
    lo, hi = envelopes.SIGMA_RHO
    assert lo <= sigma(seq) * (ratio(seq) - 1) <= hi


def test_dyadic_block_counts_are_closed_blocks():
    counts = dyadic_block_counts((2, 3, 4, 8))
    # {1,2}, {2,3,4}, {4,...,8}
    assert counts == {1: 1, 2: 3, 3: 2, 4: 1}


def test_sequence_stats(dyadic):
    stats = sequence_stats(dyadic)
    assert stats.to_dict() == {"rho": 2.0, "sigma": 2, "num_terms": 11, "max_term": 1024}


def test_load_and_save(tmp_path, dyadic):
    path = tmp_path / "dyadic.json"
    save_sequence(dyadic, path)
    assert load_sequence(path).terms == dyadic.terms


def test_load_rejects_non_arrays(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"terms": [1, 2]}')
    with pytest.raises(ValidationError):
        load_sequence(path)


# ---------------------------------------------------------------------------
# Near-ratio construction
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_construction_postconditions(lam):
    seq = construct_near_ratio(lam, 12)
    lam_q = Fraction(lam)
    assert 1 < seq[0] * (lam_q - 1) < 4
    for a, b in zip(seq.terms, seq.terms[1:]):
        assert lam_q * a <= b < lam_q ** 3 * a
    assert lam <= ratio(seq) < lam ** 3


def test_construction_first_term():
    assert construct_near_ratio(1.2, 12)[0] == 10


def test_construction_is_deterministic():
    assert construct_near_ratio(1.1, 20).terms == construct_near_ratio(1.1, 20).terms


@pytest.mark.parametrize("lam", [1.0, 0.9, 1.26, 1.3])
def test_near_ratio_rejects_lambda_outside_range(lam):
    with pytest.raises(ValidationError):
        check_near_ratio(lam)


def test_construction_needs_two_terms():
    with pytest.raises(ValidationError):
        construct_near_ratio(1.2, 1)


def test_rescaled_construction_straddles_anchor():
    seq = rescale_near_ratio(1.02, 512, 2050)
    assert seq[0] < 512 <= seq[1]
    assert seq.max_term > 2050
    assert 1.02 <= ratio(seq) < 1.02 ** 3


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("seq", refinement_corpus(), ids=lambda s: s.label)
def test_refinement_properties(seq):
    refined = refine(seq)
    assert set(seq.terms) <= set(refined.terms)

    for a, b in zip(refined.terms, refined.terms[1:]):
        j = a.bit_length()
        assert b <= 2 ** j
        assert b - a <= 2 ** (j - 3)

    before = dyadic_block_counts(seq.terms)
    for N, count in dyadic_block_counts(refined.terms).items():
        assert count <= 9 * (before.get(N, 0) + 2)


def test_refine_needs_first_term_of_at_least_eight():
    with pytest.raises(ValidationError):
        refine(LacunarySequence((4, 8, 16)))


# ---------------------------------------------------------------------------
# σ-block examples and decomposition
# ---------------------------------------------------------------------------
def test_sigma_block_example():
    seq = sigma_block_example(4, 64)
    assert seq.terms[:5] == (64, 80, 96, 112, 336)
    assert sigma(seq) == 4
    assert seq.max_term > 16 * 64


@pytest.mark.parametrize("s, M", [(8, 4), (1, 64), (4, 48)])
def test_sigma_block_example_rejects_bad_parameters(s, M):
    with pytest.raises(ValidationError):
        sigma_block_example(s, M)


def test_decompose_dyadic(dyadic):
    parts = decompose_into_lacunary(dyadic)
    assert [p.terms for p in parts] == [
        (1, 4, 16, 64, 256, 1024),
        (2, 8, 32, 128, 512),
    ]
    assert all(ratio(p) >= 2 for p in parts)


@pytest.mark.parametrize("s", [2, 4, 16])
def test_decompose_sigma_block_example(s):
    seq = sigma_block_example(s, 256)
    parts = decompose_into_lacunary(seq)
    assert len(parts) <= 2 * s + 1
    assert sorted(t for p in parts for t in p) == list(seq.terms)
    assert all(len(p) < 2 or ratio(p) > 2 for p in parts)


def test_smallest_sigma_block_example():
    seq = sigma_block_example(2, 2)
    assert seq.terms[:5] == (2, 3, 9, 27, 81)
    assert sigma(seq) == 2


def test_decompose_needs_a_part_per_block_term():
    parts = decompose_into_lacunary(sigma_block_example(4, 4096))
    assert len(parts) >= 4


def test_refine_is_idempotent():
    refined = refine(LacunarySequence((12, 15, 19, 24, 31, 40, 52, 68, 88, 115)))
    assert 8 in refined.terms and 64 in refined.terms
    assert refine(refined).terms == refined.terms
