"""Shared fixtures."""

import json

import pytest

from src.kernels import random_poly
from src.sequences import LacunarySequence, construct_near_ratio, rescale_near_ratio, sigma_block_example

LAMBDA_GRID = [1.05, 1.1, 1.15, 1.2, 1.25]


@pytest.fixture
def dyadic():
    return LacunarySequence(tuple(2 ** k for k in range(11)), label="dyadic")


@pytest.fixture
def small_dyadic():
    return LacunarySequence((4, 8, 16), label="small")


@pytest.fixture
def isometry_corpus(dyadic):
    """Five sequences of different shapes for the L² isometry."""
    return [
        dyadic,
        construct_near_ratio(1.2, 12),
        sigma_block_example(4, 64),
        rescale_near_ratio(1.05, 64, 1024),
        LacunarySequence(tuple(3 ** k for k in range(7)), label="triadic"),
    ]


@pytest.fixture
def covered_poly():
    """Random polynomial with the largest support a sequence covers."""

    def build(seq, seed):
        top = seq.max_term - 1
        return random_poly(-top, top, seed)

    return build


@pytest.fixture
def seq_file(tmp_path, dyadic):
    path = tmp_path / "seq.json"
    path.write_text(json.dumps(dyadic.to_json()))
    return path
