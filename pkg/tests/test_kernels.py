import numpy as np
import pytest

from src import envelopes
from src.errors import ValidationError
from src.kernels import (
    de_la_vallee_poussin,
    dirichlet_block,
    extremal_fM,
    extremal_fN,
    fejer,
    random_analytic,
    random_poly,
)
from src.torus import evaluate, lp_norm


def test_fejer_coefficients():
    K = fejer(3)
    np.testing.assert_allclose(K.coefficients_at(range(-3, 4)), [1, 2, 3, 4, 3, 2, 1] / np.float64(4))


def test_fejer_is_a_positive_kernel():
    samples = evaluate(fejer(16))
    assert samples.values.real.min() > -1e-12
    assert lp_norm(samples, 1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("N", [1, 5, 64])
def test_de_la_vallee_poussin_plateau_is_exactly_one(N):
    V = de_la_vallee_poussin(N)
    plateau = V.coefficients_at(range(-(N + 1), N + 2))
    assert np.all(plateau == 1.0)
    assert V.freq_lo == -(2 * N + 1)
    assert V.coefficient(2 * N + 1) == pytest.approx(1 / (N + 1))


def test_de_la_vallee_poussin_l1_bound():
    assert lp_norm(evaluate(de_la_vallee_poussin(64)), 1) <= 3.0


def test_extremal_function_support_and_plateau():
    N = 32
    f = extremal_fN(N)
    assert f.is_analytic
    assert (f.freq_lo, f.freq_hi) == (0, 4 * N + 2)
    assert np.all(f.coefficients_at(range(N, 3 * N + 3)) == 1.0)
    assert extremal_fM(N).coeffs == f.coeffs


def test_dirichlet_block():
    D = dirichlet_block(3, 7)
    assert D.coeffs == {n: 1.0 for n in range(3, 8)}
    with pytest.raises(ValidationError):
        dirichlet_block(5, 4)


def test_random_analytic_is_seeded_and_normalized():
    f = random_analytic(40, seed=11)
    g = random_analytic(40, seed=11)
    np.testing.assert_array_equal(f.data, g.data)
    assert f.is_analytic
    assert np.linalg.norm(f.data) == pytest.approx(1.0)


def test_random_real_polynomial_is_real_valued():
    f = random_poly(-3, 10, seed=5, real=True)
    assert f.freq_lo == -10 and f.freq_hi == 10
    samples = evaluate(f, 64)
    np.testing.assert_allclose(samples.values.imag, 0, atol=1e-12)
    assert np.linalg.norm(f.data) == pytest.approx(1.0)


def test_kernel_arguments_are_validated():
    with pytest.raises(ValidationError):
        fejer(-1)
    with pytest.raises(ValidationError):
        de_la_vallee_poussin(0)
    with pytest.raises(ValidationError):
        random_analytic(0, seed=1)


@pytest.mark.parametrize("n", [1, 16, 256, 1024])
def test_fejer_is_nonnegative_on_a_fine_grid(n):
    values = evaluate(fejer(n), 1 << 14).values
    np.testing.assert_allclose(values.imag, 0, atol=1e-9)
    assert values.real.min() > -1e-9 * (n + 1)


def test_dirichlet_block_l1_grows_like_log_length():
    lengths = [64, 256, 1024, 4096]
    norms = [lp_norm(evaluate(dirichlet_block(0, L - 1)), 1) for L in lengths]
    assert all(a < b for a, b in zip(norms, norms[1:]))
    lo, hi = envelopes.DIRICHLET_L1
    for L, norm in zip(lengths, norms):
        assert lo <= norm / np.log(L) <= hi
