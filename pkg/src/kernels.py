"""
Closed-form test functions: Fejér and de la Vallée Poussin kernels, Dirichlet
blocks, the extremal analytic polynomials and random analytic candidates.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .torus import TrigPoly, modulate


def _require(value: int, minimum: int, name: str):
    if int(value) != value or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value}")


def fejer(n: int) -> TrigPoly:
    """K_n with coefficients 1 - |j|/(n+1) on |j| <= n."""
    _require(n, 0, "n")
    j = np.arange(-n, n + 1)
    return TrigPoly(-n, (n + 1 - np.abs(j)) / (n + 1))


def de_la_vallee_poussin(N: int) -> TrigPoly:
    """V_N = 2K_{2N+1} - K_N, computed from integer numerators so the plateau is exactly 1."""
    _require(N, 1, "N")
    n = np.abs(np.arange(-(2 * N + 1), 2 * N + 2))
    numerator = (2 * N + 2 - n) - np.maximum(N + 1 - n, 0)
    return TrigPoly(-(2 * N + 1), numerator / (N + 1))


def extremal_fN(N: int) -> TrigPoly:
    """e^{i(2N+1)x} V_N(x): analytic, support [0, 4N+2], unit coefficients on [N, 3N+2]."""
    return modulate(de_la_vallee_poussin(N), 2 * N + 1)


def extremal_fM(M: int) -> TrigPoly:
    """Same formula as extremal_fN, used by the σ-block experiments."""
    return extremal_fN(M)


def dirichlet_block(lo: int, hi: int) -> TrigPoly:
    """Σ_{n=lo}^{hi} e^{inx}."""
    if hi < lo:
        raise ValidationError(f"empty Dirichlet block [{lo}, {hi}]")
    return TrigPoly(lo, np.ones(hi - lo + 1))


def random_analytic(deg: int, seed: int) -> TrigPoly:
    """i.i.d. complex normal coefficients on 0..deg, unit L² norm."""
    _require(deg, 1, "deg")
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    return TrigPoly(0, data / np.linalg.norm(data))


def random_poly(freq_lo: int, freq_hi: int, seed: int, real: bool = False) -> TrigPoly:
    """Random unit-L² polynomial on [freq_lo, freq_hi]; `real` makes it real-valued."""
    if freq_hi < freq_lo:
        raise ValidationError(f"empty support [{freq_lo}, {freq_hi}]")
    rng = np.random.default_rng(seed)
    size = freq_hi - freq_lo + 1
    data = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    if real:
        # f^(-n) = conj f^(n) over the symmetric hull of the support
        top = max(abs(freq_lo), abs(freq_hi))
        full = np.zeros(2 * top + 1, dtype=np.complex128)
        full[freq_lo + top:freq_hi + top + 1] = data
        freq_lo, data = -top, (full + np.conj(full[::-1])) / 2
    return TrigPoly(freq_lo, data / np.linalg.norm(data))
