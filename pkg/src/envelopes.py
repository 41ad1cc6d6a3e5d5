"""
Frozen regression envelopes for the scans.

These are empirical brackets fixed after pilot runs, not theoretical
constants; summaries label every check that uses them as an envelope.
"""

# Fits feeding a gate need at least this r²; lower is reported inconclusive.
FIT_MIN_R2 = 0.9

ENVELOPE_NOTE = "check brackets are regression envelopes from pilot runs, not theoretical constants"

# Cardinality of A_N against (λ-1)^{-1}
CARDINALITY_SLOPE = (0.85, 1.15)
CARDINALITY_MIN_R2 = 0.95
CARDINALITY_SCALED = (0.3, 6.0)
# Relative slack on bracket ends for values computed in floating point
BRACKET_RTOL = 1e-9

# σ(Λ)·(ρ-1) for constructed sequences
SIGMA_RHO = (0.3, 6.0)

# Lower-bound functionals
SHARPNESS_SLOPE_LAMBDA = (0.35, 0.65)
SHARPNESS_SLOPE_LOG_N = (0.8, 1.2)
SIGMA_SLOPE = (0.35, 0.65)
PALEY_SLOPE = (0.35, 0.65)

# ‖Σ_{n<L} e^{inx}‖_1 / log L, blocks of length >= DIRICHLET_MIN_LENGTH
DIRICHLET_L1 = (0.3, 0.7)
DIRICHLET_MIN_LENGTH = 64

# Upper-bound envelopes
MIKHLIN_C0 = 6.0
ZYGMUND_FACTOR = 10.0
LAMBDA_P_FACTOR = 10.0
WEAK_TYPE_FACTOR = 20.0
WEAK_TYPE_SLOPE = (-0.2, 0.2)

DUAL_SEQUENCE_FACTOR = 4.0
DUAL_SLOPE = (0.0, 1.3)
DUAL_MONOTONE = 0.8

KHINTCHINE = (0.4, 2.5)

# Isometry and exact identities
ISOMETRY_RTOL = 1e-9
IDENTITY_RTOL = 1e-9
