"""Finite-size security bounds for continuous-variable QKD.

Thin python layer over the C++ core: closed-form security parameters,
concentration bounds, generalized coherent-state tooling and the Monte-Carlo
certification suites.
"""

from gdfqkd._core import (  # noqa: F401
    GdfError,
    N_star,
    binom_tail_exact,
    chernoff_tail_bound,
    chi2_tail_bounds,
    compose_security,
    definetti_epsilon,
    dim_V_eq,
    dim_V_leq,
    eta_star,
    failure_event_estimate,
    g_factor,
    gram_matrix,
    gram_oracle,
    in_region,
    incomplete_gamma_Q,
    invariance_check,
    key_reduction_bits,
    chi2_ratio_probability,
    min_blocklength,
    overlap,
    photon_block_via_gram,
    photon_block_weight,
    pinsker_lower_bound,
    q_density,
    reg_beta_tail_bound,
    reg_beta_tail_exact,
    rel_entropy,
    sample_lambda,
    singular_squares,
    heterodyne_tail_eigenvalue,
    truncated_overlap,
    vacuum_overlap,
    verify_cutoff_domination,
    verify_definetti,
    volume_T,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
