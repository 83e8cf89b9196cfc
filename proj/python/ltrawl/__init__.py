"""Latent trawl models for threshold exceedances."""

from ._core import (
    LtrawlError,
    ModelParams,
    PairDensityError,
    QuadratureError,
    SingularMatrixError,
    TrawlSpec,
    Variant,
    acf_exceedance,
    acov_exceedance,
    cond_tail_dep,
    empirical_chi,
    exceedance_prob,
    extremal_index_runs,
    f2e,
    f2e_inverse,
    fit,
    full_likelihood_small_k,
    init_heuristic,
    joint_exceedance_survivor,
    kappa_for_exceedance_prob,
    log_pairwise_likelihood,
    mean_exceedance,
    pair_density,
    pair_density_mt,
    quantile,
    read_csv,
    simulate_exceedances,
    simulate_trawl,
)

__all__ = [name for name in dir() if not name.startswith("_")]
