"""Python access to the erglab core: limit laws, renewal laws and the experiment runner."""

from ._erglab import (
    CensoringError,
    ConfigError,
    cdf,
    dkw_bound,
    exact_zn_pmf,
    ks_distance,
    laplace_product,
    pdf,
    quantile,
    reg_inc_beta,
    run,
    sample,
    tail_prob,
)

__all__ = [
    "CensoringError",
    "ConfigError",
    "cdf",
    "dkw_bound",
    "exact_zn_pmf",
    "ks_distance",
    "laplace_product",
    "pdf",
    "quantile",
    "reg_inc_beta",
    "run",
    "sample",
    "tail_prob",
]
