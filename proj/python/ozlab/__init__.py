from ._ozlab import (
    OzlabError,
    TwoPointTable,
    DirectCorrelation,
    WulffBody,
    __version__,
    axioms,
    build_body,
    direct_correlation,
    enumerate_two_point,
    ising_correlation,
    onsager_axis_xi,
    onsager_nn_correlation,
    oz_fit,
    regeneration_points,
    skeleton,
    strip_xi,
    surcharge_histogram,
    validate_config,
)

__all__ = [
    "OzlabError",
    "TwoPointTable",
    "DirectCorrelation",
    "WulffBody",
    "__version__",
    "axioms",
    "build_body",
    "direct_correlation",
    "enumerate_two_point",
    "ising_correlation",
    "onsager_axis_xi",
    "onsager_nn_correlation",
    "oz_fit",
    "regeneration_points",
    "skeleton",
    "strip_xi",
    "surcharge_histogram",
    "validate_config",
]
