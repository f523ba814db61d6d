"""Green functions of periodic one-dimensional potentials."""

from ._core import (
    ConfigError,
    NumericError,
    Potential,
    cell_constants,
    classify_band,
    cosine_potential,
    evolve,
    free_potential,
    green_exact,
    green_series,
    load_potential,
    monodromy,
    parse_potential,
    render,
    s_functions,
    square_potential,
    version,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "Potential",
    "cell_constants",
    "classify_band",
    "cosine_potential",
    "evolve",
    "free_potential",
    "green_exact",
    "green_series",
    "load_potential",
    "monodromy",
    "parse_potential",
    "render",
    "s_functions",
    "square_potential",
    "version",
]
