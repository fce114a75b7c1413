"""Numerical laboratory for polynomial progressions, uniformity norms and
fractal measures on the circle group R/Z."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BandLimitError,
    BudgetError,
    ConfigError,
    ParameterError,
    TorusLabError,
)
from .torus_fn import TorusFunction, from_fourier, from_samples, random_trig  # noqa: E402

__all__ = [
    "BandLimitError",
    "BudgetError",
    "ConfigError",
    "ParameterError",
    "TorusFunction",
    "TorusLabError",
    "from_fourier",
    "from_samples",
    "random_trig",
]
