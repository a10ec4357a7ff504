"""statkit: descriptive statistics, inference, regression, factor analysis,
clustering and baseline classifiers, with a Markdown report CLI."""

__version__ = "0.1.0"

from .dataset import BinSpec, Column, Dataset, Kind, binned_frequency_table, frequency_table, load_csv  # noqa: E402
from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    DataError,
    DegenerateError,
    NumericError,
    SingularMatrixError,
    StatkitError,
)

__all__ = [
    "__version__",
    "BinSpec", "Column", "Dataset", "Kind", "binned_frequency_table", "frequency_table", "load_csv",
    "ConfigError", "ConvergenceError", "DataError", "DegenerateError", "NumericError",
    "SingularMatrixError", "StatkitError",
]
