"""Python bindings for the envcva engine."""
import json

from ._core import (
    DataError,
    EnvcvaError,
    NumericError,
    ValidationError,
    __version__,
    corner_decomposition,
    distribution_summary,
    flat_hazard_from_spread,
    kendall_tau,
    kl_upper_bound,
    two_stage,
)
from ._core import run as _run


def run(command, config, out_dir, seed=None):
    """Runs one pipeline command and returns the parsed run.json."""
    return json.loads(_run(command, str(config), str(out_dir), seed))


__all__ = [
    "DataError",
    "EnvcvaError",
    "NumericError",
    "ValidationError",
    "__version__",
    "corner_decomposition",
    "distribution_summary",
    "flat_hazard_from_spread",
    "kendall_tau",
    "kl_upper_bound",
    "run",
    "two_stage",
]
