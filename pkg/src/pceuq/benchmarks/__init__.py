"""Synthetic benchmark systems and the validation protocol."""
from .ishigami import ISHIGAMI_VINE, ishigami_eval, ishigami_sampler
from .truss import TRUSS_LOAD_VINE, truss_eval, truss_sampler, truss_solve
from .validation import (
    NoiseSpec,
    PceFactory,
    Reference,
    ValidationResult,
    get_benchmark,
    inject_noise,
    reference_statistics,
    run_validation,
)

__all__ = [
    "ISHIGAMI_VINE", "ishigami_eval", "ishigami_sampler", "TRUSS_LOAD_VINE", "truss_eval", "truss_sampler",
    "truss_solve", "NoiseSpec", "PceFactory", "Reference", "ValidationResult", "get_benchmark", "inject_noise",
    "reference_statistics", "run_validation",
]
