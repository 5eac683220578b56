"""Bivariate time-changed Lévy models with Lévy-copula dependent compound-Poisson clocks."""
from .copula import ClaytonCopula, HomogeneousLevyCopula, MixtureCopula
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    NumericalError,
    ParameterDomainError,
    TCLevyError,
)
from .estimation import CppCopulaParams, PairedJumpData, loglik, mle_fit, mom_fit
from .series import BivModelParams, simulate_model_paths, simulate_tc_bm
from .subordinator import ExpCppParams, simulate_biv_subordinator

__version__ = "0.1.0"

__all__ = [
    "BivModelParams", "ClaytonCopula", "ConfigError", "CppCopulaParams", "DataError",
    "DomainError", "ExpCppParams", "HomogeneousLevyCopula", "MixtureCopula", "NumericalError",
    "PairedJumpData", "ParameterDomainError", "TCLevyError", "loglik", "mle_fit", "mom_fit",
    "simulate_biv_subordinator", "simulate_model_paths", "simulate_tc_bm",
]
