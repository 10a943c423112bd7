"""Monogamy of quantum steering and Bell-CHSH violations in three-qubit states."""
from .canonical import CanonicalCoefficients, acin_decompose
from .ensembles import EnsembleSpec
from .entanglement import concurrence, tangle
from .errors import (
    IdentityViolationError, NumericalIntegrityError, QSteerError, StateFileError,
    UnsupportedInputError,
)
from .steering import MeasurementSettings, optimize_settings, violation_report
from .tensor import DensityMatrix, PureState, correlation_matrix, partial_trace
from .tradeoff import TradeoffReport, tradeoff_report

__version__ = "0.1.0"

__all__ = [
    "CanonicalCoefficients", "DensityMatrix", "EnsembleSpec", "IdentityViolationError",
    "MeasurementSettings", "NumericalIntegrityError", "PureState", "QSteerError", "StateFileError",
    "TradeoffReport", "UnsupportedInputError", "acin_decompose", "concurrence", "correlation_matrix",
    "optimize_settings", "partial_trace", "tangle", "tradeoff_report", "violation_report",
]
