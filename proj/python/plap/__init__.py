"""Radial solutions and existence criteria for p-Laplacian systems."""

from ._plap import (
    DomainError,
    Error,
    ExpressionError,
    SchemaError,
    __version__,
    evaluate,
    predict,
    residuals,
    solve,
    sweep,
)

__all__ = [
    "DomainError",
    "Error",
    "ExpressionError",
    "SchemaError",
    "__version__",
    "evaluate",
    "predict",
    "residuals",
    "solve",
    "sweep",
]
