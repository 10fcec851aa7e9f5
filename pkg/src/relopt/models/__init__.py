"""Built-in models and the name registry used by the CLI."""

from __future__ import annotations

from ..core import ValidationError
from .examples1d import VARIANTS, Example1D, make_example
from .grid import DiscreteGridModel, make_discrete_grid
from .synthetic import SquaredCostLine
from .telecom import (TelecomModel, inner_brute_force_oracle, inner_solve,
                      make_telecom_model, oracle_error_bound)
from .waste import WasteModel, make_waste_model

MODEL_NAMES = ("example31", "example32", "example41", "grid", "waste", "telecom")


def make_model(name: str, params: dict | None = None):
    """Build a registered model from a name and a parameter mapping."""
    params = dict(params or {})
    if name in VARIANTS:
        return make_example(name, **params)
    if name == "grid":
        return make_discrete_grid(**params)
    if name == "waste":
        return make_waste_model(**params)
    if name == "telecom":
        return make_telecom_model(**params)
    raise ValidationError(
        f"unknown model {name!r}; registered models: {', '.join(MODEL_NAMES)}")


__all__ = [
    "MODEL_NAMES", "Example1D", "DiscreteGridModel", "WasteModel",
    "TelecomModel", "SquaredCostLine", "make_model", "make_example",
    "make_discrete_grid", "make_waste_model", "make_telecom_model",
    "inner_solve", "inner_brute_force_oracle", "oracle_error_bound",
]
