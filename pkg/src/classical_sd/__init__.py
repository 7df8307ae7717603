"""Classical supply and demand built from unit costs and reservation prices."""

from classical_sd.agents import (
    BuyerUnit,
    Consumer,
    SellerUnit,
    unit_cost,
    unit_demand,
    unit_supply,
    valuation,
)
from classical_sd.schedules import (
    EquilibriumResult,
    StepSchedule,
    build_demand,
    build_supply,
    cross,
    evaluate,
    max_surplus,
)
from classical_sd.smooth import (
    SmoothModel,
    convexity_report,
    model_demand,
    model_supply,
    pyramidal_G,
    sample_values,
    slope,
    triangular_G,
)
from classical_sd.leontief import (
    LeontiefEconomy,
    NonProductiveError,
    labor_values,
    productivity_check,
    relative_prices,
)

__version__ = "0.1.0"

__all__ = [
    "BuyerUnit",
    "Consumer",
    "EquilibriumResult",
    "LeontiefEconomy",
    "NonProductiveError",
    "SellerUnit",
    "SmoothModel",
    "StepSchedule",
    "build_demand",
    "build_supply",
    "convexity_report",
    "cross",
    "evaluate",
    "labor_values",
    "max_surplus",
    "model_demand",
    "model_supply",
    "productivity_check",
    "pyramidal_G",
    "relative_prices",
    "sample_values",
    "slope",
    "triangular_G",
    "unit_cost",
    "unit_demand",
    "unit_supply",
    "valuation",
]
