"""Unit-level primitives: the cost of a seller's unit and a buyer's reservation price.

A seller unit is described by its input recipe ``a``; at input prices ``p``
it costs ``a . p``.  A buyer unit is described by the buyer's wealth ``w`` and
a 0/1 vector ``h`` marking the goods that come first in the buyer's hierarchy
of needs; its reservation price is ``w - h . p``.  Both comparisons with the
market price are weak: ties buy and ties sell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def _vector(name: str, values: Sequence[float], *, nonnegative: bool = False) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"{name}[{bad[0]}] is not finite: {arr[bad[0]]!r}")
    if nonnegative:
        neg = np.flatnonzero(arr < 0)
        if neg.size:
            raise ValueError(f"{name}[{neg[0]}] is negative: {arr[neg[0]]!r}")
    return arr


def _check_lengths(left: str, a: np.ndarray, right: str, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: {left} has length {a.shape[0]}, "
            f"{right} has length {b.shape[0]}"
        )


def _hierarchy(h: Sequence[float]) -> np.ndarray:
    arr = _vector("hierarchy", h)
    bad = np.flatnonzero((arr != 0) & (arr != 1))
    if bad.size:
        raise ValueError(f"hierarchy[{bad[0]}] must be 0 or 1, got {arr[bad[0]]!r}")
    return arr


def unit_cost(recipe: Sequence[float], p: Sequence[float]) -> float:
    """Money cost of one unit produced with input quantities ``recipe`` at prices ``p``."""
    a = _vector("recipe", recipe, nonnegative=True)
    prices = _vector("prices", p, nonnegative=True)
    _check_lengths("recipe", a, "prices", prices)
    return float(np.dot(a, prices))


def valuation(w: float, h: Sequence[float], p: Sequence[float]) -> float:
    """Reservation price left over once the more urgent goods flagged in ``h`` are paid for.

    The result is not clamped: a negative valuation is a unit that is never
    demanded at any non-negative price.
    """
    if not math.isfinite(w) or w < 0:
        raise ValueError(f"wealth must be finite and >= 0, got {w!r}")
    hv = _hierarchy(h)
    prices = _vector("prices", p, nonnegative=True)
    _check_lengths("hierarchy", hv, "prices", prices)
    return float(w - np.dot(hv, prices))


def unit_demand(v: float, p: float) -> int:
    return 1 if v >= p else 0


def unit_supply(c: float, p: float) -> int:
    return 1 if c <= p else 0


@dataclass(frozen=True)
class SellerUnit:
    """One unit offered for sale, priced either from a recipe or by a direct cost."""

    recipe: tuple[float, ...] | None = None
    cost: float | None = None

    def __post_init__(self) -> None:
        if (self.recipe is None) == (self.cost is None):
            raise ValueError("a seller unit takes exactly one of recipe or cost")
        if self.recipe is not None:
            object.__setattr__(self, "recipe", tuple(_vector("recipe", self.recipe, nonnegative=True)))
        elif not math.isfinite(self.cost) or self.cost < 0:
            raise ValueError(f"cost must be finite and >= 0, got {self.cost!r}")

    def cost_at(self, p: Sequence[float] | None = None) -> float:
        if self.cost is not None:
            return float(self.cost)
        if p is None:
            raise ValueError("prices are required to cost a recipe")
        return unit_cost(self.recipe, p)


@dataclass(frozen=True)
class BuyerUnit:
    wealth: float
    hierarchy: tuple[float, ...]

    def __post_init__(self) -> None:
        if not math.isfinite(self.wealth) or self.wealth < 0:
            raise ValueError(f"wealth must be finite and >= 0, got {self.wealth!r}")
        object.__setattr__(self, "hierarchy", tuple(_hierarchy(self.hierarchy)))

    def value_at(self, p: Sequence[float]) -> float:
        return valuation(self.wealth, self.hierarchy, p)


@dataclass(frozen=True)
class Consumer:
    """A single consumer facing ``n`` goods.

    ``hierarchy[i]`` is the needs vector used when the consumer values good
    ``i``: ``hierarchy[i][k] == 1`` means good ``k`` is more urgent than good
    ``i``.  ``units[i]`` is the number of units of good ``i`` the consumer
    needs; each is bought at a price no higher than the valuation.
    """

    wealth: float
    hierarchy: tuple[tuple[int, ...], ...]
    units: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not math.isfinite(self.wealth) or self.wealth < 0:
            raise ValueError(f"wealth must be finite and >= 0, got {self.wealth!r}")
        rows = tuple(tuple(int(x) for x in _hierarchy(row)) for row in self.hierarchy)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(
                    f"dimension mismatch: hierarchy[{i}] has length {len(row)}, "
                    f"commodity count is {n}"
                )
            if row[i] != 0:
                raise ValueError(f"hierarchy[{i}][{i}] must be 0: a good is not more urgent than itself")
        units = self.units or (1,) * n
        if len(units) != n:
            raise ValueError(f"dimension mismatch: units has length {len(units)}, commodity count is {n}")
        if any(u < 0 for u in units):
            raise ValueError("units must be >= 0")
        object.__setattr__(self, "hierarchy", rows)
        object.__setattr__(self, "units", tuple(int(u) for u in units))

    @property
    def n_goods(self) -> int:
        return len(self.hierarchy)

    def valuations(self, p: Sequence[float]) -> list[float]:
        return [valuation(self.wealth, row, p) for row in self.hierarchy]

    def demands(self, p: Sequence[float]) -> list[int]:
        """Units of each good demanded at the price vector ``p``."""
        prices = _vector("prices", p, nonnegative=True)
        return [
            self.units[i] * unit_demand(v, prices[i])
            for i, v in enumerate(self.valuations(prices))
        ]
