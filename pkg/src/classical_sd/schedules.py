"""Exact market schedules of a finite population of units.

Market demand at price ``p`` is the number of units valued at ``p`` or more;
market supply is the number of units costing ``p`` or less.  Both are stored
as a sorted array of unit prices and evaluated by binary search, so every
quantity is an exact integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

Side = Literal["demand", "supply"]


def _prices(name: str, values: Iterable[float], *, nonnegative: bool) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a flat list")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"{name}[{bad[0]}] is not finite: {arr[bad[0]]!r}")
    if nonnegative:
        neg = np.flatnonzero(arr < 0)
        if neg.size:
            raise ValueError(f"{name}[{neg[0]}] is negative: {arr[neg[0]]!r}")
    return arr


@dataclass(frozen=True, eq=False)
class StepSchedule:
    """Immutable demand or supply step function built from unit prices.

    ``units`` holds the sorted reservation prices (demand) or unit costs
    (supply), repeated once per unit.
    """

    side: Side
    units: np.ndarray

    def __post_init__(self) -> None:
        if self.side not in ("demand", "supply"):
            raise ValueError(f"side must be 'demand' or 'supply', got {self.side!r}")
        arr = np.sort(np.asarray(self.units, dtype=float))
        arr.setflags(write=False)
        object.__setattr__(self, "units", arr)

    @property
    def capacity(self) -> int:
        """D-bar (units valued at 0 or more) or S-bar (all units)."""
        if self.side == "demand":
            return int(self.units.size - np.searchsorted(self.units, 0.0, side="left"))
        return int(self.units.size)

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if self.side == "demand":
            q = self.units.size - np.searchsorted(self.units, p, side="left")
        else:
            q = np.searchsorted(self.units, p, side="right")
        return int(q) if q.ndim == 0 else q.astype(np.int64)

    @property
    def breakpoints(self) -> list[tuple[float, int]]:
        """Distinct unit prices paired with the schedule's value there."""
        prices = np.unique(self.units)
        return [(float(x), int(q)) for x, q in zip(prices, np.atleast_1d(self(prices)))]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepSchedule):
            return NotImplemented
        return self.side == other.side and np.array_equal(self.units, other.units)

    def __hash__(self) -> int:
        return hash((self.side, self.units.tobytes()))

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "capacity": self.capacity,
            "breakpoints": [[p, q] for p, q in self.breakpoints],
        }

    @classmethod
    def from_breakpoints(cls, side: Side, pairs: Sequence[tuple[float, int]]) -> "StepSchedule":
        """Rebuild a schedule from (price, quantity) samples.

        The samples must include every breakpoint for the rebuilt schedule to
        agree everywhere; otherwise it agrees at the sampled prices only.
        """
        pts = sorted((float(p), int(q)) for p, q in pairs)
        prices = [p for p, _ in pts]
        qty = [q for _, q in pts]
        if len(set(prices)) != len(prices):
            raise ValueError("breakpoint prices must be distinct")
        units: list[float] = []
        if side == "demand":
            nxt = qty[1:] + [0]
            for p, q, q_next in zip(prices, qty, nxt):
                if q < q_next:
                    raise ValueError(f"demand breakpoints must be non-increasing at price {p}")
                units.extend([p] * (q - q_next))
        else:
            prev = [0] + qty[:-1]
            for p, q, q_prev in zip(prices, qty, prev):
                if q < q_prev:
                    raise ValueError(f"supply breakpoints must be non-decreasing at price {p}")
                units.extend([p] * (q - q_prev))
        return cls(side, np.array(units, dtype=float))

    @classmethod
    def from_dict(cls, data: dict) -> "StepSchedule":
        return cls.from_breakpoints(data["side"], [tuple(bp) for bp in data["breakpoints"]])


def build_demand(values: Iterable[float]) -> StepSchedule:
    return StepSchedule("demand", _prices("values", values, nonnegative=False))


def build_supply(costs: Iterable[float]) -> StepSchedule:
    return StepSchedule("supply", _prices("costs", costs, nonnegative=True))


def evaluate(s: StepSchedule, p: float) -> int:
    """Quantity demanded (count of values >= p) or supplied (count of costs <= p)."""
    if not math.isfinite(p) and p != math.inf:
        raise ValueError(f"price must be a number, got {p!r}")
    return s(p)


@dataclass(frozen=True)
class EquilibriumResult:
    """Competitive crossing of a demand and a supply schedule.

    Any price in ``[price_low, price_high]`` clears the market with
    ``quantity`` units.  ``price_high`` is infinite only when there are no
    sellers at all beyond the traded units and no buyer bounds it.
    """

    quantity: int
    price_low: float
    price_high: float
    degenerate: bool

    @property
    def midpoint(self) -> float:
        """Convenience point inside the interval. Not a model prediction."""
        if math.isinf(self.price_high):
            return self.price_low
        return 0.5 * (self.price_low + self.price_high)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "price_low": self.price_low,
            "price_high": None if math.isinf(self.price_high) else self.price_high,
            "degenerate": self.degenerate,
        }


def _crossing_quantity(v_desc: np.ndarray, c_asc: np.ndarray) -> int:
    m = min(v_desc.size, c_asc.size)
    ok = v_desc[:m] >= c_asc[:m]
    # ok is True on a prefix: v is falling and c is rising
    return int(np.argmin(ok)) if not ok.all() else m


def cross(d: StepSchedule, s: StepSchedule) -> EquilibriumResult:
    if d.side != "demand" or s.side != "supply":
        raise ValueError("cross expects a demand schedule and a supply schedule")
    v = d.units[::-1]
    c = s.units
    q = _crossing_quantity(v, c)

    def order_stat(arr: np.ndarray, k: int, missing: float) -> float:
        return float(arr[k - 1]) if 1 <= k <= arr.size else missing

    low = max(order_stat(c, q, -math.inf), order_stat(v, q + 1, -math.inf), 0.0)
    high = min(order_stat(v, q, math.inf), order_stat(c, q + 1, math.inf))
    high = max(high, 0.0)
    return EquilibriumResult(quantity=q, price_low=low, price_high=high, degenerate=q == 0)


def max_surplus(values: Iterable[float], costs: Iterable[float]) -> float:
    """Largest total gain from exchange: highest values paired with lowest costs."""
    v = np.sort(_prices("values", values, nonnegative=False))[::-1]
    c = np.sort(_prices("costs", costs, nonnegative=True))
    q = _crossing_quantity(v, c)
    return float(np.sum(v[:q] - c[:q]))


def default_grid(*schedules: StepSchedule) -> list[float]:
    """All non-negative breakpoints, the midpoints between them, and one step either side."""
    pts = np.unique(np.concatenate([s.units for s in schedules] + [np.zeros(1)]))
    pts = pts[pts >= 0]
    if pts.size == 1:
        return [0.0, 1.0]
    mids = 0.5 * (pts[:-1] + pts[1:])
    gap = float(np.min(np.diff(pts)))
    ends = np.array([pts[-1] + gap])
    grid = np.unique(np.concatenate([pts, mids, ends]))
    return [float(x) for x in grid]
