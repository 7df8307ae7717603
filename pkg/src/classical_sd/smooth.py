"""Large-market schedules: continuous distributions of values and costs.

Demand is ``capacity * G(p)`` with ``G`` the complementary distribution of
reservation prices; supply is ``capacity * F(p)`` with ``F`` the distribution
of unit costs.  Three families are provided:

* ``triangular`` (alias ``uniform``): uniform density on ``[low, high]``, so
  demand falls linearly.
* ``pyramidal``: ``G(p) = ((high - p) / (high - low)) ** power``.  With
  ``low = 0`` and ``power = 2`` this is the square-pyramid demand; ``power = 1``
  is the triangle.  Demand side only.
* ``custom``: any non-negative density on the support, tabulated once with
  Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

Side = Literal["demand", "supply"]

CONVEXITY_TOL = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def triangular_G(p: float, v_min: float, v_max: float) -> float:
    if not v_min < v_max:
        raise ValueError(f"need v_min < v_max, got [{v_min}, {v_max}]")
    if p <= v_min:
        return 1.0
    if p >= v_max:
        return 0.0
    return (v_max - p) / (v_max - v_min)


def pyramidal_G(p: float, v_max: float, power: float = 2.0) -> float:
    if not v_max > 0:
        raise ValueError(f"v_max must be positive, got {v_max}")
    if p <= 0:
        return 1.0
    if p >= v_max:
        return 0.0
    return ((v_max - p) / v_max) ** power


def _vectorized(density: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def f(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        try:
            out = np.asarray(density(x), dtype=float)
        except (TypeError, ValueError):
            out = None
        if out is None or out.shape != x.shape:
            out = np.vectorize(lambda t: float(density(t)), otypes=[float])(x)
        return out

    return f


class _TabulatedCDF:
    """Cumulative integral of a density on a fixed grid of cells.

    Values between cell edges are completed with a Gauss-Legendre rule on the
    partial cell, so a polynomial density up to degree 19 is integrated exactly.
    """

    def __init__(self, density: Callable, low: float, high: float, cells: int = 2048):
        self.density = _vectorized(density)
        self.low, self.high = low, high
        self.edges = np.linspace(low, high, cells + 1)
        mid = 0.5 * (self.edges[:-1] + self.edges[1:])
        half = 0.5 * np.diff(self.edges)
        f = self.density(mid[:, None] + half[:, None] * _GL_NODES)
        if np.any(~np.isfinite(f)) or np.any(f < 0):
            raise ValueError("density must be finite and non-negative on the support")
        if np.any(f == 0):
            raise ValueError("density must be strictly positive inside the support")
        self.cell_mass = (f * _GL_WEIGHTS).sum(axis=1) * half
        self.cum = np.concatenate([[0.0], np.cumsum(self.cell_mass)])
        self.total = float(self.cum[-1])

    def _partial(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        f = self.density(mid[..., None] + half[..., None] * _GL_NODES)
        return (f * _GL_WEIGHTS).sum(axis=-1) * half

    def _cell(self, x: np.ndarray) -> np.ndarray:
        i = np.searchsorted(self.edges, x, side="right") - 1
        return np.clip(i, 0, self.cell_mass.size - 1)

    def mass_below(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.low, self.high)
        i = self._cell(x)
        return self.cum[i] + self._partial(self.edges[i], x)

    def cdf(self, x) -> np.ndarray:
        return np.clip(self.mass_below(x) / self.total, 0.0, 1.0)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x > self.low) & (x < self.high)
        return np.where(inside, self.density(np.clip(x, self.low, self.high)), 0.0) / self.total

    def ppf(self, u) -> np.ndarray:
        target = np.asarray(u, dtype=float) * self.total
        i = np.clip(np.searchsorted(self.cum, target, side="right") - 1, 0, self.cell_mass.size - 1)
        a, b = self.edges[i], self.edges[i + 1]
        x = a + (target - self.cum[i]) / self.cell_mass[i] * (b - a)
        for _ in range(8):
            err = self.cum[i] + self._partial(a, x) - target
            f = self.density(x)
            step = np.divide(err, f, out=np.zeros_like(err), where=f > 0)
            x = np.clip(x - step, a, b)
        return x


@dataclass(frozen=True)
class SmoothModel:
    side: Side
    family: str
    low: float
    high: float
    capacity: float = 1.0
    power: float = 2.0
    density: Callable | None = field(default=None, compare=False, repr=False)
    _table: _TabulatedCDF | None = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        family = "triangular" if self.family == "uniform" else self.family
        object.__setattr__(self, "family", family)
        if self.side not in ("demand", "supply"):
            raise ValueError(f"side must be 'demand' or 'supply', got {self.side!r}")
        if family not in ("triangular", "pyramidal", "custom"):
            raise ValueError(f"unknown family {self.family!r}")
        if not (math.isfinite(self.low) and math.isfinite(self.high)) or self.low < 0:
            raise ValueError(f"support must be finite with low >= 0, got [{self.low}, {self.high}]")
        if not self.low < self.high:
            raise ValueError(f"support needs low < high, got [{self.low}, {self.high}]")
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if family == "pyramidal":
            if self.side != "demand":
                raise ValueError("the pyramidal family describes demand only")
            if not self.power >= 1:
                raise ValueError(f"pyramidal power must be >= 1, got {self.power}")
        if family == "custom":
            if self.density is None:
                raise ValueError("a custom model needs a density")
            object.__setattr__(self, "_table", _TabulatedCDF(self.density, self.low, self.high))

    @classmethod
    def triangular(cls, high: float, low: float = 0.0, capacity: float = 1.0, side: Side = "demand"):
        return cls(side, "triangular", low, high, capacity)

    @classmethod
    def pyramidal(cls, high: float, power: float = 2.0, capacity: float = 1.0, low: float = 0.0):
        return cls("demand", "pyramidal", low, high, capacity, power=power)

    @classmethod
    def custom(cls, density: Callable, low: float, high: float, capacity: float = 1.0, side: Side = "demand"):
        return cls(side, "custom", low, high, capacity, density=density)

    # Distribution of the underlying values (demand) or costs (supply).

    def cdf(self, p):
        """P(value <= p) for demand, P(cost <= p) for supply."""
        p = np.asarray(p, dtype=float)
        if self.family == "custom":
            return self._table.cdf(p)
        z = np.clip((self.high - p) / (self.high - self.low), 0.0, 1.0)
        return 1.0 - z ** (self.power if self.family == "pyramidal" else 1.0)

    def survival(self, p):
        """P(value >= p); the share of capacity demanded at ``p``."""
        p = np.asarray(p, dtype=float)
        if self.family == "custom":
            return 1.0 - self._table.cdf(p)
        z = np.clip((self.high - p) / (self.high - self.low), 0.0, 1.0)
        return z ** (self.power if self.family == "pyramidal" else 1.0)

    def pdf(self, p):
        p = np.asarray(p, dtype=float)
        if self.family == "custom":
            return self._table.pdf(p)
        width = self.high - self.low
        inside = (p > self.low) & (p < self.high)
        if self.family == "triangular":
            return np.where(inside, 1.0 / width, 0.0)
        z = np.clip((self.high - p) / width, 0.0, 1.0)
        return np.where(inside, self.power / width * z ** (self.power - 1), 0.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if self.family == "custom":
            return self._table.ppf(u)
        k = self.power if self.family == "pyramidal" else 1.0
        return self.high - (self.high - self.low) * (1.0 - u) ** (1.0 / k)

    def normalized(self, p):
        """G(p) for demand, F(p) for supply."""
        return self.survival(p) if self.side == "demand" else self.cdf(p)

    def schedule(self, p):
        return self.capacity * self.normalized(p)

    def density_nonincreasing(self, points: int = 2001) -> bool:
        x = np.linspace(self.low, self.high, points)[1:-1]
        f = self.pdf(x)
        return bool(np.all(np.diff(f) <= 1e-12 * np.max(f)))


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def model_demand(m: SmoothModel, p):
    if m.side != "demand":
        raise ValueError("model_demand needs a demand-side model")
    return _scalar(m.schedule(p))


def model_supply(m: SmoothModel, p):
    if m.side != "supply":
        raise ValueError("model_supply needs a supply-side model")
    return _scalar(m.schedule(p))


def slope(m: SmoothModel, p):
    """dD/dp (negative) or dS/dp (positive) at an interior price."""
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= m.low) | (p_arr >= m.high)):
        raise ValueError(f"slope is defined strictly inside the support ({m.low}, {m.high})")
    sign = -1.0 if m.side == "demand" else 1.0
    return _scalar(sign * m.capacity * m.pdf(p_arr))


def second_differences(grid: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Second differences, rescaled on uneven grids to match the even-grid formula."""
    x = np.asarray(grid, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        return np.zeros(0)
    h = np.diff(x)
    left = (y[1:-1] - y[:-2]) / h[:-1]
    right = (y[2:] - y[1:-1]) / h[1:]
    return (right - left) * 0.5 * (h[:-1] + h[1:])


@dataclass(frozen=True)
class ConvexityReport:
    grid: tuple[float, ...]
    second_differences: tuple[float, ...]
    tolerance: float
    convex: bool
    verdict: str  # "strictly-convex", "affine", "convex" or "not-convex"

    @property
    def nonconvex_points(self) -> list[float]:
        return [
            self.grid[i + 1]
            for i, d in enumerate(self.second_differences)
            if d < -self.tolerance
        ]


def classify_curvature(d2: np.ndarray, tol: float) -> str:
    if d2.size == 0 or np.all(np.abs(d2) <= tol):
        return "affine"
    if np.any(d2 < -tol):
        return "not-convex"
    if np.all(d2 > tol):
        return "strictly-convex"
    return "convex"


def convexity_report(m: SmoothModel, grid: Sequence[float]) -> ConvexityReport:
    x = np.asarray(grid, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    if x.size and (x[0] < m.low or x[-1] > m.high):
        raise ValueError(f"grid must lie inside the support [{m.low}, {m.high}]")
    y = m.schedule(x)
    d2 = second_differences(x, y)
    tol = CONVEXITY_TOL * m.capacity
    verdict = classify_curvature(d2, tol)
    return ConvexityReport(
        grid=tuple(float(t) for t in x),
        second_differences=tuple(float(t) for t in d2),
        tolerance=tol,
        convex=verdict != "not-convex",
        verdict=verdict,
    )


def rng(seed: int) -> np.random.Generator:
    """The package's generator: numpy PCG64 seeded directly with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_values(m: SmoothModel, count: int, seed: int) -> list[float]:
    """Draw ``count`` values (or costs) by inverse-CDF transform of PCG64 uniforms."""
    return sample_array(m, count, seed).tolist()


def sample_array(m: SmoothModel, count: int, seed: int) -> np.ndarray:
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.zeros(0)
    u = rng(seed).random(count)
    return np.clip(m.ppf(u), m.low, m.high)
