"""Embodied-labor values in a Leontief economy.

``A[i, j]`` is the quantity of good ``i`` used to make one unit of good ``j``
and ``labor[j]`` the direct labor time per unit of ``j``.  The labor value of
each good solves ``v = A.T @ v + labor``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

PRODUCTIVITY_MARGIN = 1e-9
POWER_TOL = 1e-8


class NonProductiveError(ValueError):
    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"economy is not productive: spectral radius estimate {spectral_radius:.10g} "
            f">= 1 - {PRODUCTIVITY_MARGIN:g}"
        )


@dataclass(frozen=True)
class ProductivityCheck:
    productive: bool
    spectral_radius: float
    lower: float
    upper: float
    iterations: int
    converged: bool


def _matrix(A) -> np.ndarray:
    a = np.array(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"input matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("input matrix has non-finite entries")
    if np.any(a < 0):
        i, j = map(int, np.argwhere(a < 0)[0])
        raise ValueError(f"input matrix entry [{i}][{j}] is negative: {a[i, j]!r}")
    return a


def _irreducible_blocks(a: np.ndarray) -> list[np.ndarray]:
    """Index sets of the strongly connected components of the graph of ``a``."""
    n = a.shape[0]
    reach = (a > 0) | np.eye(n, dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))))):
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
    mutual = reach & reach.T
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for i in range(n):
        if not seen[i]:
            members = np.flatnonzero(mutual[i])
            seen[members] = True
            blocks.append(members)
    return blocks


def _power_bracket(block: np.ndarray, tol: float, max_iter: int) -> tuple[float, float, int, bool]:
    """Collatz-Wielandt bracket on the spectral radius of an irreducible block."""
    m = block.shape[0]
    shifted = block + np.eye(m)
    x = np.ones(m)
    lower, upper = 0.0, np.inf
    for it in range(1, max_iter + 1):
        y = shifted @ x
        ratios = y / x
        lower, upper = max(lower, float(ratios.min())), min(upper, float(ratios.max()))
        if upper - lower < tol:
            return lower - 1.0, upper - 1.0, it, True
        x = y / np.linalg.norm(y)
    return lower - 1.0, upper - 1.0, max_iter, False


def productivity_check(A, tol: float = POWER_TOL, max_iter: int = 100_000) -> ProductivityCheck:
    """Estimate the dominant eigenvalue of a non-negative matrix.

    The spectral radius of a non-negative matrix is the largest over its
    irreducible diagonal blocks.  On each block, power iteration runs on
    ``A + I`` from a positive start vector: the shift makes the block
    primitive, and the Collatz-Wielandt ratios ``min(y/x)`` and ``max(y/x)``
    bracket the radius at every step until they are ``tol`` apart.
    """
    a = _matrix(A)
    lower = upper = 0.0
    iterations, converged = 0, True
    for idx in _irreducible_blocks(a):
        block = a[np.ix_(idx, idx)]
        if idx.size == 1 and block[0, 0] == 0:
            continue  # no cycle through this good
        lo, hi, it, ok = _power_bracket(block, tol, max_iter)
        iterations += it
        converged &= ok
        lower, upper = max(lower, lo), max(upper, hi)
    rho = max(0.5 * (lower + upper), 0.0)
    return ProductivityCheck(
        productive=rho < 1.0 - PRODUCTIVITY_MARGIN,
        spectral_radius=rho,
        lower=max(lower, 0.0),
        upper=max(upper, 0.0),
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True, eq=False)
class LeontiefEconomy:
    A: np.ndarray
    direct_labor: np.ndarray

    def __post_init__(self) -> None:
        a = _matrix(self.A)
        labor = np.array(self.direct_labor, dtype=float)
        if labor.ndim != 1 or labor.shape[0] != a.shape[0]:
            raise ValueError(
                f"dimension mismatch: matrix is {a.shape[0]}x{a.shape[1]}, "
                f"labor vector has length {labor.size}"
            )
        if not np.all(np.isfinite(labor)) or np.any(labor < 0):
            raise ValueError("direct labor must be finite and >= 0")
        if not np.any(labor > 0):
            raise ValueError("at least one good must use direct labor")
        a.setflags(write=False)
        labor.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "direct_labor", labor)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def recipes(self) -> list[list[float]]:
        """Input recipe of each good over (goods..., labor)."""
        return [list(self.A[:, j]) + [float(self.direct_labor[j])] for j in range(self.n)]


def labor_values(e: LeontiefEconomy) -> np.ndarray:
    check = productivity_check(e.A)
    if not check.productive:
        raise NonProductiveError(check.spectral_radius)
    m = np.eye(e.n) - e.A.T
    v = np.linalg.solve(m, e.direct_labor)
    residual = np.linalg.norm(m @ v - e.direct_labor)
    if residual >= 1e-10 * (1.0 + np.linalg.norm(v)):
        raise ArithmeticError(f"labor-value solve is inaccurate: residual {residual:.3g}")
    return v


def relative_prices(values: Sequence[float]) -> np.ndarray:
    """``ratio[i, j]``: units of good ``j`` one unit of good ``i`` exchanges for."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("values must be a vector of positive numbers")
    ratio = v[:, None] / v[None, :]
    np.fill_diagonal(ratio, 1.0)
    return ratio
