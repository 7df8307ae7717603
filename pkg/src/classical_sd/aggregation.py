"""Monte Carlo experiments: finite markets drawn from a smooth model.

Each replication draws ``n`` values (or costs) from the model, builds the
exact step schedule and measures its sup-norm distance to the model on a
price grid.  Seeds come from :func:`derive_seed`, so any replication can be
recomputed on its own and replications may run in any order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Sequence

import numpy as np

from classical_sd.schedules import StepSchedule
from classical_sd.smooth import (
    CONVEXITY_TOL,
    SmoothModel,
    classify_curvature,
    sample_array,
    second_differences,
)

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of Steele, Lea and Flood's SplitMix64 output function."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base: int, n: int, r: int) -> int:
    """Seed for replication ``r`` at population size ``n``.

    SplitMix64 is folded over the three integers, each reduced modulo 2**64:
    ``h = sm(base); h = sm(h ^ n); h = sm(h ^ r)``.
    """
    h = splitmix64(base & _MASK)
    h = splitmix64(h ^ (n & _MASK))
    return splitmix64(h ^ (r & _MASK))


def dkw_bound(n: int, eps: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz bound on P(KS > eps) for a sample of size ``n``."""
    return min(1.0, 2.0 * math.exp(-2.0 * n * eps * eps))


@dataclass(frozen=True)
class ExperimentConfig:
    model: SmoothModel
    sizes: tuple[int, ...]
    replications: int = 1
    base_seed: int = 0
    grid: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes:
            raise ValueError("at least one population size is required")
        if any(n < 1 for n in sizes):
            raise ValueError("population sizes must be >= 1")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"population sizes must be strictly increasing, got {list(sizes)}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        grid = tuple(float(p) for p in self.grid) or default_grid(self.model)
        if any(p < 0 or not math.isfinite(p) for p in grid):
            raise ValueError("grid prices must be finite and >= 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "grid", grid)


def default_grid(model: SmoothModel, points: int = 1001) -> tuple[float, ...]:
    """Evenly spaced prices from 0 to 5% past the top of the support."""
    top = model.high + 0.05 * (model.high - model.low)
    return tuple(float(p) for p in np.linspace(0.0, top, points))


def is_monotone(s: StepSchedule) -> bool:
    """Check the schedule's direction at every breakpoint and just past the last one."""
    if s.units.size == 0:
        return True
    pts = np.unique(np.concatenate([s.units[s.units >= 0], [0.0, s.units[-1] + 1.0]]))
    q = s(pts)
    steps = np.diff(q)
    return bool(np.all(steps <= 0) if s.side == "demand" else np.all(steps >= 0))


def ks_distance(s: StepSchedule, model: SmoothModel, grid: Sequence[float]) -> float:
    n = s.units.size
    if n == 0:
        raise ValueError("cannot normalize an empty schedule")
    x = np.asarray(grid, dtype=float)
    empirical = s(x) / n
    return float(np.max(np.abs(empirical - model.normalized(x))))


def _build(model: SmoothModel, values: np.ndarray) -> StepSchedule:
    return StepSchedule(model.side, values)


@dataclass(frozen=True)
class ConvergenceReport:
    records: list[dict]
    summary: list[dict]
    base_seed: int

    def to_dict(self) -> dict:
        return {"base_seed": self.base_seed, "summary": self.summary, "replications": self.records}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "replication", "ks"])
        for rec in self.records:
            w.writerow([rec["size"], rec["replication"], repr(rec["ks"])])
        return buf.getvalue()

    def mean_ks(self) -> list[float]:
        return [row["mean_ks"] for row in self.summary]


def _replicate(cfg: ExperimentConfig, n: int, r: int) -> dict:
    seed = derive_seed(cfg.base_seed, n, r)
    sched = _build(cfg.model, sample_array(cfg.model, n, seed))
    return {
        "size": n,
        "replication": r,
        "seed": seed,
        "ks": ks_distance(sched, cfg.model, cfg.grid),
        "monotone": is_monotone(sched),
    }


def run_convergence(cfg: ExperimentConfig, workers: int = 1) -> ConvergenceReport:
    jobs = [(n, r) for n in cfg.sizes for r in range(cfg.replications)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: _replicate(cfg, *job), jobs))
    else:
        records = [_replicate(cfg, n, r) for n, r in jobs]
    records.sort(key=lambda rec: (rec["size"], rec["replication"]))
    summary = []
    for n in cfg.sizes:
        ks = [rec["ks"] for rec in records if rec["size"] == n]
        summary.append({
            "size": n,
            "mean_ks": math.fsum(ks) / len(ks),
            "max_ks": max(ks),
            "all_monotone": all(rec["monotone"] for rec in records if rec["size"] == n),
        })
    return ConvergenceReport(records, summary, cfg.base_seed)


@dataclass(frozen=True)
class EmergenceReport:
    size: int
    seed: int
    bin_width: float
    stencil_bins: int
    centers: list[float]
    second_differences: list[float]
    standard_errors: list[float]
    critical_z: float
    verdict: str
    model_verdict: str
    density_nonincreasing: bool
    nonconvex_regions: list[list[float]] = field(default_factory=list)

    @property
    def convex(self) -> bool:
        return self.verdict != "not-convex"

    @property
    def agrees_with_model(self) -> bool:
        return self.convex == self.density_nonincreasing

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "seed": self.seed,
            "bin_width": self.bin_width,
            "stencil_bins": self.stencil_bins,
            "critical_z": self.critical_z,
            "verdict": self.verdict,
            "convex": self.convex,
            "model_verdict": self.model_verdict,
            "density_nonincreasing": self.density_nonincreasing,
            "agrees_with_model": self.agrees_with_model,
            "min_second_difference": min(self.second_differences) if self.second_differences else 0.0,
            "nonconvex_regions": self.nonconvex_regions,
            "points": [
                {"price": p, "second_difference": d, "standard_error": s}
                for p, d, s in zip(self.centers, self.second_differences, self.standard_errors)
            ],
        }


def run_convexity_emergence(cfg: ExperimentConfig, alpha: float = 0.01,
                            stencil_bins: int | None = None) -> EmergenceReport:
    """Curvature of the empirical demand at the largest configured size.

    Draws are binned with width ``support / sqrt(n)``; demand is read at the
    bin edges and second differences are taken across ``stencil_bins`` bins on
    each side (default: the square root of the bin count).  A second
    difference counts as negative or positive only when it clears a
    Bonferroni-corrected ``z`` multiple of its sampling standard error, so
    sampling noise on an affine demand is not mistaken for curvature.
    """
    model = cfg.model
    if model.side != "demand":
        raise ValueError("convexity emergence is defined for demand models")
    n = cfg.sizes[-1]
    seed = derive_seed(cfg.base_seed, n, 0)
    values = np.sort(sample_array(model, n, seed))

    nbins = max(2, math.ceil(math.sqrt(n)))
    edges = np.linspace(model.low, model.high, nbins + 1)
    lag = stencil_bins or max(1, round(math.sqrt(nbins)))
    if 2 * lag > nbins:
        raise ValueError(f"stencil of {lag} bins does not fit in {nbins} bins")
    counts_above = values.size - np.searchsorted(values, edges, side="left")
    demand = model.capacity * counts_above / n

    centers = np.arange(lag, nbins - lag + 1)
    d2 = demand[centers - lag] - 2 * demand[centers] + demand[centers + lag]
    p_left = (counts_above[centers - lag] - counts_above[centers]) / n
    p_right = (counts_above[centers] - counts_above[centers + lag]) / n
    var = (p_left + p_right - (p_left - p_right) ** 2) / n
    se = model.capacity * np.sqrt(np.maximum(var, 0.0))
    z = NormalDist().inv_cdf(1.0 - alpha / (2 * centers.size))
    tol = CONVEXITY_TOL * model.capacity
    band = z * se + tol

    neg = d2 < -band
    pos = d2 > band
    if neg.any():
        verdict = "not-convex"
    elif pos.any():
        verdict = "convex"
    else:
        verdict = "affine"

    regions: list[list[float]] = []
    for j in np.flatnonzero(neg):
        lo, hi = float(edges[centers[j] - lag]), float(edges[centers[j] + lag])
        if regions and lo <= regions[-1][1]:
            regions[-1][1] = hi
        else:
            regions.append([lo, hi])

    stencil_grid = edges[::lag] if nbins % lag == 0 else np.append(edges[::lag], edges[-1])
    model_d2 = second_differences(stencil_grid, model.schedule(stencil_grid))
    return EmergenceReport(
        size=n,
        seed=seed,
        bin_width=float(edges[1] - edges[0]),
        stencil_bins=lag,
        centers=[float(x) for x in edges[centers]],
        second_differences=[float(x) for x in d2],
        standard_errors=[float(x) for x in se],
        critical_z=z,
        verdict=verdict,
        model_verdict=classify_curvature(model_d2, tol),
        density_nonincreasing=model.density_nonincreasing(),
        nonconvex_regions=regions,
    )
