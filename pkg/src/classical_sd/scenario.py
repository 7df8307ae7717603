"""Scenario files: one JSON document drives every subcommand.

Top-level keys (all optional, see ``docs/scenario.md``)::

    commodities  list of {"id", "name", "focal"}; exactly one focal entry
    prices       {commodity id: price} for every non-focal commodity
    buyers       {"values": [...]} or {"agents": [{"wealth", "hierarchy", "units"}]}
    sellers      {"costs": [...]}  or {"agents": [{"recipe", "units"}]}
    smooth       {"side", "family", "low", "high", "capacity", "power", "density"}
    leontief     {"matrix", "labor", "goods"}
    experiment   {"sizes", "replications", "seed", "grid"}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from classical_sd.agents import unit_cost, valuation
from classical_sd.aggregation import ExperimentConfig
from classical_sd.leontief import LeontiefEconomy
from classical_sd.smooth import SmoothModel

_TOP_KEYS = {"commodities", "prices", "buyers", "sellers", "smooth", "leontief", "experiment", "description"}


class ScenarioError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass
class Scenario:
    commodities: list[str]
    names: dict[str, str]
    focal: str
    prices: np.ndarray
    values: list[float] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    smooth: SmoothModel | None = None
    leontief: LeontiefEconomy | None = None
    goods: list[str] = field(default_factory=list)
    experiment: dict | None = None

    def experiment_config(self, seed: int | None = None) -> ExperimentConfig:
        if self.experiment is None:
            raise ScenarioError("experiment", "scenario has no experiment block")
        if self.smooth is None:
            raise ScenarioError("smooth", "an experiment needs a smooth model block")
        exp = self.experiment
        return ExperimentConfig(
            model=self.smooth,
            sizes=tuple(exp["sizes"]),
            replications=exp["replications"],
            base_seed=exp["seed"] if seed is None else seed,
            grid=tuple(exp["grid"]),
        )


def _number(path: str, x: Any, *, nonnegative: bool = False) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ScenarioError(path, f"expected a finite number, got {x!r}")
    if nonnegative and x < 0:
        raise ScenarioError(path, f"must be >= 0, got {x!r}")
    return float(x)


def _int(path: str, x: Any, *, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise ScenarioError(path, f"expected an integer >= {minimum}, got {x!r}")
    return x


def _list(path: str, x: Any) -> list:
    if not isinstance(x, list):
        raise ScenarioError(path, f"expected a list, got {type(x).__name__}")
    return x


def _obj(path: str, x: Any, allowed: set[str]) -> dict:
    if not isinstance(x, dict):
        raise ScenarioError(path, f"expected an object, got {type(x).__name__}")
    extra = sorted(set(x) - allowed)
    if extra:
        raise ScenarioError(f"{path}.{extra[0]}" if path else extra[0], "unknown field")
    return x


def _vector(path: str, x: Any, n: int, *, nonnegative: bool = False) -> list[float]:
    items = _list(path, x)
    if len(items) != n:
        raise ScenarioError(path, f"dimension mismatch: has length {len(items)}, commodity list has length {n}")
    return [_number(f"{path}[{i}]", v, nonnegative=nonnegative) for i, v in enumerate(items)]


def _one_side(path: str, block: Any, direct_key: str) -> dict:
    block = _obj(path, block, {direct_key, "agents"})
    if (direct_key in block) == ("agents" in block):
        raise ScenarioError(path, f"give exactly one of '{direct_key}' or 'agents'")
    return block


def _commodities(data: dict) -> tuple[list[str], dict[str, str], str]:
    if "commodities" not in data:
        return ["good"], {"good": "good"}, "good"
    ids, names, focal = [], {}, []
    for i, entry in enumerate(_list("commodities", data["commodities"])):
        p = f"commodities[{i}]"
        entry = _obj(p, entry, {"id", "name", "focal"})
        cid = entry.get("id")
        if not isinstance(cid, str) or not cid:
            raise ScenarioError(f"{p}.id", "expected a non-empty string")
        if cid in names:
            raise ScenarioError(f"{p}.id", f"duplicate commodity id {cid!r}")
        ids.append(cid)
        names[cid] = str(entry.get("name", cid))
        flag = entry.get("focal", False)
        if not isinstance(flag, bool):
            raise ScenarioError(f"{p}.focal", "expected true or false")
        if flag:
            focal.append(cid)
    if len(focal) != 1:
        raise ScenarioError("commodities", f"exactly one commodity must be focal, found {len(focal)}: {focal}")
    return ids, names, focal[0]


def _polynomial_density(path: str, coeffs: Any):
    cs = [_number(f"{path}[{i}]", c) for i, c in enumerate(_list(path, coeffs))]
    if not cs:
        raise ScenarioError(path, "density needs at least one coefficient")
    poly = np.polynomial.Polynomial(cs)
    return lambda p: poly(np.asarray(p, dtype=float))


def parse_smooth(block: Any, path: str = "smooth") -> SmoothModel:
    block = _obj(path, block, {"side", "family", "low", "high", "capacity", "power", "density"})
    side = block.get("side", "demand")
    family = block.get("family", "pyramidal")
    if "high" not in block:
        raise ScenarioError(f"{path}.high", "missing required field")
    low = _number(f"{path}.low", block.get("low", 0.0), nonnegative=True)
    high = _number(f"{path}.high", block["high"])
    capacity = _number(f"{path}.capacity", block.get("capacity", 1.0))
    power = _number(f"{path}.power", block.get("power", 2.0))
    density = None
    if family == "custom":
        if "density" not in block:
            raise ScenarioError(f"{path}.density", "a custom family needs polynomial density coefficients")
        density = _polynomial_density(f"{path}.density", block["density"])
    elif "density" in block:
        raise ScenarioError(f"{path}.density", "only the custom family takes a density")
    try:
        return SmoothModel(side, family, low, high, capacity, power=power, density=density)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from exc


def grid_from_spec(path: str, spec: Any) -> list[float]:
    """A grid is a list of prices or {"start", "stop", "step"|"num"}, stop inclusive."""
    if isinstance(spec, list):
        return [_number(f"{path}[{i}]", x, nonnegative=True) for i, x in enumerate(spec)]
    spec = _obj(path, spec, {"start", "stop", "step", "num"})
    start = _number(f"{path}.start", spec.get("start", 0.0), nonnegative=True)
    stop = _number(f"{path}.stop", spec.get("stop"))
    if "num" in spec:
        num = _int(f"{path}.num", spec["num"], minimum=2)
        return [float(x) for x in np.linspace(start, stop, num)]
    step = _number(f"{path}.step", spec.get("step"))
    return arange_inclusive(start, stop, step)


def arange_inclusive(start: float, stop: float, step: float) -> list[float]:
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {start}:{stop}:{step}")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(count)]


def parse_scenario_data(data: Any) -> Scenario:
    data = _obj("", data, _TOP_KEYS)
    ids, names, focal = _commodities(data)
    n = len(ids)

    prices = np.zeros(n)
    given = _obj("prices", data.get("prices", {}), set(ids))
    if focal in given:
        raise ScenarioError(f"prices.{focal}", "the focal commodity's price is what the market sets")
    for cid, p in given.items():
        prices[ids.index(cid)] = _number(f"prices.{cid}", p, nonnegative=True)
    focal_idx = ids.index(focal)

    def need_prices(path: str) -> None:
        missing = [c for c in ids if c != focal and c not in given]
        if missing:
            raise ScenarioError(path, f"agents need prices for non-focal commodities {missing}")

    values: list[float] = []
    if "buyers" in data:
        b = _one_side("buyers", data["buyers"], "values")
        if "values" in b:
            values = [_number(f"buyers.values[{i}]", v) for i, v in enumerate(_list("buyers.values", b["values"]))]
        else:
            need_prices("buyers.agents")
            for i, agent in enumerate(_list("buyers.agents", b["agents"])):
                p = f"buyers.agents[{i}]"
                agent = _obj(p, agent, {"wealth", "hierarchy", "units"})
                w = _number(f"{p}.wealth", agent.get("wealth"), nonnegative=True)
                h = _vector(f"{p}.hierarchy", agent.get("hierarchy"), n)
                for k, x in enumerate(h):
                    if x not in (0.0, 1.0):
                        raise ScenarioError(f"{p}.hierarchy[{k}]", f"must be 0 or 1, got {x!r}")
                if h[focal_idx]:
                    raise ScenarioError(f"{p}.hierarchy[{focal_idx}]", "a good is not more urgent than itself")
                units = _int(f"{p}.units", agent.get("units", 1))
                values.extend([valuation(w, h, prices)] * units)

    costs: list[float] = []
    if "sellers" in data:
        s = _one_side("sellers", data["sellers"], "costs")
        if "costs" in s:
            costs = [_number(f"sellers.costs[{i}]", c, nonnegative=True)
                     for i, c in enumerate(_list("sellers.costs", s["costs"]))]
        else:
            need_prices("sellers.agents")
            for i, agent in enumerate(_list("sellers.agents", s["agents"])):
                p = f"sellers.agents[{i}]"
                agent = _obj(p, agent, {"recipe", "units"})
                a = _vector(f"{p}.recipe", agent.get("recipe"), n, nonnegative=True)
                if a[focal_idx]:
                    raise ScenarioError(f"{p}.recipe[{focal_idx}]", "a recipe cannot use the focal good, whose price is not given")
                units = _int(f"{p}.units", agent.get("units", 1))
                costs.extend([unit_cost(a, prices)] * units)

    smooth = parse_smooth(data["smooth"]) if "smooth" in data else None

    leontief, goods = None, []
    if "leontief" in data:
        block = _obj("leontief", data["leontief"], {"matrix", "labor", "goods"})
        rows = _list("leontief.matrix", block.get("matrix"))
        labor = _list("leontief.labor", block.get("labor"))
        m = len(labor)
        matrix = [_vector(f"leontief.matrix[{i}]", r, m, nonnegative=True) for i, r in enumerate(rows)]
        if len(matrix) != m:
            raise ScenarioError("leontief.matrix", f"dimension mismatch: has {len(matrix)} rows, labor has length {m}")
        labor_v = [_number(f"leontief.labor[{i}]", x, nonnegative=True) for i, x in enumerate(labor)]
        goods = [str(g) for g in block.get("goods", [f"good{i + 1}" for i in range(m)])]
        if len(goods) != m:
            raise ScenarioError("leontief.goods", f"dimension mismatch: has length {len(goods)}, labor has length {m}")
        try:
            leontief = LeontiefEconomy(np.array(matrix).reshape(m, m), np.array(labor_v))
        except ValueError as exc:
            raise ScenarioError("leontief", str(exc)) from exc

    experiment = None
    if "experiment" in data:
        block = _obj("experiment", data["experiment"], {"sizes", "replications", "seed", "grid"})
        sizes = [_int(f"experiment.sizes[{i}]", x, minimum=1)
                 for i, x in enumerate(_list("experiment.sizes", block.get("sizes")))]
        if not sizes:
            raise ScenarioError("experiment.sizes", "at least one size is required")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ScenarioError("experiment.sizes", "sizes must be strictly increasing")
        experiment = {
            "sizes": sizes,
            "replications": _int("experiment.replications", block.get("replications", 1), minimum=1),
            "seed": _int("experiment.seed", block.get("seed", 0)),
            "grid": grid_from_spec("experiment.grid", block["grid"]) if "grid" in block else [],
        }

    return Scenario(
        commodities=ids,
        names=names,
        focal=focal,
        prices=prices,
        values=values,
        costs=costs,
        smooth=smooth,
        leontief=leontief,
        goods=goods,
        experiment=experiment,
    )


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read scenario: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return parse_scenario_data(data)
