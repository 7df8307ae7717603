"""Exit criteria, one test per criterion at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py``; the summary prints one
PASS/FAIL line per criterion.
"""

import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from classical_sd.agents import Consumer
from classical_sd.aggregation import ExperimentConfig, run_convergence, run_convexity_emergence
from classical_sd.cli import main
from classical_sd.leontief import LeontiefEconomy, NonProductiveError, labor_values, productivity_check, relative_prices
from classical_sd.relations import consistency_with_hierarchy
from classical_sd.schedules import build_demand, build_supply, cross, max_surplus
from classical_sd.smooth import SmoothModel, model_demand, pyramidal_G, slope, triangular_G
from oracles import best_matching, crossing_by_enumeration, neumann_labor_values

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parents[1]
VMAX = 125.0


def test_ac01_closed_form_fidelity():
    assert abs(pyramidal_G(62.5, VMAX) - 0.25) <= 1e-12
    assert abs(triangular_G(62.5, 0, VMAX) - 0.5) <= 1e-12
    grid = np.linspace(0, VMAX, 126)
    pyr = np.array([pyramidal_G(p, VMAX) for p in grid])
    tri = np.array([triangular_G(p, 0, VMAX) for p in grid])
    assert np.max(np.abs(pyr - tri**2)) <= 1e-12


def test_ac02_boundary_fidelity():
    for model in (SmoothModel.triangular(VMAX, capacity=1000), SmoothModel.pyramidal(VMAX, capacity=1000)):
        assert model_demand(model, 0.0) == 1000.0
        assert model_demand(model, 125.0) == 0.0


def _population(rng, size):
    kind = rng.integers(0, 5)
    if kind == 0:
        return rng.uniform(0, 100, size)
    if kind == 1:
        return rng.exponential(20, size)
    if kind == 2:
        return rng.integers(0, 10, size).astype(float)  # heavy ties
    if kind == 3:
        return rng.lognormal(2, 1, size)
    return np.concatenate([rng.uniform(0, 50, size // 2), np.full(size - size // 2, 25.0)])


def test_ac03_weak_laws_by_construction():
    rng = np.random.default_rng(3)
    violations = 0
    for _ in range(10_000):
        units = _population(rng, int(rng.integers(1, 201)))
        d, s = build_demand(units), build_supply(units)
        pts = np.unique(np.concatenate([[0.0], units, units + 1e-9, [units.max() + 1]]))
        violations += int(np.any(np.diff(d(pts)) > 0)) + int(np.any(np.diff(s(pts)) < 0))
    assert violations == 0


def test_ac04_crossing_and_surplus_oracles():
    rng = np.random.default_rng(4)
    for i in range(1000):
        gen = (lambda k: rng.integers(0, 15, k).astype(float)) if i % 2 else (lambda k: rng.uniform(0, 15, k))
        values = gen(int(rng.integers(0, 13)))
        costs = gen(int(rng.integers(0, 13)))
        r = cross(build_demand(values), build_supply(costs))
        q, low, high = crossing_by_enumeration(values.tolist(), costs.tolist())
        assert r.quantity == q
        assert abs(r.price_low - low) <= 1e-12
        assert (r.price_high == high == math.inf) or abs(r.price_high - high) <= 1e-12
    for i in range(1000):
        values = rng.uniform(0, 20, int(rng.integers(0, 7)))
        costs = rng.uniform(0, 20, int(rng.integers(0, 7)))
        assert abs(max_surplus(values, costs) - best_matching(values.tolist(), costs.tolist())) <= 1e-9


def test_ac05_leontief():
    v = labor_values(LeontiefEconomy(np.zeros((2, 2)), [2, 1]))
    assert relative_prices(v)[0, 1] == 2.0
    rng = np.random.default_rng(5)
    for _ in range(500):
        n = int(rng.integers(1, 9))
        A = rng.uniform(0, 1, (n, n)) * (rng.uniform(size=(n, n)) < 0.6)
        rho = max(abs(np.linalg.eigvals(A)))
        if rho > 0:
            A *= rng.uniform(0, 0.9) / rho
        e = LeontiefEconomy(A, rng.uniform(0.1, 5, n))
        assert np.max(np.abs(labor_values(e) - neumann_labor_values(e.A, e.direct_labor))) <= 1e-10
    assert not productivity_check(np.eye(3)).productive
    with pytest.raises(NonProductiveError):
        labor_values(LeontiefEconomy(np.eye(3), [1, 1, 1]))


@pytest.mark.parametrize(
    "model",
    [
        SmoothModel.triangular(VMAX, capacity=1000),
        SmoothModel.pyramidal(VMAX, capacity=1000),
        SmoothModel.custom(lambda p: np.exp(-p / 50.0), 0, VMAX, capacity=1000),
        SmoothModel.triangular(10, low=2, capacity=800, side="supply"),
        SmoothModel.custom(lambda p: 1 + p, 2, 10, capacity=800, side="supply"),
    ],
    ids=["triangular", "pyramidal", "custom-demand", "uniform-supply", "custom-supply"],
)
def test_ac06_slope_vs_finite_differences(model):
    h = 1e-5 * (model.high - model.low)
    rng = np.random.default_rng(6)
    for p in rng.uniform(model.low + h, model.high - h, 100):
        fd = (model.schedule(p + h) - model.schedule(p - h)) / (2 * h)
        exact = slope(model, p)
        assert abs(exact - fd) / abs(exact) < 1e-6


def test_ac07_smoothing_convergence():
    start = time.perf_counter()
    cfg = ExperimentConfig(SmoothModel.pyramidal(VMAX), (100, 1000, 10_000), replications=30, base_seed=7)
    rep = run_convergence(cfg)
    elapsed = time.perf_counter() - start
    means = rep.mean_ks()
    assert means[0] > means[1] > means[2]
    big = [r["ks"] for r in rep.records if r["size"] == 10_000]
    assert sum(k > 0.05 for k in big) == 0
    assert elapsed < 30


def test_ac08_convexity_emergence_and_limits():
    pyr = run_convexity_emergence(ExperimentConfig(SmoothModel.pyramidal(VMAX, capacity=1000), (100_000,), base_seed=8))
    assert min(pyr.second_differences) >= -1e-9 * 1000
    assert pyr.convex and pyr.verdict == "convex"
    rev_model = SmoothModel.custom(lambda p: p, 0, VMAX, capacity=1000)
    rev = run_convexity_emergence(ExperimentConfig(rev_model, (100_000,), base_seed=8))
    assert rev.verdict == "not-convex" and rev.nonconvex_regions


def _random_consumer(rng, n):
    rank = rng.permutation(n)
    rel = np.zeros((n, n), dtype=int)
    for i in range(n):
        for k in range(n):
            if rank[k] < rank[i] and rng.uniform() < 0.7:
                rel[i, k] = 1
    for _ in range(n):
        rel = ((rel + rel @ rel) > 0).astype(int)
    return Consumer(wealth=float(rng.uniform(0, 60)), hierarchy=tuple(map(tuple, rel)))


def test_ac09_relations_never_contradict_hierarchy():
    rng = np.random.default_rng(9)
    contradictions = 0
    for _ in range(200):
        consumer = _random_consumer(rng, 3)
        scenarios = rng.uniform(0, 30, (50, 3)).tolist()
        contradictions += len(consistency_with_hierarchy(consumer, scenarios).contradictions)
    assert contradictions == 0


def _digest(paths):
    return [hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in paths]


def test_ac10_determinism(tmp_path):
    sc = ROOT / "scenarios"
    (tmp_path / "A.csv").write_text("0,0\n0.5,0\n")
    (tmp_path / "l.csv").write_text("1,1\n")
    (tmp_path / "p.csv").write_text("scenario,commodity,quantity\n1,a,1\n1,b,0\n2,a,0\n2,b,1\n")
    small = tmp_path / "exp.json"
    small.write_text('{"smooth": {"high": 125}, "experiment": {"sizes": [100, 1000], "replications": 4, "seed": 3}}')
    commands = [
        (["schedule", str(sc / "agents.json")], ["out"]),
        (["schedule", str(sc / "discrete.json"), "--format", "json"], ["out"]),
        (["equilibrium", str(sc / "agents.json")], ["out"]),
        (["smooth", "--family", "pyramidal", "--vmax", "125", "--grid", "0:125:1"], ["out"]),
        (["leontief", "--matrix", str(tmp_path / "A.csv"), "--labor", str(tmp_path / "l.csv")], ["out"]),
        (["aggregate", str(small), "--seed", "11"], ["out", "out.csv"]),
        (["relations", "--profiles", str(tmp_path / "p.csv")], ["out"]),
    ]
    for args, outputs in commands:
        digests = []
        for attempt in range(2):
            d = tmp_path / f"{args[0]}-{attempt}"
            d.mkdir(exist_ok=True)
            extra = ["--out", str(d / "out")]
            if args[0] == "aggregate":
                extra += ["--csv", str(d / "out.csv")]
            assert main(args + extra) == 0
            texts = [(d / name).read_text() for name in outputs]
            assert all(t.endswith("\n") for t in texts)
            digests.append(_digest(d / name for name in outputs))
        assert digests[0] == digests[1], args[0]
