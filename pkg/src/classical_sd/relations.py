"""Complements, substitutes and urgency, decided over a finite set of scenarios.

Each relation is an implication between "demanded" (quantity > 0) and "not
demanded" across the scenarios observed:

* complements: i demanded exactly when k is demanded;
* substitutes: i and k are never demanded together;
* i more urgent than k: whenever i is not demanded, k is not demanded either.

Implications that hold only because their premise never occurs are flagged
as vacuous rather than silently counted.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from classical_sd.agents import Consumer

ScenarioId = Hashable


@dataclass(frozen=True)
class DemandProfile:
    commodity: Hashable
    observations: tuple[tuple[ScenarioId, float], ...]

    def __post_init__(self) -> None:
        obs = tuple((s, float(q)) for s, q in self.observations)
        ids = [s for s, _ in obs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"profile {self.commodity!r} repeats a scenario id")
        for s, q in obs:
            if q < 0:
                raise ValueError(f"profile {self.commodity!r}: negative quantity in scenario {s!r}")
        object.__setattr__(self, "observations", obs)

    @classmethod
    def from_list(cls, commodity: Hashable, quantities: Sequence[float]) -> "DemandProfile":
        """Profile over scenarios numbered 1, 2, ..."""
        return cls(commodity, tuple((s, q) for s, q in enumerate(quantities, start=1)))

    @property
    def scenarios(self) -> list[ScenarioId]:
        return [s for s, _ in self.observations]

    def as_dict(self) -> dict[ScenarioId, float]:
        return dict(self.observations)


def _aligned(i: DemandProfile, k: DemandProfile) -> list[tuple[ScenarioId, float, float]]:
    a, b = i.as_dict(), k.as_dict()
    if a.keys() != b.keys():
        only_i = sorted(map(str, a.keys() - b.keys()))
        only_k = sorted(map(str, b.keys() - a.keys()))
        raise ValueError(
            f"profiles {i.commodity!r} and {k.commodity!r} cover different scenarios: "
            f"only in {i.commodity!r}: {only_i}; only in {k.commodity!r}: {only_k}"
        )
    if not a:
        raise ValueError("profiles have no scenarios")
    return [(s, a[s], b[s]) for s in i.scenarios]


@dataclass(frozen=True)
class UrgencyResult:
    holds: bool
    counterexample: ScenarioId | None
    vacuous: bool

    def __bool__(self) -> bool:
        return self.holds


def urgency(i: DemandProfile, k: DemandProfile) -> UrgencyResult:
    """Does ``i`` come before ``k``: is k never demanded when i is not?"""
    rows = _aligned(i, k)
    premise = [s for s, di, dk in rows if di == 0]
    for s, di, dk in rows:
        if di == 0 and dk > 0:
            return UrgencyResult(False, s, False)
    return UrgencyResult(True, None, not premise)


@dataclass(frozen=True)
class PairRelation:
    pair: tuple[Hashable, Hashable]
    verdict: str
    witnesses: dict[str, list[ScenarioId]] = field(default_factory=dict)
    vacuous: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "pair": [str(x) for x in self.pair],
            "verdict": self.verdict,
            "witnesses": {key: [str(s) for s in val] for key, val in self.witnesses.items()},
            "vacuous": list(self.vacuous),
        }


def classify(i: DemandProfile, k: DemandProfile) -> PairRelation:
    rows = _aligned(i, k)
    both = [s for s, di, dk in rows if di > 0 and dk > 0]
    only_i = [s for s, di, dk in rows if di > 0 and dk == 0]
    only_k = [s for s, di, dk in rows if di == 0 and dk > 0]
    neither = [s for s, di, dk in rows if di == 0 and dk == 0]
    witnesses = {"both": both, "only_i": only_i, "only_k": only_k, "neither": neither}
    pair = (i.commodity, k.commodity)

    if both and not only_i and not only_k:
        return PairRelation(pair, "complements", witnesses)
    if not both and only_i and only_k:
        return PairRelation(pair, "substitutes", witnesses)

    i_first = urgency(i, k)
    k_first = urgency(k, i)
    notes = []
    if i_first.holds and i_first.vacuous:
        notes.append(f"{i.commodity} is never zero: '{i.commodity} more urgent' holds vacuously")
    if k_first.holds and k_first.vacuous:
        notes.append(f"{k.commodity} is never zero: '{k.commodity} more urgent' holds vacuously")
    if i_first.holds and not k_first.holds:
        verdict = "i-more-urgent"
    elif k_first.holds and not i_first.holds:
        verdict = "k-more-urgent"
    else:
        # both hold (identical zero patterns, never jointly positive) or neither holds
        verdict = "unclassified"
    return PairRelation(pair, verdict, witnesses, tuple(notes))


def intransitive_triples(profiles: Sequence[DemandProfile], relation: str) -> list[tuple]:
    """Triples (a, b, c) with a~b and b~c but not a~c, for a symmetric relation."""
    if relation not in ("complements", "substitutes"):
        raise ValueError("relation must be 'complements' or 'substitutes'")
    related = {}
    for a, b in itertools.combinations(range(len(profiles)), 2):
        r = classify(profiles[a], profiles[b]).verdict == relation
        related[a, b] = related[b, a] = r
    out = []
    for a, b, c in itertools.permutations(range(len(profiles)), 3):
        if a < c and related[a, b] and related[b, c] and not related[a, c]:
            out.append((profiles[a].commodity, profiles[b].commodity, profiles[c].commodity))
    return out


@dataclass(frozen=True)
class HierarchyReport:
    declared: list[dict]
    contradictions: list[dict]
    incomparable: list[dict]

    @property
    def consistent(self) -> bool:
        return not self.contradictions

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "declared": self.declared,
            "contradictions": self.contradictions,
            "incomparable": self.incomparable,
        }


def demand_profiles(consumer: Consumer, scenarios: Sequence[Sequence[float]],
                    names: Sequence[Hashable] | None = None) -> list[DemandProfile]:
    names = list(names) if names is not None else list(range(consumer.n_goods))
    rows = [consumer.demands(p) for p in scenarios]
    return [
        DemandProfile(names[g], tuple((s, rows[s][g]) for s in range(len(rows))))
        for g in range(consumer.n_goods)
    ]


def consistency_with_hierarchy(consumer: Consumer, scenarios: Sequence[Sequence[float]],
                               names: Sequence[Hashable] | None = None) -> HierarchyReport:
    """Check declared urgency (``hierarchy[i][k] == 1``) against behaviour.

    For every declared "k more urgent than i", the profiles generated over
    ``scenarios`` must satisfy urgency(k, i).  Pairs declared in neither
    direction are listed with whatever the behaviour shows.
    """
    profiles = demand_profiles(consumer, scenarios, names)
    n = consumer.n_goods
    declared, contradictions, incomparable = [], [], []
    for i in range(n):
        for k in range(n):
            if i == k or not consumer.hierarchy[i][k]:
                continue
            res = urgency(profiles[k], profiles[i])
            entry = {
                "more_urgent": str(profiles[k].commodity),
                "less_urgent": str(profiles[i].commodity),
                "holds": res.holds,
                "vacuous": res.vacuous,
                "counterexample": res.counterexample,
            }
            declared.append(entry)
            if not res.holds:
                contradictions.append(entry)
    for i, k in itertools.combinations(range(n), 2):
        if consumer.hierarchy[i][k] or consumer.hierarchy[k][i]:
            continue
        fwd, back = urgency(profiles[i], profiles[k]), urgency(profiles[k], profiles[i])
        incomparable.append({
            "pair": [str(profiles[i].commodity), str(profiles[k].commodity)],
            "forward_holds": fwd.holds,
            "backward_holds": back.holds,
            "vacuous": fwd.vacuous and back.vacuous,
        })
    return HierarchyReport(declared, contradictions, incomparable)


def read_profiles_csv(path) -> list[DemandProfile]:
    """Read rows of ``scenario,commodity,quantity`` into profiles (header required)."""
    by_good: dict[str, list[tuple[str, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"scenario", "commodity", "quantity"} - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for line, row in enumerate(reader, start=2):
            try:
                q = float(row["quantity"])
            except ValueError:
                raise ValueError(f"{path}:{line}: quantity is not a number: {row['quantity']!r}")
            by_good.setdefault(row["commodity"], []).append((row["scenario"], q))
    return [DemandProfile(good, tuple(obs)) for good, obs in by_good.items()]


def relation_table(profiles: Iterable[DemandProfile]) -> list[PairRelation]:
    profiles = list(profiles)
    return [classify(a, b) for a, b in itertools.combinations(profiles, 2)]


def profile_matrix(profiles: Mapping[Hashable, Sequence[float]]) -> list[DemandProfile]:
    return [DemandProfile.from_list(name, q) for name, q in profiles.items()]
