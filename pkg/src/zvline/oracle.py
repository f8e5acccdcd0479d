"""Exhaustive search for beneficial group deviations.

A coalition C of agents replaces its ballots by a multiset A.  The
deviation is beneficial when every member, judged at its true location,
is weakly closer to the new facility and some member is strictly closer.
The search enumerates every true profile, coalition and replacement up
to the configured caps, in a fixed canonical order, so reports are
reproducible.

Anonymous mechanisms are audited over multisets: profiles and
replacements as sorted index tuples, coalitions as sub-multisets.  The
dictator is audited over raw ballot sequences.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidParameters
from .graph import Graph
from .mechanisms import FStar, Mechanism, saturation_checks
from .preference import pareto_mask

DEFAULT_BUDGET = 10**8


class PropertyClass(enum.Enum):
    MISREPORT = "Misreport"
    ABSTENTION = "Abstention"
    FALSENAME = "FalseName"
    GROUP = "Group"

    @classmethod
    def parse(cls, text: str) -> "PropertyClass":
        key = text.strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise InvalidParameters(f"unknown property class {text!r}")


def classify(coalition_size: int, replacement_size: int) -> PropertyClass:
    """Most specific class of a deviation with the given shape."""
    if coalition_size == 1:
        if replacement_size == 0:
            return PropertyClass.ABSTENTION
        if replacement_size == 1:
            return PropertyClass.MISREPORT
        return PropertyClass.FALSENAME
    return PropertyClass.GROUP


def _admits(classes: frozenset[PropertyClass], coalition_size: int, replacement_size: int) -> bool:
    return PropertyClass.GROUP in classes or classify(coalition_size, replacement_size) in classes


@dataclass(frozen=True)
class DeviationQuery:
    """A true ballot sequence, a coalition given by agent positions, and replacement ballots."""

    true_profile: tuple[str, ...]
    coalition: tuple[int, ...]
    replacement: tuple[str, ...]
    property_class: PropertyClass | None = None

    def __post_init__(self):
        object.__setattr__(self, "true_profile", tuple(self.true_profile))
        object.__setattr__(self, "coalition", tuple(self.coalition))
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if len(set(self.coalition)) != len(self.coalition):
            raise InvalidParameters("coalition lists an agent twice")
        if any(not 0 <= i < len(self.true_profile) for i in self.coalition):
            raise InvalidParameters("coalition refers to an agent outside the profile")
        natural = classify(len(self.coalition), len(self.replacement))
        if self.property_class is None:
            object.__setattr__(self, "property_class", natural)
        elif self.property_class is not PropertyClass.GROUP and self.property_class is not natural:
            raise InvalidParameters(
                f"{self.property_class.value} query has |C|={len(self.coalition)} and |A|={len(self.replacement)}"
            )

    @classmethod
    def of(
        cls,
        true_profile: Sequence[str],
        coalition: Sequence[str],
        replacement: Sequence[str],
        property_class: PropertyClass | None = None,
    ) -> "DeviationQuery":
        """Build a query naming coalition members by location (first unused agent at each)."""
        positions = []
        for loc in coalition:
            for i, b in enumerate(true_profile):
                if b == loc and i not in positions:
                    positions.append(i)
                    break
            else:
                raise InvalidParameters(f"coalition member at {loc!r} is not in the profile")
        return cls(tuple(true_profile), tuple(sorted(positions)), tuple(replacement), property_class)

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(self.true_profile[i] for i in self.coalition)

    def deviated_profile(self) -> tuple[str, ...]:
        return apply_deviation(self.true_profile, self.coalition, self.replacement)


def apply_deviation(x: Sequence, coalition: Sequence[int], replacement: Sequence) -> tuple:
    """Replace the coalition's ballots by `replacement`.

    Coalition slots are refilled in order, surplus replacement ballots are
    appended and unfilled slots dropped, so agents outside the coalition
    keep their relative positions.
    """
    out = list(x)
    slots = sorted(coalition)
    fill = list(replacement)
    for slot, ballot in zip(slots, fill):
        out[slot] = ballot
    gone = set(slots[len(fill) :])
    kept = [b for i, b in enumerate(out) if i not in gone]
    return tuple(kept + fill[len(slots) :])


@dataclass(frozen=True)
class Counterexample:
    query: DeviationQuery
    outcome_before: str
    outcome_after: str
    # (true location, distance before, distance after) per coalition member
    member_deltas: tuple[tuple[str, int, int], ...]

    @property
    def property_class(self) -> PropertyClass:
        return classify(len(self.query.coalition), len(self.query.replacement))

    def record(self) -> str:
        q = self.query
        deltas = " ".join(f"{loc}:{a}->{b}" for loc, a, b in self.member_deltas)
        return (
            f"counterexample class={self.property_class.value} profile={','.join(q.true_profile)} "
            f"coalition={','.join(q.members)} A={','.join(q.replacement) or '-'} "
            f"before={self.outcome_before} after={self.outcome_after} deltas={deltas}"
        )


@dataclass(frozen=True)
class CertificationConfig:
    max_agents: int = 3
    ballot_cap: int = 3
    tau_list: tuple[int, ...] = (1, 2, 3)
    property_classes: frozenset[PropertyClass] = frozenset({PropertyClass.GROUP})
    budget: int = DEFAULT_BUDGET
    jobs: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "property_classes", frozenset(self.property_classes))
        object.__setattr__(self, "tau_list", tuple(self.tau_list))
        if self.max_agents < 1:
            raise InvalidParameters("max_agents must be at least 1")
        if self.ballot_cap < 0:
            raise InvalidParameters("ballot_cap must be non-negative")
        if not self.property_classes:
            raise InvalidParameters("no property class requested")
        if any(t < 1 for t in self.tau_list):
            raise InvalidParameters("saturation multiplicities must be positive")


@dataclass
class CertificationReport:
    certified: bool
    counterexamples: list[Counterexample]
    search_space_size: int
    duration: float
    violation_count: int = 0
    property_failures: list[str] = field(default_factory=list)
    properties_checked: list[str] = field(default_factory=list)
    mechanism: str = ""

    @property
    def ok(self) -> bool:
        return self.certified and not self.property_failures

    def lines(self) -> list[str]:
        out = [c.record() for c in self.counterexamples]
        out.extend(f"property-failure {f}" for f in self.property_failures)
        verdict = "certified" if self.certified else "not certified"
        out.append(
            f"summary mechanism={self.mechanism} verdict={verdict} counterexamples={len(self.counterexamples)} "
            f"violations={self.violation_count} searched={self.search_space_size} "
            f"properties={','.join(self.properties_checked) or '-'} "
            f"property_failures={len(self.property_failures)} seconds={self.duration:.2f}"
        )
        return out


# -- canonical enumeration ------------------------------------------------------


def multisets(n_vertices: int, size: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations_with_replacement(range(n_vertices), size)


def sub_multisets(x: Sequence[int], *, include_empty: bool = False) -> list[tuple[int, ...]]:
    """Distinct sub-multisets of a sorted tuple, by size then lexicographically."""
    counts = sorted(Counter(x).items())
    subs = set()
    for choice in itertools.product(*(range(c + 1) for _, c in counts)):
        sub = tuple(v for (v, _), k in zip(counts, choice) for _ in range(k))
        if sub or include_empty:
            subs.add(sub)
    return sorted(subs, key=lambda s: (len(s), s))


def _multiset_count(n_vertices: int, size: int) -> int:
    return math.comb(n_vertices + size - 1, size)


def dedupe_search_space(cfg: CertificationConfig, g: Graph) -> Iterator[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]]:
    """Every anonymity class of (true profile, coalition, replacement) in canonical order.

    Coalitions are non-empty sub-multisets; only shapes admitted by the
    requested property classes are yielded.
    """
    names = g.vertices
    for n in range(1, cfg.max_agents + 1):
        for x in multisets(len(g), n):
            for c in sub_multisets(x):
                for s in range(cfg.ballot_cap + 1):
                    if not _admits(cfg.property_classes, len(c), s):
                        continue
                    for a in multisets(len(g), s):
                        yield (
                            tuple(names[i] for i in x),
                            tuple(names[i] for i in c),
                            tuple(names[i] for i in a),
                        )


def search_space_size(cfg: CertificationConfig, g: Graph, *, anonymous: bool = True) -> int:
    """Number of (profile, coalition, replacement) triples the sweep examines."""
    nv = len(g)
    total = 0
    if anonymous:
        size_counts = [_multiset_count(nv, s) for s in range(cfg.ballot_cap + 1)]
        for n in range(1, cfg.max_agents + 1):
            for x in multisets(nv, n):
                for c in sub_multisets(x):
                    total += sum(k for s, k in enumerate(size_counts) if _admits(cfg.property_classes, len(c), s))
        return total
    size_counts = [nv**s for s in range(cfg.ballot_cap + 1)]
    for n in range(1, cfg.max_agents + 1):
        for csize in range(1, n + 1):
            per = sum(k for s, k in enumerate(size_counts) if _admits(cfg.property_classes, csize, s))
            total += nv**n * math.comb(n, csize) * per
    return total


# -- evaluation -------------------------------------------------------------------


class _Evaluator:
    """Memoised outcome lookup over vertex-index ballots."""

    def __init__(self, m: Mechanism):
        self.m = m
        self.cache: dict = {}
        self.by_support = m.support_only

    def __call__(self, ballots: Sequence[int]) -> int | None:
        """Outcome index, or None when the mechanism is undefined on an empty profile."""
        if not ballots and not self.m.accepts_empty:
            return None
        if self.by_support:
            key = 0
            for b in ballots:
                key |= 1 << b
        else:
            key = tuple(sorted(ballots))
        got = self.cache.get(key)
        if got is None:
            got = self.m.choose(key if not self.by_support else tuple(ballots))
            self.cache[key] = got
        return got


def check_deviation(g: Graph, m: Mechanism, q: DeviationQuery) -> Counterexample | None:
    """Evaluate one deviation; a Counterexample iff it is beneficial for the coalition."""
    if not q.coalition:
        return None
    if not q.deviated_profile() and not m.accepts_empty:
        return None  # outcome undefined, nothing to prefer
    before = m(list(q.true_profile))
    after = m(list(q.deviated_profile()))
    deltas = tuple((loc, g.distance(loc, before), g.distance(loc, after)) for loc in q.members)
    if all(b <= a for _, a, b in deltas) and any(b < a for _, a, b in deltas):
        return Counterexample(q, before, after, deltas)
    return None


def _reachable(ev: _Evaluator, rest: tuple[int, ...], nv: int, cap: int):
    """For each replacement size, outcome -> (first replacement in lex order, how many reach it)."""
    table = []
    for s in range(cap + 1):
        found: dict[int, list] = {}
        for a in multisets(nv, s):
            o = ev(rest + a)
            if o is None:
                continue
            slot = found.get(o)
            if slot is None:
                found[o] = [a, 1]
            else:
                slot[1] += 1
        table.append(found)
    return table


def _anonymous_chunk(m: Mechanism, cfg: CertificationConfig, profiles: list[tuple[int, ...]], stop_at_first: bool):
    g = m.graph
    nv = len(g)
    dist = g.distance_table
    ev = _Evaluator(m)
    reach_cache: dict[tuple[int, ...], list] = {}
    found: list[Counterexample] = []
    violations = 0
    for x in profiles:
        before = ev(x)
        for c in sub_multisets(x):
            sizes = [s for s in range(cfg.ballot_cap + 1) if _admits(cfg.property_classes, len(c), s)]
            if not sizes:
                continue
            rest_counter = Counter(x)
            rest_counter.subtract(c)
            rest = tuple(sorted(rest_counter.elements()))
            table = reach_cache.get(rest)
            if table is None:
                table = reach_cache[rest] = _reachable(ev, rest, nv, cfg.ballot_cap)
            members = sorted(set(c))
            d_before = [dist[v][before] for v in members]
            first = None
            for s in sizes:
                for o, (a, count) in table[s].items():
                    d_after = [dist[v][o] for v in members]
                    if all(b <= a_ for a_, b in zip(d_before, d_after)) and any(
                        b < a_ for a_, b in zip(d_before, d_after)
                    ):
                        violations += count
                        if first is None or (s, a) < (len(first[0]), first[0]):
                            first = (a, o)
            if first is None:
                continue
            found.append(_anonymous_counterexample(g, x, c, first[0], before, first[1]))
            if stop_at_first:
                return found, violations
    return found, violations


def _anonymous_counterexample(g: Graph, x, c, a, before: int, after: int) -> Counterexample:
    names = g.vertices
    profile = tuple(names[i] for i in x)
    q = DeviationQuery.of(profile, [names[i] for i in c], tuple(names[i] for i in a))
    deltas = tuple((names[v], g.distance_table[v][before], g.distance_table[v][after]) for v in c)
    return Counterexample(q, names[before], names[after], deltas)


def _sequence_chunk(m: Mechanism, cfg: CertificationConfig, profiles: list[tuple[int, ...]], stop_at_first: bool):
    """Raw-sequence sweep for mechanisms that see agent identities."""
    g = m.graph
    nv = len(g)
    dist = g.distance_table
    names = g.vertices
    found: list[Counterexample] = []
    violations = 0
    replacements = [a for s in range(cfg.ballot_cap + 1) for a in itertools.product(range(nv), repeat=s)]
    for x in profiles:
        before = m.choose(x)
        for csize in range(1, len(x) + 1):
            for c in itertools.combinations(range(len(x)), csize):
                members = [x[i] for i in c]
                d_before = [dist[v][before] for v in members]
                first = None
                for a in replacements:
                    if not _admits(cfg.property_classes, csize, len(a)):
                        continue
                    after = apply_deviation(x, c, a)
                    if not after and not m.accepts_empty:
                        continue
                    o = m.choose(after)
                    d_after = [dist[v][o] for v in members]
                    if all(b <= a_ for a_, b in zip(d_before, d_after)) and any(
                        b < a_ for a_, b in zip(d_before, d_after)
                    ):
                        violations += 1
                        if first is None:
                            first = (a, o)
                if first is None:
                    continue
                a, o = first
                q = DeviationQuery(tuple(names[i] for i in x), c, tuple(names[i] for i in a))
                deltas = tuple((names[v], dist[v][before], dist[v][o]) for v in members)
                found.append(Counterexample(q, names[before], names[o], deltas))
                if stop_at_first:
                    return found, violations
    return found, violations


def _profiles(m: Mechanism, cfg: CertificationConfig) -> list[tuple[int, ...]]:
    nv = len(m.graph)
    if m.anonymous:
        return [x for n in range(1, cfg.max_agents + 1) for x in multisets(nv, n)]
    return [x for n in range(1, cfg.max_agents + 1) for x in itertools.product(range(nv), repeat=n)]


def _chunk_worker(args):
    m, cfg, profiles, stop_at_first = args
    sweep = _anonymous_chunk if m.anonymous else _sequence_chunk
    return sweep(m, cfg, profiles, stop_at_first)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("ZVLINE_JOBS", "1")))
    except ValueError:
        return 1


def _sweep(m: Mechanism, cfg: CertificationConfig, stop_at_first: bool):
    size = search_space_size(cfg, m.graph, anonymous=m.anonymous)
    if size > cfg.budget:
        raise BudgetExceeded(f"search space has {size} triples, budget is {cfg.budget}")
    profiles = _profiles(m, cfg)
    jobs = cfg.jobs if cfg.jobs is not None else default_jobs()
    if jobs <= 1 or len(profiles) < 2 * jobs:
        found, violations = _chunk_worker((m, cfg, profiles, stop_at_first))
        return found, violations, size
    step = math.ceil(len(profiles) / jobs)
    chunks = [profiles[i : i + step] for i in range(0, len(profiles), step)]
    found, violations = [], 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # results come back in submission order, so the merge is canonical
        for part, count in pool.map(_chunk_worker, [(m, cfg, ch, stop_at_first) for ch in chunks]):
            found.extend(part)
            violations += count
            if stop_at_first and found:
                break
    return found, violations, size


def find_deviation(g: Graph, m: Mechanism, cfg: CertificationConfig) -> Counterexample | None:
    """First beneficial deviation in canonical order, or None."""
    _check_bound(g, m)
    found, _, _ = _sweep(m, cfg, stop_at_first=True)
    return found[0] if found else None


def iter_deviations(g: Graph, m: Mechanism, cfg: CertificationConfig) -> Iterator[Counterexample]:
    """Every beneficial (profile, coalition, replacement) triple, in canonical order.

    A direct loop over ``dedupe_search_space`` and ``check_deviation``;
    slower than the sweep but useful when all witnesses are wanted.
    Anonymous mechanisms only.
    """
    _check_bound(g, m)
    if not m.anonymous:
        raise InvalidParameters("iter_deviations enumerates multisets; use certify for non-anonymous mechanisms")
    for x, c, a in dedupe_search_space(cfg, g):
        found = check_deviation(g, m, DeviationQuery.of(x, c, a))
        if found is not None:
            yield found


def _check_bound(g: Graph, m: Mechanism) -> None:
    if m.graph is not g and m.graph != g:
        raise InvalidParameters("mechanism is bound to a different graph")


# -- property suites ------------------------------------------------------------------


def pareto_failures(m: Mechanism, max_agents: int) -> list[str]:
    g = m.graph
    dist = np.asarray(g.distance_table, dtype=np.int64)
    out = []
    for n in range(1, max_agents + 1):
        for x in multisets(len(g), n):
            o = m.choose(x)
            if not pareto_mask(dist, list(x))[o]:
                out.append(f"pareto: {_fmt(g, x)} -> {g.vertices[o]} is dominated")
    return out


def anonymity_failures(m: Mechanism, max_agents: int) -> list[str]:
    g = m.graph
    out = []
    for n in range(1, max_agents + 1):
        for x in multisets(len(g), n):
            base = m.choose(x)
            for perm in set(itertools.permutations(x)):
                o = m.choose(perm)
                if o != base:
                    out.append(
                        f"anonymity: {_fmt(g, perm)} -> {g.vertices[o]} but {_fmt(g, x)} -> {g.vertices[base]}"
                    )
                    break
    return out


def unanimity_failures(m: Mechanism, max_agents: int) -> list[str]:
    g = m.graph
    out = []
    for v in range(len(g)):
        for n in range(1, max_agents + 1):
            o = m.choose((v,) * n)
            if o != v:
                out.append(f"unanimity: {g.vertices[v]} x{n} -> {g.vertices[o]}")
    return out


def onto_failures(m: Mechanism, max_agents: int) -> list[str]:
    g = m.graph
    hit = set()
    for n in range(1, max_agents + 1):
        for x in (multisets(len(g), n) if m.anonymous else itertools.product(range(len(g)), repeat=n)):
            hit.add(m.choose(x))
    return [f"onto: {v} is never chosen" for i, v in enumerate(g.vertices) if i not in hit]


def _fmt(g: Graph, x: Iterable[int]) -> str:
    return "{" + ",".join(g.vertices[i] for i in x) + "}"


def certify(g: Graph, m: Mechanism, cfg: CertificationConfig) -> CertificationReport:
    """Full sweep plus the property suites.

    ``certified`` reflects deviations only; property failures are listed
    separately in ``property_failures``.
    """
    _check_bound(g, m)
    start = time.perf_counter()
    found, violations, size = _sweep(m, cfg, stop_at_first=False)
    checked = ["pareto", "unanimity", "onto"]
    failures = pareto_failures(m, cfg.max_agents)
    if m.anonymous:
        checked.insert(1, "anonymity")
        failures += anonymity_failures(m, cfg.max_agents)
    failures += unanimity_failures(m, cfg.max_agents)
    failures += onto_failures(m, cfg.max_agents)
    if isinstance(m, FStar):
        checked.append("root-saturation")
        failures += [f"root-saturation: {f}" for f in saturation_checks(g, m.partition, cfg.tau_list)]
    return CertificationReport(
        certified=not found,
        counterexamples=found,
        search_space_size=size,
        duration=time.perf_counter() - start,
        violation_count=violations,
        property_failures=failures,
        properties_checked=checked,
        mechanism=m.describe(),
    )
