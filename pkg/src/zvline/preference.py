"""Distance-induced preferences, Pareto dominance and Pareto-optimal sets."""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyProfile
from .graph import Graph


class Preference(enum.Enum):
    STRICTLY_PREFERS_A = "StrictlyPrefersA"
    INDIFFERENT = "Indifferent"
    STRICTLY_PREFERS_B = "StrictlyPrefersB"


class Profile:
    """Anonymous multiset of ballots, canonically sorted by vertex order."""

    __slots__ = ("ballots",)

    def __init__(self, g: Graph, ballots: Iterable[str] = ()):
        self.ballots: tuple[str, ...] = tuple(sorted(ballots, key=g.idx))

    @property
    def size(self) -> int:
        return len(self.ballots)

    def __len__(self) -> int:
        return len(self.ballots)

    def __iter__(self):
        return iter(self.ballots)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Profile):
            return self.ballots == other.ballots
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.ballots)

    def __repr__(self) -> str:
        return f"Profile({', '.join(self.ballots)})"

    def support(self) -> frozenset[str]:
        return frozenset(self.ballots)


def prefers(g: Graph, agent_loc: str, a: str, b: str) -> Preference:
    da, db = g.distance(agent_loc, a), g.distance(agent_loc, b)
    if da < db:
        return Preference.STRICTLY_PREFERS_A
    if da > db:
        return Preference.STRICTLY_PREFERS_B
    return Preference.INDIFFERENT


def pareto_dominates(g: Graph, x: Iterable[str], u: str, v: str) -> bool:
    """True iff every ballot weakly prefers `u` to `v` and one strictly does."""
    ballots = list(x)
    if not ballots:
        raise EmptyProfile("dominance needs at least one ballot")
    strict = False
    for b in ballots:
        pref = prefers(g, b, u, v)
        if pref is Preference.STRICTLY_PREFERS_B:
            return False
        if pref is Preference.STRICTLY_PREFERS_A:
            strict = True
    return strict


def pareto_set(g: Graph, x: Iterable[str]) -> frozenset[str]:
    """Locations no other location Pareto dominates.

    Brute force over ordered pairs; the empty profile yields every vertex.
    """
    ballots = list(x)
    for b in ballots:
        g.idx(b)
    if not ballots:
        return frozenset(g.vertices)
    return frozenset(
        v for v in g.vertices if not any(pareto_dominates(g, ballots, u, v) for u in g.vertices if u != v)
    )


def pareto_mask(dist: np.ndarray, ballot_idx: Sequence[int]) -> np.ndarray:
    """Vectorised Pareto test over vertex indices.

    `dist` is the all-pairs table as an array; returns a boolean mask of
    Pareto-optimal vertices.  Used on the hot path of the mechanisms.
    """
    if len(ballot_idx) == 0:
        return np.ones(dist.shape[0], dtype=bool)
    rows = dist[np.asarray(ballot_idx)]  # agents x vertices
    weak = (rows[:, :, None] <= rows[:, None, :]).all(axis=0)
    strict = (rows[:, :, None] < rows[:, None, :]).any(axis=0)
    return ~(weak & strict).any(axis=0)


def is_pareto_optimal(g: Graph, x: Iterable[str], v: str) -> bool:
    ballots = list(x)
    if not ballots:
        return True
    return not any(pareto_dominates(g, ballots, u, v) for u in g.vertices if u != v)
