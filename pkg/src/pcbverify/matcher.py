"""Typed multigraph monomorphism search (VF2-style backtracking).

The pattern and host are edge-typed multigraphs. Edge types listed in
``directed_types`` are matched with orientation; all others are undirected.
A pattern with ``m`` parallel edges of one type between two vertices needs
at least ``m`` such edges in the host between the images.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

Vertex = Hashable
Edge = tuple[Vertex, Vertex, str]


class BudgetExceeded(Exception):
    """The search expanded more states than its budget allows."""

    def __init__(self, expansions: int):
        super().__init__(f"search budget exceeded after {expansions} expansions")
        self.expansions = expansions


def _key(u, v, etype: str, directed: frozenset[str]):
    if etype in directed:
        return (u, v, etype)
    a, b = sorted((u, v), key=repr)
    return (a, b, etype)


@dataclass
class _Search:
    order: list
    cands: dict
    host_count: Counter
    # per vertex: the pattern edge requirements to vertices placed no later than it
    checks: dict
    directed: frozenset[str]
    budget: int
    expansions: int = 0

    def run(self) -> dict | None:
        mapping: dict = {}
        used: set = set()
        return mapping if self._extend(0, mapping, used) else None

    def _extend(self, depth: int, mapping: dict, used: set) -> bool:
        if depth == len(self.order):
            return True
        v = self.order[depth]
        for h in self.cands[v]:
            if h in used:
                continue
            self.expansions += 1
            if self.expansions > self.budget:
                raise BudgetExceeded(self.expansions)
            mapping[v] = h
            if self._feasible(v, mapping):
                used.add(h)
                if self._extend(depth + 1, mapping, used):
                    return True
                used.discard(h)
            del mapping[v]
        return False

    def _feasible(self, v, mapping: dict) -> bool:
        for (a, b, etype), need in self.checks[v]:
            k = _key(mapping[a], mapping[b], etype, self.directed)
            if self.host_count[k] < need:
                return False
        return True


def _search_order(vertices: Sequence, cands: Mapping, adj: Mapping) -> list:
    """Most-constrained first, then greedily the vertex with most links into
    the placed set; ties broken by declaration position."""
    pos = {v: i for i, v in enumerate(vertices)}
    remaining = set(vertices)
    order: list = []
    while remaining:
        placed = set(order)
        best = min(
            remaining,
            key=lambda v: (-len(adj[v] & placed), len(cands[v]), pos[v]),
        )
        order.append(best)
        remaining.remove(best)
    return order


def find_monomorphism(
    pattern_vertices: Sequence[Vertex],
    pattern_edges: Iterable[Edge],
    host_edges: Iterable[Edge],
    candidates: Mapping[Vertex, Iterable[Vertex]],
    directed_types: Iterable[str] = (),
    budget: int = 1_000_000,
) -> dict | None:
    """Return an injective, edge-type-preserving map pattern -> host, or None.

    ``candidates`` gives each pattern vertex its admissible host vertices; the
    candidate order fixes the search order, so pass them sorted for
    reproducible results. Raises :class:`BudgetExceeded` when the number of
    candidate expansions passes ``budget``.
    """
    directed = frozenset(directed_types)
    pattern_vertices = list(pattern_vertices)
    pset = set(pattern_vertices)
    need: Counter = Counter()
    for a, b, etype in pattern_edges:
        if a not in pset or b not in pset:
            raise ValueError(f"pattern edge {(a, b, etype)!r} names an unknown vertex")
        need[_key(a, b, etype, directed)] += 1
    host_count: Counter = Counter(_key(u, v, t, directed) for u, v, t in host_edges)

    cands = {v: list(dict.fromkeys(candidates.get(v, ()))) for v in pattern_vertices}
    if any(not cands[v] for v in pattern_vertices):
        return None

    adj: dict = {v: set() for v in pattern_vertices}
    for a, b, _ in need:
        adj[a].add(b)
        adj[b].add(a)
    order = _search_order(pattern_vertices, cands, adj)
    rank = {v: i for i, v in enumerate(order)}
    checks: dict = {v: [] for v in pattern_vertices}
    for k, n in need.items():
        a, b, _ = k
        checks[order[max(rank[a], rank[b])]].append((k, n))

    return _Search(order, cands, host_count, checks, directed, budget).run()
