"""Trees of transitive tournaments (ttt).

A ttt is a connected DAG whose skeleton is a block graph: every maximal
biconnected piece of the undirected skeleton is a clique, and each clique,
with the directions of the DAG, is a transitive tournament.  Node labels are
the integers supplied by the caller and are never renumbered.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

import networkx as nx

from .errors import (
    BlockNotComplete,
    BlockNotTransitive,
    DirectedCycle,
    DuplicateOrReversedEdge,
    EmptyGraph,
    NotConnected,
    PathBudgetExceeded,
    UnknownNode,
)

Edge = tuple[int, int]

DEFAULT_PATH_BUDGET = 10**6

# trail shape tags
FORWARD = "forward"  # directed path u -> v
BACKWARD = "backward"  # directed path v -> u
APEX = "apex"  # u <- ... <- w -> ... -> v
MIXED = "mixed"  # anything else; never occurs with a unique source
EMPTY = "empty"


@dataclass(frozen=True)
class Tournament:
    """A maximal transitive tournament, nodes ordered source first."""

    nodes: tuple[int, ...]
    edges: frozenset[Edge]

    @property
    def source(self) -> int:
        return self.nodes[0]

    def __contains__(self, v: int) -> bool:
        return v in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Trail:
    """A simple undirected path, kept with the original edge directions.

    ``forward[t]`` says whether the t-th edge points along the traversal
    from ``nodes[0]`` to ``nodes[-1]``.
    """

    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    forward: tuple[bool, ...]
    shape: str
    apex: int | None = None

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def oriented(self) -> tuple[Edge, ...]:
        """Edges as ordered pairs pointing away from ``nodes[0]``."""
        return tuple(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]


@dataclass(frozen=True)
class Relatives:
    pa: frozenset[int]
    ch: frozenset[int]
    an: frozenset[int]
    desc: frozenset[int]
    An: frozenset[int]
    Desc: frozenset[int]


def _trail_shape(forward: tuple[bool, ...], nodes: tuple[int, ...]) -> tuple[str, int | None]:
    if not forward:
        return EMPTY, None
    if all(forward):
        return FORWARD, None
    if not any(forward):
        return BACKWARD, None
    k = forward.index(True)
    if all(forward[k:]) and not any(forward[:k]):
        return APEX, nodes[k]
    return MIXED, None


@dataclass(frozen=True, eq=False)
class TttGraph:
    """Validated ttt.  Build it with :func:`build_ttt`."""

    nodes: tuple[int, ...]
    edges: frozenset[Edge]
    tournaments: tuple[Tournament, ...]

    # -- basic structure --------------------------------------------------

    @cached_property
    def parents(self) -> dict[int, frozenset[int]]:
        pa: dict[int, set[int]] = {v: set() for v in self.nodes}
        for a, b in self.edges:
            pa[b].add(a)
        return {v: frozenset(s) for v, s in pa.items()}

    @cached_property
    def children(self) -> dict[int, frozenset[int]]:
        ch: dict[int, set[int]] = {v: set() for v in self.nodes}
        for a, b in self.edges:
            ch[a].add(b)
        return {v: frozenset(s) for v, s in ch.items()}

    @cached_property
    def neighbors(self) -> dict[int, tuple[int, ...]]:
        return {v: tuple(sorted(self.parents[v] | self.children[v])) for v in self.nodes}

    @cached_property
    def skeleton(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.edges)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        indeg = {v: len(self.parents[v]) for v in self.nodes}
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(self.children[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
            ready.sort()
        return tuple(order)

    @cached_property
    def index(self) -> dict[int, int]:
        """Position of each label in ``nodes`` (sorted labels)."""
        return {v: k for k, v in enumerate(self.nodes)}

    @cached_property
    def _ancestors(self) -> dict[int, frozenset[int]]:
        an: dict[int, frozenset[int]] = {}
        for v in self.topological_order:
            acc: set[int] = set()
            for p in self.parents[v]:
                acc.add(p)
                acc |= an[p]
            an[v] = frozenset(acc)
        return an

    @cached_property
    def _descendants(self) -> dict[int, frozenset[int]]:
        desc: dict[int, frozenset[int]] = {}
        for v in reversed(self.topological_order):
            acc: set[int] = set()
            for c in self.children[v]:
                acc.add(c)
                acc |= desc[c]
            desc[v] = frozenset(acc)
        return desc

    def _check(self, *vs: int) -> None:
        for v in vs:
            if v not in self.index:
                raise UnknownNode(f"node {v} is not in the graph", node=v)

    def adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    # -- operations --------------------------------------------------

    def sources(self) -> frozenset[int]:
        return frozenset(v for v in self.nodes if not self.parents[v])

    @property
    def has_unique_source(self) -> bool:
        return len(self.sources()) == 1

    def v_structures(self) -> list[tuple[int, int, int]]:
        """Triples ``(a, b, v)`` with non-adjacent parents ``a < b`` of ``v``."""
        out = []
        for v in self.nodes:
            for a, b in combinations(sorted(self.parents[v]), 2):
                if not self.adjacent(a, b):
                    out.append((a, b, v))
        return out

    def relatives(self, v: int) -> Relatives:
        self._check(v)
        an = self._ancestors[v]
        desc = self._descendants[v]
        return Relatives(
            pa=self.parents[v],
            ch=self.children[v],
            an=an,
            desc=desc,
            An=an | {v},
            Desc=desc | {v},
        )

    def ancestors(self, v: int, include_self: bool = False) -> frozenset[int]:
        self._check(v)
        an = self._ancestors[v]
        return an | {v} if include_self else an

    def descendants(self, v: int, include_self: bool = False) -> frozenset[int]:
        self._check(v)
        desc = self._descendants[v]
        return desc | {v} if include_self else desc

    def shortest_path(self, i: int, v: int) -> Trail | None:
        """Unique shortest directed path ``p(i, v)``; ``None`` if unreachable."""
        self._check(i, v)
        if i == v:
            return Trail((i,), (), (), EMPTY)
        if v not in self._descendants[i]:
            return None
        prev = {i: None}
        queue = deque([i])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for c in sorted(self.children[x]):
                if c not in prev:
                    prev[c] = x
                    queue.append(c)
        seq = [v]
        while seq[-1] != i:
            seq.append(prev[seq[-1]])
        nodes = tuple(reversed(seq))
        edges = tuple(zip(nodes[:-1], nodes[1:]))
        return Trail(nodes, edges, (True,) * len(edges), FORWARD)

    def iter_paths(self, i: int, v: int) -> Iterator[tuple[int, ...]]:
        """Yield node sequences of every directed path from ``i`` to ``v``."""
        self._check(i, v)
        if i == v or v not in self._descendants[i]:
            return
        stack = [(i, (i,))]
        while stack:
            x, seq = stack.pop()
            for c in sorted(self.children[x], reverse=True):
                if c == v:
                    yield seq + (c,)
                elif v in self._descendants[c]:
                    stack.append((c, seq + (c,)))

    def all_paths(self, i: int, v: int, budget: int = DEFAULT_PATH_BUDGET) -> list[tuple[Edge, ...]]:
        """Every directed path in ``pi(i, v)`` as an edge tuple.

        Raises :class:`PathBudgetExceeded` instead of truncating.
        """
        out = []
        for seq in self.iter_paths(i, v):
            if len(out) >= budget:
                raise PathBudgetExceeded(
                    f"more than {budget} paths from {i} to {v}", source=i, target=v, budget=budget
                )
            out.append(tuple(zip(seq[:-1], seq[1:])))
        return out

    @cached_property
    def _bfs(self) -> dict[int, tuple[dict[int, int], dict[int, int | None]]]:
        """Skeleton BFS distances and predecessors from every node."""
        out = {}
        for s in self.nodes:
            dist = {s: 0}
            prev: dict[int, int | None] = {s: None}
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.neighbors[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        prev[y] = x
                        queue.append(y)
            out[s] = (dist, prev)
        return out

    def trail_length(self, u: int, v: int) -> int:
        self._check(u, v)
        return self._bfs[u][0][v]

    def shortest_trail(self, u: int, v: int) -> Trail:
        """Unique shortest trail ``t(u, v)`` with its shape tag."""
        self._check(u, v)
        if u == v:
            return Trail((u,), (), (), EMPTY)
        prev = self._bfs[u][1]
        seq = [v]
        while seq[-1] != u:
            seq.append(prev[seq[-1]])
        nodes = tuple(reversed(seq))
        edges = []
        forward = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            if (a, b) in self.edges:
                edges.append((a, b))
                forward.append(True)
            else:
                edges.append((b, a))
                forward.append(False)
        fwd = tuple(forward)
        shape, apex = _trail_shape(fwd, nodes)
        return Trail(nodes, tuple(edges), fwd, shape, apex)

    def edges_away_from(self, u: int) -> frozenset[Edge]:
        """``E_u``: union of all ``t_u(u, v)``, oriented away from ``u``."""
        self._check(u)
        prev = self._bfs[u][1]
        return frozenset((p, x) for x, p in prev.items() if p is not None)

    def closest_tournament_node(self, u: int, tau: Tournament) -> int:
        self._check(u)
        dist = self._bfs[u][0]
        return min(tau.nodes, key=lambda w: (dist[w], w))

    # -- tournament helpers ---------------------------------------------

    def tournaments_of(self, v: int) -> tuple[Tournament, ...]:
        return tuple(t for t in self.tournaments if v in t.nodes)

    def tournament_of_edge(self, a: int, b: int) -> Tournament:
        for t in self.tournaments:
            if a in t.nodes and b in t.nodes:
                return t
        raise UnknownNode(f"no tournament contains both {a} and {b}", nodes=[a, b])

    def is_tournament_source(self, v: int) -> bool:
        """Whether ``v`` is the source of at least one tournament."""
        return any(t.source == v for t in self.tournaments_of(v))

    def parent_tournament(self, v: int) -> Tournament | None:
        """The tournament shared by ``v`` and its parents (unique-source graphs)."""
        pa = self.parents[v]
        if not pa:
            return None
        for t in self.tournaments_of(v):
            if pa <= set(t.nodes):
                return t
        return None

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"from": a, "to": b} for a, b in sorted(self.edges)],
        }


def _ordered_tournament(block: Iterable[int], edges: frozenset[Edge]) -> Tournament:
    nodes = set(block)
    tedges = frozenset((a, b) for a, b in edges if a in nodes and b in nodes)
    outdeg = {v: 0 for v in nodes}
    for a, _ in tedges:
        outdeg[a] += 1
    ordered = tuple(sorted(nodes, key=lambda v: (-outdeg[v], v)))
    d = len(ordered)
    if sorted(outdeg.values()) != list(range(d)):
        raise BlockNotTransitive(
            f"block {sorted(nodes)} contains a directed cycle", block=sorted(nodes)
        )
    return Tournament(ordered, tedges)


def build_ttt(nodes: Iterable[int], edges: Iterable[Edge]) -> TttGraph:
    """Validate ``(nodes, edges)`` as a ttt and enumerate its tournaments."""
    node_set = set(nodes)
    if not node_set:
        raise EmptyGraph("a ttt needs at least one node")
    seen: set[Edge] = set()
    for a, b in edges:
        if a not in node_set or b not in node_set:
            bad = a if a not in node_set else b
            raise UnknownNode(f"edge ({a}, {b}) references unknown node {bad}", node=bad)
        if a == b:
            raise DuplicateOrReversedEdge(f"self-loop on node {a}", edge=[a, b])
        if (a, b) in seen or (b, a) in seen:
            raise DuplicateOrReversedEdge(f"edge ({a}, {b}) given twice", edge=[a, b])
        seen.add((a, b))
    edge_set = frozenset(seen)

    skel = nx.Graph()
    skel.add_nodes_from(node_set)
    skel.add_edges_from(edge_set)
    if not nx.is_connected(skel):
        raise NotConnected(
            f"skeleton has {nx.number_connected_components(skel)} components",
        )

    blocks = [frozenset(b) for b in nx.biconnected_components(skel)]
    cliques, non_cliques = [], []
    for b in blocks:
        n_edges = skel.subgraph(b).number_of_edges()
        (cliques if n_edges == len(b) * (len(b) - 1) // 2 else non_cliques).append(b)

    tournaments = [_ordered_tournament(b, edge_set) for b in cliques]

    digraph = nx.DiGraph()
    digraph.add_nodes_from(node_set)
    digraph.add_edges_from(edge_set)
    if not nx.is_directed_acyclic_graph(digraph):
        cycle = [a for a, _ in nx.find_cycle(digraph)]
        raise DirectedCycle(f"directed cycle through {cycle}", cycle=cycle)
    if non_cliques:
        b = sorted(min(non_cliques, key=min))
        raise BlockNotComplete(f"biconnected block {b} is not a clique", block=b)

    tournaments.sort(key=lambda t: (t.source, t.nodes))
    return TttGraph(tuple(sorted(node_set)), edge_set, tuple(tournaments))


def sources(g: TttGraph) -> frozenset[int]:
    return g.sources()


def v_structures(g: TttGraph) -> list[tuple[int, int, int]]:
    return g.v_structures()
