"""Conditional tail limits ``L(X_v / X_u, v != u | X_u > t)`` as ``t -> inf``.

Two routes to the same law:

* :func:`direct_limit` reads it off the coefficient matrix,
  ``sum_{j in An(u)} b_uj delta((b_vj / b_uj)_v)``;
* :func:`factorized_limit` multiplies independent per-tournament increment
  blocks along the shortest trails from ``u``.

They agree on every node exactly when the ttt has a unique source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnumerationBudgetExceeded, NoApplicableCase
from .graph import APEX, BACKWARD, FORWARD, Tournament, TttGraph
from .laws import DiscreteLaw, LawComparison, laws_equal, tv_distance
from .model import MaxLinearModel

LIMIT_DECIMALS = 9
DEFAULT_ENUMERATION_BUDGET = 10**7

__all__ = [
    "LimitLaw",
    "IncrementBlock",
    "direct_limit",
    "increment_block",
    "factorized_limit",
    "marginal_limit",
    "limit_case",
    "increment_case",
    "is_global_markov",
    "laws_equal",
    "tv_distance",
    "LawComparison",
]


@dataclass(frozen=True, eq=False)
class LimitLaw:
    """Joint limit law of the ratios given an exceedance at ``u``."""

    u: int
    law: DiscreteLaw

    @property
    def labels(self) -> tuple[int, ...]:
        return self.law.labels

    def marginal(self, v: int) -> DiscreteLaw:
        return self.law.marginal(v, LIMIT_DECIMALS)


@dataclass(frozen=True, eq=False)
class IncrementBlock:
    """Joint law of the increments ``(M_wj)_j`` of one tournament, anchored at ``w``."""

    tournament: Tournament
    anchor: int
    law: DiscreteLaw


def _cp(model: MaxLinearModel, a: int, b: int) -> float:
    """``c_{p(a,b)}``; zero when ``b`` is not reachable from ``a``."""
    return model.theta.path_weight.get((a, b), 0.0)


def direct_limit(model: MaxLinearModel, u: int) -> LimitLaw:
    g = model.graph
    g._check(u)
    idx = g.index
    others = tuple(v for v in g.nodes if v != u)
    cols = [idx[j] for j in sorted(g.ancestors(u, include_self=True))]
    rows = [idx[v] for v in others]
    bu = model.B[idx[u], cols]
    atoms = (model.B[np.ix_(rows, cols)] / bu[None, :]).T
    law = DiscreteLaw(others, atoms, bu).canonical(LIMIT_DECIMALS)
    return LimitLaw(u, law)


def increment_block(model: MaxLinearModel, u: int, tau: Tournament) -> IncrementBlock:
    """Increment block of ``tau`` for conditioning node ``u``."""
    g = model.graph
    w = g.closest_tournament_node(u, tau)
    idx = g.index
    targets = tuple(sorted(j for j in tau.nodes if j != w))
    cols = [idx[k] for k in sorted(g.ancestors(w, include_self=True))]
    bw = model.B[idx[w], cols]
    atoms = (model.B[np.ix_([idx[j] for j in targets], cols)] / bw[None, :]).T
    law = DiscreteLaw(targets, atoms, bw).canonical(LIMIT_DECIMALS)
    return IncrementBlock(tau, w, law)


def _merge_rows(A: np.ndarray, masses: np.ndarray, decimals: int) -> tuple[np.ndarray, np.ndarray]:
    keys = np.round(A, decimals) + 0.0
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    merged = np.bincount(inverse.reshape(-1), weights=masses, minlength=len(first))
    return A[first], merged


def factorized_limit(
    model: MaxLinearModel, u: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> LimitLaw:
    """Exact law of ``A_uv = prod_{e in t_u(u, v)} M_e`` with independent blocks.

    Blocks are folded in one at a time (outward from ``u``); partial atoms
    that coincide are merged after each step, which is exact because later
    factors depend on earlier ones only through the values already fixed.
    """
    g = model.graph
    g._check(u)
    idx = g.index
    n = len(g.nodes)
    blocks = [increment_block(model, u, tau) for tau in g.tournaments]
    blocks.sort(key=lambda blk: (g.trail_length(u, blk.anchor), blk.anchor, blk.tournament.nodes))

    A = np.zeros((1, n))
    A[0, idx[u]] = 1.0
    masses = np.ones(1)
    for blk in blocks:
        k, m = len(masses), len(blk.law)
        if k * m > budget:
            raise EnumerationBudgetExceeded(
                f"{k * m} combined atoms exceed the budget of {budget}", budget=budget
            )
        anchor = A[:, idx[blk.anchor]]
        cols = [idx[j] for j in blk.law.labels]
        newA = np.repeat(A, m, axis=0)
        newA[:, cols] = (anchor[:, None, None] * blk.law.atoms[None, :, :]).reshape(k * m, -1)
        masses = np.outer(masses, blk.law.masses).reshape(-1)
        A, masses = _merge_rows(newA, masses, LIMIT_DECIMALS)

    others = tuple(v for v in g.nodes if v != u)
    law = DiscreteLaw(others, A[:, [idx[v] for v in others]], masses).canonical(LIMIT_DECIMALS)
    return LimitLaw(u, law)


def increment_case(g: TttGraph, w: int, j: int) -> str:
    """Which closed form governs the single increment ``M_wj`` on an edge of ``g``."""
    if (w, j) in g.edges:
        return "1a" if g.tournament_of_edge(w, j).source == w else "1b"
    if (j, w) in g.edges:
        return "2a" if g.tournament_of_edge(w, j).source == j else "2b"
    raise NoApplicableCase(f"{w} and {j} are not adjacent", u=w, v=j)


def limit_case(g: TttGraph, u: int, v: int) -> tuple[str, dict]:
    """Closed-form case for ``A_uv`` and the trail nodes it refers to."""
    if u == v:
        raise NoApplicableCase("u and v must differ", u=u, v=v)
    trail = g.shortest_trail(u, v)
    if trail.shape == FORWARD:
        r = trail.nodes[1]
        return ("1a" if g.tournament_of_edge(u, r).source == u else "1b"), {"r": r}
    if trail.shape == BACKWARD:
        r = trail.nodes[-2]
        return ("2a" if g.tournament_of_edge(v, r).source == v else "2b"), {"r": r}
    if trail.shape == APEX and g.has_unique_source:
        r = trail.apex
        k = trail.nodes.index(r)
        m, n = trail.nodes[k - 1], trail.nodes[k + 1]
        src_m = g.tournament_of_edge(r, m).source == r
        src_n = g.tournament_of_edge(r, n).source == r
        if src_m and src_n:
            return "3a", {"r": r, "m": m, "n": n}
        if src_m:
            return "3b", {"r": r, "m": m, "n": n}
        if src_n:
            return "3c", {"r": r, "m": m, "n": n}
    raise NoApplicableCase(
        f"no closed form for the trail {trail.nodes} ({trail.shape}) "
        f"in a graph with sources {sorted(g.sources())}",
        u=u, v=v, shape=trail.shape,
    )


def marginal_limit(model: MaxLinearModel, u: int, v: int) -> DiscreteLaw:
    """Closed-form law of ``A_uv`` selected by the shape of the trail ``t(u, v)``."""
    g = model.graph
    case, k = limit_case(g, u, v)
    cp = lambda a, b: _cp(model, a, b)  # noqa: E731
    b = model.b
    an = lambda x: sorted(g.ancestors(x, include_self=True))  # noqa: E731
    atoms: list[float] = []
    masses: list[float] = []

    def add(x, m):
        atoms.append(x)
        masses.append(m)

    if case == "1a":
        add(cp(u, v), 1.0)
    elif case == "1b":
        r = k["r"]
        for j in an(u):
            add(cp(j, r) / cp(j, u) * cp(r, v), b(u, j))
    elif case == "2a":
        c = cp(v, u)
        add(1.0 / c, c)
        add(0.0, 1.0 - c)
    elif case == "2b":
        r = k["r"]
        for j in an(v):
            add(cp(j, v) / (cp(j, r) * cp(r, u)), cp(r, u) * b(r, j))
        for j in sorted(set(an(u)) - set(an(v))):
            add(0.0, b(u, j))
    elif case == "3a":
        r = k["r"]
        add(cp(r, v) / cp(r, u), cp(r, u))
        add(0.0, 1.0 - cp(r, u))
    elif case == "3b":
        r, n = k["r"], k["n"]
        for j in an(r):
            add(cp(j, n) * cp(n, v) / (cp(j, r) * cp(r, u)), cp(r, u) * b(r, j))
        for j in sorted(set(an(u)) - set(an(r))):
            add(0.0, b(u, j))
    else:  # 3c
        r, m = k["r"], k["m"]
        for j in an(r):
            add(cp(j, r) * cp(r, v) / (cp(j, m) * cp(m, u)), cp(m, u) * b(m, j))
        for j in sorted(set(an(u)) - set(an(r))):
            add(0.0, b(u, j))

    return DiscreteLaw((v,), np.array(atoms)[:, None], np.array(masses)).canonical(LIMIT_DECIMALS)


def is_global_markov(g: TttGraph) -> bool:
    """Global Markov property w.r.t. the skeleton holds iff the source is unique."""
    return g.has_unique_source
