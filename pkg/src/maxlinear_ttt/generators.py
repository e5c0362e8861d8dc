"""Random ttts and random admissible edge weights, for tests and experiments."""

from __future__ import annotations

import numpy as np

from .errors import ModelError
from .graph import Edge, TttGraph, build_ttt
from .model import validate_theta


def random_ttt(
    rng: np.random.Generator,
    n_nodes: int,
    unique_source: bool = True,
    max_block: int = 4,
) -> TttGraph:
    """Grow a tree of transitive tournaments by gluing blocks at existing nodes.

    With ``unique_source`` the glue node is always the source of the new
    block, which rules out v-structures.  Otherwise its position in the
    block is random.
    """
    if n_nodes < 1:
        raise ValueError("need at least one node")
    nodes = [0]
    edges: list[Edge] = []
    while len(nodes) < n_nodes:
        size = int(rng.integers(2, max_block + 1))
        size = min(size, n_nodes - len(nodes) + 1)
        glue = int(rng.choice(nodes))
        new = list(range(len(nodes), len(nodes) + size - 1))
        nodes.extend(new)
        order = list(rng.permutation(new))
        pos = 0 if unique_source else int(rng.integers(0, size))
        order.insert(pos, glue)
        edges.extend((int(order[a]), int(order[b])) for a in range(size) for b in range(a + 1, size))
    labels = rng.permutation(n_nodes) + 1
    relabel = {k: int(labels[k]) for k in nodes}
    return build_ttt(relabel.values(), [(relabel[a], relabel[b]) for a, b in edges])


def random_multi_source_ttt(rng: np.random.Generator, n_nodes: int, max_block: int = 4, tries: int = 1000) -> TttGraph:
    for _ in range(tries):
        g = random_ttt(rng, n_nodes, unique_source=False, max_block=max_block)
        if len(g.sources()) > 1:
            return g
    raise RuntimeError(f"no multi-source ttt on {n_nodes} nodes after {tries} draws")


def random_theta(
    rng: np.random.Generator,
    g: TttGraph,
    lo: float = 0.05,
    hi: float = 0.95,
    free_tries: int = 20,
    max_tries: int = 10_000,
) -> dict[Edge, float]:
    """Edge weights that pass validation.

    Plain uniform draws are tried first.  If those keep failing, draws come
    from a band ``(a, b)`` with ``a > b**2``, where every single edge beats
    every longer path, so only the diagonal can still fail.
    """
    edges = sorted(g.edges)
    for t in range(max_tries):
        if t < free_tries:
            a, b = lo, hi
        else:
            b = float(rng.uniform(0.2, hi))
            a = float(rng.uniform(b * b, b))
        theta = {e: float(rng.uniform(a, b)) for e in edges}
        try:
            validate_theta(g, theta)
        except ModelError:
            continue
        return theta
    raise RuntimeError(f"no admissible weights found after {max_tries} draws")


def latent_candidates(g: TttGraph) -> list[int]:
    """Nodes that may be hidden: at least two children and source of a tournament."""
    return [v for v in g.nodes if len(g.children[v]) >= 2 and g.is_tournament_source(v)]


def random_latent_set(rng: np.random.Generator, g: TttGraph) -> frozenset[int]:
    cand = latent_candidates(g)
    keep = rng.random(len(cand)) < 0.5
    return frozenset(v for v, k in zip(cand, keep) if k)
