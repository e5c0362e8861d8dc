"""Recursive max-linear models on a ttt.

Each node carries ``X_v = max(max_{i in pa(v)} c_iv X_i, c_vv Z_v)`` with
independent unit-Frechet factors ``Z``.  Edge weights live in ``(0, 1)``, the
unique shortest path between any ancestor pair must be the strictly heaviest
one (criticality), and the diagonal ``c_vv`` is fixed by unit-Frechet margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    CriticalityTie,
    CriticalityViolated,
    LeavesParameterSpace,
    ModelError,
    NegativeInput,
    NonPositiveDiagonal,
    NonPositiveThreshold,
    NotSingleChild,
    NotUniqueSource,
    WeightOutOfRange,
    WeightsMismatch,
)
from .graph import DEFAULT_PATH_BUDGET, Edge, TttGraph

EdgeWeights = Mapping[Edge, float]

CRITICALITY_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class ValidatedTheta:
    """Edge weights known to lie in the critical parameter space."""

    graph: TttGraph
    weights: Mapping[Edge, float]
    diag: Mapping[int, float]
    path_weight: Mapping[tuple[int, int], float]  # (i, v) -> c_{p(i,v)}, i in An(v)

    def __getitem__(self, e: Edge) -> float:
        return self.weights[e]

    def as_dict(self) -> dict[Edge, float]:
        return dict(self.weights)


def path_product(weights: EdgeWeights, path: Sequence[Edge]) -> float:
    return math.prod(weights[e] for e in path)


def validate_theta(
    g: TttGraph,
    theta: EdgeWeights,
    eps: float = CRITICALITY_EPS,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> ValidatedTheta:
    """Check ``theta`` against weight bounds, criticality and positive diagonal."""
    keys = set(theta)
    if keys != set(g.edges):
        missing = sorted(set(g.edges) - keys)
        extra = sorted(keys - set(g.edges))
        raise WeightsMismatch(
            f"weights do not cover the edge set (missing {missing}, extra {extra})",
            missing=[list(e) for e in missing],
            extra=[list(e) for e in extra],
        )
    weights = {e: float(theta[e]) for e in sorted(g.edges)}
    for e, c in weights.items():
        if not 0.0 < c < 1.0:
            raise WeightOutOfRange(f"weight of edge {e} is {c}, outside (0, 1)", edge=list(e), c=c)

    path_weight: dict[tuple[int, int], float] = {}
    for v in g.nodes:
        path_weight[(v, v)] = 1.0
        for i in sorted(g.ancestors(v)):
            sp = g.shortest_path(i, v)
            best = path_product(weights, sp.edges)
            path_weight[(i, v)] = best
            for p in g.all_paths(i, v, budget=path_budget):
                if p == sp.edges:
                    continue
                cp = path_product(weights, p)
                if cp > best + eps:
                    raise CriticalityViolated(
                        f"path {list(p)} from {i} to {v} outweighs the shortest path "
                        f"{list(sp.edges)} ({cp:.17g} > {best:.17g})",
                        i=i, v=v, path=[list(e) for e in p], shortest=[list(e) for e in sp.edges],
                    )
                if cp >= best - eps:
                    raise CriticalityTie(
                        f"path {list(p)} from {i} to {v} ties with the shortest path "
                        f"within {eps:g}",
                        i=i, v=v, path=[list(e) for e in p],
                    )

    diag: dict[int, float] = {}
    for v in g.topological_order:
        c = 1.0 - sum(diag[i] * path_weight[(i, v)] for i in g.ancestors(v))
        if c <= 0.0:
            raise NonPositiveDiagonal(f"c_vv = {c:.17g} <= 0 at node {v}", node=v, c=c)
        diag[v] = c

    return ValidatedTheta(
        g,
        MappingProxyType(weights),
        MappingProxyType({v: diag[v] for v in g.nodes}),
        MappingProxyType(path_weight),
    )


@dataclass(frozen=True, eq=False)
class MaxLinearModel:
    """Graph, validated weights and the coefficient matrix ``B = (b_vi)``.

    Rows and columns of ``B`` follow ``graph.nodes`` (sorted labels).
    """

    graph: TttGraph
    theta: ValidatedTheta
    B: np.ndarray

    @classmethod
    def from_weights(cls, g: TttGraph, weights: EdgeWeights, eps: float = CRITICALITY_EPS) -> "MaxLinearModel":
        return coefficient_matrix(g, validate_theta(g, weights, eps=eps))

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.graph.nodes

    @cached_property
    def diag(self) -> dict[int, float]:
        idx = self.graph.index
        return {v: float(self.B[idx[v], idx[v]]) for v in self.nodes}

    def b(self, v: int, i: int) -> float:
        idx = self.graph.index
        return float(self.B[idx[v], idx[i]])

    def vector(self, x: Mapping[int, float] | Sequence[float], fill: float = 0.0) -> np.ndarray:
        """Coerce ``x`` (mapping by label, or sequence in node order) to an array."""
        if isinstance(x, Mapping):
            arr = np.full(len(self.nodes), fill, dtype=float)
            for v, val in x.items():
                arr[self.graph.index[v]] = val
            return arr
        arr = np.asarray(x, dtype=float)
        if arr.shape != (len(self.nodes),):
            raise ValueError(f"expected a vector of length {len(self.nodes)}, got shape {arr.shape}")
        return arr

    def stdf(self, x) -> float:
        return stdf(self, x)

    def joint_cdf(self, z) -> float:
        return joint_cdf(self, z)


def coefficient_matrix(g: TttGraph, theta: ValidatedTheta) -> MaxLinearModel:
    n = len(g.nodes)
    idx = g.index
    B = np.zeros((n, n))
    for v in g.nodes:
        for i in g.ancestors(v):
            B[idx[v], idx[i]] = theta.diag[i] * theta.path_weight[(i, v)]
        c_vv = 1.0 - B[idx[v]].sum()
        if c_vv <= 0.0:
            raise NonPositiveDiagonal(f"c_vv = {c_vv:.17g} <= 0 at node {v}", node=v, c=c_vv)
        B[idx[v], idx[v]] = c_vv
    B.setflags(write=False)
    return MaxLinearModel(g, theta, B)


def bvv_via_tournament(g: TttGraph, theta: ValidatedTheta | EdgeWeights, v: int) -> float:
    """``b_vv`` from the triangular system ``(I + C) b = 1`` of v's parent tournament.

    Independent of the ancestor recursion; only the edge weights inside the
    tournament shared by ``v`` and its parents enter.
    """
    if not g.has_unique_source:
        raise NotUniqueSource("the tournament formula needs a unique source", sources=sorted(g.sources()))
    g._check(v)
    tau = g.parent_tournament(v)
    if tau is None:
        return 1.0
    order = tau.nodes
    k = len(order)
    C = np.zeros((k, k))
    for r, b in enumerate(order):
        for c, a in enumerate(order[:r]):
            C[r, c] = theta[(a, b)]
    sol = solve_triangular(np.eye(k) + C, np.ones(k), lower=True)
    return float(sol[order.index(v)])


def bvv_path_sum(g: TttGraph, theta: ValidatedTheta | EdgeWeights, v: int) -> float:
    """``1 + sum_{u in pa(v)} sum_{p in pi(u, v)} (-1)^|p| c_p``."""
    total = 1.0
    for u in g.parents[v]:
        for p in g.all_paths(u, v):
            total += (-1) ** len(p) * math.prod(theta[e] for e in p)
    return total


def stdf(model: MaxLinearModel, x) -> float:
    """Stable tail dependence function ``sum_i max_v b_vi x_v``."""
    xv = model.vector(x)
    if np.any(~(xv >= 0)):
        raise NegativeInput("stdf is defined on the nonnegative orthant")
    return float((model.B * xv[:, None]).max(axis=0).sum())


def joint_cdf(model: MaxLinearModel, z) -> float:
    """``P(X <= z) = exp(-l(1/z))``; coordinates may be ``inf`` (or omitted in a mapping)."""
    zv = model.vector(z, fill=math.inf)
    if np.any(~(zv > 0)):
        raise NonPositiveThreshold("thresholds must be positive")
    with np.errstate(divide="ignore"):
        x = 1.0 / zv
    return math.exp(-stdf(model, x))


def scale_witness(model: MaxLinearModel, u: int, lam: float, eps: float = CRITICALITY_EPS) -> dict[Edge, float]:
    """Scale the edges into ``u`` by ``lam`` and its single out-edge by ``1/lam``.

    The law of ``X`` without ``u`` is unchanged; the result is re-validated.
    """
    g = model.graph
    g._check(u)
    ch = g.children[u]
    if len(ch) != 1:
        raise NotSingleChild(f"node {u} has {len(ch)} children, need exactly one", node=u)
    if not lam > 0:
        raise LeavesParameterSpace(f"lambda must be positive, got {lam}", lam=lam)
    (w,) = ch
    out = model.theta.as_dict()
    for j in g.parents[u]:
        out[(j, u)] = lam * out[(j, u)]
    out[(u, w)] = out[(u, w)] / lam
    try:
        validate_theta(g, out, eps=eps)
    except ModelError as exc:
        raise LeavesParameterSpace(
            f"scaling node {u} by lambda={lam} leaves the parameter space: {exc}",
            node=u, lam=lam, cause=exc.code,
        ) from exc
    return out
