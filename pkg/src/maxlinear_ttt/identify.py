"""Identifiability of edge weights when some nodes are latent.

The criterion: every latent node has at least two children (I1) and is the
source of some tournament (I2).  Under it, the angular measure of the
observed sub-vector has exactly one atom per node, and the weights can be
solved back from the mass-scaled atoms.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    AtomCountMismatch,
    CriterionSatisfied,
    CriterionViolated,
    DimensionMismatch,
    InconsistentTable,
    InvalidLatentSet,
    LeavesParameterSpace,
    ModelError,
    NoExitPath,
    NotUniqueSource,
    UnresolvableTie,
)
from .graph import FORWARD, Edge, Trail, TttGraph
from .model import CRITICALITY_EPS, MaxLinearModel, scale_witness, stdf, validate_theta
from .spectral import ZERO_TOL, AngularMeasure, support_pattern

RATIO_MARGIN = 1e-10
WITNESS_STEP = 0.05
WITNESS_TOL = 1e-12


@dataclass(frozen=True)
class Violation:
    node: int
    condition: str  # "I1" or "I2"
    message: str


@dataclass(frozen=True)
class CriterionReport:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """``b_vi`` for observed rows ``v in U`` and all columns ``i in V``."""

    U: tuple[int, ...]
    nodes: tuple[int, ...]
    values: np.ndarray
    atom_assignment: dict[int, int] = field(default_factory=dict)
    diagnostics: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.values.setflags(write=False)

    def b(self, v: int, i: int) -> float:
        return float(self.values[self.U.index(v), self.nodes.index(i)])

    @property
    def rows(self) -> dict[int, np.ndarray]:
        return {v: self.values[r] for r, v in enumerate(self.U)}


@dataclass(frozen=True)
class ReconstructionReport:
    theta_hat: dict[Edge, float]
    diag: dict[int, float]
    atom_assignment: dict[int, int]
    diagnostics: list[dict]


@dataclass(frozen=True)
class Witness:
    """Outcome of the witness search; ``theta_prime`` is None when no explicit one exists."""

    node: int
    theta_prime: dict[Edge, float] | None
    lam: float | None
    max_abs_diff: float | None
    grid_points: int
    diagnostic: str

    @property
    def found(self) -> bool:
        return self.theta_prime is not None


def _latent_set(g: TttGraph, Ubar: Iterable[int]) -> frozenset[int]:
    Ubar = frozenset(Ubar)
    unknown = sorted(Ubar - set(g.nodes))
    if unknown:
        raise InvalidLatentSet(f"latent nodes {unknown} are not in the graph", nodes=unknown)
    if len(Ubar) == len(g.nodes):
        raise InvalidLatentSet("at least one node must be observed")
    return Ubar


def identifiability_check(g: TttGraph, Ubar: Iterable[int]) -> CriterionReport:
    if not g.has_unique_source:
        raise NotUniqueSource(
            "the criterion is stated for ttts with a unique source", sources=sorted(g.sources())
        )
    Ubar = _latent_set(g, Ubar)
    out: list[Violation] = []
    for u in sorted(Ubar):
        k = len(g.children[u])
        if k < 2:
            out.append(Violation(u, "I1", f"latent node {u} has {k} child(ren), needs at least two"))
        if not g.is_tournament_source(u):
            out.append(Violation(u, "I2", f"latent node {u} is not the source of any tournament"))
    return CriterionReport(not out, tuple(out))


def _require_criterion(g: TttGraph, Ubar) -> frozenset[int]:
    rep = identifiability_check(g, Ubar)
    if not rep.ok:
        raise CriterionViolated(
            "; ".join(v.message for v in rep.violations),
            violations=[{"node": v.node, "condition": v.condition} for v in rep.violations],
        )
    return frozenset(Ubar)


def exit_path(g: TttGraph, ubar: int, Ubar: Iterable[int]) -> Trail:
    """Directed path from ``ubar`` to an observed node through single-parent latent nodes.

    Steps go to the second node of a tournament sourced at the current node;
    that node's only parent is the current one.  Breadth-first, so the path
    is shortest, with ties broken by label.
    """
    g._check(ubar)
    Ubar = frozenset(Ubar)
    if ubar not in Ubar:
        return Trail((ubar,), (), (), FORWARD)
    prev: dict[int, int | None] = {ubar: None}
    queue = deque([ubar])
    while queue:
        x = queue.popleft()
        steps = sorted(t.nodes[1] for t in g.tournaments_of(x) if t.source == x)
        for y in steps:
            if y in prev or len(g.parents[y]) != 1:
                continue
            prev[y] = x
            if y not in Ubar:
                nodes = [y]
                while prev[nodes[-1]] is not None:
                    nodes.append(prev[nodes[-1]])
                nodes.reverse()
                edges = tuple(zip(nodes[:-1], nodes[1:]))
                return Trail(tuple(nodes), edges, (True,) * len(edges), FORWARD)
            queue.append(y)
    raise NoExitPath(f"no exit path from latent node {ubar} to an observed node", node=ubar)


def match_subatoms(
    H: AngularMeasure, g: TttGraph, Ubar: Iterable[int], margin: float = RATIO_MARGIN
) -> CoefficientTable:
    """Assign each mass-scaled atom of the observed measure to its generating node."""
    Ubar = _require_criterion(g, Ubar)
    U = tuple(v for v in g.nodes if v not in Ubar)
    if tuple(H.labels) != U:
        raise DimensionMismatch(f"measure is on {tuple(H.labels)}, observed nodes are {U}")
    if len(H) != len(g.nodes):
        raise AtomCountMismatch(f"{len(H)} atoms for {len(g.nodes)} nodes", atoms=len(H), nodes=len(g.nodes))

    beta = H.scaled_atoms()
    Uset = frozenset(U)
    atom_groups: dict[frozenset[int], list[int]] = {}
    for r in range(len(H)):
        atom_groups.setdefault(support_pattern(H.atoms[r], U, ZERO_TOL), []).append(r)
    node_groups: dict[frozenset[int], list[int]] = {}
    for i in g.nodes:
        node_groups.setdefault(g.descendants(i, include_self=True) & Uset, []).append(i)

    assignment: dict[int, int] = {}
    diagnostics: list[dict] = []
    for pattern, atoms in sorted(atom_groups.items(), key=lambda kv: sorted(kv[0])):
        nodes = node_groups.get(pattern, [])
        if len(nodes) != len(atoms):
            raise AtomCountMismatch(
                f"support {sorted(pattern)} carries {len(atoms)} atom(s) but {len(nodes)} node(s)",
                support=sorted(pattern),
            )
        if len(atoms) == 1:
            assignment[atoms[0]] = nodes[0]
            continue
        if len(atoms) > 2:
            raise AtomCountMismatch(f"{len(atoms)} nodes share the support {sorted(pattern)}")
        i, j = nodes
        if g.parents[i] == {j}:
            i, j = j, i
        # structural conclusions that must hold under the criterion
        if g.parents[j] != {i} or i not in Ubar:
            raise AtomCountMismatch(f"nodes {i} and {j} share a support without a latent parent link")
        common = sorted(g.children[i] & g.children[j])
        if not common:
            raise AtomCountMismatch(f"nodes {i} and {j} share a support but no child")
        u = common[0]
        jp = exit_path(g, j, Ubar).end
        up = exit_path(g, u, Ubar).end
        a, b = atoms
        ka, kb = U.index(up), U.index(jp)
        la = math.log(beta[a][ka]) - math.log(beta[a][kb])
        lb = math.log(beta[b][ka]) - math.log(beta[b][kb])
        gap = abs(la - lb)
        if not gap > margin:
            raise UnresolvableTie(
                f"ratio test for nodes {i}, {j} is inconclusive (log-margin {gap:.3g})",
                nodes=[i, j], margin=gap,
            )
        ai, aj = (a, b) if la > lb else (b, a)
        assignment[ai], assignment[aj] = i, j
        diagnostics.append(
            {"parent": i, "child": j, "common_child": u, "proxies": [up, jp], "log_margin": gap}
        )

    values = np.zeros((len(U), len(g.nodes)))
    idx = g.index
    for r, i in assignment.items():
        values[:, idx[i]] = beta[r]
    return CoefficientTable(U, g.nodes, values, assignment, diagnostics)


def recover_theta(
    table: CoefficientTable, g: TttGraph, Ubar: Iterable[int], eps: float = CRITICALITY_EPS
) -> ReconstructionReport:
    """Solve edge weights and diagonal from the observed coefficient rows."""
    Ubar = _require_criterion(g, Ubar)
    if tuple(table.nodes) != g.nodes:
        raise DimensionMismatch(f"table columns {table.nodes} differ from graph nodes {g.nodes}")
    b = table.b

    bdiag: dict[int, float] = {}
    for i in g.topological_order:
        if i not in Ubar:
            bdiag[i] = b(i, i)
            continue
        nodes = exit_path(g, i, Ubar).nodes
        s = nodes[-1]
        P = 1.0  # c_{p(v_k, s)}
        for k in range(len(nodes) - 1, 0, -1):
            c = 1.0 - b(s, nodes[k]) / P
            P *= c
        bdiag[i] = b(s, i) / P

    theta_hat: dict[Edge, float] = {}
    for i, v in sorted(g.edges):
        s = exit_path(g, v, Ubar).end
        theta_hat[(i, v)] = b(s, i) * bdiag[v] / (bdiag[i] * b(s, v))

    try:
        valid = validate_theta(g, theta_hat, eps=eps)
    except ModelError as exc:
        raise InconsistentTable(
            f"recovered weights are not a valid parameter: {exc}", cause=exc.code
        ) from exc
    return ReconstructionReport(
        theta_hat, dict(valid.diag), dict(table.atom_assignment), list(table.diagnostics)
    )


def _sub_stdf_gap(m1: MaxLinearModel, m2: MaxLinearModel, u: int, points: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    k = m1.graph.index[u]
    worst = 0.0
    for _ in range(points):
        x = rng.uniform(0.0, 2.0, size=len(m1.nodes))
        x[k] = 0.0
        worst = max(worst, abs(stdf(m1, x) - stdf(m2, x)))
    return worst


def non_identifiability_witness(
    model: MaxLinearModel,
    u: int,
    lam: float = 1.0 + WITNESS_STEP,
    grid_points: int = 100,
    seed: int = 0,
    tol: float = WITNESS_TOL,
    max_halvings: int = 40,
) -> Witness:
    """An alternative parameter with the same law away from ``u``, when one can be written down.

    Single child: rescale the edges around ``u`` by ``lam``.  Sink: rescale
    its incoming edges.  Otherwise the non-identifiability argument is not
    constructive and the result carries only a diagnostic.
    """
    g = model.graph
    rep = identifiability_check(g, {u})
    if rep.ok:
        raise CriterionSatisfied(f"node {u} satisfies both conditions", node=u)
    kids = g.children[u]
    pa = g.parents[u]
    if len(kids) > 1 or (not kids and not pa):
        why = (
            f"node {u} is not the source of any tournament; non-identifiability holds by a "
            "dimension argument that gives no explicit alternative parameter"
            if kids
            else f"node {u} is isolated; there is no edge to perturb"
        )
        return Witness(u, None, None, None, 0, why)

    base = model.theta.as_dict()
    delta = lam - 1.0
    last: Exception | None = None
    for _ in range(max_halvings):
        try:
            if kids:
                theta_p = scale_witness(model, u, lam)
            else:
                theta_p = dict(base)
                for j in pa:
                    theta_p[(j, u)] *= lam
                validate_theta(g, theta_p)
            break
        except (LeavesParameterSpace, ModelError) as exc:
            last = exc
            delta /= 2.0
            lam = 1.0 + delta
    else:
        raise LeavesParameterSpace(f"no admissible lambda found near 1 for node {u}: {last}", node=u)

    other = MaxLinearModel.from_weights(g, theta_p)
    gap = _sub_stdf_gap(model, other, u, grid_points, seed)
    kind = "single child" if kids else "sink"
    msg = f"{kind}: edges around node {u} rescaled by lambda={lam:.17g}; max stdf gap {gap:.3g}"
    if gap > tol:
        msg += f" exceeds tolerance {tol:g}"
    return Witness(u, theta_p, lam, gap, grid_points, msg)
