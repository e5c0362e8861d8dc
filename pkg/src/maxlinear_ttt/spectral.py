"""Discrete angular (spectral) measures of a max-linear model and its sub-vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AmbiguousSupport, DimensionMismatch, EmptyU, UnknownNode
from .graph import Edge, TttGraph
from .laws import DiscreteLaw, merge_atoms
from .model import MaxLinearModel

ZERO_TOL = 1e-10
ZERO_MASS_TOL = 1e-12
ATOM_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class AngularMeasure:
    """Atoms on the unit simplex over ``law.labels`` with their masses.

    ``node_of_atom[r]`` is the node generating atom ``r`` once matched.
    """

    law: DiscreteLaw
    node_of_atom: tuple[int, ...] | None = None

    @property
    def labels(self) -> tuple[int, ...]:
        return self.law.labels

    @property
    def atoms(self) -> np.ndarray:
        return self.law.atoms

    @property
    def masses(self) -> np.ndarray:
        return self.law.masses

    def __len__(self) -> int:
        return len(self.law)

    @property
    def total_mass(self) -> float:
        return self.law.total_mass

    def scaled_atoms(self) -> np.ndarray:
        """``beta_r = mu_r * omega_r``, the coefficient vectors behind each atom."""
        return self.atoms * self.masses[:, None]

    @classmethod
    def from_pairs(cls, labels: Sequence[int], pairs: Iterable[tuple[Sequence[float], float]]) -> "AngularMeasure":
        pairs = list(pairs)
        atoms = np.array([a for a, _ in pairs], dtype=float).reshape(-1, len(labels))
        masses = np.array([m for _, m in pairs], dtype=float)
        return cls(DiscreteLaw(tuple(labels), atoms, masses))


def angular_measure(model: MaxLinearModel) -> AngularMeasure:
    """``H = sum_i m_i delta_{a_i}`` with ``m_i = sum_v b_vi`` and ``a_i = b_.i / m_i``."""
    B = model.B
    masses = B.sum(axis=0)
    atoms = (B / masses[None, :]).T
    H = AngularMeasure(DiscreteLaw(model.nodes, atoms, masses))
    matching = match_atoms_full(H, model.graph)
    return AngularMeasure(H.law, tuple(matching[r] for r in range(len(H))))


def subvector_measure(
    model: MaxLinearModel,
    U: Iterable[int],
    drop_below: float = ZERO_MASS_TOL,
    decimals: int = ATOM_DECIMALS,
) -> AngularMeasure:
    """Angular measure of ``X_U``: zero-mass indices dropped, equal atoms merged."""
    U = sorted(set(U))
    if not U:
        raise EmptyU("the observed set U must be nonempty")
    idx = model.graph.index
    for v in U:
        if v not in idx:
            raise UnknownNode(f"node {v} is not in the graph", node=v)
    sub = model.B[[idx[v] for v in U], :]
    masses = sub.sum(axis=0)
    keep = masses > drop_below
    atoms = (sub[:, keep] / masses[keep][None, :]).T
    merged = merge_atoms(atoms, masses[keep], decimals)
    law = DiscreteLaw(
        tuple(U),
        np.array([a for a, _ in merged.values()]).reshape(-1, len(U)),
        np.array([m for _, m in merged.values()]),
    )
    return AngularMeasure(law)


def support_pattern(atom: Sequence[float], labels: Sequence[int] | None = None, tol: float = ZERO_TOL) -> frozenset[int]:
    """Labels (or positions) of the strictly positive coordinates of ``atom``."""
    atom = np.asarray(atom, dtype=float)
    if labels is None:
        labels = range(len(atom))
    elif len(labels) != len(atom):
        raise DimensionMismatch(f"atom has {len(atom)} coordinates, {len(labels)} labels given")
    return frozenset(l for l, a in zip(labels, atom) if a > tol)


def match_atoms_full(H: AngularMeasure, g: TttGraph, tol: float = ZERO_TOL) -> dict[int, int]:
    """Map atom index -> node by matching supports to descendant sets."""
    if tuple(H.labels) != g.nodes:
        raise DimensionMismatch(f"measure is on {H.labels}, graph nodes are {g.nodes}")
    by_desc = {g.descendants(i, include_self=True): i for i in g.nodes}
    out: dict[int, int] = {}
    for r, atom in enumerate(H.atoms):
        pattern = support_pattern(atom, H.labels, tol)
        node = by_desc.get(pattern)
        if node is None:
            raise AmbiguousSupport(
                f"atom {r} has support {sorted(pattern)}, which is no node's descendant set",
                atom=r, support=sorted(pattern),
            )
        if node in out.values():
            raise AmbiguousSupport(f"two atoms share the support of node {node}", node=node)
        out[r] = node
    if len(out) != len(g.nodes):
        raise AmbiguousSupport(f"{len(out)} atoms for {len(g.nodes)} nodes")
    return out


def weights_from_full_measure(H: AngularMeasure, g: TttGraph) -> tuple[dict[Edge, float], dict[int, float]]:
    """Edge weights ``c_iv = a_vi / a_ii`` and diagonal ``b_ii`` from a full measure."""
    matching = match_atoms_full(H, g)
    beta = H.scaled_atoms()
    col = {node: beta[r] for r, node in matching.items()}
    idx = g.index
    weights = {(i, v): float(col[i][idx[v]] / col[i][idx[i]]) for i, v in sorted(g.edges)}
    diag = {i: float(col[i][idx[i]]) for i in g.nodes}
    return weights, diag


def stdf_from_measure(H: AngularMeasure, x: Mapping[int, float] | Sequence[float]) -> float:
    """``sum_r mu_r max_v omega_rv x_v``."""
    if isinstance(x, Mapping):
        xv = np.array([x.get(v, 0.0) for v in H.labels], dtype=float)
    else:
        xv = np.asarray(x, dtype=float)
        if xv.shape != (len(H.labels),):
            raise DimensionMismatch(f"expected {len(H.labels)} coordinates, got shape {xv.shape}")
    return float((H.masses * (H.atoms * xv[None, :]).max(axis=1)).sum())
