"""Finitely supported laws on labelled real vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    """Atoms (rows of ``atoms``) with positive ``masses``.

    ``labels`` names the coordinates.  Probability laws have masses summing to
    one; angular measures carry their total mass instead.
    """

    labels: tuple[int, ...]
    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.size != masses.shape[0] * len(self.labels):
            raise DimensionMismatch(
                f"{atoms.size} atom coordinates for {masses.shape[0]} masses "
                f"in dimension {len(self.labels)}"
            )
        atoms = atoms.reshape(masses.shape[0], len(self.labels))
        atoms.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def canonical(self, decimals: int = 12, drop_below: float = 0.0) -> "DiscreteLaw":
        """Merge atoms that agree after rounding; order atoms lexicographically."""
        merged = merge_atoms(self.atoms, self.masses, decimals)
        keys = sorted(merged)
        masses = np.array([merged[k][1] for k in keys], dtype=float)
        atoms = np.array([merged[k][0] for k in keys], dtype=float).reshape(len(keys), self.dim)
        keep = masses > drop_below
        return DiscreteLaw(self.labels, atoms[keep], masses[keep])

    def marginal(self, label: int, decimals: int = 12) -> "DiscreteLaw":
        k = self.labels.index(label)
        return DiscreteLaw((label,), self.atoms[:, [k]], self.masses).canonical(decimals)

    def as_dict(self, decimals: int = 12) -> dict[tuple[float, ...], float]:
        return {k: m for k, (_, m) in merge_atoms(self.atoms, self.masses, decimals).items()}

    def __repr__(self) -> str:
        rows = ", ".join(
            f"{tuple(float(x) for x in np.round(a, 6))}: {m:.6g}" for a, m in zip(self.atoms, self.masses)
        )
        return f"DiscreteLaw(labels={self.labels}, {{{rows}}})"


def _key(row: np.ndarray, decimals: int) -> tuple[float, ...]:
    # +0.0 folds negative zero into zero
    return tuple(float(x) + 0.0 for x in np.round(row, decimals))


def merge_atoms(
    atoms: np.ndarray, masses: Sequence[float], decimals: int = 12
) -> dict[tuple[float, ...], list]:
    """Group rows equal after rounding; first occurrence keeps its coordinates."""
    out: dict[tuple[float, ...], list] = {}
    for row, m in zip(np.asarray(atoms), masses):
        k = _key(row, decimals)
        if k in out:
            out[k][1] += float(m)
        else:
            out[k] = [np.array(row, dtype=float), float(m)]
    return out


class LawComparison(NamedTuple):
    equal: bool
    tv_distance: float


def tv_distance(l1: DiscreteLaw, l2: DiscreteLaw, decimals: int = 9) -> float:
    if l1.labels != l2.labels:
        raise DimensionMismatch(
            f"coordinate labels differ: {l1.labels} vs {l2.labels}",
        )
    d1 = l1.as_dict(decimals)
    d2 = l2.as_dict(decimals)
    return 0.5 * sum(abs(d1.get(k, 0.0) - d2.get(k, 0.0)) for k in d1.keys() | d2.keys())


def laws_equal(l1: DiscreteLaw, l2: DiscreteLaw, tol: float = 1e-9, decimals: int = 9) -> LawComparison:
    """Compare two laws on the same coordinates by total variation."""
    tv = tv_distance(l1, l2, decimals)
    return LawComparison(tv <= tol, tv)
