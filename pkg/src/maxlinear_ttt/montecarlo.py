"""Simulation of max-linear models and empirical checks of the tail limits.

Sampling is chunked: chunk ``k`` draws from ``default_rng([seed, k])``, so a
batch is reproducible from ``(model, n, seed)`` and chunks can be produced
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidArgument, TooFewExceedances
from .laws import DiscreteLaw
from .limits import direct_limit
from .model import MaxLinearModel

CHUNK = 1 << 16
MIN_EXCEEDANCES = 200
CLUSTER_RADIUS = 0.1
# Lower quantiles bias atom locations by O(1/r); higher ones leave too few
# points for stable masses.  0.98 balanced the two over a 40-seed sweep at n=2e5.
ANGULAR_QUANTILE = 0.98

_U_LO = np.nextafter(0.0, 1.0)
_U_HI = np.nextafter(1.0, 0.0)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    model: MaxLinearModel
    X: np.ndarray  # n x |V|, columns in node order
    seed: int

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def labels(self) -> tuple[int, ...]:
        return self.model.nodes

    def column(self, v: int) -> np.ndarray:
        return self.X[:, self.model.graph.index[v]]


def unit_frechet(rng: np.random.Generator, shape) -> np.ndarray:
    U = np.clip(rng.random(shape), _U_LO, _U_HI)
    return -1.0 / np.log(U)


def sample(model: MaxLinearModel, n: int, seed: int, chunk: int = CHUNK) -> SampleBatch:
    """``n`` replicates of ``X_v = max_i b_vi Z_i``."""
    if n < 1:
        raise InvalidArgument(f"sample size must be at least 1, got {n}", n=n)
    d = len(model.nodes)
    Bt = model.B.T  # (i, v)
    out = np.empty((n, d))
    for k, start in enumerate(range(0, n, chunk)):
        stop = min(start + chunk, n)
        Z = unit_frechet(np.random.default_rng([seed, k]), (stop - start, d))
        out[start:stop] = (Z[:, :, None] * Bt[None, :, :]).max(axis=1)
    out.setflags(write=False)
    return SampleBatch(model, out, seed)


@dataclass(frozen=True)
class Clustering:
    law: DiscreteLaw
    stray_mass: float


def cluster_to_atoms(
    points: np.ndarray,
    weights: np.ndarray,
    centers: DiscreteLaw,
    radius: float = CLUSTER_RADIUS,
    mean_location: bool = False,
) -> Clustering:
    """Snap points to the nearest center (max-norm) within ``radius``.

    Stray points keep their own coordinates and are summed into ``stray_mass``.
    With ``mean_location`` each cluster sits at the weighted mean of its
    points instead of at the center.
    """
    weights = np.asarray(weights, dtype=float)
    points = np.asarray(points, dtype=float).reshape(len(weights), centers.dim)
    if len(centers) == 0:
        return Clustering(DiscreteLaw(centers.labels, points, weights), float(weights.sum()))
    dist = np.abs(points[:, None, :] - centers.atoms[None, :, :]).max(axis=2)
    nearest = dist.argmin(axis=1)  # first index wins ties; centers are sorted
    ok = dist[np.arange(len(points)), nearest] <= radius
    atoms, masses = [], []
    for c in range(len(centers)):
        sel = ok & (nearest == c)
        w = weights[sel].sum()
        if w <= 0:
            continue
        loc = np.average(points[sel], axis=0, weights=weights[sel]) if mean_location else centers.atoms[c]
        atoms.append(loc)
        masses.append(w)
    stray = ~ok
    atoms.extend(points[stray])
    masses.extend(weights[stray])
    law = DiscreteLaw(centers.labels, np.array(atoms, dtype=float).reshape(len(masses), centers.dim), np.array(masses))
    return Clustering(law, float(weights[stray].sum()))


@dataclass(frozen=True)
class ConditionalEstimate:
    law: DiscreteLaw
    exact: DiscreteLaw
    threshold: float
    exceedances: int
    stray_mass: float

    @property
    def tv(self) -> float:
        return tv_to_law(self.law, self.exact)


def empirical_conditional(
    batch: SampleBatch,
    u: int,
    q: float,
    min_exceedances: int = MIN_EXCEEDANCES,
    radius: float = CLUSTER_RADIUS,
) -> ConditionalEstimate:
    """Empirical law of ``(X_v / X_u)_{v != u}`` given ``X_u > -1/log q``, clustered."""
    if not 0.0 < q < 1.0:
        raise InvalidArgument(f"q must lie in (0, 1), got {q}", q=q)
    model = batch.model
    model.graph._check(u)
    t = -1.0 / math.log(q)
    xu = batch.column(u)
    hit = xu > t
    k = int(hit.sum())
    if k < min_exceedances:
        raise TooFewExceedances(
            f"{k} exceedances of t={t:.6g}, need at least {min_exceedances}",
            exceedances=k, needed=min_exceedances,
        )
    exact = direct_limit(model, u).law
    cols = [model.graph.index[v] for v in exact.labels]
    ratios = batch.X[hit][:, cols] / xu[hit][:, None]
    cl = cluster_to_atoms(ratios, np.full(k, 1.0 / k), exact, radius)
    return ConditionalEstimate(cl.law, exact, t, k, cl.stray_mass)


def empirical_angular(
    batch: SampleBatch,
    radius_quantile: float = ANGULAR_QUANTILE,
    min_exceedances: int = MIN_EXCEEDANCES,
) -> DiscreteLaw:
    """Simplex points ``X / |X|_1`` of the exceedances over the empirical radius quantile.

    Each point weighs ``r / n``, so the total estimates the angular mass
    ``sum_i m_i``, which is ``|V|`` under unit-Frechet margins.
    """
    if not 0.0 < radius_quantile < 1.0:
        raise InvalidArgument(f"radius quantile must lie in (0, 1), got {radius_quantile}")
    norm = batch.X.sum(axis=1)
    r = float(np.quantile(norm, radius_quantile))
    hit = norm > r
    k = int(hit.sum())
    if k < min_exceedances:
        raise TooFewExceedances(
            f"{k} radius exceedances, need at least {min_exceedances}",
            exceedances=k, needed=min_exceedances,
        )
    pts = batch.X[hit] / norm[hit][:, None]
    return DiscreteLaw(batch.labels, pts, np.full(k, r / batch.n))


def tv_to_law(empirical: DiscreteLaw, exact: DiscreteLaw, radius: float = CLUSTER_RADIUS) -> float:
    """TV distance after snapping empirical atoms to exact ones.

    Empirical mass farther than ``radius`` from every exact atom counts as
    fully mismatched, so disjoint supports give 1.
    """
    if empirical.labels != exact.labels:
        raise DimensionMismatch(f"coordinate labels differ: {empirical.labels} vs {exact.labels}")
    exact = exact.canonical()
    if len(exact) == 0 or len(empirical) == 0:
        return 1.0 if (len(exact) or len(empirical)) else 0.0
    dist = np.abs(empirical.atoms[:, None, :] - exact.atoms[None, :, :]).max(axis=2)
    nearest = dist.argmin(axis=1)
    ok = dist[np.arange(len(empirical)), nearest] <= radius
    p_hat = np.bincount(nearest[ok], weights=empirical.masses[ok], minlength=len(exact))
    tv = 0.5 * (np.abs(p_hat - exact.masses).sum() + empirical.masses[~ok].sum())
    return float(min(max(tv, 0.0), 1.0))
