"""Exact bounded-Lipschitz distance between finitely supported measures.

d_BL(mu, nu) = sup { |integral h d(mu - nu)| : ||h||_inf <= 1, Lip(h) <= 1 }.

On the merged support {z_i} this is the linear program

    maximize   sum_i c_i h_i,   c_i = mu({z_i}) - nu({z_i})
    subject to -1 <= h_i <= 1,  |h_i - h_j| <= ||z_i - z_j||_2.

The feasible set is symmetric under h -> -h, so the maximum already
equals the supremum of the absolute value.  Sub-probability measures
(total mass < 1) are allowed; the LP is linear in the weights, so
d_BL(c*mu, c*nu) = c*d_BL(mu, nu).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import DimensionMismatch, SolverFailure

MASS_TOL = 1e-12


@dataclass(frozen=True)
class EmpiricalMeasure:
    points: np.ndarray   # (n, d)
    weights: np.ndarray  # (n,), nonnegative

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if pts.shape[0] != w.shape[0]:
            raise DimensionMismatch(f"{pts.shape[0]} points but {w.shape[0]} weights")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def scaled(self, c: float) -> "EmpiricalMeasure":
        return EmpiricalMeasure(self.points, c * self.weights)

    @classmethod
    def dirac(cls, point) -> "EmpiricalMeasure":
        return cls(np.atleast_2d(np.asarray(point, dtype=float)), np.array([1.0]))

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalMeasure":
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        n = samples.shape[0]
        return cls(samples, np.full(n, 1.0 / n))


@dataclass(frozen=True)
class BLResult:
    distance: float
    witness: np.ndarray        # optimal h_i at each merged-support point
    support: np.ndarray        # (K, d) merged support the witness lives on
    status: str                # 'optimal' or 'iteration_limit'


def coarsen(measure: EmpiricalMeasure, resolution: float) -> EmpiricalMeasure:
    """Snap support points to a grid of the given resolution, merging weights.

    Lipschitz-1 test functions give a coarsening error of at most
    2*resolution in d_BL.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    snapped = np.round(measure.points / resolution) * resolution
    uniq, inverse = np.unique(snapped, axis=0, return_inverse=True)
    w = np.zeros(len(uniq))
    np.add.at(w, inverse.ravel(), measure.weights)
    return EmpiricalMeasure(uniq, w)


def _merge_support(mu: EmpiricalMeasure, nu: EmpiricalMeasure):
    pts = np.vstack([mu.points, nu.points])
    signed = np.concatenate([mu.weights, -nu.weights])
    uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
    c = np.zeros(len(uniq))
    np.add.at(c, inverse.ravel(), signed)
    return uniq, c


def dbl(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> BLResult:
    """Bounded-Lipschitz distance via an explicit LP on the merged support."""
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"measures live in dimensions {mu.dim} and {nu.dim}")
    support, c = _merge_support(mu, nu)
    K = len(support)
    if K == 1 or np.max(np.abs(c)) == 0.0:
        # identical supports with cancelling weights, or a single point:
        # the optimum is |sum c| from the cap ||h||_inf <= 1
        h = np.ones(K) if c.sum() >= 0 else -np.ones(K)
        return BLResult(distance=abs(float(c.sum())), witness=h, support=support,
                        status="optimal")

    diff = support[:, None, :] - support[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    iu, ju = np.triu_indices(K, k=1)

    # rows: h_i - h_j <= d_ij and h_j - h_i <= d_ij
    n_pairs = len(iu)
    rows = np.repeat(np.arange(2 * n_pairs), 2)
    cols = np.empty(4 * n_pairs, dtype=int)
    data = np.empty(4 * n_pairs)
    cols[0::4], cols[1::4] = iu, ju
    cols[2::4], cols[3::4] = ju, iu
    data[0::4] = 1.0
    data[1::4] = -1.0
    data[2::4] = 1.0
    data[3::4] = -1.0
    A_ub = sparse.csr_matrix((data, (rows, cols)), shape=(2 * n_pairs, K))
    b_ub = np.repeat(dist[iu, ju], 2)

    res = linprog(-c, A_ub=A_ub, b_ub=b_ub, bounds=(-1.0, 1.0), method="highs")
    if res.status == 1:
        return BLResult(distance=float(-res.fun), witness=res.x, support=support,
                        status="iteration_limit")
    if res.status != 0:
        raise SolverFailure(f"LP failed with status {res.status}: {res.message}")
    return BLResult(distance=float(-res.fun), witness=res.x, support=support,
                    status="optimal")


@dataclass(frozen=True)
class CesaroDefect:
    restricted: float      # sum_m p_m * d_BL(p_m law_{m+1}, p_m law_m)
    unrestricted: float    # (1/(n+1)) sum_m d_BL(law_{m+1}, law_m), dominates
    terms: np.ndarray      # per-index unscaled distances d_BL(law_{m+1}, law_m)


def cesaro_defect(laws, weights=None) -> CesaroDefect:
    """Averaged one-period-apart d_BL over a sequence of law snapshots.

    laws[m] is the law at time m*T.  With uniform weights
    p_m = 1/(n+1), the restricted value is the indicator-weighted
    quantity (sub-probability reading of the randomized-start events);
    the unrestricted average always dominates it.
    """
    laws = list(laws)
    n = len(laws) - 1
    if n < 1:
        raise ValueError("need at least 2 laws")
    if weights is None:
        p = np.full(n, 1.0 / (n + 1))
    else:
        p = np.asarray(weights, dtype=float)
        if p.shape[0] != n:
            raise DimensionMismatch(f"need {n} weights, got {p.shape[0]}")
    terms = np.array([dbl(laws[m + 1], laws[m]).distance for m in range(n)])
    restricted = float(np.sum(p * p * terms))  # p_m * d_BL of the p_m-scaled pair
    unrestricted = float(np.sum(terms) / (n + 1))
    return CesaroDefect(restricted=restricted, unrestricted=unrestricted, terms=terms)
