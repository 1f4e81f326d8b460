"""Monte Carlo simulation of reflected SDEs on box domains.

Euler-Maruyama with Euclidean projection onto the box (componentwise
clamp), the standard discrete Skorokhod scheme; the reflection process
is tracked only as per-path projection tallies.  Brownian increments
come from counter-based Philox streams keyed by (seed, step_index), so
identical (seed, config) runs are bitwise reproducible regardless of
scheduling.

Coefficient expressions are scalar in x: component i of the drift and
row i of the diffusion see x = X_i, their own coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bl_metric import CesaroDefect, EmpiricalMeasure, cesaro_defect, coarsen, dbl
from .errors import DimensionMismatch, NonFiniteState

SNAP_DIVISIONS = 512


@dataclass(frozen=True)
class BoxDomain:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape:
            raise DimensionMismatch("lower and upper must have the same length")
        if not np.all(lo < hi):
            raise ValueError("need lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class SdeSystem:
    drift: tuple          # d CoefficientFields b_i(t, x_i)
    diffusion: tuple      # d rows of m CoefficientFields sigma_ij(t, x_i)
    period_T: float
    domain: BoxDomain
    brownian_dim: int

    def __post_init__(self):
        drift = tuple(self.drift)
        diffusion = tuple(tuple(row) for row in self.diffusion)
        d = self.domain.dim
        if len(drift) != d:
            raise DimensionMismatch(f"need {d} drift components, got {len(drift)}")
        if len(diffusion) != d or any(len(row) != self.brownian_dim for row in diffusion):
            raise DimensionMismatch(f"diffusion must be {d}x{self.brownian_dim}")
        for f in drift + tuple(f for row in diffusion for f in row):
            if f.period_T is None or abs(f.period_T - self.period_T) > 1e-12 * self.period_T:
                raise ValueError("all coefficients must be declared T-periodic with the system period")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "diffusion", diffusion)


@dataclass
class TrajectoryBatch:
    seed: int
    paths: int
    dt: float
    period_T: float
    snapshots: list            # EmpiricalMeasure at times 0, T, ..., nT
    snapshot_times: np.ndarray
    reflection_counts: np.ndarray  # per-path projection tallies


def _eval_componentwise(fields, t: float, X: np.ndarray) -> np.ndarray:
    """Evaluate field i at (t, X[:, i]) for every path; (M, len(fields))."""
    cols = [np.broadcast_to(np.asarray(f(t=t, x=X[:, i]), dtype=float), (X.shape[0],))
            for i, f in enumerate(fields)]
    return np.stack(cols, axis=1)


def em_reflect_step(x: np.ndarray, t: float, dt: float, dW: np.ndarray,
                    sys: SdeSystem):
    """One projected Euler-Maruyama step for a batch of paths.

    x: (M, d) positions in the closed box; dW: (M, m) Brownian increments.
    Returns (x_next, reflected) where reflected is the per-path bool of
    whether the projection moved the point.
    """
    x = np.atleast_2d(x)
    dW = np.atleast_2d(dW)
    M, d = x.shape
    b = _eval_componentwise(sys.drift, t, x)
    noise = np.zeros((M, d))
    for i in range(d):
        for j in range(sys.brownian_dim):
            sig = np.broadcast_to(
                np.asarray(sys.diffusion[i][j](t=t, x=x[:, i]), dtype=float), (M,))
            noise[:, i] += sig * dW[:, j]
    free = x + b * dt + noise
    if not np.all(np.isfinite(free)):
        raise NonFiniteState("drift/diffusion produced non-finite state")
    projected = sys.domain.project(free)
    reflected = np.any(projected != free, axis=1)
    return projected, reflected


def _step_increments(seed: int, step: int, shape) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, step], dtype=np.uint64)))
    return gen.standard_normal(shape)


def sample_laws(sys: SdeSystem, init, M: int, n_periods: int, dt: float,
                seed: int, snap_resolution: float | None = None) -> TrajectoryBatch:
    """Simulate M paths and record the empirical law at 0, T, ..., nT.

    init is a point (all paths start there), an (M, d) array of starting
    positions, or an EmpiricalMeasure to sample starts from.  Snapshot
    supports are optionally snapped to a grid of resolution
    snap_resolution at emission.
    """
    if M < 1:
        raise ValueError("need at least one path")
    T = sys.period_T
    steps_per_period = int(round(T / dt))
    if steps_per_period < 1 or abs(steps_per_period * dt - T) > 1e-12 * T:
        raise ValueError("dt must divide the period T")
    d = sys.domain.dim

    if isinstance(init, EmpiricalMeasure):
        gen = np.random.Generator(np.random.Philox(
            key=np.array([seed, 2**63], dtype=np.uint64)))
        idx = gen.choice(len(init.weights), size=M, p=init.weights / init.mass)
        X = init.points[idx]
    else:
        init = np.asarray(init, dtype=float)
        X = np.broadcast_to(init, (M, d)).copy() if init.ndim <= 1 else init.copy()
        if X.shape != (M, d):
            raise DimensionMismatch(f"init must broadcast to ({M}, {d})")
    X = sys.domain.project(X)

    sqrt_dt = np.sqrt(dt)
    reflections = np.zeros(M, dtype=np.int64)

    def emit(x):
        m = EmpiricalMeasure(x.copy(), np.full(M, 1.0 / M))
        if snap_resolution is not None:
            m = coarsen(m, snap_resolution)
        return m

    snapshots = [emit(X)]
    step_index = 0
    for _ in range(n_periods):
        for k in range(steps_per_period):
            t = (step_index % steps_per_period) * dt
            dW = sqrt_dt * _step_increments(seed, step_index, (M, sys.brownian_dim))
            X, hit = em_reflect_step(X, t, dt, dW, sys)
            reflections += hit
            step_index += 1
        snapshots.append(emit(X))
    times = np.arange(n_periods + 1) * T
    return TrajectoryBatch(seed=seed, paths=M, dt=dt, period_T=T,
                           snapshots=snapshots, snapshot_times=times,
                           reflection_counts=reflections)


def lipschitz_report(sys: SdeSystem, samples: int = 1000, seed: int = 0) -> dict:
    """Sampled estimates of the Lipschitz/growth quotients of b and sigma.

    Purely diagnostic: the four quotients are maximized over random
    (t, x, y) triples in [0, T) x box x box.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    lo, hi = sys.domain.lower, sys.domain.upper
    ts = gen.uniform(0.0, sys.period_T, samples)
    xs = gen.uniform(lo, hi, (samples, sys.domain.dim))
    ys = gen.uniform(lo, hi, (samples, sys.domain.dim))

    drift_lip = sigma_lip = drift_growth = sigma_growth = 0.0
    for t, x, y in zip(ts, xs, ys):
        bx = _eval_componentwise(sys.drift, t, x[None, :])[0]
        by = _eval_componentwise(sys.drift, t, y[None, :])[0]
        sx = np.array([[float(np.asarray(sys.diffusion[i][j](t=t, x=x[i])))
                        for j in range(sys.brownian_dim)]
                       for i in range(sys.domain.dim)])
        sy = np.array([[float(np.asarray(sys.diffusion[i][j](t=t, x=y[i])))
                        for j in range(sys.brownian_dim)]
                       for i in range(sys.domain.dim)])
        gap = float(np.linalg.norm(x - y))
        if gap > 1e-12:
            drift_lip = max(drift_lip, float(np.linalg.norm(bx - by)) / gap)
            sigma_lip = max(sigma_lip, float(np.linalg.norm(sx - sy)) / gap)
        growth_cap = float(np.sqrt(1.0 + np.dot(x, x)))
        drift_growth = max(drift_growth, float(np.linalg.norm(bx)) / growth_cap)
        sigma_growth = max(sigma_growth, float(np.linalg.norm(sx)) / growth_cap)
    return {"drift_lipschitz": drift_lip, "sigma_lipschitz": sigma_lip,
            "drift_growth": drift_growth, "sigma_growth": sigma_growth,
            "samples": samples}


def periodicity_diagnostic(batch: TrajectoryBatch, burn_in: int,
                           snap_resolution: float | None = None) -> dict:
    """Theorem-style periodicity diagnostics over post-burn-in snapshots.

    Reports the Cesaro defect (the unrestricted one-period-apart average,
    which dominates the indicator-weighted variant; both are included),
    the max pairwise d_BL among the last 5 snapshots, and the empirical
    second moment at each retained snapshot time.
    """
    laws = batch.snapshots[burn_in:]
    if len(laws) < 2:
        raise ValueError("need more snapshots than burn_in + 1")
    if snap_resolution is not None:
        laws = [coarsen(m, snap_resolution) for m in laws]
    defect: CesaroDefect = cesaro_defect(laws)
    tail = laws[-5:]
    max_pairwise = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            max_pairwise = max(max_pairwise, dbl(tail[i], tail[j]).distance)
    second_moments = np.array([
        float(np.sum(m.weights * np.sum(m.points**2, axis=1)) / m.mass)
        for m in batch.snapshots])
    return {"defect": defect.unrestricted,
            "defect_restricted": defect.restricted,
            "defect_terms": defect.terms,
            "max_pairwise_tail_dbl": max_pairwise,
            "second_moments": second_moments,
            "burn_in": burn_in}


def density_to_measure(density) -> EmpiricalMeasure:
    """Grid density -> weighted point cloud at the cell centers."""
    w = density.values * density.grid.dx
    w = np.clip(w, 0.0, None)
    return EmpiricalMeasure(density.grid.centers[:, None], w / w.sum() * density.mass)
