"""Time-periodic semilinear problems by monotone upper/lower iteration.

Problem: d_t u + A(t) u = f(t, x, u) with T-periodic data, where A(t)
is the (non-divergence or divergence) elliptic part assembled by
fpe_grid, so the marching form is du/dt = L(t) u + f.

The constructive scheme is the classical c-shift iteration: given an
iterate u^k, solve the linear periodic problem

    d_t v + (A(t) + c) v = f(t, x, u^k) + c u^k

with c >= sup |df/du|.  Starting from an upper solution the iterates
decrease, from a lower solution they increase, and both limits squeeze
the periodic solution; the limit gap certifies uniqueness empirically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve, solve_banded

from .coeff_dsl import CoefficientField
from .errors import (MonotonicityViolation, NotConverged, SingularSystem)
from .fpe_grid import (BoundaryCondition, DensityField, FpCoefficients, Grid1D,
                       assemble_generator)
from .period_map import _is_static, power_iteration

SPR_SINGULAR_MARGIN = 1e-8
MONOTONE_SLACK = 1e-10


@dataclass(frozen=True)
class SemilinearProblem:
    coeffs: FpCoefficients          # elliptic part incl. optional a0
    f: CoefficientField             # source f(t, x, u)
    bc: BoundaryCondition
    T: float
    grid: Grid1D
    form: str = "nondivergence"


@dataclass(frozen=True)
class OrderedPair:
    lower: DensityField
    upper: DensityField

    def __post_init__(self):
        if np.any(self.lower.values > self.upper.values):
            raise ValueError("need lower <= upper pointwise")


@dataclass
class PeriodicLinearSolver:
    """Solver for d_t v + (A(t) + c) v = g(t, x), v(0) = v(T).

    Precomputes the per-step Crank-Nicolson operators and the one-period
    homogeneous map K_c, then solves (I - K_c) v0 = w where w is the
    one-period evolution of zero data under the source.
    """

    grid: Grid1D
    coeffs: FpCoefficients
    bc: BoundaryCondition
    T: float
    dt: float
    c: float = 0.0
    form: str = "nondivergence"

    def __post_init__(self):
        self.n_steps = int(round(self.T / self.dt))
        if abs(self.n_steps * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError("dt must divide T")
        n = self.grid.n_cells
        static = _is_static(self.coeffs)
        self._explicit = []   # (I + dt/2 (L - c)) per step
        self._implicit = []   # banded (I - dt/2 (L - c)) per step
        L = None
        for k in range(self.n_steps):
            if L is None or not static:
                t_half = (k + 0.5) * self.dt
                L = assemble_generator(self.grid, self.coeffs, t_half, self.bc,
                                       self.form)
                Lc_diag = L.diag - self.c
                expl = np.zeros((3, n))
                expl[0, 1:] = (self.dt / 2) * L.upper[:-1]
                expl[1, :] = 1.0 + (self.dt / 2) * Lc_diag
                expl[2, :-1] = (self.dt / 2) * L.lower[1:]
                impl = np.zeros((3, n))
                impl[0, 1:] = -(self.dt / 2) * L.upper[:-1]
                impl[1, :] = 1.0 - (self.dt / 2) * Lc_diag
                impl[2, :-1] = -(self.dt / 2) * L.lower[1:]
            self._explicit.append(expl)
            self._implicit.append(impl)
        self.K = self._evolve(np.eye(n), None)
        spec = power_iteration(self.K, tol=1e-12, T=self.T)
        self.spr = spec.r
        if self.spr >= 1.0 - SPR_SINGULAR_MARGIN:
            raise SingularSystem(
                f"homogeneous period map has spr {self.spr:.8f} >= 1; "
                "periodic problem not uniquely solvable")
        self._lu = lu_factor(np.eye(n) - self.K)

    @staticmethod
    def _apply_banded(ab: np.ndarray, V: np.ndarray) -> np.ndarray:
        out = ab[1][:, None] * V if V.ndim == 2 else ab[1] * V
        if V.ndim == 2:
            out[:-1] += ab[0, 1:, None] * V[1:]
            out[1:] += ab[2, :-1, None] * V[:-1]
        else:
            out[:-1] += ab[0, 1:] * V[1:]
            out[1:] += ab[2, :-1] * V[:-1]
        return out

    def _evolve(self, V, source):
        """One period forward; source[k] is the half-step source of step k."""
        V = np.array(V, dtype=float)
        for k in range(self.n_steps):
            rhs = self._apply_banded(self._explicit[k], V)
            if source is not None:
                rhs = rhs + self.dt * source[k]
            V = solve_banded((1, 1), self._implicit[k], rhs)
        return V

    def solve(self, source: np.ndarray):
        """source: (n_steps, n) half-step values of g.  Returns (u0, trajectory).

        trajectory has shape (n_steps + 1, n) with trajectory[0] = u0 and
        trajectory[-1] the recomputed end state (periodicity residual is
        ||trajectory[-1] - u0||_inf, bounded by the linear-solve accuracy).
        """
        w = self._evolve(np.zeros(self.grid.n_cells), source)
        u0 = lu_solve(self._lu, w)
        traj = np.empty((self.n_steps + 1, self.grid.n_cells))
        traj[0] = u0
        v = u0.copy()
        for k in range(self.n_steps):
            rhs = self._apply_banded(self._explicit[k], v) + self.dt * source[k]
            v = solve_banded((1, 1), self._implicit[k], rhs)
            traj[k + 1] = v
        return u0, traj


def poincare_solve(grid: Grid1D, coeffs: FpCoefficients, bc: BoundaryCondition,
                   T: float, dt: float, source, c: float = 0.0,
                   form: str = "nondivergence"):
    """Solve the linear periodic problem d_t v + (A(t) + c) v = g.

    source is either an (n_steps, n) array of half-step values or a
    callable g(t, x) evaluated at the half steps.  Returns
    (u0, trajectory, periodicity_residual).
    """
    solver = PeriodicLinearSolver(grid, coeffs, bc, T, dt, c=c, form=form)
    n_steps = solver.n_steps
    if callable(source):
        xs = grid.centers
        source = np.stack([np.broadcast_to(
            np.asarray(source((k + 0.5) * dt, xs), dtype=float), xs.shape)
            for k in range(n_steps)])
    else:
        source = np.asarray(source, dtype=float)
        if source.shape != (n_steps, grid.n_cells):
            raise ValueError(f"source must be ({n_steps}, {grid.n_cells})")
    u0, traj = solver.solve(source)
    residual = float(np.max(np.abs(traj[-1] - traj[0])))
    return u0, traj, residual


def estimate_c(problem: SemilinearProblem, u_min: float, u_max: float,
               margin: float = 1.5, n_t: int = 32, n_u: int = 32) -> float:
    """sup |df/du| by central differences on a (t, x, u) sample lattice."""
    ts = np.linspace(0.0, problem.T, n_t, endpoint=False)
    us = np.linspace(u_min, u_max, n_u)
    xs = problem.grid.centers
    h = max(1e-6, 1e-6 * (abs(u_max) + abs(u_min)))
    worst = 0.0
    for t in ts:
        for u in us:
            fp = np.asarray(problem.f(t=t, x=xs, u=u + h), dtype=float)
            fm = np.asarray(problem.f(t=t, x=xs, u=u - h), dtype=float)
            worst = max(worst, float(np.max(np.abs(fp - fm))) / (2 * h))
    return margin * worst


def _source_from_trajectory(problem: SemilinearProblem, traj: np.ndarray,
                            c: float, dt: float) -> np.ndarray:
    """g[k] = f(t_half, x, u_half) + c u_half with u_half = (u_k + u_{k+1})/2."""
    n_steps = traj.shape[0] - 1
    xs = problem.grid.centers
    out = np.empty((n_steps, problem.grid.n_cells))
    for k in range(n_steps):
        u_half = (traj[k] + traj[k + 1]) / 2
        t_half = (k + 0.5) * dt
        fval = np.broadcast_to(
            np.asarray(problem.f(t=t_half, x=xs, u=u_half), dtype=float), xs.shape)
        out[k] = fval + c * u_half
    return out


@dataclass
class MonotoneResult:
    solution0: DensityField          # periodic solution profile at t = 0
    trajectory: np.ndarray           # (n_steps + 1, n)
    gap: float                       # sup |upper limit - lower limit|
    iterations: int
    deltas_upper: list
    deltas_lower: list
    periodicity_residual: float
    c: float


def monotone_iterate(problem: SemilinearProblem, pair: OrderedPair, dt: float,
                     c: Optional[float] = None, tol: float = 1e-8,
                     max_iter: int = 500) -> MonotoneResult:
    """Monotone iteration between ordered lower and upper solutions."""
    lo0, up0 = pair.lower.values, pair.upper.values
    if c is None:
        c = estimate_c(problem, float(lo0.min()), float(up0.max()))
    if c < 0:
        raise ValueError("c must be nonnegative")
    if problem.bc.kind == "absorbing":
        _warn_boundary_compatibility(problem)
    solver = PeriodicLinearSolver(problem.grid, problem.coeffs, problem.bc,
                                  problem.T, dt, c=c, form=problem.form)
    n_steps = solver.n_steps

    traj_up = np.tile(up0, (n_steps + 1, 1))
    traj_lo = np.tile(lo0, (n_steps + 1, 1))
    deltas_up, deltas_lo = [], []
    residual = np.inf
    for it in range(1, max_iter + 1):
        new_up = solver.solve(_source_from_trajectory(problem, traj_up, c, dt))[1]
        new_lo = solver.solve(_source_from_trajectory(problem, traj_lo, c, dt))[1]
        if it > 1:
            # after the first correction the sequences must be monotone
            if np.any(new_up > traj_up + MONOTONE_SLACK):
                raise MonotonicityViolation(
                    "upper iterates increased; c is too small")
            if np.any(new_lo < traj_lo - MONOTONE_SLACK):
                raise MonotonicityViolation(
                    "lower iterates decreased; c is too small")
        if np.any(new_lo > new_up + MONOTONE_SLACK):
            raise MonotonicityViolation("iterates crossed; c is too small")
        d_up = float(np.max(np.abs(new_up - traj_up)))
        d_lo = float(np.max(np.abs(new_lo - traj_lo)))
        deltas_up.append(d_up)
        deltas_lo.append(d_lo)
        traj_up, traj_lo = new_up, new_lo
        # the limits coincide for a unique solution, so both the step
        # sizes and the two-sided gap must fall below tol
        if max(d_up, d_lo) <= tol and \
                float(np.max(np.abs(traj_up - traj_lo))) <= tol:
            break
    else:
        raise NotConverged(max_iter, max(deltas_up[-1], deltas_lo[-1]))

    gap = float(np.max(np.abs(traj_up - traj_lo)))
    residual = float(np.max(np.abs(traj_up[-1] - traj_up[0])))
    return MonotoneResult(
        solution0=DensityField(problem.grid, traj_up[0]),
        trajectory=traj_up, gap=gap, iterations=it,
        deltas_upper=deltas_up, deltas_lower=deltas_lo,
        periodicity_residual=residual, c=c)


def _warn_boundary_compatibility(problem: SemilinearProblem):
    # Dirichlet case needs f(t, x, 0) = 0 on the boundary; only warn,
    # since no remedy is prescribed when it fails.
    for xb in (problem.grid.x_left, problem.grid.x_right):
        vals = [float(np.asarray(problem.f(t=t, x=xb, u=0.0)))
                for t in np.linspace(0.0, problem.T, 8, endpoint=False)]
        if max(abs(v) for v in vals) > 1e-9:
            warnings.warn(
                f"f(t, {xb}, 0) != 0 on the boundary (max {max(map(abs, vals)):.2e}); "
                "Dirichlet compatibility is violated", stacklevel=3)
            break


def verify_upper_lower(candidate, problem: SemilinearProblem, kind: str,
                       dt: float) -> dict:
    """Slack report for the upper/lower-solution inequalities.

    candidate: DensityField (held constant in time) or an (n_steps+1, n)
    trajectory over one period.  For an upper solution all three slacks
    (interior, boundary, time endpoint) must be nonnegative; lower
    solutions use the reversed inequalities, reported with flipped sign
    so nonnegative slack always certifies.
    """
    if kind not in ("upper", "lower"):
        raise ValueError("kind must be 'upper' or 'lower'")
    sign = 1.0 if kind == "upper" else -1.0
    n_steps = int(round(problem.T / dt))
    if isinstance(candidate, DensityField):
        traj = np.tile(candidate.values, (n_steps + 1, 1))
    else:
        traj = np.asarray(candidate, dtype=float)
        n_steps = traj.shape[0] - 1
        dt = problem.T / n_steps
    xs = problem.grid.centers

    interior = np.inf
    for k in range(n_steps):
        t_half = (k + 0.5) * dt
        u_half = (traj[k] + traj[k + 1]) / 2
        L = assemble_generator(problem.grid, problem.coeffs, t_half, problem.bc,
                               problem.form)
        fval = np.broadcast_to(
            np.asarray(problem.f(t=t_half, x=xs, u=u_half), dtype=float), xs.shape)
        # residual of d_t u + A u - f, with A u = -L u
        resid = (traj[k + 1] - traj[k]) / dt - L.matvec(u_half) - fval
        interior = min(interior, float(np.min(sign * resid)))

    boundary = np.inf
    dx = problem.grid.dx
    for k in range(n_steps + 1):
        u = traj[k]
        if problem.bc.kind == "absorbing":
            wall = [1.5 * u[0] - 0.5 * u[1], 1.5 * u[-1] - 0.5 * u[-2]]
        else:
            # B u = d_nu u + b0 u, one-sided differences toward the wall
            left = -(u[1] - u[0]) / dx + problem.bc.b0_left * (1.5 * u[0] - 0.5 * u[1])
            right = (u[-1] - u[-2]) / dx + problem.bc.b0_right * (1.5 * u[-1] - 0.5 * u[-2])
            wall = [left, right]
        boundary = min(boundary, float(min(sign * w for w in wall)))

    endpoint = float(np.min(sign * (traj[0] - traj[-1])))
    return {"interior_slack": interior, "boundary_slack": boundary,
            "endpoint_slack": endpoint,
            "certified": min(interior, boundary, endpoint) >= 0.0}
