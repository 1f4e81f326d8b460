"""Conservative 1D finite-difference Fokker-Planck solver.

Divergence (flux) form:  p_t = d/dx [ (a_eff p)_x - b p ],  a_eff = sigma^2/2.
Non-divergence form:     u_t = a u_xx - b u_x - a0 u   (i.e. u_t + A(t)u = 0).

Cell-centered grid; fluxes live on faces.  Reflecting boundaries zero the
boundary face fluxes exactly, so the generator has zero column sums and
Crank-Nicolson conserves the discrete mass to roundoff.  Absorbing
boundaries use antisymmetric ghost cells (density zero at the wall),
which keeps the scheme second order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .coeff_dsl import CoefficientField
from .errors import EllipticityViolation, QuadratureOverflow, SolverFailure

ELLIPTICITY_FLOOR = 1e-12
EXP_OVERFLOW = 700.0


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    x_left: float
    x_right: float

    def __post_init__(self):
        if self.n_cells < 4:
            raise ValueError("need at least 4 cells")
        if not self.x_right > self.x_left:
            raise ValueError("x_right must exceed x_left")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class DensityField:
    grid: Grid1D
    values: np.ndarray
    time_stamp: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_cells,):
            raise ValueError(f"expected {self.grid.n_cells} values, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.dx)


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str  # 'absorbing' | 'reflecting' | 'robin'
    b0_left: float = 0.0
    b0_right: float = 0.0

    def __post_init__(self):
        if self.kind not in ("absorbing", "reflecting", "robin"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")


def absorbing() -> BoundaryCondition:
    return BoundaryCondition("absorbing")


def reflecting() -> BoundaryCondition:
    return BoundaryCondition("reflecting")


def robin(b0_left: float, b0_right: float) -> BoundaryCondition:
    return BoundaryCondition("robin", b0_left, b0_right)


def neumann() -> BoundaryCondition:
    return BoundaryCondition("robin", 0.0, 0.0)


@dataclass(frozen=True)
class FpCoefficients:
    a_eff: CoefficientField            # = sigma^2/2 in the divergence form
    b: CoefficientField
    a0: Optional[CoefficientField] = None


@dataclass
class Tridiag:
    """dp/dt = L p with L tridiagonal: lower[i] = L[i,i-1], upper[i] = L[i,i+1]."""

    lower: np.ndarray  # (n,), lower[0] unused
    diag: np.ndarray   # (n,)
    upper: np.ndarray  # (n,), upper[n-1] unused

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, p: np.ndarray) -> np.ndarray:
        out = self.diag * p
        out[1:] += self.lower[1:] * p[:-1]
        out[:-1] += self.upper[:-1] * p[1:]
        return out

    def column_sums(self) -> np.ndarray:
        # off-diagonal gains first, diagonal last: the conservative
        # assembly stores diag[j] = -(upper[j-1] + lower[j+1]) rounded
        # once, so this grouping cancels exactly in floating point
        gains = np.zeros(self.n)
        gains[1:] += self.upper[:-1]
        gains[:-1] += self.lower[1:]
        return gains + self.diag

    def to_dense(self) -> np.ndarray:
        A = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        A[idx + 1, idx] = self.lower[1:]
        A[idx, idx + 1] = self.upper[:-1]
        return A


def _check_ellipticity(a_vals: np.ndarray, t: float, xs: np.ndarray):
    i = int(np.argmin(a_vals))
    if a_vals[i] < ELLIPTICITY_FLOOR:
        raise EllipticityViolation(t, float(np.asarray(xs)[i]), float(a_vals[i]))


def assemble_generator(grid: Grid1D, coeffs: FpCoefficients, t: float,
                       bc: BoundaryCondition, form: str = "divergence",
                       paper_313_convention: bool = False,
                       a0_offset: float = 0.0) -> Tridiag:
    """Spatial generator L(t) with dp/dt = L(t) p.

    form='divergence' discretizes the Fokker-Planck flux form; the flag
    paper_313_convention doubles the diffusion coefficient to reproduce
    the (a p)_xx writing with a = sigma^2 instead of sigma^2/2.
    form='nondivergence' discretizes u_t = a u_xx - b u_x - a0 u.
    """
    n, dx = grid.n_cells, grid.dx
    xc = grid.centers
    if form == "divergence":
        return _assemble_divergence(grid, coeffs, t, bc, 2.0 if paper_313_convention else 1.0)
    if form != "nondivergence":
        raise ValueError(f"unknown form {form!r}")

    a = np.broadcast_to(np.asarray(coeffs.a_eff(t=t, x=xc), dtype=float), (n,)).copy()
    _check_ellipticity(a, t, xc)
    b = np.broadcast_to(np.asarray(coeffs.b(t=t, x=xc), dtype=float), (n,))
    a0 = np.zeros(n) if coeffs.a0 is None else \
        np.broadcast_to(np.asarray(coeffs.a0(t=t, x=xc), dtype=float), (n,))
    if a0_offset != 0.0:
        a0 = a0 - a0_offset

    lower = a / dx**2 + b / (2 * dx)
    upper = a / dx**2 - b / (2 * dx)
    diag = -2 * a / dx**2 - a0

    lo = np.concatenate([[0.0], lower[1:]])
    up = np.concatenate([upper[:-1], [0.0]])
    diag = diag.copy()

    # ghost value u_g = gamma * u_adjacent folds into the diagonal
    if bc.kind == "absorbing":
        gamma_left = gamma_right = -1.0
    elif bc.kind == "reflecting":
        # zero-flux has no meaning for the non-divergence operator
        gamma_left = gamma_right = 1.0
    else:
        gamma_left = (1.0 / dx - bc.b0_left / 2) / (1.0 / dx + bc.b0_left / 2)
        gamma_right = (1.0 / dx - bc.b0_right / 2) / (1.0 / dx + bc.b0_right / 2)
    diag[0] += gamma_left * lower[0]
    diag[-1] += gamma_right * upper[-1]
    return Tridiag(lo, diag, up)


def _assemble_divergence(grid: Grid1D, coeffs: FpCoefficients, t: float,
                         bc: BoundaryCondition, a_scale: float) -> Tridiag:
    n, dx = grid.n_cells, grid.dx
    xc = grid.centers
    xf = grid.faces
    a = a_scale * np.broadcast_to(np.asarray(coeffs.a_eff(t=t, x=xc), dtype=float), (n,))
    _check_ellipticity(a, t, xc)
    b_face = np.broadcast_to(np.asarray(coeffs.b(t=t, x=xf), dtype=float), (n + 1,))

    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)

    # interior face k (1..n-1) separates cells k-1 | k, flux
    # F_k = (a_k p_k - a_{k-1} p_{k-1})/dx - b_k (p_{k-1}+p_k)/2;
    # dp_i/dt = (F_{i+1} - F_i)/dx.  Assembled as per-column transfer
    # rates so the same float appears as a gain off the diagonal and a
    # loss on it, keeping column sums of the closed system exactly zero.
    bf = b_face[1:n]
    up_gain = (a[1:] / dx - bf / 2) / dx    # entry (k-1, k): left cell gains from p_k
    dn_gain = (a[:-1] / dx + bf / 2) / dx   # entry (k, k-1): right cell gains from p_{k-1}
    upper[:-1] = up_gain
    lower[1:] = dn_gain
    diag[1:] -= up_gain                     # loss of p_k through its left face
    diag[:-1] -= dn_gain                    # loss of p_{k-1} through its right face

    if bc.kind == "reflecting":
        pass  # boundary fluxes exactly zero
    elif bc.kind == "absorbing":
        # antisymmetric ghost: p_g = -p_adjacent, density zero at the wall;
        # the drift term vanishes there since (p_g + p)/2 = 0
        a_gl = a_scale * float(np.asarray(coeffs.a_eff(t=t, x=xc[0] - dx)))
        a_gr = a_scale * float(np.asarray(coeffs.a_eff(t=t, x=xc[-1] + dx)))
        diag[0] -= (a[0] + a_gl) / dx**2   # -F_0/dx with F_0 = (a_0+a_g) p_0/dx
        diag[-1] -= (a[-1] + a_gr) / dx**2
    else:
        raise ValueError("robin boundaries are only supported in non-divergence form")
    return Tridiag(lower, diag, upper)


def _banded(factor: float, L: Tridiag) -> np.ndarray:
    """(I + factor*L) in solve_banded layout."""
    n = L.n
    ab = np.zeros((3, n))
    ab[0, 1:] = factor * L.upper[:-1]
    ab[1, :] = 1.0 + factor * L.diag
    ab[2, :-1] = factor * L.lower[1:]
    return ab


def apply_banded(factor: float, L: Tridiag, p: np.ndarray) -> np.ndarray:
    return p + factor * L.matvec(p)


def solve_shifted(factor: float, L: Tridiag, rhs: np.ndarray) -> np.ndarray:
    """Solve (I - factor*L) out = rhs."""
    try:
        return solve_banded((1, 1), _banded(-factor, L), rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SolverFailure(f"singular tridiagonal system: {exc}") from exc


def step_cn(p: DensityField, coeffs: FpCoefficients, bc: BoundaryCondition,
            dt: float, form: str = "divergence", source=None) -> DensityField:
    """One Crank-Nicolson step; coefficients evaluated at the half step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    t_half = p.time_stamp + dt / 2
    L = assemble_generator(p.grid, coeffs, t_half, bc, form)
    rhs = apply_banded(dt / 2, L, p.values)
    if source is not None:
        rhs = rhs + dt * source
    new = solve_shifted(dt / 2, L, rhs)
    return DensityField(p.grid, new, p.time_stamp + dt)


def step_ie(p: DensityField, coeffs: FpCoefficients, bc: BoundaryCondition,
            dt: float, form: str = "divergence", source=None) -> DensityField:
    """One implicit-Euler step (positivity-preserving M-matrix fallback)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    L = assemble_generator(p.grid, coeffs, p.time_stamp + dt, bc, form)
    rhs = p.values if source is None else p.values + dt * source
    new = solve_shifted(dt, L, rhs)
    return DensityField(p.grid, new, p.time_stamp + dt)


def solve_ivp(p0: DensityField, coeffs: FpCoefficients, bc: BoundaryCondition,
              t0: float, t1: float, dt: float, form: str = "divergence",
              integrator: str = "cn", snapshot_times=None):
    """March from t0 to t1; returns (final DensityField, list of snapshots).

    Snapshots are emitted at the requested times (matched to the nearest
    step boundary).
    """
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    n_steps = int(round((t1 - t0) / dt))
    if n_steps < 1 or abs(n_steps * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError("dt must divide t1 - t0")
    stepper = step_cn if integrator == "cn" else step_ie
    snap_steps = set()
    if snapshot_times is not None:
        snap_steps = {int(round((s - t0) / dt)) for s in snapshot_times}
    p = replace(p0, time_stamp=t0)
    snapshots = [p] if 0 in snap_steps else []
    for k in range(n_steps):
        p = stepper(p, coeffs, bc, dt, form=form)
        if (k + 1) in snap_steps:
            snapshots.append(p)
    return p, snapshots


def _a_eff_dx(coeffs: FpCoefficients, t: float, xs: np.ndarray, dx: float) -> np.ndarray:
    """d(a_eff)/dx by central differences, one-sided at the ends."""
    a = np.broadcast_to(np.asarray(coeffs.a_eff(t=t, x=xs), dtype=float), xs.shape).copy()
    da = np.empty_like(a)
    da[1:-1] = (a[2:] - a[:-2]) / (2 * dx)
    da[0] = (a[1] - a[0]) / dx
    da[-1] = (a[-1] - a[-2]) / dx
    return da


def stationary_closed_form(coeffs: FpCoefficients, grid: Grid1D,
                           t: float = 0.0) -> DensityField:
    """Stationary density q(x) = exp(int (b - a_x)/a dx), normalized to mass 1.

    Valid for time-independent coefficients or when the stationarity
    condition holds (see check_stationarity_condition).
    """
    xs = grid.centers
    a = np.broadcast_to(np.asarray(coeffs.a_eff(t=t, x=xs), dtype=float), xs.shape)
    _check_ellipticity(a, t, xs)
    b = np.broadcast_to(np.asarray(coeffs.b(t=t, x=xs), dtype=float), xs.shape)
    integrand = (b - _a_eff_dx(coeffs, t, xs, grid.dx)) / a
    # cumulative trapezoid from the first cell center; the constant offset
    # drops out in the normalization
    exponent = np.concatenate([[0.0],
                               np.cumsum((integrand[1:] + integrand[:-1]) / 2 * grid.dx)])
    exponent -= exponent.max()
    if exponent.min() < -EXP_OVERFLOW:
        raise QuadratureOverflow(f"exponent range {exponent.min():.1f} exceeds double range")
    q = np.exp(exponent)
    q /= q.sum() * grid.dx
    return DensityField(grid, q, time_stamp=t)


def check_stationarity_condition(coeffs: FpCoefficients, grid: Grid1D,
                                 times, dt_fd: float = 1e-5) -> dict:
    """Residual of the stationarity identity
    int (a (b_t - a_xt) - a_t (b - a_x)) / a^2 dx = 0 at sampled times.

    Time derivatives by central differences with step dt_fd; the spatial
    integral by the trapezoid rule on cell centers.
    """
    xs = grid.centers
    dx = grid.dx

    def fields(t):
        a = np.broadcast_to(np.asarray(coeffs.a_eff(t=t, x=xs), dtype=float), xs.shape)
        b = np.broadcast_to(np.asarray(coeffs.b(t=t, x=xs), dtype=float), xs.shape)
        return a, b, _a_eff_dx(coeffs, t, xs, dx)

    times = [float(t) for t in times]
    residuals = []
    for t in times:
        a, b, ax = fields(t)
        _check_ellipticity(a, t, xs)
        ap, bp, axp = fields(t + dt_fd)
        am, bm, axm = fields(t - dt_fd)
        b_t = (bp - bm) / (2 * dt_fd)
        a_t = (ap - am) / (2 * dt_fd)
        a_xt = (axp - axm) / (2 * dt_fd)
        integrand = (a * (b_t - a_xt) - a_t * (b - ax)) / a**2
        trapz = getattr(np, "trapezoid", np.trapz)
        residuals.append(float(trapz(integrand, dx=dx)))
    residuals = np.array(residuals)
    return {"times": np.asarray(times, dtype=float),
            "residuals": residuals,
            "max_abs_residual": float(np.max(np.abs(residuals)))}
