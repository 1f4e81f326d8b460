"""Distributional periodicity of discrete-time, discrete-state systems.

A particle system with one-step transition matrix P and initial
distribution x0 is N-periodic (in distribution) when P^N x0 = x0, and
strongly N-periodic when P^N is the identity.  Matrices are stored
column-stochastic so that P @ x maps distributions to distributions;
row-stochastic input can be transposed on load.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import DimensionMismatch

DEFAULT_TOL = 1e-9
_STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    entries: np.ndarray  # (m, m), column-stochastic

    def __post_init__(self):
        P = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", P)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionMismatch(f"transition matrix must be square, got {P.shape}")
        if np.any(P < -_STOCHASTIC_TOL) or np.any(P > 1 + _STOCHASTIC_TOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        colsums = P.sum(axis=0)
        if np.any(np.abs(colsums - 1.0) > _STOCHASTIC_TOL):
            raise ValueError(f"columns must sum to 1 (max deviation {np.max(np.abs(colsums - 1)):.3e})")

    @classmethod
    def from_array(cls, arr, row_stochastic: bool = False) -> "TransitionMatrix":
        P = np.asarray(arr, dtype=float)
        return cls(P.T.copy() if row_stochastic else P)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DistributionVector:
    probs: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", x)
        if x.ndim != 1:
            raise DimensionMismatch("distribution must be a vector")
        if np.any(x < -_STOCHASTIC_TOL):
            raise ValueError("probabilities must be nonnegative")
        if abs(x.sum() - 1.0) > _STOCHASTIC_TOL:
            raise ValueError(f"probabilities must sum to 1, got {x.sum()!r}")


@dataclass(frozen=True)
class PeriodReport:
    period: int | None
    residuals: np.ndarray  # residuals[k-1] = ||P^k x0 - x0||_inf, k = 1..N_max
    strong: bool
    tol: float = DEFAULT_TOL


def step(P: TransitionMatrix, x: DistributionVector) -> DistributionVector:
    """One Chapman-Kolmogorov step: x -> P x."""
    if P.m != x.probs.shape[0]:
        raise DimensionMismatch(f"matrix is {P.m}x{P.m} but vector has length {x.probs.shape[0]}")
    return DistributionVector(P.entries @ x.probs)


def matrix_power(P: TransitionMatrix, N: int) -> np.ndarray:
    """P^N by repeated squaring with a cache of P^(2^j)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    result = np.eye(P.m)
    square = P.entries
    n = N
    while n:
        if n & 1:
            result = square @ result
        square = square @ square
        n >>= 1
    return result


def detect_period(P: TransitionMatrix, x0: DistributionVector,
                  N_max: int = 64, tol: float = DEFAULT_TOL) -> PeriodReport:
    """Smallest N <= N_max with ||P^N x0 - x0||_inf <= tol, scanning all steps."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if P.m != x0.probs.shape[0]:
        raise DimensionMismatch(f"matrix is {P.m}x{P.m} but vector has length {x0.probs.shape[0]}")
    residuals = np.empty(N_max)
    x = x0.probs
    period = None
    for k in range(1, N_max + 1):
        x = P.entries @ x
        residuals[k - 1] = np.max(np.abs(x - x0.probs))
        if period is None and residuals[k - 1] <= tol:
            period = k
    strong = False
    if period is not None:
        strong = np.max(np.abs(matrix_power(P, period) - np.eye(P.m))) <= tol
    return PeriodReport(period=period, residuals=residuals, strong=strong, tol=tol)


def detect_strong_period(P: TransitionMatrix, N_max: int = 64,
                         tol: float = DEFAULT_TOL) -> int | None:
    """Smallest N <= N_max with ||P^N - I||_max <= tol, or None."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    eye = np.eye(P.m)
    power = eye
    for k in range(1, N_max + 1):
        power = P.entries @ power
        if np.max(np.abs(power - eye)) <= tol:
            return k
    return None


def permutation_order(perm) -> int:
    """lcm of cycle lengths of a permutation given as an index array."""
    perm = np.asarray(perm, dtype=int)
    seen = np.zeros(len(perm), dtype=bool)
    order = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        order = order * length // gcd(order, length)
    return order


def paper_five_state_matrix(a1: float, a2: float) -> TransitionMatrix:
    """The 5-state example family: a 2-state mixing block plus a 3-cycle.

    Column-stochastic orientation; b_i = 1 - a_i.  Column j holds the
    outgoing probabilities of state j, so states 3 -> 5 -> 4 -> 3 form
    the permutation block.
    """
    b1, b2 = 1.0 - a1, 1.0 - a2
    P = np.array([
        [a1, b1, 0, 0, 0],
        [a2, b2, 0, 0, 0],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0],
    ], dtype=float)
    return TransitionMatrix(P)
