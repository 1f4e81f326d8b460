"""Period map spectra: decay rates and principal eigenvalues."""

import math

import numpy as np
import pytest

from perifp.coeff_dsl import CoefficientField
from perifp.errors import NonPositiveRadius
from perifp.fpe_grid import (FpCoefficients, Grid1D, absorbing, neumann,
                             reflecting, stationary_closed_form)
from perifp.period_map import (PeriodMap, build_period_map, decay_check,
                               dense_spectrum_cross_check, evolve_matrix,
                               lambda1, power_iteration)

T = 0.1
ONE = CoefficientField.from_string("1", T)
ZERO = CoefficientField.from_string("0", T)
HEAT = FpCoefficients(a_eff=ONE, b=ZERO)


def test_identity_map_spectrum():
    pm = PeriodMap(np.eye(10), reflecting(), T, T / 8)
    spec = power_iteration(pm)
    assert spec.r == pytest.approx(1.0, abs=1e-12)
    assert spec.mu == pytest.approx(0.0, abs=1e-10)


def test_diagonal_matrix_dominant_eigenpair():
    K = np.diag([0.9, 0.5, 0.1])
    spec = power_iteration(K, T=1.0)
    assert spec.r == pytest.approx(0.9, abs=1e-9)
    assert spec.mu == pytest.approx(-math.log(0.9), abs=1e-8)
    assert np.argmax(np.abs(spec.eigvec)) == 0


def test_power_iteration_rejects_nilpotent():
    K = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NonPositiveRadius):
        power_iteration(K, T=1.0)


def test_heat_equation_dirichlet_rate():
    # principal mode sin(pi x) decays at rate pi^2 over one period
    grid = Grid1D(200, 0.0, 1.0)
    pm = build_period_map(grid, HEAT, absorbing(), T, T / 512)
    spec = power_iteration(pm)
    exact_r = math.exp(-math.pi**2 * T)
    assert abs(spec.r - exact_r) / exact_r < 0.01
    assert abs(spec.mu - math.pi**2) / math.pi**2 < 0.01
    assert 0.0 < spec.r < 1.0
    # eigenvector is the discrete sine mode
    mode = np.sin(np.pi * grid.centers)
    mode /= np.linalg.norm(mode)
    assert np.max(np.abs(spec.eigvec - mode)) < 1e-3


def test_reflecting_conservation_r_equals_one():
    grid = Grid1D(100, 0.0, 1.0)
    drift = CoefficientField.from_string("sin(2*pi*t/0.1)*(1-2*x)", T)
    co = FpCoefficients(a_eff=ONE, b=drift)
    pm = build_period_map(grid, co, reflecting(), T, T / 256)
    assert np.max(np.abs(pm.K.sum(axis=0) - 1.0)) < 1e-10  # column sums 1
    spec = power_iteration(pm)
    assert spec.r == pytest.approx(1.0, abs=1e-10)


def test_reflecting_eigvec_is_stationary_density():
    grid = Grid1D(150, -2.0, 2.0)
    co = FpCoefficients(a_eff=ONE, b=CoefficientField.from_string("0 - x", T))
    pm = build_period_map(grid, co, reflecting(), T, T / 128)
    spec = power_iteration(pm)
    q = stationary_closed_form(co, grid).values
    v = spec.eigvec / (spec.eigvec.sum() * grid.dx)
    assert np.max(np.abs(v - q)) / np.max(q) < 1e-3


def test_dense_eigensolver_cross_check():
    grid = Grid1D(80, 0.0, 1.0)
    pm = build_period_map(grid, HEAT, absorbing(), T, T / 128)
    spec = power_iteration(pm)
    r_dense, v_dense = dense_spectrum_cross_check(pm)
    assert spec.r == pytest.approx(r_dense, rel=1e-9)
    assert np.max(np.abs(spec.eigvec - v_dense)) < 1e-7


def test_decay_law_over_many_periods():
    grid = Grid1D(120, 0.0, 1.0)
    pm = build_period_map(grid, HEAT, absorbing(), T, T / 256)
    spec = power_iteration(pm)
    assert decay_check(pm, spec, 5) <= 1e-5
    assert decay_check(pm, spec, 50) <= 1e-5  # underflow guard kicks in


def test_period_map_semigroup_property():
    # U(T,0) twice equals U(2T,0) for T-periodic coefficients
    grid = Grid1D(60, 0.0, 1.0)
    drift = CoefficientField.from_string("sin(2*pi*t/0.1)*(1-2*x)", T)
    co = FpCoefficients(a_eff=ONE, b=drift)
    K1 = build_period_map(grid, co, reflecting(), T, T / 64).K
    K2 = evolve_matrix(np.eye(60), grid, co, reflecting(), 0.0, 2 * T, T / 64)
    assert np.max(np.abs(K1 @ K1 - K2)) < 1e-12


def test_absorbing_positive_zero_order_contracts():
    # a0 >= 0 with absorbing walls forces strict decay: 0 < r < 1
    grid = Grid1D(100, 0.0, 1.0)
    gen = np.random.Generator(np.random.Philox(key=np.uint64(13)))
    for _ in range(5):
        c0, c1 = (float(v) for v in gen.uniform(0.0, 3.0, 2))
        co = FpCoefficients(
            a_eff=CoefficientField.from_string(f"1 + ({c0!r})*x*(1-x)", T),
            b=CoefficientField.from_string(f"({c1!r})*(1-2*x)", T),
            a0=CoefficientField.from_string(f"({c0!r})*(1+sin(2*pi*t/0.1))", T))
        pm = build_period_map(grid, co, absorbing(), T, T / 128,
                              form="nondivergence")
        spec = power_iteration(pm)
        assert 0.0 < spec.r < 1.0


# ---------------------------------------------------------------------------
# principal periodic-parabolic eigenvalue

def test_lambda1_dirichlet_heat():
    grid = Grid1D(200, 0.0, 1.0)
    l1 = lambda1(grid, HEAT, absorbing(), T, T / 256)
    assert abs(l1 - math.pi**2) / math.pi**2 < 1e-3


def test_lambda1_neumann_zero():
    grid = Grid1D(200, 0.0, 1.0)
    l1 = lambda1(grid, HEAT, neumann(), T, T / 256)
    assert abs(l1) <= 2e-3 / T


def test_lambda1_constant_shift_identity():
    grid = Grid1D(100, 0.0, 1.0)
    base = FpCoefficients(a_eff=ONE, b=ZERO,
                          a0=CoefficientField.from_string("1+x", T))
    shifted = FpCoefficients(a_eff=ONE, b=ZERO,
                             a0=CoefficientField.from_string("(1+x) + 2.5", T))
    l0 = lambda1(grid, base, absorbing(), T, T / 128)
    l1 = lambda1(grid, shifted, absorbing(), T, T / 128)
    assert abs((l1 - l0) - 2.5) / 2.5 < 1e-8


def test_lambda1_strictly_monotone_in_zero_order():
    grid = Grid1D(100, 0.0, 1.0)
    gen = np.random.Generator(np.random.Philox(key=np.uint64(29)))
    for _ in range(5):
        lo = float(gen.uniform(0.0, 2.0))
        gap = float(gen.uniform(0.2, 2.0))
        co_lo = FpCoefficients(a_eff=ONE, b=ZERO,
                               a0=CoefficientField.from_string(f"({lo!r})*(1+x)", T))
        co_hi = FpCoefficients(a_eff=ONE, b=ZERO,
                               a0=CoefficientField.from_string(
                                   f"({lo!r})*(1+x) + ({gap!r})", T))
        assert lambda1(grid, co_hi, absorbing(), T, T / 128) > \
            lambda1(grid, co_lo, absorbing(), T, T / 128)
