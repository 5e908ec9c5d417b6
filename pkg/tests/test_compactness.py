# -*- coding: utf-8 -*-
"""Kernels, oscillation functionals, maximal operator, and weight transport."""

import math

import numpy as np
import pytest

from stiffns.compactness import (KernelSpec, WeightField, criterion_sweep,
                                 evolve_weight, evolve_weights_along,
                                 kernel_l1_norm, kernel_value, maximal_operator,
                                 normalized_kernel_mass, oscillation_functional,
                                 smooth_cutoff, weight_mass_check)
from stiffns.model import FluidState, Grid1D, ModelParams

# frozen oracle: 1/sqrt(0.25 + 0.01)
K_HALF_01 = 1.9611613513818403192


class TestKernel:
    def test_center_value(self):
        assert kernel_value(0.0, 0.1) == pytest.approx(10.0, rel=1e-14)

    def test_outside_support(self):
        assert kernel_value(3.0, 0.1) == 0.0
        assert kernel_value(-2.0, 0.5) == 0.0

    def test_interior_oracle(self):
        assert kernel_value(0.5, 0.1) == pytest.approx(K_HALF_01, rel=1e-13)

    def test_symmetry(self):
        xs = np.linspace(0.0, 2.5, 51)
        x = np.concatenate([-xs[:0:-1], xs])  # exactly negation-symmetric nodes
        v = kernel_value(x, 0.2)
        np.testing.assert_allclose(v, v[::-1], rtol=0, atol=0)

    def test_invalid_scale(self):
        with pytest.raises(ValueError):
            kernel_value(0.0, 0.0)
        with pytest.raises(ValueError):
            kernel_value(0.0, 1.5)

    def test_cutoff_plateaus(self):
        assert smooth_cutoff(0.3) == 1.0 and smooth_cutoff(1.0) == 1.0
        assert smooth_cutoff(2.0) == 0.0 and smooth_cutoff(5.0) == 0.0
        r = np.linspace(1.0, 2.0, 50)
        z = smooth_cutoff(r)
        assert np.all(np.diff(z) <= 1e-15)


class TestNormalizedKernelMass:
    def test_trivial_endpoints(self):
        assert normalized_kernel_mass(1.0) == 0.0
        assert normalized_kernel_mass(math.exp(-1.0)) == pytest.approx(1.0, rel=1e-14)

    def test_log_oracle(self):
        assert normalized_kernel_mass(0.01) == pytest.approx(
            4.6051701859880913680, rel=1e-14)

    def test_quadrature_cross_check(self):
        # independent double quadrature of the scale aggregate: Simpson in x
        # for each kernel mass, Simpson in log h across scales
        h0 = 0.05
        n_h = 81
        ln_h = np.linspace(math.log(h0), 0.0, n_h)
        wh = np.ones(n_h)
        wh[1:-1:2], wh[2:-1:2] = 4.0, 2.0
        x = np.linspace(0.0, 2.0, 100001)
        wx = np.ones(x.size)
        wx[1:-1:2], wx[2:-1:2] = 4.0, 2.0
        dx = x[1] - x[0]
        inner = np.empty(n_h)
        for i, lh in enumerate(ln_h):
            h = math.exp(lh)
            mass_x = 2.0 * float(np.sum(wx * kernel_value(x, h))) * dx / 3.0
            inner[i] = mass_x / kernel_l1_norm(h)
        total = float(np.sum(wh * inner)) * (ln_h[1] - ln_h[0]) / 3.0
        assert abs(total - normalized_kernel_mass(h0)) <= 1e-8


def naive_oscillation(rho, centers, dx, h, weights=None):
    """Brute-force O(N^2) double loop, the reference for the fast path."""
    total = 0.0
    n = rho.size
    for i in range(n):
        for j in range(n):
            w = 1.0 if weights is None else 0.5 * (weights[i] + weights[j])
            total += kernel_value(centers[i] - centers[j], h) * (rho[i] - rho[j]) ** 2 * w
    return dx * dx * total / kernel_l1_norm(h)


class TestOscillationFunctional:
    def test_constant_field_zero(self):
        grid = Grid1D(length=1.0, n_cells=32)
        assert oscillation_functional(np.full(32, 0.7), grid, 0.1) == 0.0

    def test_unit_weights_match_unweighted(self):
        grid = Grid1D(length=1.0, n_cells=32)
        rng = np.random.default_rng(7)
        rho = rng.uniform(0.0, 1.0, 32)
        a = oscillation_functional(rho, grid, 0.1)
        b = oscillation_functional(rho, grid, 0.1, weights=np.ones(32))
        assert b == pytest.approx(a, rel=1e-12)

    def test_step_profile_against_naive_loop(self):
        grid = Grid1D(length=1.0, n_cells=64)
        rho = np.where(grid.centers < 0.5, 1.0, 0.0)
        fast = oscillation_functional(rho, grid, 0.1)
        slow = naive_oscillation(rho, grid.centers, grid.dx, 0.1)
        assert fast == pytest.approx(slow, rel=1e-12)

    def test_weighted_against_naive_loop(self):
        grid = Grid1D(length=1.0, n_cells=48)
        rng = np.random.default_rng(13)
        rho = rng.uniform(0.0, 1.2, 48)
        w = rng.uniform(0.0, 1.0, 48)
        fast = oscillation_functional(rho, grid, 0.15, weights=w)
        slow = naive_oscillation(rho, grid.centers, grid.dx, 0.15, weights=w)
        assert fast == pytest.approx(slow, rel=1e-12)

    def test_nonnegative_and_mirror_invariant(self):
        grid = Grid1D(length=1.0, n_cells=40)
        rng = np.random.default_rng(23)
        rho = rng.uniform(0.0, 2.0, 40)
        v = oscillation_functional(rho, grid, 0.07)
        v_mir = oscillation_functional(rho[::-1].copy(), grid, 0.07)
        assert v >= 0.0
        assert v_mir == pytest.approx(v, rel=1e-12)

    def test_weighted_dominated_by_unweighted(self):
        grid = Grid1D(length=1.0, n_cells=40)
        rng = np.random.default_rng(29)
        rho = rng.uniform(0.0, 1.0, 40)
        w = rng.uniform(0.0, 1.0, 40)
        assert oscillation_functional(rho, grid, 0.1, weights=w) <= \
            oscillation_functional(rho, grid, 0.1) + 1e-15


class TestCriterionSweep:
    SPEC = KernelSpec(h_list=(0.2, 0.1, 0.05, 0.025, 0.0125))

    def test_identical_members_family_size_invariant(self):
        grid = Grid1D(length=1.0, n_cells=64)
        rho = 0.5 + 0.3 * np.sin(2 * np.pi * grid.centers)
        r2 = criterion_sweep([rho, rho], grid, self.SPEC)
        r5 = criterion_sweep([rho] * 5, grid, self.SPEC)
        np.testing.assert_allclose(r2.sup_values, r5.sup_values, rtol=0, atol=0)

    def test_smooth_translates_decay_in_h(self):
        grid = Grid1D(length=1.0, n_cells=128)
        fields = [0.5 + 0.3 * np.sin(2 * np.pi * (grid.centers - s))
                  for s in (0.0, 0.11, 0.23)]
        rep = criterion_sweep(fields, grid, self.SPEC, required_factor=1.2)
        assert np.all(np.diff(rep.sup_values) < 0.0)  # decreasing with h
        assert rep.decay_factor > 1.2 and rep.passed

    def test_checkerboard_negative_control(self):
        grid = Grid1D(length=1.0, n_cells=64)
        base = (np.arange(64) % 2).astype(float)
        rep = criterion_sweep([base, 1.0 - base], grid, self.SPEC, required_factor=3.0)
        assert rep.sup_values[-1] >= rep.sup_values[0]  # no decay at grid scale
        assert not rep.passed

    def test_mismatched_grids_rejected(self):
        grid = Grid1D(length=1.0, n_cells=64)
        with pytest.raises(ValueError):
            criterion_sweep([np.zeros(64), np.zeros(32)], grid, self.SPEC)

    def test_time_resolved_family(self):
        grid = Grid1D(length=1.0, n_cells=32)
        times = np.array([0.0, 0.5, 1.0])
        member = np.stack([0.5 + a * np.sin(2 * np.pi * grid.centers)
                           for a in (0.1, 0.2, 0.3)])
        rep = criterion_sweep([member], grid, self.SPEC, times=times)
        assert rep.sup_values.shape == (5,)
        assert np.all(rep.sup_values > 0.0)


class TestMaximalOperator:
    def test_constant(self):
        # windowed means of a constant agree with it to cumsum roundoff
        grid = Grid1D(length=1.0, n_cells=16)
        f = np.full(16, 0.7)
        np.testing.assert_allclose(maximal_operator(f, grid), f, rtol=1e-14)

    def test_dominates_pointwise(self):
        grid = Grid1D(length=1.0, n_cells=50)
        rng = np.random.default_rng(31)
        f = rng.uniform(0.0, 3.0, 50)
        assert np.all(maximal_operator(f, grid) >= f)

    def test_spike_against_window_oracle(self):
        grid = Grid1D(length=1.0, n_cells=32)
        f = np.zeros(32)
        f[10] = 1.0
        mf = maximal_operator(f, grid)
        # brute force: all admissible windows around each cell
        expected = np.zeros(32)
        for i in range(32):
            best = f[i]
            for k in range(1, 17):
                lo, hi = max(0, i - k), min(31, i + k)
                best = max(best, float(np.mean(f[lo:hi + 1])))
            expected[i] = best
        np.testing.assert_allclose(mf, expected, rtol=1e-14)

    def test_negative_rejected(self):
        grid = Grid1D(length=1.0, n_cells=8)
        with pytest.raises(ValueError):
            maximal_operator(np.array([1.0, -0.1] + [0.0] * 6), grid)


class TestWeightEvolution:
    def test_idle_weight_unchanged(self):
        grid = Grid1D(length=1.0, n_cells=16)
        params = ModelParams(gamma=2.0, eps=0.0)
        w0 = WeightField(w=np.full(16, 0.8), lam=1.0, B=np.zeros(16))
        w1 = evolve_weight(w0, np.zeros(17), params, grid, dt=0.01)
        np.testing.assert_allclose(w1.w, w0.w, rtol=0, atol=0)

    def test_uniform_decay_matches_exponential(self):
        grid = Grid1D(length=1.0, n_cells=16)
        params = ModelParams(gamma=2.0, eps=0.0)
        lam, b, t_end, n = 0.7, 1.3, 1.0, 4000
        w = WeightField(w=np.ones(16), lam=lam, B=np.full(16, b))
        for _ in range(n):
            w = evolve_weight(w, np.zeros(17), params, grid, dt=t_end / n)
        exact = math.exp(-lam * b * t_end)
        assert np.allclose(w.w, exact, rtol=5e-4)  # first-order in dt

    def test_range_preserved_structurally(self):
        grid = Grid1D(length=1.0, n_cells=32)
        params = ModelParams(gamma=2.0, eps=0.01)
        rng = np.random.default_rng(41)
        w = WeightField(w=rng.uniform(0.0, 1.0, 32), lam=2.0,
                        B=rng.uniform(0.0, 5.0, 32))
        u = np.zeros(33)
        u[1:-1] = rng.uniform(-0.5, 0.5, 31)
        for _ in range(50):
            w = evolve_weight(w, u, params, grid, dt=0.01)
        assert np.all(w.w >= 0.0) and np.all(w.w <= 1.0)

    def test_decay_monotone_without_advection(self):
        grid = Grid1D(length=1.0, n_cells=16)
        params = ModelParams(gamma=2.0, eps=0.0)
        rng = np.random.default_rng(43)
        w0 = rng.uniform(0.2, 1.0, 16)
        w = WeightField(w=w0.copy(), lam=1.5, B=rng.uniform(0.0, 2.0, 16))
        w1 = evolve_weight(w, np.zeros(17), params, grid, dt=0.05)
        assert np.all(w1.w <= w0)

    def test_cfl_violation_rejected(self):
        grid = Grid1D(length=1.0, n_cells=16)
        params = ModelParams(gamma=2.0)
        w = WeightField(w=np.ones(16), lam=1.0, B=np.zeros(16))
        u = np.full(17, 5.0)
        u[0] = u[-1] = 0.0
        with pytest.raises(ValueError):
            evolve_weight(w, u, params, grid, dt=1.0)

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            WeightField(w=np.array([0.5, 1.2]), lam=1.0, B=np.zeros(2))
        with pytest.raises(ValueError):
            WeightField(w=np.array([0.5, 0.5]), lam=-1.0, B=np.zeros(2))


class TestWeightMass:
    def test_unit_weights(self):
        grid = Grid1D(length=1.0, n_cells=8)
        w = WeightField(w=np.ones(8), lam=1.0, B=np.zeros(8))
        assert weight_mass_check(np.ones(8), w, grid) == (0.0, False)

    def test_exp_minus_one(self):
        grid = Grid1D(length=1.0, n_cells=8)
        w = WeightField(w=np.full(8, math.exp(-1.0)), lam=1.0, B=np.zeros(8))
        val, capped = weight_mass_check(np.ones(8), w, grid)
        assert val == pytest.approx(1.0, rel=1e-12) and not capped

    def test_vanishing_weight_capped(self):
        grid = Grid1D(length=1.0, n_cells=4)
        w = WeightField(w=np.array([1.0, 0.0, 1.0, 1.0]), lam=1.0, B=np.zeros(4))
        val, capped = weight_mass_check(np.ones(4), w, grid)
        assert capped and val == pytest.approx(700.0 * 0.25, rel=1e-12)


class TestWeightsAlongRun:
    def test_bounds_and_finiteness(self):
        from stiffns.solver import SolverConfig, run
        grid = Grid1D(length=1.0, n_cells=64)
        params = ModelParams(gamma=10.0, g0=1.0, pm=2.0, mu=0.02, xi=0.02)
        config = SolverConfig(cfl=0.4, dt_max=1e-3, dt_min=1e-14,
                              t_end=0.2, output_every=0.02)
        x = grid.centers
        rho = 0.9 * np.exp(-((x - 0.5) / 0.1) ** 2)
        traj = run(FluidState(rho=rho, u=np.zeros(65)), params, grid, config)
        w, hist = evolve_weights_along(traj, params, lam=1.0)
        assert np.all(w.w >= 0.0) and np.all(w.w <= 1.0)
        vals = np.array([v for _, v in hist])
        assert np.all(np.isfinite(vals)) and vals[0] == 0.0
        assert vals[-1] > 0.0  # some damping accumulated where the flow moves
