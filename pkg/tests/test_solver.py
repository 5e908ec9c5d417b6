# -*- coding: utf-8 -*-
"""Time integrator: step-size control, substeps against independent oracles,
structural invariants (conservation, symmetry, vacuum), and convergence."""

import math

import numpy as np
import pytest

import stiffns.solver as solver_mod
from stiffns.model import FluidState, Grid1D, ModelParams, homeostatic_density
from stiffns.solver import (NegativeDensityError, NumericsError, SolverConfig,
                            SolverStallError, compute_dt, growth_substep, run,
                            step, transport_substep)

EPS = np.finfo(np.float64).eps


def uniform_state(n, rho0, u0=0.0):
    u = np.full(n + 1, u0)
    u[0] = u[-1] = 0.0
    return FluidState(rho=np.full(n, rho0), u=u)


def logistic_density(rho0, t, params):
    """Closed-form reference solution for the pure growth dynamics."""
    y0 = rho0**params.gamma
    s = params.gamma * params.g0 * params.pm * t
    y = params.pm * y0 / (y0 + (params.pm - y0) * math.exp(-s))
    return y ** (1.0 / params.gamma)


class TestComputeDt:
    def test_uniform_sound_speed(self):
        # rho=1, u=0, gamma=4: wave speed 2, dt = 0.5 * 0.1 / 2
        grid = Grid1D(length=1.0, n_cells=10)
        params = ModelParams(gamma=4.0, mu=1e-12, xi=0.0, eps=0.0)
        config = SolverConfig(cfl=0.5, dt_max=1e9, dt_min=1e-13, t_end=1.0)
        dt = compute_dt(uniform_state(10, 1.0), params, grid, config)
        assert dt == pytest.approx(0.025, rel=1e-12)

    def test_vacuum_hits_cap(self):
        grid = Grid1D(length=1.0, n_cells=10)
        params = ModelParams(gamma=4.0, eps=0.0)
        config = SolverConfig(cfl=0.5, dt_max=0.01, dt_min=1e-13, t_end=1.0)
        assert compute_dt(uniform_state(10, 0.0), params, grid, config) == 0.01

    def test_linear_in_cfl(self):
        grid = Grid1D(length=1.0, n_cells=10)
        params = ModelParams(gamma=4.0, mu=1e-12, xi=0.0, eps=0.0)
        config = SolverConfig(cfl=1.0, dt_max=1e9, dt_min=1e-13, t_end=1.0)
        dt = compute_dt(uniform_state(10, 1.0), params, grid, config)
        assert dt == pytest.approx(0.05, rel=1e-12)

    def test_eps_diffusion_limit(self):
        grid = Grid1D(length=1.0, n_cells=100)
        params = ModelParams(gamma=2.0, eps=0.05)
        config = SolverConfig(cfl=0.5, dt_max=1e9, dt_min=1e-15, t_end=1.0)
        dt = compute_dt(uniform_state(100, 0.0), params, grid, config)
        assert dt == pytest.approx(0.5 * grid.dx**2 / (2 * 0.05), rel=1e-12)

    def test_stall_detected(self):
        grid = Grid1D(length=1.0, n_cells=10)
        params = ModelParams(gamma=4.0)
        config = SolverConfig(cfl=0.5, dt_max=1.0, dt_min=0.5, t_end=1.0)
        with pytest.raises(SolverStallError):
            compute_dt(uniform_state(10, 1.0), params, grid, config)


class TestGrowthSubstep:
    def test_homeostatic_fixed_point(self):
        params = ModelParams(gamma=40.0, pm=2.0)
        rho_star = homeostatic_density(params)
        s = growth_substep(uniform_state(5, rho_star), params, dt=0.37)
        assert np.allclose(s.rho, rho_star, rtol=1e-14, atol=0.0)

    def test_vacuum_invariant(self):
        params = ModelParams(gamma=40.0)
        s = growth_substep(uniform_state(5, 0.0), params, dt=1.0)
        assert np.all(s.rho == 0.0)

    def test_closed_form_ln3(self):
        # gamma=1, G0=PM=1, rho0=0.5, dt=ln 3 lands exactly on 0.75
        params = ModelParams(gamma=1.0, g0=1.0, pm=1.0)
        s = growth_substep(uniform_state(4, 0.5), params, dt=math.log(3.0))
        assert np.allclose(s.rho, 0.75, rtol=1e-12)

    @pytest.mark.parametrize("gamma,rho0,dt", [(1.0, 0.5, 0.7), (5.0, 0.9, 0.31),
                                               (40.0, 0.8, 0.11), (12.0, 1.2, 0.05)])
    def test_against_rk4_oracle(self, gamma, rho0, dt):
        # independent oracle: classical RK4 on d rho/dt = G0 rho (PM - rho^gamma)
        params = ModelParams(gamma=gamma, g0=1.3, pm=1.7)

        def f(r):
            return params.g0 * r * (params.pm - r**gamma)

        n, h, r = 20000, dt / 20000, rho0
        for _ in range(n):
            k1 = f(r)
            k2 = f(r + 0.5 * h * k1)
            k3 = f(r + 0.5 * h * k2)
            k4 = f(r + h * k3)
            r += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        s = growth_substep(uniform_state(3, rho0), params, dt=dt)
        assert s.rho[0] == pytest.approx(r, rel=1e-9)

    def test_velocity_unchanged(self):
        params = ModelParams(gamma=8.0)
        u = np.array([0.0, 0.3, -0.2, 0.0])
        s0 = FluidState(rho=np.array([0.5, 0.7, 0.4]), u=u)
        s1 = growth_substep(s0, params, dt=0.2)
        assert np.array_equal(s1.u, u)

    def test_cellwise_exponential_bound(self):
        rng = np.random.default_rng(3)
        params = ModelParams(gamma=17.0, g0=0.9, pm=1.4)
        rho = rng.uniform(0.0, 1.2, size=50)
        s = growth_substep(FluidState(rho=rho, u=np.zeros(51)), params, dt=0.21)
        bound = rho * math.exp(params.g0 * params.pm * 0.21) * (1 + 1e-12)
        assert np.all(s.rho <= bound)


class TestTransportSubstep:
    def test_uniform_rest_state_unchanged(self):
        grid = Grid1D(length=1.0, n_cells=16)
        params = ModelParams(gamma=3.0, eps=0.01)
        s0 = uniform_state(16, 0.7)
        s1 = transport_substep(s0, params, grid, dt=1e-3)
        assert np.array_equal(s1.rho, s0.rho)
        assert np.all(s1.u == 0.0)

    def test_mass_conserved(self):
        grid = Grid1D(length=1.0, n_cells=64)
        params = ModelParams(gamma=5.0, eps=0.003)
        x = grid.centers
        rho = 0.5 + 0.4 * np.sin(2 * np.pi * x)**2
        u = 0.2 * np.sin(np.pi * grid.faces / grid.length)
        u[0] = u[-1] = 0.0
        s0 = FluidState(rho=rho, u=u)
        s1 = transport_substep(s0, params, grid, dt=2e-3)
        mass0, mass1 = np.sum(s0.rho) * grid.dx, np.sum(s1.rho) * grid.dx
        assert abs(mass1 - mass0) <= 10 * EPS * grid.n_cells * max(1.0, mass0)

    def test_three_cell_oracle(self):
        # independent dense evaluation of one explicit-flux / implicit-viscous
        # update on rho=[0.2,0.8,0.2], u=[0,0.1,-0.1,0]
        grid = Grid1D(length=1.0, n_cells=3)
        params = ModelParams(gamma=2.0, mu=0.05, xi=0.05, eps=0.01)
        dx, dt = grid.dx, 0.01
        rho = np.array([0.2, 0.8, 0.2])
        u = np.array([0.0, 0.1, -0.1, 0.0])

        # mass: upwind fluxes + diffusive fluxes at the two interior faces
        f1 = u[1] * rho[0] - params.eps * (rho[1] - rho[0]) / dx
        f2 = u[2] * rho[2] - params.eps * (rho[2] - rho[1]) / dx
        rho_exp = np.array([rho[0] - dt / dx * f1,
                            rho[1] - dt / dx * (f2 - f1),
                            rho[2] + dt / dx * f2])

        # momentum: explicit advection/pressure/eps terms, implicit viscosity
        p = rho**2
        rho_f = 0.5 * np.array([rho[0] + rho[1], rho[1] + rho[2]])
        adv = np.array([u[1] * (u[1] - u[0]) / dx,    # u[1] > 0: backward
                        u[2] * (u[3] - u[2]) / dx])   # u[2] < 0: forward
        grad_p = np.array([p[1] - p[0], p[2] - p[1]]) / dx
        drho = np.array([rho[1] - rho[0], rho[2] - rho[1]]) / dx
        du = np.array([u[2] - u[0], u[3] - u[1]]) / (2 * dx)
        rhs = u[1:3] + dt * (-adv - grad_p / rho_f - params.eps * drho * du / rho_f)
        beta = dt * (params.mu + params.xi) / (rho_f * dx**2)
        mat = np.array([[1 + 2 * beta[0], -beta[0]], [-beta[1], 1 + 2 * beta[1]]])
        u_exp = np.linalg.solve(mat, rhs)

        s1 = transport_substep(FluidState(rho=rho, u=u), params, grid, dt=dt)
        np.testing.assert_allclose(s1.rho, rho_exp, rtol=1e-14)
        np.testing.assert_allclose(s1.u[1:3], u_exp, rtol=1e-13)
        assert s1.u[0] == 0.0 and s1.u[-1] == 0.0
        # hand-derived decimals for the density update
        np.testing.assert_allclose(rho_exp, [0.19994, 0.80012, 0.19994], rtol=1e-13)

    def test_negative_density_strict_and_lenient(self):
        grid = Grid1D(length=1.0, n_cells=3)
        params = ModelParams(gamma=2.0, eps=0.0)
        rho = np.array([0.1, 1.0, 0.1])
        u = np.array([0.0, -1.0, 1.0, 0.0])  # strong outflow from the middle cell
        s0 = FluidState(rho=rho, u=u)
        with pytest.raises(NegativeDensityError):
            transport_substep(s0, params, grid, dt=1.0, strict=True)
        stats = solver_mod.StepStats()
        s1 = transport_substep(s0, params, grid, dt=1.0, strict=False,
                               rho_floor=1e-12, stats=stats)
        assert np.all(s1.rho >= 0.0)
        assert stats.floor_activations == 1


class TestStep:
    def test_uniform_growth_matches_logistic(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0, g0=1.0, pm=1.0)
        config = SolverConfig(cfl=0.5, dt_max=0.05, dt_min=1e-14, t_end=1.0)
        state = uniform_state(8, 0.5)
        t = 0.0
        for _ in range(40):
            state, dt = step(state, params, grid, config)
            t += dt
        ref = logistic_density(0.5, t, params)
        assert np.allclose(state.rho, ref, rtol=1e-12)
        assert np.all(state.u == 0.0)

    def test_vacuum_stays_vacuum(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0)
        config = SolverConfig(cfl=0.5, dt_max=0.05, dt_min=1e-14, t_end=1.0)
        state = uniform_state(8, 0.0)
        for _ in range(5):
            state, _ = step(state, params, grid, config)
        assert np.all(state.rho == 0.0) and np.all(state.u == 0.0)

    def test_mirror_symmetry(self):
        grid = Grid1D(length=1.0, n_cells=32)
        params = ModelParams(gamma=7.0, eps=0.004)
        config = SolverConfig(cfl=0.4, dt_max=1e-3, dt_min=1e-14, t_end=1.0)
        x = grid.centers
        rho = 0.8 * np.exp(-((x - 0.35) / 0.08) ** 2)
        u = np.zeros(33)
        u[1:-1] = 0.05 * np.sin(3 * np.pi * grid.faces[1:-1])
        fwd = FluidState(rho=rho, u=u)
        mir = FluidState(rho=rho[::-1], u=-u[::-1])
        s_fwd, dt1 = step(fwd, params, grid, config)
        s_mir, dt2 = step(mir, params, grid, config)
        assert dt1 == dt2
        np.testing.assert_allclose(s_mir.rho, s_fwd.rho[::-1], rtol=0, atol=1e-14)
        np.testing.assert_allclose(s_mir.u, -s_fwd.u[::-1], rtol=0, atol=1e-14)


class TestRun:
    def test_t_end_zero(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0)
        config = SolverConfig(t_end=0.0, output_every=0.1)
        traj = run(uniform_state(8, 0.5), params, grid, config)
        assert len(traj.snapshots) == 1 and traj.snapshots[0].t == 0.0

    def test_uniform_run_hits_homeostatic_density(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0, g0=1.0, pm=1.0)
        t_end = 50.0 / (params.gamma * params.g0 * params.pm)
        config = SolverConfig(cfl=0.5, dt_max=0.05, dt_min=1e-14,
                              t_end=t_end, output_every=t_end / 10)
        traj = run(uniform_state(8, 0.5), params, grid, config)
        assert abs(traj.snapshots[-1].rho[0] - homeostatic_density(params)) < 1e-6

    def test_output_cadence(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0)
        config = SolverConfig(cfl=0.5, dt_max=0.01, dt_min=1e-14,
                              t_end=0.1, output_every=0.02)
        traj = run(uniform_state(8, 0.5), params, grid, config)
        np.testing.assert_allclose(traj.times, [0.0, 0.02, 0.04, 0.06, 0.08, 0.1],
                                   atol=1e-12)

    def test_mass_growth_bound_along_run(self):
        grid = Grid1D(length=1.0, n_cells=64)
        params = ModelParams(gamma=10.0, g0=1.0, pm=2.0)
        config = SolverConfig(cfl=0.5, dt_max=1e-3, dt_min=1e-14,
                              t_end=0.2, output_every=0.02)
        x = grid.centers
        rho = 0.9 * np.exp(-((x - 0.5) / 0.1) ** 2)
        traj = run(FluidState(rho=rho, u=np.zeros(65)), params, grid, config)
        mass = np.array([r.mass for r in traj.records])
        bound = mass[0] * np.exp(params.g0 * params.pm * traj.times) * (1 + 1e-8)
        assert np.all(mass <= bound)
        assert traj.step_stats.floor_activations == 0
        assert traj.step_stats.max_mass_drift <= 10 * EPS * grid.n_cells

    def test_numerics_error_wrapping(self, monkeypatch):
        def nan_transport(state, params, grid, dt, **kw):
            raise ValueError("state fields must be finite")

        monkeypatch.setattr(solver_mod, "transport_substep", nan_transport)
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0)
        config = SolverConfig(cfl=0.5, dt_max=0.01, dt_min=1e-14,
                              t_end=0.1, output_every=0.02)
        with pytest.raises(NumericsError):
            run(uniform_state(8, 0.5), params, grid, config)

    def test_warns_on_supersaturated_initial_data(self):
        grid = Grid1D(length=1.0, n_cells=8)
        params = ModelParams(gamma=5.0)
        config = SolverConfig(t_end=0.0, output_every=0.1)
        with pytest.warns(UserWarning, match="exceeds 1"):
            run(uniform_state(8, 1.5), params, grid, config)

    def test_first_order_convergence(self):
        # manufactured smooth run; halving dx (and with it dt) must cut the
        # final L1 error by at least 1.8x against a fine reference
        params = ModelParams(gamma=5.0, g0=1.0, pm=1.5, mu=0.02, xi=0.02)

        def solve(n):
            grid = Grid1D(length=1.0, n_cells=n)
            config = SolverConfig(cfl=0.4, dt_max=0.4 / (n * 4.0), dt_min=1e-14,
                                  t_end=0.1, output_every=0.05)
            x = grid.centers
            rho = 0.3 + 0.5 * np.exp(-((x - 0.5) / 0.12) ** 2)
            traj = run(FluidState(rho=rho, u=np.zeros(n + 1)), params, grid, config)
            return traj.snapshots[-1].rho

        ref = solve(800)

        def coarse_error(n):
            sol = solve(n)
            ref_avg = ref.reshape(n, 800 // n).mean(axis=1)
            return np.sum(np.abs(sol - ref_avg)) / n

        e100, e200 = coarse_error(100), coarse_error(200)
        assert e100 / e200 >= 1.8
