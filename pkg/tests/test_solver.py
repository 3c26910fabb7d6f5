import numpy as np
import pytest

from dampwave.diagnostics import G_k, MultiplierParams, energy, staggered_energy
from dampwave.geometry import Bump, DampingProfile, Grid2D, InitialData, integrate, laplacian
from dampwave.solver import (GridTooSmallError, InstabilityError, init_state, max_stable_dt, next_level, run,
                             step, step_count, velocity)
from oracles import dalembert_error, damped_ode_error, reversibility_error


@pytest.fixture
def small():
    g = Grid2D(12.0, 121)
    data = InitialData.from_bumps(g, [Bump((0.3, 0.0), 1.5, 1.0)], [Bump((0.0, 0.2), 1.5, 0.5)], 2.0)
    a = DampingProfile("localized", 1.0, 4.0, 1.0).sample(g)
    return g, data, a


def test_step_count_lands_on_T():
    n, dt = step_count(10.0, 0.1)
    assert n * dt == pytest.approx(10.0, rel=1e-15)
    assert dt <= max_stable_dt(0.1)
    assert step_count(0.0, 0.1)[0] == 0


def test_cfl_violation_rejected(small):
    g, data, a = small
    with pytest.raises(ValueError, match="CFL"):
        init_state(data, 2 * max_stable_dt(g.dx), a)
    with pytest.raises(ValueError):
        init_state(data, 0.01, a, cfl_safety=1.0)


def test_instability_detected(small):
    g, data, a = small
    st = init_state(data, 0.5 * max_stable_dt(g.dx), a)
    st.u_curr[60, 60] = np.inf
    with pytest.raises(InstabilityError):
        step(st, a)


def test_grid_too_small(small):
    g, data, a = small
    with pytest.raises(GridTooSmallError):
        run(data, a, 11.0)


def test_zero_data_stays_zero(small):
    g, _, a = small
    z = InitialData(g.zeros(), g.zeros(), 2.0, g)
    res = run(z, a, 2.0)
    assert all(r.E == 0 and r.energy_residual == 0 for r in res.records)
    assert not res.state.u_curr.any()


def test_dalembert_second_order():
    e1, _ = dalembert_error(33)
    e2, _ = dalembert_error(65)
    assert e2 < 1e-2
    assert 3.0 < e1 / e2 < 5.0


def test_damped_ode_second_order():
    e1 = damped_ode_error(0.1)
    e2 = damped_ode_error(0.05)
    assert 3.5 < e1 / e2 < 4.5


def test_time_reversible(small):
    g, data, _ = small
    assert reversibility_error(data, 150, max_stable_dt(g.dx)) < 1e-12


def test_kernel_matches_reference_stepper(small):
    g, data, a = small
    T = 3.0
    res = run(data, a, T, sample_every=1)
    n, dt = step_count(T, g.dx)
    st = init_state(data, dt, a)
    for _ in range(n):
        st = step(st, a)
    assert np.array_equal(res.state.u_curr, st.u_curr)
    assert np.array_equal(res.state.u_prev, st.u_prev)
    # the trapezoid antiderivative agrees to rounding
    assert np.allclose(res.state.v_accum, st.v_accum, rtol=0, atol=1e-13)
    params = MultiplierParams(1.0, 4.0)
    rec = res.records[-1]
    assert rec.E == pytest.approx(energy(st, a), rel=1e-12)
    assert rec.Gk == pytest.approx(G_k(st, a, params), rel=1e-11)
    assert rec.l2u == rec.U_in + rec.V_out


def test_staggered_energy_balance_is_exact(small):
    g, data, a = small
    st = init_state(data, max_stable_dt(g.dx), a)
    for _ in range(40):
        S0 = staggered_energy(st)
        ut = velocity(st, a)
        nxt = step(st, a)
        S1 = staggered_energy(nxt)
        diss = st.dt * integrate(a * ut * ut, g)
        assert S1 - S0 + diss == pytest.approx(0.0, abs=1e-13 * S0)
        st = nxt


def test_energy_non_increasing_within_residual(small):
    _, data, a = small
    res = run(data, a, 6.0)
    E = np.array([r.E for r in res.records])
    tol = max(r.energy_residual for r in res.records) * E[0]
    assert np.all(np.diff(E) <= tol)


def test_cone_is_exact(small):
    _, data, a = small
    res = run(data, a, 6.0, sample_every=3)
    assert res.cone_max == 0.0


def test_eightfold_symmetry_to_rounding():
    g = Grid2D(12.0, 121)
    data = InitialData.from_bumps(g, [], [Bump((0.0, 0.0), 2.0, 1.0)], 2.0)
    a = DampingProfile().sample(g)
    u = run(data, a, 6.0).state.u_curr
    scale = np.abs(u).max()
    for v in (u.T, u[::-1], u[:, ::-1]):
        assert np.max(np.abs(u - v)) <= 1e-13 * scale


def test_velocity_of_state_at_rest(small):
    g, data, a = small
    dt = max_stable_dt(g.dx)
    st = init_state(data, dt, a)
    st.u_prev = st.u_curr + 0.5 * dt * dt * laplacian(st.u_curr, g.dx)
    assert np.allclose(velocity(st, a), 0.0, atol=1e-15)
    assert np.allclose(next_level(st, a), st.u_prev, atol=1e-15)
