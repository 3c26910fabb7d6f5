import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dampwave.geometry import (Bump, DampingProfile, Grid2D, InitialData, edge_grad_sq, gradient, integrate,
                               integrate_region, laplacian, make_bump, region_mask, smoothstep5)


def test_grid_basics():
    g = Grid2D(2.0, 5)
    assert g.dx == 1.0
    assert g.shape == (5, 5)
    assert np.array_equal(g.x, [-2, -1, 0, 1, 2])
    assert g.index_of(0.0, 0.0) == (2, 2)
    assert g.refined().n == 9 and g.refined().dx == 0.5


@pytest.mark.parametrize("n", [4, 1, 2])
def test_grid_rejects_even_or_tiny(n):
    with pytest.raises(ValueError, match="grid.n"):
        Grid2D(1.0, n)


def test_refined_grid_keeps_coarse_nodes():
    g = Grid2D(3.0, 13)
    assert np.array_equal(g.refined().x[::2], g.x)


def test_smoothstep_is_c2_ramp():
    s = np.array([0.0, 0.5, 1.0])
    assert np.allclose(smoothstep5(s), [0.0, 0.5, 1.0])
    h = 1e-4
    # first and second derivatives vanish at both ends
    for s0 in (0.0, 1.0):
        d1 = (smoothstep5(s0 + h) - smoothstep5(s0 - h)) / (2 * h)
        assert abs(d1) < 1e-6


def test_localized_profile():
    prof = DampingProfile("localized", eps0=2.0, L=4.0, ramp_width=1.0)
    r = np.array([0.0, 2.9, 3.0, 3.5, 4.0, 10.0])
    a = prof(r)
    assert np.array_equal(a[:3], [0, 0, 0])
    assert a[3] == 1.0
    assert a[4] == 2.0 and a[5] == 2.0
    assert prof.sup == 2.0


def test_profile_kinds():
    r = np.linspace(0, 5, 7)
    assert np.all(DampingProfile("constant", 0.7)(r) == 0.7)
    assert np.all(DampingProfile("zero")(r) == 0.0)
    with pytest.raises(ValueError):
        DampingProfile("localized", eps0=0.0)
    with pytest.raises(ValueError):
        DampingProfile("localized", L=1.0, ramp_width=1.0)
    with pytest.raises(ValueError):
        DampingProfile("bogus")


def test_bump_mass_and_support():
    g = Grid2D(4.0, 401)
    b = make_bump((0.5, -0.5), 1.5, 2.0, g)
    assert integrate(b, g) == pytest.approx(Bump((0.5, -0.5), 1.5, 2.0).mass, rel=1e-6)
    far = np.hypot(*(np.asarray(m) - c for m, c in zip(g.mesh(), (0.5, -0.5)))) >= 1.5
    assert np.all(b[far] == 0)


def test_bump_must_fit():
    with pytest.raises(ValueError, match="does not fit"):
        make_bump((3.0, 0.0), 2.0, 1.0, Grid2D(4.0, 41))


def test_initial_data_support_checked():
    g = Grid2D(5.0, 51)
    with pytest.raises(ValueError):
        InitialData.from_bumps(g, [Bump((1.0, 0.0), 2.0, 1.0)], [], 2.0)
    d = InitialData.from_bumps(g, [], [Bump((0.0, 0.0), 2.0, 1.0)], 2.0)
    assert np.all(d.u0 == 0)


def test_laplacian_of_quadratic_is_exact_inside():
    g = Grid2D(2.0, 21)
    x1, x2 = g.mesh()
    lap = laplacian(x1**2 + 3 * x2**2, g.dx)
    assert np.allclose(lap[1:-1, 1:-1], 8.0, atol=1e-10)


def test_periodic_laplacian_of_constant():
    g = Grid2D(1.0, 11)
    assert np.allclose(laplacian(np.full(g.shape, 3.0), g.dx, periodic=True), 0)


def test_gradient_of_linear():
    g = Grid2D(2.0, 21)
    x1, x2 = g.mesh()
    g1, g2 = gradient(2 * x1 - x2, g.dx)
    assert np.allclose(g1[1:-1, 1:-1], 2.0)
    assert np.allclose(g2[1:-1, 1:-1], -1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_discrete_green_identity(seed):
    # -sum g * lap f * dx^2 == edge sum of D+f D+g for zero-padded fields
    rng = np.random.default_rng(seed)
    g = Grid2D(1.0, 9)
    f = rng.normal(size=g.shape)
    h = rng.normal(size=g.shape)
    lhs = -integrate(h * laplacian(f, g.dx), g)
    assert lhs == pytest.approx(edge_grad_sq(f, g.dx, h), rel=1e-12, abs=1e-12)
    assert edge_grad_sq(f, g.dx) >= 0


def test_region_split_partitions_nodes():
    g = Grid2D(3.0, 31)
    inside = region_mask(g, 1.5, True)
    outside = region_mask(g, 1.5, False)
    assert not np.any(inside & outside) and np.all(inside | outside)
    f = np.ones(g.shape)
    assert integrate_region(f, g, 1.5, True) + integrate_region(f, g, 1.5, False) == pytest.approx(integrate(f, g))
