"""Functionals evaluated on simulation states and trajectories.

Energy, dissipation, interior/exterior L^2 masses, the radial weight ``phi``,
the multiplier functional ``G_k``, propagation checks, a sampling estimator
for the whole-space Poincare constant, and the L^2 growth bound built on the
Newton potential.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .geometry import Bump, Grid2D, bump_kernel, edge_grad_sq, gradient, integrate, integrate_region
from .solver import WaveState, velocity

RECORD_FIELDS = ("t", "E", "l2u", "l2ut", "U_in", "V_out", "diss_cum",
                 "weighted_l2_cum", "Gk", "energy_residual", "l2v")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E: float
    l2u: float
    l2ut: float
    U_in: float
    V_out: float
    diss_cum: float
    weighted_l2_cum: float
    Gk: float
    energy_residual: float
    l2v: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in RECORD_FIELDS)


assert tuple(f.name for f in fields(DiagnosticsRecord)) == RECORD_FIELDS


@dataclass(frozen=True)
class MultiplierParams:
    eps0: float
    L: float
    k: float = 4.0

    def __post_init__(self):
        if not self.eps0 > 0 or not self.L > 0:
            raise ValueError("multiplier weight needs eps0 > 0 and L > 0")
        if not self.k > 3:
            raise ValueError(f"multiplier weight k must exceed 3, got {self.k}")

    @property
    def alpha(self) -> float:
        return 0.75 * self.eps0

    @property
    def eps1(self) -> float:
        return self.eps0 / 8.0

    def with_k(self, k: float) -> "MultiplierParams":
        return MultiplierParams(self.eps0, self.L, k)


def series(records, name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=float)


# ------------------------------------------------------------ state functionals


def energy(state: WaveState, a: np.ndarray) -> float:
    """``1/2 ∫ (u_t^2 + |∇u|^2)`` with centred ``u_t`` and edge differences for ``∇u``."""
    ut = velocity(state, a)
    return 0.5 * (integrate(ut * ut, state.grid) + edge_grad_sq(state.u_curr, state.grid.dx))


def staggered_energy(state: WaveState) -> float:
    """Energy at the half level ``n - 1/2`` that the scheme balances exactly.

    ``1/2 ||(u^n - u^{n-1})/dt||^2 + 1/2 <∇u^n, ∇u^{n-1}>``.  One step changes it by
    ``-dt ∫ a u_t^2`` with the centred ``u_t``, up to rounding.  It differs
    from :func:`energy` by ``O(dt^2)``.
    """
    d = (state.u_curr - state.u_prev) / state.dt
    return 0.5 * (integrate(d * d, state.grid) + edge_grad_sq(state.u_curr, state.grid.dx, state.u_prev))


def energy_residual(E: float, diss_cum: float, E0: float) -> float:
    return abs(E + diss_cum - E0) / max(E0, np.finfo(float).eps)


def phi_weight(r, eps0: float, L: float):
    """``eps0`` for ``r <= L`` and ``eps0 L / r`` beyond."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("phi_weight needs r >= 0")
    out = np.where(r <= L, eps0, eps0 * L / np.maximum(r, L))
    return out[()] if out.ndim == 0 else out


def G_k(state: WaveState, a: np.ndarray, params: MultiplierParams) -> float:
    grid = state.grid
    u = state.u_curr
    ut = velocity(state, a)
    g1, g2 = gradient(u, grid.dx)
    x1, x2 = grid.mesh()
    phi = phi_weight(grid.radius(), params.eps0, params.L)
    radial = integrate(ut * phi * (x1 * g1 + x2 * g2), grid)
    alpha = params.alpha
    return (radial + alpha * integrate(ut * u, grid) + 0.5 * alpha * integrate(a * u * u, grid)
            + params.k * energy(state, a))


def l2_split(u: np.ndarray, grid: Grid2D, L: float) -> tuple[float, float]:
    """``(U, V)``: L^2 mass of ``u`` on ``|x| <= L`` and on ``|x| > L``."""
    uu = u * u
    return integrate_region(uu, grid, L, True), integrate_region(uu, grid, L, False)


# --------------------------------------------------------- multiplier checks


class CalibrationError(RuntimeError):
    pass


def gk_series(records, params: MultiplierParams, k: float) -> np.ndarray:
    """``G_k`` along a trajectory recorded with ``params.k``; ``G_k`` is affine in ``k``."""
    return series(records, "Gk") + (k - params.k) * series(records, "E")


def gk_violations(records, params: MultiplierParams, k: float, rel_tol: float = 1e-6):
    """Indices where ``G_k < -tol`` and where ``G_k`` increases by more than ``tol``."""
    g = gk_series(records, params, k)
    if len(g) == 0:
        return [], []
    tol = rel_tol * abs(g[0])
    negative = np.flatnonzero(g < -tol).tolist()
    increasing = (np.flatnonzero(np.diff(g) > tol) + 1).tolist()
    return negative, increasing


def calibrate_k(records, params: MultiplierParams, rel_tol: float = 1e-6, k_max: float = 2.0**16) -> float:
    """Smallest ``k`` in 4, 8, ..., ``k_max`` with ``G_k >= 0`` and non-increasing."""
    k = 4.0
    last = None
    while k <= k_max:
        negative, increasing = gk_violations(records, params, k, rel_tol)
        if not negative and not increasing:
            return k
        last = (k, negative, increasing)
        k *= 2
    k, negative, increasing = last
    bad = (negative + increasing)[0]
    g = gk_series(records, params, k)
    raise CalibrationError(
        f"no k <= {k_max:g} makes G_k nonnegative and non-increasing; at k={k:g} "
        f"sample t={records[bad].t:.6g} has G_k={g[bad]:.6e} (G_k(0)={g[0]:.6e})"
    )


def cumulative_trapezoid(y, t) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(y)
    if len(y) > 1:
        out[1:] = np.cumsum(0.5 * np.diff(t) * (y[1:] + y[:-1]))
    return out


def beta_hat(records, params: MultiplierParams, k: float, rel_slack: float = 1e-4) -> float:
    """Largest ``beta`` with ``G_k(t) + beta ∫_0^t E <= G_k(0) (1 + rel_slack)`` on every sample."""
    g = gk_series(records, params, k)
    t = series(records, "t")
    int_E = cumulative_trapezoid(series(records, "E"), t)
    mask = int_E > 0
    if not mask.any():
        return np.inf
    return float(np.min((g[0] * (1 + rel_slack) - g[mask]) / int_E[mask]))


# --------------------------------------------------------------- propagation


@dataclass
class PropagationReport:
    t: float
    step_index: int
    cone_radius: float
    cone_max: float
    far_radius: float
    far_ratio: float

    @property
    def cone_exact(self) -> bool:
        return self.cone_max == 0.0


def propagation_check(state: WaveState, R: float) -> PropagationReport:
    """Stencil-cone support and the relative size of ``u`` beyond the light cone."""
    grid = state.grid
    r = grid.radius()
    u = np.abs(state.u_curr)
    cone_radius = R + state.step_index * grid.dx
    far_radius = R + state.t + 5 * grid.dx
    outside_cone = u[r > cone_radius]
    outside_far = u[r > far_radius]
    umax = u.max()
    cone_max = float(outside_cone.max()) if outside_cone.size else 0.0
    far_max = float(outside_far.max()) if outside_far.size else 0.0
    return PropagationReport(state.t, state.step_index, cone_radius, cone_max, far_radius,
                             far_max / umax if umax > 0 else 0.0)


# ------------------------------------------------------------------ Poincare


POINCARE_FAMILIES = ("inside", "straddle", "plateau")


@dataclass
class PoincareEstimate:
    rho: float
    constant: float
    ratios: np.ndarray = field(repr=False)
    skipped: int
    argmax: int


def poincare_ratio(v: np.ndarray, grid: Grid2D, rho: float) -> float:
    """``∫_{|x|<=rho} v^2 / (∫|∇v|^2 + ∫_{|x|>rho} v^2)``; nan when both denominators vanish."""
    vv = v * v
    num = integrate_region(vv, grid, rho, True)
    den = edge_grad_sq(v, grid.dx) + integrate_region(vv, grid, rho, False)
    if den == 0.0:
        return np.nan
    return num / den


def _plateau(grid: Grid2D, radius: float, skirt: float) -> np.ndarray:
    """C^2 plateau equal to 1 on ``|x| <= radius`` decaying to 0 across ``skirt``."""
    from .geometry import smoothstep5
    s = np.clip((grid.radius() - radius) / skirt, 0.0, 1.0)
    return 1.0 - smoothstep5(s)


def random_test_field(grid: Grid2D, rho: float, rng: np.random.Generator, family: str) -> np.ndarray:
    if family == "plateau":
        radius = rho * rng.uniform(0.0, 1.0)
        skirt = rho * rng.uniform(0.25, 2.0)
        return _plateau(grid, radius, skirt) * rng.choice([-1.0, 1.0])
    n_bumps = int(rng.integers(1, 4))
    x1, x2 = grid.mesh()
    v = grid.zeros()
    for _ in range(n_bumps):
        if family == "inside":
            radius = rho * rng.uniform(0.2, 1.0)
            dist = rng.uniform(0.0, rho - radius)
        else:
            radius = rho * rng.uniform(0.3, 2.5)
            dist = rho * rng.uniform(0.0, 2.0)
        theta = rng.uniform(0.0, 2 * np.pi)
        c = (dist * np.cos(theta), dist * np.sin(theta))
        v += rng.normal() * bump_kernel(np.hypot(x1 - c[0], x2 - c[1]), radius)
    return v


def poincare_sample(rho: float, n_samples: int, rng_seed: int, families=POINCARE_FAMILIES,
                    grid: Grid2D | None = None) -> PoincareEstimate:
    """Empirical lower bound on the optimal whole-space Poincare constant ``C(rho)``.

    Sample ``i`` is drawn from its own stream seeded by ``(rng_seed, i)``, so
    enlarging ``n_samples`` only appends fields and the maximum cannot drop.
    The family of each sample cycles through ``families``.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    if grid is None:
        grid = Grid2D(6.0 * rho, 241)
    if 5.0 * rho > grid.half_extent:
        raise ValueError("grid too small for the sampled test fields")
    ratios = np.full(n_samples, np.nan)
    for i in range(n_samples):
        rng = np.random.default_rng([rng_seed, i])
        fam = families[i % len(families)]
        v = random_test_field(grid, rho, rng, fam)
        ratios[i] = poincare_ratio(v, grid, rho)
    finite = np.isfinite(ratios)
    skipped = int((~finite).sum())
    if not finite.any():
        return PoincareEstimate(rho, 0.0, ratios, skipped, -1)
    idx = int(np.nanargmax(ratios))
    return PoincareEstimate(rho, float(ratios[idx]), ratios, skipped, idx)


# ----------------------------------------------------------- L^2 growth bound


@dataclass
class Lemma22Report:
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    slack: float
    holds: bool
    worst_index: int  # sample with the largest lhs / rhs

    @property
    def min_margin(self) -> float:
        """Smallest ``slack * rhs - lhs`` over the samples."""
        return float(np.min(self.slack * self.rhs - self.lhs)) if len(self.t) else 0.0


def lemma22_bound(t, l2u0: float, I_h: float, f_l1: float, R: float) -> np.ndarray:
    """``||u0||^2 + I_h + (2/pi) ||f||_1^2 log(2R + t)``."""
    return l2u0 + I_h + (2.0 / np.pi) * f_l1**2 * np.log(2.0 * R + np.asarray(t, dtype=float))


def lemma22_check(records, potential_report, slack: float = 1.05) -> Lemma22Report:
    """Check ``||u(t)||^2 + ∫∫ a u^2 <= slack * bound(t)`` at every record."""
    t = series(records, "t")
    lhs = series(records, "l2u") + series(records, "weighted_l2_cum")
    rhs = lemma22_bound(t, potential_report.l2u0, potential_report.I_h, potential_report.f_l1,
                        potential_report.R)
    ok = lhs <= slack * rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    worst = int(np.argmax(frac)) if len(t) else -1
    return Lemma22Report(t, lhs, rhs, slack, bool(ok.all()), worst)
