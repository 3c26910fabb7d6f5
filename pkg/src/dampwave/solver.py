"""Leapfrog integration of ``u_tt - Δu + a(x) u_t = 0`` on a square box.

The damping term uses the centred average ``a (u^{n+1} - u^{n-1}) / (2 dt)``,
which keeps the scheme explicit (the division is pointwise) and second order.
The time antiderivative ``v(t) = ∫_0^t u ds`` is accumulated with the
trapezoid rule as the simulation advances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .geometry import Grid2D, InitialData, laplacian

DEFAULT_CFL = 0.9


class InstabilityError(FloatingPointError):
    """Raised when the solution stops being finite."""


class GridTooSmallError(ValueError):
    """Raised when the solution would reach the edge of the computational box."""


def max_stable_dt(dx: float, cfl_safety: float = DEFAULT_CFL) -> float:
    return cfl_safety * dx / math.sqrt(2.0)


def _check_cfl(dt: float, dx: float, cfl_safety: float):
    if not 0.0 < cfl_safety < 1.0:
        raise ValueError(f"cfl_safety must lie in (0, 1), got {cfl_safety}")
    if not dt > 0 or dt > max_stable_dt(dx, cfl_safety) * (1.0 + 1e-12):
        raise ValueError(
            f"dt={dt} violates the CFL bound dt <= {cfl_safety} * dx / sqrt(2) = {max_stable_dt(dx, cfl_safety)}"
        )


@dataclass
class WaveState:
    grid: Grid2D
    u_prev: np.ndarray
    u_curr: np.ndarray
    v_accum: np.ndarray
    t: float
    dt: float
    step_index: int = 0
    periodic: bool = False

    def copy(self) -> "WaveState":
        return replace(self, u_prev=self.u_prev.copy(), u_curr=self.u_curr.copy(), v_accum=self.v_accum.copy())


def init_state(data: InitialData, dt: float, a: np.ndarray | None = None,
               cfl_safety: float = DEFAULT_CFL, periodic: bool = False) -> WaveState:
    """Start from ``(u0, u1)`` with a second-order Taylor back-step for level -1."""
    grid = data.grid
    _check_cfl(dt, grid.dx, cfl_safety)
    if a is None:
        a = grid.zeros()
    u0 = np.array(data.u0, dtype=float)
    u1 = np.array(data.u1, dtype=float)
    lap0 = laplacian(u0, grid.dx, periodic=periodic)
    u_prev = u0 - dt * u1 + 0.5 * dt * dt * (lap0 - a * u1)
    return WaveState(grid, u_prev, u0, grid.zeros(), 0.0, dt, 0, periodic)


def next_level(state: WaveState, a: np.ndarray) -> np.ndarray:
    """``u^{n+1}`` from the two stored levels (vectorised reference formula)."""
    dt = state.dt
    half_dt = 0.5 * dt
    lap = laplacian(state.u_curr, state.grid.dx, periodic=state.periodic)
    return (2.0 * state.u_curr - (1.0 - a * half_dt) * state.u_prev + (dt * dt) * lap) / (1.0 + a * half_dt)


def step(state: WaveState, a: np.ndarray) -> WaveState:
    with np.errstate(over="ignore", invalid="ignore"):
        u_next = next_level(state, a)
    if not np.all(np.isfinite(u_next)):
        raise InstabilityError(
            f"non-finite values at step {state.step_index + 1} (t={state.t + state.dt:.6g}); "
            f"check the CFL bound and the damping coefficient"
        )
    v = state.v_accum + (0.5 * state.dt) * (state.u_curr + u_next)
    return WaveState(state.grid, state.u_curr, u_next, v, state.t + state.dt, state.dt,
                     state.step_index + 1, state.periodic)


def velocity(state: WaveState, a: np.ndarray) -> np.ndarray:
    """Centred ``u_t`` at the current level; needs one look-ahead step."""
    return (next_level(state, a) - state.u_prev) / (2.0 * state.dt)


# ------------------------------------------------------------------ driver


@dataclass
class RunResult:
    records: list
    state: WaveState
    frame_max: float
    cone_max: float
    far_ratio_max: float
    n_steps: int


def step_count(T_final: float, dx: float, cfl_safety: float = DEFAULT_CFL) -> tuple[int, float]:
    """Number of steps and the step size that lands exactly on ``T_final``."""
    if T_final == 0:
        return 0, max_stable_dt(dx, cfl_safety)
    n = math.ceil(T_final / max_stable_dt(dx, cfl_safety) - 1e-9)
    return n, T_final / n


def run(data: InitialData, a: np.ndarray, T_final: float, sample_every: int = 1, sinks=(),
        params=None, cfl_safety: float = DEFAULT_CFL, frame_tol: float = 1e-10) -> RunResult:
    """Advance to ``T_final`` and return a diagnostics record every ``sample_every`` steps.

    Each record is also passed to every callable in ``sinks`` as it is produced.
    ``params`` is the :class:`~dampwave.diagnostics.MultiplierParams` used for the
    ``Gk`` column; by default it is derived from ``eps0 = max(a)`` (or 1) and
    ``L = 4`` with ``k = 4``.
    """
    from .diagnostics import DiagnosticsRecord, MultiplierParams, phi_weight

    grid = data.grid
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    if data.R + T_final + 4 * grid.dx > grid.half_extent:
        raise GridTooSmallError(
            f"box half-extent {grid.half_extent} < R + T_final + 4 dx = {data.R + T_final + 4 * grid.dx}"
        )
    if params is None:
        eps0 = float(a.max()) if a.max() > 0 else 1.0
        params = MultiplierParams(eps0=eps0, L=4.0)

    n_steps, dt = step_count(T_final, grid.dx, cfl_safety)
    state = init_state(data, dt, a, cfl_safety)
    a = np.ascontiguousarray(a, dtype=float)
    dx, n = grid.dx, grid.n
    area = grid.cell_area
    r = grid.radius()
    x1, x2 = grid.mesh()
    phi = phi_weight(r, params.eps0, params.L)
    phix1, phix2 = phi * x1, phi * x2
    alpha, k = params.alpha, params.k

    prev = np.ascontiguousarray(state.u_prev)
    curr = np.ascontiguousarray(state.u_curr)
    nxt = grid.zeros()
    v = grid.zeros()
    m = grid.center_index
    reach0 = int(math.ceil(data.R / dx))

    records = []
    diss_cum = 0.0
    wl2_cum = 0.0
    diss_last = wl2_last = 0.0
    E0 = None
    frame_max = cone_max = far_ratio = 0.0
    for step_n in range(n_steps + 1):
        half = min(m, reach0 + step_n + 2)
        lo, hi = m - half, m + half + 1
        cone_radius = data.R + (step_n + 1) * dx
        diss, wl2, cmax, ok = _kernels.advance(prev, curr, nxt, a, dt, dx, lo, hi, r, cone_radius)
        if not ok:
            raise InstabilityError(f"non-finite values at step {step_n + 1} (t={(step_n + 1) * dt:.6g})")
        cone_max = max(cone_max, cmax)
        diss *= area
        wl2 *= area
        if step_n > 0:
            diss_cum += 0.5 * dt * (diss_last + diss)
            wl2_cum += 0.5 * dt * (wl2_last + wl2)
        diss_last, wl2_last = diss, wl2
        if step_n % sample_every == 0:
            t = step_n * dt
            s = _kernels.sample_sums(prev, curr, nxt, v, a, r, phix1, phix2, dt, dx,
                                     params.L, data.R + t + 5 * dx)
            kin, grad = s[0] * area, s[1]
            E = 0.5 * (kin + grad)
            if E0 is None:
                E0 = E
            U_in, V_out = s[2] * area, s[3] * area
            Gk = s[5] * area + alpha * s[6] * area + 0.5 * alpha * s[4] * area + k * E
            rec = DiagnosticsRecord(
                t=t, E=E, l2u=U_in + V_out, l2ut=kin, U_in=U_in, V_out=V_out,
                diss_cum=diss_cum, weighted_l2_cum=wl2_cum, Gk=Gk,
                energy_residual=abs(E + diss_cum - E0) / max(E0, np.finfo(float).eps),
                l2v=s[7] * area,
            )
            if s[8] > 0:
                frame_max = max(frame_max, s[10] / s[8])
                far_ratio = max(far_ratio, s[9] / s[8])
                if s[10] > frame_tol * s[8]:
                    raise GridTooSmallError(
                        f"solution reached the boundary frame at t={t:.6g} "
                        f"(frame max / max = {s[10] / s[8]:.3e}); enlarge grid.half_extent"
                    )
            records.append(rec)
            for sink in sinks:
                sink(rec)
        if step_n < n_steps:
            _kernels.accumulate(v, curr, nxt, 0.5 * dt, lo, hi)
        prev, curr, nxt = curr, nxt, prev

    # curr now holds level n_steps + 1; hand back the state at level n_steps
    final = WaveState(grid, nxt.copy(), prev.copy(), v, n_steps * dt, dt, n_steps)
    return RunResult(records, final, frame_max, cone_max, far_ratio, n_steps)
