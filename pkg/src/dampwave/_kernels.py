"""Fused single-pass loops for the time stepper and the per-sample reductions.

Each loop reproduces, node by node and in the same floating-point order, the
vectorised formulas in :mod:`dampwave.solver` and :mod:`dampwave.diagnostics`.
All reductions are sequential, so results do not depend on thread count.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def advance(prev, curr, nxt, a, dt, dx, lo, hi, r, cone_radius):
    """Write u^{n+1} into ``nxt`` on the index box ``[lo, hi)^2``.

    Returns
    ``(sum a*ut^2, sum a*u^2, max |u^{n+1}| outside cone_radius, ok)``
    where ``ut`` is the centred velocity at level n.  Sums are not yet
    multiplied by the cell area.
    """
    n = curr.shape[0]
    inv_dx2 = 1.0 / (dx * dx)
    dt2 = dt * dt
    half_dt = 0.5 * dt
    inv_2dt = 1.0 / (2.0 * dt)
    diss = 0.0
    wl2 = 0.0
    cone_max = 0.0
    ok = True
    for i in range(lo, hi):
        for j in range(lo, hi):
            uc = curr[i, j]
            lap = uc * -4.0
            if i > 0:
                lap += curr[i - 1, j]
            if i < n - 1:
                lap += curr[i + 1, j]
            if j > 0:
                lap += curr[i, j - 1]
            if j < n - 1:
                lap += curr[i, j + 1]
            lap *= inv_dx2
            aij = a[i, j]
            up = prev[i, j]
            un = (2.0 * uc - (1.0 - aij * half_dt) * up + dt2 * lap) / (1.0 + aij * half_dt)
            nxt[i, j] = un
            if not (abs(un) < 1e300):
                ok = False
            ut = (un - up) * inv_2dt
            diss += aij * ut * ut
            wl2 += aij * uc * uc
            if r[i, j] > cone_radius:
                au = abs(un)
                if au > cone_max:
                    cone_max = au
    return diss, wl2, cone_max, ok


@njit(cache=True)
def accumulate(v, curr, nxt, half_dt, lo, hi):
    """Trapezoid update ``v += dt/2 (u^n + u^{n+1})`` on the active box."""
    for i in range(lo, hi):
        for j in range(lo, hi):
            v[i, j] += half_dt * (curr[i, j] + nxt[i, j])


@njit(cache=True)
def sample_sums(prev, curr, nxt, v, a, r, phix1, phix2, dt, dx, L, far_radius):
    """Raw (un-scaled) sums for one diagnostics record at level n.

    Returns an array with entries
    0 sum ut^2, 1 sum over edges (D+u)^2, 2 sum_{r<=L} u^2, 3 sum_{r>L} u^2,
    4 sum a u^2, 5 sum ut*phi*(x . grad0 u), 6 sum ut*u, 7 sum v^2,
    8 max|u|, 9 max_{r>far_radius}|u|, 10 max|u| on the outer 2-node frame.
    """
    n = curr.shape[0]
    inv_2dt = 1.0 / (2.0 * dt)
    inv_2dx = 1.0 / (2.0 * dx)
    out = np.zeros(11)
    for i in range(n):
        for j in range(n):
            u = curr[i, j]
            ut = (nxt[i, j] - prev[i, j]) * inv_2dt
            out[0] += ut * ut
            # forward edges, plus the edges into the zero padding on the low side
            if i < n - 1:
                d = curr[i + 1, j] - u
            else:
                d = -u
            out[1] += d * d
            if j < n - 1:
                d = curr[i, j + 1] - u
            else:
                d = -u
            out[1] += d * d
            if i == 0:
                out[1] += u * u
            if j == 0:
                out[1] += u * u
            uu = u * u
            if r[i, j] <= L:
                out[2] += uu
            else:
                out[3] += uu
            out[4] += a[i, j] * uu
            um = curr[i - 1, j] if i > 0 else 0.0
            upl = curr[i + 1, j] if i < n - 1 else 0.0
            g1 = (upl - um) * inv_2dx
            um = curr[i, j - 1] if j > 0 else 0.0
            upl = curr[i, j + 1] if j < n - 1 else 0.0
            g2 = (upl - um) * inv_2dx
            out[5] += ut * (phix1[i, j] * g1 + phix2[i, j] * g2)
            out[6] += ut * u
            out[7] += v[i, j] * v[i, j]
            au = abs(u)
            if au > out[8]:
                out[8] = au
            if r[i, j] > far_radius and au > out[9]:
                out[9] = au
            if (i < 2 or j < 2 or i >= n - 2 or j >= n - 2) and au > out[10]:
                out[10] = au
    return out
