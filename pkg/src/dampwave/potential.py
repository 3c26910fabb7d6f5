"""Two-dimensional Newton potential of the source ``f = u1 + a u0``.

``h(x) = -(1/2pi) ∫ log|x - y| f(y) dy`` is evaluated by direct summation over
source cells, with the singular self-cell replaced by the exact cell average
of ``log|.|``.  Also here: the Poisson residual, the far-field bound
``|x||∇h| <= ||f||_1 / pi`` beyond ``2R``, the near-field bound on
``I_h = ∫_{|x|<=2R} |∇h|^2`` and the annulus bound used by the L^2 growth
estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate as spi

from .geometry import Grid2D, InitialData, integrate, laplacian

# pairs of (eval, source) kernel entries held in memory per chunk
_CHUNK = 4_000_000


@dataclass
class SourceTerm:
    f: np.ndarray
    grid: Grid2D = field(repr=False)
    R: float

    def __post_init__(self):
        if np.any(self.f[self.grid.radius() > self.R] != 0.0):
            raise ValueError(f"source does not vanish outside B_R with R={self.R}")

    @property
    def l1_norm(self) -> float:
        return integrate(np.abs(self.f), self.grid)

    def lq_norm(self, q: float) -> float:
        if math.isinf(q):
            return float(np.max(np.abs(self.f)))
        return integrate(np.abs(self.f) ** q, self.grid) ** (1.0 / q)

    @property
    def mass(self) -> float:
        return integrate(self.f, self.grid)


def source_term(data: InitialData, a: np.ndarray) -> SourceTerm:
    return SourceTerm(data.u1 + a * data.u0, data.grid, data.R)


@lru_cache(maxsize=None)
def self_cell_log_average(dx: float) -> float:
    """Mean of ``log|z|`` over the square ``[-dx/2, dx/2]^2``.

    Computed by adaptive quadrature over one of the eight symmetric
    triangles ``0 <= y <= x <= dx/2``.
    """
    s = 0.5 * dx
    val, _ = spi.dblquad(lambda y, x: 0.5 * math.log(x * x + y * y) if x > 0 else 0.0,
                         0.0, s, 0.0, lambda x: x, epsabs=0.0, epsrel=1e-13)
    # triangle area is s^2/2
    return val / (0.5 * s * s)


@dataclass
class PotentialField:
    h: np.ndarray
    grad1: np.ndarray
    grad2: np.ndarray
    mask: np.ndarray
    grid: Grid2D = field(repr=False)

    @property
    def grad_norm(self) -> np.ndarray:
        return np.hypot(self.grad1, self.grad2)


def newton_potential(src: SourceTerm, where: np.ndarray | None = None) -> PotentialField:
    """Evaluate ``h`` and ``∇h`` on the nodes selected by ``where`` (default: all).

    Values outside ``where`` are left at zero.  Offsets between nodes are
    formed from integer index differences, so kernel values are exact
    functions of the lattice offset.
    """
    grid = src.grid
    dx = grid.dx
    if where is None:
        where = np.ones(grid.shape, dtype=bool)
    si, sj = np.nonzero(src.f)
    w = src.f[si, sj] * grid.cell_area
    ei, ej = np.nonzero(where)
    h = grid.zeros()
    g1 = grid.zeros()
    g2 = grid.zeros()
    if len(w) == 0 or len(ei) == 0:
        return PotentialField(h, g1, g2, where, grid)

    log_self = self_cell_log_average(dx)
    out_h = np.empty(len(ei))
    out_g1 = np.empty(len(ei))
    out_g2 = np.empty(len(ei))
    chunk = max(1, _CHUNK // len(w))
    for start in range(0, len(ei), chunk):
        stop = min(start + chunk, len(ei))
        d1 = (ei[start:stop, None] - si[None, :]).astype(float) * dx
        d2 = (ej[start:stop, None] - sj[None, :]).astype(float) * dx
        r2 = d1 * d1 + d2 * d2
        coincide = r2 == 0.0
        safe = np.where(coincide, 1.0, r2)
        logk = np.where(coincide, log_self, 0.5 * np.log(safe))
        inv = np.where(coincide, 0.0, 1.0 / safe)
        # sorting makes the sum depend only on the multiset of terms, so
        # lattice-symmetric sources give h exactly equal on symmetric nodes
        out_h[start:stop] = np.sum(np.sort(logk * w, axis=1), axis=1)
        out_g1[start:stop] = np.sum(d1 * inv * w, axis=1)
        out_g2[start:stop] = np.sum(d2 * inv * w, axis=1)
    c = -1.0 / (2.0 * np.pi)
    h[ei, ej] = c * out_h
    g1[ei, ej] = c * out_g1
    g2[ei, ej] = c * out_g2
    return PotentialField(h, g1, g2, where, grid)


def poisson_residual(h: np.ndarray, f: np.ndarray, grid: Grid2D, mask: np.ndarray | None = None) -> float:
    """``max |-Δh - f| / max|f|`` over interior nodes (optionally restricted by ``mask``)."""
    fmax = float(np.max(np.abs(f)))
    if fmax == 0.0:
        return 0.0
    res = np.abs(-laplacian(h, grid.dx) - f)
    interior = np.zeros(grid.shape, dtype=bool)
    interior[1:-1, 1:-1] = True
    if mask is not None:
        interior &= mask
    return float(res[interior].max()) / fmax


# ------------------------------------------------------------------ bounds


@dataclass
class FarFieldReport:
    sup: float
    argmax: tuple
    bound: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.sup <= self.bound * (1.0 + self.slack)


def farfield_gradient_check(src: SourceTerm, pot: PotentialField, slack: float = 1e-2) -> FarFieldReport:
    """``sup_{|x| >= 2R} |x| |∇h(x)|`` against ``||f||_1 / pi``."""
    grid = src.grid
    r = grid.radius()
    far = (r >= 2.0 * src.R) & pot.mask
    if 2.0 * src.R >= grid.half_extent or not far.any():
        raise ValueError("grid does not extend beyond 2R; cannot check the far-field bound")
    vals = np.where(far, r * pot.grad_norm, -np.inf)
    idx = np.unravel_index(int(np.argmax(vals)), grid.shape)
    return FarFieldReport(float(vals[idx]), idx, src.l1_norm / np.pi, slack)


def near_field_constant(R: float, p: float) -> float:
    """``4 pi R^2 {(2pi)^{1/p - 1} (2-p)^{-1/p} (4R)^{(2-p)/p}}^2`` for ``p in [1, 2)``."""
    if not 1.0 <= p < 2.0:
        raise ValueError(f"p must lie in [1, 2), got {p}")
    pointwise = (2 * np.pi) ** (1.0 / p - 1.0) * (2.0 - p) ** (-1.0 / p) * (4.0 * R) ** ((2.0 - p) / p)
    return 4.0 * np.pi * R * R * pointwise**2


def conjugate_exponent(p: float) -> float:
    return math.inf if p == 1.0 else p / (p - 1.0)


@dataclass
class NearFieldReport:
    p: float
    q: float
    I_h: float
    C_R: float
    f_lq: float

    @property
    def bound(self) -> float:
        return self.C_R * self.f_lq**2

    @property
    def holds(self) -> bool:
        return self.I_h <= self.bound


def near_bound_Ih(src: SourceTerm, p: float = 1.5, pot: PotentialField | None = None) -> NearFieldReport:
    """Quadrature of ``I_h`` over ``|x| <= 2R`` next to the closed-form bound ``C_R ||f||_q^2``."""
    C_R = near_field_constant(src.R, p)
    q = conjugate_exponent(p)
    grid = src.grid
    disk = grid.radius() <= 2.0 * src.R
    if pot is None:
        pot = newton_potential(src, disk)
    elif not np.all(pot.mask[disk]):
        raise ValueError("potential was not evaluated on the whole 2R-disk")
    gn2 = pot.grad1**2 + pot.grad2**2
    I_h = float(np.sum(gn2[disk])) * grid.cell_area
    return NearFieldReport(p, q, I_h, C_R, src.lq_norm(q))


def annulus_gradient_energy(pot: PotentialField, R: float, outer: float) -> float:
    """``∫_{2R <= |x| <= outer} |∇h|^2`` by the node quadrature."""
    grid = pot.grid
    r = grid.radius()
    ring = (r >= 2.0 * R) & (r <= outer)
    if not np.all(pot.mask[ring]):
        raise ValueError("potential was not evaluated on the whole annulus")
    return float(np.sum((pot.grad1**2 + pot.grad2**2)[ring])) * grid.cell_area


def annulus_bound(f_l1: float, R: float, t) -> np.ndarray:
    """``(2/pi) ||f||_1^2 log(2R + t)``."""
    return (2.0 / np.pi) * f_l1**2 * np.log(2.0 * R + np.asarray(t, dtype=float))


@dataclass
class PotentialReport:
    R: float
    f_l1: float
    l2u0: float
    I_h: float
    near: NearFieldReport
    far: FarFieldReport
    annuli: list  # (t, integral, bound)

    @property
    def annuli_hold(self) -> bool:
        return all(val <= bnd for _, val, bnd in self.annuli)

    def rows(self) -> list[tuple[str, float]]:
        rows = [
            ("R", self.R), ("f_l1", self.f_l1), ("u0_l2sq", self.l2u0),
            ("p", self.near.p), ("q", self.near.q), ("I_h", self.I_h), ("C_R", self.near.C_R),
            ("f_lq", self.near.f_lq), ("I_h_bound", self.near.bound),
            ("far_sup", self.far.sup), ("far_bound", self.far.bound),
        ]
        for t, val, bnd in self.annuli:
            rows.append((f"annulus_t={t:g}", val))
            rows.append((f"annulus_bound_t={t:g}", bnd))
        return rows


def potential_report(data: InitialData, a: np.ndarray, p: float = 1.5, annulus_times=(0.0, 10.0, 50.0, 100.0),
                     slack: float = 1e-2) -> PotentialReport:
    """All potential-side quantities for one data set, evaluating ``∇h`` once on the needed nodes."""
    src = source_term(data, a)
    grid = data.grid
    times = [t for t in annulus_times if 2 * data.R + t <= grid.half_extent]
    # the far-field check wants every node beyond 2R, so evaluate everywhere
    pot = newton_potential(src)
    near = near_bound_Ih(src, p, pot)
    far = farfield_gradient_check(src, pot, slack)
    annuli = [(t, annulus_gradient_energy(pot, data.R, 2 * data.R + t), float(annulus_bound(src.l1_norm, data.R, t)))
              for t in times]
    return PotentialReport(data.R, src.l1_norm, integrate(data.u0**2, grid), near.I_h, near, far, annuli)


# ------------------------------------------------------------ disk oracle


def _cell_disk_area(x0, x1, y0, y1, a):
    s = lambda u: math.sqrt(max(a * a - u * u, 0.0))
    chord = lambda u: max(0.0, min(y1, s(u)) - max(y0, -s(u)))
    lo, hi = max(x0, -a), min(x1, a)
    if lo >= hi:
        return 0.0
    pts = [p for p in (-a, a) if lo < p < hi]
    for y in (y0, y1):
        if abs(y) < a:
            c = math.sqrt(a * a - y * y)
            pts += [p for p in (-c, c) if lo < p < hi]
    val, _ = spi.quad(chord, lo, hi, points=sorted(pts) or None, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def disk_indicator(grid: Grid2D, a: float) -> np.ndarray:
    """Fraction of each node's cell covered by the disk ``|x| <= a``.

    Computed on one octant and mirrored, so the field is exactly 8-fold symmetric.
    """
    n, m, dx = grid.n, grid.center_index, grid.dx
    out = grid.zeros()
    for i in range(m, n):
        for j in range(m, i + 1):
            x0, y0 = (i - m - 0.5) * dx, (j - m - 0.5) * dx
            x1, y1 = x0 + dx, y0 + dx
            near = math.hypot(max(x0, 0.0), max(y0, 0.0))
            if near >= a:
                continue
            if math.hypot(x1, y1) <= a:
                frac = 1.0
            else:
                frac = _cell_disk_area(x0, x1, y0, y1, a) / (dx * dx)
            di, dj = i - m, j - m
            for p, q in ((di, dj), (dj, di)):
                for sp in (1, -1):
                    for sq in (1, -1):
                        out[m + sp * p, m + sq * q] = frac
    return out


def disk_potential(r, a: float):
    """Closed-form ``h`` and radial derivative ``h'`` for ``f = 1`` on the disk of radius ``a``."""
    r = np.asarray(r, dtype=float)
    rs = np.where(r > 0, r, 1.0)
    h = np.where(r >= a, -(a * a / 2) * np.log(rs), (a * a - r * r) / 4 - (a * a / 2) * math.log(a))
    dh = np.where(r >= a, -(a * a / 2) / rs, -r / 2)
    return h, dh
