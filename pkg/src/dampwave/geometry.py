"""Grids, discrete operators and admissible damping profiles / initial data.

Fields are plain ``(n, n)`` float64 arrays indexed ``[i, j]`` with ``i`` along
x1 and ``j`` along x2 (row-major).  A :class:`Grid2D` carries the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DAMPING_KINDS = ("localized", "constant", "zero")


@dataclass(frozen=True)
class Grid2D:
    """Origin-centred uniform square lattice covering ``[-X, X]^2``."""

    half_extent: float
    n: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"grid.n must be odd and >= 3, got {self.n}")
        if not self.half_extent > 0:
            raise ValueError(f"grid.half_extent must be positive, got {self.half_extent}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / (self.n - 1)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dx

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def center_index(self) -> int:
        return (self.n - 1) // 2

    @property
    def x(self) -> np.ndarray:
        """Node coordinates along one axis, symmetric about 0 by construction."""
        m = self.center_index
        return np.arange(-m, m + 1, dtype=float) * self.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.x, indexing="ij")

    def radius(self) -> np.ndarray:
        x1, x2 = self.mesh()
        return np.hypot(x1, x2)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def index_of(self, x1: float, x2: float) -> tuple[int, int]:
        """Index of the node nearest to ``(x1, x2)``."""
        m = self.center_index
        return (m + int(round(x1 / self.dx)), m + int(round(x2 / self.dx)))

    def refined(self) -> "Grid2D":
        """Same box, half the spacing; every old node stays a node."""
        return Grid2D(self.half_extent, 2 * (self.n - 1) + 1)


@dataclass(frozen=True)
class DampingProfile:
    """Parametrised friction coefficient ``a(x)``.

    ``localized``: zero on ``|x| <= L - ramp_width``, ``eps0`` on ``|x| >= L``,
    quintic smoothstep in between (C^2).  ``constant``: ``a == eps0``.
    ``zero``: ``a == 0``.
    """

    kind: str = "localized"
    eps0: float = 1.0
    L: float = 4.0
    ramp_width: float = 1.0

    def __post_init__(self):
        if self.kind not in DAMPING_KINDS:
            raise ValueError(f"unknown damping kind {self.kind!r}; expected one of {DAMPING_KINDS}")
        if self.kind == "localized":
            if not self.eps0 > 0:
                raise ValueError("localized damping needs eps0 > 0")
            if not 0 < self.ramp_width < self.L:
                raise ValueError("localized damping needs 0 < ramp_width < L")
        if self.kind == "constant" and self.eps0 < 0:
            raise ValueError("constant damping must be nonnegative")

    @property
    def sup(self) -> float:
        return 0.0 if self.kind == "zero" else self.eps0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "constant":
            return np.full_like(r, self.eps0)
        s = np.clip((r - (self.L - self.ramp_width)) / self.ramp_width, 0.0, 1.0)
        return self.eps0 * smoothstep5(s)

    def sample(self, grid: Grid2D) -> np.ndarray:
        return self(grid.radius())


def smoothstep5(s):
    """C^2 ramp 6s^5 - 15s^4 + 10s^3 on [0, 1]."""
    s = np.asarray(s, dtype=float)
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0)


def make_damping(kind: str, eps0: float, L: float, ramp_width: float, grid: Grid2D) -> np.ndarray:
    return DampingProfile(kind, eps0, L, ramp_width).sample(grid)


@dataclass(frozen=True)
class Bump:
    center: tuple[float, float]
    radius: float
    amplitude: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"bump radius must be positive, got {self.radius}")

    @property
    def reach(self) -> float:
        return float(np.hypot(*self.center)) + self.radius

    @property
    def mass(self) -> float:
        # 2*pi*int_0^rho (1 - r^2/rho^2)^4 r dr = pi*rho^2/5
        return self.amplitude * np.pi * self.radius**2 / 5.0


def bump_kernel(r, radius):
    """``(1 - r^2/radius^2)^4`` clipped to zero outside the disk (C^3 at the edge)."""
    q = 1.0 - (np.asarray(r, dtype=float) / radius) ** 2
    return np.where(q > 0.0, q, 0.0) ** 4


def make_bump(center, radius: float, amplitude: float, grid: Grid2D) -> np.ndarray:
    b = Bump(tuple(center), radius, amplitude)
    if b.reach > grid.half_extent:
        raise ValueError(
            f"bump at {b.center} with radius {b.radius} does not fit inside the grid (X={grid.half_extent})"
        )
    x1, x2 = grid.mesh()
    return amplitude * bump_kernel(np.hypot(x1 - b.center[0], x2 - b.center[1]), radius)


def sum_of_bumps(bumps, grid: Grid2D) -> np.ndarray:
    out = grid.zeros()
    for b in bumps:
        out += make_bump(b.center, b.radius, b.amplitude, grid)
    return out


@dataclass
class InitialData:
    u0: np.ndarray
    u1: np.ndarray
    R: float
    grid: Grid2D = field(repr=False)

    def __post_init__(self):
        r = self.grid.radius()
        outside = r > self.R
        if np.any(self.u0[outside] != 0.0) or np.any(self.u1[outside] != 0.0):
            raise ValueError(f"initial data not supported in B_R with R={self.R}")

    @classmethod
    def from_bumps(cls, grid: Grid2D, u0_bumps, u1_bumps, R: float) -> "InitialData":
        for b in list(u0_bumps) + list(u1_bumps):
            if b.reach > R * (1 + 1e-12):
                raise ValueError(f"bump {b} reaches beyond declared support radius R={R}")
        return cls(sum_of_bumps(u0_bumps, grid), sum_of_bumps(u1_bumps, grid), R, grid)


# ---------------------------------------------------------------- operators


def laplacian(f: np.ndarray, dx: float, periodic: bool = False, out: np.ndarray | None = None) -> np.ndarray:
    """5-point Laplacian; zero padding outside the grid unless ``periodic``."""
    if periodic:
        lap = (np.roll(f, 1, 0) + np.roll(f, -1, 0) + np.roll(f, 1, 1) + np.roll(f, -1, 1) - 4.0 * f)
        lap /= dx * dx
        if out is not None:
            out[...] = lap
            return out
        return lap
    if out is None:
        out = np.empty_like(f)
    np.multiply(f, -4.0, out=out)
    out[1:, :] += f[:-1, :]
    out[:-1, :] += f[1:, :]
    out[:, 1:] += f[:, :-1]
    out[:, :-1] += f[:, 1:]
    out *= 1.0 / (dx * dx)
    return out


def gradient(f: np.ndarray, dx: float) -> tuple[np.ndarray, np.ndarray]:
    """Centred-difference gradient with zero padding."""
    g1 = np.zeros_like(f)
    g2 = np.zeros_like(f)
    g1[1:-1, :] = f[2:, :] - f[:-2, :]
    g1[0, :] = f[1, :]
    g1[-1, :] = -f[-2, :]
    g2[:, 1:-1] = f[:, 2:] - f[:, :-2]
    g2[:, 0] = f[:, 1]
    g2[:, -1] = -f[:, -2]
    g1 /= 2.0 * dx
    g2 /= 2.0 * dx
    return g1, g2


def edge_grad_sq(f: np.ndarray, dx: float, g: np.ndarray | None = None) -> float:
    """Sum over lattice edges of ``D+f * D+g`` times the cell area.

    This is the quadrature of ``grad f . grad g`` that pairs with
    :func:`laplacian`: ``-integrate(g * laplacian(f)) == edge_grad_sq(f, g)``
    for zero-padded fields.
    """
    if g is None:
        g = f
    s = 0.0
    # interior edges plus the edges to the zero padding on each side
    d1f = np.diff(f, axis=0, prepend=0.0, append=0.0)
    d1g = d1f if g is f else np.diff(g, axis=0, prepend=0.0, append=0.0)
    s += float(np.sum(d1f * d1g))
    d2f = np.diff(f, axis=1, prepend=0.0, append=0.0)
    d2g = d2f if g is f else np.diff(g, axis=1, prepend=0.0, append=0.0)
    s += float(np.sum(d2f * d2g))
    # (D f)^2 / dx^2 * dx^2
    return s


def integrate(f: np.ndarray, grid: Grid2D) -> float:
    return float(np.sum(f)) * grid.cell_area


def region_mask(grid: Grid2D, rho: float, inside: bool = True) -> np.ndarray:
    """Node partition: inside is ``|x| <= rho``, outside is ``|x| > rho``."""
    r = grid.radius()
    return r <= rho if inside else r > rho


def integrate_region(f: np.ndarray, grid: Grid2D, rho: float, inside: bool = True) -> float:
    return float(np.sum(f[region_mask(grid, rho, inside)])) * grid.cell_area
