"""Uniform rectangular grids, cell-centered fields, and discrete calculus.

Physical space is a periodic or Dirichlet box in one or two dimensions,
discretized with uniform cell-centered volumes.  Gradient, divergence, and
Laplacian use second-order centered stencils; on periodic grids grad and div
are exact negative adjoints under the cell-sum inner product.  The donor-cell
upwind divergence that every transport equation shares also lives here, so
density, number density, momentum, and harmonic coefficient channels are all
advected with one flux definition.

Dirichlet boundaries are realized with a single ghost layer.  Ghost policy is
per-quantity: ``"zero"`` imposes the homogeneous boundary value (velocity,
number density, orientation coefficients), ``"edge"`` copies the adjacent
interior cell, giving a zero-normal-gradient extrapolation (mass density,
pressure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PERIODIC = "periodic"
DIRICHLET = "dirichlet"
_GHOST_MODES = ("zero", "edge")


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on a rectangular box.

    Parameters
    ----------
    cells : tuple of int
        Cell count per axis; at least 4 per axis, 1 or 2 axes.
    lengths : tuple of float
        Box extent per axis.
    bc : str
        ``"periodic"`` or ``"dirichlet"``.
    """

    cells: tuple
    lengths: tuple
    bc: str = PERIODIC

    def __post_init__(self):
        cells = tuple(int(n) for n in np.atleast_1d(self.cells))
        lengths = tuple(float(x) for x in np.atleast_1d(self.lengths))
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "lengths", lengths)
        if len(cells) not in (1, 2):
            raise ValueError(f"grid dimension must be 1 or 2, got {len(cells)}")
        if len(lengths) != len(cells):
            raise ValueError("cells and lengths must have matching axis counts")
        if any(n < 4 for n in cells):
            raise ValueError(f"need at least 4 cells per axis, got {cells}")
        if any(x <= 0.0 for x in lengths):
            raise ValueError(f"box lengths must be positive, got {lengths}")
        if self.bc not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown boundary condition {self.bc!r}")

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def h(self) -> tuple:
        return tuple(x / n for x, n in zip(self.lengths, self.cells))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.h)

    @property
    def n_cells(self) -> int:
        return math.prod(self.cells)

    def axis_centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        h = self.h[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def meshes(self) -> tuple:
        """Cell-center coordinate arrays, shaped like a scalar field."""
        axes = [self.axis_centers(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))


def _check_values(values: np.ndarray, shape: tuple, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{what} shaped {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    return arr


@dataclass(frozen=True)
class ScalarField:
    """One real value per cell."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _check_values(self.values, self.grid.cells, "scalar field values")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class VectorField:
    """dim real components per cell, stored component-first."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        shape = (self.grid.dim,) + self.grid.cells
        arr = _check_values(self.values, shape, "vector field values")
        object.__setattr__(self, "values", arr)


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def _ax(ndim: int, axis: int, sl: slice) -> tuple:
    idx = [slice(None)] * ndim
    idx[axis] = sl
    return tuple(idx)


def _pad_axis(arr: np.ndarray, axis: int, bc: str, ghost: str) -> np.ndarray:
    """Attach one ghost cell on each side of `axis`."""
    if ghost not in _GHOST_MODES:
        raise ValueError(f"unknown ghost policy {ghost!r}")
    shape = list(arr.shape)
    shape[axis] += 2
    out = np.empty(shape, dtype=float)
    nd = arr.ndim
    out[_ax(nd, axis, slice(1, -1))] = arr
    if bc == PERIODIC:
        out[_ax(nd, axis, slice(0, 1))] = arr[_ax(nd, axis, slice(-1, None))]
        out[_ax(nd, axis, slice(-1, None))] = arr[_ax(nd, axis, slice(0, 1))]
    elif ghost == "edge":
        out[_ax(nd, axis, slice(0, 1))] = arr[_ax(nd, axis, slice(0, 1))]
        out[_ax(nd, axis, slice(-1, None))] = arr[_ax(nd, axis, slice(-1, None))]
    else:
        out[_ax(nd, axis, slice(0, 1))] = 0.0
        out[_ax(nd, axis, slice(-1, None))] = 0.0
    return out


def _centered_diff(arr: np.ndarray, axis: int, h: float, bc: str, ghost: str) -> np.ndarray:
    p = _pad_axis(arr, axis, bc, ghost)
    hi = p[_ax(p.ndim, axis, slice(2, None))]
    lo = p[_ax(p.ndim, axis, slice(None, -2))]
    return (hi - lo) / (2.0 * h)


def _second_diff(arr: np.ndarray, axis: int, h: float, bc: str, ghost: str) -> np.ndarray:
    p = _pad_axis(arr, axis, bc, ghost)
    hi = p[_ax(p.ndim, axis, slice(2, None))]
    lo = p[_ax(p.ndim, axis, slice(None, -2))]
    return (hi - 2.0 * arr + lo) / (h * h)


def grad(s: ScalarField, ghost: str = "zero") -> VectorField:
    """Second-order centered gradient respecting the grid's boundary type."""
    g = s.grid
    comps = [_centered_diff(s.values, a, g.h[a], g.bc, ghost) for a in range(g.dim)]
    return VectorField(g, np.stack(comps))


def div(v: VectorField, ghost: str = "zero") -> ScalarField:
    """Second-order centered divergence, the negative adjoint of grad."""
    g = v.grid
    out = np.zeros(g.cells)
    for a in range(g.dim):
        out += _centered_diff(v.values[a], a, g.h[a], g.bc, ghost)
    return ScalarField(g, out)


def laplacian(s: ScalarField, ghost: str = "zero") -> ScalarField:
    """Compact second-order Laplacian (3-point per axis)."""
    g = s.grid
    out = np.zeros(g.cells)
    for a in range(g.dim):
        out += _second_diff(s.values, a, g.h[a], g.bc, ghost)
    return ScalarField(g, out)


def lp_norm(s: ScalarField, p) -> float:
    """(sum |s|^p * cellvolume)^(1/p); max norm for p = inf."""
    if p == math.inf or p == np.inf:
        return float(np.max(np.abs(s.values))) if s.values.size else 0.0
    p = float(p)
    if p < 1.0:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    total = float(np.sum(np.abs(s.values) ** p)) * s.grid.cell_volume
    return total ** (1.0 / p)


def integral(s: ScalarField) -> float:
    """Cell-sum integral over the box."""
    return float(np.sum(s.values)) * s.grid.cell_volume


def upwind_divergence(grid: Grid, q: np.ndarray, u: np.ndarray, ghost: str = "zero") -> np.ndarray:
    """Donor-cell divergence of the flux q*u, div_h(q u).

    Face velocities are two-point averages of the cell velocities; the donor
    cell is selected by the face-velocity sign.  On periodic grids the two
    copies of each wrap-around face are computed from identical inputs, so the
    cell sum of the result telescopes to zero exactly and transported mass is
    conserved to roundoff.

    Parameters
    ----------
    q : ndarray, shape grid.cells + channels
        Transported quantity; trailing axes are independent channels sharing
        the same donor pattern (used for harmonic coefficients and momentum).
    u : ndarray, shape (dim,) + grid.cells
        Advecting velocity.
    ghost : str
        Ghost policy for q on Dirichlet grids ("zero" or "edge"); the
        velocity ghost is always the boundary value u = 0.
    """
    dim = grid.dim
    n_extra = q.ndim - dim
    if q.shape[:dim] != grid.cells or n_extra < 0:
        raise ValueError(f"transported array shaped {q.shape} does not match grid {grid.cells}")
    out = np.zeros_like(q, dtype=float)
    for a in range(dim):
        up = _pad_axis(u[a], a, grid.bc, "zero")
        qp = _pad_axis(q, a, grid.bc, ghost)
        u_lo = up[_ax(up.ndim, a, slice(None, -1))]
        u_hi = up[_ax(up.ndim, a, slice(1, None))]
        uf = 0.5 * (u_lo + u_hi)  # one face per interior cell pair, ends included
        uf = uf.reshape(uf.shape + (1,) * n_extra)
        q_lo = qp[_ax(qp.ndim, a, slice(None, -1))]
        q_hi = qp[_ax(qp.ndim, a, slice(1, None))]
        flux = np.maximum(uf, 0.0) * q_lo + np.minimum(uf, 0.0) * q_hi
        f_hi = flux[_ax(flux.ndim, a, slice(1, None))]
        f_lo = flux[_ax(flux.ndim, a, slice(None, -1))]
        out += (f_hi - f_lo) / grid.h[a]
    return out
