"""Pressure laws, conservative transport, and the viscous momentum update.

The barotropic fluid pressure is the stiff power law rho^gamma (gamma > 3/2);
the total pressure adds the polymer contributions eta + eta^2.  Scalars are
transported with donor-cell upwind fluxes plus explicit centered diffusion,
which keeps them nonnegative and exactly conservative on periodic grids.

The momentum update is split: explicit conservative advection of m = rho u,
explicit pressure-gradient and kinetic-stress forces, then a backward
(implicit) viscous solve

    (rho I - dt (mu Lap + lambda grad div)) u_new = m_star,

performed matrix-free with conjugate gradients.  The operator is symmetric
positive definite for rho >= rho_floor, so the iteration is plain CG on the
density-weighted form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .grid import (
    ScalarField,
    VectorField,
    _centered_diff,
    _second_diff,
    grad,
    upwind_divergence,
)
from .kinetics import stress_moment, velocity_gradient

#: densities below this are treated as vacuum; velocity is forced to zero there
RHO_FLOOR = 1e-10

_CFL_SLACK = 1.0 + 1e-12


@dataclass(frozen=True)
class PressureLaw:
    """Barotropic law pi = rho^gamma with the standing constraint gamma > 3/2."""

    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        if not self.gamma > 1.5:
            raise ValueError(f"gamma must exceed 3/2, got {self.gamma}")


@dataclass(frozen=True)
class PhysCoeffs:
    """Viscosities and diffusivities; the normalized default is 1 for all."""

    mu: float = 1.0
    lam: float = 1.0
    d_trans: float = 1.0
    d_rot: float = 1.0

    def __post_init__(self):
        for name in ("mu", "lam", "d_trans", "d_rot"):
            val = float(getattr(self, name))
            object.__setattr__(self, name, val)
            if not val > 0.0:
                raise ValueError(f"coefficient {name} must be positive, got {val}")


def fluid_pressure(rho: ScalarField, law: PressureLaw) -> ScalarField:
    """pi = rho^gamma computed as exp(gamma ln rho), with pi = 0 where rho = 0."""
    r = rho.values
    if np.any(r < 0.0):
        raise ValueError("fluid pressure of a negative density")
    out = np.zeros_like(r)
    pos = r > 0.0
    out[pos] = np.exp(law.gamma * np.log(r[pos]))
    return ScalarField(rho.grid, out)


def total_pressure(pi: ScalarField, eta: ScalarField) -> ScalarField:
    """Total pressure pi + eta + eta^2 (fluid plus polymer parts)."""
    if pi.grid != eta.grid:
        raise ValueError("pressure contributions live on different grids")
    e = eta.values
    if np.any(e < 0.0):
        raise ValueError("total pressure of a negative number density")
    return ScalarField(pi.grid, pi.values + e + e * e)


def _advective_ok(grid, u: np.ndarray, dt: float) -> bool:
    for a in range(grid.dim):
        vmax = float(np.max(np.abs(u[a])))
        if dt * vmax > grid.h[a] * _CFL_SLACK:
            return False
    return True


def transport_step(
    s: ScalarField, u: VectorField, dt: float, diffusivity: float = 0.0, ghost: str = "zero"
) -> ScalarField:
    """One explicit step of d_t s + div(s u) = diffusivity * Lap s.

    Donor-cell upwind flux plus centered diffusion: conservative (exact cell
    sum on periodic grids for diffusivity compatible stencils), monotone for
    pure advection, and nonnegativity-preserving under the CFL bound.
    """
    if s.grid != u.grid:
        raise ValueError("transported field and velocity live on different grids")
    if np.any(s.values < 0.0):
        raise ValueError("transport of a negative field")
    g = s.grid
    if not _advective_ok(g, u.values, dt):
        raise NumericalError(f"advective CFL violated for dt={dt:.3e}")
    if diffusivity > 0.0:
        stiff = dt * diffusivity * sum(2.0 / h**2 for h in g.h)
        if stiff > _CFL_SLACK:
            raise NumericalError(f"explicit diffusion unstable for dt={dt:.3e}")
    out = s.values - dt * upwind_divergence(g, s.values, u.values, ghost=ghost)
    if diffusivity > 0.0:
        lap = np.zeros_like(s.values)
        for a in range(g.dim):
            lap += _second_diff(s.values, a, g.h[a], g.bc, ghost)
        out = out + dt * diffusivity * lap
    # roundoff guard: the update is nonnegative in exact arithmetic under the
    # CFL bound, but mixed-sign rounding can land 1 ulp below zero
    tiny = 1e-13 * max(float(np.max(s.values)), 1.0)
    low = float(np.min(out))
    if low < 0.0:
        if low < -tiny:
            raise NumericalError(f"transport produced negative values ({low:.3e})")
        out = np.maximum(out, 0.0)
    return ScalarField(g, out)


def _viscous_apply(grid, rho_hat, u, dt, mu, lam):
    """(rho_hat I - dt (mu Lap + lambda grad div)) u, matrix-free."""
    out = rho_hat * u
    for i in range(grid.dim):
        lap = np.zeros(grid.cells)
        for a in range(grid.dim):
            lap += _second_diff(u[i], a, grid.h[a], grid.bc, "zero")
        out[i] -= dt * mu * lap
    d = np.zeros(grid.cells)
    for a in range(grid.dim):
        d += _centered_diff(u[a], a, grid.h[a], grid.bc, "zero")
    for i in range(grid.dim):
        out[i] -= dt * lam * _centered_diff(d, i, grid.h[i], grid.bc, "zero")
    return out


def _viscous_solve(grid, rho_hat, b, dt, mu, lam, max_iter=2000):
    """CG on the SPD operator of `_viscous_apply`.

    Converges to relative residual 1e-13 when possible (so conservation sums
    stay at roundoff) and accepts any iterate below 1e-10, the documented
    solve tolerance; anything worse is a numerical failure.
    """
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    x = b / rho_hat  # exact solution for dt -> 0
    r = b - _viscous_apply(grid, rho_hat, x, dt, mu, lam)
    p = r.copy()
    rs = float(np.vdot(r, r))
    best_x, best_res = x.copy(), math.sqrt(rs)
    target = 1e-13 * b_norm
    for _ in range(max_iter):
        if math.sqrt(rs) <= target:
            break
        ap = _viscous_apply(grid, rho_hat, p, dt, mu, lam)
        denom = float(np.vdot(p, ap))
        if denom <= 0.0:
            break
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(np.vdot(r, r))
        if math.sqrt(rs_new) < best_res:
            best_res = math.sqrt(rs_new)
            best_x = x.copy()
        if rs_new >= rs and math.sqrt(rs_new) <= 1e-10 * b_norm:
            break  # stalled below the accept tolerance
        beta = rs_new / rs
        p = r + beta * p
        rs = rs_new
    if best_res > 1e-10 * b_norm:
        raise NumericalError(
            f"viscous solve stalled at relative residual {best_res / b_norm:.3e}"
        )
    return best_x


def momentum_step(state, dt: float, coeffs: PhysCoeffs, law: PressureLaw) -> VectorField:
    """Advance m = rho u by advection, pressure, stress, and implicit viscosity.

    Uses the state's density for both the momentum and the viscous operator
    (the coupled integrator passes the freshest scalar fields).  Total
    momentum is conserved on periodic grids to the CG tolerance: advective
    fluxes telescope and centered gradients of periodic fields sum to zero.
    """
    g = state.rho.grid
    rho = state.rho.values
    u = state.u.values
    m = np.moveaxis(rho * u, 0, -1)  # channels-last for the shared donor flux
    m = m - dt * upwind_divergence(g, m, u, ghost="zero")

    pressure = total_pressure(fluid_pressure(state.rho, law), state.eta)
    gp = grad(pressure, ghost="edge").values
    sigma = stress_moment(state.f)
    for i in range(g.dim):
        force = -gp[i]
        for j in range(g.dim):
            force += _centered_diff(sigma[..., i, j], j, g.h[j], g.bc, "zero")
        m[..., i] += dt * force

    m = np.moveaxis(m, -1, 0)
    rho_hat = np.maximum(rho, RHO_FLOOR)
    vacuum = rho < RHO_FLOOR
    if np.any(vacuum):
        m = np.where(vacuum, 0.0, m)
    u_new = _viscous_solve(g, rho_hat, m, dt, coeffs.mu, coeffs.lam)
    if np.any(vacuum):
        u_new = np.where(vacuum, 0.0, u_new)
    return VectorField(g, u_new)


def cfl_dt(state, coeffs: PhysCoeffs, law: PressureLaw, safety: float) -> float:
    """Stable step size: safety x min(advective, acoustic, diffusive, drift).

    advective  h / max|u|            (per axis)
    acoustic   h / sqrt(gamma max rho^(gamma-1))
    diffusive  h^2 / (2 d max(D, 1))   for the explicit eta and f diffusion
    drift      1 / (L(L+1) max|grad u|)  for the spectral sphere drift

    The acoustic bound shrinks like gamma^(-1/2) at rho = 1: the documented
    cost of the stiff pressure.  An all-zero state returns the pure-diffusion
    bound (the other constraints degenerate to infinity).
    """
    if not 0.0 < safety <= 1.0:
        raise ValueError(f"safety factor must lie in (0, 1], got {safety}")
    g = state.rho.grid
    bounds = []
    for a in range(g.dim):
        vmax = float(np.max(np.abs(state.u.values[a])))
        if vmax > 0.0:
            bounds.append(g.h[a] / vmax)
    h_min = min(g.h)
    rho_max = float(np.max(state.rho.values))
    if rho_max > 0.0:
        speed2 = law.gamma * math.exp((law.gamma - 1.0) * math.log(rho_max))
        bounds.append(h_min / math.sqrt(speed2))
    bounds.append(h_min**2 / (2.0 * g.dim * max(coeffs.d_trans, 1.0)))
    gv = velocity_gradient(state.u).values
    g_max = float(np.max(np.sqrt(np.sum(gv * gv, axis=(-2, -1)))))
    if g_max > 0.0:
        L = state.f.basis.degree
        bounds.append(1.0 / (L * (L + 1) * g_max))
    return safety * min(bounds)
