"""Initial data builders for the named presets.

Every preset keeps the mean density strictly below 1 (subcritical mass, the
regime in which the stiff-pressure limit produces a genuine free boundary)
and starts the orientation distribution isotropic with number density eta0,
so the initial kinetic stress vanishes identically.
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .errors import ConfigError
from .grid import Grid, ScalarField, VectorField
from .hydro import PhysCoeffs, PressureLaw
from .integrator import FluidState
from .sphere import SphereBasis, make_sphere_basis, uniform_orientation


def _velocity_values(cfg: RunConfig, grid: Grid) -> np.ndarray:
    shape = (grid.dim,) + grid.cells
    u = np.zeros(shape)
    meshes = grid.meshes()
    a = cfg.amplitude
    if cfg.preset == "uniform":
        return u
    if cfg.preset == "colliding_streams":
        # Two opposed streams meeting at the domain midline; compression
        # around x = L/2 drives the density toward the congestion threshold.
        u[0] = -a * np.sin(2.0 * np.pi * meshes[0] / grid.lengths[0])
        return u
    if cfg.preset == "taylor_vortex":
        if grid.dim != 2:
            raise ConfigError("preset 'taylor_vortex' needs dim = 2")
        kx = 2.0 * np.pi / grid.lengths[0]
        ky = 2.0 * np.pi / grid.lengths[1]
        u[0] = -a * np.sin(kx * meshes[0]) * np.cos(ky * meshes[1])
        u[1] = a * np.cos(kx * meshes[0]) * np.sin(ky * meshes[1])
        return u
    raise ConfigError(f"unknown preset {cfg.preset!r}")


def build_initial_state(cfg: RunConfig, basis: SphereBasis = None) -> FluidState:
    """Assemble the t = 0 state for `cfg` (optionally reusing a basis)."""
    grid = Grid(cells=cfg.cells, lengths=cfg.lengths, bc=cfg.bc)
    if basis is None:
        basis = make_sphere_basis(cfg.sphere_degree)
    elif basis.degree != cfg.sphere_degree:
        raise ConfigError(
            f"basis degree {basis.degree} does not match sphere_degree {cfg.sphere_degree}"
        )

    rho_values = np.full(grid.cells, float(cfg.rho0))
    if cfg.perturbation > 0.0:
        rng = np.random.default_rng(cfg.seed)
        noise = rng.standard_normal(grid.cells)
        noise -= noise.mean()  # mean-preserving, so the mass stays subcritical
        peak = np.max(np.abs(noise))
        if peak > 0.0:
            rho_values += cfg.perturbation * noise / peak
    if np.min(rho_values) < 0.0:
        raise ConfigError("perturbation drives the initial density negative")
    if np.mean(rho_values) >= 1.0:
        raise ConfigError("initial mean density must stay below 1")

    rho = ScalarField(grid, rho_values)
    u = VectorField(grid, _velocity_values(cfg, grid))
    eta = ScalarField(grid, np.full(grid.cells, float(cfg.eta0)))
    f = uniform_orientation(grid, basis, cfg.eta0)
    return FluidState(
        rho=rho,
        u=u,
        eta=eta,
        f=f,
        t=0.0,
        law=PressureLaw(cfg.gamma),
        coeffs=PhysCoeffs(mu=cfg.mu, lam=cfg.lam, d_trans=cfg.d_trans, d_rot=cfg.d_rot),
    )
