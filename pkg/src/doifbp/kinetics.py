"""Orientation kinetics: the Fokker-Planck right-hand side and moment maps.

The orientation distribution f(x, tau) evolves by physical-space advection,
shear-induced drift on the sphere, rotational diffusion, and translational
diffusion.  The drift velocity is the tangential projection of the macroscopic
shear acting on a rod axis,

    P_perp(g tau) = g tau - (tau . g tau) tau,

and its sphere divergence is applied weakly in the harmonic basis: the
coefficient update contracts the per-cell velocity gradient against the
precomputed Galerkin matrices of the basis, which conserves per-cell sphere
mass identically (the constant-harmonic row is zero).

Moment maps extract the number density eta = int f dtau, the second-moment
stress int (3 tau tau^T - I) f dtau, and the entropy density int f ln f dtau
with its two Fisher-information dissipation integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, VectorField, _centered_diff, _check_values, _second_diff, grad, upwind_divergence
from .sphere import EPS_POS, OrientationField

SQRT_4PI = math.sqrt(4.0 * math.pi)


@dataclass(frozen=True)
class VelocityGradient:
    """Per-cell velocity gradient, zero-padded to 3x3.

    values[..., i, j] = d u_i / d x_j for i, j < dim; rows and columns beyond
    the physical dimension are identically zero so the sphere-drift formulas
    keep their three-dimensional form.
    """

    grid: object
    values: np.ndarray  # cells + (3, 3)

    def __post_init__(self):
        arr = _check_values(self.values, self.grid.cells + (3, 3), "velocity gradient")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class KineticMoments:
    """Bundle of the three moment fields extracted from one distribution."""

    eta: ScalarField
    sigma: np.ndarray  # cells + (3, 3), symmetric and trace-free
    psi: ScalarField


def velocity_gradient(u: VectorField) -> VelocityGradient:
    """Centered-difference gradient of the velocity, zero-padded to 3x3."""
    g = u.grid
    out = np.zeros(g.cells + (3, 3))
    for i in range(g.dim):
        gi = grad(ScalarField(g, u.values[i]), ghost="zero")
        for j in range(g.dim):
            out[..., i, j] = gi.values[j]
    return VelocityGradient(g, out)


def projection_drift(g: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Tangential drift P_perp(g tau) = g tau - (tau . g tau) tau.

    `tau` may carry leading batch axes; each vector must be unit length
    within 1e-12.
    """
    g = np.asarray(g, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if g.shape != (3, 3):
        raise ValueError(f"velocity gradient must be 3x3, got {g.shape}")
    norms = np.linalg.norm(tau, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise ValueError("drift direction tau must be a unit vector (within 1e-12)")
    v = tau @ g.T
    radial = np.sum(tau * v, axis=-1, keepdims=True)
    return v - radial * tau


def _drift_coefficients(basis, g_values: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Weak-form coefficients of -div_tau(P_perp(g tau) f) per cell."""
    cells = coeffs.shape[:-1]
    nq = coeffs.shape[-1]
    c = coeffs.reshape(-1, nq)
    g = g_values.reshape(-1, 9)
    d = basis.drift_mats.reshape(9, nq, nq)
    # t[x, n, p] = sum_q D[x, p, q] c[n, q], batched over the 9 gradient slots
    t = np.matmul(c, d.transpose(0, 2, 1))
    out = np.einsum("nx,xnp->np", g, t)
    return out.reshape(cells + (nq,))


def fp_rhs(f: OrientationField, u: VectorField, d_trans: float, d_rot: float) -> OrientationField:
    """Time derivative of the orientation distribution.

    Returns -div_x(f u) - div_tau(P_perp(grad u tau) f) + d_rot Lap_tau f
    + d_trans Lap_x f as a coefficient field.  Physical-space advection uses
    the same donor-cell flux as the scalar transport step, applied to every
    harmonic channel with one donor pattern, so the number-density moment of
    this right-hand side reproduces the discrete eta equation exactly.
    """
    if f.grid != u.grid:
        raise ValueError("orientation field and velocity live on different grids")
    g = f.grid
    adv = upwind_divergence(g, f.coeffs, u.values, ghost="zero")
    gv = velocity_gradient(u)
    drift = _drift_coefficients(f.basis, gv.values, f.coeffs)
    rot = d_rot * f.coeffs * f.basis.lap_eig
    xdiff = np.zeros_like(f.coeffs)
    for a in range(g.dim):
        xdiff += _second_diff(f.coeffs, a, g.h[a], g.bc, "zero")
    rhs = -adv + drift + rot + d_trans * xdiff
    return OrientationField(g, f.basis, rhs)


def eta_moment(f: OrientationField) -> ScalarField:
    """Number density int f dtau = sqrt(4 pi) x the constant-harmonic coefficient."""
    return ScalarField(f.grid, SQRT_4PI * f.coeffs[..., 0])


def stress_moment(f: OrientationField) -> np.ndarray:
    """Second-moment stress int (3 tau tau^T - I) f dtau, shape cells + (3, 3).

    Exact quadrature for band-limited f; symmetric by construction, trace-free
    because 3|tau|^2 - 3 vanishes at every node, and only harmonic degrees
    l in {0, 2} contribute (the l = 0 part cancels identically).
    """
    return np.tensordot(f.coeffs, f.basis.stress_map, axes=(-1, 0))


def entropy_and_fisher(f: OrientationField) -> tuple:
    """Entropy density and the two Fisher-information integrals.

    Returns (psi, fisher_tau, fisher_x) with psi the per-cell nodal quadrature
    of f ln f (0 ln 0 = 0; nodal values in [-EPS_POS, 0) are clamped to 0,
    anything below -EPS_POS is rejected), fisher_tau = int int |grad_tau
    sqrt(f)|^2 from the spectral gradient energy of the projected square-root
    field, and fisher_x = int int |grad_x sqrt(f)|^2 by nodal quadrature of
    centered spatial differences.
    """
    g = f.grid
    basis = f.basis
    nodal = f.nodal_values()
    worst = float(np.min(nodal))
    if worst < -EPS_POS:
        raise ValueError(
            f"entropy of a distribution with nodal value {worst:.3e} below -{EPS_POS:.1e}"
        )
    clamped = np.maximum(nodal, 0.0)
    safe = np.where(clamped > 0.0, clamped, 1.0)
    plogp = clamped * np.log(safe)
    psi = ScalarField(g, plogp @ basis.weights)

    sqrt_f = np.sqrt(clamped)
    s_coeffs = basis.analyze(sqrt_f)
    fisher_tau = g.cell_volume * float(np.sum((-basis.lap_eig) * s_coeffs**2))

    grad_sq = np.zeros_like(sqrt_f)
    for a in range(g.dim):
        grad_sq += _centered_diff(sqrt_f, a, g.h[a], g.bc, "zero") ** 2
    fisher_x = g.cell_volume * float(np.sum(grad_sq * basis.weights))
    return psi, fisher_tau, fisher_x


def kinetic_moments(f: OrientationField) -> KineticMoments:
    """All three moment fields of one distribution."""
    psi, _, _ = entropy_and_fisher(f)
    return KineticMoments(eta=eta_moment(f), sigma=stress_moment(f), psi=psi)
