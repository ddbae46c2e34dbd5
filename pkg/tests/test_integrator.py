"""Coupled stepping, the energy ledger, and the renormalized diagnostic."""

import math

import numpy as np
import pytest

from doifbp import (
    Grid,
    NumericalError,
    PhysCoeffs,
    PressureLaw,
    ScalarField,
    VectorField,
    cfl_dt,
    energy_total,
    integral,
    make_sphere_basis,
    renormalized_residual,
    run,
    step,
    uniform_orientation,
)
from doifbp.integrator import FluidState

SQRT_4PI = math.sqrt(4.0 * math.pi)


def _state(grid, basis, rho, u, eta, gamma=5.0, coeffs=None, f=None):
    return FluidState(
        rho=ScalarField(grid, rho),
        u=VectorField(grid, u),
        eta=ScalarField(grid, eta),
        f=f if f is not None else uniform_orientation(grid, basis, float(np.mean(eta))),
        t=0.0,
        law=PressureLaw(gamma),
        coeffs=coeffs if coeffs is not None else PhysCoeffs(),
    )


def _smooth_state(n=32, gamma=5.0):
    basis = make_sphere_basis(3)
    g = Grid(cells=(n,), lengths=(1.0,))
    x = g.axis_centers(0)
    rho = 0.8 + 0.1 * np.sin(2.0 * np.pi * x)
    u = (0.1 * np.cos(2.0 * np.pi * x)).reshape(1, -1)
    eta = 0.1 + 0.02 * np.cos(2.0 * np.pi * x)
    f_coeffs = np.zeros(g.cells + (basis.n_coeff,))
    f_coeffs[..., 0] = eta / SQRT_4PI  # moment-consistent with eta
    from doifbp import OrientationField

    f = OrientationField(g, basis, f_coeffs)
    return _state(g, basis, rho, u, eta, gamma=gamma, f=f)


# ---------------------------------------------------------------------------
# energy ledger


def test_energy_closed_form():
    # rho = 1, u = 0, eta = 1, f = 1/(4 pi), unit volume, gamma = 5:
    # E = 1/(gamma-1) + 1 - ln(4 pi), each term in closed form
    basis = make_sphere_basis(3)
    g = Grid(cells=(16,), lengths=(1.0,))
    state = _state(g, basis, np.ones(16), np.zeros((1, 16)), np.ones(16))
    rec = energy_total(state)
    expected = 0.25 + 1.0 - math.log(4.0 * math.pi)
    assert rec.e_total == pytest.approx(expected, rel=1e-12)
    assert rec.e_kinetic == 0.0
    assert rec.e_pressure == pytest.approx(0.25, rel=1e-12)
    assert rec.e_eta == pytest.approx(1.0, rel=1e-12)
    assert rec.e_entropy == pytest.approx(-math.log(4.0 * math.pi), rel=1e-12)
    parts = rec.e_kinetic + rec.e_pressure + rec.e_eta + rec.e_entropy
    assert rec.e_total == pytest.approx(parts, rel=1e-12)
    assert rec.mass == pytest.approx(1.0, rel=1e-14)
    assert rec.rod_mass == pytest.approx(1.0, rel=1e-14)


def test_energy_vacuum_state_is_zero():
    basis = make_sphere_basis(2)
    g = Grid(cells=(8,), lengths=(1.0,))
    state = _state(g, basis, np.zeros(8), np.zeros((1, 8)), np.zeros(8))
    rec = energy_total(state)
    assert rec.e_total == 0.0
    assert rec.dissipation == 0.0


def test_energy_kinetic_homogeneity():
    state = _smooth_state()
    doubled = FluidState(
        rho=state.rho,
        u=VectorField(state.grid, 2.0 * state.u.values),
        eta=state.eta,
        f=state.f,
        t=0.0,
        law=state.law,
        coeffs=state.coeffs,
    )
    r1, r2 = energy_total(state), energy_total(doubled)
    assert r2.e_kinetic == pytest.approx(4.0 * r1.e_kinetic, rel=1e-13)
    assert r2.e_pressure == r1.e_pressure
    assert r2.e_eta == r1.e_eta
    assert r2.e_entropy == r1.e_entropy


# ---------------------------------------------------------------------------
# single steps


def test_step_uniform_equilibrium_is_fixed_point():
    basis = make_sphere_basis(3)
    g = Grid(cells=(16,), lengths=(1.0,))
    state = _state(g, basis, np.full(16, 0.8), np.zeros((1, 16)), np.full(16, 0.2))
    out = step(state, 1e-3)
    assert np.max(np.abs(out.rho.values - 0.8)) < 1e-12
    assert np.max(np.abs(out.u.values)) < 1e-12
    assert np.max(np.abs(out.eta.values - 0.2)) < 1e-12
    assert np.max(np.abs(out.f.coeffs - state.f.coeffs)) < 1e-12


def test_step_with_zero_velocity_only_diffuses():
    state = _smooth_state()
    frozen = FluidState(
        rho=state.rho,
        u=VectorField(state.grid, np.zeros_like(state.u.values)),
        eta=state.eta,
        f=state.f,
        t=0.0,
        law=state.law,
        coeffs=state.coeffs,
    )
    out = step(frozen, 1e-4, freeze_velocity=True)
    assert np.array_equal(out.rho.values, frozen.rho.values)  # no advection at all
    assert not np.array_equal(out.eta.values, frozen.eta.values)  # diffusion acted
    assert integral(out.eta) == pytest.approx(integral(frozen.eta), rel=1e-13)


def test_step_rejects_nonpositive_dt():
    state = _smooth_state()
    with pytest.raises(ValueError, match="positive"):
        step(state, 0.0)


def test_step_reports_failing_substep():
    basis = make_sphere_basis(2)
    g = Grid(cells=(8,), lengths=(1.0,))
    state = _state(g, basis, np.full(8, 0.5), np.full((1, 8), 4.0), np.full(8, 0.1))
    with pytest.raises(NumericalError, match="substep 'density transport' failed at t="):
        step(state, 10.0 * g.h[0])  # violates the advective CFL on purpose


def test_splitting_global_error_first_order():
    # fixed-step integrations against a small-step reference: halving dt
    # should halve the final-time error of the first-order splitting
    state = _smooth_state()
    t_final = 6.4e-3

    def advance(dt):
        s = state
        n = round(t_final / dt)
        for _ in range(n):
            s = step(s, dt)
        return s.rho.values

    ref = advance(2.5e-5)
    errs = [float(np.sum(np.abs(advance(dt) - ref))) for dt in (4e-4, 2e-4)]
    ratio = errs[0] / errs[1]
    assert 1.7 <= ratio <= 2.3, f"splitting refinement ratio {ratio:.3f}"


# ---------------------------------------------------------------------------
# trajectories


def test_run_zero_duration_returns_initial():
    state = _smooth_state()
    records, final = run(state, state.t)
    assert len(records) == 1
    assert final is state


def test_run_equilibrium_records_identical():
    basis = make_sphere_basis(2)
    g = Grid(cells=(8,), lengths=(1.0,))
    state = _state(g, basis, np.full(8, 0.8), np.zeros((1, 8)), np.full(8, 0.2))
    records, _ = run(state, 0.02, record_every=1)
    assert len(records) > 2
    first = np.array(records[0].row()[1:])  # drop t
    for rec in records[1:]:
        assert np.max(np.abs(np.array(rec.row()[1:]) - first)) < 1e-10


def test_run_diffusion_pulse_eta_energy_non_increasing():
    basis = make_sphere_basis(2)
    g = Grid(cells=(32,), lengths=(1.0,))
    x = g.axis_centers(0)
    eta = 0.1 + 0.3 * np.exp(-80.0 * (x - 0.5) ** 2)
    state = _state(g, basis, np.full(32, 0.8), np.zeros((1, 32)), eta)
    records, _ = run(state, 0.01, record_every=1, freeze_velocity=True)
    e_eta = [r.e_eta for r in records]
    assert all(b <= a + 1e-14 for a, b in zip(e_eta, e_eta[1:]))


def test_run_validates_arguments():
    state = _smooth_state()
    with pytest.raises(ValueError, match="precedes"):
        run(state, -1.0)
    with pytest.raises(ValueError, match="record_every"):
        run(state, 0.1, record_every=0)


def test_run_mass_ledger_and_determinism():
    state = _smooth_state(n=16)
    records_a, final_a = run(state, 0.02, record_every=1)
    records_b, final_b = run(state, 0.02, record_every=1)
    # identical inputs give bit-identical trajectories
    for ra, rb in zip(records_a, records_b):
        assert ra.row() == rb.row()
    assert np.array_equal(final_a.rho.values, final_b.rho.values)
    assert np.array_equal(final_a.f.coeffs, final_b.f.coeffs)
    # conserved totals stay at roundoff
    mass = [r.mass for r in records_a]
    rod = [r.rod_mass for r in records_a]
    assert max(abs(m - mass[0]) for m in mass) < 1e-13 * abs(mass[0])
    assert max(abs(m - rod[0]) for m in rod) < 1e-13 * max(abs(rod[0]), 1e-30)


def test_run_observer_sees_every_step_without_side_effects():
    state = _smooth_state(n=16)
    seen = []
    records, final = run(state, 0.01, record_every=1, observer=lambda k, s: seen.append((k, s.t)))
    assert [k for k, _ in seen] == list(range(1, len(seen) + 1))
    assert seen[-1][1] == final.t
    records_b, final_b = run(state, 0.01, record_every=1)
    assert np.array_equal(final.rho.values, final_b.rho.values)
    assert [r.row() for r in records] == [r.row() for r in records_b]


# ---------------------------------------------------------------------------
# renormalized continuity diagnostic


def test_renormalized_identity_for_b_equals_z():
    state = _smooth_state()
    dt = cfl_dt(state, state.coeffs, state.law, 0.45)
    after = step(state, dt)
    resid = renormalized_residual(state, after, lambda z: z, lambda z: np.ones_like(z))
    assert resid <= 1e-12


def test_renormalized_constant_b_divergence_free_u():
    # b constant and u uniform (divergence-free in 1D): every term degenerates
    basis = make_sphere_basis(2)
    g = Grid(cells=(16,), lengths=(1.0,))
    rho = np.full(16, 0.7)
    state = _state(g, basis, rho, np.full((1, 16), 0.3), np.full(16, 0.1))
    dt = 1e-3
    after = step(state, dt)
    resid = renormalized_residual(
        state, after, lambda z: np.full_like(z, 2.0), lambda z: np.zeros_like(z)
    )
    assert resid <= 1e-13


def test_renormalized_requires_time_order():
    state = _smooth_state()
    with pytest.raises(ValueError, match="ordered"):
        renormalized_residual(state, state, lambda z: z, lambda z: np.ones_like(z))
