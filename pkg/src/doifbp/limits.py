"""The stiff-pressure limit laboratory.

Runs the coupled system for an increasing sequence of adiabatic exponents
gamma on identical initial data and measures the free-boundary diagnostics:
L^p norms of the density excess (rho - 1)_+, the time-integrated L^1 mass of
rho^gamma, the complementarity residual int |rho^gamma (rho - 1)|, and the
incompressibility defect ||div u||_{L^2} on the congested set {rho >= 1-eps}.
A least-squares log-log fit of the L^2 excess norm against gamma over the
largest three gamma values estimates the decay rate (the expected order is
gamma^(-1/2)).

Per-gamma runs are independent and may execute concurrently (process pool,
capped by the DOIFBP_THREADS environment variable); results are aggregated
in gamma order regardless of completion order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .errors import NumericalError
from .grid import ScalarField, div, lp_norm
from .hydro import fluid_pressure
from .integrator import FluidState, run

DEFAULT_P_LIST = (1, 2, 4, math.inf)


@dataclass(frozen=True)
class GammaDiagnostics:
    """Free-boundary diagnostics of one finite-gamma run (final time T)."""

    gamma: float
    excess_l1: float
    excess_l2: float
    excess_l4: float
    excess_linf: float
    pressure_time_integral: float
    complementarity: float
    incompressibility_defect: float
    congested_volume: float

    FIELDS = (
        "gamma",
        "excess_l1",
        "excess_l2",
        "excess_l4",
        "excess_linf",
        "pressure_time_integral",
        "complementarity",
        "incompressibility_defect",
        "congested_volume",
    )

    def row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.FIELDS)


@dataclass(frozen=True)
class SweepResult:
    """Aggregated diagnostics of a gamma sweep, in increasing gamma order."""

    rows: tuple
    l2_slope: object  # float, or None when the fit is undefined
    eps_congestion: float

    def __post_init__(self):
        gammas = [r.gamma for r in self.rows]
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise ValueError("sweep rows must have strictly increasing gamma")
        for r in self.rows:
            if min(r.row()[1:]) < 0.0:
                raise ValueError("sweep diagnostics must be nonnegative")


def excess_density_norms(state: FluidState, p_list=DEFAULT_P_LIST) -> dict:
    """L^p norms of the density excess (rho - 1)_+ for each requested p."""
    excess = ScalarField(state.grid, np.maximum(state.rho.values - 1.0, 0.0))
    return {p: lp_norm(excess, p) for p in p_list}


def complementarity_residual(state: FluidState) -> float:
    """int |rho^gamma (rho - 1)| dx, the finite-gamma constraint defect."""
    pi = fluid_pressure(state.rho, state.law)
    resid = pi.values * np.abs(state.rho.values - 1.0)
    return float(np.sum(resid)) * state.grid.cell_volume


def incompressibility_defect(state: FluidState, eps: float) -> tuple:
    """(||div u||_{L^2({rho >= 1-eps})}, volume of that congested set)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"congestion threshold must lie in (0, 1), got {eps}")
    mask = state.rho.values >= 1.0 - eps
    volume = float(np.count_nonzero(mask)) * state.grid.cell_volume
    if volume == 0.0:
        return 0.0, 0.0
    divu = div(state.u, ghost="zero").values
    defect = math.sqrt(float(np.sum(divu[mask] ** 2)) * state.grid.cell_volume)
    return defect, volume


def _run_one_gamma(cfg: RunConfig, gamma: float) -> GammaDiagnostics:
    """Worker: one coupled run at a single gamma, diagnostics at final time."""
    from .presets import build_initial_state

    cfg_g = replace(cfg, gamma=gamma)
    state = build_initial_state(cfg_g)
    records, final = run(
        state,
        cfg_g.t_final,
        record_every=1,
        safety=cfg_g.cfl_safety,
        freeze_velocity=cfg_g.freeze_velocity,
    )
    # E_pressure = int rho^gamma / (gamma - 1), so (gamma - 1) E_pressure
    # recovers the Step-2 integrand; trapezoid over the per-step records.
    ts = np.array([r.t for r in records])
    pg = (gamma - 1.0) * np.array([r.e_pressure for r in records])
    pressure_integral = float(np.trapezoid(pg, ts))

    norms = excess_density_norms(final)
    defect, volume = incompressibility_defect(final, cfg_g.eps_congestion)
    return GammaDiagnostics(
        gamma=gamma,
        excess_l1=norms[1],
        excess_l2=norms[2],
        excess_l4=norms[4],
        excess_linf=norms[math.inf],
        pressure_time_integral=pressure_integral,
        complementarity=complementarity_residual(final),
        incompressibility_defect=defect,
        congested_volume=volume,
    )


def _resolve_workers(n_tasks: int, workers) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("DOIFBP_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"DOIFBP_THREADS must be an integer, got {env!r}") from None
    return max(1, min(n_tasks, os.cpu_count() or 1))


def fit_l2_slope(rows) -> object:
    """Log-log slope of the L^2 excess norm over the largest three gammas.

    Returns None when fewer than three rows exist or any of the three norms
    has underflowed to zero.
    """
    if len(rows) < 3:
        return None
    top = rows[-3:]
    if any(r.excess_l2 <= 0.0 for r in top):
        return None
    lg = np.log([r.gamma for r in top])
    ln = np.log([r.excess_l2 for r in top])
    return float(np.polyfit(lg, ln, 1)[0])


def gamma_sweep(template_config: RunConfig, gamma_list=None, t_final=None, workers=None) -> SweepResult:
    """Run the coupled integrator once per gamma and aggregate diagnostics.

    gamma_list defaults to the template's `gammas`; t_final overrides the
    template when given.  Runs execute concurrently when more than one worker
    is available; the result is identical to the sequential one.
    """
    gammas = [float(g) for g in (gamma_list if gamma_list is not None else template_config.gammas)]
    if not gammas:
        raise ValueError("gamma sweep needs at least one gamma")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gamma values must be strictly increasing")
    if any(g <= 1.5 for g in gammas):
        raise ValueError("every gamma must exceed 3/2")
    cfg = template_config if t_final is None else replace(template_config, t_final=float(t_final))

    n_workers = _resolve_workers(len(gammas), workers)
    if n_workers == 1 or len(gammas) == 1:
        results = {}
        for g in gammas:
            try:
                results[g] = _run_one_gamma(cfg, g)
            except Exception as err:
                raise NumericalError(f"sweep run at gamma={g} failed: {err}") from err
    else:
        results = {}
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = {g: pool.submit(_run_one_gamma, cfg, g) for g in gammas}
            for g, fut in futures.items():
                try:
                    results[g] = fut.result()
                except Exception as err:
                    raise NumericalError(f"sweep run at gamma={g} failed: {err}") from err

    rows = tuple(results[g] for g in gammas)
    return SweepResult(rows=rows, l2_slope=fit_l2_slope(rows), eps_congestion=cfg.eps_congestion)
