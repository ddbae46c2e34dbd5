#!/usr/bin/env python3
"""Energy ledger of the colliding-streams benchmark.

Runs the fully coupled system on the 1D colliding-streams preset in a
congesting regime (fast opposed streams, weak viscosity) and prints the
running energy budget: the total

    E = int [ rho |u|^2 / 2 + rho^gamma/(gamma-1) + eta^2 + psi ] dx

falls monotonically up to a tiny tolerance, while the dissipation column
(both Fisher informations plus the viscous and number-density-gradient
channels) shows where it goes.  Mass and rod number are conserved to
roundoff.  The density crest where the streams meet overshoots the
congestion threshold rho = 1 by a finite-gamma amount; the companion
congestion_sweep.py demo measures how that overshoot dies as gamma grows.
"""

import numpy as np

from doifbp import RunConfig, run
from doifbp.presets import build_initial_state


def main():
    cfg = RunConfig(
        dim=1,
        cells=(128,),
        lengths=(6.0,),
        gamma=10.0,
        sphere_degree=2,
        amplitude=2.6,
        rho0=0.5,
        eta0=0.1,
        mu=0.1,
        lam=0.1,
        t_final=0.5,
    )
    state = build_initial_state(cfg)
    print("=" * 74)
    print(
        f"colliding streams: n = {cfg.cells[0]}, L = {cfg.lengths[0]}, "
        f"gamma = {cfg.gamma}, amplitude = {cfg.amplitude}, rho0 = {cfg.rho0}"
    )
    print("=" * 74)

    crest = [float(np.max(state.rho.values))]
    records, final = run(
        state,
        cfg.t_final,
        record_every=1,
        safety=cfg.cfl_safety,
        observer=lambda k, s: crest.append(float(np.max(s.rho.values))),
    )

    print(f"{'t':>7} {'E_total':>10} {'E_kin':>9} {'E_press':>9} {'dissipation':>12} {'max rho':>8}")
    for idx in np.linspace(0, len(records) - 1, 9).astype(int):
        rec = records[idx]
        print(
            f"{rec.t:7.3f} {rec.e_total:10.5f} {rec.e_kinetic:9.5f} "
            f"{rec.e_pressure:9.5f} {rec.dissipation:12.5f} {crest[idx]:8.4f}"
        )

    e = np.array([r.e_total for r in records])
    rises = np.maximum(np.diff(e), 0.0)
    print()
    print(f"energy drop over the run       : {e[0] - e[-1]:.6f}")
    print(f"worst single-step energy rise  : {np.max(rises) if rises.size else 0.0:.3e}")
    print(f"mass drift (relative)          : {abs(records[-1].mass / records[0].mass - 1.0):.2e}")
    print(f"rod-number drift (relative)    : {abs(records[-1].rod_mass / records[0].rod_mass - 1.0):.2e}")
    print(f"largest crest over the run     : {max(crest):.4f} (threshold 1.0)")
    print(f"final crest                    : {np.max(final.rho.values):.4f}")
    print()
    print("the crest overshoots 1 because a finite gamma only penalizes, never")
    print("forbids, compression; demos/congestion_sweep.py runs the same flow")
    print("for gamma up to 80 and watches the overshoot vanish at the rate the")
    print("stiff-pressure theory predicts.")


if __name__ == "__main__":
    main()
