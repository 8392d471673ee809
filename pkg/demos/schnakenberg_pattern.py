#!/usr/bin/env python3
"""Schnakenberg activator-inhibitor system settling on a Turing pattern.

A tiny Fourier perturbation of the homogeneous state grows into a
stationary nine-period pattern: the unstable wavenumber band selected by
the diffusion ratio d = 10 and rate gamma = 1e4 is centred on the
nine-oscillation mode of the unit interval.  The run is steady well
before t = 2.5; successive steps then differ only at rounding level.
"""

import numpy as np

from rdspline import (
    SolverConfig,
    count_interior_maxima,
    preset,
    relative_error,
    run,
)


def main():
    plan = preset("schnakenberg", dt=5e-4)
    config = SolverConfig(dt=plan.dt, t_end=plan.t_end,
                          snapshot_times=(0.01, 0.05, 2.5))
    traj = run(plan.setup, config)

    for snap in traj.snapshots:
        span = float(snap.u.max() - snap.u.min())
        peaks = (count_interior_maxima(snap.u, 0.05 * span) if span > 0 else 0)
        print(f"t={snap.t:<5} u in [{snap.u.min():.4f}, {snap.u.max():.4f}] "
              f"interior maxima: {peaks}")

    rel = relative_error(traj.penultimate_u, traj.final_u)
    print(f"\nfinal-step relative change of u: {rel:.3e} (steady state)")

    final = traj.snapshots[-1]
    lo, hi = final.u.min(), final.u.max()
    print("\nfinal activator profile (nine periods, peaks at both walls):")
    for level in range(7, -1, -1):
        threshold = lo + (hi - lo) * level / 7
        print("".join("#" if v >= threshold else " " for v in final.u))

    np.savetxt("schnakenberg_profile.csv",
               np.column_stack([plan.setup.mesh.knots(), final.u, final.v]),
               delimiter=",", header="x,u,v", comments="")
    print("final profile written to schnakenberg_profile.csv")


if __name__ == "__main__":
    main()
