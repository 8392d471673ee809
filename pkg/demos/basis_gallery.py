#!/usr/bin/env python3
"""A look at the trigonometric quintic basis itself.

Shows the bump and its first four derivatives, the five-knot stencil
weights that turn spline parameters into nodal derivatives, and how the
weights approach the classic polynomial quintic ratios 1 : 26 : 66 as
the knot spacing shrinks.
"""

import numpy as np

from rdspline import basis_value, make_mesh, stencil_weights


def main():
    mesh = make_mesh(0.0, 8.0, 16)
    h = mesh.h
    centre = 8

    print("basis bump and derivatives across its support:")
    offsets = np.linspace(-3.0, 3.0, 13)
    for order in range(5):
        values = [basis_value(mesh, centre, mesh.knot(centre) + s * h, order)
                  for s in offsets]
        peak = max(abs(v) for v in values)
        bar = "".join(
            "#" if abs(v) > 0.66 * peak else
            "+" if abs(v) > 0.33 * peak else
            "." if abs(v) > 1e-12 else " "
            for v in values
        )
        print(f"  order {order}: [{bar}]  peak magnitude {peak:.4g}")

    print("\nstencil weights (offsets -2..+2) per derivative order, h=0.5:")
    w = stencil_weights(0.5)
    for order in range(5):
        row = "  ".join(f"{v:+.5e}" for v in w.rows[order])
        print(f"  order {order}: {row}")

    print("\nvalue-weight ratios against the polynomial quintic 1:26:66:")
    for h_small in (0.5, 0.1, 0.01, 0.001):
        ws = stencil_weights(h_small)
        print(f"  h={h_small:<6} "
              f"{ws.alpha[1] / ws.alpha[0]:>10.5f} : "
              f"{ws.alpha[2] / ws.alpha[0]:>10.5f}")


if __name__ == "__main__":
    main()
