"""Turbulent coupling matrices for Laguerre-Gauss modes and flat-top pixels.

Turbulence breaks the vacuum diagonality of the Laguerre-Gauss set: power
launched into one mode partly arrives in its neighbours.  The script prints
the diagonal survival and total cross-talk per mode for the Laguerre-Gauss
matrix at a chosen strength, shows how the order-1 survival decays as the
coherence length shrinks, and dumps one flat-top matrix for comparison.
"""

import argparse
import sys

import numpy as np

from fsoqkd.channel import ChannelConfig, HardSquare, SoftGaussian, derive, matched_square_side
from fsoqkd.turbulence import fb_turb_matrix, lg_turb_matrix
from fsoqkd.vacuum import lg_vacuum_eta, mode_label


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--path-length", type=float, default=10e3, help="meters")
    ap.add_argument("--cn2", type=float, default=1e-14, help="index structure constant, m^(-2/3)")
    ap.add_argument("--q-max", type=int, default=4, help="highest LG order")
    ap.add_argument("--n-grid", type=int, default=2, help="flat-top pixel grid size")
    args = ap.parse_args()

    radius = 0.10
    gauss = derive(
        ChannelConfig(
            wavelength=1.55e-6,
            path_length=args.path_length,
            cn2=args.cn2,
            pupil=SoftGaussian(radius=radius),
        )
    )
    print(f"path length {args.path_length / 1e3:.0f} km, Cn2 {args.cn2:.1e}, "
          f"coherence length {gauss.coherence_length * 100:.2f} cm, "
          f"Fresnel number product {gauss.fresnel_product:.4f}")

    mat = lg_turb_matrix(args.q_max, gauss)
    diag = np.diag(mat.eta)
    cross = mat.eta.sum(axis=1) - diag
    print(f"\nLaguerre-Gauss matrix, orders <= {args.q_max} ({len(mat.modes)} modes):")
    print(f"{'mode':>14} {'vacuum eta':>12} {'turb eta':>12} {'cross-talk out':>15}")
    for i, mode in enumerate(mat.modes):
        vac = lg_vacuum_eta(mode.order, gauss.fresnel_product)
        print(f"{mode_label(mode):>14} {vac:>12.4e} {diag[i]:>12.4e} {cross[i]:>15.4e}")

    print("\norder-1 survival versus turbulence strength:")
    print(f"{'Cn2':>10} {'rho0 [cm]':>10} {'diag eta':>12} {'cross-talk':>12}")
    for cn2 in (1e-16, 1e-15, 1e-14, 1e-13):
        ch = derive(
            ChannelConfig(
                wavelength=1.55e-6,
                path_length=args.path_length,
                cn2=cn2,
                pupil=SoftGaussian(radius=radius),
            )
        )
        m = lg_turb_matrix(2, ch)
        d = float(m.eta[0, 0])
        c = float(m.eta[0, :].sum() - d)
        print(f"{cn2:>10.0e} {ch.coherence_length * 100:>10.3f} {d:>12.4e} {c:>12.4e}")

    side = matched_square_side(radius)
    square = derive(
        ChannelConfig(
            wavelength=1.55e-6,
            path_length=args.path_length,
            cn2=args.cn2,
            pupil=HardSquare(side=side),
        )
    )
    fb = fb_turb_matrix(args.n_grid, square)
    print(f"\nflat-top pixel matrix, {args.n_grid}x{args.n_grid} grid, same strength:")
    sys.stdout.write(fb.dump())


if __name__ == "__main__":
    main()
