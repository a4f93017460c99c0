"""Single-beam bucket transmissivities from the near field to the far field.

Tabulates the focused flat-top beam's bucket capture and the focused
Gaussian beam's power-in-bucket over a log-spaced range of path lengths,
for vacuum and three turbulence strengths.  The far-field columns show
the slope change from L^-2 toward L^(-16/5) as turbulence takes over.
"""

import argparse

import numpy as np

from fsoqkd.channel import ChannelConfig, HardSquare, SoftGaussian, derive, matched_square_side
from fsoqkd.turbulence import fb_turb_eta, gaussian_pib_turb
from fsoqkd.vacuum import fb_pixel_grid


def channels(wavelength, radius, path_length, cn2):
    side = matched_square_side(radius)
    square = derive(
        ChannelConfig(
            wavelength=wavelength,
            path_length=path_length,
            cn2=cn2,
            pupil=HardSquare(side=side),
        )
    )
    gauss = derive(
        ChannelConfig(
            wavelength=wavelength,
            path_length=path_length,
            cn2=cn2,
            pupil=SoftGaussian(radius=radius),
        )
    )
    return square, gauss


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--wavelength", type=float, default=1.55e-6, help="meters")
    ap.add_argument("--radius", type=float, default=0.10, help="Gaussian pupil radius, meters")
    ap.add_argument("--points", type=int, default=10, help="number of path lengths")
    args = ap.parse_args()

    cn2_values = (0.0, 1e-15, 1e-14, 1e-13)
    lengths = np.geomspace(1e3, 100e3, args.points)
    pixel = fb_pixel_grid(1)[0]

    print(f"wavelength {args.wavelength * 1e6:.2f} um, Gaussian radius {args.radius} m, "
          f"matched square side {matched_square_side(args.radius):.4f} m")
    header = f"{'L [km]':>8} {'Df':>10}"
    for cn2 in cn2_values:
        tag = "vacuum" if cn2 == 0.0 else f"{cn2:.0e}"
        header += f" {'fb ' + tag:>12} {'pib ' + tag:>12}"
    print(header)
    for path_length in lengths:
        _, gauss_vac = channels(args.wavelength, args.radius, path_length, 0.0)
        row = f"{path_length / 1e3:>8.2f} {gauss_vac.fresnel_product:>10.4f}"
        for cn2 in cn2_values:
            square, gauss = channels(args.wavelength, args.radius, path_length, cn2)
            eta_fb = fb_turb_eta(pixel, pixel, square)
            eta_pib = gaussian_pib_turb(gauss)
            row += f" {eta_fb:>12.4e} {eta_pib:>12.4e}"
        print(row)

    # Far-field slopes over the last octave of the table range.
    tail = np.geomspace(lengths[-1] / 2, lengths[-1], 6)
    print("\nlog-log slope over the far-field tail:")
    for cn2 in cn2_values:
        etas = []
        for path_length in tail:
            square, _ = channels(args.wavelength, args.radius, path_length, cn2)
            etas.append(fb_turb_eta(pixel, pixel, square))
        slope = np.polyfit(np.log(tail), np.log(etas), 1)[0]
        tag = "vacuum" if cn2 == 0.0 else f"cn2={cn2:.0e}"
        print(f"  {tag:>12}: {slope:+.3f}   (vacuum limit -2, strong-turbulence limit -16/5)")


if __name__ == "__main__":
    main()
