#!/usr/bin/env python3
"""Restriction norm of a Maass form to the closed geodesics of discriminant D.

Prints the period sum I(f, chi_{psi,n}) for each class character and |n| <= n_max,
the normalised partial sums, and the direct quadrature of the same norm.

    python3 scripts/restriction_norm.py --D 12 --form data/maass_even_13.78.json --n-max 40
"""
from __future__ import annotations

import argparse
import math
from pathlib import Path

from georestrict.hecke import class_characters
from georestrict.lfunctions import load_maass_form
from georestrict.restriction import (
    geodesic_fourier,
    geodesic_integral_I,
    maass_on_geodesics,
    restriction_norm,
    total_length,
)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--D", type=int, default=5)
    ap.add_argument("--form", type=Path, default=Path("data/maass_even_13.78.json"))
    ap.add_argument("--n-max", type=int, default=30)
    args = ap.parse_args(argv)

    f = load_maass_form(args.form)
    g = maass_on_geodesics(f, args.D, scaled=False)
    fd = geodesic_fourier(g, n_needed=args.n_max)
    print(f"t = {f.t:.10f} ({f.parity}), D = {args.D}, |C_D| = {total_length(args.D):.12f}, nodes = {fd.nodes}")
    want = 0 if f.parity == "even" else 1
    for psi in class_characters(args.D):
        for n in range(want, args.n_max + 1, 2):
            I = geodesic_integral_I(g, psi, n, fourier=fd)
            print(f"psi = {psi.e}  n = {n:3d}  I = {I:.6e}")
    res = restriction_norm(g, args.n_max)
    print(f"spectral side  {res.norm_sq:.15e}")
    print(f"direct side    {res.direct:.15e}")
    print(f"rel. difference {abs(res.norm_sq - res.direct) / res.direct:.2e}  (tail flag {res.tail_flag})")
    print(f"mean square    {res.mean_square:.6e}  (scale e^(-pi t) = {math.exp(-math.pi * f.t):.3e})")


if __name__ == "__main__":
    main()
