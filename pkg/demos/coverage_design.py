"""How many satellites, how high, how wide a view — to actually get a fix?

Three-dimensional TDOA localization needs at least four visible satellites.
With satellites scattered uniformly on a shell, visibility of any single one
is a fixed probability, so fleet size, shell height, and the receiver's
maximum viewing angle trade off against each other through a binomial tail.

The script answers the three design questions the library exposes:
  * coverage probability for a given (fleet, height, angle),
  * the minimum viewing angle for a target coverage, and
  * the minimum shell height for a target coverage.
"""

import dataclasses
import math

from satcrb import (
    SystemParams,
    coverage_prob,
    min_angle_for_coverage,
    min_height_for_coverage,
    visibility_prob,
)


def main() -> None:
    params = SystemParams()
    print(__doc__)

    p_single = visibility_prob(params)
    p_cov = coverage_prob(params)
    print(f"defaults (N={params.n_sats}, h={params.h:.0f} km, "
          f"{math.degrees(params.phi_l_max):.0f} deg): single-satellite "
          f"visibility {p_single:.4f}, coverage {p_cov:.6f}")

    print("\nminimum viewing angle for 90% coverage:")
    for n in (250, 500, 1000, 2000):
        p = dataclasses.replace(params, n_sats=n)
        angle = math.degrees(min_angle_for_coverage(p, 0.9))
        print(f"  N={n:5d}: {angle:5.1f} deg")

    print("\nminimum shell height for 90% coverage at the default angle:")
    for n in (200, 500, 1000, 2000):
        p = dataclasses.replace(params, n_sats=n)
        h = min_height_for_coverage(p, 0.9)
        print(f"  N={n:5d}: {h:7.0f} km")

    print("\nLarger fleets buy lower shells and narrower required view cones; "
          "the bound sweeps in bounds_vs_height.py show what that is worth "
          "in accuracy.")


if __name__ == "__main__":
    main()
