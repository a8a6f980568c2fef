"""Does N times the random-constellation bound really settle to the limit?

For growing satellite counts N, draws random uniform constellations, computes
the exact position bound for each draw, scales it by N, and compares the
distribution (median and 10/90 percentiles) with the closed-form limit. The
spread shrinks roughly like 1/sqrt(N) while the median locks onto the limit,
which is what makes the limit a useful constellation-free design number.
"""

import time

from satcrb import SystemParams, convergence_sweep, lcrb_tdoa

SEED = 20260819


def main() -> None:
    params = SystemParams()
    limit = lcrb_tdoa(params)
    print(__doc__)
    print(f"closed-form limit: xy={limit.xy:.6e} km^2, z={limit.z:.6e} km^2\n")
    t0 = time.time()
    rows = convergence_sweep(
        params, "tdoa", [100, 250, 500, 1000, 2000, 4000], trials=400, seed=SEED
    )
    header = (f"{'N':>6} {'med_xy/lim':>11} {'p10_xy/lim':>11} {'p90_xy/lim':>11} "
              f"{'med_z/lim':>11} {'p10_z/lim':>11} {'p90_z/lim':>11} {'sing':>5}")
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r.n_sats:6d} {r.median_xy / r.lcrb_xy:11.4f} "
              f"{r.p10_xy / r.lcrb_xy:11.4f} {r.p90_xy / r.lcrb_xy:11.4f} "
              f"{r.median_z / r.lcrb_z:11.4f} {r.p10_z / r.lcrb_z:11.4f} "
              f"{r.p90_z / r.lcrb_z:11.4f} {r.singular_count:5d}")
    print(f"\n400 trials per row, {time.time() - t0:.1f} s. Ratios of 1.0 mean "
          "exact agreement with the limit; the 10-90 band tightens as N grows.")


if __name__ == "__main__":
    main()
