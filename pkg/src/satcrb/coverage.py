"""Constellation coverage: visibility and >=4-satellite availability.

A satellite is visible when it falls in the spherical cup phi_e <= phi_e_max,
which a uniform deployment hits with probability p = (1 - chi_max)/2. Solving
the 4-unknown localization problem needs at least four visible satellites, so
the coverage probability is the upper binomial tail P(Binomial(N, p) >= 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import InvalidConfig, SystemParams, chi_max, d_max, h_minus_zeta_d_max


class Unachievable(ValueError):
    """No parameter value in the search range reaches the coverage target."""


@dataclass(frozen=True)
class CoverageResult:
    p: float
    p_cov: float


def visibility_prob(params: SystemParams) -> float:
    """Probability one uniformly placed satellite lands in the coverage cup.

    Computed as (1 - chi_max)/2 through the cancellation-free
    (h - D_max*zeta)/(2R) route; the two published forms are algebraically
    identical and the tests confirm them against each other.
    """
    return 0.5 * h_minus_zeta_d_max(params) / params.big_r


def visibility_prob_dmax_form(params: SystemParams) -> float:
    """The (h - D_max cos(phi_l_max))/(2R) form, literal; cross-check path."""
    return 0.5 * (params.h - d_max(params) * params.zeta) / params.big_r


def coverage_prob(params: SystemParams) -> float:
    """P(at least 4 of N satellites visible).

    1 - sum_{m=0}^{3} C(N,m) p^m (1-p)^(N-m); the four terms are evaluated in
    log space and combined with compensated summation, so N up to 1e4 with
    tiny p neither underflows nor loses the tail.
    """
    n = params.n_sats
    p = visibility_prob(params)
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0 if n >= 4 else 0.0
    log_p = math.log(p)
    log_1mp = math.log1p(-p)
    terms = []
    for m in range(min(4, n + 1)):
        log_comb = (
            math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)
        )
        terms.append(math.exp(log_comb + m * log_p + (n - m) * log_1mp))
    tail = 1.0 - math.fsum(terms)
    return min(max(tail, 0.0), 1.0)


def coverage_result(params: SystemParams) -> CoverageResult:
    return CoverageResult(p=visibility_prob(params), p_cov=coverage_prob(params))


def min_angle_for_coverage(
    params: SystemParams, target: float, tol: float = 1e-4
) -> float:
    """Smallest phi_l_max whose coverage probability reaches the target.

    Bisection on (0, pi/2]; coverage is monotone increasing in the angle.
    """
    if not (0.0 < target < 1.0):
        raise InvalidConfig(f"target must be in (0,1), got {target}")
    hi = math.pi / 2.0
    if coverage_prob(replace(params, phi_l_max=hi)) < target:
        raise Unachievable(
            f"coverage {target} unreachable even at phi_l_max=90 deg"
        )
    lo = 0.0  # exclusive; coverage -> 0 as the cone closes
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if coverage_prob(replace(params, phi_l_max=mid)) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def min_height_for_coverage(
    params: SystemParams, target: float, tol: float = 1.0, h_max: float = 1.0e5
) -> float:
    """Smallest altitude whose coverage probability reaches the target.

    Bisection on (0, h_max] km; coverage is monotone increasing in h at fixed
    viewing angle (a higher shell widens the cup).
    """
    if not (0.0 < target < 1.0):
        raise InvalidConfig(f"target must be in (0,1), got {target}")
    hi = h_max
    if coverage_prob(replace(params, h=hi)) < target:
        raise Unachievable(f"coverage {target} unreachable below h={h_max} km")
    lo = 0.0  # exclusive; the cup vanishes as h -> 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if coverage_prob(replace(params, h=mid)) >= target:
            hi = mid
        else:
            lo = mid
    return hi
