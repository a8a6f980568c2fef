"""Closed-form asymptotic localization bounds.

Everything here is an expectation over a single satellite's uniform position,
reduced to integrals in chi = cos(phi_e) over the visibility cup
[chi_max, 1]. The closed forms are assembled from cancellation-free pieces
(log1p-based log(D_max/h), exact conjugate rewrites of D_max - h, h - zeta*D_max
and friends) so that the h -> 0 and h -> infinity limits can be probed by
direct evaluation without losing the answer to floating-point cancellation.

Two independent computation routes exist for every bound:

* the literal published expressions (public path), and
* assembly from the MomentSet expectations (test path), themselves checked
  against Gauss-Legendre quadrature of the defining integrals.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fim import BoundSet
from .geometry import InvalidConfig, SystemParams, chi_max


@functools.lru_cache(maxsize=8)
def _leggauss(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n_points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


class DegenerateGeometry(ValueError):
    """The viewing cone is too small for the bound expressions to survive."""


@dataclass(frozen=True)
class MomentSet:
    """Per-satellite expectations over the visibility cup.

    The two K-weighted entries exist only for the TDOA+RSS model and need the
    (eta, rho) split; they are None when params carries only the product.
    """

    m_k_sin2: float | None
    m_k_cos2: float | None
    m_l: float
    m_l_cos: float
    m_l_sin2: float

    @property
    def m_l_cos2(self) -> float:
        """E[L cos^2 phi_l 1], by sin^2 + cos^2 = 1 inside the expectation."""
        return self.m_l - self.m_l_sin2


@dataclass(frozen=True)
class LimitCoefficients:
    """h->0 intercepts (alpha, km^2) and h->inf curvatures (beta, unitless)."""

    alpha_xy: float
    alpha_z: float
    beta_xy: float
    beta_z: float


def cup_expectation(
    params: SystemParams, f: Callable[[np.ndarray], np.ndarray], n_points: int = 128
) -> float:
    """E[f(chi) 1[visible]] = (1/2) * integral of f over [chi_max, 1].

    Fixed-order Gauss-Legendre; the integrands in this module are smooth on
    the cup so no adaptivity is needed.
    """
    if n_points < 8:
        raise InvalidConfig(f"n_points must be >= 8, got {n_points}")
    a = chi_max(params)
    x, w = _leggauss(n_points)
    chi = 0.5 * (a + 1.0) + 0.5 * (1.0 - a) * x
    return 0.5 * 0.5 * (1.0 - a) * float(np.dot(w, f(chi)))


def quadrature_moments(params: SystemParams, n_points: int = 128) -> MomentSet:
    """Moment oracle: integrate the defining expressions directly."""
    r, big_r = params.r, params.big_r
    er = params.eta_rho

    def d2(chi: np.ndarray) -> np.ndarray:
        return big_r * big_r + r * r - 2.0 * r * big_r * chi

    # L = 2 eta rho / D^2; sin^2 phi_l = R^2 (1-chi^2)/D^2; cos phi_l = (R chi - r)/D
    m_l = cup_expectation(params, lambda chi: 2.0 * er / d2(chi), n_points)
    m_l_cos = cup_expectation(
        params, lambda chi: 2.0 * er * (big_r * chi - r) / d2(chi) ** 1.5, n_points
    )
    m_l_sin2 = cup_expectation(
        params,
        lambda chi: 2.0 * er * big_r**2 * (1.0 - chi**2) / d2(chi) ** 2,
        n_points,
    )
    m_k_sin2 = m_k_cos2 = None
    if params.has_split:
        eta, rho = params.eta, params.rho
        # K = (2 rho / D^4)(1 + eta D^2)
        m_k_sin2 = cup_expectation(
            params,
            lambda chi: 2.0
            * rho
            * (1.0 + eta * d2(chi))
            * big_r**2
            * (1.0 - chi**2)
            / d2(chi) ** 3,
            n_points,
        )
        m_k_cos2 = cup_expectation(
            params,
            lambda chi: 2.0
            * rho
            * (1.0 + eta * d2(chi))
            * (big_r * chi - r) ** 2
            / d2(chi) ** 3,
            n_points,
        )
    return MomentSet(
        m_k_sin2=m_k_sin2,
        m_k_cos2=m_k_cos2,
        m_l=m_l,
        m_l_cos=m_l_cos,
        m_l_sin2=m_l_sin2,
    )


@dataclass(frozen=True)
class _CupEdges:
    """Cup-edge geometry in extended precision (np.longdouble scalars).

    The bound denominators subtract nearly equal terms when the viewing cone
    is narrow (they are weighted variances of cos phi_e over a shrinking cup),
    which magnifies the rounding already present in D_max, log(D_max/h) and
    friends. Carrying the edge quantities and the bracket arithmetic in
    extended precision keeps the closed forms accurate through the corners of
    the parameter grids; results are cast back to float on return.

    Fields (same algebra as the float64 geometry helpers):
      surd  = R - r zeta^2 - zeta D_max
            = sin^2 (R^2 + zeta^2 r^2) / (R + zeta sqrt(R^2 - r^2 sin^2))
      q     = R - (r(h - zeta D_max) + hR)/D_max
            = (R^2 - r^2) r^2 sin^2 / ((R + sqrt)(sqrt + r zeta) D_max)
    """

    r: np.longdouble
    h: np.longdouble
    big_r: np.longdouble
    zeta: np.longdouble
    sin2: np.longdouble
    dm: np.longdouble
    lam: np.longdouble
    hmzd: np.longdouble
    surd: np.longdouble
    q: np.longdouble


def _cup_edges(params: SystemParams) -> _CupEdges:
    one = np.longdouble(1.0)
    r = np.longdouble(params.r)
    h = np.longdouble(params.h)
    big_r = r + h
    phi = np.longdouble(params.phi_l_max)
    zeta = np.cos(phi)
    sin_phi = np.sin(phi)
    sin2 = sin_phi * sin_phi
    s = r * sin_phi
    sq = np.sqrt((big_r - s) * (big_r + s))
    dm = h * (2.0 * r + h) / (sq + r * zeta)
    dmh = h * (r * (one - zeta) + s * s / (big_r + sq)) / (sq + r * zeta)
    lam = np.log1p(dmh / h)
    hmzd = h * h * (one - zeta * zeta) / (h + r * zeta * zeta + zeta * sq)
    surd = sin2 * (big_r * big_r + zeta * zeta * r * r) / (big_r + zeta * sq)
    q = (big_r * big_r - r * r) * r * r * sin2 / ((big_r + sq) * (sq + r * zeta) * dm)
    return _CupEdges(
        r=r, h=h, big_r=big_r, zeta=zeta, sin2=sin2,
        dm=dm, lam=lam, hmzd=hmzd, surd=surd, q=q,
    )


def moment_integrals(params: SystemParams) -> MomentSet:
    """Closed-form values of the five cup expectations."""
    e = _cup_edges(params)
    r, h, big_r, dm, lam, hmzd = e.r, e.h, e.big_r, e.dm, e.lam, e.hmzd
    er = np.longdouble(params.eta_rho)
    one_minus_chi = hmzd / big_r
    chi = 1.0 - one_minus_chi

    m_l = er * lam / (r * big_r)
    m_l_cos = er * e.q / (r * r * big_r)
    m_l_sin2 = 2.0 * er * (
        lam * (big_r**2 + r * r) / (4.0 * r**3 * big_r)
        - one_minus_chi * (dm * dm + r * big_r * (1.0 + chi)) / (4.0 * r * r * dm * dm)
    )

    m_k_sin2 = m_k_cos2 = None
    if params.has_split:
        eta = np.longdouble(params.eta)
        rho = np.longdouble(params.rho)
        rr = big_r * big_r - r * r
        ss = big_r * big_r + r * r
        pos2 = 1.0 / (h * h) - 1.0 / (dm * dm)
        pos4 = 1.0 / h**4 - 1.0 / dm**4
        b_sin = (
            4.0 * (2.0 * eta * ss - 1.0) * lam
            - (2.0 * eta * rr * rr - 4.0 * ss) * pos2
            - 4.0 * eta * r * hmzd
            - rr * rr * pos4
        )
        b_cos = (
            2.0 * rr * (eta * rr - 2.0) * pos2
            - 4.0 * (2.0 * eta * rr - 1.0) * lam
            + 4.0 * eta * r * hmzd
            + rr * rr * pos4
        )
        m_k_sin2 = float(rho * b_sin / (16.0 * r**3 * big_r))
        m_k_cos2 = float(rho * b_cos / (16.0 * r**3 * big_r))

    return MomentSet(
        m_k_sin2=m_k_sin2,
        m_k_cos2=m_k_cos2,
        m_l=float(m_l),
        m_l_cos=float(m_l_cos),
        m_l_sin2=float(m_l_sin2),
    )


def _check_positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0.0):
        raise DegenerateGeometry(
            f"{name} denominator degenerated to {value}; viewing cone too small"
        )
    return value


def lcrb_tdoa(params: SystemParams) -> BoundSet:
    """Limit of N*CRB for the TDOA model (literal published expressions)."""
    e = _cup_edges(params)
    r, h, big_r, lam = e.r, e.h, e.big_r, e.lam
    er = np.longdouble(params.eta_rho)
    if not lam > 0.0:
        raise DegenerateGeometry("log(D_max/h) vanished; viewing cone too small")

    xy_den = er * (
        lam * (big_r**2 + r * r) / (8.0 * big_r * r**3)
        - e.surd / (8.0 * big_r * r * r)
    )
    z_den = er * (
        e.surd / (2.0 * big_r * r * r)
        - h * (2.0 * r + h) * lam / (2.0 * r**3 * big_r)
        - e.q * e.q / (r**3 * big_r * lam)
    )
    xy = 1.0 / _check_positive("xy", float(xy_den))
    z = 1.0 / _check_positive("z", float(z_den))
    return BoundSet(xy=xy, z=z)


def lcrb_tdoa_rss(params: SystemParams) -> BoundSet:
    """Limit of N*CRB for the TDOA+RSS model (literal published expressions)."""
    if not params.has_split:
        raise InvalidConfig(
            "the TDOA+RSS bound needs eta and rho separately; "
            "construct SystemParams with eta="
        )
    e = _cup_edges(params)
    r, h, big_r, dm, lam, hmzd = e.r, e.h, e.big_r, e.dm, e.lam, e.hmzd
    eta = np.longdouble(params.eta)
    rho = np.longdouble(params.rho)
    if not lam > 0.0:
        raise DegenerateGeometry("log(D_max/h) vanished; viewing cone too small")
    rr = big_r * big_r - r * r
    ss = big_r * big_r + r * r
    pos2 = 1.0 / (h * h) - 1.0 / (dm * dm)
    pos4 = 1.0 / h**4 - 1.0 / dm**4

    xy_den = (
        4.0 * (2.0 * eta * ss - 1.0) * lam
        - 2.0 * (eta * rr * rr - 2.0 * ss) * pos2
        - 4.0 * eta * r * hmzd
        - rr * rr * pos4
    )
    z_den = (
        2.0 * rr * (eta * rr - 2.0) * pos2
        - 4.0 * (2.0 * eta * rr - 1.0) * lam
        + 4.0 * eta * r * hmzd
        + rr * rr * pos4
        - 16.0 * eta * e.q * e.q / lam
    )
    xy = float(64.0 * big_r * r**3 / rho) / _check_positive("xy", float(xy_den))
    z = float(16.0 * big_r * r**3 / rho) / _check_positive("z", float(z_den))
    return BoundSet(xy=xy, z=z)


def lcrb_tdoa_from_moments(moments: MomentSet) -> BoundSet:
    """Assembly route: mean-information block inverses from the MomentSet."""
    xy = 4.0 / _check_positive("xy", moments.m_l_sin2)
    z_den = moments.m_l_cos2 * moments.m_l - moments.m_l_cos**2
    z = moments.m_l / _check_positive("z", z_den)
    return BoundSet(xy=xy, z=z)


def lcrb_tdoa_rss_from_moments(moments: MomentSet) -> BoundSet:
    """Assembly route for the TDOA+RSS model."""
    if moments.m_k_sin2 is None or moments.m_k_cos2 is None:
        raise InvalidConfig("MomentSet lacks the K moments; need the (eta, rho) split")
    xy = 4.0 / _check_positive("xy", moments.m_k_sin2)
    z_den = moments.m_k_cos2 * moments.m_l - moments.m_l_cos**2
    z = moments.m_l / _check_positive("z", z_den)
    return BoundSet(xy=xy, z=z)


def acrb(params: SystemParams, rss: bool = False) -> BoundSet:
    """Asymptotic CRB: LCRB divided by the constellation size."""
    base = lcrb_tdoa_rss(params) if rss else lcrb_tdoa(params)
    return base.scaled(1.0 / params.n_sats)


def limit_coefficients(params: SystemParams) -> LimitCoefficients:
    """h->0 and h->infinity coefficients of the TDOA ACRB, N folded in."""
    r = params.r
    zeta = params.zeta
    sin2 = math.sin(params.phi_l_max) ** 2
    log_zeta = math.log(zeta) if zeta > 0.0 else -math.inf
    den = params.eta_rho * params.n_sats
    alpha_xy = -8.0 * r * r / (den * (2.0 * log_zeta + sin2))
    alpha_z = 2.0 * r * r / (den * (sin2 + 2.0 * (1.0 - zeta) ** 2 / log_zeta))
    beta_xy = 12.0 / (den * (zeta + 2.0) * (1.0 - zeta) ** 2)
    beta_z = 12.0 / (den * (1.0 - zeta) ** 3)
    return LimitCoefficients(
        alpha_xy=alpha_xy, alpha_z=alpha_z, beta_xy=beta_xy, beta_z=beta_z
    )


def aacrb(params: SystemParams) -> BoundSet:
    """Two-coefficient approximation alpha + beta h^2 of the TDOA ACRB."""
    co = limit_coefficients(params)
    h2 = params.h * params.h
    return BoundSet(xy=co.alpha_xy + co.beta_xy * h2, z=co.alpha_z + co.beta_z * h2)
