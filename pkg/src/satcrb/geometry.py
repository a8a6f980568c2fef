"""Spherical constellation geometry.

Satellites live on a sphere of radius R = r + h around the Earth's center;
the localized terminal (LT) sits on the Earth's surface at radius r. Angles
come in two frames: phi_e is measured from the Earth's center between the LT
direction and the satellite direction, phi_l is measured at the LT from its
local zenith. A satellite is usable when phi_l <= phi_l_max.

Uniform deployment on the sphere means cos(phi_e) ~ U[-1, 1] and the azimuth
theta ~ U[0, 2*pi). All lengths are km, all angles radians, times seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

C_KM_S = 299792.458  # vacuum speed of light, km/s


class InvalidConfig(ValueError):
    """Raised when system parameters are outside their legal ranges."""


@dataclass(frozen=True)
class SystemParams:
    """Earth/constellation/radiometric scalars.

    eta_rho is the combined information scale (km^-2): the product of the
    squared-bandwidth factor eta = (2*pi*W_e/c)^2 and the SNR-like factor rho.
    Timing-only (TDOA) quantities depend on the product alone. Quantities that
    use the received-strength channel also need the split, supplied via the
    optional ``eta`` field (then rho = eta_rho / eta).
    """

    r: float = 6371.0
    h: float = 20000.0
    phi_l_max: float = math.radians(60.0)
    eta_rho: float = 6.4e13
    n_sats: int = 250
    c: float = C_KM_S
    eta: float | None = None

    def __post_init__(self) -> None:
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise InvalidConfig(f"Earth radius must be positive, got r={self.r}")
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise InvalidConfig(f"altitude must be positive, got h={self.h}")
        if not (0.0 < self.phi_l_max <= math.pi / 2.0):
            raise InvalidConfig(
                f"phi_l_max must lie in (0, pi/2], got {self.phi_l_max}"
            )
        if not (self.eta_rho > 0.0 and math.isfinite(self.eta_rho)):
            raise InvalidConfig(f"eta_rho must be positive, got {self.eta_rho}")
        if self.n_sats < 1:
            raise InvalidConfig(f"n_sats must be >= 1, got {self.n_sats}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise InvalidConfig(f"propagation speed must be positive, got {self.c}")
        if self.eta is not None and not (0.0 < self.eta and math.isfinite(self.eta)):
            raise InvalidConfig(f"eta must be positive when given, got {self.eta}")

    @property
    def big_r(self) -> float:
        """Satellite shell radius R = r + h."""
        return self.r + self.h

    @property
    def zeta(self) -> float:
        """cos(phi_l_max), in [0, 1)."""
        return math.cos(self.phi_l_max)

    @property
    def has_split(self) -> bool:
        return self.eta is not None

    @property
    def rho(self) -> float:
        if self.eta is None:
            raise InvalidConfig(
                "rho requires the (eta, rho) split; construct SystemParams with eta="
            )
        return self.eta_rho / self.eta

    def with_split(self, eta: float) -> "SystemParams":
        """Return a copy carrying an explicit eta (and hence rho) split."""
        return SystemParams(
            r=self.r,
            h=self.h,
            phi_l_max=self.phi_l_max,
            eta_rho=self.eta_rho,
            n_sats=self.n_sats,
            c=self.c,
            eta=eta,
        )


@dataclass(frozen=True)
class SatelliteState:
    """One satellite seen from the LT: local angles, distance, visibility."""

    phi_l: float
    theta: float
    d: float
    visible: bool


@dataclass(frozen=True)
class Constellation:
    """Earth-frame angles of N deployed satellites plus the seed that made them."""

    phi_e: np.ndarray
    theta: np.ndarray
    seed: int

    @property
    def sats(self) -> list[tuple[float, float]]:
        return list(zip(self.phi_e.tolist(), self.theta.tolist()))

    def __len__(self) -> int:
        return self.phi_e.shape[0]


def constellation_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based generator giving an independent stream per (seed, trial)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(ss))


def sample_constellation(
    params: SystemParams, seed: int, trial: int = 0
) -> Constellation:
    """Draw N satellites uniformly on the shell; deterministic per (seed, trial)."""
    rng = constellation_rng(seed, trial)
    cos_phi_e = rng.uniform(-1.0, 1.0, params.n_sats)
    theta = rng.uniform(0.0, 2.0 * math.pi, params.n_sats)
    return Constellation(phi_e=np.arccos(cos_phi_e), theta=theta, seed=seed)


def e_to_l_arrays(
    phi_e: np.ndarray, params: SystemParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized Earth-frame to local-frame conversion.

    Returns (phi_l, d, visible). Uses the law of cosines for the distance and
    the exact sine/cosine transfer relations, so both trig identities hold to
    machine precision.
    """
    phi_e = np.asarray(phi_e, dtype=float)
    r, big_r = params.r, params.big_r
    d = np.sqrt(big_r * big_r + r * r - 2.0 * r * big_r * np.cos(phi_e))
    sin_l = big_r * np.sin(phi_e) / d
    cos_l = (big_r * np.cos(phi_e) - r) / d
    phi_l = np.arctan2(sin_l, cos_l)
    return phi_l, d, phi_l <= params.phi_l_max


def e_to_l(phi_e: float, params: SystemParams, theta: float = 0.0) -> SatelliteState:
    """Convert one Earth-center angle to the LT's local frame."""
    if not (0.0 <= phi_e <= math.pi):
        raise InvalidConfig(f"phi_e must lie in [0, pi], got {phi_e}")
    phi_l, d, visible = e_to_l_arrays(np.asarray([phi_e]), params)
    return SatelliteState(
        phi_l=float(phi_l[0]), theta=theta, d=float(d[0]), visible=bool(visible[0])
    )


def constellation_states(
    constellation: Constellation, params: SystemParams
) -> list[SatelliteState]:
    """Expand a sampled constellation into per-satellite local states."""
    phi_l, d, visible = e_to_l_arrays(constellation.phi_e, params)
    return [
        SatelliteState(phi_l=float(p), theta=float(t), d=float(dd), visible=bool(v))
        for p, t, dd, v in zip(phi_l, constellation.theta, d, visible)
    ]


def _sqrt_shell(params: SystemParams) -> float:
    """sqrt(R^2 - r^2 sin^2(phi_l_max)), the shared surd of the D_max forms."""
    r, big_r = params.r, params.big_r
    s = r * math.sin(params.phi_l_max)
    return math.sqrt((big_r - s) * (big_r + s))


def d_max(params: SystemParams) -> float:
    """Largest LT-satellite distance with phi_l <= phi_l_max.

    Algebraically sqrt(R^2 - r^2 sin^2(phi_l_max)) - r*cos(phi_l_max), but
    evaluated as h(2r+h)/(sqrt(R^2 - r^2 sin^2) + r cos) which stays exact for
    h many orders below r (the literal form cancels catastrophically there).
    """
    r, h = params.r, params.h
    return h * (2.0 * r + h) / (_sqrt_shell(params) + r * params.zeta)


def d_max_minus_h(params: SystemParams) -> float:
    """D_max - h without cancellation; the small-h limit is h(1-zeta)/zeta."""
    r, h, big_r = params.r, params.h, params.big_r
    sq = _sqrt_shell(params)
    s2 = (r * math.sin(params.phi_l_max)) ** 2
    # 2r + h - r*zeta - sq == r(1-zeta) + (R - sq), with R - sq = s2/(R + sq)
    return h * (r * (1.0 - params.zeta) + s2 / (big_r + sq)) / (sq + r * params.zeta)

def h_minus_zeta_d_max(params: SystemParams) -> float:
    """h - zeta*D_max without cancellation; of order h^2/r for small h."""
    h, r = params.h, params.r
    zeta = params.zeta
    sq = _sqrt_shell(params)
    # (h + r zeta^2)^2 - zeta^2 (R^2 - r^2 sin^2) == h^2 (1 - zeta^2)
    return h * h * (1.0 - zeta * zeta) / (h + r * zeta * zeta + zeta * sq)


def log_dmax_over_h(params: SystemParams) -> float:
    """log(D_max / h), accurate even when D_max/h -> 1 at large h."""
    return math.log1p(d_max_minus_h(params) / params.h)


def chi_max(params: SystemParams) -> float:
    """cos(phi_e_max): the Earth-frame cosine at the edge of visibility."""
    return 1.0 - h_minus_zeta_d_max(params) / params.big_r


def max_earth_angle(params: SystemParams) -> float:
    """Earth-center half-angle of the visibility cup, phi_e_max."""
    return math.acos(chi_max(params))
