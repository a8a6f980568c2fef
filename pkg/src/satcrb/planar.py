"""Independent 2D TDOA bound oracle.

A source on the plane is localized by M sensors at angles phi_i and distances
D_i, with pathloss weights A_i = D_i**(-gamma) and clock offset unknown. Two
routes to the same bound exist: a fully closed form built from the pairwise
factors beta_ij = 1 - cos(phi_i - phi_j), and a 3x3 Fisher-matrix inversion
over (x, y, c*T0). Their agreement on random instances validates the FIM and
inversion machinery used by the satellite modules against hand-checkable
answers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fim import COND_LIMIT, SingularInformation
from .geometry import InvalidConfig


class CollinearSensors(ValueError):
    """TDOA on the plane needs at least three non-collinear sensors."""


@dataclass(frozen=True)
class PlanarSensors:
    """Sensor geometry and signal constants for the planar TDOA bound.

    angles: sensor bearings phi_i from the source, radians
    distances: source-sensor distances D_i, km
    gamma: pathloss exponent; the weight of sensor i is A_i = D_i**(-gamma)
    w_e: effective bandwidth, Hz
    rho: SNR scale; the information weight of sensor i is eta_planar * A_i
         with eta_planar = 4 * w_e * rho / c**2
    c: propagation speed, km/s
    """

    angles: tuple[float, ...]
    distances: tuple[float, ...]
    gamma: float
    w_e: float
    rho: float
    c: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        object.__setattr__(
            self, "distances", tuple(float(d) for d in self.distances)
        )
        if len(self.angles) != len(self.distances):
            raise InvalidConfig(
                f"angles ({len(self.angles)}) and distances "
                f"({len(self.distances)}) must have equal length"
            )
        if len(self.angles) < 2:
            raise InvalidConfig("need at least two sensors")
        if any(d <= 0.0 for d in self.distances):
            raise InvalidConfig("distances must be positive")
        for name in ("w_e", "rho", "c"):
            if getattr(self, name) <= 0.0:
                raise InvalidConfig(f"{name} must be positive")

    @property
    def weights(self) -> np.ndarray:
        """A_i = D_i**(-gamma)."""
        return np.asarray(self.distances) ** (-self.gamma)

    @property
    def eta_planar(self) -> float:
        """4 W_e rho / c^2, the per-unit-weight information scale."""
        return 4.0 * self.w_e * self.rho / (self.c * self.c)


def _betas(sensors: PlanarSensors) -> np.ndarray:
    phi = np.asarray(sensors.angles)
    return 1.0 - np.cos(phi[:, None] - phi[None, :])


def planar_crb_closed(sensors: PlanarSensors) -> float:
    """Closed-form planar TDOA bound, km^2.

    3 c^2 sum_ij A_i A_j beta_ij / (4 W_e rho sum_ijk A_i A_j A_k
    beta_ij beta_jk beta_ki), with beta_ij = 1 - cos(phi_i - phi_j).
    """
    if len(sensors.angles) < 3:
        raise CollinearSensors("TDOA needs at least three sensors")
    a = sensors.weights
    beta = _betas(sensors)
    pair = float(a @ beta @ a)
    ab = beta * a  # ab[i, j] = A_j beta_ij
    triple = float(np.einsum("ij,jk,ki->", ab, ab, ab))
    if not triple > 0.0:
        raise CollinearSensors(
            "sensors are collinear with the source; the bound diverges"
        )
    return 3.0 * sensors.c**2 * pair / (4.0 * sensors.w_e * sensors.rho * triple)


def planar_crb_fim(sensors: PlanarSensors) -> float:
    """FIM route: build the 3x3 information over (x, y, c*T0) and invert."""
    if len(sensors.angles) < 3:
        raise CollinearSensors("TDOA needs at least three sensors")
    phi = np.asarray(sensors.angles)
    u = np.stack([np.cos(phi), np.sin(phi), -np.ones_like(phi)], axis=1)
    w = sensors.eta_planar * sensors.weights
    j = (w[:, None] * u).T @ u
    if not np.all(np.isfinite(j)):
        raise SingularInformation("non-finite information matrix")
    det = np.linalg.det(j)
    if not det > 0.0 or np.linalg.cond(j) >= COND_LIMIT:
        raise SingularInformation(
            "planar information matrix is singular or near-singular"
        )
    inv = np.linalg.solve(j, np.eye(3))
    return float(inv[0, 0] + inv[1, 1])
