"""Discretized baseband signals and maximum-likelihood localization.

The receiver at the origin of the local frame observes, from each visible
satellite m at position p_m (km), a scaled and delayed copy of a unit-energy
pulse in white Gaussian noise:

    v_m(t_k) = A_m s(t_k - tau_m) + w_mk,   tau_m = |p_m - xi|/c + T0,

sampled at t_k = k*dt with noise variance N0/(2*dt) per sample. Amplitudes
follow the 1/distance law A_m = (h/D_m)*sqrt(es_max), so the zenith satellite
receives exactly es_max. The ML location estimate profiles the amplitudes out
in closed form (matched-filter outputs), scans a coarse spatial lattice with
the clock offset maximized over correlation lags, then polishes with
Nelder-Mead on the exact profiled likelihood evaluated at fractional delays
via the analytic pulse.

The per-satellite delay information of this discrete model is
2*(A_m^2/N0)*(2*pi*W_e)^2 with W_e the RMS (Gabor) effective bandwidth, which
is exactly the weight the bound modules call L_m once expressed per km^2;
`signal_fim` builds that matrix so simulated MSE and the bound share one
calibration.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.signal import fftconvolve

from .fim import BoundSet, FisherMatrix, SingularInformation, crb_from_fim
from .geometry import InvalidConfig, SatelliteState, SystemParams, constellation_rng
from .runtime import run_trials

PULSES = ("gaussian", "raised_cosine")
MODES = ("fix_z", "full_3d")

# the gaussian is truncated to +-6 sigma: the edge value exp(-18) is small
# enough that the truncation discontinuity cannot disturb the spectral second
# moment at the 1e-6 level the two bandwidth routes must agree to
_GAUSS_SUPPORT_SIGMAS = 12.0


class InsufficientCoverage(ValueError):
    """Too few visible satellites for the requested estimation mode."""


@dataclass(frozen=True)
class SignalConfig:
    """Waveform, sampling, and noise description of the measurement model.

    pulse: waveform family, 'gaussian' or 'raised_cosine'
    pulse_width: the waveform's width parameter, seconds -- the gaussian's
        sigma (support truncated to +-6 sigma), or the raised cosine's full
        period (which is exactly its support)
    sample_rate: Hz
    obs_window: observation span, seconds (all arrivals must fall inside)
    n0: two-sided noise spectral density N0 (per-sample variance N0/(2 dt))
    es_max: received pulse energy at distance h (zenith satellite)
    c: propagation speed, km/s
    """

    pulse: str
    pulse_width: float
    sample_rate: float
    obs_window: float
    n0: float
    es_max: float
    c: float

    def __post_init__(self) -> None:
        if self.pulse not in PULSES:
            raise InvalidConfig(f"pulse must be one of {PULSES}, got {self.pulse!r}")
        for name in ("pulse_width", "sample_rate", "obs_window", "n0", "es_max", "c"):
            if not getattr(self, name) > 0.0:
                raise InvalidConfig(f"{name} must be positive")
        if self.sample_rate * self.pulse_width < 16.0:
            raise InvalidConfig(
                "sample_rate * pulse_width must be >= 16 so the pulse is "
                f"resolved, got {self.sample_rate * self.pulse_width:.3g}"
            )
        if self.obs_window <= self.support:
            raise InvalidConfig("obs_window must exceed the pulse support")

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def n_samples(self) -> int:
        return int(round(self.obs_window * self.sample_rate))

    @property
    def support(self) -> float:
        """Total duration over which the pulse is nonzero, seconds."""
        if self.pulse == "gaussian":
            return _GAUSS_SUPPORT_SIGMAS * self.pulse_width
        return self.pulse_width


@dataclass(frozen=True)
class Measurement:
    """One satellite's sampled window; true_delay is test-only bookkeeping."""

    samples: np.ndarray
    sat_index: int
    true_delay: float


@dataclass(frozen=True)
class LocationEstimate:
    xi_hat: np.ndarray
    t0_hat: float
    amplitudes_hat: np.ndarray
    converged: bool


def _pulse_fn(
    config: SignalConfig, truncate_at: float | None = None
) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic unit-energy pulse centered at t=0, zero outside its support.

    truncate_at chops the waveform above that time (test instrumentation for
    deliberately breaking time symmetry); energy is not re-normalized then.
    """
    half = 0.5 * config.support
    if config.pulse == "gaussian":
        sigma = config.pulse_width
        amp = (math.pi * sigma * sigma) ** -0.25

        def shape(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            out = amp * np.exp(-0.5 * (t / sigma) ** 2)
            out[np.abs(t) > half] = 0.0
            return out

    else:  # raised_cosine
        amp = math.sqrt(8.0 / (3.0 * config.pulse_width))

        def shape(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            out = amp * 0.5 * (1.0 + np.cos(2.0 * math.pi * t / config.pulse_width))
            out[np.abs(t) > half] = 0.0
            return out

    if truncate_at is None:
        return shape

    def truncated(t: np.ndarray) -> np.ndarray:
        out = shape(t)
        out[np.asarray(t, dtype=float) > truncate_at] = 0.0
        return out

    return truncated


def _pulse_deriv_fn(config: SignalConfig) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic time derivative of the pulse (zero outside the support)."""
    base = _pulse_fn(config)
    if config.pulse == "gaussian":
        sigma = config.pulse_width

        def deriv(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            return -t / (sigma * sigma) * base(t)

    else:
        half = 0.5 * config.pulse_width
        amp = math.sqrt(8.0 / (3.0 * config.pulse_width))
        w = 2.0 * math.pi / config.pulse_width

        def deriv(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            out = -amp * 0.5 * w * np.sin(w * t)
            out[np.abs(t) > half] = 0.0
            return out

    return deriv


@dataclass(frozen=True)
class SampledPulse:
    """Pulse samples on the measurement lattice, energy-normalized.

    samples[i] = s((i - (len-1)/2) * dt) after rescaling so sum(s^2) dt = 1;
    deriv holds the analytic derivative samples with the same scale factor.
    fine and deriv_fine sample the same waveform on a fixed 2048-point lattice
    across the support (spacing dt_fine, independent of the measurement rate):
    both bandwidth routes work there, because at a non-commensurate sample
    rate the measurement lattice alone estimates the raised cosine's spectral
    moments about three orders of magnitude too coarsely for the 1e-6
    route-agreement contract.
    """

    samples: np.ndarray
    deriv: np.ndarray
    dt: float
    fine: np.ndarray
    deriv_fine: np.ndarray
    dt_fine: float

    @property
    def half_len(self) -> int:
        return (len(self.samples) - 1) // 2

    @property
    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))


_FINE_POINTS = 2048


def make_pulse(config: SignalConfig) -> SampledPulse:
    """Sample the pulse on the observation lattice and normalize its energy."""
    dt = config.dt
    shape = _pulse_fn(config)
    deriv = _pulse_deriv_fn(config)
    half = int(math.ceil(0.5 * config.support / dt))
    t = (np.arange(2 * half + 1) - half) * dt
    raw = shape(t)
    scale = 1.0 / math.sqrt(float(np.dot(raw, raw)) * dt)
    dt_fine = config.support / _FINE_POINTS
    t_fine = (np.arange(_FINE_POINTS + 1) - _FINE_POINTS // 2) * dt_fine
    return SampledPulse(
        samples=raw * scale,
        deriv=deriv(t) * scale,
        dt=dt,
        fine=shape(t_fine) * scale,
        deriv_fine=deriv(t_fine) * scale,
        dt_fine=dt_fine,
    )


def effective_bandwidth(pulse: SampledPulse, n_fft: int = 1 << 16) -> float:
    """RMS (Gabor) bandwidth in Hz from the pulse spectrum.

    sqrt(int f^2 |S|^2 df / int |S|^2 df) over the zero-padded FFT of the
    fine-lattice samples; the time-domain route `effective_bandwidth_time`
    (Parseval on the analytic derivative) agrees to 1e-6 relative.
    """
    spec = np.abs(np.fft.fft(pulse.fine, n=n_fft)) ** 2
    f = np.fft.fftfreq(n_fft, d=pulse.dt_fine)
    return math.sqrt(float(np.dot(f * f, spec) / np.sum(spec)))


def effective_bandwidth_time(pulse: SampledPulse) -> float:
    """Same bandwidth via Parseval: sqrt(sum sdot^2 / sum s^2) / (2 pi)."""
    num = float(np.dot(pulse.deriv_fine, pulse.deriv_fine))
    den = float(np.dot(pulse.fine, pulse.fine))
    return math.sqrt(num / den) / (2.0 * math.pi)


def rss_negligibility_threshold(h: float, c: float) -> float:
    """Minimum effective bandwidth (Hz) for RSS information to be negligible.

    The amplitude channel adds nothing once (D W_e / c)^2 >> 1 for every
    satellite distance D >= h, i.e. for W_e well above c/h.
    """
    return c / h


def sat_positions(
    constellation: Sequence[SatelliteState] | np.ndarray,
) -> np.ndarray:
    """(M, 3) km positions of the visible satellites in the local frame."""
    if isinstance(constellation, np.ndarray):
        pos = np.asarray(constellation, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidConfig("position array must have shape (M, 3)")
        return pos
    vis = [s for s in constellation if s.visible]
    return np.array(
        [
            [
                s.d * math.sin(s.phi_l) * math.cos(s.theta),
                s.d * math.sin(s.phi_l) * math.sin(s.theta),
                s.d * math.cos(s.phi_l),
            ]
            for s in vis
        ]
    ).reshape(-1, 3)


def zenith_ring_geometry(
    params: SystemParams, ring_phi_l: float = math.radians(30.0), n_ring: int = 5
) -> list[SatelliteState]:
    """One satellite at zenith plus a ring of n_ring at elevation ring_phi_l,
    all on the shell of height h."""
    sats = [SatelliteState(phi_l=0.0, theta=0.0, d=params.h, visible=True)]
    d_ring = shell_distance(ring_phi_l, params)
    for k in range(n_ring):
        sats.append(
            SatelliteState(
                phi_l=ring_phi_l,
                theta=2.0 * math.pi * k / n_ring,
                d=d_ring,
                visible=True,
            )
        )
    return sats


def shell_distance(phi_l: float, params: SystemParams) -> float:
    """Distance from the origin to the height-h shell along elevation phi_l."""
    s = params.r * math.sin(phi_l)
    sq = math.sqrt((params.big_r - s) * (params.big_r + s))
    return params.h * (2.0 * params.r + params.h) / (sq + params.r * math.cos(phi_l))


def amplitudes(positions: np.ndarray, params_h: float, es_max: float) -> np.ndarray:
    """A_m = (h / D_m) sqrt(es_max): zenith distance h receives es_max."""
    d = np.linalg.norm(positions, axis=1)
    return params_h / d * math.sqrt(es_max)


def _delays(positions: np.ndarray, xi: np.ndarray, t0: float, c: float) -> np.ndarray:
    return np.linalg.norm(positions - xi[None, :], axis=1) / c + t0


def centered_t0(positions: np.ndarray, config: SignalConfig) -> float:
    """Clock offset that centers the arrival spread inside the window."""
    g = np.linalg.norm(positions, axis=1) / config.c
    return 0.5 * (config.obs_window - (g.max() - g.min())) - g.min()


def simulate_measurements(
    truth: tuple[np.ndarray, float],
    constellation: Sequence[SatelliteState] | np.ndarray,
    config: SignalConfig,
    seed: int,
    trial: int = 0,
) -> list[Measurement]:
    """Sampled windows for every visible satellite, deterministic per seed."""
    xi, t0 = np.asarray(truth[0], dtype=float), float(truth[1])
    pos = sat_positions(constellation)
    if len(pos) < 4:
        raise InsufficientCoverage(
            f"need at least 4 visible satellites, got {len(pos)}"
        )
    h = float(np.linalg.norm(pos, axis=1).min())  # zenith-normalized amplitudes
    amps = amplitudes(pos, h, config.es_max)
    taus = _delays(pos, xi, t0, config.c)
    k = config.n_samples
    t_axis = np.arange(k) * config.dt
    pulse = _pulse_fn(config)
    sigma = math.sqrt(config.n0 / (2.0 * config.dt))
    rng = constellation_rng(seed, trial=trial)
    out = []
    for m in range(len(pos)):
        clean = amps[m] * pulse(t_axis - taus[m])
        noise = sigma * rng.standard_normal(k)
        out.append(
            Measurement(samples=clean + noise, sat_index=m, true_delay=float(taus[m]))
        )
    return out


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise InvalidConfig(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _profiled_score(
    samples: list[np.ndarray],
    taus: np.ndarray,
    config: SignalConfig,
    pulse: Callable[[np.ndarray], np.ndarray],
    support_half: float,
) -> float:
    """Sum over satellites of C_m(tau_m)^2 / E_m(tau_m), exact delays."""
    dt = config.dt
    k = config.n_samples
    total = 0.0
    for v, tau in zip(samples, taus):
        lo = max(0, int(math.ceil((tau - support_half) / dt)))
        hi = min(k - 1, int(math.floor((tau + support_half) / dt)))
        if hi < lo:
            continue
        idx = np.arange(lo, hi + 1)
        s = pulse(idx * dt - tau)
        energy = float(np.dot(s, s))
        if energy <= 0.0:
            continue
        corr = float(np.dot(v[lo : hi + 1], s))
        total += corr * corr / energy
    return total


def ml_localize(
    measurements: Sequence[Measurement],
    constellation: Sequence[SatelliteState] | np.ndarray,
    config: SignalConfig,
    mode: str = "full_3d",
    search_center: Sequence[float] = (0.0, 0.0, 0.0),
    search_halfwidth: float = 4.5,
    grid_spacing: float | None = None,
    max_iter: int = 600,
) -> LocationEstimate:
    """Maximum-likelihood (xi, T0) with amplitudes profiled out.

    Coarse stage: spatial lattice around search_center (spacing defaults to
    c/(4 W_e)), clock offset maximized over integer correlation lags. Fine
    stage: Nelder-Mead on the exact profiled likelihood, tolerance 1 m in
    position and better than 1 ns in time (the clock variable is carried as
    c*T0 in km). In fix_z mode the z coordinate is pinned to the search
    center's z (the receiver knows its altitude).
    """
    _check_mode(mode)
    need = 3 if mode == "fix_z" else 4
    if len(measurements) < need:
        raise InsufficientCoverage(
            f"{mode} needs at least {need} measurements, got {len(measurements)}"
        )
    pos_all = sat_positions(constellation)
    pos = np.array([pos_all[m.sat_index] for m in measurements])
    samples = [np.asarray(m.samples, dtype=float) for m in measurements]
    dt = config.dt
    k = config.n_samples
    sp = make_pulse(config)
    pulse = _pulse_fn(config)
    support_half = 0.5 * config.support

    if grid_spacing is None:
        w_e = effective_bandwidth_time(sp)
        grid_spacing = config.c / (4.0 * w_e)

    # matched-filter outputs on the sample lattice:
    # corr[m][j] = sum_k v_m[k] s((k - j) dt), j = 0..K-1
    ph = sp.half_len
    corr = [fftconvolve(v, sp.samples[::-1])[ph : ph + k] for v in samples]
    corr2 = np.array([c_ * c_ for c_ in corr])

    center = np.asarray(search_center, dtype=float)
    offsets = np.arange(
        -search_halfwidth, search_halfwidth + 0.5 * grid_spacing, grid_spacing
    )
    if mode == "fix_z":
        grid = [
            center + np.array([dx, dy, 0.0])
            for dx in offsets
            for dy in offsets
        ]
    else:
        grid = [
            center + np.array([dx, dy, dz])
            for dx in offsets
            for dy in offsets
            for dz in offsets
        ]

    best = (-math.inf, None, None)
    for xi in grid:
        g = np.linalg.norm(pos - xi[None, :], axis=1) / config.c
        o = np.round(g / dt).astype(int)
        rel = o - o.min()
        span = int(rel.max())
        if span >= k:
            continue
        # score(l) = sum_m corr_m[rel_m + l]^2 over common clock lags l
        width = k - span
        windows = np.stack(
            [corr2[m, rel[m] : rel[m] + width] for m in range(len(pos))]
        )
        scores = windows.sum(axis=0)
        l_hat = int(np.argmax(scores))
        if scores[l_hat] > best[0]:
            t0_hat = float(np.mean((rel + l_hat) * dt - g))
            best = (float(scores[l_hat]), xi.copy(), t0_hat)

    score0, xi0, t00 = best
    if xi0 is None:
        raise SingularInformation("no lattice point keeps all pulses in-window")

    # fine stage: exact likelihood over (x, y[, z], c*T0), all in km
    def unpack(u: np.ndarray) -> tuple[np.ndarray, float]:
        if mode == "fix_z":
            xi = np.array([u[0], u[1], center[2]])
            return xi, u[2] / config.c
        return u[:3].copy(), u[3] / config.c

    def negloglike(u: np.ndarray) -> float:
        xi, t0 = unpack(u)
        taus = _delays(pos, xi, t0, config.c)
        return -_profiled_score(samples, taus, config, pulse, support_half)

    if mode == "fix_z":
        u0 = np.array([xi0[0], xi0[1], t00 * config.c])
    else:
        u0 = np.array([xi0[0], xi0[1], xi0[2], t00 * config.c])
    # start the simplex at coarse-lattice scale so the polish can actually
    # travel; the clock coordinate steps by half a sample in km
    steps = np.full(len(u0), max(0.5 * grid_spacing, 0.05))
    steps[-1] = max(0.5 * config.c * dt, 0.05)
    simplex = np.vstack([u0] + [u0 + steps[i] * np.eye(len(u0))[i] for i in range(len(u0))])
    res = minimize(
        negloglike,
        u0,
        method="Nelder-Mead",
        options=dict(
            initial_simplex=simplex,
            xatol=2.0e-4,  # km: 0.2 m in position, 0.7 ns in clock
            fatol=1.0e-4 * max(1.0, abs(score0)),
            maxiter=max_iter,
            maxfev=2 * max_iter,
        ),
    )
    xi_hat, t0_hat = unpack(res.x)

    # profiled amplitudes at the estimate: matched filter / pulse energy
    taus = _delays(pos, xi_hat, t0_hat, config.c)
    amps = []
    for v, tau in zip(samples, taus):
        lo = max(0, int(math.ceil((tau - support_half) / dt)))
        hi = min(k - 1, int(math.floor((tau + support_half) / dt)))
        if hi < lo:
            amps.append(0.0)
            continue
        idx = np.arange(lo, hi + 1)
        s = pulse(idx * dt - tau)
        energy = float(np.dot(s, s))
        amps.append(float(np.dot(v[lo : hi + 1], s)) / energy if energy else 0.0)
    return LocationEstimate(
        xi_hat=xi_hat,
        t0_hat=t0_hat,
        amplitudes_hat=np.array(amps),
        converged=bool(res.success),
    )


def signal_fim(
    constellation: Sequence[SatelliteState] | np.ndarray, config: SignalConfig
) -> FisherMatrix:
    """4x4 information over (x, y, z, c*T0) implied by the signal model.

    Weights are the per-satellite delay informations expressed per km^2:
    L_m = 2 (A_m^2 / N0) (2 pi W_e / c)^2.
    """
    pos = sat_positions(constellation)
    h = float(np.linalg.norm(pos, axis=1).min())
    amps = amplitudes(pos, h, config.es_max)
    w_e = effective_bandwidth_time(make_pulse(config))
    ell = 2.0 * amps**2 / config.n0 * (2.0 * math.pi * w_e / config.c) ** 2
    d = np.linalg.norm(pos, axis=1)
    u = np.concatenate([pos / d[:, None], -np.ones((len(pos), 1))], axis=1)
    return FisherMatrix((ell[:, None] * u).T @ u)


def signal_crb(
    constellation: Sequence[SatelliteState] | np.ndarray,
    config: SignalConfig,
    mode: str = "full_3d",
) -> BoundSet:
    """CRB of the signal model; fix_z drops the z row/column before inverting."""
    _check_mode(mode)
    j = signal_fim(constellation, config).m
    if mode == "fix_z":
        keep = [0, 1, 3]
        j3 = j[np.ix_(keep, keep)]
        if not np.linalg.det(j3) > 0.0:
            raise SingularInformation("reduced information matrix is singular")
        inv = np.linalg.solve(j3, np.eye(3))
        return BoundSet(xy=float(inv[0, 0] + inv[1, 1]), z=0.0)
    return crb_from_fim(j)


@dataclass(frozen=True)
class MseRow:
    snr_db: float
    mse_xy: float
    mse_xyz: float
    crb_xy: float
    crb_xyz: float
    trials: int


def mse_experiment(
    geometry: Sequence[SatelliteState] | np.ndarray,
    config: SignalConfig,
    snr_grid: Sequence[float],
    trials: int,
    seed: int,
) -> list[MseRow]:
    """Empirical ML error vs the bound across Es,max/N0 points (dB).

    fix_z estimates score mse_xy against the reduced-model bound; full_3d
    estimates score mse_xyz against the full bound. The truth sits at the
    origin with the clock offset centering all arrivals in the window.
    """
    if trials < 50:
        raise InvalidConfig(f"trials must be >= 50, got {trials}")
    pos = sat_positions(geometry)
    truth_xi = np.zeros(3)
    rows = []
    for snr_db in snr_grid:
        n0 = config.es_max / 10.0 ** (float(snr_db) / 10.0)
        cfg = dataclasses.replace(config, n0=n0)
        t0 = centered_t0(pos, cfg)

        def one_trial(trial: int) -> tuple[float, float]:
            meas = simulate_measurements((truth_xi, t0), pos, cfg, seed, trial=trial)
            est2 = ml_localize(meas, pos, cfg, mode="fix_z")
            est3 = ml_localize(meas, pos, cfg, mode="full_3d")
            e_xy = float(np.sum((est2.xi_hat[:2] - truth_xi[:2]) ** 2))
            e_xyz = float(np.sum((est3.xi_hat - truth_xi) ** 2))
            return e_xy, e_xyz

        errs = run_trials(one_trial, trials)
        mse_xy = float(np.mean([e[0] for e in errs]))
        mse_xyz = float(np.mean([e[1] for e in errs]))
        rows.append(
            MseRow(
                snr_db=float(snr_db),
                mse_xy=mse_xy,
                mse_xyz=mse_xyz,
                crb_xy=signal_crb(pos, cfg, mode="fix_z").xy,
                crb_xyz=signal_crb(pos, cfg, mode="full_3d").xyz,
                trials=trials,
            )
        )
    return rows


def decoupling_check(
    geometry: Sequence[SatelliteState] | np.ndarray,
    config: SignalConfig,
    break_symmetry: bool = False,
) -> float:
    """Largest normalized information coupling between (xi, T0) and amplitudes.

    Builds the extended-model information over (x, y, z, c*T0, A_1..A_M) from
    central finite differences of the noiseless sample means and returns
    max |J_ab| / sqrt(J_aa J_bb) over the cross block. A time-symmetric pulse
    makes this vanish; break_symmetry truncates the pulse tail to confirm the
    check can detect a coupled model.
    """
    pos = sat_positions(geometry)
    m_count = len(pos)
    h = float(np.linalg.norm(pos, axis=1).min())
    amps = amplitudes(pos, h, config.es_max)
    truncate = 0.15 * config.pulse_width if break_symmetry else None
    pulse = _pulse_fn(config, truncate_at=truncate)
    t_axis = np.arange(config.n_samples) * config.dt
    t0 = centered_t0(pos, config)

    def mean_vector(theta: np.ndarray) -> np.ndarray:
        xi = theta[:3]
        t0_loc = theta[3] / config.c
        a = theta[4:]
        taus = _delays(pos, xi, t0_loc, config.c)
        return np.concatenate(
            [a[m] * pulse(t_axis - taus[m]) for m in range(m_count)]
        )

    theta0 = np.concatenate([np.zeros(3), [t0 * config.c], amps])
    steps = np.concatenate(
        [np.full(4, 1.0e-3), np.maximum(1.0e-3 * np.abs(amps), 1.0e-9)]
    )
    cols = []
    for i in range(len(theta0)):
        up, dn = theta0.copy(), theta0.copy()
        up[i] += steps[i]
        dn[i] -= steps[i]
        cols.append((mean_vector(up) - mean_vector(dn)) / (2.0 * steps[i]))
    g = np.stack(cols, axis=1)
    j = g.T @ g
    diag = np.diag(j)
    worst = 0.0
    for a in range(4):
        for b in range(4, len(theta0)):
            denom = math.sqrt(diag[a] * diag[b])
            if denom > 0.0:
                worst = max(worst, abs(j[a, b]) / denom)
    return worst
