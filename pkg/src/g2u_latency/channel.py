"""Per-link propagation: LOS probability, Rician fading, elevation-dependent
path-loss exponent, SNR / SIR and the fading-averaged SNR."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import specfun
from .errors import ConfigError, DegenerateLink, ModelDiscrepancyWarning
from .geometry import Position3D, distance, elevation_angle
from .units import dbm_to_w

K_DB_CLAMP = 100.0
RICIAN_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    """Environment and link-budget constants.

    Rice factors are given as ranges in dB; the factor of a link is
    interpolated linearly in elevation between the range ends (0 and 90 deg).
    ``interference_sum`` is ``"power"`` (incoherent) or ``"coherent"``.
    """

    f1: float = 12.08
    f2_per_deg: float = 0.11
    k_ground_min_db: float = 5.0
    k_ground_max_db: float = 12.0
    k_air_min_db: float = 10.0
    k_air_max_db: float = 12.0
    alpha_los: float = 2.0
    alpha_nlos: float = 3.5
    noise_density_dbm_hz: float = -174.0
    bandwidth_hz: float = 1e6
    carrier_hz: float = 2e9
    shadowing: bool = False
    shadow_sigma_los_db: float = 4.0
    shadow_sigma_nlos_db: float = 6.0
    interference_sum: str = "power"

    def __post_init__(self):
        if not (self.f1 > 0 and self.f2_per_deg > 0):
            raise ConfigError("f1 and f2 must be positive")
        if not 2.0 <= self.alpha_los <= self.alpha_nlos <= 6.0:
            raise ConfigError("need 2 <= alpha_los <= alpha_nlos <= 6")
        if not self.bandwidth_hz > 0:
            raise ConfigError("bandwidth_hz must be positive")
        if self.interference_sum not in ("power", "coherent"):
            raise ConfigError(f"interference_sum must be 'power' or 'coherent', got {self.interference_sum!r}")

    @property
    def noise_power_w(self) -> float:
        """B * N0 in watts."""
        return self.bandwidth_hz * float(dbm_to_w(self.noise_density_dbm_hz))


@dataclass(frozen=True)
class RicianParams:
    """Rician envelope parameters normalized to unit mean power."""

    rho_h: float
    sigma_h: float

    def __post_init__(self):
        if self.rho_h < 0 or not self.sigma_h > 0:
            raise ConfigError(f"need rho_h >= 0 and sigma_h > 0, got {self.rho_h}, {self.sigma_h}")
        if abs(self.rho_h**2 + 2 * self.sigma_h**2 - 1.0) > RICIAN_NORM_TOL:
            raise ConfigError("Rician parameters must satisfy rho^2 + 2 sigma^2 = 1")

    @property
    def k_db(self) -> float:
        if self.rho_h == 0:
            return -math.inf
        return 10 * math.log10(self.rho_h**2 / (2 * self.sigma_h**2))


def los_probability(theta, params: ChannelParams):
    """Logistic LOS probability of a link at elevation ``theta`` (degrees)."""
    theta = np.asarray(theta, dtype=float)
    out = 1.0 / (1.0 + params.f1 * np.exp(-params.f2_per_deg * (theta - params.f1)))
    return float(out) if out.ndim == 0 else out


def path_loss_exponent(theta, params: ChannelParams):
    """LOS-probability weighted blend of the LOS and NLOS exponents."""
    p = los_probability(theta, params)
    return params.alpha_nlos + (params.alpha_los - params.alpha_nlos) * p


def rice_factor_db(theta, params: ChannelParams, air_to_air: bool = False):
    lo, hi = ((params.k_air_min_db, params.k_air_max_db) if air_to_air
              else (params.k_ground_min_db, params.k_ground_max_db))
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, 90.0)
    out = lo + (hi - lo) * theta / 90.0
    return float(out) if out.ndim == 0 else out


def rician_from_k(k_db: float) -> RicianParams:
    """Solve K = rho^2 / (2 sigma^2) with rho^2 + 2 sigma^2 = 1.

    ``k_db`` is clamped at ``K_DB_CLAMP``, the pure-LOS limit.
    """
    if math.isnan(k_db):
        raise ConfigError("k_db is NaN")
    k = 10.0 ** (min(k_db, K_DB_CLAMP) / 10.0)
    two_sigma2 = 1.0 / (1.0 + k)
    return RicianParams(math.sqrt(k * two_sigma2), math.sqrt(two_sigma2 / 2.0))


def rician_pdf(h, p: RicianParams):
    h = np.asarray(h, dtype=float)
    s2 = p.sigma_h**2
    # exp(-(h^2 + rho^2)/2s2) I0(h rho / s2) == exp(-(h - rho)^2/2s2) i0e(h rho / s2)
    out = (h / s2) * np.exp(-((h - p.rho_h) ** 2) / (2 * s2)) * specfun.bessel_i0e(h * p.rho_h / s2)
    out = np.where(h < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def rician_cdf(h, p: RicianParams):
    out = stats.rice.cdf(h, p.rho_h / p.sigma_h, scale=p.sigma_h)
    return float(out) if np.ndim(out) == 0 else out


def sample_rician_complex(p: RicianParams, rng: np.random.Generator, size=None):
    """Complex gain (rho + sigma g1) + i sigma g2."""
    g = rng.standard_normal((2,) if size is None else (2,) + tuple(np.atleast_1d(size)))
    out = (p.rho_h + p.sigma_h * g[0]) + 1j * (p.sigma_h * g[1])
    return complex(out) if size is None else out


def sample_rician(p: RicianParams, rng: np.random.Generator, size=None):
    """Envelope draw(s) |(rho + sigma g1) + i sigma g2|."""
    out = np.abs(sample_rician_complex(p, rng, size))
    return float(out) if size is None else out


# --------------------------------------------------------------------------
# link quantities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkGeometry:
    """Distance, elevation and the derived per-link channel description."""

    distance_m: float
    elevation_deg: float
    alpha: float
    p_los: float
    rician: RicianParams
    air_to_air: bool = False

    @property
    def gain(self) -> float:
        """Deterministic large-scale gain d^-alpha."""
        if self.distance_m == 0.0:
            raise DegenerateLink("zero-length link has no path loss")
        return self.distance_m ** (-self.alpha)


def link_geometry(tx: Position3D, rx: Position3D, params: ChannelParams) -> LinkGeometry:
    d = distance(tx, rx)
    if d == 0.0:
        raise DegenerateLink(f"transmitter and receiver coincide at {tx.as_tuple()}")
    theta = elevation_angle(tx, rx)
    a2a = tx.airborne and rx.airborne
    return LinkGeometry(
        distance_m=d,
        elevation_deg=theta,
        alpha=path_loss_exponent(theta, params),
        p_los=los_probability(theta, params),
        rician=rician_from_k(rice_factor_db(theta, params, a2a)),
        air_to_air=a2a,
    )


class LinkDraw(NamedTuple):
    """One transmitter's contribution at a receiver: power, geometry, fading.

    ``h`` may be complex; only ``|h|^2`` enters power-sum quantities.
    """

    p_tx_w: float
    geom: LinkGeometry
    h: complex = 1.0

    @property
    def amplitude(self):
        return np.sqrt(self.p_tx_w * self.geom.gain) * self.h

    @property
    def power(self):
        return self.p_tx_w * self.geom.gain * np.abs(self.h) ** 2


def received_power(p_tx_w, geom: LinkGeometry, h=1.0):
    return p_tx_w * geom.gain * np.abs(h) ** 2


def instantaneous_snr(p_tx_w, geom: LinkGeometry, h, params: ChannelParams):
    """lambda = P d^-alpha |h|^2 / (B N0)."""
    if p_tx_w < 0:
        raise ConfigError("transmit power must be >= 0")
    return received_power(p_tx_w, geom, h) / params.noise_power_w


def interference_power(interferers: Sequence[LinkDraw], coherent: bool = False) -> float:
    if not interferers:
        return 0.0
    if coherent:
        return float(np.abs(sum(d.amplitude for d in interferers)) ** 2)
    return float(sum(d.power for d in interferers))


def sir(intended: LinkDraw, interferers: Sequence[LinkDraw], coherent: bool = False) -> float:
    """Signal-to-interference ratio; ``inf`` when no interference arrives."""
    i_w = interference_power(interferers, coherent)
    s_w = float(intended.power)
    if i_w == 0.0:
        return math.inf
    return s_w / i_w


# --------------------------------------------------------------------------
# fading-averaged SNR
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AverageSnrReport:
    quadrature: float
    closed_form: float
    g_value: float
    rel_deviation: float
    agrees: bool
    tolerance: float = 1e-3
    notes: dict = field(default_factory=dict)


def _second_moment(p: RicianParams) -> float:
    if p.sigma_h < 1e-6:
        return p.rho_h**2
    res = specfun.integrate_semi_infinite(lambda h: h * h * rician_pdf(h, p), mode=p.rho_h)
    return res.value


def closed_form_average_snr(p_tx_w: float, geom: LinkGeometry, params: ChannelParams) -> tuple[float, float]:
    """Evaluate the Meijer-G closed form for the average SNR as printed.

    Returns ``(value, g_value)``. The expression carries sqrt(P d^-alpha) and
    a (-2 pi sigma^2) prefactor; it is evaluated literally so its deviation
    from the quadrature route can be reported.
    """
    r = geom.rician
    s2 = r.sigma_h**2
    z = 2 * r.rho_h**2 / s2
    g = specfun.meijer_g(specfun.AVG_SNR_SPEC, z)
    pref = math.sqrt(p_tx_w * geom.gain) * (-2 * math.pi * s2) / params.noise_power_w
    return pref * math.exp(-r.rho_h**2 / (2 * s2)) * g, g


def average_snr_report(p_tx_w: float, geom: LinkGeometry, params: ChannelParams,
                       tolerance: float = 1e-3) -> AverageSnrReport:
    quad = average_snr(p_tx_w, geom, params, mode="quadrature")
    closed, g = closed_form_average_snr(p_tx_w, geom, params)
    dev = abs(closed - quad) / abs(quad) if quad else math.inf
    return AverageSnrReport(
        quadrature=quad,
        closed_form=closed,
        g_value=g,
        rel_deviation=dev,
        agrees=dev <= tolerance,
        tolerance=tolerance,
        notes={"g_sign": int(math.copysign(1, g)), "k_db": geom.rician.k_db},
    )


def average_snr(p_tx_w: float, geom: LinkGeometry, params: ChannelParams, mode: str = "quadrature") -> float:
    """Fading-averaged SNR E_h[lambda(h)].

    ``mode="quadrature"`` integrates the instantaneous SNR against the
    Rician density and is the reference. ``mode="closed_form"`` returns
    the Meijer-G expression instead and warns with ModelDiscrepancyWarning
    when it deviates from the quadrature value by more than 1e-3 relative.
    """
    if mode == "quadrature":
        return p_tx_w * geom.gain * _second_moment(geom.rician) / params.noise_power_w
    if mode == "closed_form":
        rep = average_snr_report(p_tx_w, geom, params)
        if not rep.agrees:
            warnings.warn(
                f"closed-form average SNR {rep.closed_form:.6g} deviates from quadrature "
                f"{rep.quadrature:.6g} (relative {rep.rel_deviation:.3g}, G sign {rep.notes['g_sign']:+d})",
                ModelDiscrepancyWarning,
                stacklevel=2,
            )
        return rep.closed_form
    raise ConfigError(f"unknown average_snr mode {mode!r}")


@dataclass(frozen=True)
class LinkBudget:
    """Computed per-link quantities at one fading state (mean fading by default)."""

    distance_m: float
    elevation_deg: float
    alpha_eff: float
    p_los: float
    rician: RicianParams
    signal_w: float
    snr_inst: float
    snr_avg: float
    sir: float
    sinr: float


def link_budget(tx: Position3D, rx: Position3D, p_tx_w: float, params: ChannelParams,
                h=1.0, interference_w: float = 0.0, noise_w: float | None = None) -> LinkBudget:
    geom = link_geometry(tx, rx, params)
    noise = params.noise_power_w if noise_w is None else noise_w
    s = float(received_power(p_tx_w, geom, h))
    return LinkBudget(
        distance_m=geom.distance_m,
        elevation_deg=geom.elevation_deg,
        alpha_eff=geom.alpha,
        p_los=geom.p_los,
        rician=geom.rician,
        signal_w=s,
        snr_inst=s / noise,
        snr_avg=p_tx_w * geom.gain / noise,
        sir=s / interference_w if interference_w > 0 else math.inf,
        sinr=s / (interference_w + noise),
    )
