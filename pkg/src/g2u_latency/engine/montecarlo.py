"""Seeded Monte Carlo evaluation of the delay bound over fading realizations.

Realization ``k`` draws its normals from a generator seeded by
``SeedSequence(seed, spawn_key=(k,))``, so every grid point of a sweep sees
the same fading states (common random numbers) and the result does not
depend on evaluation order or thread count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from ..channel import LinkGeometry, link_geometry
from ..errors import AllOutage
from ..geometry import distance
from ..infotheory import capacity_upper_bound, min_delay_array
from ..relaylink import af_cascade_sinr
from ..units import lin_to_db
from .scenario import Scenario

N_NORMALS = 5  # scatter re/im, shadowing, LOS state, LOS phase
SLOT_DIRECT, SLOT_HOP1, SLOT_HOP2, SLOT_FIRST_INTERFERER = 0, 1, 2, 3


@lru_cache(maxsize=32)
def _normals(seed: int, realizations: int, slots: int) -> np.ndarray:
    out = np.empty((realizations, slots, N_NORMALS))
    for k in range(realizations):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        out[k] = rng.standard_normal((slots, N_NORMALS))
    out.setflags(write=False)
    return out


def realization_normals(seed: int, realizations: int, slots: int) -> np.ndarray:
    """Standard normals of shape (realizations, slots, 5); read-only, cached."""
    return _normals(int(seed), int(realizations), int(slots))


def fading_draws(geom: LinkGeometry, g: np.ndarray, s: Scenario) -> np.ndarray:
    """Complex small-scale gains (times shadowing amplitude) for one link.

    ``g`` has shape (realizations, 5).
    """
    r = geom.rician
    h = (r.rho_h + r.sigma_h * g[:, 0]) + 1j * (r.sigma_h * g[:, 1])
    ch = s.channel
    if ch.interference_sum == "coherent":
        h = h * np.exp(2j * np.pi * special.ndtr(g[:, 4]))
    if ch.shadowing:
        los = special.ndtr(g[:, 3]) < geom.p_los
        sigma_db = np.where(los, ch.shadow_sigma_los_db, ch.shadow_sigma_nlos_db)
        h = h * np.power(10.0, sigma_db * g[:, 2] / 20.0)
    return h


@dataclass
class RealizationSet:
    """Per-realization link powers and SINRs of one scenario."""

    signal_w: np.ndarray
    interference_w: np.ndarray
    interferer_powers_w: np.ndarray  # (realizations, n_interferers)
    noise_w: float
    sinr: np.ndarray
    slots: int
    relayed: bool


def simulate(s: Scenario) -> RealizationSet:
    n_i = len(s.interferers)
    slots = SLOT_FIRST_INTERFERER + 2 * n_i
    g = realization_normals(s.seed, s.realizations, slots)
    ch = s.channel
    noise = s.noise_power_w()
    coherent = ch.interference_sum == "coherent"

    def interference_at(node, first_slot):
        amps = []
        for k, itf in enumerate(s.interferers):
            geom = link_geometry(itf.position, node, ch)
            amps.append(math.sqrt(itf.power_w * geom.gain) * fading_draws(geom, g[:, first_slot + k], s))
        if not amps:
            zero = np.zeros(s.realizations)
            return zero, np.zeros((s.realizations, 0))
        amps = np.stack(amps, axis=1)
        powers = np.abs(amps) ** 2
        total = np.abs(amps.sum(axis=1)) ** 2 if coherent else powers.sum(axis=1)
        return total, powers

    i_rx, i_rx_each = interference_at(s.receiver, SLOT_FIRST_INTERFERER)

    relay = s.relay
    if relay is None or distance(relay.position, s.receiver) == 0.0:
        geom = link_geometry(s.bs, s.receiver, ch)
        sig = s.tx_power_w * geom.gain * np.abs(fading_draws(geom, g[:, SLOT_DIRECT], s)) ** 2
        return RealizationSet(sig, i_rx, i_rx_each, noise, sig / (i_rx + noise), 1, False)

    hop2 = link_geometry(relay.position, s.receiver, ch)
    sig2 = relay.tx_power_w * hop2.gain * np.abs(fading_draws(hop2, g[:, SLOT_HOP2], s)) ** 2
    lam2 = sig2 / (i_rx + noise)
    if distance(s.bs, relay.position) == 0.0:
        lam1 = np.full(s.realizations, np.inf)
    else:
        hop1 = link_geometry(s.bs, relay.position, ch)
        sig1 = s.tx_power_w * hop1.gain * np.abs(fading_draws(hop1, g[:, SLOT_HOP1], s)) ** 2
        relay_noise = noise
        if relay.interference_at_relay:
            relay_noise = noise + interference_at(relay.position, SLOT_FIRST_INTERFERER + n_i)[0]
        lam1 = sig1 / relay_noise
    sinr = af_cascade_sinr(lam1, lam2, relay.noise_at_relay)
    return RealizationSet(sig2, i_rx, i_rx_each, noise, np.asarray(sinr), 2, True)


@dataclass
class MonteCarloResult:
    mean_delay: float
    stderr: float
    outage_frac: float
    n_finite: int
    rho_used: float
    slots: int
    delays: np.ndarray = field(repr=False)
    sinr: np.ndarray = field(repr=False)

    @property
    def mean_sinr_db(self) -> float:
        return float(lin_to_db(np.mean(self.sinr)))


def monte_carlo_delay(s: Scenario) -> MonteCarloResult:
    """Mean minimum delay over ``s.realizations`` fading draws.

    Relayed delays are multiplied by the two time slots unless
    ``s.per_slot``. Infinite bounds (zero-capacity draws) and delays above
    ``s.delay_budget_symbols`` count as outages; the mean and its standard
    error cover the finite delays only.
    """
    rs = simulate(s)
    delays, rho = min_delay_array(s.reliability, rs.sinr)
    slots = 1 if s.per_slot else rs.slots
    delays = delays * slots
    finite = np.isfinite(delays)
    if not finite.any():
        raise AllOutage(f"all {s.realizations} realizations have zero capacity")
    outage = ~finite
    if s.delay_budget_symbols is not None:
        outage |= delays > s.delay_budget_symbols
    vals = delays[finite]
    stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return MonteCarloResult(
        mean_delay=float(np.mean(vals)),
        stderr=stderr,
        outage_frac=float(np.mean(outage)),
        n_finite=int(vals.size),
        rho_used=rho,
        slots=slots,
        delays=delays,
        sinr=rs.sinr,
    )


def monte_carlo_capacity(s: Scenario) -> tuple[float, float]:
    """Mean and standard error of the capacity upper bound of the direct link."""
    rs = simulate(s.replace(relay=None))
    vals = np.array([
        capacity_upper_bound(sig, row, rs.noise_w, s.capacity_spec)
        for sig, row in zip(rs.signal_w, rs.interferer_powers_w)
    ])
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return float(np.mean(vals)), se


@dataclass(frozen=True)
class MeanLink:
    """Direct-link ratios at unit mean fading gain (E|h|^2 = 1)."""

    signal_w: float
    interference_w: float
    noise_w: float

    @property
    def snr(self) -> float:
        return self.signal_w / self.noise_w

    @property
    def sir(self) -> float:
        return self.signal_w / self.interference_w if self.interference_w > 0 else math.inf

    @property
    def sinr(self) -> float:
        return self.signal_w / (self.interference_w + self.noise_w)


def mean_link(s: Scenario) -> MeanLink:
    ch = s.channel
    geom = link_geometry(s.bs, s.receiver, ch)
    i_w = sum(itf.power_w * link_geometry(itf.position, s.receiver, ch).gain for itf in s.interferers)
    return MeanLink(s.tx_power_w * geom.gain, float(i_w), s.noise_power_w())
