"""Amplify-and-forward dual-hop composition."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget
from .errors import ConfigError, DeadInput
from .geometry import Position3D
from .units import db_to_lin, dbm_to_w


@dataclass(frozen=True)
class RelayConfig:
    """Relay UAV settings.

    The re-transmit power is ``power_dbm + gain_db``. ``noise_at_relay``
    toggles the receiver noise at the relay input (and hence its
    amplification). ``interference_at_relay`` adds the interferers' power to
    the relay input noise; off by default.
    """

    position: Position3D
    power_dbm: float = 30.0
    gain_db: float = -3.0
    noise_at_relay: bool = True
    interference_at_relay: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.power_dbm) and math.isfinite(self.gain_db)):
            raise ConfigError("relay power_dbm and gain_db must be finite")

    @property
    def tx_power_w(self) -> float:
        return float(dbm_to_w(self.power_dbm) * db_to_lin(self.gain_db))


@dataclass(frozen=True)
class EndToEndBudget:
    hop1: LinkBudget | None
    hop2: LinkBudget | None
    sinr_e2e: float
    slots: int


def af_normalization_gain(hop1_rx_power: float, hop1_noise: float, p_n: float) -> float:
    """Amplitude gain that rescales the relay input to mean power ``p_n``."""
    total = hop1_rx_power + hop1_noise
    if total <= 0:
        raise DeadInput("relay input has zero total power")
    return math.sqrt(p_n / total)


def af_cascade_sinr(lam1, lam2, noise_at_relay: bool = True):
    """End-to-end SINR of an AF relay from the per-hop ratios.

    With relay noise: lam1 lam2 / (lam1 + lam2 + 1), where lam1 is the SNR at
    the relay input and lam2 the SINR of the relay-to-receiver hop. Without
    it the relay re-emits a clean signal and the result is lam2.
    Works elementwise on arrays; ``inf`` inputs are handled as limits.
    """
    lam1 = np.asarray(lam1, dtype=float)
    lam2 = np.asarray(lam2, dtype=float)
    if not noise_at_relay:
        out = lam2 * np.ones_like(lam1)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = lam1 * lam2 / (lam1 + lam2 + 1.0)
        out = np.where(np.isinf(lam1), lam2, out)
        out = np.where(np.isinf(lam2), lam1, out)
        out = np.where(np.isinf(lam1) & np.isinf(lam2), np.inf, out)
        out = np.where((lam1 == 0) | (lam2 == 0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def dualhop_sinr(hop1: LinkBudget, hop2: LinkBudget, interference_at_rx: float, cfg: RelayConfig,
                 noise_w: float, interference_at_relay: float = 0.0) -> float:
    """End-to-end SINR from two link budgets.

    ``hop2.signal_w`` must already reflect the relay re-transmit power.
    """
    relay_noise = noise_w + (interference_at_relay if cfg.interference_at_relay else 0.0)
    lam1 = hop1.signal_w / relay_noise
    lam2 = hop2.signal_w / (interference_at_rx + noise_w)
    return af_cascade_sinr(lam1, lam2, cfg.noise_at_relay)


def direct_sinr(signal_w, interference_w, noise_w):
    """signal / (interference + noise); elementwise."""
    total = np.asarray(interference_w, dtype=float) + noise_w
    if np.any(total <= 0):
        raise ConfigError("interference + noise must be positive")
    out = np.asarray(signal_w, dtype=float) / total
    return float(out) if out.ndim == 0 else out
