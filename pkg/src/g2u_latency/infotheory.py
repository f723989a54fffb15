"""Reliability-constrained bounds: Gallager E0, sphere-packing exponent,
minimum codeword length, capacity upper bound and minimum transmit power.

All rates and exponents are in nats; information bits are converted with
B_nats = B ln 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .channel import LinkGeometry
from .errors import ConfigError, InfeasibleDelay
from .search import golden_section_minimize
from .specfun import meijer_g_ln1p

RHO_GRID = np.linspace(0.0, 1.0, 201)


@dataclass(frozen=True)
class ReliabilitySpec:
    """Target error probability, payload size and Gallager parameter handling.

    ``rho_mode`` is ``"fixed"`` (use ``rho``) or ``"optimize"`` (pick the
    grid value that minimizes the bound).
    """

    phi_e: float = 1e-4
    info_bits: int = 256
    rho: float = 1.0
    rho_mode: str = "fixed"

    def __post_init__(self):
        if not 0 < self.phi_e <= 1:
            raise ConfigError(f"phi_e must be in (0, 1], got {self.phi_e}")
        if self.info_bits < 1:
            raise ConfigError("info_bits must be >= 1")
        if not 0 <= self.rho <= 1:
            raise ConfigError(f"rho must be in [0, 1], got {self.rho}")
        if self.rho_mode not in ("fixed", "optimize"):
            raise ConfigError(f"rho_mode must be 'fixed' or 'optimize', got {self.rho_mode!r}")

    @property
    def b_nats(self) -> float:
        return self.info_bits * math.log(2.0)

    def numerator(self, rho):
        return rho * self.b_nats - math.log(self.phi_e)


@dataclass(frozen=True)
class DelayBound:
    d_c_min: float
    rho_used: float
    sinr_used: float
    slots_factor: int = 1

    @property
    def zero_capacity(self) -> bool:
        return math.isinf(self.d_c_min)

    @property
    def total_symbols(self) -> float:
        return self.d_c_min * self.slots_factor


@dataclass(frozen=True)
class CapacityBoundSpec:
    """Block structure of the capacity bound.

    ``t_c`` symbols per coherence block, ``n_p`` symbols per packet, ``zeta``
    the additive residual. ``interference_symbol_model`` selects how
    E||s_I||^2 is handled: ``"constant_unit"`` or ``"gaussian_codebook"``.
    """

    t_c: int = 16
    n_p: int = 256
    zeta: float = 0.0
    interference_symbol_model: str = "constant_unit"
    codebook_draws: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.t_c < 1 or self.n_p < 1:
            raise ConfigError("t_c and n_p must be >= 1")
        if self.n_p % self.t_c:
            raise ConfigError(f"n_p ({self.n_p}) must be a multiple of t_c ({self.t_c})")
        if self.zeta < 0:
            raise ConfigError("zeta must be >= 0")
        if self.interference_symbol_model not in ("constant_unit", "gaussian_codebook"):
            raise ConfigError(f"unknown interference_symbol_model {self.interference_symbol_model!r}")

    @property
    def blocks(self) -> int:
        return self.n_p // self.t_c


def gallager_e0(rho, sinr):
    """E0(rho) = rho ln(1 + sinr / (1 + rho)) for Gaussian input."""
    rho = np.asarray(rho, dtype=float)
    sinr = np.asarray(sinr, dtype=float)
    out = rho * np.log1p(sinr / (1.0 + rho))
    return float(out) if out.ndim == 0 else out


def _sp_maximize(rate: float, sinr: float) -> tuple[float, float]:
    vals = gallager_e0(RHO_GRID, sinr) - RHO_GRID * rate
    i = int(np.argmax(vals))
    lo = RHO_GRID[max(i - 1, 0)]
    hi = RHO_GRID[min(i + 1, len(RHO_GRID) - 1)]
    res = golden_section_minimize(lambda r: -(gallager_e0(r, sinr) - r * rate), lo, hi, tol=1e-12)
    if -res.fx >= vals[i]:
        return res.x, -res.fx
    return float(RHO_GRID[i]), float(vals[i])


def sphere_packing_exponent(rate: float, sinr: float) -> float:
    """max over rho in [0, 1] of E0(rho) - rho * rate, clamped at 0."""
    if rate < 0:
        raise ValueError("rate must be >= 0")
    _, val = _sp_maximize(rate, sinr)
    return max(val, 0.0)


def error_probability_estimate(d_c: float, rate: float, sinr: float) -> float:
    """exp(-d_c E(R)) clamped to [0, 1]."""
    if not d_c > 0:
        raise ValueError("d_c must be > 0")
    e = sphere_packing_exponent(rate, sinr)
    if math.isinf(d_c):
        return 0.0 if e > 0 else 1.0
    return min(1.0, max(0.0, math.exp(-d_c * e)))


def _delay_ratio(num, denom):
    num = np.asarray(num, dtype=float)
    denom = np.asarray(denom, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / denom
    # zero demand is met immediately, even on a zero-capacity channel
    return np.where(num == 0, 0.0, np.where(denom == 0, np.inf, out))


def min_delay(spec: ReliabilitySpec, sinr: float) -> DelayBound:
    """Minimum codeword length (symbols) meeting the reliability target.

    d_c = (rho B_nats - ln phi_e) / ln(1 + sinr). The denominator is the
    G^{1,2}_{2,2} form of ln(1 + sinr). A zero-capacity channel yields an
    infinite bound rather than an exception.
    """
    if sinr < 0:
        raise ValueError("sinr must be >= 0")
    denom = meijer_g_ln1p(sinr)
    if spec.rho_mode == "fixed":
        rho = spec.rho
        d = float(_delay_ratio(spec.numerator(rho), denom))
    else:
        ds = _delay_ratio(spec.numerator(RHO_GRID), denom)
        i = int(np.argmin(ds))
        rho, d = float(RHO_GRID[i]), float(ds[i])
    return DelayBound(d, rho, float(sinr))


def min_delay_array(spec: ReliabilitySpec, sinr) -> tuple[np.ndarray, float]:
    """Vectorized ``min_delay``; returns (delays, rho_used)."""
    sinr = np.asarray(sinr, dtype=float)
    if spec.rho_mode == "fixed":
        rho = spec.rho
    else:
        # numerator is increasing in rho, so the grid minimum sits at rho = 0
        # for every positive sinr; keep the scan explicit for the record
        rho = float(RHO_GRID[int(np.argmin(spec.numerator(RHO_GRID)))])
    return _delay_ratio(spec.numerator(rho), np.log1p(sinr)), rho


def min_delay_exponent(spec: ReliabilitySpec, sinr: float, rho_max: float = 1.0) -> float:
    """Smallest d with exp(-d E(B_nats / d)) <= phi_e, using the sphere-packing
    exponent built from ``gallager_e0``. Returns ``inf`` for sinr = 0."""
    if sinr <= 0:
        return math.inf
    target = -math.log(spec.phi_e)
    if target == 0:
        return 0.0
    cap = math.log1p(sinr)

    def excess(d):
        return d * sphere_packing_exponent(spec.b_nats / d, sinr) - target

    lo = spec.b_nats / cap
    hi = 2 * lo + target / cap
    while excess(hi) < 0:
        hi *= 2
    return optimize.brentq(excess, lo, hi, xtol=1e-10, rtol=1e-12)


def capacity_upper_bound(signal_w: float, interference_w: Sequence[float], noise_w: float,
                         spec: CapacityBoundSpec) -> float:
    """Upper bound on the achievable rate (nats/symbol) of the interfered link.

    ``signal_w`` is P_u d^-alpha |h|^2 and ``interference_w`` holds each
    interferer's P_I d^-alpha |h_I|^2 at the receiver. Under
    ``gaussian_codebook`` the per-block interference symbol powers are
    unit-mean exponential draws, seeded per block from ``spec.seed``.
    """
    interference_w = np.asarray(list(interference_w), dtype=float)
    head = (spec.t_c - 1) / spec.t_c * math.log1p(signal_w / noise_w)
    if interference_w.size == 0:
        per_block = np.full(spec.blocks, math.log1p(signal_w / noise_w))
    elif spec.interference_symbol_model == "constant_unit":
        per_block = np.full(spec.blocks, math.log1p(signal_w / (interference_w.sum() + noise_w)))
    else:
        per_block = np.empty(spec.blocks)
        for j in range(spec.blocks):
            rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(j,)))
            s2 = rng.exponential(1.0, size=(spec.codebook_draws, interference_w.size))
            per_block[j] = np.mean(np.log1p(signal_w / (s2 @ interference_w + noise_w)))
    return float(head + per_block.sum() / spec.n_p + spec.zeta)


def min_power(spec: ReliabilitySpec, d_max: float, geom: LinkGeometry, interference_w: float,
              noise_w: float, fading_gain_sq: float = 1.0, offset: str = "normalized") -> float:
    """Minimum transmit power (W) meeting ``d_max`` symbols at reliability phi_e.

    The required SINR is (1 + rho) exp((rho B_nats - ln phi_e) / d_max) - 1.
    ``offset="normalized"`` scales it by (I + N) and the inverse link gain.
    ``offset="literal"`` subtracts the unit term in watts after the (I + N)
    product, i.e. {(1 + rho) e^x (I + N) - 1} / (d^-alpha |h|^2). Both are
    clamped at 0.
    """
    if not d_max > 0:
        raise InfeasibleDelay(f"d_max must be > 0, got {d_max}")
    rho = spec.rho if spec.rho_mode == "fixed" else 0.0
    growth = (1.0 + rho) * math.exp(spec.numerator(rho) / d_max)
    total = interference_w + noise_w
    if offset == "normalized":
        bracket = (growth - 1.0) * total
    elif offset == "literal":
        bracket = growth * total - 1.0
    else:
        raise ConfigError(f"unknown min_power offset {offset!r}")
    return max(bracket, 0.0) / (geom.gain * fading_gain_sq)
