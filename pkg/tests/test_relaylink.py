import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from g2u_latency.channel import ChannelParams, link_budget
from g2u_latency.errors import ConfigError, DeadInput
from g2u_latency.geometry import Position3D
from g2u_latency.relaylink import (
    RelayConfig, af_cascade_sinr, af_normalization_gain, direct_sinr, dualhop_sinr,
)

import oracles

ratio = st.floats(1e-6, 1e8)


@pytest.mark.parametrize("lam1, lam2", [(1.0, 1.0), (10.0, 3.0), (100.0, 50.0)])
def test_cascade_against_symbol_simulation(lam1, lam2):
    emp = oracles.af_chain_sinr(lam1, lam2, 1_000_000, seed=11)
    assert af_cascade_sinr(lam1, lam2) == pytest.approx(emp, rel=0.01)


def test_cascade_limits():
    assert af_cascade_sinr(math.inf, 4.0) == 4.0
    assert af_cascade_sinr(4.0, math.inf) == 4.0
    assert af_cascade_sinr(math.inf, math.inf) == math.inf
    assert af_cascade_sinr(0.0, 5.0) == 0.0
    assert af_cascade_sinr(3.0, 7.0, noise_at_relay=False) == 7.0


def test_cascade_vectorized():
    out = af_cascade_sinr(np.array([1.0, 10.0]), np.array([1.0, 3.0]))
    assert out == pytest.approx([1 / 3, 30 / 14])


@given(ratio, ratio)
def test_noisy_relay_below_both_hops(l1, l2):
    assert af_cascade_sinr(l1, l2) < min(l1, l2)


@given(ratio, ratio, st.floats(1.01, 10))
def test_cascade_monotone(l1, l2, f):
    assert af_cascade_sinr(l1 * f, l2) >= af_cascade_sinr(l1, l2)
    assert af_cascade_sinr(l1, l2 * f) >= af_cascade_sinr(l1, l2)


def test_normalization_gain():
    assert af_normalization_gain(3.0, 1.0, 4.0) == 1.0
    with pytest.raises(DeadInput):
        af_normalization_gain(0.0, 0.0, 1.0)


def test_relay_config_power():
    assert RelayConfig(Position3D(0, 0, 50), power_dbm=30, gain_db=-3).tx_power_w == pytest.approx(10**-0.3)
    with pytest.raises(ConfigError):
        RelayConfig(Position3D(0, 0, 50), gain_db=math.inf)


def test_dualhop_from_budgets():
    p = ChannelParams()
    relay = Position3D(0, 50, 50)
    cfg = RelayConfig(relay)
    n = p.noise_power_w
    h1 = link_budget(Position3D(0, 0, 0), relay, 1.0, p)
    h2 = link_budget(relay, Position3D(0, 250, 250), cfg.tx_power_w, p)
    lam1, lam2 = h1.signal_w / n, h2.signal_w / (1e-12 + n)
    assert dualhop_sinr(h1, h2, 1e-12, cfg, n) == pytest.approx(lam1 * lam2 / (lam1 + lam2 + 1))
    cfg_i = RelayConfig(relay, interference_at_relay=True)
    assert dualhop_sinr(h1, h2, 1e-12, cfg_i, n, interference_at_relay=1e-12) < dualhop_sinr(h1, h2, 1e-12, cfg, n)


def test_direct_sinr():
    assert direct_sinr(2.0, 1.0, 1.0) == 1.0
    with pytest.raises(ConfigError):
        direct_sinr(1.0, 0.0, 0.0)
