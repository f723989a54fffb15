import json
import math
import warnings

import numpy as np
import pytest

from g2u_latency.channel import ChannelParams, link_geometry
from g2u_latency.engine import (
    CSV_COLUMNS, RELAY_INDEX_POSITIONS, Interferer, Scenario, SweepResult, SweepRow, evaluate_point,
    load_scenario, mean_link, monte_carlo_capacity, monte_carlo_delay, optimize_relay, power_vs_delay,
    preset_case, preset_relay, scenario_from_dict, scenario_to_dict, simulate, sweep_height,
    sweep_relay, sweep_snr, to_csv, to_rows_json, unimodality_violations,
)
from g2u_latency.engine.montecarlo import realization_normals
from g2u_latency.errors import AllOutage, ConfigError, NotUnimodal, UnknownCase
from g2u_latency.geometry import Position3D
from g2u_latency.infotheory import ReliabilitySpec, min_delay
from g2u_latency.relaylink import RelayConfig

import oracles

PURE_LOS = ChannelParams(k_ground_min_db=100, k_ground_max_db=100, k_air_min_db=100, k_air_max_db=100)


# presets and schema

@pytest.mark.parametrize("case, h, expected", [
    (1, 100.0, (0.0, 0.0, 100.0)), (2, 250.0, (0.0, 250.0, 250.0)), (3, 100.0, (0.0, 500.0, 100.0)),
])
def test_preset_case_positions(case, h, expected):
    s = preset_case(case, h)
    assert s.receiver.as_tuple() == expected
    assert s.bs.as_tuple() == (0.0, 0.0, 0.0)
    assert [i.position.as_tuple() for i in s.interferers] == [(0.0, 500.0, 0.0)]
    assert s.interferers[0].power_dbm == 30.0 and s.realizations == 1000


def test_preset_errors():
    with pytest.raises(UnknownCase):
        preset_case(4, 100.0)
    with pytest.raises(ConfigError):
        preset_case(1, 0.0)


def test_scenario_validation():
    with pytest.raises(ConfigError):
        Scenario(realizations=0)
    with pytest.raises(ConfigError):
        Scenario(channel_regime="quiet")
    with pytest.raises(ConfigError):
        Scenario(bs=Position3D(0, 0, 10))
    with pytest.raises(ConfigError):
        Scenario(seed=-1)


def test_noise_regimes():
    s = preset_case(1, 100.0)
    assert s.noise_power_w() == pytest.approx(ChannelParams().noise_power_w)
    assert s.replace(channel_regime="interference_limited").noise_power_w() == 1e-30
    pinned = s.replace(target_avg_snr_db=20.0)
    assert mean_link(pinned).snr == pytest.approx(100.0, rel=1e-12)


def test_scenario_round_trip(tmp_path):
    s = preset_relay(height=300.0, noise_at_relay=True, seed=9, realizations=50)
    doc = scenario_to_dict(s)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert load_scenario(path) == s


def test_scenario_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    with pytest.raises(ConfigError):
        scenario_from_dict({"nodes": {"receiver": {"x_m": 0, "y_m": 0, "z_m": 10}}, "extra": 1})
    with pytest.raises(ConfigError):
        scenario_from_dict({"nodes": {"receiver": {"x_m": 0, "y_m": 0, "height": 10}}})
    with pytest.raises(ConfigError):
        scenario_from_dict({"nodes": {"receiver": {"x_m": 0, "y_m": 0, "z_m": 10}}, "channel": {"bogus_db": 1}})
    nan = tmp_path / "nan.json"
    nan.write_text('{"nodes": {"receiver": {"x_m": 0, "y_m": 0, "z_m": NaN}}}')
    with pytest.raises(ConfigError):
        load_scenario(nan)


def test_minimal_scenario_file_defaults():
    s = scenario_from_dict({"nodes": {"receiver": {"x_m": 0, "y_m": 250, "z_m": 250}}})
    assert s == preset_case(2, 250.0)


# Monte Carlo

def test_normals_cached_and_read_only():
    g = realization_normals(3, 10, 4)
    assert g is realization_normals(3, 10, 4)
    assert not g.flags.writeable
    # realization k does not depend on how many realizations are requested
    assert np.array_equal(realization_normals(3, 5, 4), g[:5])


def test_deterministic_fading_single_realization():
    s = preset_case(1, 100.0, channel=PURE_LOS, realizations=1)
    ml = mean_link(s)
    mc = monte_carlo_delay(s)
    assert mc.mean_delay == pytest.approx(min_delay(s.reliability, ml.sinr).d_c_min, rel=1e-4)
    assert mc.stderr == 0.0


def test_monte_carlo_bit_identical():
    s = preset_case(2, 250.0, seed=5, realizations=300)
    a, b = monte_carlo_delay(s), monte_carlo_delay(s)
    assert a.mean_delay == b.mean_delay and np.array_equal(a.delays, b.delays)


def test_monte_carlo_matches_quadrature_oracle():
    s = preset_case(1, 100.0, seed=42)
    mc = monte_carlo_delay(s)
    _, g, k = oracles.link((0, 0, 0), (0, 0, 100))
    _, gi, ki = oracles.link((0, 500, 0), (0, 0, 100))
    expected = oracles.expected_delay_quadrature(
        s.tx_power_w * g, k, s.interferers[0].power_w * gi, ki, s.noise_power_w(), s.reliability.numerator(1.0))
    assert abs(mc.mean_delay - expected) < 3 * mc.stderr


def test_outage_fraction_decreases_with_power():
    s = preset_case(2, 250.0, delay_budget_symbols=400.0)
    fr = [monte_carlo_delay(s.replace(tx_power_dbm=p)).outage_frac for p in (20.0, 30.0, 40.0)]
    assert all(0.0 <= f <= 1.0 for f in fr)
    assert fr[0] > fr[1] > fr[2]


def test_all_outage():
    s = preset_case(1, 100.0, tx_power_dbm=-math.inf, realizations=5)
    with pytest.raises(AllOutage):
        monte_carlo_delay(s)


def test_relay_doubles_slots_unless_per_slot():
    s = preset_relay(realizations=50)
    two = monte_carlo_delay(s)
    one = monte_carlo_delay(s.replace(per_slot=True))
    assert two.slots == 2 and one.slots == 1
    assert two.mean_delay == pytest.approx(2 * one.mean_delay)


def test_relay_at_receiver_is_direct_link():
    s = preset_relay(realizations=50)
    at_rx = s.with_relay_position(s.receiver)
    assert monte_carlo_delay(at_rx).mean_delay == monte_carlo_delay(s.replace(relay=None)).mean_delay


def test_noise_free_relay_uses_second_hop_only():
    s = preset_relay(realizations=20, channel=PURE_LOS)
    rs = simulate(s)
    hop2 = link_geometry(s.relay.position, s.receiver, s.channel)
    expected = s.relay.tx_power_w * hop2.gain / (rs.interference_w + rs.noise_w)
    assert rs.sinr == pytest.approx(expected, rel=1e-4)


def test_capacity_metric():
    s = preset_case(2, 250.0, realizations=40)
    cap, se = monte_carlo_capacity(s)
    assert cap > 0 and se >= 0


def test_coherent_and_shadowing_options_run():
    ch = ChannelParams(shadowing=True, interference_sum="coherent")
    s = preset_case(3, 200.0, channel=ch, realizations=100, interferers=(Interferer(Position3D(0, 500, 0)),) * 2)
    r = monte_carlo_delay(s)
    assert math.isfinite(r.mean_delay)


# sweeps

def test_sweep_height_rows_and_grid_checks():
    s = preset_case(1, 100.0, realizations=50)
    res = sweep_height(s, [50.0, 100.0, 150.0])
    assert res.column("swept_value") == [50.0, 100.0, 150.0]
    assert all(r.delay_seconds == pytest.approx(r.delay_symbols / 1e6) for r in res.rows)
    with pytest.raises(ConfigError):
        sweep_height(s, [100.0, 50.0])
    with pytest.raises(ConfigError):
        sweep_height(s, [])
    with pytest.raises(ConfigError):
        evaluate_point(s, 0.0, metric="energy")


def test_sweep_threads_do_not_change_results():
    s = preset_case(3, 100.0, realizations=200, seed=4)
    grid = [50.0, 100.0, 200.0, 400.0]
    assert to_csv(sweep_height(s, grid, jobs=1)) == to_csv(sweep_height(s, grid, jobs=4))


def test_sweep_snr_spot_value_and_shape():
    res = sweep_snr(preset_case(1, 100.0), np.linspace(0, 50, 21))
    d = np.array(res.column("delay_symbols"))
    assert d[12] == pytest.approx(27.017317093692398, rel=1e-12)  # 30 dB
    assert np.all(np.diff(d) < 0)
    assert np.all(np.array(res.meta["second_diff"]) > 0)


def test_sweep_snr_with_interference():
    s = preset_case(1, 100.0, realizations=100)
    res = sweep_snr(s, [10.0, 20.0], include_interference=True)
    assert res.rows[0].delay_symbols > res.rows[1].delay_symbols


def test_power_vs_delay():
    s = preset_case(2, 250.0)
    out = power_vs_delay(s, [30.0, 60.0, 120.0, 240.0], [-10.0, 0.0])
    assert [r.series for r in out] == ["nip_-10dB", "nip_0dB"]
    for res in out:
        p = np.array(res.column("p_min_dbm"))
        assert np.all(np.diff(p) < 0)
        assert np.all(np.diff(p, 2) >= 0)
    assert all(a < b for a, b in zip(out[0].column("p_min_dbm"), out[1].column("p_min_dbm")))
    with pytest.raises(ConfigError):
        power_vs_delay(s.replace(interferers=()), [10.0], [0.0])


def test_sweep_relay_surface():
    s = preset_relay(realizations=100)
    out = sweep_relay(s, list(RELAY_INDEX_POSITIONS), [100.0, 300.0, 500.0])
    assert [r.series for r in out] == [f"relay_{k}" for k in range(1, 6)] + ["direct"]
    assert all(len(r.rows) == 3 for r in out)
    with pytest.raises(ConfigError):
        sweep_relay(s.replace(relay=None), list(RELAY_INDEX_POSITIONS), [100.0])


def test_relay_index_trend_has_improvement():
    s = preset_relay(seed=1)
    d = [monte_carlo_delay(s.with_relay_position(p)).mean_delay for p in RELAY_INDEX_POSITIONS]
    # moving toward the region between BS and receiver improves the delay
    assert d[-1] < d[0]


# relay placement

def test_unimodality_violations():
    assert unimodality_violations([5, 3, 1, 2, 4]) == 0
    assert unimodality_violations([5, 3, 4, 1, 2]) == 1
    assert unimodality_violations([1, 2, 3]) == 0


def test_symmetric_relay_optimum_at_midpoint():
    ch = PURE_LOS
    s = Scenario(
        receiver=Position3D(0.0, 400.0, 0.0),
        relay=RelayConfig(Position3D(0.0, 0.0, 50.0), power_dbm=30.0, gain_db=0.0, noise_at_relay=True),
        interferers=(), channel=ch, realizations=50,
    )
    opt = optimize_relay(s, (-100.0, 500.0, 50.0))
    assert opt.unimodal
    step = 600.0 / 40
    assert abs(opt.position.y - 200.0) <= step
    assert opt.delay <= opt.coarse_delay


def test_optimize_relay_warns_when_not_unimodal(monkeypatch):
    from g2u_latency.engine import sweeps

    class Fake:
        def __init__(self, y):
            self.mean_delay = 10.0 + math.sin(y / 20.0)

    monkeypatch.setattr(sweeps, "monte_carlo_delay", lambda sc: Fake(sc.relay.position.y))
    with pytest.warns(NotUnimodal):
        opt = optimize_relay(preset_relay(), (-250.0, 500.0, 50.0))
    assert not opt.unimodal and opt.violations > 1
    assert opt.delay == min(opt.profile_delay) and opt.evaluations == 41


def test_noisy_relay_profile_prefers_bs_side():
    # with noise amplified at the relay the first hop matters, pulling the optimum toward the BS
    opt = optimize_relay(preset_relay(noise_at_relay=True, realizations=200), (-250.0, 500.0, 50.0))
    assert opt.unimodal
    assert 0.0 < opt.position.y < 250.0


def test_optimize_relay_errors():
    with pytest.raises(ConfigError):
        optimize_relay(preset_case(1, 100.0), (0.0, 1.0, 50.0))
    with pytest.raises(ConfigError):
        optimize_relay(preset_relay(), (10.0, 10.0, 50.0))


# results

def test_csv_format():
    res = SweepResult("x", [SweepRow(1.0, delay_symbols=math.inf), SweepRow(2.0, delay_symbols=0.1)])
    text = to_csv(res)
    lines = text.split("\r\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("1.0,inf,")
    assert lines[2].startswith("2.0,0.1,")
    multi = to_csv([SweepResult("x", [SweepRow(1.0)], series="a,b")])
    assert multi.split("\r\n")[1].startswith('"a,b",1.0')


def test_json_rows():
    res = SweepResult("x", [SweepRow(1.0, delay_symbols=math.inf, meta={"k": 1})], series="s")
    rows = json.loads(to_rows_json(res))
    assert rows == [{"swept_name": "x", "series": "s", "swept_value": 1.0, "delay_symbols": "inf",
                     "delay_seconds": None, "delay_stderr": None, "outage_frac": None, "sinr_db": None,
                     "sir_db": None, "p_min_dbm": None, "rho_used": None, "meta": {"k": 1}}]


def test_sweep_result_requires_ascending():
    with pytest.raises(ConfigError):
        SweepResult("x", [SweepRow(2.0), SweepRow(1.0)])
