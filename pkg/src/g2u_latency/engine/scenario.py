"""Scenario description, presets and the JSON scenario-file schema."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..channel import ChannelParams, link_geometry
from ..errors import ConfigError, UnknownCase
from ..geometry import Position3D
from ..infotheory import CapacityBoundSpec, ReliabilitySpec
from ..relaylink import RelayConfig
from ..units import db_to_lin, dbm_to_w

REGIMES = ("interference_limited", "noise_plus_interference")
NOISE_FLOOR_W = 1e-30

BS_POSITION = Position3D(0.0, 0.0, 0.0)
INTERFERER_POSITION = Position3D(0.0, 500.0, 0.0)
CASE_Y = {1: 0.0, 2: 250.0, 3: 500.0}
# relay location index 1..5 of the joint placement study
RELAY_INDEX_POSITIONS = (
    Position3D(0.0, -50.0, 50.0),
    Position3D(0.0, 0.0, 50.0),
    Position3D(0.0, 50.0, 50.0),
    Position3D(0.0, 100.0, 50.0),
    Position3D(0.0, 150.0, 50.0),
)


@dataclass(frozen=True)
class Interferer:
    position: Position3D
    power_dbm: float = 30.0

    @property
    def power_w(self) -> float:
        return float(dbm_to_w(self.power_dbm))


@dataclass(frozen=True)
class Scenario:
    """Full experiment description.

    ``target_avg_snr_db`` pins the mean received SNR of the direct
    BS-to-receiver link by setting the receiver noise power; interference
    powers are left untouched. ``delay_budget_symbols`` marks realizations
    whose delay exceeds it as outages.
    """

    bs: Position3D = BS_POSITION
    receiver: Position3D = Position3D(0.0, 0.0, 100.0)
    relay: RelayConfig | None = None
    interferers: tuple[Interferer, ...] = (Interferer(INTERFERER_POSITION),)
    channel: ChannelParams = field(default_factory=ChannelParams)
    reliability: ReliabilitySpec = field(default_factory=ReliabilitySpec)
    capacity_spec: CapacityBoundSpec = field(default_factory=CapacityBoundSpec)
    tx_power_dbm: float = 30.0
    channel_regime: str = "noise_plus_interference"
    target_avg_snr_db: float | None = None
    seed: int = 0
    realizations: int = 1000
    delay_budget_symbols: float | None = None
    per_slot: bool = False

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.channel_regime not in REGIMES:
            raise ConfigError(f"channel_regime must be one of {REGIMES}, got {self.channel_regime!r}")
        if self.bs.z != 0:
            raise ConfigError("the base station must be on the ground (z = 0)")
        if any(i.position.z != 0 for i in self.interferers):
            raise ConfigError("interferers must be on the ground (z = 0)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.delay_budget_symbols is not None and not self.delay_budget_symbols > 0:
            raise ConfigError("delay_budget_symbols must be > 0")

    @property
    def tx_power_w(self) -> float:
        return float(dbm_to_w(self.tx_power_dbm))

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def with_receiver_height(self, z: float) -> "Scenario":
        return self.replace(receiver=self.receiver.moved(z=z))

    def with_relay_position(self, pos: Position3D) -> "Scenario":
        if self.relay is None:
            raise ConfigError("scenario has no relay")
        return self.replace(relay=dataclasses.replace(self.relay, position=pos))

    def noise_power_w(self) -> float:
        """Receiver (and relay input) noise power for this scenario."""
        if self.channel_regime == "interference_limited":
            return NOISE_FLOOR_W
        if self.target_avg_snr_db is not None:
            geom = link_geometry(self.bs, self.receiver, self.channel)
            return max(self.tx_power_w * geom.gain / float(db_to_lin(self.target_avg_snr_db)), NOISE_FLOOR_W)
        return self.channel.noise_power_w


def preset_case(case_id: int, height: float, **overrides) -> Scenario:
    """Receiver above the BS (1), at the BS-interferer midpoint (2) or above
    the interferer (3), at the given height."""
    if case_id not in CASE_Y:
        raise UnknownCase(f"unknown case {case_id!r}; expected 1, 2 or 3")
    if not height > 0:
        raise ConfigError("height must be > 0")
    return Scenario(receiver=Position3D(0.0, CASE_Y[case_id], float(height)), **overrides)


def preset_relay(height: float = 250.0, relay_position: Position3D = RELAY_INDEX_POSITIONS[2],
                 noise_at_relay: bool = False, target_avg_snr_db: float | None = -2.0,
                 gain_db: float = -3.0, **overrides) -> Scenario:
    """Relayed link: receiver at (0, 250, height), relay re-transmitting at
    30 dBm with ``gain_db``, end-to-end mean SNR pinned at -2 dB."""
    relay = RelayConfig(relay_position, power_dbm=30.0, gain_db=gain_db, noise_at_relay=noise_at_relay)
    return Scenario(
        receiver=Position3D(0.0, 250.0, float(height)),
        relay=relay,
        target_avg_snr_db=target_avg_snr_db,
        **overrides,
    )


# --------------------------------------------------------------------------
# scenario file
# --------------------------------------------------------------------------

_NODE_KEYS = {"x_m", "y_m", "z_m"}
_TOP_KEYS = {"nodes", "channel", "reliability", "capacity", "run"}
_NODES_KEYS = {"bs", "receiver", "relay", "interferers", "tx_power_dbm"}
_RELAY_KEYS = _NODE_KEYS | {"power_dbm", "gain_db", "noise_at_relay", "interference_at_relay"}
_INTERFERER_KEYS = _NODE_KEYS | {"power_dbm"}
_RUN_KEYS = {"seed", "realizations", "regime", "target_avg_snr_db", "delay_budget_symbols", "per_slot"}


def _check_keys(section: str, obj: Any, allowed: set[str], required: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{section}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"{section}: missing keys {sorted(missing)}")


def _position(section: str, obj: dict, allowed=_NODE_KEYS) -> Position3D:
    _check_keys(section, obj, allowed, {"x_m", "y_m"})
    return Position3D(float(obj["x_m"]), float(obj["y_m"]), float(obj.get("z_m", 0.0)))


def _dataclass_from(section: str, cls, obj: dict | None):
    obj = obj or {}
    names = {f.name for f in dataclasses.fields(cls)}
    _check_keys(section, obj, names)
    try:
        return cls(**obj)
    except TypeError as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def scenario_from_dict(doc: dict) -> Scenario:
    _check_keys("scenario", doc, _TOP_KEYS, {"nodes"})
    nodes = doc["nodes"]
    _check_keys("nodes", nodes, _NODES_KEYS, {"receiver"})
    relay = None
    if nodes.get("relay") is not None:
        r = nodes["relay"]
        _check_keys("nodes.relay", r, _RELAY_KEYS)
        relay = RelayConfig(
            _position("nodes.relay", {k: r[k] for k in _NODE_KEYS & set(r)}),
            power_dbm=float(r.get("power_dbm", 30.0)),
            gain_db=float(r.get("gain_db", -3.0)),
            noise_at_relay=bool(r.get("noise_at_relay", True)),
            interference_at_relay=bool(r.get("interference_at_relay", False)),
        )
    interferers = []
    for k, it in enumerate(nodes.get("interferers", [dict(x_m=0.0, y_m=500.0, z_m=0.0, power_dbm=30.0)])):
        _check_keys(f"nodes.interferers[{k}]", it, _INTERFERER_KEYS)
        pos = _position(f"nodes.interferers[{k}]", {key: it[key] for key in _NODE_KEYS & set(it)})
        interferers.append(Interferer(pos, float(it.get("power_dbm", 30.0))))
    run = doc.get("run") or {}
    _check_keys("run", run, _RUN_KEYS)
    bs = _position("nodes.bs", nodes["bs"]) if "bs" in nodes else BS_POSITION
    regime = str(run.get("regime", "noise_plus_interference")).replace("-", "_")
    return Scenario(
        bs=bs,
        receiver=_position("nodes.receiver", nodes["receiver"]),
        relay=relay,
        interferers=tuple(interferers),
        channel=_dataclass_from("channel", ChannelParams, doc.get("channel")),
        reliability=_dataclass_from("reliability", ReliabilitySpec, doc.get("reliability")),
        capacity_spec=_dataclass_from("capacity", CapacityBoundSpec, doc.get("capacity")),
        tx_power_dbm=float(nodes.get("tx_power_dbm", 30.0)),
        channel_regime=regime,
        target_avg_snr_db=run.get("target_avg_snr_db"),
        seed=int(run.get("seed", 0)),
        realizations=int(run.get("realizations", 1000)),
        delay_budget_symbols=run.get("delay_budget_symbols"),
        per_slot=bool(run.get("per_slot", False)),
    )


def _node(p: Position3D) -> dict:
    return {"x_m": p.x, "y_m": p.y, "z_m": p.z}


def scenario_to_dict(s: Scenario) -> dict:
    """Fully resolved scenario in the file schema (used for --meta sidecars)."""
    relay = None
    if s.relay is not None:
        relay = _node(s.relay.position) | {
            "power_dbm": s.relay.power_dbm,
            "gain_db": s.relay.gain_db,
            "noise_at_relay": s.relay.noise_at_relay,
            "interference_at_relay": s.relay.interference_at_relay,
        }
    return {
        "nodes": {
            "bs": _node(s.bs),
            "receiver": _node(s.receiver),
            "relay": relay,
            "interferers": [_node(i.position) | {"power_dbm": i.power_dbm} for i in s.interferers],
            "tx_power_dbm": s.tx_power_dbm,
        },
        "channel": dataclasses.asdict(s.channel),
        "reliability": dataclasses.asdict(s.reliability),
        "capacity": dataclasses.asdict(s.capacity_spec),
        "run": {
            "seed": s.seed,
            "realizations": s.realizations,
            "regime": s.channel_regime,
            "target_avg_snr_db": s.target_avg_snr_db,
            "delay_budget_symbols": s.delay_budget_symbols,
            "per_slot": s.per_slot,
        },
    }


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    for v in _walk_numbers(doc):
        if isinstance(v, float) and not math.isfinite(v):
            raise ConfigError(f"{path}: non-finite number in scenario")
    return scenario_from_dict(doc)


def _walk_numbers(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _walk_numbers(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _walk_numbers(v)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        yield obj
