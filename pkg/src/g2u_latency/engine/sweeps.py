"""Parameter sweeps and relay placement search."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..channel import link_geometry
from ..errors import ConfigError, NotUnimodal
from ..geometry import Position3D
from ..infotheory import min_delay, min_power
from ..search import golden_section_minimize
from ..units import db_to_lin, lin_to_db, w_to_dbm
from .montecarlo import mean_link, monte_carlo_capacity, monte_carlo_delay
from .results import SweepResult, SweepRow
from .scenario import Scenario

METRICS = ("delay", "sir", "capacity")


def _map(fn: Callable, items: Sequence, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _check_grid(name: str, grid: Sequence[float]) -> list[float]:
    grid = [float(v) for v in grid]
    if not grid:
        raise ConfigError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"{name} grid must be strictly ascending")
    return grid


def _db(x: float) -> float:
    return float(lin_to_db(x))


def evaluate_point(s: Scenario, swept_value: float = 0.0, metric: str = "delay") -> SweepRow:
    """One row: Monte Carlo delay statistics plus mean-fading SINR and SIR."""
    if metric not in METRICS:
        raise ConfigError(f"metric must be one of {METRICS}, got {metric!r}")
    ml = mean_link(s)
    row = SweepRow(swept_value=swept_value, sinr_db=_db(ml.sinr), sir_db=_db(ml.sir))
    row.meta["snr_db"] = _db(ml.snr)
    if metric in ("delay", "capacity"):
        mc = monte_carlo_delay(s)
        row.delay_symbols = mc.mean_delay
        row.delay_seconds = mc.mean_delay / s.channel.bandwidth_hz
        row.delay_stderr = mc.stderr
        row.outage_frac = mc.outage_frac
        row.rho_used = mc.rho_used
        row.meta.update(slots=mc.slots, mc_mean_sinr_db=mc.mean_sinr_db)
        if s.relay is not None:
            # end-to-end ratio of the relayed chain replaces the direct-link one
            row.sinr_db = mc.mean_sinr_db
    if metric == "capacity":
        cap, cap_se = monte_carlo_capacity(s)
        row.meta.update(capacity_nats=cap, capacity_stderr=cap_se)
    return row


def sweep_height(s: Scenario, z_grid: Sequence[float], metric: str = "delay", jobs: int = 1) -> SweepResult:
    """Re-evaluate the scenario with the receiver moved to each height."""
    z_grid = _check_grid("height", z_grid)
    rows = _map(lambda z: evaluate_point(s.with_receiver_height(z), z, metric), z_grid, jobs)
    return SweepResult("receiver_z_m", rows, meta={"metric": metric})


def sweep_snr(s: Scenario, snr_db_grid: Sequence[float], include_interference: bool = False,
              jobs: int = 1) -> SweepResult:
    """Minimum delay against the pinned mean received SNR.

    By default each row is the closed-form bound evaluated at the mean SNR
    itself. With ``include_interference`` the noise power is pinned instead
    and the Monte Carlo delay with the scenario's interferers is reported.
    First and second differences of the delay column are attached to the
    result meta for the diminishing-returns check.
    """
    grid = _check_grid("snr_db", snr_db_grid)
    sir_db = _db(mean_link(s.replace(target_avg_snr_db=None)).sir)

    def point(snr_db: float) -> SweepRow:
        if include_interference:
            row = evaluate_point(s.replace(target_avg_snr_db=snr_db), snr_db)
            row.meta["bound_at_mean_snr"] = min_delay(s.reliability, float(db_to_lin(snr_db))).d_c_min
            return row
        b = min_delay(s.reliability, float(db_to_lin(snr_db)))
        return SweepRow(
            swept_value=snr_db,
            delay_symbols=b.d_c_min,
            delay_seconds=b.d_c_min / s.channel.bandwidth_hz,
            delay_stderr=0.0,
            outage_frac=1.0 if b.zero_capacity else 0.0,
            sinr_db=snr_db,
            sir_db=sir_db,
            rho_used=b.rho_used,
        )

    rows = _map(point, grid, jobs)
    d = np.array([r.delay_symbols for r in rows])
    return SweepResult("avg_snr_db", rows, meta={
        "first_diff": np.diff(d).tolist(),
        "second_diff": np.diff(d, 2).tolist(),
        "include_interference": include_interference,
    })


def power_vs_delay(s: Scenario, d_max_grid: Sequence[float], nip_db_list: Sequence[float],
                   offset: str = "normalized") -> list[SweepResult]:
    """Minimum BS power against the delay limit, one series per NIP level.

    NIP sets the receiver noise power relative to the (mean-fading)
    interference power, which stays fixed.
    """
    d_grid = _check_grid("d_max", d_max_grid)
    if not list(nip_db_list):
        raise ConfigError("NIP list is empty")
    if not s.interferers:
        raise ConfigError("power_vs_delay needs at least one interferer")
    geom = link_geometry(s.bs, s.receiver, s.channel)
    i_w = mean_link(s).interference_w
    out = []
    for nip_db in nip_db_list:
        n_w = i_w * float(db_to_lin(nip_db))
        rows = []
        for d_max in d_grid:
            p = min_power(s.reliability, d_max, geom, i_w, n_w, 1.0, offset=offset)
            rho = s.reliability.rho if s.reliability.rho_mode == "fixed" else 0.0
            req = p * geom.gain / (i_w + n_w)
            rows.append(SweepRow(
                swept_value=d_max,
                delay_symbols=d_max,
                delay_seconds=d_max / s.channel.bandwidth_hz,
                sinr_db=_db(req) if req > 0 else -math.inf,
                sir_db=_db(p * geom.gain / i_w) if p > 0 else -math.inf,
                p_min_dbm=float(w_to_dbm(p)) if p > 0 else -math.inf,
                rho_used=rho,
                meta={"nip_db": float(nip_db), "p_min_w": p},
            ))
        out.append(SweepResult("d_max_symbols", rows, series=f"nip_{nip_db:g}dB", meta={"nip_db": float(nip_db)}))
    return out


def sweep_relay(s: Scenario, relay_positions: Sequence[Position3D], z_grid: Sequence[float],
                include_direct: bool = True, jobs: int = 1) -> list[SweepResult]:
    """Delay against receiver height for each relay position (one series each)."""
    if s.relay is None:
        raise ConfigError("sweep_relay needs a scenario with a relay")
    z_grid = _check_grid("height", z_grid)
    out = []
    for k, pos in enumerate(relay_positions, start=1):
        res = sweep_height(s.with_relay_position(pos), z_grid, jobs=jobs)
        res.series = f"relay_{k}"
        res.meta.update(relay_position=pos.as_tuple(), noise_at_relay=s.relay.noise_at_relay)
        out.append(res)
    if include_direct:
        res = sweep_height(s.replace(relay=None), z_grid, jobs=jobs)
        res.series = "direct"
        out.append(res)
    return out


# --------------------------------------------------------------------------
# relay placement
# --------------------------------------------------------------------------

@dataclass
class RelayOptimum:
    position: Position3D
    delay: float
    coarse_position: Position3D
    coarse_delay: float
    unimodal: bool
    violations: int
    profile_y: list[float]
    profile_delay: list[float]
    evaluations: int


def unimodality_violations(values: Sequence[float]) -> int:
    """Steps that go against a single-minimum (decrease then increase) shape."""
    v = np.asarray(values, dtype=float)
    i = int(np.argmin(v))
    d = np.diff(v)
    return int(np.sum(d[:i] > 0) + np.sum(d[i:] < 0))


def optimize_relay(s: Scenario, search_box: tuple[float, float, float], coarse_points: int = 41,
                   tol: float = 0.05, noise_violations: int = 1) -> RelayOptimum:
    """Place the relay along y at fixed height to minimize the mean delay.

    A coarse grid is audited for a single-minimum profile, allowing
    ``noise_violations`` out-of-trend steps; if it passes, golden-section
    search refines inside the bracket around the grid minimum. Otherwise a
    NotUnimodal warning is issued and the grid minimum is returned.
    """
    if s.relay is None:
        raise ConfigError("optimize_relay needs a scenario with a relay")
    y_min, y_max, z_fixed = (float(v) for v in search_box)
    if not y_max > y_min:
        raise ConfigError("search box must satisfy y_min < y_max")
    x = s.relay.position.x
    n_evals = 0

    def delay_at(y: float) -> float:
        nonlocal n_evals
        n_evals += 1
        return monte_carlo_delay(s.with_relay_position(Position3D(x, y, z_fixed))).mean_delay

    ys = np.linspace(y_min, y_max, coarse_points)
    delays = [delay_at(float(y)) for y in ys]
    i = int(np.argmin(delays))
    coarse = Position3D(x, float(ys[i]), z_fixed)
    viol = unimodality_violations(delays)
    unimodal = viol <= noise_violations
    best_y, best_d = float(ys[i]), float(delays[i])
    if unimodal:
        lo, hi = float(ys[max(i - 1, 0)]), float(ys[min(i + 1, len(ys) - 1)])
        res = golden_section_minimize(delay_at, lo, hi, tol=tol)
        if res.fx <= best_d:
            best_y, best_d = res.x, res.fx
    else:
        warnings.warn(
            f"delay profile along y has {viol} out-of-trend steps; returning the grid minimum",
            NotUnimodal, stacklevel=2,
        )
    return RelayOptimum(
        position=Position3D(x, best_y, z_fixed),
        delay=best_d,
        coarse_position=coarse,
        coarse_delay=float(delays[i]),
        unimodal=unimodal,
        violations=viol,
        profile_y=ys.tolist(),
        profile_delay=[float(d) for d in delays],
        evaluations=n_evals,
    )


def relay_profile_result(opt: RelayOptimum) -> SweepResult:
    rows = [SweepRow(swept_value=y, delay_symbols=d) for y, d in zip(opt.profile_y, opt.profile_delay)]
    return SweepResult("relay_y_m", rows, meta={
        "optimum_y_m": opt.position.y, "optimum_delay": opt.delay, "unimodal": opt.unimodal,
        "violations": opt.violations,
    })
