"""Scenario orchestration: presets, Monte Carlo, sweeps, relay placement."""
from .montecarlo import MonteCarloResult, mean_link, monte_carlo_capacity, monte_carlo_delay, simulate
from .results import CSV_COLUMNS, SweepResult, SweepRow, to_csv, to_rows_json
from .scenario import (
    RELAY_INDEX_POSITIONS, Interferer, Scenario, load_scenario, preset_case, preset_relay,
    scenario_from_dict, scenario_to_dict,
)
from .sweeps import (
    RelayOptimum, evaluate_point, optimize_relay, power_vs_delay, relay_profile_result,
    sweep_height, sweep_relay, sweep_snr, unimodality_violations,
)
