"""Secure RIS-assisted federated learning latency lab.

Thin wrapper over the native core module. See the project README for the
full CLI and config reference.
"""

from risfl._core import (  # noqa: F401
    ChannelParams,
    ConvergenceParams,
    Environment,
    Mlp,
    RisConfig,
    Rng,
    ToyFlTask,
    bound_value,
    config_hash,
    decode_action,
    default_config_json,
    draw_channel,
    effective_gain,
    epsilon_for_min_participants,
    exhaustive_solve,
    make_toy_task,
    min_participants,
    optimal_single_link_phases,
    run_scheme,
    run_toy_fl,
    validate_config,
    wrap_phase,
)

__all__ = [
    "ChannelParams",
    "ConvergenceParams",
    "Environment",
    "Mlp",
    "RisConfig",
    "Rng",
    "ToyFlTask",
    "bound_value",
    "config_hash",
    "decode_action",
    "default_config_json",
    "draw_channel",
    "effective_gain",
    "epsilon_for_min_participants",
    "exhaustive_solve",
    "make_toy_task",
    "min_participants",
    "optimal_single_link_phases",
    "run_scheme",
    "run_toy_fl",
    "validate_config",
    "wrap_phase",
]
