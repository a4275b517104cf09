"""Python bindings for the lawnsim simulator core."""

from ._lawnsim import (  # noqa: F401
    ValidationError,
    balanced_mean_se,
    capacity_sweep,
    classify_regime,
    config_hash,
    control_sim,
    corridor_demo,
    critical_capacity,
    critical_sinr,
    db_to_linear,
    expected_drift,
    packet_success_prob,
    qos_capacity_bound,
    sinr,
    spectral_efficiency,
    steering_derivative,
    steering_vector,
    topological_entropy,
)

__version__ = "0.1.0"
