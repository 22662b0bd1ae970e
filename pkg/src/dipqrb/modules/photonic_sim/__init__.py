"""Photonic simulation of the routed Bell test."""

from dipqrb.modules.photonic_sim.schemas import OpticalModel, TwoQubitState
from dipqrb.modules.photonic_sim.service import (
    alice_marginal,
    dump_behavior_csv,
    exact_behavior,
    ideal_pair_state,
    measurement_effects,
    sample_client_outcome,
    sample_round,
    sample_rounds,
    sample_server_outcomes,
)

__all__ = [
    "OpticalModel",
    "TwoQubitState",
    "alice_marginal",
    "dump_behavior_csv",
    "exact_behavior",
    "ideal_pair_state",
    "measurement_effects",
    "sample_client_outcome",
    "sample_round",
    "sample_rounds",
    "sample_server_outcomes",
]
