"""Velocity-field construction: schedules, mixer block, dissipator fields, oracle."""

from scalarlab.flow.schedules import FlowParams, ScheduleTable, build_schedule
from scalarlab.flow.fields import (
    BuildingBlockField,
    ForwardBackwardField,
    TwoCellField,
    UniversalField,
    VelocityField,
)
from scalarlab.flow.oracle import MixerOracleState, mixer_oracle_step, stripe_pattern

__all__ = [
    "FlowParams",
    "ScheduleTable",
    "build_schedule",
    "VelocityField",
    "BuildingBlockField",
    "TwoCellField",
    "UniversalField",
    "ForwardBackwardField",
    "MixerOracleState",
    "mixer_oracle_step",
    "stripe_pattern",
]
