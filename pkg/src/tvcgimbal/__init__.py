"""Simulation and verification toolkit for a two-axis servo TVC gimbal."""

from .bench import SamplerSpec, TrialRecord, TrialStats, aggregate_stats, run_trial_batch
from .gimbal import GimbalGeometry, NozzleDeflection, servo_to_nozzle, thrust_vector
from .servo import PwmConvention, ServoParams, ServoState, servo_step

__all__ = [
    "GimbalGeometry", "NozzleDeflection", "PwmConvention", "SamplerSpec", "ServoParams",
    "ServoState", "TrialRecord", "TrialStats", "aggregate_stats", "run_trial_batch",
    "servo_step", "servo_to_nozzle", "thrust_vector",
]
