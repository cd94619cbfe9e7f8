from .core import (
    BACKEND,
    SLOTS_PER_DAY,
    DemandSequence,
    InvalidInputError,
    RunwaySchedule,
    SimConfig,
    SimOutput,
    SimState,
    SimulationError,
    initial_state,
    run,
    runway_label,
    simulate,
    step,
    throughput,
    to_flight_records,
)

__all__ = [
    "BACKEND", "SLOTS_PER_DAY", "DemandSequence", "InvalidInputError", "RunwaySchedule",
    "SimConfig", "SimOutput", "SimState", "SimulationError", "initial_state", "run",
    "runway_label", "simulate", "step", "throughput", "to_flight_records",
]
