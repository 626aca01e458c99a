"""Entanglement swapping with polarization / coherent-state hybrid states."""

from .bell import (
    BellSettings,
    MeasurementSetting,
    OptimizerConfig,
    bell_function,
    bell_optimal,
    correlation_matrix,
    horodecki_value,
    joint_expectation,
    optimize_bell,
    prbo,
)
from .channels import (
    DetectorModel,
    DetectorOutcome,
    DistanceConvention,
    FiberModel,
    beam_splitter,
    detector_effect,
    loss_channel,
    transmittance,
)
from .hilbert import (
    DensityOperator,
    Fock,
    ModeLayout,
    NullEventError,
    Qubit,
    StateVector,
    TruncationError,
    apply_povm,
    coherent_state,
    fidelity_pure,
    partial_trace,
    tensor,
    trace_distance,
)
from .protocol import (
    HeraldPattern,
    ProtocolParams,
    SwapOutcome,
    analytic_probability,
    analytic_shared_state,
    hybrid_state,
    loss_factor,
    run_protocol_oracle,
)
from .teleport import (
    BellOutcome,
    InputQubit,
    average_fidelity,
    average_fidelity_numeric,
    bell_projectors,
    fidelity_per_outcome,
    teleport_outcome_oracle,
)

__version__ = "0.1.0"
