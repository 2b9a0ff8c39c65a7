"""Heralded optical entanglement links between quantum processor modules.

Analytics for the four heralding protocols, on-demand delivery with storage
decay and timeout fallback, entanglement distillation, a seeded Monte Carlo
verifier, and architecture-level resource planning, wrapped in a JSON-driven
CLI (`translink`).
"""

from .config_io import (
    ParsedConfig,
    RunManifest,
    TOOL_VERSION,
    build_manifest,
    emit_csv,
    emit_json,
    format_float,
    parse_config,
    parse_config_data,
    resolved_config,
)
from .delivery import (
    DeliveryCurve,
    ParallelBoost,
    delivered_fidelity,
    delivery_curve,
    delivery_point,
    infidelity_breakdown,
    infidelity_breakdown_curve,
    min_time_to_fidelity,
    optimal_delivery_time,
    parallel_speedup,
)
from .distillation import (
    BellDiagonalState,
    DistillMode,
    DistillationOutcome,
    NestedDistillResult,
    calibrated_distill,
    nested_distill,
    recurrence_ladder,
    recurrence_round,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DivisionDomainError,
    ModelDomainError,
    NoOptimumError,
    PresetNotFoundError,
    SchemaError,
    TranslinkError,
    UnattainableError,
)
from .mcsim import (
    MAX_TRIAL_DUMP,
    DistillRoundStats,
    DistillTrialStats,
    MCStats,
    TrialRecord,
    run_distill_trials,
    run_trials,
)
from .params import (
    DEVICE_PRESETS,
    QUBIT_PRESETS,
    TRANSDUCER_PRESETS,
    DeliveryPolicy,
    DeviceSummary,
    FidelityModel,
    LinkConfig,
    LinkMetrics,
    MemoryKind,
    MemoryParams,
    PhotonBasis,
    ProtocolSpec,
    PumpMode,
    StorageQubitParams,
    TransducerParams,
    preset,
    validate,
)
from .planner import (
    Architecture,
    ArchitectureSpec,
    CircuitCutComparison,
    CryostatCheck,
    GAMMA_CLASSICAL,
    LATTICE_SURGERY_LINK_ERROR_THRESHOLD,
    MAX_TRANSDUCERS_PER_MODULE,
    PlanReport,
    TradeoffPoint,
    circuit_cut_comparison,
    cryostat_budget_check,
    edge_qubit_count,
    graph_state_pipe_width,
    lattice_surgery_plan,
    tradeoff_surface,
    validate_architecture,
)
from .protocols import (
    ProtocolAnalytics,
    analyze_protocol,
    herald_probability,
    herald_probability_with_memory,
    heralded_fidelity,
    protocol_infidelity,
    thermal_infidelity,
)

__version__ = TOOL_VERSION

__all__ = [
    "Architecture",
    "ArchitectureSpec",
    "BellDiagonalState",
    "CircuitCutComparison",
    "ConfigError",
    "CryostatCheck",
    "DEVICE_PRESETS",
    "DegenerateInputError",
    "DeliveryCurve",
    "DeliveryPolicy",
    "DeviceSummary",
    "DistillMode",
    "DistillTrialStats",
    "DistillationOutcome",
    "DivisionDomainError",
    "FidelityModel",
    "GAMMA_CLASSICAL",
    "LATTICE_SURGERY_LINK_ERROR_THRESHOLD",
    "LinkConfig",
    "LinkMetrics",
    "MAX_TRANSDUCERS_PER_MODULE",
    "MAX_TRIAL_DUMP",
    "DistillRoundStats",
    "MCStats",
    "MemoryKind",
    "MemoryParams",
    "ModelDomainError",
    "NestedDistillResult",
    "NoOptimumError",
    "ParallelBoost",
    "ParsedConfig",
    "PhotonBasis",
    "PlanReport",
    "PresetNotFoundError",
    "ProtocolAnalytics",
    "ProtocolSpec",
    "PumpMode",
    "QUBIT_PRESETS",
    "RunManifest",
    "SchemaError",
    "StorageQubitParams",
    "TOOL_VERSION",
    "TRANSDUCER_PRESETS",
    "TradeoffPoint",
    "TransducerParams",
    "TranslinkError",
    "TrialRecord",
    "UnattainableError",
    "analyze_protocol",
    "build_manifest",
    "format_float",
    "calibrated_distill",
    "circuit_cut_comparison",
    "cryostat_budget_check",
    "delivered_fidelity",
    "delivery_curve",
    "delivery_point",
    "edge_qubit_count",
    "emit_csv",
    "emit_json",
    "graph_state_pipe_width",
    "herald_probability",
    "herald_probability_with_memory",
    "heralded_fidelity",
    "infidelity_breakdown",
    "infidelity_breakdown_curve",
    "lattice_surgery_plan",
    "min_time_to_fidelity",
    "nested_distill",
    "optimal_delivery_time",
    "parallel_speedup",
    "parse_config",
    "parse_config_data",
    "preset",
    "protocol_infidelity",
    "recurrence_ladder",
    "recurrence_round",
    "resolved_config",
    "run_distill_trials",
    "run_trials",
    "thermal_infidelity",
    "tradeoff_surface",
    "validate",
    "validate_architecture",
]
