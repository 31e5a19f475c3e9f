"""Simulate probabilistic logic circuits on all 2^n inputs at once.

The distribution over bit strings is held as a matrix product, so a circuit
acts on every input simultaneously; preimages are then found by fixing input
bits one at a time and solution counts read off exactly from one marginal.
"""

from .circuit import (
    Circuit,
    CircuitOp,
    Insert,
    OneBit,
    ParseError,
    Remove,
    Sweep,
    TwoBit,
    execute,
    format_circuit,
    parse_circuit,
    route_nearest_neighbor,
)
from .gates import (
    ONE_BIT_GATES,
    TWO_BIT_GATES,
    OneBitGate,
    SvdConfig,
    TwoBitGate,
    apply_one_bit,
    apply_two_bit,
    assemble_gate_blocks,
    recompress_sweeps,
    svd_split,
)
from .heights import BoundsReport, HeightProfile, check_bounds, export_profile
from .oracle import (
    DenseDistribution,
    evaluate_assignment,
    oracle_count,
    oracle_execute,
)
from .search import (
    BranchFailure,
    IntegralityViolation,
    SearchOutcome,
    SearchStep,
    count_solutions,
    search_preimage,
)
from .state import (
    BitAssignment,
    CorruptStateError,
    MpsState,
    SiteMatrices,
    evaluate_probability,
    full_distribution,
    init_state,
    insert_bit,
    remove_bit,
)

__version__ = "0.1.0"

__all__ = [
    "BitAssignment",
    "BoundsReport",
    "BranchFailure",
    "Circuit",
    "CircuitOp",
    "CorruptStateError",
    "DenseDistribution",
    "HeightProfile",
    "Insert",
    "IntegralityViolation",
    "MpsState",
    "ONE_BIT_GATES",
    "OneBit",
    "OneBitGate",
    "ParseError",
    "Remove",
    "SearchOutcome",
    "SearchStep",
    "SiteMatrices",
    "SvdConfig",
    "Sweep",
    "TWO_BIT_GATES",
    "TwoBit",
    "TwoBitGate",
    "apply_one_bit",
    "apply_two_bit",
    "assemble_gate_blocks",
    "check_bounds",
    "count_solutions",
    "evaluate_assignment",
    "evaluate_probability",
    "execute",
    "export_profile",
    "format_circuit",
    "full_distribution",
    "init_state",
    "insert_bit",
    "oracle_count",
    "oracle_execute",
    "parse_circuit",
    "recompress_sweeps",
    "remove_bit",
    "route_nearest_neighbor",
    "search_preimage",
    "svd_split",
]
