"""Numerical laboratory for catalytic entanglement transformations."""

from .qstate import (
    DensityOperator,
    Party,
    PureState,
    QuantumChannel,
    SystemLayout,
    apply_channel,
    partial_trace,
    schmidt,
    tensor,
)
from .measures import (
    conditional_entropy,
    entanglement_entropy,
    fidelity,
    majorizes,
    trace_distance,
    von_neumann_entropy,
)
from .locc import catalyst_search, check_catalyzed, nielsen_convertible
from .catalysis import build_catalyst, certify_decoupling, make_synthetic_gamma, run_protocol, sweep
from .protocols import distillation_ledger, entropy_to_spectrum, merging_ledger

__version__ = "0.1.0"
