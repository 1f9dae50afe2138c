"""Choi-matrix calculus, PPT diagnostics and channel factorization."""

from .channel import (
    ChannelProperties,
    ChoiMatrix,
    LinearMapTensor,
    apply,
    channel_properties,
    choi_of_map,
    compose,
    map_of_choi,
    normalize_trace,
)
from .entanglement import (
    PptVerdict,
    Witness,
    WitnessRegistry,
    default_registry,
    eb_index,
    eb_test,
    load_registry,
    pairing,
    positivity_heuristic,
    ppt_test,
    realignment_test,
    schmidt_rank,
)
from .families import StateFamily, build_composite, family_state
from .matrix import (
    FLOAT64,
    RATIONAL,
    BipartiteState,
    DenseMatrix,
    hermitian_eigenvalues,
    is_psd,
    kron,
    numerical_rank,
    partial_transpose,
    realign,
)
from .scan import ScanRecord, default_grid, scan
from .sqroot import (
    FactorizationProblem,
    FactorizationSolution,
    SolverConfig,
    composition_residual,
    solve_factorization,
    verify_solution,
)

__version__ = "0.1.0"
