"""Quadratisation of pseudo-Boolean functions and QAOA problem-layer synthesis."""

from .multigraph import GraphStats, MultiGraph, build_graph, export_dot, graph_stats, has_multi_edges
from .pbf import (
    DensityProfile,
    DimensionError,
    MalformedInputError,
    Pbf,
    add,
    degree,
    density_profile,
    evaluate,
    multiply,
    normalize,
    scale,
    square,
)
from .qaoa import (
    Circuit,
    CircuitMetrics,
    Cx,
    IsingPoly,
    Rz,
    RzK,
    compile_md,
    compile_rmd,
    decompose,
    depth,
    map_to_gates,
    metrics,
    pubo_to_ising,
)
from .reduce import (
    ReductionResult,
    ReductionStep,
    SelectionStrategy,
    decode_assignment,
    default_penalty_weight,
    quadratize,
    select_pair,
    substitute_pair,
)
from .sched import (
    SchedulingInstance,
    build_assignment_constraint,
    build_full_pubo,
    build_objective,
    build_setup_cost,
    generate_instance,
)

__version__ = "0.1.0"
