"""Extremal barriers, degree thresholds, edge-lattices and absorbing pipelines
for near perfect matchings in k-uniform hypergraphs."""

from .absorbing import (
    LatticeParams,
    PipelineResult,
    SAbsorptionWitness,
    count_s_absorbing,
    lattice_absorbing_pipeline,
    npm_via_absorption,
)
from .constructions import BarrierSpec, divisibility_barrier, space_barrier
from .hgraph import Hypergraph, Matching, build, complete, generate, matching_number, min_degree, read_hg, write_hg
from .lattice import IntegerLattice, VertexPartition, lattice_basis
from .reachability import ReachParams, reach_partition
from .thresholds import g_optimize

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "Hypergraph",
    "IntegerLattice",
    "LatticeParams",
    "Matching",
    "PipelineResult",
    "ReachParams",
    "SAbsorptionWitness",
    "VertexPartition",
    "build",
    "complete",
    "count_s_absorbing",
    "divisibility_barrier",
    "g_optimize",
    "generate",
    "lattice_absorbing_pipeline",
    "lattice_basis",
    "matching_number",
    "min_degree",
    "npm_via_absorption",
    "reach_partition",
    "read_hg",
    "space_barrier",
    "write_hg",
]
