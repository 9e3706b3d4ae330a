"""Random pairwise key predistribution under gradual deployment.

Each of n sensor nodes is paired offline with k uniformly chosen partners;
a pair can communicate securely once deployed if either selected the
other.  This package computes the exact and asymptotic connectivity
behavior of the induced key graph when only a fraction of the nodes is
deployed, and cross-checks every formula with Monte Carlo experiments.

Layout: scheme (pairing tables and key rings), graphs (key graphs and
phase views), theory (closed-form calculators), montecarlo (repeat-trial
harness), cli (command-line front end), sampling (deterministic PRNG).
"""

from . import theory
from .graphs import (
    KeyGraph,
    PhaseView,
    UnionFind,
    build_graph,
    count_isolated,
    is_connected,
    is_connected_bfs,
    restrict,
    write_edge_list,
)
from .montecarlo import (
    DeploymentSchedule,
    Estimate,
    ExperimentPlan,
    RingCensus,
    estimate_from,
    run_connectivity_sweep,
    run_isolation_sweep,
    run_keyring_census,
    run_phased_detail,
    run_phased_experiment,
    wilson_interval,
)
from .scheme import (
    KeyRing,
    PairingTable,
    PairwiseKeyId,
    SchemeParams,
    derive_key_rings,
    generate_pairing,
    phase_size,
    reverse_degree,
    reverse_degrees,
    ring_sizes,
    table_from_json,
    table_from_lists,
    table_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "SchemeParams",
    "PairingTable",
    "PairwiseKeyId",
    "KeyRing",
    "generate_pairing",
    "derive_key_rings",
    "reverse_degree",
    "reverse_degrees",
    "ring_sizes",
    "phase_size",
    "table_to_json",
    "table_from_json",
    "table_from_lists",
    "KeyGraph",
    "PhaseView",
    "UnionFind",
    "build_graph",
    "restrict",
    "is_connected",
    "is_connected_bfs",
    "count_isolated",
    "write_edge_list",
    "theory",
    "ExperimentPlan",
    "Estimate",
    "RingCensus",
    "DeploymentSchedule",
    "estimate_from",
    "run_connectivity_sweep",
    "run_isolation_sweep",
    "run_phased_experiment",
    "run_phased_detail",
    "run_keyring_census",
    "wilson_interval",
    "__version__",
]
