"""Manipulation-resistant facility location on ZV-line graphs."""

from .blocks import (
    articulation_points,
    biconnected_components,
    block_cut_tree,
    block_graph_partition,
    is_block_graph,
    tree_partition,
)
from .errors import *  # noqa: F401,F403
from .families import AnnotatedGraph, FamilySpec, c5_orders, generate
from .graph import UNREACHABLE, Graph, ball, build_graph, disjoint_union, distance, distance_to_set, neighbors
from .mechanisms import (
    BlockGraphMechanism,
    Dictator,
    DisconnectedWrapper,
    Fixed,
    FStar,
    LcaTree,
    Mean,
    Mechanism,
    Median,
    OrderMechanism,
    Outcome,
    block_graph_mechanism,
    dictator_mechanism,
    disconnected_wrapper,
    f_star,
    fixed_mechanism,
    lca_tree_mechanism,
    mean_mechanism,
    mechanism_from_spec,
    median_mechanism,
    saturation_checks,
    order_mechanism,
)
from .oracle import (
    CertificationConfig,
    CertificationReport,
    Counterexample,
    DeviationQuery,
    PropertyClass,
    certify,
    check_deviation,
    dedupe_search_space,
    find_deviation,
    iter_deviations,
)
from .preference import Preference, Profile, is_pareto_optimal, pareto_dominates, pareto_set, prefers
from .recognize import count_zv_line_partitions, recognize_zv_line
from .structure import (
    SubgraphSpec,
    ValidationReport,
    ZvOrderedPartition,
    ball_interval_check,
    induced_global_order,
    is_interval,
    partition,
    root_of,
    validate_partition,
    validate_zv_line,
)
from .zvformat import ZvGraphFile, emit, parse

__version__ = "0.1.0"
