"""Fair throughput scheduling for mmWave backhaul networks.

Optimal max-min / maximum-throughput scheduling by column generation over
matchings, and a fast edge-coloring approximation.
"""

__version__ = "0.1.0"

from .channel import ChannelParams, ChannelState, GridScenario, generate_grid, link_capacity, path_loss
from .coloring import ColoringMultigraph, color_multigraph
from .ec import (
    ConstraintVariant,
    EcConfig,
    ec_access_link_time,
    ec_maxmin_link_time,
    ec_multirf_link_time,
    ec_schedule,
    ec_structure_bounds,
    ec_tput_link_time,
    solve_ec,
)
from .expansion import collapse_schedule, expand_enb, expand_nodes
from .matching import WeightedGraph, enumerate_matchings, max_weight_matching
from .model import (
    Link,
    LinkTimeVector,
    Network,
    Node,
    NodeRole,
    Schedule,
    Slot,
    ThroughputVector,
    max_tput_baseline,
    throughput_of_schedule,
    verify_schedule,
)
from .mtfs import column_of_matching, initial_schedule, solve, solve_access, solve_maxmin, solve_mtfs
from .oracle import oracle_maxmin, oracle_mtfs

__all__ = [name for name in dir() if not name.startswith("_")]
