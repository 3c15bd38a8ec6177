"""Role-stratified temporal network analytics for directed interaction logs.

Builds sliding-window graphs from timestamped directed events, resolves
hierarchical roles per window, and computes delta-bounded three-edge motifs,
degree-correlation taxonomy, hierarchy flow ratios, and organisational
activity metrics, with a synthetic generator for end-to-end verification.
"""

__version__ = "0.1.0"

from .events import (  # noqa: F401
    EdgeEvent,
    EventStore,
    TimeWindow,
    WindowPlan,
    WindowedGraph,
    active_nodes,
    activity,
    add_months,
    build_store,
    degree,
    window_graph,
    windows,
)
from .exceptions import ConfigError, ParseError, ValidationError  # noqa: F401
from .mobility import (  # noqa: F401
    NodePanel,
    TaxonomyResult,
    build_panel,
    pearson,
    spearman,
    split_window,
    taxonomy,
)
from .motifs import (  # noqa: F401
    MotifCategory,
    MotifTally,
    brute_force_motifs,
    enumerate_motifs,
    role_motif_proportions,
)
from .roles import (  # noqa: F401
    EdgeDirection,
    GroupEvent,
    GroupEventKind,
    RoleAssignment,
    RoleClass,
    RoleInterval,
    RoleKind,
    label_edge,
    resolve_roles,
    role_table_from_group_events,
)
