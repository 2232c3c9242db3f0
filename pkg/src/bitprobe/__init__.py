"""Static set membership in the bit-probe model.

Graph substrates (:mod:`~bitprobe.graphs`), safe edge orientations
(:mod:`~bitprobe.orientation`), two-forest partitions
(:mod:`~bitprobe.forests`), a probe-accounting bit memory
(:mod:`~bitprobe.memory`), the membership schemes themselves
(:mod:`~bitprobe.schemes`) and a verification harness
(:mod:`~bitprobe.harness`).
"""

from .errors import (
    AddressError,
    BitprobeError,
    BudgetExceeded,
    CapacityError,
    ConfigurationError,
    DomainError,
    InfeasibleCheck,
    InvalidParameter,
    NotLocallySparse,
    NotTwoForests,
    PhaseError,
    PreconditionError,
    SubstrateError,
)
from .graphs import (
    INFINITE,
    Graph,
    complete_bipartite,
    girth,
    projective_plane_incidence,
    prune_to_girth,
    random_locally_sparse,
    wenger_graph,
)
from .harness import ALL_SETS, Sampled, run_fixtures, scaling_experiment, verify_exhaustive
from .memory import ADAPTIVE, NON_ADAPTIVE, BitStore, ProbeTranscript, audit_transcript
from .orientation import ColoredGraph, Orientation, brute_force_safe_orient, is_safe, safe_orient
from .schemes import (
    SCHEME_IDS,
    SchemeInstance,
    audit_query,
    build,
    g_min,
    load_instance,
    query,
    save_instance,
    sweep,
)

__version__ = "0.1.0"
