"""Preferential-attachment trees grown with a power of choice among d draws."""

from .observables import (
    DiagnosticScales,
    MaxStats,
    Snapshot,
    TrajectoryRecord,
    drift_check_d2,
    scale_functions,
    scaled_metric,
    update_max_stats,
)
from .tree_model import (
    ModelConfig,
    StepOutcome,
    TreeState,
    export_edge_list,
    grow_step,
    init_tree,
    make_rng,
    run_growth,
    sample_candidate,
    sample_max_degree,
    select_attachment,
)

__version__ = "0.1.0"
