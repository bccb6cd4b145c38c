"""Step-graphon calculus.

Block-structured kernels on the unit square with the metric, order and
measure machinery needed to probe cut-distance convergence through weak*
topology diagnostics: cut norms with box witnesses, coupling-based cut
distances, truncated weak* metrics, pushforward measures with a flatness
order decided by LP feasibility, envelope sampling with a hyperspace
distance estimate, and multiway cut matrix sets.
"""

from .core import (
    PartitionSpec,
    SignedStepKernel,
    StepFunction1D,
    StepGraphon,
    common_refinement,
    degree_function,
    edge_density,
    grid_version,
    int_f,
    interlace_version,
    l1_distance,
    make_signed_kernel,
    make_step_graphon,
    rectangle_integral,
    reorder_by_ordered_partition,
    split_reconstruct,
    stepping,
)
from .errors import (
    AsymmetricValues,
    DimensionMismatch,
    EmptySet,
    MarginalMismatch,
    NoInteriorValues,
    PartitionMismatch,
    ResolutionIncompatible,
    ScalingDiverged,
    SolverFailure,
    StepGraphonError,
    TooManyBlocksForExact,
    UnsupportedEps,
    ValueOutOfRange,
    WeightsNotNormalized,
)
from .measures import (
    DiscreteMeasure,
    FlatnessWitness,
    add_measures,
    check_flatter,
    compose_couplings,
    convex_order_test,
    degree_frequencies,
    range_frequencies,
    strictly_flatter,
)
from .metrics import (
    Coupling,
    CutNormResult,
    aligned_cut_norm_distance,
    cut_distance,
    cut_norm,
    cut_norm_distance,
    hausdorff_distance,
    overlap_coupling,
    weak_star_distance,
)
from .multiway import (
    MultiwayMatrixSet,
    multiway_hausdorff,
    multiway_matrix,
    part_index_bound,
    sample_multiway_set,
)
from .named import build_named_graphon
from .order import (
    EnvelopeSample,
    OrderVerdict,
    chi_estimate,
    classify_extremal,
    order_check,
    sample_envelope,
    strictify,
)

__version__ = "0.1.0"
