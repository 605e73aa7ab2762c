"""treeiso: isomorphism probabilities for random trees.

Exact enumeration oracles, truncated-series functional-equation solvers
with singularity analysis, and seeded Monte Carlo estimators, all under one
roof so they can cross-check each other.
"""

from .fields import RATIONAL, FieldMismatchError, RationalField, RealField
from .series import TruncSeries
from .partitions import Partition, c_coeff, c_coeff_table, enumerate_partitions, multinomial
from .trees import (
    CeilingError,
    DegreeModel,
    DegreeViolationError,
    PolyaRecord,
    RootedTree,
    aut_size,
    are_isomorphic,
    canonical_code,
    catalan_number,
    cayley_class_sum,
    class_weight,
    class_weight_sums,
    enumerate_polya,
    exact_p_gw,
    exact_p_labeled,
    iso_pair_leaf_moments,
    plane_class_sum,
    plane_decay_table,
    plane_representations,
    polya_class_count,
    load_records,
    save_records,
    uniform_class_log_aut_mean,
    uniform_class_log_weight_mean,
)
from .samplers import (
    MCEstimate,
    RngSpec,
    UnreachableSizeError,
    mc_iso_probability,
    mc_isomorphic_pair_leaf_stats,
    sample_cgw,
    sample_labeled_rooted,
    sample_log_weight_stats,
    sample_polya_uniform,
    wilson_interval,
)
from .asymptotics import (
    AsymConfig,
    AutCltConstants,
    CltConstants,
    DEFAULT_CONFIG,
    LabeledConstants,
    LeafConstant,
    SingularPoint,
    SolverError,
    UnaryBinaryConstants,
    aut_clt_constants,
    degree_clt_constants,
    estimate_alpha,
    labeled_constants,
    leading_order_prediction,
    leaf_mean_constant,
    logweight_clt_constants,
    solve_degree_series,
    solve_polya_series,
    solve_singular_system,
    unary_binary_constants,
    xi_series,
)

__version__ = "0.1.0"
