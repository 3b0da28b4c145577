"""Clustering of dependent random time series.

Hierarchical correlation block simulation, rank correlation estimators,
Lance-Williams clustering with separability checks, Marchenko-Pastur
filtering, and copula/margin distances between random variables.
"""

from .core import (
    Dendrogram,
    NestedPartition,
    Partition,
    SeriesMatrix,
    cophenetic_matrix,
    cut_dendrogram,
    leaf_order,
    partitions_equivalent,
)
from .correlation import (
    CorrelationKind,
    UndefinedCorrelationError,
    correlation_distance,
    correlation_matrix,
    kendall,
    pearson,
    spearman,
    to_distance,
)
from .dependence import (
    CopulaTransform,
    d0_empirical,
    d1_empirical,
    d_theta,
    d_theta_gaussian,
    empirical_copula_transform,
    l2_gaussian,
)
from .experiment import (
    ExperimentPlan,
    SuccessGrid,
    kendall_concentration_bound,
    recovery_bound,
    run_grid,
    run_trial,
)
from .gaussian import bhattacharyya, copula_cluster_demo, fisher_rao, hellinger, jeffreys, kl, w2
from .hcbm import (
    HcbmSpec,
    MarginKind,
    TwoBlockSpec,
    hcbm_separation_margin,
    implied_correlation,
    sample,
)
from .linkage import (
    LanceWilliamsClustering,
    LinkageKind,
    check_nested_separability,
    check_separability,
    cluster,
    is_space_conserving_update,
    lw_update,
)
from .rmt import MantegnaFilter, MpParams, mantegna_filter, mp_density, seriate, spectrum

__version__ = "0.1.0"
