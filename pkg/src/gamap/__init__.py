"""Global attribution mapping toolkit.

Turns many local feature attributions into a handful of global
explanations: attributions are normalized into weighted rankings,
compared with weighted rank distances, clustered around medoids, and
reported per subpopulation with full sample traceability. Ships with a
small dense-network engine and three local explainers so the bundled
experiments run end to end, plus a CLI over every stage.
"""

from .cluster import (
    ClusteringResult,
    SilhouetteReport,
    assign_clusters,
    fit_kmedoids,
    fit_kmedoids_restarts,
    init_medoids,
    select_k,
    silhouette,
    update_medoid,
)
from .datagen import (
    Dataset,
    load_csv,
    load_iris,
    synth_group_a,
    synth_group_b,
    synth_mixture,
    train_test_split,
)
from .errors import GamapError
from .explainers import (
    ExplainConfig,
    FeatureStats,
    batch_explain,
    deeplift_rescale,
    integrated_gradients,
    lime_tabular,
)
from .mlp import (
    MlpModel,
    TrainConfig,
    accuracy,
    forward,
    gradient_wrt_input,
    load_model,
    save_model,
    train,
)
from .pipeline import (
    GamConfig,
    GlobalAttributionMap,
    export_rank_graph,
    fit_gam,
    subpopulation_summary,
)
from .ranking import (
    AttributionVector,
    DistanceMatrix,
    RankedAttribution,
    kendall_tau_distance,
    kendall_tau_distance_fast,
    normalize,
    pairwise_distances,
    spearman_rho_sq_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AttributionVector",
    "ClusteringResult",
    "Dataset",
    "DistanceMatrix",
    "ExplainConfig",
    "FeatureStats",
    "GamConfig",
    "GamapError",
    "GlobalAttributionMap",
    "MlpModel",
    "RankedAttribution",
    "SilhouetteReport",
    "TrainConfig",
    "accuracy",
    "assign_clusters",
    "batch_explain",
    "deeplift_rescale",
    "export_rank_graph",
    "fit_gam",
    "fit_kmedoids",
    "fit_kmedoids_restarts",
    "forward",
    "gradient_wrt_input",
    "init_medoids",
    "integrated_gradients",
    "kendall_tau_distance",
    "kendall_tau_distance_fast",
    "lime_tabular",
    "load_csv",
    "load_iris",
    "load_model",
    "normalize",
    "pairwise_distances",
    "save_model",
    "select_k",
    "silhouette",
    "spearman_rho_sq_distance",
    "subpopulation_summary",
    "synth_group_a",
    "synth_group_b",
    "synth_mixture",
    "train",
    "train_test_split",
    "update_medoid",
]
