"""Spectral analysis and clustering of directed signed graphs."""

from .cluster import (
    ClusterConfig,
    ClusterTrace,
    PartitionResult,
    cluster_embedding,
    cluster_graph,
    evaluate_candidate,
)
from .eigen import (
    EigenPair,
    EigenSet,
    canonicalize_sign,
    dense_eigen_oracle,
    top_eigenpairs,
)
from .embedding import (
    SpectralEmbedding,
    average_cluster_angle,
    normalize_rows,
    pairwise_cluster_angles,
    same_sign_indices,
    same_sign_real_vectors,
    split_complex,
)
from .errors import (
    EdgeListError,
    EigenConvergenceError,
    GenerationError,
    KMeansError,
    PerronCheckError,
    SignedSpectraError,
    SingularOperatorError,
)
from .graph import (
    DirectedSignedGraph,
    SignSplit,
    load_edge_list,
    sign_split,
    strongly_connected_components,
    write_edge_list,
)
from .metrics import accuracy, davies_bouldin, kmeans, signed_modularity
from .perturb import (
    CrossEdgeReport,
    PerturbationModel,
    PerturbWorkspace,
    Regime,
    RegimeReport,
    approx_node_coordinate,
    approx_perturbed_subspace,
    build_workspace,
    classify_block_regime,
    cross_edge_experiment,
    k_block_model,
    perron_pair,
    positivity_exponent,
    residual_decay_experiment,
    rotation_agreement_sweep,
    rotation_verdict,
    single_cross_edge,
)
from .syngen import BLOCK_SIZES, SynSpec, builtin_specs, generate

__version__ = "0.1.0"
