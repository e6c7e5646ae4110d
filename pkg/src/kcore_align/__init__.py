"""k-core alignment of correlated Erdős–Rényi graph pairs."""
from .alignment import (
    AlignmentVerdict,
    MapEstimate,
    MStatistic,
    edge_overlap,
    enumerate_k_core_alignments,
    is_k_core_alignment,
    is_mu_star_maximal,
    kcore_align_greedy,
    m_statistic,
    m_statistic_by_edges,
    map_estimate_bruteforce,
    mu_star_maximal_extension,
    oracle_kcore_estimate,
    sample_m_statistic,
)
from .bounds import BoundReport, chernoff_optimize, recommended_k, tail_bound, xi_and_union_bound
from .converse import (
    ConverseReport,
    PosteriorTable,
    automorphisms,
    exact_posterior,
    gamma_extract,
    isolated_stats,
    max_list_success,
    partial_recovery_converse_check,
    verify_lemma_intersection,
)
from .decomposition import DecompositionStats, decompose
from .errors import ConfigError, InvariantError
from .genfunc import a_poly, a_poly_cyclic, b_poly, b_poly_cyclic, gf_exact, gf_upper_bound, log_gf_upper_bound
from .graph import (
    INFINITY,
    Graph,
    LiftedMatching,
    Matching,
    aligned_intersection,
    k_core,
    lift,
    min_degree,
    support_left,
    support_right,
    tensor_product,
)
from .harness import ExperimentConfig, TrialRecord, emit_csv, emit_plot_data, run_experiment
from .model import (
    CorrelationParams,
    SeededRng,
    check_achievability_regime,
    check_converse_regime,
    sample_pair,
    sample_uniform_bijection,
)

__version__ = "0.1.0"
