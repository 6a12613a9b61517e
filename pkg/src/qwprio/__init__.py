"""Disease gene prioritization with seeded continuous-time quantum walks."""
__version__ = "0.1.0"

from .baselines import score_diamond, score_dk, score_nbr, score_rwr
from .evaluation import (MethodConfig, make_splits, mean_reciprocal_rank, recall_at,
                         run_benchmark)
from .graph import Graph, bfs_distances, compute_stats, degrees, load_graph
from .hypergeom import enrichment_pvalue
from .ingest import AssociationRecord, SeedSet, build_seed_sets, filter_associations
from .kernels import BACKEND
from .qwalk import (Hamiltonian, WalkParams, build_hamiltonian, expm_action, score_qa,
                    transition_probabilities_from)
from .scores import ScoreVector
from .walk_analysis import degree_stratified_mdt, disease_mdt, mean_distance_travelled

__all__ = [
    "AssociationRecord", "BACKEND", "Graph", "Hamiltonian", "MethodConfig", "ScoreVector",
    "SeedSet", "WalkParams", "bfs_distances", "build_hamiltonian", "build_seed_sets",
    "compute_stats", "degree_stratified_mdt", "degrees", "disease_mdt", "enrichment_pvalue",
    "expm_action", "filter_associations", "load_graph", "make_splits",
    "mean_distance_travelled", "mean_reciprocal_rank", "recall_at", "run_benchmark",
    "score_diamond", "score_dk", "score_nbr", "score_qa", "score_rwr",
    "transition_probabilities_from",
]
