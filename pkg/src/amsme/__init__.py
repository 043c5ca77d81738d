"""Adaptive multi-scale manifold embedding.

Ordinal (rank) distances, an adaptive similarity graph, and a two-stage
neighbour embedding with label-driven reweighting.
"""
__version__ = "0.1.0"

from .core import (DataMatrix, DistanceMatrix, LabelVector, compute_distance_matrix,
                   load_dataset, load_distance_matrix, read_fmat, write_fmat)
from .ordinal import OrdinalMatrix, ordinal_matrix, ordinal_rank
from .graph import (NeighborhoodScales, SimilarityGraph, local_scales, neighborhood_budget,
                    similarity_graph, stage1_distance)
from .embed import EmbedConfig, Embedding, embed
from .cluster import KMeansResult, accuracy, kmeans, neighbor_purity
from .reweight import ReweightConfig, reweight_distances
from .pipeline import PipelineArtifacts, PipelineConfig, amsme, run_pipeline
from .plot import emit_scatter

__all__ = [
    "DataMatrix", "DistanceMatrix", "LabelVector", "compute_distance_matrix", "load_dataset",
    "load_distance_matrix", "read_fmat", "write_fmat",
    "OrdinalMatrix", "ordinal_matrix", "ordinal_rank",
    "NeighborhoodScales", "SimilarityGraph", "local_scales", "neighborhood_budget",
    "similarity_graph", "stage1_distance",
    "EmbedConfig", "Embedding", "embed",
    "KMeansResult", "accuracy", "kmeans", "neighbor_purity",
    "ReweightConfig", "reweight_distances",
    "PipelineArtifacts", "PipelineConfig", "amsme", "run_pipeline",
    "emit_scatter",
]
