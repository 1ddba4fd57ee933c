"""Analysis of optimal-solution landscapes: ellipse fits, phase branches, predictions."""

from .branches import (Branch, BranchModel, LinearityReport, check_1d_manifold, cluster_branches,
                       cluster_offsets, dbscan, phase_offsets, unwrap_projective, write_scatter_csv)
from .classify import Classification, ClassificationThresholds, classify, count_distinct
from .ellipse import (EllipseFitReport, fit_semi_ellipse, fit_semi_ellipses, mean_curve_distance,
                      verify_tangent_collapse)
from .pipeline import AnalysisReport, analyze
from .star import (MatchReport, StarPrediction, match_branches, rational_fit, star_polygon_predict,
                   valid_densities, write_prediction_csv)
from .symmetry import match_under_symmetry, similarity_maps

__all__ = [
    "AnalysisReport", "Branch", "BranchModel", "Classification", "ClassificationThresholds",
    "EllipseFitReport", "LinearityReport", "MatchReport", "StarPrediction", "analyze",
    "check_1d_manifold", "classify", "cluster_branches", "cluster_offsets", "count_distinct",
    "dbscan", "fit_semi_ellipse", "fit_semi_ellipses", "match_branches", "match_under_symmetry",
    "mean_curve_distance", "phase_offsets", "rational_fit", "similarity_maps",
    "star_polygon_predict", "unwrap_projective", "valid_densities", "verify_tangent_collapse",
    "write_prediction_csv", "write_scatter_csv",
]
