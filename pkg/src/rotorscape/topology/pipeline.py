"""End-to-end analysis of a solution ensemble."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyResultError, InsufficientDataError
from ..manifold import phase_from_direction
from ..optimizer import require_full_actuation
from .branches import BranchModel, LinearityReport, check_1d_manifold, cluster_branches, cluster_offsets
from .classify import Classification, ClassificationThresholds, classify
from .ellipse import EllipseFitReport, fit_semi_ellipses, verify_tangent_collapse
from .reference import reference_for
from .star import MatchReport, match_branches, star_polygon_predict
from .symmetry import match_under_symmetry


@dataclass
class AnalysisReport:
    chassis_id: str
    ellipses: EllipseFitReport
    tangent_rotors: np.ndarray
    phases: np.ndarray
    max_residual: float
    linear: LinearityReport | None
    model: BranchModel | None
    classification: Classification
    prediction_match: MatchReport | None = None
    reference_match: MatchReport | None = None

    def summary(self) -> str:
        k = self.model.k if self.model is not None else None
        return self.classification.line(k)


def analyze(solutions, tol_deg: float = 1.0, eps_deg: float = 5.0, min_samples: int = 5,
            thresholds: ClassificationThresholds = ClassificationThresholds(),
            match_tol_deg: float | None = None) -> AnalysisReport:
    """Fit ellipses, extract phases and branches, classify and match against references.

    ``match_tol_deg`` defaults to ``tol_deg``.
    """
    chassis = solutions.chassis
    require_full_actuation(chassis)
    dirs = solutions.dirs
    ellipses = fit_semi_ellipses(dirs, chassis)
    tangent = verify_tangent_collapse(ellipses, chassis, tol_deg)
    phases, residual = phase_from_direction(chassis, dirs)
    labels = cluster_offsets(phases, eps_deg, min_samples)
    linear = model = None
    if (labels >= 0).any():
        try:
            linear = check_1d_manifold(phases, labels)
        except InsufficientDataError:
            linear = None
        model = cluster_branches(phases, None if linear is None else linear.lam, labels,
                                 spread_limit_deg=thresholds.spread_limit_deg)
    label = classify(chassis, dirs, model, linear, thresholds)
    report = AnalysisReport(chassis.id, ellipses, tangent, phases, residual, linear, model, label)
    if model is not None and label.label.startswith("IV"):
        tol = tol_deg if match_tol_deg is None else match_tol_deg
        if chassis.family == "regular_polygon" and chassis.n >= 6:
            report.prediction_match = match_branches(model, star_polygon_predict(chassis.n), tol)
        ref = reference_for(chassis.id)
        if ref is not None:
            report.reference_match = match_under_symmetry(model, chassis, ref[0], ref[1], tol)
    return report


__all__ = ["AnalysisReport", "analyze", "EmptyResultError"]
