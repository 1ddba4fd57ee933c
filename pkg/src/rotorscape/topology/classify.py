"""Landscape taxonomy of a pruned solution ensemble.

Type I: a handful of isolated configurations.
Type II: many scattered configurations with no tangent structure.
Type III: some rotors condense near their tangent planes, others do not.
Type IV: every line tangent. IV-A has no phase locking. IV-B has clean
phase-locked branches. IV-C shows locking whose branches blur beyond the
spread limit or fail the 1-D test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..manifold import tangent_frames


@dataclass(frozen=True)
class ClassificationThresholds:
    """Tunable boundaries of the taxonomy.

    Attributes
    ----------
    distinct_angle_deg : float
        Two solutions are the same configuration when every pair of
        corresponding lines is within this angle.
    max_discrete : int
        At most this many distinct configurations makes Type I.
    tangent_residual : float
        Largest ``|d . n|`` still counted as tangent.
    band_residual : float
        A rotor is condensed when 90% of its lines have ``|d . n|`` below this.
    locked_fraction : float
        Share of solutions inside offset clusters needed to call phases locked.
    spread_limit_deg : float
        Branch spread above which extraction is rejected.
    linear_fraction : float
        Leading variance fraction required for IV-B. Looser than the 0.999 of
        the strict 1-D test because near-flat directions around the branches
        of larger polygons give them a small but genuine thickness.
    fit_error_deg : float
        Locked isomers of a symmetric chassis have offsets that are rational
        multiples of pi; a branch farther than this from its best rational
        fit is treated as a fragment of a blurred band.
    """

    distinct_angle_deg: float = 1.0
    max_discrete: int = 10
    tangent_residual: float = 1e-3
    band_residual: float = 0.1
    locked_fraction: float = 0.5
    spread_limit_deg: float = 30.0
    linear_fraction: float = 0.99
    fit_error_deg: float = 2.0


def line_angle_matrix(dirs) -> np.ndarray:
    """Pairwise max-over-rotors angle (rad) between corresponding lines."""
    d = np.asarray(dirs, dtype=float)
    cos = np.abs(np.einsum("mic,kic->mki", d, d))
    return np.arccos(np.clip(cos.min(axis=2), 0.0, 1.0))


def count_distinct(dirs, angle_deg: float = 1.0) -> int:
    """Connected components of solutions linked when all lines agree within ``angle_deg``."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    d = np.asarray(dirs, dtype=float)
    if len(d) == 0:
        return 0
    adj = line_angle_matrix(d) <= np.radians(angle_deg)
    return int(connected_components(csr_matrix(adj), directed=False)[0])


def rotor_residuals(chassis, dirs) -> np.ndarray:
    """``|d_i . n_i|`` for every solution and rotor, shape ``(M, N)``."""
    n, _, _ = tangent_frames(chassis.vertices)
    return np.abs(np.einsum("mic,ic->mi", np.asarray(dirs, dtype=float), n))


@dataclass
class Classification:
    label: str
    distinct: int
    max_residual: float
    condensed_rotors: int
    locked_fraction: float | None = None
    detail: str = ""

    def line(self, k: int | None = None) -> str:
        text = f"Type {self.label}"
        if k is not None and self.label == "IV-B":
            text += f", K={k}"
        if self.detail:
            text += f" ({self.detail})"
        return text


def classify(chassis, dirs, model=None, linear=None,
             thresholds: ClassificationThresholds = ClassificationThresholds()) -> Classification:
    """Assign a taxonomy label.

    Parameters
    ----------
    chassis : Chassis
    dirs : (M, N, 3) array
        Pruned optimal directions.
    model : BranchModel, optional
        Branch extraction result (needed to tell the Type IV sub-classes apart).
    linear : LinearityReport, optional
        Result of the 1-D test.
    """
    dirs = np.asarray(dirs, dtype=float)
    res = rotor_residuals(chassis, dirs)
    distinct = count_distinct(dirs, thresholds.distinct_angle_deg)
    max_res = float(res.max())
    condensed = int((np.quantile(res, 0.9, axis=0) <= thresholds.band_residual).sum())
    base = dict(distinct=distinct, max_residual=max_res, condensed_rotors=condensed)
    if distinct <= thresholds.max_discrete:
        noun = "configuration" if distinct == 1 else "configurations"
        return Classification("I", detail=f"{distinct} distinct {noun}", **base)
    if max_res > thresholds.tangent_residual:
        label = "III" if condensed > 0 else "II"
        return Classification(label, **base)
    if model is None:
        return Classification("IV", **base)
    labelled = model.labels >= 0
    locked = float(labelled.mean()) if len(model.labels) else 0.0
    if locked < thresholds.locked_fraction:
        return Classification("IV-A", locked_fraction=locked, **base)
    spread = model.max_spread_deg
    if model.any_rejected or spread > thresholds.spread_limit_deg:
        return Classification("IV-C", locked_fraction=locked,
                              detail=f"rejected: spread {spread:.1f} deg > "
                                     f"{thresholds.spread_limit_deg:g} deg", **base)
    worst_fit = max((b.max_fit_error_deg for b in model.branches), default=0.0)
    if worst_fit > thresholds.fit_error_deg:
        return Classification("IV-C", locked_fraction=locked,
                              detail=f"incommensurate offsets: rational fit error {worst_fit:.2f} deg "
                                     f"> {thresholds.fit_error_deg:g} deg", **base)
    if linear is not None and not (linear.extent > 1e-3
                                   and linear.leading_variance_fraction >= thresholds.linear_fraction):
        return Classification("IV-C", locked_fraction=locked,
                              detail=f"not 1-D: leading variance fraction "
                                     f"{linear.leading_variance_fraction:.4f}", **base)
    return Classification("IV-B", locked_fraction=locked, **base)
