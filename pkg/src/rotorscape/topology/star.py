"""Closed-form star-polygon predictor for regular polygons and branch matching.

For an ``N``-gon the optimal branches are indexed by the star-polygon
densities ``q`` with ``2 < q < N - 2``; branch ``q`` has offsets
``delta_v = (v - 1) * q * pi / N (mod pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

MAX_DENOMINATOR = 12


def valid_densities(n: int) -> list[int]:
    """Admissible densities ``{q : 2 < q < n - 2}``; there are ``n - 5`` of them for ``n >= 6``."""
    return list(range(3, n - 2))


@dataclass(frozen=True)
class StarBranch:
    q: int
    offsets: tuple  # Fractions of pi in [0, 1)

    @property
    def radians(self) -> np.ndarray:
        return np.array([float(f) for f in self.offsets]) * np.pi


@dataclass(frozen=True)
class StarPrediction:
    n: int
    branches: tuple = field(default_factory=tuple)
    note: str = ""

    @property
    def k(self) -> int:
        return len(self.branches)


def star_polygon_predict(n: int) -> StarPrediction:
    """Predicted branch offsets of the regular ``n``-gon, exact as fractions of pi.

    For ``n < 6`` the admissible density set is empty and so is the prediction.
    """
    n = int(n)
    if n < 6:
        return StarPrediction(n, (), "Q_valid empty: no admissible density for N < 6")
    branches = tuple(
        StarBranch(q, tuple(Fraction((v * q) % n, n) for v in range(n)))
        for q in valid_densities(n)
    )
    return StarPrediction(n, branches)


def write_prediction_csv(path, prediction: StarPrediction) -> None:
    lines = ["N,q,vertex,offset_over_pi"]
    for br in prediction.branches:
        for v, f in enumerate(br.offsets):
            lines.append(f"{prediction.n},{br.q},{v + 1},{int(f * prediction.n)}/{prediction.n}")
    Path(path).write_text("\n".join(lines) + "\n")


def _circle_error_deg(delta: float, num: int, den: int) -> float:
    d = (delta - num * np.pi / den) % np.pi
    return float(np.degrees(min(d, np.pi - d)))


def rational_fit(delta: float, n: int, fallback_deg: float | None = None,
                 max_denominator: int = MAX_DENOMINATOR) -> tuple[int, int, float]:
    """Nearest fraction ``r / d`` with ``delta ~ r * pi / d``, preferring ``d = n``.

    Fractions over ``n`` are tried first. If the best is farther than
    ``fallback_deg`` (default: a quarter of the ``pi / n`` grid spacing) every
    denominator up to ``max_denominator`` is searched, smaller denominators
    winning ties.

    Returns
    -------
    numerator, denominator, error_deg
    """
    if n < 1:
        raise ValueError("denominator must be positive")
    fallback_deg = 45.0 / n if fallback_deg is None else fallback_deg
    best = min(((r, n, _circle_error_deg(delta, r, n)) for r in range(n)), key=lambda t: t[2])
    if best[2] <= fallback_deg:
        return best
    cands = [(r, d, _circle_error_deg(delta, r, d))
             for d in range(1, max_denominator + 1) for r in range(d) if gcd(r, d) == 1]
    alt = min(cands, key=lambda t: (round(t[2], 12), t[1]))
    return alt if alt[2] < best[2] else best


def aligned_distance_deg(a, b) -> float:
    """Max geodesic difference (deg) of two offset vectors after the best global phase."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    shift = np.arctan2(np.sin(2 * diff).mean(), np.cos(2 * diff).mean()) / 2
    resid = np.pi / 2 - np.mod(np.pi / 2 - (diff - shift), np.pi)
    return float(np.degrees(np.abs(resid).max()))


@dataclass
class MatchReport:
    """Result of pairing extracted branches with reference branches."""

    pairs: list  # (extracted index, reference label, error in degrees)
    unmatched_extracted: list
    unmatched_reference: list
    tolerance_deg: float

    @property
    def all_matched(self) -> bool:
        return not self.unmatched_extracted and not self.unmatched_reference

    @property
    def max_error_deg(self) -> float:
        return max((p[2] for p in self.pairs), default=0.0)

    def to_dict(self) -> dict:
        return {
            "pairs": [{"branch": int(k), "reference": ref, "error_deg": float(e)}
                      for k, ref, e in self.pairs],
            "unmatched_extracted": [int(k) for k in self.unmatched_extracted],
            "unmatched_reference": list(self.unmatched_reference),
            "tolerance_deg": float(self.tolerance_deg),
        }


def assign(cost: np.ndarray, labels: list, tol_deg: float) -> MatchReport:
    """Minimum-cost bipartite pairing; pairs above ``tol_deg`` count as unmatched."""
    rows, cols = linear_sum_assignment(cost) if cost.size else (np.array([], int), np.array([], int))
    pairs = [(int(r), labels[c], float(cost[r, c])) for r, c in zip(rows, cols)
             if cost[r, c] <= tol_deg + 1e-12]
    hit_rows = {p[0] for p in pairs}
    hit_refs = {p[1] for p in pairs}
    return MatchReport(pairs, [k for k in range(cost.shape[0]) if k not in hit_rows],
                       [lab for lab in labels if lab not in hit_refs], tol_deg)


def match_branches(extracted, predicted: StarPrediction, tol_deg: float = 1.0) -> MatchReport:
    """Pair extracted polygon branches with predicted densities.

    Offsets are compared modulo one global phase per pair. Rejected branches
    take part in the matching like any other. Matched branches get their
    ``q_match`` set.
    """
    if extracted.n != predicted.n:
        raise ValueError(f"extracted N={extracted.n} but predicted N={predicted.n}")
    cost = np.array([[aligned_distance_deg(b.offsets, p.radians) for p in predicted.branches]
                     for b in extracted.branches]).reshape(len(extracted.branches), predicted.k)
    report = assign(cost, [p.q for p in predicted.branches], tol_deg)
    for k, q, _ in report.pairs:
        extracted.branches[k].q_match = q
    return report


def prediction_as_model(prediction: StarPrediction):
    """Wrap a prediction as a :class:`BranchModel` with ideal, zero-spread branches."""
    from .branches import Branch, BranchModel

    branches = [
        Branch(br.radians, np.ones(prediction.n, dtype=int), 0.0, 0.0,
               [(f.numerator, f.denominator) for f in br.offsets], np.array([], dtype=int),
               q_match=br.q)
        for br in prediction.branches
    ]
    return BranchModel(prediction.n, branches, np.array([], dtype=int))
