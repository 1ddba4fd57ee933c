"""Branch extraction from a matrix of intrinsic phases.

Rows are solutions, columns rotors, entries in [0, pi). A branch is a set of
rows obeying ``theta_i = chi_i * lam + delta_i (mod pi)`` for a common
parameter ``lam``. Offsets of each row relative to rotor 1 are constant along
a branch with unit chiralities, so branches are found as dense clusters in
offset space and then fitted one by one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import EmptyResultError, InsufficientDataError
from .star import rational_fit

LINEAR_THRESHOLD = 0.999
SPREAD_LIMIT_DEG = 30.0
# Below this RMS extent (rad) a cluster is a point, not a curve.
MIN_EXTENT = 1e-3


def wrap_half(x):
    """Map angles to (-pi/2, pi/2], the signed geodesic on the circle of length pi."""
    return np.pi / 2 - np.mod(np.pi / 2 - np.asarray(x, dtype=float), np.pi)


def circular_mean_pi(x, axis=0):
    """Mean of angles defined modulo pi, returned in [0, pi)."""
    x = np.asarray(x, dtype=float)
    ang = np.mod(np.arctan2(np.sin(2 * x).mean(axis=axis), np.cos(2 * x).mean(axis=axis)) / 2, np.pi)
    return np.where(ang > np.pi - 1e-12, 0.0, ang)


def phase_offsets(phases) -> np.ndarray:
    """Offsets ``(theta_i - theta_1) mod pi`` of every row."""
    phases = np.asarray(phases, dtype=float)
    return np.mod(phases - phases[:, :1], np.pi)


def unwrap_projective(phases, reference: int = 0) -> np.ndarray:
    """Lift phases from [0, pi) to the real line.

    Rows are visited in increasing order of the reference rotor's phase; each
    column is shifted by multiples of pi so that consecutive rows differ by
    less than pi/2. Reducing the result modulo pi returns the input.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 2:
        raise ValueError("phase matrix must be two-dimensional")
    if len(phases) == 0:
        return phases.copy()
    order = np.argsort(phases[:, reference], kind="stable")
    lifted = np.empty_like(phases)
    lifted[order] = np.unwrap(phases[order], period=np.pi, axis=0)
    return lifted


@dataclass
class LinearityReport:
    is_1d: bool
    leading_variance_fraction: float
    lam: np.ndarray
    extent: float


def check_1d_manifold(phases, labels=None, threshold: float = LINEAR_THRESHOLD) -> LinearityReport:
    """Principal-component test for a one-dimensional solution set.

    Each group (a provisional cluster given by ``labels``; all rows if
    ``None``; label ``-1`` ignored) is unwrapped and centred on its own mean
    before the groups are pooled, so parallel branches share one direction of
    variation. ``lam`` holds the first principal scores (``nan`` for ignored
    rows). Groups that do not extend beyond a point make the set
    zero-dimensional, which is reported as not 1-D.

    Raises
    ------
    InsufficientDataError
        Fewer usable rows than rotors.
    """
    phases = np.asarray(phases, dtype=float)
    m, n = phases.shape
    labels = np.zeros(m, dtype=int) if labels is None else np.asarray(labels)
    rows = np.flatnonzero(labels >= 0)
    if len(rows) < n:
        raise InsufficientDataError(f"need at least {n} rows for the PCA, got {len(rows)}")
    centred = np.zeros((m, n))
    for lab in np.unique(labels[rows]):
        idx = np.flatnonzero(labels == lab)
        lifted = unwrap_projective(phases[idx])
        centred[idx] = lifted - lifted.mean(axis=0)
    X = centred[rows]
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    total = float((s**2).sum())
    extent = float(np.sqrt(total / len(rows)))
    frac = float(s[0] ** 2 / total) if total > 0 else 0.0
    axis = Vt[0] if Vt[0].sum() >= 0 else -Vt[0]
    lam = np.full(m, np.nan)
    lam[rows] = X @ axis
    return LinearityReport(bool(frac >= threshold and extent > MIN_EXTENT), frac, lam, extent)


def geodesic_chebyshev(points) -> np.ndarray:
    """Pairwise max-coordinate geodesic distance on the torus of period pi."""
    pts = np.asarray(points, dtype=float)
    diff = np.abs(wrap_half(pts[:, None, :] - pts[None, :, :]))
    return diff.max(axis=2)


def dbscan(distance: np.ndarray, eps: float, min_samples: int) -> np.ndarray:
    """Density-based clustering on a precomputed distance matrix.

    Points are visited in index order, so labels are deterministic. Noise is
    labelled ``-1``; a point counts itself toward ``min_samples``.
    """
    m = len(distance)
    neighbours = [np.flatnonzero(distance[i] <= eps) for i in range(m)]
    core = np.array([len(nb) >= min_samples for nb in neighbours])
    labels = np.full(m, -1)
    current = 0
    for i in range(m):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = current
        queue = deque([i])
        while queue:
            j = queue.popleft()
            if not core[j]:
                continue
            for k in neighbours[j]:
                if labels[k] == -1:
                    labels[k] = current
                    queue.append(k)
        current += 1
    return labels


def cluster_offsets(phases, eps_deg: float = 5.0, min_samples: int = 5) -> np.ndarray:
    """Cluster rows by their offsets relative to rotor 1."""
    offsets = phase_offsets(phases)
    return dbscan(geodesic_chebyshev(offsets[:, 1:]), np.radians(eps_deg), min_samples)


@dataclass
class Branch:
    """One phase-locked family ``theta_i = chi_i * lam + delta_i``."""

    offsets: np.ndarray
    chirality: np.ndarray
    spread_deg: float
    max_fit_error_deg: float
    rational_offsets: list
    members: np.ndarray = field(repr=False)
    rejected: bool = False
    q_match: int | None = None

    def to_dict(self) -> dict:
        return {
            "q_match": self.q_match,
            "chirality": [int(c) for c in self.chirality],
            "offsets_over_pi": [float(d / np.pi) for d in self.offsets],
            "rational_offsets": [[int(a), int(b)] for a, b in self.rational_offsets],
            "spread_deg": float(self.spread_deg),
            "max_fit_error_deg": float(self.max_fit_error_deg),
            "members": int(len(self.members)),
            "rejected": bool(self.rejected),
        }


@dataclass
class BranchModel:
    n: int
    branches: list
    labels: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        """Number of accepted branches."""
        return sum(not b.rejected for b in self.branches)

    @property
    def any_rejected(self) -> bool:
        return any(b.rejected for b in self.branches)

    @property
    def max_spread_deg(self) -> float:
        return max((b.spread_deg for b in self.branches), default=0.0)

    def to_dict(self) -> dict:
        return {"N": self.n, "K": self.k, "branches": [b.to_dict() for b in self.branches]}


def _fit_branch(theta: np.ndarray, lam: np.ndarray | None, n: int) -> Branch:
    if lam is None or not np.all(np.isfinite(lam)):
        lam = unwrap_projective(theta)[:, 0]
    lam = lam - lam.mean()
    chi = np.ones(n)
    if np.std(lam) > MIN_EXTENT:
        order = np.argsort(lam, kind="stable")
        lifted = np.unwrap(theta[order], period=np.pi, axis=0)
        slopes = np.polyfit(lam[order], lifted, 1)[0]
        if slopes[0] != 0:
            chi = np.where(slopes / slopes[0] < 0, -1.0, 1.0)
    # intercepts with the slope fixed to chi and lam re-based on rotor 1
    delta = circular_mean_pi(theta - chi * theta[:, :1], axis=0)
    delta[0] = 0.0
    resid = wrap_half(theta - chi * theta[:, :1] - delta)
    spread = float(np.degrees(np.sqrt(np.mean(np.sum(resid**2, axis=1)))))
    fits = [rational_fit(d, n) for d in delta]
    return Branch(delta, chi.astype(int), spread, max(f[2] for f in fits),
                  [(f[0], f[1]) for f in fits], np.array([], dtype=int))


def cluster_branches(phases, lam=None, labels=None, eps_deg: float = 5.0, min_samples: int = 5,
                     spread_limit_deg: float = SPREAD_LIMIT_DEG) -> BranchModel:
    """Extract phase-locked branches.

    Parameters
    ----------
    phases : (M, N) array in [0, pi)
    lam : (M,) array, optional
        Branch parameter per row (e.g. scores from :func:`check_1d_manifold`).
    labels : (M,) int array, optional
        Precomputed cluster labels; computed with :func:`cluster_offsets` if omitted.
    spread_limit_deg : float
        Branches with a larger RMS spread are kept but flagged ``rejected``.

    Branches are ordered by increasing offset of rotor 2.
    """
    phases = np.asarray(phases, dtype=float)
    m, n = phases.shape
    if labels is None:
        labels = cluster_offsets(phases, eps_deg, min_samples)
    labels = np.asarray(labels)
    found = [lab for lab in np.unique(labels) if lab >= 0]
    if not found:
        raise EmptyResultError("density clustering found no branch")
    lam = None if lam is None else np.asarray(lam, dtype=float)
    branches = []
    for lab in found:
        idx = np.flatnonzero(labels == lab)
        br = _fit_branch(phases[idx], None if lam is None else lam[idx], n)
        br.members = idx
        br.rejected = br.spread_deg > spread_limit_deg
        branches.append(br)
    order = sorted(range(len(branches)), key=lambda j: (branches[j].offsets[1], j))
    branches = [branches[j] for j in order]
    relabel = np.full(m, -1)
    for new, br in enumerate(branches):
        relabel[br.members] = new
    return BranchModel(n, branches, relabel)


def write_scatter_csv(path, phases, labels) -> None:
    """``solution_index,theta_1,theta_i,rotor_i,branch`` rows for pairwise plots."""
    phases = np.asarray(phases, dtype=float)
    lines = ["solution_index,theta_1,theta_i,rotor_i,branch"]
    for m, row in enumerate(phases):
        for i in range(1, len(row)):
            lines.append(f"{m},{row[0]:.12g},{row[i]:.12g},{i + 1},{int(labels[m])}")
    Path(path).write_text("\n".join(lines) + "\n")
