"""Comparison of branch offsets between two placements of the same solid.

Offsets depend on vertex labels and on each vertex's tangent frame. To compare
a branch found on one chassis with a row tabulated for a congruent chassis in
another pose or labelling, the branch is carried over by every orthogonal map
sending one vertex set onto the other. Its phases are then re-read in the
target frame and compared modulo a global phase. Optionally the orientation of
the phase circle is also quotiented out (``theta -> -theta``).
"""

from __future__ import annotations

import itertools

import numpy as np

from ..manifold import direction_from_phase, phase_from_direction
from .star import aligned_distance_deg, assign


def similarity_maps(source, target, tol: float = 1e-6) -> list[tuple[np.ndarray, np.ndarray]]:
    """All orthogonal ``R`` (rotations and reflections) with ``R @ source == target`` as sets.

    Returns
    -------
    list of (R, perm)
        ``perm[i]`` is the index of the target vertex hit by source vertex ``i``.
    """
    P = np.asarray(getattr(source, "vertices", source), dtype=float)
    Q = np.asarray(getattr(target, "vertices", target), dtype=float)
    if P.shape != Q.shape:
        return []
    # two independent source vertices plus their normal fix any orthogonal map
    pair = next(((i, j) for i, j in itertools.combinations(range(len(P)), 2)
                 if np.linalg.norm(np.cross(P[i], P[j])) > 1e-3), None)
    if pair is None:
        return []
    a, b = P[list(pair)]
    Pf = np.array([a, b, np.cross(a, b)])
    inv = np.linalg.inv(Pf)
    gram = np.array([a @ a, b @ b, a @ b])
    maps, seen = [], set()
    for i, j in itertools.permutations(range(len(Q)), 2):
        qa, qb = Q[i], Q[j]
        if not np.allclose([qa @ qa, qb @ qb, qa @ qb], gram, atol=1e-6):
            continue
        for sign in (1.0, -1.0):
            R = (inv @ np.array([qa, qb, sign * np.cross(qa, qb)])).T
            if not np.allclose(R @ R.T, np.eye(3), atol=1e-6):
                continue
            dist = np.linalg.norm((P @ R.T)[:, None, :] - Q[None, :, :], axis=2)
            perm = dist.argmin(axis=1)
            if dist[np.arange(len(P)), perm].max() > tol or len(set(perm)) != len(P):
                continue
            key = (tuple(perm), round(float(np.linalg.det(R))))
            if key not in seen:
                seen.add(key)
                maps.append((R, perm))
    return maps


def transported_offsets(source, target, offsets, maps=None, conjugate: bool = True) -> list[np.ndarray]:
    """Offsets of a source branch expressed in the target's labels and frames."""
    maps = similarity_maps(source, target) if maps is None else maps
    dirs = direction_from_phase(source, np.asarray(offsets, dtype=float))
    out = []
    for R, perm in maps:
        moved = np.empty_like(dirs)
        moved[perm] = dirs @ R.T
        theta, _ = phase_from_direction(target, moved)
        out.append(theta)
        if conjugate:
            out.append(np.mod(-theta, np.pi))
    return out


def quotient_distance_deg(source, target, offsets, reference, maps=None, conjugate: bool = True) -> float:
    """Smallest aligned distance between a transported branch and a reference row."""
    cands = transported_offsets(source, target, offsets, maps, conjugate)
    return min(aligned_distance_deg(c, reference) for c in cands) if cands else float("inf")


def match_under_symmetry(extracted, source, target, reference_rows, tol_deg: float = 1.0,
                         conjugate: bool = True):
    """Pair extracted branches with reference rows under the symmetry quotient."""
    maps = similarity_maps(source, target)
    rows = [np.asarray(r, dtype=float) for r in reference_rows]
    cost = np.array([[quotient_distance_deg(source, target, b.offsets, r, maps, conjugate)
                      for r in rows] for b in extracted.branches]).reshape(len(extracted.branches), len(rows))
    return assign(cost, list(range(1, len(rows) + 1)), tol_deg)
