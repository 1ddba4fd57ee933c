"""Projective geometry of rotor lines.

A rotor's line of action is a point of the real projective plane: ``d`` and
``-d`` describe the same line. This module picks canonical representatives,
projects them onto the equatorial disc, and parameterizes the circle of lines
orthogonal to each rotor's position vector by a phase in [0, pi).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

POLE_TOL = 1e-9
_EZ = np.array([0.0, 0.0, 1.0])
_EY = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class TangentBasis:
    """Right-handed orthonormal frame at one rotor.

    ``n`` is radial, ``u`` azimuthal (horizontal), ``v = n x u`` polar.
    """

    n: np.ndarray
    u: np.ndarray
    v: np.ndarray


def _as_vectors(d) -> np.ndarray:
    arr = np.asarray(d, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected 3-vectors, got shape {arr.shape}")
    return arr


def canonicalize(d) -> np.ndarray:
    """Map each line to its upper-hemisphere representative.

    The representative has z > 0, or z = 0 and y > 0, or z = y = 0 and x > 0.
    Accepts a single vector or an array of shape ``(..., 3)``.
    """
    arr = _as_vectors(d)
    if np.any(np.linalg.norm(arr, axis=-1) == 0.0):
        raise ValueError("cannot canonicalize the zero vector")
    x, y, z = arr[..., 0], arr[..., 1], arr[..., 2]
    flip = (z < 0) | ((z == 0) & (y < 0)) | ((z == 0) & (y == 0) & (x < 0))
    return np.where(flip[..., None], -arr, arr)


def disc_project(d) -> np.ndarray:
    """Orthographic projection onto the equatorial disc: ``(d_x, d_y)``."""
    return _as_vectors(d)[..., :2].copy()


def tangent_frames(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`tangent_basis` for an ``(N, 3)`` array of positions.

    Returns ``(n, u, v)`` each of shape ``(N, 3)``. Away from the poles
    ``u = e_z x n / |e_z x n|``; at the poles ``u = e_y x n / |e_y x n|``,
    which gives ``u = (1, 0, 0)`` at the north pole.
    """
    p = np.atleast_2d(_as_vectors(points))
    norms = np.linalg.norm(p, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("tangent basis is undefined at the origin")
    n = p / norms
    u = np.cross(_EZ, n)
    s = np.linalg.norm(u, axis=1)
    pole = s <= POLE_TOL
    if np.any(pole):
        u[pole] = np.cross(_EY, n[pole])
        s[pole] = np.linalg.norm(u[pole], axis=1)
    u /= s[:, None]
    v = np.cross(n, u)
    return n, u, v


def tangent_basis(p) -> TangentBasis:
    """Tangent frame at a single position vector ``p``."""
    n, u, v = tangent_frames(np.asarray(p, dtype=float)[None, :])
    return TangentBasis(n[0], u[0], v[0])


def _vertices(chassis_or_points) -> np.ndarray:
    return np.asarray(getattr(chassis_or_points, "vertices", chassis_or_points), dtype=float)


def direction_from_phase(chassis, theta) -> np.ndarray:
    """Directions ``cos(theta_i) u_i + sin(theta_i) v_i`` on the tangent circles.

    ``theta`` may be ``(N,)`` or a batch ``(M, N)``; the result has a trailing
    axis of length 3.
    """
    verts = _vertices(chassis)
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != len(verts):
        raise ValueError(f"expected {len(verts)} phases, got {theta.shape[-1]}")
    _, u, v = tangent_frames(verts)
    return np.cos(theta)[..., None] * u + np.sin(theta)[..., None] * v


def phase_from_direction(chassis, dirs) -> tuple[np.ndarray, float]:
    """Intrinsic phases in [0, pi) and the largest radial component.

    Works on ``(N, 3)`` or batched ``(M, N, 3)`` input; the residual is the
    maximum of ``|d_i . n_i|`` over everything passed in.
    """
    verts = _vertices(chassis)
    d = _as_vectors(dirs)
    if d.shape[-2] != len(verts):
        raise ValueError(f"expected {len(verts)} directions, got {d.shape[-2]}")
    n, u, v = tangent_frames(verts)
    theta = np.arctan2((d * v).sum(-1), (d * u).sum(-1))
    theta = np.where(theta < 0, theta + np.pi, theta)
    theta = np.where(theta >= np.pi, theta - np.pi, theta) + 0.0
    residual = float(np.abs((d * n).sum(-1)).max())
    return theta, residual


def tangency_residual(chassis, dirs) -> float:
    """``max_i |d_i . n_i|``: zero exactly when every line is tangent."""
    verts = _vertices(chassis)
    d = _as_vectors(dirs)
    if d.shape[-2] != len(verts):
        raise ValueError(f"expected {len(verts)} directions, got {d.shape[-2]}")
    n, _, _ = tangent_frames(verts)
    return float(np.abs((d * n).sum(-1)).max())


def write_disc_csv(path, dirs_batch) -> None:
    """Write ``solution_index,rotor,x,y`` rows for a ``(M, N, 3)`` batch.

    Rotors are numbered from 1.
    """
    d = canonicalize(np.asarray(dirs_batch, dtype=float))
    xy = disc_project(d)
    lines = ["solution_index,rotor,x,y"]
    for m in range(xy.shape[0]):
        for i in range(xy.shape[1]):
            lines.append(f"{m},{i + 1},{xy[m, i, 0]:.12g},{xy[m, i, 1]:.12g}")
    Path(path).write_text("\n".join(lines) + "\n")
