"""Dimensionless grasp matrix and the scalar quality metrics built on it.

Column ``i`` of the grasp matrix stacks the thrust direction ``d_i`` over the
moment it produces about the centre, ``(p_i x d_i) / L_c``. Rotor drag torque
is neglected, so every column is a Pluecker line (``d . m = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

EPSILON = 1e-9
UNIT_TOL = 1e-9
KAPPA_FLOOR = 1e-15


@dataclass(frozen=True)
class GraspMatrix:
    entries: np.ndarray
    characteristic_length: float


@dataclass(frozen=True)
class MetricReport:
    """Spectrum-derived quality metrics of one configuration."""

    singular_values: np.ndarray
    log_volume: float
    condition_number: float
    min_singular: float

    def to_dict(self) -> dict:
        kappa = self.condition_number
        return {
            "singular_values": [float(s) for s in self.singular_values],
            "log_volume": float(self.log_volume),
            "condition_number": float(kappa) if np.isfinite(kappa) else "inf",
            "min_singular": float(self.min_singular),
        }


def _check_lengths(positions: np.ndarray, dirs: np.ndarray, L_c: float) -> None:
    if dirs.ndim != 2 or dirs.shape[1] != 3:
        raise ValueError(f"directions must have shape (N, 3), got {dirs.shape}")
    if len(dirs) != len(positions):
        raise ValueError(f"chassis has {len(positions)} rotors but {len(dirs)} directions were given")
    if not L_c > 0:
        raise ValueError(f"characteristic length must be positive, got {L_c}")


def grasp_entries(positions, dirs, L_c: float = 1.0) -> np.ndarray:
    """Raw 6xN grasp matrix without input validation (directions need not be unit)."""
    positions = np.asarray(positions, dtype=float)
    dirs = np.asarray(dirs, dtype=float)
    return np.vstack([dirs.T, np.cross(positions, dirs).T / L_c])


def build_grasp(chassis, dirs, L_c: float | None = None) -> GraspMatrix:
    """Assemble the dimensionless grasp matrix.

    Parameters
    ----------
    chassis : Chassis
        Rotor positions.
    dirs : array_like
        ``(N, 3)`` unit thrust directions.
    L_c : float, optional
        Characteristic length; defaults to the chassis circumradius.
    """
    positions = chassis.vertices
    dirs = np.asarray(dirs, dtype=float)
    L_c = chassis.circumradius if L_c is None else float(L_c)
    _check_lengths(positions, dirs, L_c)
    if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > UNIT_TOL):
        raise ValueError("every direction must have unit norm")
    return GraspMatrix(grasp_entries(positions, dirs, L_c), L_c)


def metrics(A: GraspMatrix | np.ndarray, epsilon: float = EPSILON) -> MetricReport:
    """Log-volume cost, condition number and smallest singular value.

    The log-volume cost is ``-sum(log(sigma_k + epsilon))``; the condition number
    is reported as ``inf`` once the smallest singular value drops below 1e-15.
    """
    entries = A.entries if isinstance(A, GraspMatrix) else np.asarray(A, dtype=float)
    s = np.linalg.svd(entries, compute_uv=False)
    smin = float(s[-1])
    kappa = float(s[0] / smin) if smin >= KAPPA_FLOOR else float("inf")
    return MetricReport(s, float(-np.log(s + epsilon).sum()), kappa, smin)


def evaluate(chassis, dirs, L_c: float | None = None, epsilon: float = EPSILON) -> MetricReport:
    return metrics(build_grasp(chassis, dirs, L_c), epsilon)


def log_volume_batch(positions, dirs, L_c: float = 1.0, epsilon: float = EPSILON):
    """Cost and raw-coordinate gradient for a batch of configurations.

    Parameters
    ----------
    positions : (N, 3) array
    dirs : (B, N, 3) array
        Directions; treated as raw coordinates (no normalization).

    Returns
    -------
    grad : (B, N, 3) array
        ``dJ/dd_i`` of ``J = -sum(log(sigma_k + epsilon))``.
    cost : (B,) array
    """
    P = np.asarray(positions, dtype=float)
    D = np.asarray(dirs, dtype=float)
    A = np.concatenate(
        [np.swapaxes(D, 1, 2), np.swapaxes(np.cross(P[None], D), 1, 2) / L_c], axis=1
    )
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    G = -np.einsum("bik,bk,bkj->bij", U, 1.0 / (s + epsilon), Vt)
    top = np.swapaxes(G[:, :3], 1, 2)
    bottom = np.swapaxes(G[:, 3:], 1, 2)
    return top + np.cross(bottom, P[None]) / L_c, -np.log(s + epsilon).sum(axis=1)


def kappa_batch(positions, dirs, L_c: float = 1.0):
    """Condition number and its (sub)gradient in raw coordinates.

    Uses ``d kappa = (u_1 v_1^T sigma_6 - sigma_1 u_6 v_6^T) / sigma_6^2``; where
    the extreme singular values are repeated this is one element of the
    subdifferential.
    """
    P = np.asarray(positions, dtype=float)
    D = np.asarray(dirs, dtype=float)
    A = np.concatenate(
        [np.swapaxes(D, 1, 2), np.swapaxes(np.cross(P[None], D), 1, 2) / L_c], axis=1
    )
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    s1, s6 = s[:, 0], np.maximum(s[:, -1], KAPPA_FLOOR)
    hi = np.einsum("bi,bj->bij", U[:, :, 0], Vt[:, 0, :])
    lo = np.einsum("bi,bj->bij", U[:, :, -1], Vt[:, -1, :])
    G = (hi * s6[:, None, None] - s1[:, None, None] * lo) / (s6**2)[:, None, None]
    top = np.swapaxes(G[:, :3], 1, 2)
    bottom = np.swapaxes(G[:, 3:], 1, 2)
    return top + np.cross(bottom, P[None]) / L_c, s1 / s6


def project_tangent(grad: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Remove the radial component of each row's gradient."""
    return grad - (grad * dirs).sum(-1, keepdims=True) * dirs


def cost_gradient(chassis, dirs, L_c: float | None = None, epsilon: float = EPSILON) -> np.ndarray:
    """Gradient of the log-volume cost of the *lines* through ``dirs``.

    The cost is evaluated on normalized directions, so it depends only on each
    rotor's line and the gradient has no component along ``d_i``.

    Returns
    -------
    (N, 3) array of partials with respect to the direction coordinates.
    """
    d = np.asarray(dirs, dtype=float)
    L_c = chassis.circumradius if L_c is None else float(L_c)
    _check_lengths(chassis.vertices, d, L_c)
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    unit = d / norms
    grad, _ = log_volume_batch(chassis.vertices, unit[None], L_c, epsilon)
    return project_tangent(grad[0], unit) / norms


def kappa_gradient(chassis, dirs, L_c: float | None = None) -> np.ndarray:
    """Condition-number analogue of :func:`cost_gradient`."""
    d = np.asarray(dirs, dtype=float)
    L_c = chassis.circumradius if L_c is None else float(L_c)
    _check_lengths(chassis.vertices, d, L_c)
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    unit = d / norms
    grad, _ = kappa_batch(chassis.vertices, unit[None], L_c)
    return project_tangent(grad[0], unit) / norms


@dataclass(frozen=True)
class SensitivityRow:
    ratio: float
    kappa: float
    sigma_min: float


def sensitivity_sweep(chassis, dirs, ratios) -> list[SensitivityRow]:
    """Metrics of a fixed configuration as ``L_c = ratio * circumradius`` varies."""
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise ValueError("ratio list is empty")
    if any(r <= 0 for r in ratios):
        raise ValueError("ratios must be positive")
    rows = []
    for r in ratios:
        rep = evaluate(chassis, dirs, r * chassis.circumradius)
        rows.append(SensitivityRow(r, rep.condition_number, rep.min_singular))
    return rows


def write_sensitivity_csv(path, rows) -> None:
    lines = ["ratio,kappa,sigma_min"]
    lines += [f"{r.ratio:.12g},{r.kappa:.12g},{r.sigma_min:.12g}" for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")
