"""Semi-ellipse fitting of per-rotor disc clouds.

The lines tangent to the sphere at a rotor position project onto the
equatorial disc as an ellipse of semi-major axis 1 and semi-minor axis
``b = |n_z|``; canonical representatives cover one half of it. Fitting
``(psi, b)`` to each rotor's cloud therefore recovers the tangent plane, and
comparing against the plane implied by the rotor position tests collapse onto
the tangent torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from ..errors import InsufficientDataError
from ..manifold import canonicalize, disc_project, tangent_frames

MIN_POINTS = 8
_GRID = np.linspace(0.0, 2 * np.pi, 181)[:-1]


@dataclass(frozen=True)
class EllipseFitReport:
    """Per-rotor fitted azimuth ``psi`` (rad), elevation ``eta`` (rad) and RMS distance.

    ``psi`` is oriented so that the fitted half-ellipse bulges toward
    ``(sin psi, -cos psi)``.
    """

    psi: np.ndarray
    eta: np.ndarray
    rms_residual: np.ndarray

    @property
    def minor_axis(self) -> np.ndarray:
        return np.cos(self.eta)

    def to_dict(self) -> dict:
        return {
            "rotors": [
                {"rotor": i + 1, "psi_deg": float(np.degrees(p)), "eta_deg": float(np.degrees(e)),
                 "rms_residual": float(r)}
                for i, (p, e, r) in enumerate(zip(self.psi, self.eta, self.rms_residual))
            ]
        }


def _foot_points(points: np.ndarray, psi: float, b: float):
    c, s = np.cos(psi), np.sin(psi)
    x = points[:, 0] * c + points[:, 1] * s
    y = -points[:, 0] * s + points[:, 1] * c
    # coarse grid, then bisection on the stationarity condition within one cell
    dx = x[:, None] - np.cos(_GRID)[None]
    dy = y[:, None] - b * np.sin(_GRID)[None]
    t = _GRID[np.argmin(dx * dx + dy * dy, axis=1)]
    h = _GRID[1]

    def slope(u):
        return -np.sin(u) * (np.cos(u) - x) + b * np.cos(u) * (b * np.sin(u) - y)

    def dist2(u):
        return (np.cos(u) - x) ** 2 + (b * np.sin(u) - y) ** 2

    rising = slope(t) > 0
    lo, hi = np.where(rising, t - h, t), np.where(rising, t, t + h)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        down = slope(mid) < 0
        lo, hi = np.where(down, mid, lo), np.where(down, hi, mid)
    fine = 0.5 * (lo + hi)
    t = np.where(dist2(fine) < dist2(t), fine, t)
    return x, y, t


def ellipse_distance(points: np.ndarray, psi: float, b: float) -> np.ndarray:
    """Euclidean distance from each 2-D point to the centred ellipse ``(1, b)`` rotated by ``psi``."""
    x, y, t = _foot_points(np.asarray(points, dtype=float), psi, b)
    return np.hypot(np.cos(t) - x, b * np.sin(t) - y)


def _signed_distance(points: np.ndarray, psi: float, b: float):
    # positive outside the ellipse; smooth through the curve, unlike the plain distance
    x, y, t = _foot_points(points, psi, b)
    nx, ny = b * np.cos(t), np.sin(t)
    norm = np.hypot(nx, ny)
    nx, ny = nx / norm, ny / norm
    d = nx * (x - np.cos(t)) + ny * (y - b * np.sin(t))
    return d, x, y, t, nx, ny


def _distance_jacobian(points: np.ndarray, psi: float, b: float) -> np.ndarray:
    # the foot point is stationary, so only the explicit dependence matters
    _, x, y, t, nx, ny = _signed_distance(points, psi, b)
    return np.column_stack([nx * y - ny * x, -ny * np.sin(t)])


def fit_semi_ellipse(points) -> tuple[float, float, float]:
    """Fit one rotor's disc cloud.

    Returns
    -------
    psi : float
        Orientation in [0, 2*pi) after the half-plane flip.
    b : float
        Minor semi-axis in [0, 1].
    rms : float
        Root-mean-square point-to-curve distance.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < MIN_POINTS:
        raise InsufficientDataError(f"need at least {MIN_POINTS} points, got {len(pts)}")
    # the cloud and its antipodal copy share the ellipse's principal axes
    w, V = np.linalg.eigh(pts.T @ pts)
    psi0 = float(np.arctan2(V[1, -1], V[0, -1]))

    def resid(x):
        return _signed_distance(pts, x[0], x[1])[0]

    def jac(x):
        return _distance_jacobian(pts, x[0], x[1])

    best = None
    starts = [(psi0, 0.05), (psi0, 0.5), (psi0, 0.95), (psi0 + np.pi / 2, 0.5)]
    for p0, b0 in starts:
        sol = least_squares(resid, [p0, b0], jac=jac,
                            x_scale=[1.0, 0.1], xtol=1e-10, ftol=1e-12, gtol=1e-12, max_nfev=100)
        if best is None or sol.cost < best.cost:
            best = sol
    # the curve is unchanged by the sign of b, and the boundaries b = 0, 1 are
    # reached without bounds so exact clouds fit to rounding
    psi, b = float(best.x[0]), float(min(abs(best.x[1]), 1.0))
    centroid = pts.mean(axis=0)
    if centroid @ np.array([np.sin(psi), -np.cos(psi)]) <= 0:
        psi += np.pi
    rms = float(np.sqrt(np.mean(resid([psi, b]) ** 2)))
    return psi % (2 * np.pi), b, rms


def fit_semi_ellipses(solutions, chassis=None) -> EllipseFitReport:
    """Fit every rotor of a solution ensemble.

    Parameters
    ----------
    solutions : SolutionSet or array_like
        Either a :class:`~rotorscape.optimizer.SolutionSet` or an ``(M, N, 3)``
        array of directions.
    chassis : Chassis, optional
        Only used to check the rotor count.
    """
    dirs = np.asarray(getattr(solutions, "dirs", solutions), dtype=float)
    if dirs.ndim != 3 or len(dirs) < MIN_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_POINTS} solutions to fit ellipses, got {len(dirs)}")
    if chassis is not None and dirs.shape[1] != chassis.n:
        raise ValueError("solution rotor count does not match the chassis")
    xy = disc_project(canonicalize(dirs))
    fits = [fit_semi_ellipse(xy[:, i]) for i in range(dirs.shape[1])]
    psi, b, rms = (np.array(col) for col in zip(*fits))
    return EllipseFitReport(psi, np.arccos(b), rms)


def expected_ellipses(chassis) -> tuple[np.ndarray, np.ndarray]:
    """``(psi, eta)`` of the tangent-plane half-ellipse at each rotor.

    ``psi`` is ``nan`` at the poles, where the curve is the full rim circle.
    """
    n, _, _ = tangent_frames(chassis.vertices)
    horiz = np.linalg.norm(n[:, :2], axis=1)
    sign = np.where(n[:, 2] < 0, -1.0, 1.0)
    bulge = -sign[:, None] * n[:, :2] / np.where(horiz > 1e-9, horiz, 1.0)[:, None]
    psi = np.arctan2(bulge[:, 0], -bulge[:, 1]) % (2 * np.pi)
    psi[horiz <= 1e-9] = np.nan
    eta = np.arccos(np.clip(np.abs(n[:, 2]), 0.0, 1.0))
    return psi, eta


def verify_tangent_collapse(report: EllipseFitReport, chassis, tol_deg: float = 1.0) -> np.ndarray:
    """Per-rotor check that the fitted curve is the rotor's tangent-plane curve.

    A rotor passes when the fitted azimuth and elevation are both within
    ``tol_deg`` of the values implied by its position and the cloud lies on
    the fitted curve to within ``sin(tol_deg)``. Azimuth is ignored at the
    poles and compared modulo pi on the equator, where the half-ellipse
    degenerates to a diameter.
    """
    if len(report.psi) != chassis.n:
        raise ValueError("report and chassis have different rotor counts")
    psi_ref, eta_ref = expected_ellipses(chassis)
    tol = np.radians(tol_deg)
    eta_ok = np.abs(report.eta - eta_ref) <= tol
    flat = np.isclose(eta_ref, np.pi / 2, atol=1e-9)
    period = np.where(flat, np.pi, 2 * np.pi)
    diff = np.mod(report.psi - np.nan_to_num(psi_ref) + period / 2, period) - period / 2
    psi_ok = np.isnan(psi_ref) | (np.abs(diff) <= tol)
    return eta_ok & psi_ok & (report.rms_residual <= np.sin(tol))


def mean_curve_distance(dirs, report: EllipseFitReport | None = None) -> float:
    """Mean orthogonal distance of all disc points to their rotor's fitted curve."""
    dirs = np.asarray(dirs, dtype=float)
    report = report or fit_semi_ellipses(dirs)
    xy = disc_project(canonicalize(dirs))
    dist = [ellipse_distance(xy[:, i], report.psi[i], np.cos(report.eta[i]))
            for i in range(dirs.shape[1])]
    return float(np.mean(np.concatenate(dist)))
