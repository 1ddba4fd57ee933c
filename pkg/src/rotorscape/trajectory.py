"""Sweeps along a phase-locked branch, with control sweeps for comparison.

Along a branch ``theta = chi * lam + delta`` the wrench spectrum of a
symmetric chassis stays fixed. Two controls show that tangency alone is not
enough: a *decoherent* sweep uses seeded random offsets on the tangent torus,
and a *random* sweep draws unconstrained directions at every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chassis import Chassis
from .manifold import direction_from_phase
from .optimizer import uniform_sphere_sample
from .wrench import evaluate


@dataclass
class SweepRow:
    kind: str
    lam: float
    dirs: np.ndarray
    singular_values: np.ndarray
    log_volume: float
    kappa: float


def known_branches(chassis: Chassis) -> list[np.ndarray]:
    """Offset vectors (rad) of the optimal branches known in closed form or tabulated.

    Regular polygons use the star-polygon predictor. The octahedron and cube
    use the tabulated rows, carried into this chassis's frame.
    """
    from .topology.reference import reference_for
    from .topology.star import star_polygon_predict
    from .topology.symmetry import transported_offsets

    if chassis.family == "regular_polygon":
        return [b.radians for b in star_polygon_predict(chassis.n).branches]
    ref = reference_for(chassis.id)
    if ref is None:
        return []
    frame, rows = ref
    return [transported_offsets(frame, chassis, row, conjugate=False)[0] for row in rows]


def branch_sweep(chassis: Chassis, offsets, steps: int = 64, chirality=None,
                 controls: bool = False, seed: int = 0) -> list[SweepRow]:
    """Evaluate metrics at ``steps`` equally spaced ``lam`` in [0, pi).

    Parameters
    ----------
    offsets : (N,) array
        Branch offsets in radians.
    chirality : (N,) array of +-1, optional
        Defaults to all +1.
    controls : bool
        Also emit decoherent-phase and random-direction rows.
    seed : int
        Seed of the control draws.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    offsets = np.asarray(offsets, dtype=float)
    if offsets.shape != (chassis.n,):
        raise ValueError(f"expected {chassis.n} offsets")
    chi = np.ones(chassis.n) if chirality is None else np.asarray(chirality, dtype=float)
    lams = np.pi * np.arange(steps) / steps
    sweeps = [("branch", offsets)]
    rng = np.random.default_rng(seed)
    if controls:
        sweeps.append(("decoherent", rng.uniform(0.0, np.pi, chassis.n)))
    rows = []
    for kind, delta in sweeps:
        for lam in lams:
            d = direction_from_phase(chassis, np.mod(chi * lam + delta, np.pi))
            rep = evaluate(chassis, d)
            rows.append(SweepRow(kind, float(lam), d, rep.singular_values, rep.log_volume,
                                 rep.condition_number))
    if controls:
        for lam in lams:
            d = uniform_sphere_sample(rng, chassis.n)
            rep = evaluate(chassis, d)
            rows.append(SweepRow("random", float(lam), d, rep.singular_values, rep.log_volume,
                                 rep.condition_number))
    return rows


def relative_variation(values) -> float:
    """``(max - min) / max |value|`` of a sequence."""
    v = np.asarray(values, dtype=float)
    scale = np.abs(v).max()
    return float((v.max() - v.min()) / scale) if scale > 0 else 0.0


def write_sweep_csv(path, rows: list[SweepRow]) -> None:
    n = rows[0].dirs.shape[0] if rows else 0
    head = ["kind", "lambda"]
    head += [f"d{i + 1}{c}" for i in range(n) for c in "xyz"]
    head += [f"sigma_{k + 1}" for k in range(6)] + ["J_vol", "kappa"]
    lines = [",".join(head)]
    for r in rows:
        vals = [r.kind, f"{r.lam:.12g}"]
        vals += [f"{x:.12g}" for x in r.dirs.ravel()]
        vals += [f"{s:.15g}" for s in r.singular_values]
        vals += [f"{r.log_volume:.15g}", f"{r.kappa:.15g}"]
        lines.append(",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n")
