"""Local minimization on products of projective planes and multi-start search.

The local solver works directly on unit directions. A Riemannian gradient
descent phase (Barzilai-Borwein step, Armijo backtracking, renormalization)
brings a start into a basin. For the log-volume objective a damped Newton
phase then polishes the result: the Hessian comes from central differences of
the analytic gradient in local tangent coordinates, and the step uses
``|eigenvalues| + mu`` so saddles are escaped rather than approached. Both
phases only ever accept non-increasing cost.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .chassis import Chassis
from .errors import EmptyResultError
from .manifold import canonicalize
from .wrench import EPSILON, kappa_batch, log_volume_batch, project_tangent

OBJECTIVES = {"log_volume": "log_volume", "logvol": "log_volume",
              "condition_number": "condition_number", "kappa": "condition_number"}
MIN_ROTORS = 6


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the local solver.

    Attributes
    ----------
    max_iterations : int
        Iteration budget of the gradient phase.
    gradient_tolerance : float
        Stop once the tangent gradient (all rotors stacked) is this small.
    step_tolerance : float
        An accepted step shorter than this counts as stagnation.
    epsilon : float
        Barrier regularization inside the logarithm.
    objective : str
        ``"log_volume"`` or ``"condition_number"`` (aliases ``logvol``, ``kappa``).
    newton_iterations : int
        Budget of the Newton polish (log-volume only; 0 disables it).
    polish_threshold : float
        Gradient norm at which the gradient phase hands over to the Newton
        polish. Gradient descent is sublinear on the degenerate minima that
        symmetric chassis produce, so it is only used to reach a basin.
    """

    max_iterations: int = 2000
    gradient_tolerance: float = 1e-6
    step_tolerance: float = 1e-10
    epsilon: float = EPSILON
    objective: str = "log_volume"
    newton_iterations: int = 100
    polish_threshold: float = 1e-2

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be an integer >= 1, got {self.max_iterations}")
        if self.newton_iterations < 0:
            raise ValueError("newton_iterations must be >= 0")
        for name in ("gradient_tolerance", "step_tolerance", "epsilon", "polish_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        object.__setattr__(self, "objective", OBJECTIVES[self.objective])


@dataclass
class LocalResult:
    dirs: np.ndarray
    cost: float
    converged: bool
    iterations: int
    gradient_norm: float


def require_full_actuation(chassis: Chassis) -> None:
    """Six independent wrench directions need at least six rotors."""
    if chassis.n < MIN_ROTORS:
        raise ValueError(f"{chassis.id} has {chassis.n} rotors; at least {MIN_ROTORS} are required")


def uniform_sphere_sample(rng: np.random.Generator, size: int | tuple | None = None) -> np.ndarray:
    """Uniform points on the unit sphere via normalized Gaussian triples."""
    shape = (3,) if size is None else (*np.atleast_1d(size), 3)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


class _Objective:
    def __init__(self, positions, L_c, config):
        self.P = positions
        self.L = L_c
        self.eps = config.epsilon
        self.kind = config.objective

    def batch(self, D):
        if self.kind == "log_volume":
            return log_volume_batch(self.P, D, self.L, self.eps)
        return kappa_batch(self.P, D, self.L)

    def __call__(self, D):
        g, f = self.batch(D[None])
        return project_tangent(g[0], D), float(f[0])


def _normalize(X):
    return X / np.linalg.norm(X, axis=-1, keepdims=True)


def _gradient_phase(obj, D, iters, gtol, step_tol):
    g, f = obj(D)
    step = 0.1
    gn = float(np.linalg.norm(g))
    for it in range(iters):
        if gn <= gtol:
            return D, f, g, it, "gradient"
        t = step
        while True:
            Dn = _normalize(D - t * g)
            if not np.all(np.isfinite(Dn)):
                return D, f, g, it, "stalled"
            gn_new, fn = obj(Dn)
            if fn <= f - 1e-4 * t * gn**2:
                break
            t *= 0.5
            if t < 1e-16:
                return D, f, g, it, "stalled"
        s = (Dn - D).ravel()
        y = (gn_new - g).ravel()
        sy = s @ y
        step = min(max((s @ s) / sy if sy > 1e-20 else 1.0, 1e-6), 10.0)
        moved = float(np.linalg.norm(s))
        D, f, g = Dn, fn, gn_new
        gn = float(np.linalg.norm(g))
        if moved <= step_tol:
            return D, f, g, it + 1, "stalled"
    return D, f, g, iters, "budget"


def _local_frames(D):
    ref = np.where(np.abs(D[:, [0]]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    b1 = _normalize(np.cross(D, ref))
    return b1, np.cross(D, b1)


def _chart_gradient(obj, D, b1, b2, coords):
    """Gradient of the cost in tangent coordinates at a batch of chart points."""
    n = len(D)
    X = D[None] + coords[:, :n, None] * b1[None] + coords[:, n:, None] * b2[None]
    norms = np.linalg.norm(X, axis=2, keepdims=True)
    Y = X / norms
    g, f = obj.batch(Y)
    g = project_tangent(g, Y) / norms
    return np.concatenate([(g * b1).sum(2), (g * b2).sum(2)], axis=1), f


def _newton_phase(obj, D, f, iters, gtol, step_tol, h=1e-6):
    n = len(D)
    mu = 1e-3
    probes = np.vstack([np.zeros(2 * n), h * np.eye(2 * n), -h * np.eye(2 * n)])
    gn = np.inf
    for it in range(iters):
        b1, b2 = _local_frames(D)
        G, _ = _chart_gradient(obj, D, b1, b2, probes)
        g = G[0]
        gn = float(np.linalg.norm(g))
        if gn <= gtol:
            return D, f, gn, it, "gradient"
        H = (G[1 : 2 * n + 1] - G[2 * n + 1 :]).T / (2 * h)
        w, V = np.linalg.eigh((H + H.T) / 2)
        proj = V.T @ g
        while True:
            step = -V @ (proj / (np.abs(w) + mu))
            Dn = _normalize(D + step[:n, None] * b1 + step[n:, None] * b2)
            _, fn = obj(Dn)
            if fn <= f:
                mu = max(mu / 3, 1e-12)
                break
            mu *= 10
            if mu > 1e6:
                return D, f, gn, it, "stalled"
        D, f = Dn, fn
        if float(np.linalg.norm(step)) <= step_tol:
            return D, f, gn, it + 1, "stalled"
    return D, f, gn, iters, "budget"


def local_minimize(chassis: Chassis, initial, config: SolverConfig | None = None) -> LocalResult:
    """Minimize the configured objective from ``initial`` under unit-norm constraints.

    ``converged`` is true when the stacked tangent gradient is at most
    ``gradient_tolerance``, or when the solver can no longer make progress
    (step shorter than ``step_tolerance`` or line search exhausted) with a
    gradient within 100x the tolerance. For the condition-number objective,
    which is not differentiable at its minimizers, stagnation alone counts.
    The returned directions are canonicalized.
    """
    config = config or SolverConfig()
    obj = _Objective(chassis.vertices, chassis.circumradius, config)
    D = _normalize(np.asarray(initial, dtype=float))
    if D.shape != (chassis.n, 3):
        raise ValueError(f"initial directions must have shape ({chassis.n}, 3)")
    gtol, stol = config.gradient_tolerance, config.step_tolerance
    polish = config.objective == "log_volume" and config.newton_iterations > 0
    target = max(gtol, config.polish_threshold) if polish else gtol
    D, f, g, iters, why = _gradient_phase(obj, D, int(config.max_iterations), target, stol)
    gn = float(np.linalg.norm(g))
    if polish and gn > gtol:
        D, f, gn, extra, why = _newton_phase(obj, D, f, config.newton_iterations, gtol, stol)
        iters += extra
    if why == "gradient":
        converged = True
    elif config.objective == "condition_number":
        converged = why == "stalled"
    else:
        converged = why == "stalled" and gn <= 100 * gtol
    return LocalResult(canonicalize(D), f, bool(converged), iters, gn)


def _sample_start(chassis_n: int, seed: int, index: int) -> np.ndarray:
    return uniform_sphere_sample(np.random.default_rng([seed, index]), chassis_n)


def _run_chunk(args):
    chassis, seed, indices, config = args
    out = []
    for idx in indices:
        t0 = time.perf_counter()
        res = local_minimize(chassis, _sample_start(chassis.n, seed, idx), config)
        out.append((idx, res, time.perf_counter() - t0))
    return out


def run_starts(chassis: Chassis, samples: int, seed: int, config: SolverConfig,
               threads: int = 1) -> list[tuple[int, LocalResult, float]]:
    """Refine ``samples`` seeded uniform starts; results are in sample order.

    Sample ``i`` draws its start from ``default_rng([seed, i])``, so the
    output does not depend on ``threads``.
    """
    indices = list(range(samples))
    if threads <= 1 or samples < 2:
        return _run_chunk((chassis, seed, indices, config))
    chunks = [indices[k::threads] for k in range(threads)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_run_chunk, [(chassis, seed, c, config) for c in chunks if c])
        results = [r for part in parts for r in part]
    return sorted(results, key=lambda r: r[0])


@dataclass
class SolutionSet:
    """Pruned ensemble of near-optimal configurations with provenance."""

    chassis: Chassis
    dirs: np.ndarray
    costs: np.ndarray
    J_min: float
    prune_tolerance: float
    rng_seed: int
    samples_requested: int
    samples_converged: int
    config: SolverConfig = field(default_factory=SolverConfig)
    seconds_per_sample: float = float("nan")

    @property
    def chassis_id(self) -> str:
        return self.chassis.id

    def __len__(self) -> int:
        return len(self.costs)

    def to_dict(self) -> dict:
        return {
            "chassis": self.chassis.to_dict(),
            "chassis_id": self.chassis.id,
            "chassis_sha256": self.chassis.content_hash(),
            "config": asdict(self.config),
            "J_min": float(self.J_min),
            "prune_tolerance": float(self.prune_tolerance),
            "rng_seed": int(self.rng_seed),
            "samples_requested": int(self.samples_requested),
            "samples_converged": int(self.samples_converged),
            "solutions": [
                {"cost": float(c), "dirs": d.tolist()} for d, c in zip(self.dirs, self.costs)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolutionSet":
        chassis = Chassis.from_dict(data["chassis"])
        sols = data["solutions"]
        dirs = np.array([s["dirs"] for s in sols], dtype=float).reshape(len(sols), chassis.n, 3)
        costs = np.array([s["cost"] for s in sols], dtype=float)
        cfg = SolverConfig(**data.get("config", {}))
        return cls(chassis, dirs, costs, float(data["J_min"]), float(data["prune_tolerance"]),
                   int(data["rng_seed"]), int(data["samples_requested"]),
                   int(data.get("samples_converged", len(sols))), cfg)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "SolutionSet":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def write_csv(self, path) -> None:
        lines = ["solution_index,rotor,dx,dy,dz,cost"]
        for m, (d, c) in enumerate(zip(self.dirs, self.costs)):
            for i, (x, y, z) in enumerate(d):
                lines.append(f"{m},{i + 1},{x:.12g},{y:.12g},{z:.12g},{c:.15g}")
        Path(path).write_text("\n".join(lines) + "\n")


def prune(dirs: np.ndarray, costs: np.ndarray, tolerance: float):
    """Keep entries within ``tolerance`` of the minimum, sorted by cost then coordinates."""
    costs = np.asarray(costs, dtype=float)
    j_min = float(costs.min())
    keep = np.flatnonzero(costs <= j_min + tolerance)
    flat = dirs[keep].reshape(len(keep), -1)
    order = np.lexsort(tuple(flat.T[::-1]) + (costs[keep],))
    return dirs[keep][order], costs[keep][order], j_min


def global_exhaust(chassis: Chassis, samples: int, prune_tolerance: float = 1e-6, seed: int = 0,
                   config: SolverConfig | None = None, threads: int = 1) -> SolutionSet:
    """Multi-start search for the globally optimal configurations.

    Each of ``samples`` uniform random starts is refined by
    :func:`local_minimize`; non-converged runs are dropped, the rest pruned to
    costs within ``prune_tolerance`` of the best one.

    Raises
    ------
    EmptyResultError
        If no run converged.
    """
    require_full_actuation(chassis)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if prune_tolerance < 0:
        raise ValueError("prune_tolerance must be non-negative")
    config = config or SolverConfig()
    runs = run_starts(chassis, samples, seed, config, threads)
    ok = [r for _, r, _ in runs if r.converged]
    if not ok:
        raise EmptyResultError(f"none of {samples} runs converged on {chassis.id}")
    dirs = np.stack([r.dirs for r in ok])
    costs = np.array([r.cost for r in ok])
    dirs, costs, j_min = prune(dirs, costs, prune_tolerance)
    elapsed = float(np.mean([t for _, _, t in runs]))
    return SolutionSet(chassis, dirs, costs, j_min, prune_tolerance, seed, samples, len(ok),
                       config, elapsed)


@dataclass
class AblationRun:
    objective: str
    dirs: np.ndarray
    costs: np.ndarray
    converged: np.ndarray


def run_ablation(chassis: Chassis, samples: int, seed: int = 0,
                 config: SolverConfig | None = None, threads: int = 1) -> dict[str, AblationRun]:
    """Solve from identical starts with both objectives, keeping every final point."""
    require_full_actuation(chassis)
    base = config or SolverConfig()
    out = {}
    for objective in ("log_volume", "condition_number"):
        cfg = SolverConfig(**{**asdict(base), "objective": objective})
        runs = run_starts(chassis, samples, seed, cfg, threads)
        out[objective] = AblationRun(
            objective,
            np.stack([r.dirs for _, r, _ in runs]),
            np.array([r.cost for _, r, _ in runs]),
            np.array([r.converged for _, r, _ in runs]),
        )
    return out
