"""Command-line front end.

Every command is deterministic given its flags and writes into ``--out-dir``
(default: ``$ROTORSCAPE_OUT_DIR`` or the working directory). JSON outputs use
sorted keys so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import chassis as chassis_mod
from .errors import EmptyResultError, InsufficientDataError
from .manifold import tangency_residual, write_disc_csv
from .optimizer import SolutionSet, SolverConfig, global_exhaust, run_ablation
from .topology import analyze, mean_curve_distance, star_polygon_predict, write_prediction_csv, write_scatter_csv
from .topology.classify import ClassificationThresholds
from .trajectory import branch_sweep, known_branches, relative_variation, write_sweep_csv
from .wrench import evaluate, sensitivity_sweep, write_sensitivity_csv

OUT_ENV = "ROTORSCAPE_OUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(OUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_chassis(name: str):
    try:
        return chassis_mod.resolve_chassis(name)
    except KeyError as exc:
        raise CliError(f"unknown chassis {name!r} (see `chassis --list`)", 2) from exc


def _solver_config(args) -> SolverConfig:
    return SolverConfig(max_iterations=args.max_iter, gradient_tolerance=args.gtol,
                        objective=args.objective)


def cmd_chassis(args) -> int:
    if args.list:
        for cid in chassis_mod.library_ids():
            print(cid)
        return 0
    if not args.id:
        raise CliError("give --id or --list", 2)
    c = _load_chassis(args.id)
    if args.quasi is not None:
        c = chassis_mod.make_quasi_regular(c, args.quasi, args.seed)
    out = Path(args.out) if args.out else _out_dir(args) / f"{c.id}.json"
    chassis_mod.save_chassis(c, out)
    print(f"{c.id}: {c.n} vertices -> {out}")
    return 0


def cmd_optimize(args) -> int:
    c = _load_chassis(args.chassis)
    out = _out_dir(args)
    sols = global_exhaust(c, args.samples, args.prune_tol, args.seed, _solver_config(args),
                          args.threads)
    stem = out / c.id
    sols.save(f"{stem}.solutions.json")
    sols.write_csv(f"{stem}.solutions.csv")
    write_disc_csv(f"{stem}.disc.csv", sols.dirs)
    best = evaluate(c, sols.dirs[0])
    _write_json(Path(f"{stem}.metrics.json"), best.to_dict())
    resid = max(tangency_residual(c, d) for d in sols.dirs)
    print(f"{c.id}: M*={len(sols)} of {sols.samples_converged} converged / {args.samples} samples")
    print(f"J_min={sols.J_min:.12f}  kappa={best.condition_number:.6f}")
    print(f"max tangency residual={resid:.3e}")
    print(f"mean wall-clock per seed={sols.seconds_per_sample * 1e3:.1f} ms")
    if args.figures:
        from .plots import disc_figure

        disc_figure(f"{stem}.disc.png", sols.dirs, title=c.id)
    return 0


def cmd_analyze(args) -> int:
    sols = SolutionSet.load(args.solutions)
    c = sols.chassis
    out = _out_dir(args)
    stem = out / c.id
    thresholds = ClassificationThresholds(spread_limit_deg=args.spread_limit)
    rep = analyze(sols, tol_deg=args.tol_deg, eps_deg=args.eps_deg, min_samples=args.min_samples,
                  thresholds=thresholds)
    _write_json(Path(f"{stem}.ellipses.json"), rep.ellipses.to_dict())
    labels = rep.model.labels if rep.model is not None else np.full(len(sols), -1)
    write_scatter_csv(f"{stem}.scatter.csv", rep.phases, labels)
    summary = {
        "chassis_id": c.id,
        "classification": rep.classification.label,
        "classification_line": rep.summary(),
        "distinct_configurations": rep.classification.distinct,
        "max_tangency_residual": rep.max_residual,
        "tangent_rotors": [bool(t) for t in rep.tangent_rotors],
        "leading_variance_fraction": None if rep.linear is None else rep.linear.leading_variance_fraction,
        "is_1d": None if rep.linear is None else rep.linear.is_1d,
        "prediction_match": None if rep.prediction_match is None else rep.prediction_match.to_dict(),
        "reference_match": None if rep.reference_match is None else rep.reference_match.to_dict(),
    }
    if rep.model is not None:
        _write_json(Path(f"{stem}.branches.json"), rep.model.to_dict())
    _write_json(Path(f"{stem}.analysis.json"), summary)
    print(f"{c.id}: {rep.summary()}")
    print(f"tangent-plane fits within {args.tol_deg:g} deg: {int(rep.tangent_rotors.sum())}/{c.n} rotors")
    if rep.model is not None:
        for k, b in enumerate(rep.model.branches, start=1):
            flag = " REJECTED" if b.rejected else ""
            offs = " ".join(f"{a}/{d}" for a, d in b.rational_offsets)
            print(f"  branch {k}: spread {b.spread_deg:.2f} deg, fit err {b.max_fit_error_deg:.2f} deg, "
                  f"offsets/pi [{offs}]{flag}")
    if rep.classification.label == "IV-C" and c.family == "regular_polygon":
        print(f"  conjectured K = N-5 = {c.n - 5} (not resolved)")
    if args.figures:
        from .plots import disc_figure, scatter_figure

        disc_figure(f"{stem}.fit.png", sols.dirs, rep.ellipses, title=c.id)
        scatter_figure(f"{stem}.scatter.png", rep.phases, labels, title=c.id)
    return 0


def cmd_predict(args) -> int:
    pred = star_polygon_predict(args.n)
    if not pred.branches:
        raise CliError(f"N={args.n}: {pred.note}", 1)
    out = _out_dir(args)
    write_prediction_csv(out / f"predict_N{args.n}.csv", pred)
    print(f"N={pred.n}: K = N-5 = {pred.k}")
    for k, br in enumerate(pred.branches, start=1):
        print(f"  branch {k} (q={br.q}): " + " ".join(f"{int(f * pred.n)}/{pred.n}" for f in br.offsets))
    return 0


def cmd_trajectory(args) -> int:
    c = _load_chassis(args.chassis)
    branches = known_branches(c)
    if args.branch < 1 or args.branch > len(branches):
        raise CliError(f"{c.id} has {len(branches)} known branches; got --branch {args.branch}", 2)
    rows = branch_sweep(c, branches[args.branch - 1], args.steps, controls=args.controls,
                        seed=args.seed)
    out = _out_dir(args)
    stem = out / f"{c.id}_branch{args.branch}"
    write_sweep_csv(f"{stem}.trajectory.csv", rows)
    main = [r for r in rows if r.kind == "branch"]
    sv = np.array([r.singular_values for r in main])
    var = max(relative_variation(sv[:, k]) for k in range(6))
    print(f"{c.id} branch {args.branch}: {len(main)} steps, max relative sigma variation {var:.2e}, "
          f"kappa {main[0].kappa:.6f}")
    if args.controls:
        dec = [r.kappa for r in rows if r.kind == "decoherent"]
        print(f"decoherent control: min kappa {min(dec):.4f}")
    if args.figures:
        from .plots import trajectory_figure

        trajectory_figure(f"{stem}.trajectory.png", rows)
    return 0


def cmd_sensitivity(args) -> int:
    c = _load_chassis(args.chassis)
    if args.solutions:
        dirs = SolutionSet.load(args.solutions).dirs[0]
    else:
        branches = known_branches(c)
        if not branches:
            raise CliError(f"no known optimum for {c.id}; pass --solutions", 2)
        from .manifold import direction_from_phase

        dirs = direction_from_phase(c, branches[0])
    ratios = np.logspace(np.log10(args.min_ratio), np.log10(args.max_ratio), args.points)
    rows = sensitivity_sweep(c, dirs, ratios)
    out = _out_dir(args)
    write_sensitivity_csv(out / f"{c.id}.sensitivity.csv", rows)
    best = min(rows, key=lambda r: r.kappa)
    print(f"{c.id}: kappa minimal ({best.kappa:.6f}) at L_c/R = {best.ratio:.4g}")
    if args.figures:
        from .plots import sensitivity_figure

        sensitivity_figure(out / f"{c.id}.sensitivity.png", rows)
    return 0


def cmd_ablation(args) -> int:
    c = _load_chassis(args.chassis)
    runs = run_ablation(c, args.samples, args.seed, SolverConfig(max_iterations=args.max_iter),
                        args.threads)
    stats = {}
    for name, run in runs.items():
        stats[name] = {"mean_curve_distance": mean_curve_distance(run.dirs),
                       "converged": int(run.converged.sum()), "samples": int(len(run.costs))}
    ratio = stats["condition_number"]["mean_curve_distance"] / max(
        stats["log_volume"]["mean_curve_distance"], 1e-300)
    stats["ratio"] = ratio
    out = _out_dir(args)
    _write_json(out / f"{c.id}.ablation.json", stats)
    for name in runs:
        print(f"{name}: mean distance to fitted curves {stats[name]['mean_curve_distance']:.3e}")
    print(f"condition_number / log_volume = {ratio:.3g}")
    if args.figures:
        from .plots import disc_figure

        for name, run in runs.items():
            disc_figure(out / f"{c.id}.ablation_{name}.png", run.dirs, title=f"{c.id} {name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotorscape", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, figures=True):
        sp.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_ENV} or .)")
        if figures:
            sp.add_argument("--figures", action="store_true", help="also render PNG figures")

    def solver(sp):
        sp.add_argument("--max-iter", type=int, default=2000)
        sp.add_argument("--gtol", type=float, default=1e-6)
        sp.add_argument("--threads", type=int, default=1, help="worker processes for the sample loop")

    sp = sub.add_parser("chassis", help="write a library chassis to JSON")
    sp.add_argument("--id")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--out")
    sp.add_argument("--quasi", type=float, default=None, help="perturbation magnitude")
    sp.add_argument("--seed", type=int, default=0)
    common(sp, figures=False)
    sp.set_defaults(func=cmd_chassis)

    sp = sub.add_parser("optimize", help="multi-start global search")
    sp.add_argument("--chassis", required=True, help="library id or chassis JSON path")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--prune-tol", type=float, default=1e-6)
    sp.add_argument("--objective", choices=("logvol", "kappa"), default="logvol")
    solver(sp)
    common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("analyze", help="ellipse fits, branch extraction and classification")
    sp.add_argument("solutions", help="solution JSON written by `optimize`")
    sp.add_argument("--tol-deg", type=float, default=1.0)
    sp.add_argument("--eps-deg", type=float, default=5.0, help="clustering radius")
    sp.add_argument("--min-samples", type=int, default=5)
    sp.add_argument("--spread-limit", type=float, default=30.0)
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("predict", help="star-polygon branch offsets of a regular N-gon")
    sp.add_argument("n", type=int)
    common(sp, figures=False)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("trajectory", help="metrics along a known branch")
    sp.add_argument("--chassis", required=True)
    sp.add_argument("--branch", type=int, default=1)
    sp.add_argument("--steps", type=int, default=64)
    sp.add_argument("--controls", action="store_true", help="add decoherent and random rows")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_trajectory)

    sp = sub.add_parser("sensitivity", help="metrics versus characteristic length")
    sp.add_argument("--chassis", required=True)
    sp.add_argument("--solutions", help="take the best solution from this file")
    sp.add_argument("--min-ratio", type=float, default=0.1)
    sp.add_argument("--max-ratio", type=float, default=10.0)
    sp.add_argument("--points", type=int, default=41)
    common(sp)
    sp.set_defaults(func=cmd_sensitivity)

    sp = sub.add_parser("ablation", help="log-volume versus condition-number objective")
    sp.add_argument("--chassis", required=True)
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-iter", type=int, default=2000)
    sp.add_argument("--threads", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_ablation)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (EmptyResultError, InsufficientDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
