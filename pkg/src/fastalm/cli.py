"""Command line: generate instances, race solvers, run the clustering harness.

Three subcommands:

``fastalm gen``
    Generate a benchmark instance and store it (manifest.json + MatrixMarket
    files) in the output directory.
``fastalm race``
    Load a stored instance, estimate a reference saddle point, run the
    requested solvers, and write one trace CSV per solver plus a summary
    JSON.  CSV columns: ``iter,time_ms,objective,feas_norm,conv_fn,bound,
    inner_flag`` (17-significant-digit floats, LF endings).  ``time_ms`` is
    machine-dependent; every other column is reproducible for identical
    config + seed.  ``bound`` carries the theoretical certificate for the
    accelerated solvers and NaN for the plain ones.
``fastalm cluster``
    Build the self-representation program from a stored or synthetic data
    set, solve it, cluster the affinity, and report accuracy.

Every flag can instead be supplied via ``--config file.json`` (keys are the
flag names with underscores); explicit flags win, unknown keys are
rejected.  The output directory defaults to the ``FASTALM_OUT`` environment
variable when set.

Exit codes: 0 success, 2 bad parameters or dimensions, 3 numeric failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import cluster as cluster_mod
from . import metrics, problems
from .errors import NumericError
from .solvers import SOLVERS, SolverConfig

ENV_OUT = "FASTALM_OUT"
TRACE_COLUMNS = ("iter", "time_ms", "objective", "feas_norm", "conv_fn",
                 "bound", "inner_flag")
_SPLITTING = {"pl_admm_ps", "fast_pl_admm_ps"}


def _fmt(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _write_trace_csv(path, trace):
    lines = [",".join(TRACE_COLUMNS)]
    for rec in trace:
        lines.append(",".join([
            str(rec.k),
            _fmt(rec.time_ms),
            _fmt(rec.objective),
            _fmt(rec.feas_norm),
            _fmt(rec.conv_fn),
            _fmt(rec.bound),
            "0" if rec.inner_converged else "1",
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _apply_config_file(args, parser_dests):
    """Fill unset options from --config; flags given on the line win."""
    if getattr(args, "config", None) is None:
        return
    data = json.loads(Path(args.config).read_text())
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    allowed = parser_dests - {"config", "func", "_dests"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    for key, val in data.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def _resolve_out(args):
    if args.out is None:
        args.out = os.environ.get(ENV_OUT)
    if args.out is None:
        raise ValueError(
            f"no output directory: pass --out or set {ENV_OUT}"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(args, names, context):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ValueError(f"{context} requires --{', --'.join(missing)}")


def _defaults(args, **pairs):
    for key, val in pairs.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def _solver_config(args, algorithm=None):
    return SolverConfig(
        max_iters=int(args.iters),
        beta_fixed=float(args.beta),
        eta_slack=float(args.eta_slack),
        inner_tol=float(args.inner_tol),
        inner_max_iter=int(args.inner_max_iter),
        trace_every=int(args.trace_every),
        algorithm=algorithm,
    )


# ---------------------------------------------------------------- gen

def cmd_gen(args):
    _apply_config_file(args, args._dests)
    _require(args, ["kind"], "gen")
    _defaults(args, seed=0)
    out = _resolve_out(args)
    kind = args.kind
    if kind == "lasso_simplex":
        _require(args, ["m", "n"], "gen --kind lasso_simplex")
        _defaults(args, alpha=1.0)
        bundle = problems.gen_lasso_simplex(
            int(args.m), int(args.n), float(args.alpha), int(args.seed)
        )
    elif kind == "three_block":
        _require(args, ["m"], "gen --kind three_block")
        _defaults(args, alphas="0.1,0.1,0.1")
        alphas = args.alphas
        if isinstance(alphas, str):
            alphas = [float(a) for a in alphas.split(",")]
        bundle = problems.gen_three_block(int(args.m), alphas, int(args.seed))
    elif kind == "subspace":
        _require(args, ["subspaces", "ambient", "dim", "points"],
                 "gen --kind subspace")
        _defaults(args, noise=0.01, alpha1=0.1, alpha2=0.1)
        bundle = problems.gen_subspace_bundle(
            int(args.subspaces), int(args.ambient), int(args.dim),
            int(args.points), float(args.noise), int(args.seed),
            float(args.alpha1), float(args.alpha2),
        )
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    path = problems.save_manifest(out, bundle)
    print(path)
    return 0


# ---------------------------------------------------------------- race

def cmd_race(args):
    _apply_config_file(args, args._dests)
    _require(args, ["manifest", "algorithms", "iters"], "race")
    _defaults(args, beta=1.0, eta_slack=1.02, inner_tol=1e-9,
              inner_max_iter=2000, trace_every=1, saddle_method="auto")
    out = _resolve_out(args)
    algorithms = args.algorithms
    if isinstance(algorithms, str):
        algorithms = [a.strip() for a in algorithms.split(",") if a.strip()]
    for alg in algorithms:
        if alg not in SOLVERS:
            raise ValueError(
                f"unknown algorithm {alg!r}; choose from {sorted(SOLVERS)}"
            )
    if not algorithms:
        raise ValueError("race needs at least one algorithm")
    bundle = problems.load_manifest(args.manifest)
    problem = bundle.problem
    iters = int(args.iters)
    saddle_iters = args.saddle_iters
    if saddle_iters is None:
        saddle_iters = 10 * iters
    base_cfg = _solver_config(args)

    saddle = metrics.estimate_saddle(
        problem, int(saddle_iters), base_cfg, method=args.saddle_method
    )
    if any(alg in _SPLITTING for alg in algorithms):
        etas = metrics.eta_values(problem, base_cfg.eta_slack)
        alpha = metrics.admm_alpha(problem, etas)
        penalty = base_cfg.beta_fixed * alpha / 2.0
        penalty_kind = "beta_alpha_half"
    else:
        penalty = 0.5
        penalty_kind = "half"

    summary_algs = {}
    for alg in algorithms:
        def hook(rec, state):
            rec.conv_fn = metrics.conv_function(problem, state.x, saddle, penalty)

        _, _, trace = SOLVERS[alg](problem, base_cfg, trace_hook=hook)
        consts = None
        if alg == "fast_palm":
            consts = metrics.fast_palm_constants(problem, saddle)
            for rec in trace:
                rec.bound = metrics.theorem_bound(rec.k, "fast_palm", **consts)
        elif alg == "fast_pl_admm_ps":
            consts = metrics.fast_pl_admm_ps_constants(
                problem, saddle, trace, base_cfg.beta_fixed, base_cfg.eta_slack
            )
            for rec in trace:
                rec.bound = metrics.theorem_bound(rec.k, "fast_pl_admm_ps", **consts)
        _write_trace_csv(out / f"{alg}.csv", trace)

        fit_lo = max(10, iters // 10)
        fit_rows = [rec for rec in trace if rec.k >= fit_lo]
        slope = metrics.fit_loglog_slope(
            [rec.k for rec in fit_rows], [rec.conv_fn for rec in fit_rows]
        )
        entry = {
            "trace_csv": f"{alg}.csv",
            "rows": len(trace),
            "final": None,
            "conv_fn_slope": None if math.isnan(slope) else slope,
            "slope_fit_from_iter": fit_lo,
        }
        if trace:
            last = trace[-1]
            entry["final"] = {
                "iter": last.k,
                "objective": last.objective,
                "feas_norm": last.feas_norm,
                "conv_fn": last.conv_fn,
            }
        if consts is not None:
            labeled = dict(consts)
            if alg == "fast_pl_admm_ps":
                # these two are empirical stand-ins, not analysis constants
                labeled["diam_x_sq_proxy"] = labeled.pop("diam_x_sq")
                labeled["diam_lam_sq_proxy"] = labeled.pop("diam_lam_sq")
            entry["bound_constants"] = labeled
        summary_algs[alg] = entry

    _write_json(out / "summary.json", {
        "kind": bundle.kind,
        "params": bundle.params,
        "iterations": iters,
        "penalty": penalty,
        "penalty_kind": penalty_kind,
        "saddle": {
            "provenance": saddle.provenance,
            "f_star": saddle.f_star,
            "feas_floor": saddle.feas_floor,
        },
        "algorithms": summary_algs,
    })
    return 0


# ---------------------------------------------------------------- cluster

def cmd_cluster(args):
    _apply_config_file(args, args._dests)
    _defaults(args, algorithm="fast_pl_admm_ps", iters=1000, beta=1.0,
              eta_slack=1.02, inner_tol=1e-9, inner_max_iter=2000,
              trace_every=1, alpha1=0.1, alpha2=0.1, cluster_seed=0,
              noise=0.01, seed=0)
    out = _resolve_out(args)
    if args.algorithm not in SOLVERS:
        raise ValueError(
            f"unknown algorithm {args.algorithm!r}; choose from {sorted(SOLVERS)}"
        )
    if args.manifest is not None:
        bundle = problems.load_manifest(args.manifest)
        if bundle.kind != "subspace":
            raise ValueError(
                f"cluster needs a subspace manifest, got kind {bundle.kind!r}"
            )
    else:
        _require(args, ["subspaces", "ambient", "dim", "points"],
                 "cluster without --manifest")
        bundle = problems.gen_subspace_bundle(
            int(args.subspaces), int(args.ambient), int(args.dim),
            int(args.points), float(args.noise), int(args.seed),
            float(args.alpha1), float(args.alpha2),
        )
    n_clusters = args.clusters
    if n_clusters is None:
        n_clusters = bundle.params.get("n_subspaces")
    if n_clusters is None:
        raise ValueError("pass --clusters (manifest does not record a count)")

    cfg = _solver_config(args, algorithm=args.algorithm)
    x_sol, _, _ = SOLVERS[args.algorithm](bundle.problem, cfg)
    z_mat = problems.extract_representation(x_sol)
    w_mat = cluster_mod.affinity(z_mat)
    degenerate = bool(w_mat.max() == 0.0)
    labels = cluster_mod.spectral_cluster(w_mat, int(n_clusters),
                                          seed=int(args.cluster_seed))
    accuracy = None
    if bundle.labels is not None:
        accuracy = cluster_mod.cluster_accuracy(labels, bundle.labels)

    lines = ["index,label"]
    lines += [f"{i},{int(lab)}" for i, lab in enumerate(labels)]
    (out / "labels.csv").write_text("\n".join(lines) + "\n")
    _write_json(out / "report.json", {
        "kind": bundle.kind,
        "params": bundle.params,
        "algorithm": args.algorithm,
        "iterations": int(args.iters),
        "n_clusters": int(n_clusters),
        "accuracy": accuracy,
        "degenerate_affinity": degenerate,
    })
    print(out / "report.json")
    return 0


# ---------------------------------------------------------------- parser

def _add_common(sub):
    sub.add_argument("--config", help="JSON file supplying unset flags")
    sub.add_argument("--out", help=f"output directory (default: ${ENV_OUT})")


def _add_solver_flags(sub):
    sub.add_argument("--iters", type=int, help="outer iteration budget")
    sub.add_argument("--beta", type=float, help="fixed penalty (default 1.0)")
    sub.add_argument("--eta-slack", dest="eta_slack", type=float,
                     help="parallel-splitting eta slack factor (default 1.02)")
    sub.add_argument("--inner-tol", dest="inner_tol", type=float,
                     help="inner solver residual tolerance (default 1e-9)")
    sub.add_argument("--inner-max-iter", dest="inner_max_iter", type=int,
                     help="inner solver sweep budget (default 2000)")
    sub.add_argument("--trace-every", dest="trace_every", type=int,
                     help="record every T-th iteration (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fastalm",
        description="Accelerated augmented-Lagrangian solvers: generate, race, cluster.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate and store a benchmark instance")
    _add_common(gen)
    gen.add_argument("--kind", choices=["lasso_simplex", "three_block", "subspace"])
    gen.add_argument("--seed", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--alpha", type=float, help="lasso data-fit weight")
    gen.add_argument("--alphas", help="three comma-separated data-fit weights")
    gen.add_argument("--subspaces", type=int)
    gen.add_argument("--ambient", type=int)
    gen.add_argument("--dim", type=int)
    gen.add_argument("--points", type=int, help="points per subspace")
    gen.add_argument("--noise", type=float)
    gen.add_argument("--alpha1", type=float, help="nuclear-norm weight")
    gen.add_argument("--alpha2", type=float, help="l1-norm weight")
    gen.set_defaults(func=cmd_gen)

    race = subs.add_parser("race", help="run solvers on a stored instance")
    _add_common(race)
    race.add_argument("--manifest", help="manifest.json path or its directory")
    race.add_argument("--algorithms",
                      help=f"comma-separated subset of {sorted(SOLVERS)}")
    _add_solver_flags(race)
    race.add_argument("--saddle-iters", dest="saddle_iters", type=int,
                      help="reference-run budget (default 10x --iters)")
    race.add_argument("--saddle-method", dest="saddle_method",
                      choices=["auto", "fast_palm", "fast_pl_admm_ps"])
    race.set_defaults(func=cmd_race)

    clus = subs.add_parser("cluster", help="subspace clustering harness")
    _add_common(clus)
    clus.add_argument("--manifest", help="stored subspace instance")
    clus.add_argument("--subspaces", type=int)
    clus.add_argument("--ambient", type=int)
    clus.add_argument("--dim", type=int)
    clus.add_argument("--points", type=int, help="points per subspace")
    clus.add_argument("--noise", type=float)
    clus.add_argument("--seed", type=int, help="data generation seed")
    clus.add_argument("--alpha1", type=float, help="nuclear-norm weight")
    clus.add_argument("--alpha2", type=float, help="l1-norm weight")
    clus.add_argument("--algorithm", help="solver to run (default fast_pl_admm_ps)")
    _add_solver_flags(clus)
    clus.add_argument("--clusters", type=int, help="number of clusters")
    clus.add_argument("--cluster-seed", dest="cluster_seed", type=int,
                      help="k-means seed (default 0)")
    clus.set_defaults(func=cmd_cluster)

    for sub in (gen, race, clus):
        sub.set_defaults(_dests={a.dest for a in sub._actions})
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"fastalm: numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"fastalm: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fastalm: I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
