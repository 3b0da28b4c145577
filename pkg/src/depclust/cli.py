"""``depclust`` command line interface."""

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import core, correlation, dependence, experiment, gaussian, hcbm, linkage, rmt

log = logging.getLogger("depclust")


def _cmd_corr(args):
    data = core.read_series_csv(args.input)
    C = correlation.correlation_matrix(data.values, args.kind)
    core.write_matrix_csv(args.out, C, data.series_ids)


def _cmd_simulate(args):
    spec = hcbm.HcbmSpec.from_json(args.spec)
    X = hcbm.sample(hcbm.implied_correlation(spec), args.margin, args.T, args.seed)
    core.write_matrix_csv(args.out, X)


def _cmd_cluster(args):
    D, ids = core.read_matrix_csv(args.input)
    d = linkage.cluster(D, args.linkage)
    d.to_json(args.out)
    if args.cut is not None:
        p = core.cut_dendrogram(d, args.cut)
        names = ids or [str(i) for i in range(d.n_leaves)]
        target = open(args.labels, "w", newline="") if args.labels else sys.stdout
        try:
            w = csv.writer(target, lineterminator="\n")
            w.writerow(["series", "label"])
            w.writerows(zip(names, p.labels.tolist()))
        finally:
            if args.labels:
                target.close()


def _cmd_filter(args):
    C, ids = core.read_matrix_csv(args.input)
    core.write_matrix_csv(args.out, rmt.mantegna_filter(C, args.linkage), ids)


def _cmd_mp(args):
    data = core.read_series_csv(args.input)
    C = correlation.correlation_matrix(data.values, "pearson")
    report = rmt.spectrum(C, data.n_obs)
    with open(args.report, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)


def _cmd_dist(args):
    data = core.read_series_csv(args.input)
    if args.metric == "dtheta":
        h = args.bandwidth if args.bandwidth == "auto" else float(args.bandwidth)
        D = dependence.d_theta_matrix(data.values, args.theta, h)
    else:
        D = correlation.correlation_distance(data.values, args.metric)
    core.write_matrix_csv(args.out, D, data.series_ids)


def _load_matrices(path):
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        return list(obj.keys()), [np.asarray(m, dtype=float) for m in obj.values()]
    return [str(i) for i in range(len(obj))], [np.asarray(m, dtype=float) for m in obj]


def _cmd_gauss_dist(args):
    names, mats = _load_matrices(args.matrices)
    fn = gaussian.METRICS[args.metric]
    D = [[fn(a, b) for b in mats] for a in mats]
    json.dump({"metric": args.metric, "names": names, "distances": D}, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_copula_demo(args):
    p = gaussian.copula_cluster_demo(args.correlations, args.metric, args.linkage, args.k,
                                     sampled=args.sampled, T=args.T, seed=args.seed)
    groups = [[args.correlations[i] for i in b] for b in p.blocks()]
    json.dump({"metric": args.metric, "linkage": args.linkage, "clusters": groups}, sys.stdout)
    sys.stdout.write("\n")


_PRESETS = {
    "nt": lambda full, kw: experiment.ExperimentPlan.nt_default(full, **kw),
    "rho-gaussian": lambda full, kw: experiment.ExperimentPlan.rho_default("gaussian", full, **kw),
    "rho-student": lambda full, kw: experiment.ExperimentPlan.rho_default("student:3", full, **kw),
}


def _cmd_experiment(args):
    if args.plan:
        plan = experiment.ExperimentPlan.from_json(args.plan)
    else:
        kw = {"trials": args.trials, "base_seed": args.seed}
        plan = _PRESETS[args.preset](args.full, kw)
    grids, warnings = experiment.run_grid(plan, workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        experiment.grids_to_csv(grids, fh)
    if warnings:
        log.warning("%d cell-level warnings", warnings)
        return 2
    return 0


def _cmd_bound(args):
    if args.eq == "11":
        if args.eps is None:
            raise SystemExit("--eps is required for --eq 11")
        value = experiment.kendall_concentration_bound(args.N, args.T, args.eps)
    else:
        if args.contrast is None:
            raise SystemExit("--contrast is required for --eq 12")
        value = experiment.recovery_bound(args.N, args.T, args.contrast)
    print(repr(value))


def build_parser():
    parser = argparse.ArgumentParser(prog="depclust", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corr", help="correlation matrix of a series CSV")
    p.add_argument("--kind", choices=[k.value for k in correlation.CorrelationKind],
                   default="pearson")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corr)

    p = sub.add_parser("simulate", help="sample a hierarchical correlation block model")
    p.add_argument("--spec", required=True)
    p.add_argument("--margin", default="gaussian", help="gaussian or student:<nu>")
    p.add_argument("--T", type=int, default=250)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cluster", help="Lance-Williams clustering of a distance CSV")
    p.add_argument("--linkage", choices=[l.value for l in linkage.LinkageKind], default="average")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cut", type=int)
    p.add_argument("--labels")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("filter", help="hierarchical filtering of a correlation CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--linkage", choices=[l.value for l in linkage.LinkageKind], default="average")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("mp", help="Marchenko-Pastur spectrum report of a series CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_mp)

    p = sub.add_parser("dist", help="pairwise distance matrix of a series CSV")
    p.add_argument("--metric", choices=["dtheta", "pearson", "spearman", "kendall"],
                   default="dtheta")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("gauss-dist", help="closed-form distances between centred Gaussians")
    p.add_argument("--metric", choices=sorted(gaussian.METRICS), default="w2")
    p.add_argument("--matrices", required=True)
    p.set_defaults(func=_cmd_gauss_dist)

    p = sub.add_parser("copula-demo", help="cluster bivariate Gaussian copulas")
    p.add_argument("--metric", choices=sorted(gaussian.METRICS), default="fisher_rao")
    p.add_argument("--linkage", choices=[l.value for l in linkage.LinkageKind], default="ward")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--correlations", type=float, nargs="+",
                   default=list(gaussian.DEMO_CORRELATIONS))
    p.add_argument("--sampled", action="store_true")
    p.add_argument("--T", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_copula_demo)

    p = sub.add_parser("experiment", help="Monte-Carlo recovery grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--plan", help="plan JSON")
    src.add_argument("--preset", choices=sorted(_PRESETS), help="built-in 20x20 sweep")
    p.add_argument("--full", action="store_true", help="full-resolution preset grid")
    p.add_argument("--trials", type=int, default=100, help="trials per cell for presets")
    p.add_argument("--seed", type=int, default=0, help="base seed for presets")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("bound", help="evaluate a concentration or recovery bound")
    p.add_argument("--eq", choices=["11", "12"], required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--contrast", type=float)
    p.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (ValueError, OSError, KeyError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
