"""Command-line interface.

``imvclust run`` executes a seeded experiment over one or more missing
rates and writes per-run records, a summary, graph dumps, optional residual
traces, and rendered figures into the output directory.  ``imvclust
knn-demo`` reproduces the graph-subsampling demonstration.  Exit codes:
0 success, 2 configuration error, 3 data error.
"""

import argparse
import sys
from pathlib import Path

from . import report
from .data import DatasetError
from .harness import (
    ConfigError,
    ExperimentConfig,
    dump_edges,
    dump_graph,
    knn_demo,
    point_tag,
    render_summary_table,
    run_experiment,
    write_records,
    write_summary,
    write_trace,
)
from .solver import Variant

EXIT_CONFIG = 2
EXIT_DATA = 3


def _floats(text):
    return tuple(float(x) for x in text.split(","))


def _ints(text):
    return tuple(int(x) for x in text.split(","))


def _variants(text):
    out = []
    for name in text.split(","):
        try:
            out.append(Variant(name.strip().lower()))
        except ValueError:
            raise ConfigError(f"unknown variant '{name}' (expected full|n|b|o)") from None
    return tuple(out)


def build_parser():
    parser = argparse.ArgumentParser(prog="imvclust")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a clustering experiment")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", metavar="DIR", help="dataset directory with manifest.json")
    src.add_argument(
        "--synthetic",
        metavar="SPEC",
        help="synthetic spec 'classes:per_class:views:d1,d2,...:noise'",
    )
    p_run.add_argument("--missing-rate", type=_floats, required=True, metavar="R[,R...]")
    p_run.add_argument("--lambda", dest="lam", type=_floats, required=True, metavar="L")
    p_run.add_argument("--theta", type=_floats, required=True, metavar="T")
    p_run.add_argument("--latent-k", type=_ints, required=True, metavar="K")
    p_run.add_argument("--variant", type=_variants, default=(Variant.FULL,))
    p_run.add_argument("--repeats", type=int, required=True, metavar="N")
    p_run.add_argument("--seed", type=int, required=True, metavar="S")
    p_run.add_argument("--out", required=True, metavar="DIR")
    p_run.add_argument("--no-normalize", action="store_true", help="skip unit-norm scaling")
    p_run.add_argument("--trace", action="store_true", help="write per-iteration residual traces")
    p_run.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p_run.add_argument("--max-iter", type=int, default=300)
    p_run.add_argument("--restarts", type=int, default=20, help="k-means restarts")

    p_demo = sub.add_parser("knn-demo", help="kNN graph densification under subsampling")
    p_demo.add_argument("--points", type=int, default=300, help="total point count")
    p_demo.add_argument("--classes", type=int, default=3)
    p_demo.add_argument("--k", type=int, default=10)
    p_demo.add_argument("--subsample", type=float, default=0.5)
    p_demo.add_argument("--spread", type=float, default=0.3)
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--out", required=True, metavar="DIR")
    p_demo.add_argument("--no-figures", action="store_true")
    return parser


def _cmd_run(args):
    cfg = ExperimentConfig(
        data_dir=args.data,
        synthetic=args.synthetic,
        missing_rates=args.missing_rate,
        lambda_grid=args.lam,
        theta_grid=args.theta,
        k_grid=args.latent_k,
        variants=args.variant,
        repeats=args.repeats,
        seed0=args.seed,
        normalize=not args.no_normalize,
        trace=args.trace,
        kmeans_restarts=args.restarts,
        max_iter=args.max_iter,
        out_dir=args.out,
    )
    records, summary = run_experiment(cfg, keep_graphs=True)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(records, out / "records.csv")
    write_summary(summary, out / "summary.json")
    table = render_summary_table(summary)
    (out / "summary.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)

    first_of_point = {}
    for rec in records:
        first_of_point.setdefault(point_tag(rec), rec)
    for tag, rec in first_of_point.items():
        if rec.fused_graph is not None:
            dump_graph(rec.fused_graph, out / "graphs" / f"fused_{tag}.csv")
            if not args.no_figures:
                report.graph_heatmap(
                    rec.fused_graph, out / "figures" / f"fused_{tag}.png", title=tag
                )
    if args.trace:
        for rec in records:
            write_trace(rec, out / "traces" / f"trace_{point_tag(rec)}_rep{rec.repeat}.csv")
        if not args.no_figures:
            for tag, rec in first_of_point.items():
                report.convergence_figure(
                    rec.residual_trace, out / "figures" / f"convergence_{tag}.png", title=tag
                )
    if not args.no_figures:
        report.summary_figure(summary, out / "figures" / "summary_metrics.png")
    return 0


def _cmd_knn_demo(args):
    if args.points % args.classes:
        raise ConfigError("--points must be divisible by --classes")
    demo = knn_demo(
        n_per_class=args.points // args.classes,
        classes=args.classes,
        k=args.k,
        subsample=args.subsample,
        spread=args.spread,
        seed=args.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    import csv
    import json

    for name, pts, labs in (
        ("points_full.csv", demo["points"], demo["labels"]),
        ("points_sub.csv", demo["sub_points"], demo["sub_labels"]),
    ):
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "label"])
            for p, lab in zip(pts, labs):
                writer.writerow([f"{p[0]:.17g}", f"{p[1]:.17g}", int(lab)])
    dump_edges(demo["edges_full"], out / "edges_full.csv")
    dump_edges(demo["edges_sub"], out / "edges_sub.csv")
    with open(out / "fractions.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {
                "interclass_fraction_full": demo["fraction_full"],
                "interclass_fraction_subsampled": demo["fraction_sub"],
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    if not args.no_figures:
        report.knn_demo_figure(demo, out / "figures" / "knn_graphs.png")
    sys.stdout.write(
        f"inter-class edge fraction: full {demo['fraction_full']:.4f}, "
        f"subsampled {demo['fraction_sub']:.4f}\n"
    )
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_CONFIG
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_knn_demo(args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except (DatasetError, OSError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
