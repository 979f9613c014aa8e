"""Command-line front end: ``socialsearch {synth,run,compare,export-trace}``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import export, harness
from .geo import DistanceMetric
from .oracle import GroundTruth, Noisy, Precomputed
from .search import RandomSearchConfig, StsConfig, parse_stop_rule
from .survey import write_manifest
from .synth import SynthParams, generate


def _bbox(text):
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bbox must be four numbers, got {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("bbox needs lat_min,lat_max,lon_min,lon_max")
    return parts


def _stop(text):
    try:
        return parse_stop_rule(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_synth_flags(p):
    p.add_argument("--n-images", type=int, default=2000)
    p.add_argument("--bbox", type=_bbox, default=(60.0, 75.0, -90.0, -60.0),
                   help="lat_min,lat_max,lon_min,lon_max (default: 60,75,-90,-60)")
    p.add_argument("--n-clusters", type=int, default=5)
    p.add_argument("--positives-per-cluster", type=float, default=40.0)
    p.add_argument("--cluster-radius", type=float, default=0.15)
    p.add_argument("--animals-per-positive", type=float, default=4.0)


def _synth_params(args, seed):
    return SynthParams(
        n_images=args.n_images, bbox=args.bbox, n_clusters=args.n_clusters,
        positives_per_cluster_mean=args.positives_per_cluster, cluster_radius=args.cluster_radius,
        animals_per_positive_mean=args.animals_per_positive, seed=seed,
    )


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        export.atomic_write_text(out, text)


def cmd_synth(args):
    manifest = generate(_synth_params(args, args.seed))
    buf = io.StringIO()
    write_manifest(manifest, buf)
    _emit(buf.getvalue(), args.out)
    t = manifest.totals()
    print(f"{t['n_images']} images, {t['n_positive']} positive, {t['n_animals']} animals",
          file=sys.stderr)


def _oracle(args):
    if args.oracle == "ground-truth":
        return GroundTruth()
    if args.oracle == "precomputed":
        if args.predictions is None:
            raise ValueError("--oracle precomputed needs --predictions")
        return Precomputed(threshold=args.threshold)
    return Noisy(detect_prob=args.detect_prob, fp_rate=args.fp_rate,
                 threshold=args.threshold, seed=args.seed)


def cmd_run(args):
    if (args.manifest is None) == (not args.synth):
        raise ValueError("give exactly one of --manifest PATH or --synth")
    metric = DistanceMetric(args.metric)
    if args.synth:
        synth_seed = args.seed if args.synth_seed is None else args.synth_seed
        params = _synth_params(args, synth_seed)
        manifest = generate(params, metric=metric)
        source = params
    else:
        manifest = harness.load_manifest(args.manifest, metric)
        source = args.manifest
    if args.algo == "sts":
        algorithm = StsConfig(k=args.k, d=args.d, restarts=args.restarts, stop=args.stop)
    else:
        algorithm = RandomSearchConfig(stop=args.stop)
    config = harness.ExperimentConfig(
        manifest=source, algorithm=algorithm, oracle=_oracle(args), repeats=args.repeats,
        base_seed=args.seed, predictions=args.predictions, index=args.index,
    )
    results = harness.run_all(config, manifest, workers=args.jobs)
    stats = harness.aggregate(config, manifest, results)
    if args.trace is not None:
        trace_dir = Path(args.trace)
        trace_dir.mkdir(parents=True, exist_ok=True)
        for r in results:
            buf = io.StringIO()
            export.write_trace(r.trace.steps, buf)
            export.atomic_write_text(trace_dir / f"run_{r.run_index:03d}_seed_{r.seed}.ndjson",
                                     buf.getvalue())
    _emit(stats.dumps(), args.out)


def _threshold(text):
    try:
        metric, bounds = text.split("=")
        low, high = bounds.split(":")
        return metric, (float(low) if low else None, float(high) if high else None)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected METRIC=LOW:HIGH, got {text!r}") from None


def cmd_compare(args):
    stats = []
    for path in (args.a, args.b):
        with open(path, encoding="utf-8") as fh:
            stats.append(harness.AggregateStats.from_json(json.load(fh)))
    report = harness.compare(stats[0], stats[1], dict(args.threshold))
    _emit(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", args.out)


def cmd_export_trace(args):
    with open(args.trace_file, encoding="utf-8") as fh:
        steps = export.read_trace(fh)
    collection = export.trace_to_geojson(steps)
    _emit(json.dumps(collection, indent=2) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a clustered synthetic survey manifest")
    _add_synth_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="manifest CSV path (default: stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run repeated searches and write results JSON")
    p.add_argument("--manifest", help="manifest CSV")
    p.add_argument("--synth", action="store_true", help="generate the survey from the synth flags")
    _add_synth_flags(p)
    p.add_argument("--synth-seed", type=int, help="survey seed for --synth (default: --seed)")
    p.add_argument("--algo", choices=("sts", "random"), default="sts")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--d", type=float, default=0.6)
    p.add_argument("--metric", choices=[m.value for m in DistanceMetric], default="degree")
    p.add_argument("--restarts", type=int, help="max search passes (default: unlimited)")
    p.add_argument("--oracle", choices=("ground-truth", "precomputed", "noisy"), default="ground-truth")
    p.add_argument("--predictions", help="predictions CSV for --oracle precomputed")
    p.add_argument("--threshold", type=int, default=0,
                   help="positive iff predicted count exceeds this (precomputed/noisy)")
    p.add_argument("--detect-prob", type=float, default=0.7)
    p.add_argument("--fp-rate", type=float, default=0.5)
    p.add_argument("--stop", type=_stop, default=parse_stop_rule("exhaust"),
                   help="exhaust | budget:N | recall:F:{positive_images,animals}")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", choices=("tombstone", "rebuild"), default="tombstone",
                   help="KD-tree strategy; both give identical traces")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="results JSON path (default: stdout)")
    p.add_argument("--trace", help="directory for per-run NDJSON traces")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare two results JSON files (deltas are A - B)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--threshold", type=_threshold, action="append", default=[],
                   metavar="METRIC=LOW:HIGH", help="bounds on a metric's delta; either side may be empty")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-trace", help="convert an NDJSON trace to GeoJSON")
    p.add_argument("trace_file")
    p.add_argument("--format", choices=("geojson",), default="geojson")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"socialsearch {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
