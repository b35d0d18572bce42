"""Command-line surface: synthesis, re-ranking, fusion, pipelines, evaluation,
sweeps, and histograms over the text-v1 file formats.

Set RERANK_THREADS to cap the worker threads used by the linear algebra
backend for a run.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .arr import ArrConfig, adaptive_rerank
from .dff import DffConfig, fuse
from .distances import euclidean_distances, format_distances, load_distances, write_distances
from .evaluation import distance_histograms, evaluate, write_report
from .features import FeatureSet, format_features, l2_normalize, load_features, split_features, write_features
from .pipeline import PipelineSpec, Strategy, run_pipeline, sweep, sweep_csv
from .synth import SynthSpec, generate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Exit code 1 for bad flags instead of argparse's default 2 (reserved for I/O).
    def error(self, message):
        raise _UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reidrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p):
        p.add_argument("--out", help="output path (default: standard output)")

    def add_load(p):
        p.add_argument("--in", dest="features", required=True, help="reid-features text-v1 file")
        p.add_argument("--l2-normalize", action="store_true", help="L2-normalize feature rows after loading")

    def add_arr(p):
        p.add_argument("--k", "--neighbors", dest="k", type=int, default=15, help="initial neighborhood budget")
        p.add_argument("--c", "--increment", dest="c", type=int, default=1, help="per-iteration budget increment")
        p.add_argument("--iters", type=int, default=3, help="re-ranking rounds")
        p.add_argument("--no-renormalize", action="store_true", help="skip min-max rescaling between rounds")

    def add_dff(p, with_subfeatures=True):
        if with_subfeatures:
            p.add_argument("--S", "--subfeatures", dest="subfeatures", type=int, default=4, help="sub-feature count")
        p.add_argument("--t", "--diffusion-iters", dest="t", type=int, default=1, help="diffusion generations")
        p.add_argument("--k-local", type=int, default=None, help="local kernel size (default: the k in force)")
        p.add_argument("--epsilon", type=float, default=1e-12, help="floor for status inversion")
        p.add_argument("--no-local-renormalize", action="store_true", help="keep truncated kernel rows as cut")

    p = sub.add_parser("synth", help="generate a synthetic clustered feature file")
    p.add_argument("--ids", type=int, default=40, help="identity count")
    p.add_argument("--cams", type=int, default=2, help="camera count (camera 1 is the probe camera)")
    p.add_argument("--per-cam", type=int, default=5, help="images per identity per camera")
    p.add_argument("--dim", type=int, default=32, help="feature dimension")
    p.add_argument("--intra-sigma", type=float, default=None, help="per-image noise scale")
    p.add_argument("--cam-shift-sigma", type=float, default=None, help="camera offset scale")
    p.add_argument("--seed", type=int, default=0)
    add_out(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("rerank", help="adaptive re-ranking of the euclidean metric")
    add_load(p)
    add_arr(p)
    add_out(p)
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("fuse", help="diffusion fusion of sub-feature metrics")
    add_load(p)
    add_dff(p)
    add_out(p)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("pipeline", help="run a full composition strategy")
    add_load(p)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.ARR_DFF.value)
    add_arr(p)
    add_dff(p)
    add_out(p)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("eval", help="CMC/mAP report for a distance matrix")
    p.add_argument("--features", required=True, help="reid-features text-v1 file")
    p.add_argument("--dist", required=True, help="reid-dist text-v1 file")
    p.add_argument("--rmax", type=int, default=50, help="CMC curve length")
    p.add_argument("--bins", type=int, default=None, help="include distance histograms with this many bins")
    add_out(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="evaluate a grid of S and k settings as CSV")
    add_load(p)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.ARR_DFF.value)
    p.add_argument("--S-values", dest="s_values", type=_int_list, default=[2, 4, 6, 8, 10])
    p.add_argument("--k-values", dest="k_values", type=_int_list, default=[1, 5, 10, 15, 20, 25])
    p.add_argument("--c", "--increment", dest="c", type=int, default=1)
    p.add_argument("--iters", type=int, default=3)
    p.add_argument("--t", "--diffusion-iters", dest="t", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0, help="provenance seed recorded in the CSV")
    p.add_argument("--rmax", type=int, default=50)
    add_out(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("hist", help="intra/inter identity distance histograms as JSON")
    p.add_argument("--features", required=True)
    p.add_argument("--dist", required=True)
    p.add_argument("--bins", type=int, default=20)
    add_out(p)
    p.set_defaults(func=_cmd_hist)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _loaded_features(args) -> FeatureSet:
    fs = load_features(args.features)
    if getattr(args, "l2_normalize", False):
        fs = l2_normalize(fs)
    return fs


def _cmd_synth(args) -> None:
    fields = dict(num_identities=args.ids, cams=args.cams, per_cam=args.per_cam, dim=args.dim, seed=args.seed)
    if args.intra_sigma is not None:
        fields["intra_sigma"] = args.intra_sigma
    if args.cam_shift_sigma is not None:
        fields["cam_shift_sigma"] = args.cam_shift_sigma
    _emit(format_features(generate(SynthSpec(**fields))), args.out)


def _arr_config(args) -> ArrConfig:
    return ArrConfig(k0=args.k, increment=args.c, iterations=args.iters,
                     renormalize=not getattr(args, "no_renormalize", False))


def _dff_config(args, subfeatures: int, k_in_force: int) -> DffConfig:
    k_local = args.k_local if args.k_local is not None else k_in_force
    return DffConfig(subfeatures=subfeatures, k_local=k_local, t_iters=args.t, epsilon=args.epsilon,
                     renormalize_local=not getattr(args, "no_local_renormalize", False))


def _cmd_rerank(args) -> None:
    fs = _loaded_features(args)
    result = adaptive_rerank(euclidean_distances(fs), _arr_config(args))
    _emit(format_distances(result), args.out)


def _cmd_fuse(args) -> None:
    fs = _loaded_features(args)
    cfg = _dff_config(args, args.subfeatures, k_in_force=15)
    metrics = [euclidean_distances(p) for p in split_features(fs, cfg.subfeatures).parts]
    _emit(format_distances(fuse(metrics, cfg)), args.out)


def _cmd_pipeline(args) -> None:
    fs = _loaded_features(args)
    spec = PipelineSpec(Strategy(args.strategy), _arr_config(args),
                        _dff_config(args, args.subfeatures, k_in_force=args.k))
    _emit(format_distances(run_pipeline(fs, spec)), args.out)


def _cmd_eval(args) -> None:
    fs = load_features(args.features)
    d = load_distances(args.dist)
    report = evaluate(d, fs, r_max=args.rmax, bins=args.bins)
    _emit(report.to_json(), args.out)


def _cmd_sweep(args) -> None:
    if not args.s_values or not args.k_values:
        raise _UsageError("--S-values and --k-values must be non-empty")
    fs = _loaded_features(args)
    # k0/subfeatures/k_local here are placeholders; sweep() replaces them per cell.
    base = PipelineSpec(
        Strategy(args.strategy),
        ArrConfig(k0=1, increment=args.c, iterations=args.iters),
        DffConfig(subfeatures=2, k_local=1, t_iters=args.t, epsilon=args.epsilon),
    )
    cells = sweep(fs, base, args.s_values, args.k_values, seed=args.seed, r_max=args.rmax)
    _emit(sweep_csv(cells), args.out)


def _cmd_hist(args) -> None:
    import json

    fs = load_features(args.features)
    d = load_distances(args.dist)
    pair = distance_histograms(d, fs, args.bins)
    payload = {
        "intra": [float(v) for v in pair.intra],
        "inter": [float(v) for v in pair.inter],
        "bin_edges": [float(v) for v in pair.bin_edges],
        "overlap": pair.overlap(),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)


def _limit_threads() -> None:
    threads = os.environ.get("RERANK_THREADS")
    if not threads:
        return
    try:
        count = int(threads)
    except ValueError:
        raise _UsageError(f"RERANK_THREADS must be an integer, got {threads!r}") from None
    from threadpoolctl import threadpool_limits

    threadpool_limits(limits=count)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _limit_threads()
        args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
