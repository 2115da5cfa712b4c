"""Command-line interface.

    fractalscan scan gen --family hilbert --size 8x8 --out o.txt
    fractalscan scan render --family peano --size 27x27 --out curve.svg
    fractalscan metrics dispersion --order o.txt --prefix 16
    fractalscan metrics jumps --family raster --size 16x16
    fractalscan metrics boxdim --family hilbert --size 256x256 --prefix 16384
    fractalscan ssm demo --grid 16x16 --family hilbert
    fractalscan study interp --grid 64 --alpha 0.5 --fraction 0.25 --trials 100
    fractalscan bench --sizes 64,256 --reps 5

Exit codes: 0 success, 1 usage error, 2 runtime error. Data goes to stdout
unless `--out` is given; report subcommands with `--out` also drop a PNG
figure next to the CSV. All outputs are deterministic for a fixed `--seed`.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from fractalscan.bench import bench_to_csv, run_bench
from fractalscan.curves import FAMILIES, GridShape, ScanOrder, make_order
from fractalscan.experiments import run_interp_study, study_to_csv
from fractalscan.fileio import read_scan_order, write_text_atomic
from fractalscan.metrics import (DEFAULT_SCALES, NORMS, box_counting_dimension,
                                 box_counts, metric_report, prefix_samples,
                                 reports_to_csv)
from fractalscan.render import FORMATS, RenderSpec, render_curve
from fractalscan.ssm import random_selective, random_ssm, scan_over_grid, to_json

STUDY_DEFAULTS = {
    "grid": "64x64",
    "families": ",".join(FAMILIES),
    "alpha": "0.5",
    "fraction": "0.25",
    "trials": "100",
    "seed": "0",
}


class UsageError(Exception):
    """Bad flag combination discovered after argparse (exit code 1)."""


def parse_size(text: str) -> GridShape:
    """'8x8', '8X8', or a bare '8' (square)."""
    try:
        parts = text.lower().split("x")
        if len(parts) == 1:
            side = int(parts[0])
            shape = GridShape(side, side)
        elif len(parts) == 2:
            shape = GridShape(int(parts[0]), int(parts[1]))
        else:
            raise ValueError
        if shape.height < 1 or shape.width < 1:
            raise ValueError
        return shape
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected HxW or a positive integer, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated reals, got {text!r}") from None


def _family_list(text: str) -> list[str]:
    fams = [tok.strip() for tok in text.split(",") if tok.strip()]
    for fam in fams:
        if fam not in FAMILIES:
            raise argparse.ArgumentTypeError(
                f"unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
    return fams


def _png_sibling(out_path: str) -> str:
    root, ext = os.path.splitext(os.fspath(out_path))
    if ext.lower() == ".png":
        return root + "-figure.png"
    return root + ".png"


def _emit(text: str, out) -> None:
    if out:
        write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load_order(args) -> ScanOrder:
    """Resolve the order source: an existing file wins over --family/--size."""
    if getattr(args, "order", None):
        order = read_scan_order(args.order)
    else:
        if args.family is None or args.size is None:
            raise UsageError("need either --order FILE or both --family and --size")
        order = make_order(args.family, args.size, window=args.window)
    if getattr(args, "reverse", False):
        order = order.reversed()
    return order


def _add_order_source(sub, include_reverse: bool = False) -> None:
    sub.add_argument("--order", metavar="FILE",
                     help="read the order from a scan-order text file")
    sub.add_argument("--family", choices=FAMILIES)
    sub.add_argument("--size", type=parse_size, metavar="HxW")
    sub.add_argument("--window", type=int, default=None,
                     help="tile side for the local family")
    if include_reverse:
        sub.add_argument("--reverse", action="store_true",
                         help="emit the order back-to-front")


# ---------------------------------------------------------------- handlers

def cmd_scan_gen(args) -> int:
    if args.family is None or args.size is None:
        raise UsageError("scan gen needs --family and --size")
    order = make_order(args.family, args.size, window=args.window)
    if args.reverse:
        order = order.reversed()
    _emit(order.to_text(), args.out)
    return 0


def cmd_scan_render(args) -> int:
    order = _load_order(args)
    if not args.out:
        raise UsageError("scan render writes binary data; --out is required")
    spec = RenderSpec(format=args.render_format, cell=args.cell,
                      stroke=args.stroke)
    render_curve(order, spec, path=args.out)
    return 0


def _metrics_common(args, scales=None, norm: str = "euclidean",
                    method: str = "auto") -> int:
    order = _load_order(args)
    m = args.prefix if args.prefix is not None else order.shape.cells
    report = metric_report(order, m=m, scales=scales, norm=norm, method=method)
    _emit(reports_to_csv([report]), args.out)
    return 0


def cmd_metrics_dispersion(args) -> int:
    return _metrics_common(args, norm=args.norm, method=args.method)


def cmd_metrics_jumps(args) -> int:
    return _metrics_common(args)


def cmd_metrics_boxdim(args) -> int:
    scales = args.scales if args.scales else list(DEFAULT_SCALES)
    code = _metrics_common(args, scales=scales)
    if args.out:
        order = _load_order(args)
        m = args.prefix if args.prefix is not None else order.shape.cells
        samples = prefix_samples(order, m)
        used, counts = box_counts(samples, scales)
        try:
            fit = box_counting_dimension(samples, scales)
        except ValueError:
            from fractalscan.metrics import BoxCountFit
            fit = BoxCountFit(float("nan"), float("nan"))
        from fractalscan.figures import boxdim_figure
        boxdim_figure(used, counts, fit, _png_sibling(args.out),
                      label=samples.source)
    return code


def cmd_ssm_demo(args) -> int:
    seed = args.seed
    order = make_order(args.family, args.grid, window=args.window)
    base = random_ssm(args.state_dim, seed=seed)
    params = random_selective(args.state_dim, seed=seed)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x55]))
    field = rng.standard_normal(tuple(args.grid))
    out = scan_over_grid(order, field, params, base)
    h, w = args.grid
    header = "family,H,W,m,seed,out_min,out_mean,out_rms,out_max"
    row = ",".join((
        args.family, str(h), str(w), str(args.state_dim), str(seed),
        format(out.min(), ".9g"), format(out.mean(), ".9g"),
        format(float(np.sqrt(np.mean(out * out))), ".9g"),
        format(out.max(), ".9g"),
    ))
    _emit(header + "\n" + row + "\n", args.out)
    if args.model_out:
        write_text_atomic(args.model_out, to_json(base, params=params))
    if args.out:
        from fractalscan.figures import field_figure
        field_figure(field, out, _png_sibling(args.out),
                     title=f"{args.family} scan, m={args.state_dim}")
    return 0


def _read_study_config(path) -> dict:
    cfg = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in STUDY_DEFAULTS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = value
    return cfg


def cmd_study_interp(args) -> int:
    cfg = dict(STUDY_DEFAULTS)
    if args.config:
        cfg.update(_read_study_config(args.config))
    # explicit flags beat the config file, which beats built-in defaults
    if args.grid is not None:
        cfg["grid"] = ",".join(f"{s.height}x{s.width}" for s in args.grid)
    if args.families is not None:
        cfg["families"] = ",".join(args.families)
    if args.alpha is not None:
        cfg["alpha"] = ",".join(format(a, "g") for a in args.alpha)
    if args.fraction is not None:
        cfg["fraction"] = ",".join(format(f, "g") for f in args.fraction)
    if args.trials is not None:
        cfg["trials"] = str(args.trials)
    if args.seed is not None:
        cfg["seed"] = str(args.seed)

    shapes = [parse_size(tok) for tok in cfg["grid"].split(",") if tok.strip()]
    families = _family_list(cfg["families"])
    alphas = [float(a) for a in cfg["alpha"].split(",") if a.strip()]
    fractions = [float(f) for f in cfg["fraction"].split(",") if f.strip()]
    results = run_interp_study(shapes=shapes, families=families,
                               fractions=fractions, alphas=alphas,
                               trials=int(cfg["trials"]), seed=int(cfg["seed"]))
    _emit(study_to_csv(results), args.out)
    if args.out:
        from fractalscan.figures import study_figure
        study_figure(results, _png_sibling(args.out))
    return 0


def cmd_bench(args) -> int:
    results = run_bench(sizes=args.sizes, families=args.families or FAMILIES,
                        reps=args.reps, seed=args.seed,
                        scan_size=args.scan_size)
    _emit(bench_to_csv(results), args.out)
    if args.out:
        from fractalscan.figures import bench_figure
        bench_figure(results, _png_sibling(args.out))
    return 0


# ------------------------------------------------------------------ parser

def _common_parent(seed_default=0) -> argparse.ArgumentParser:
    # one instance per subparser: argparse shares action objects between
    # parsers built from the same parent, so later set_defaults calls on one
    # subcommand would bleed into the others
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=seed_default)
    common.add_argument("--out", metavar="PATH",
                        help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv"], default="csv",
                        help="delimited output format")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalscan",
        description="Space-filling scan orders, their metrics, and scan-order "
                    "experiments on grids.")
    top = parser.add_subparsers(dest="command", required=True)

    scan = top.add_parser("scan", help="generate or draw scan orders")
    scan_sub = scan.add_subparsers(dest="subcommand", required=True)

    gen = scan_sub.add_parser("gen", parents=[_common_parent()],
                              help="emit an order in the text format")
    gen.add_argument("--family", choices=FAMILIES)
    gen.add_argument("--size", type=parse_size, metavar="HxW")
    gen.add_argument("--window", type=int, default=None)
    gen.add_argument("--reverse", action="store_true")
    gen.set_defaults(handler=cmd_scan_gen)

    render = scan_sub.add_parser("render", parents=[_common_parent()],
                                 help="draw an order as SVG or PPM")
    _add_order_source(render, include_reverse=True)
    render.add_argument("--render-format", choices=FORMATS, default="svg")
    render.add_argument("--cell", type=int, default=16,
                        help="pixels per grid cell")
    render.add_argument("--stroke", type=float, default=2.0)
    render.set_defaults(handler=cmd_scan_render)

    metrics = top.add_parser("metrics", help="scalar metrics of an order")
    metrics_sub = metrics.add_subparsers(dest="subcommand", required=True)

    disp = metrics_sub.add_parser("dispersion", parents=[_common_parent()])
    _add_order_source(disp)
    disp.add_argument("--prefix", type=int, default=None,
                      help="use only the first M cells as samples")
    disp.add_argument("--norm", choices=NORMS, default="euclidean")
    disp.add_argument("--method", choices=["auto", "exact", "transform"],
                      default="auto")
    disp.set_defaults(handler=cmd_metrics_dispersion)

    jumps = metrics_sub.add_parser("jumps", parents=[_common_parent()])
    _add_order_source(jumps)
    jumps.add_argument("--prefix", type=int, default=None)
    jumps.set_defaults(handler=cmd_metrics_jumps)

    boxdim = metrics_sub.add_parser("boxdim", parents=[_common_parent()])
    _add_order_source(boxdim)
    boxdim.add_argument("--prefix", type=int, default=None)
    boxdim.add_argument("--scales", type=_int_list, default=None,
                        metavar="S1,S2,...")
    boxdim.set_defaults(handler=cmd_metrics_boxdim)

    ssm = top.add_parser("ssm", help="state-space scan demos")
    ssm_sub = ssm.add_subparsers(dest="subcommand", required=True)

    demo = ssm_sub.add_parser("demo", parents=[_common_parent()])
    demo.add_argument("--grid", type=parse_size, default=GridShape(16, 16),
                      metavar="HxW")
    demo.add_argument("--family", choices=FAMILIES, default="hilbert")
    demo.add_argument("--window", type=int, default=None)
    demo.add_argument("--state-dim", type=int, default=2)
    demo.add_argument("--model-out", metavar="PATH",
                      help="also serialize the model as JSON")
    demo.set_defaults(handler=cmd_ssm_demo)

    study = top.add_parser("study", help="reconstruction-error studies")
    study_sub = study.add_subparsers(dest="subcommand", required=True)

    interp = study_sub.add_parser("interp", parents=[_common_parent(seed_default=None)])
    interp.add_argument("--grid", type=parse_size, action="append",
                        default=None, metavar="HxW")
    interp.add_argument("--families", type=_family_list, default=None,
                        metavar="F1,F2,...")
    interp.add_argument("--alpha", type=float, action="append", default=None)
    interp.add_argument("--fraction", type=float, action="append", default=None)
    interp.add_argument("--trials", type=int, default=None)
    interp.add_argument("--config", metavar="FILE",
                        help="key=value study configuration file")
    interp.set_defaults(handler=cmd_study_interp)

    bench = top.add_parser("bench", parents=[_common_parent()],
                           help="timing for generation and grid scans")
    bench.add_argument("--sizes", type=_int_list, default=[64, 256, 1024])
    bench.add_argument("--families", type=_family_list, default=None)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--scan-size", type=int, default=64)
    bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage problems; the contract wants 1
        return 0 if exc.code == 0 else 1
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures: bad files, bad values, IO
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
