"""Command-line pipeline: search, build, encode, estimate, eval, report, bench.

Every subcommand validates its inputs and exits nonzero with a diagnostic on
malformed files or out-of-range parameters.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import formats
from .bench import format_bench, run_bench
from .encoder import EncoderConfig, encode
from .estimator import EstimatorConfig, SoftArgmaxOperator, estimate_flow
from .features import census_features, pool_image
from .grid import FlowField, endpoint_error, f1_all, upsample_flow
from .knn import topk_search
from .viz import flow_to_color
from .volume import (
    build_sparse,
    format_bytes,
    format_element_count,
    memory_report,
    size_table,
)


def _load_gray(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.float64)


def _save_rgb(rgb: np.ndarray, path) -> None:
    from PIL import Image

    Image.fromarray(rgb, mode="RGB").save(path)


def _cmd_knn(args) -> int:
    f1 = formats.read_sfm(args.f1)
    f2 = formats.read_sfm(args.f2)
    matches = topk_search(f1, f2, args.k, scale=args.scale)
    formats.write_stk(matches, args.out)
    print(f"wrote {args.out}: {matches.height}x{matches.width} pixels, k={matches.k}")
    return 0


def _cmd_build(args) -> int:
    f1 = formats.read_sfm(args.f1)
    f2 = formats.read_sfm(args.f2)
    vol = build_sparse(f1, f2, args.k, scale=args.scale)
    formats.write_scv(vol, args.out)
    print(
        f"wrote {args.out}: {vol.height}x{vol.width} pixels, k={vol.k}, "
        f"{vol.element_count} stored values"
    )
    return 0


def _cmd_encode(args) -> int:
    vol = formats.read_scv(args.vol)
    cfg = EncoderConfig(levels=args.levels, radius=args.radius)
    motion = encode(vol, cfg)
    formats.write_smt(motion, args.out)
    print(f"wrote {args.out}: {motion.height}x{motion.width}x{motion.channels}")
    return 0


def _cmd_estimate(args) -> int:
    img1 = _load_gray(args.img1)
    img2 = _load_gray(args.img2)
    if img1.shape != img2.shape:
        raise ValueError(f"image shapes differ: {img1.shape} vs {img2.shape}")
    if args.downsample > 1:
        img1 = pool_image(img1, args.downsample)
        img2 = pool_image(img2, args.downsample)
    f1 = census_features(img1, patch_radius=args.census_radius)
    f2 = census_features(img2, patch_radius=args.census_radius)
    cfg = EstimatorConfig(
        iterations=args.iterations,
        k=args.k,
        encoder=EncoderConfig(levels=args.levels, radius=args.radius),
        temperature=args.temperature,
    )
    flows = estimate_flow(f1, f2, cfg, op=SoftArgmaxOperator(temperature=cfg.temperature))
    flow = upsample_flow(flows[-1], args.downsample)
    formats.write_flo(flow, args.out)
    print(f"wrote {args.out}: {flow.height}x{flow.width} flow")
    if args.viz:
        _save_rgb(flow_to_color(flow), args.viz)
        print(f"wrote {args.viz}")
    return 0


def _cmd_eval(args) -> int:
    flow = formats.read_flo(args.flow)
    gt = formats.read_flo(args.gt)
    if args.mask:
        mask = _load_gray(args.mask) > 0
        if mask.shape != (gt.height, gt.width):
            raise ValueError(f"mask shape {mask.shape} != flow {(gt.height, gt.width)}")
        gt = FlowField(gt.uv, mask if gt.valid is None else (gt.valid & mask))
    epe = endpoint_error(flow, gt)
    outliers = f1_all(flow, gt)
    print(f"EPE {epe:.3f}, F1-all {outliers:.2f}%")
    return 0


def _cmd_memory_report(args) -> int:
    if args.table4a:
        sys.stdout.write(size_table(args.height, args.width))
        return 0
    k = None if args.dense else args.k
    rep = memory_report(args.height, args.width, args.divisor, k)
    print(
        f"{rep.variant} volume at 1/{rep.resolution_divisor} resolution "
        f"({rep.feature_height}x{rep.feature_width}): "
        f"{rep.element_count} values, {rep.bytes} bytes"
    )
    print(f"rounded: {format_element_count(rep.element_count)} elements, "
          f"{format_bytes(rep.bytes)}")
    if rep.k is not None:
        print(f"with coordinates: {rep.bytes_with_coordinates} bytes "
              f"({format_bytes(rep.bytes_with_coordinates)})")
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise ValueError("no benchmark sizes given")
    backends = args.backends.split(",") if args.backends else None
    rows = run_bench(
        sizes,
        k=args.k,
        channels=args.channels,
        repeats=args.repeats,
        backends=backends,
    )
    sys.stdout.write(format_bench(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseflow",
        description="Sparse correlation volume pipeline for dense matching",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("knn", help="exact top-k correlation search between two feature maps")
    p.add_argument("--f1", required=True, help="source feature map (.sfm)")
    p.add_argument("--f2", required=True, help="target feature map (.sfm)")
    p.add_argument("-k", type=int, default=8)
    p.add_argument("--scale", type=float, default=1.0, help="score scale factor")
    p.add_argument("--out", required=True, help="output matches (.stk)")
    p.set_defaults(func=_cmd_knn)

    p = sub.add_parser("build", help="build a sparse correlation volume")
    p.add_argument("--f1", required=True, help="source feature map (.sfm)")
    p.add_argument("--f2", required=True, help="target feature map (.sfm)")
    p.add_argument("-k", type=int, default=8)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output volume (.scv)")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("encode", help="encode a sparse volume into a motion tensor")
    p.add_argument("--vol", required=True, help="input volume (.scv)")
    p.add_argument("-r", "--radius", type=int, default=3)
    p.add_argument("-L", "--levels", type=int, default=5)
    p.add_argument("--out", required=True, help="output motion tensor (.smt)")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("estimate", help="estimate flow between two grayscale images")
    p.add_argument("--img1", required=True)
    p.add_argument("--img2", required=True)
    p.add_argument("-k", type=int, default=8)
    p.add_argument("-N", "--iterations", type=int, default=8)
    p.add_argument("-r", "--radius", type=int, default=3)
    p.add_argument("-L", "--levels", type=int, default=5)
    p.add_argument("--census-radius", type=int, default=2)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--downsample", type=int, default=1,
                   help="average-pool images by this factor before matching")
    p.add_argument("--out", required=True, help="output flow (.flo)")
    p.add_argument("--viz", help="optional flow visualization (.png)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("eval", help="print EPE and F1-all of a flow against ground truth")
    p.add_argument("--flow", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--mask", help="optional validity mask image (nonzero = valid)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("memory-report", help="correlation volume size and memory")
    p.add_argument("--height", type=int, default=436)
    p.add_argument("--width", type=int, default=1024)
    p.add_argument("--divisor", type=int, default=4)
    p.add_argument("-k", type=int, default=8)
    p.add_argument("--dense", action="store_true", help="report the dense volume")
    p.add_argument("--table4a", action="store_true",
                   help="print the full size/memory table for both resolutions")
    p.set_defaults(func=_cmd_memory_report)

    p = sub.add_parser("bench", help="time top-k search and encoding per backend")
    p.add_argument("--sizes", default="16,32,48", help="comma-separated grid sizes")
    p.add_argument("-k", type=int, default=8)
    p.add_argument("--channels", type=int, default=32)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--backends", help="comma-separated subset of numba,numpy")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
