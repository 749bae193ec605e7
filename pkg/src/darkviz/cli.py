"""Command line: ``darkviz transform | invert | extract | evaluate``.

Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 processing error.
Diagnostics go to stderr; JSON payloads go to the requested file or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .colormath import Rgb8
from .errors import AllBackground, DarkvizError, InvalidConfig, KTooLarge
from .evaluate import batch_report
from .imageio import ImageReadError, load_image, save_png
from .optimize import SaConfig, Weights
from .palette import DEFAULT_BG_TOLERANCE, BackgroundSpec, extract_palette, mask_background
from .pipeline import transform
from .recolor import RenderMode, compose_preview, invert_image

log = logging.getLogger("darkviz")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PROCESSING = 3

DEFAULT_K = 8
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def hex_color(text: str) -> Rgb8:
    try:
        return Rgb8.from_hex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid hex color {text!r} (expected #RRGGBB)") from None


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _add_bg(p: argparse.ArgumentParser, dark: bool = True) -> None:
    p.add_argument("--light-bg", type=hex_color, default=Rgb8(255, 255, 255), help="light-mode background (default #FFFFFF)")
    if dark:
        p.add_argument(
            "--dark-bg",
            type=hex_color,
            default=Rgb8(0, 0, 0),
            help="target dark background (default #000000; #121212 is a common alternative)",
        )
    p.add_argument(
        "--bg-tolerance",
        type=float,
        default=DEFAULT_BG_TOLERANCE,
        help="dE2000 radius around --light-bg treated as background (default %(default)s)",
    )


def _add_clustering(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "-k",
        type=positive_int,
        default=DEFAULT_K,
        help="number of palette colors; use more for multi-view or continuous charts (default %(default)s)",
    )
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (default %(default)s)")


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optimizer")
    g.add_argument("--w-lc", type=float, default=1.0, help="luminance contrast weight (default 1.0)")
    g.add_argument(
        "--w-cc",
        type=float,
        default=1.0,
        help="color consistency weight; ~0.5 for continuous colormaps, 1.0-1.5 for categorical (default 1.0)",
    )
    g.add_argument("--w-ac", type=float, default=1.0, help="adjacent color difference weight (default 1.0)")
    g.add_argument("--iterations", type=positive_int, default=20_000)
    g.add_argument("--t0", type=float, default=10_000.0, help="initial temperature")
    g.add_argument("--alpha", type=float, default=0.99, help="cooling rate in (0, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="darkviz", description="Adapt light-mode chart images to dark mode.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress every 1,000 iterations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="write a dark-mode version of a chart")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    _add_bg(p)
    _add_clustering(p)
    _add_optimizer(p)
    p.add_argument("--mode", choices=[m.value for m in RenderMode], default=RenderMode.QUANTIZE.value)
    p.add_argument("--report", type=Path, help="write a JSON report here")
    p.add_argument("--preview", type=Path, help="write a side-by-side light|dark PNG here")

    p = sub.add_parser("invert", help="RGB inversion baseline (255 - c)")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)

    p = sub.add_parser("extract", help="print the extracted palette as JSON")
    p.add_argument("--input", required=True, type=Path)
    _add_bg(p, dark=False)
    _add_clustering(p)

    p = sub.add_parser("evaluate", help="score light/inverse/dark conditions for a chart or a directory")
    p.add_argument("--input", required=True, type=Path, help="image file or directory of images")
    p.add_argument("--report", type=Path, help="write the JSON report here (default stdout)")
    _add_bg(p)
    _add_clustering(p)
    _add_optimizer(p)
    return parser


def _background(args) -> BackgroundSpec:
    try:
        return BackgroundSpec(args.light_bg, getattr(args, "dark_bg", Rgb8(0, 0, 0)), args.bg_tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _configs(args) -> tuple[BackgroundSpec, Weights, SaConfig]:
    bg = _background(args)
    try:
        weights = Weights(args.w_lc, args.w_cc, args.w_ac)
        cfg = SaConfig(t0=args.t0, alpha=args.alpha, iterations=args.iterations, seed=args.seed)
    except (InvalidConfig, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return bg, weights, cfg


def _emit_json(payload: dict, path: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def cmd_transform(args) -> int:
    bg, weights, cfg = _configs(args)
    image = load_image(args.input, bg.light_bg)

    def progress(it, t, cur, best):
        log.info("iter %6d  T=%.3g  current=%.4f  best=%.4f", it, t, cur, best)

    result = transform(
        image, bg, k=args.k, weights=weights, cfg=cfg, mode=args.mode,
        progress=progress if args.verbose else None,
    )
    save_png(args.output, result.image)
    if args.preview:
        save_png(args.preview, compose_preview(image, result.image))
    if args.report:
        _emit_json(result.report(), args.report)
    log.info("wrote %s", args.output)
    return EXIT_OK


def cmd_invert(args) -> int:
    image = load_image(args.input)
    save_png(args.output, invert_image(image))
    return EXIT_OK


def cmd_extract(args) -> int:
    bg = _background(args)
    image = load_image(args.input, bg.light_bg)
    mask = mask_background(image, bg)
    pal = extract_palette(image, mask, args.k, seed=args.seed)
    _emit_json(
        {
            "k_requested": pal.k_requested,
            "k": pal.k,
            "foreground_pixels": int(mask.sum()),
            "colors": [
                {"index": i, "hex": c.hex(), "pixels": int(n)}
                for i, (c, n) in enumerate(zip(pal.colors(), pal.counts))
            ],
            "adjacency": sorted([list(p) for p in pal.adjacency]),
        },
        None,
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    bg, weights, cfg = _configs(args)
    if not args.input.exists():
        raise ImageReadError(f"{args.input} does not exist")
    try:
        report = batch_report(args.input, bg, k=args.k, weights=weights, cfg=cfg)
    except ValueError as exc:
        raise DarkvizError(str(exc)) from exc
    _emit_json(report, args.report)
    return EXIT_OK


COMMANDS = {
    "transform": cmd_transform,
    "invert": cmd_invert,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    with warnings.catch_warnings():
        # KTooLarge is already logged by palette extraction
        warnings.simplefilter("ignore", KTooLarge)
        try:
            return COMMANDS[args.command](args)
        except UsageError as exc:
            print(f"darkviz: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except (ImageReadError, OSError) as exc:
            print(f"darkviz: I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        except (AllBackground, DarkvizError) as exc:
            print(f"darkviz: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
