"""``limview`` command line: forward, reconstruct, experiment, analyze.

Settings are layered: built-in defaults, then ``--preset``, then the
``--config`` file, then ``--scale``, then explicit flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import EXPERIMENTS, PRESET_FIGURES, PRESETS, SCALES, RunConfig, load_config, scale_overrides
from .errors import FormatError, IoFailure, LimviewError
from .experiments import (analyze_images, forward, reconstruct_config, run_experiment,
                          summarize, write_outputs)
from .window import KINDS

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2

# flag dest -> RunConfig key
_FLAG_KEYS = {"curve": "curve", "arc": "arc", "phantom": "phantom", "n": "n", "extent": "extent",
              "na": "n_a", "nr": "n_r", "rmax": "r_max", "window": "window", "eps": "eps",
              "order": "order", "filter_dim": "filter_dim", "pad": "pad", "taper": "taper",
              "nt": "n_t", "label": "label", "mask_outside": "mask_outside"}


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors; exit code 2 is reserved for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _global_parser() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--threads", type=int, default=1, help="worker cap for backprojection")
    p.add_argument("--scale", type=int, choices=SCALES,
                   help="image size; also sets n_a = n_r = max(scale, 1024)")
    return p


def _run_parser() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--preset", choices=sorted(PRESETS), help="named configuration")
    p.add_argument("--curve", help="circle | polar | ellipse:a,b | path to an s,x,y CSV")
    p.add_argument("--arc", nargs=2, metavar=("S_START", "S_END"), help="e.g. 0 pi/2")
    p.add_argument("--phantom", help="'(cx, cy, radius, amplitude), ...'")
    p.add_argument("--n", type=int, help="image size in pixels")
    p.add_argument("--extent", type=float, help="image covers [-extent, extent]^2")
    p.add_argument("--na", type=int, help="angular samples")
    p.add_argument("--nr", type=int, help="radial samples")
    p.add_argument("--rmax", type=float, help="largest radius (default: curve diameter)")
    p.add_argument("--window", choices=KINDS)
    p.add_argument("--eps", type=float)
    p.add_argument("--order", type=int)
    p.add_argument("--filter-dim", type=int, choices=(2, 3))
    p.add_argument("--pad", type=int)
    p.add_argument("--taper", type=float)
    p.add_argument("--nt", type=int, help="samples of the squared-radius grid (default 2*nr)")
    p.add_argument("--label", help="output file stem")
    p.add_argument("--mask-outside", dest="mask_outside", action=argparse.BooleanOptionalAction,
                   default=None, help="zero pixels outside the curve instead of failing")
    return p


def build_parser() -> argparse.ArgumentParser:
    glob, run = _global_parser(), _run_parser()
    parser = _Parser(prog="limview", parents=[glob],
                                     description="Limited-view circular Radon reconstruction.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    # globals are accepted after the subcommand too; SUPPRESS keeps the top-level value
    sub_glob = _global_parser()
    for action in sub_glob._actions:
        action.default = argparse.SUPPRESS

    sub.add_parser("forward", parents=[sub_glob, run], help="write the analytic sinogram")
    rec = sub.add_parser("reconstruct", parents=[sub_glob, run],
                         help="reconstruct an image (from a phantom or a saved sinogram)")
    rec.add_argument("--sinogram", help="stem of a saved sinogram to reconstruct from")
    exp = sub.add_parser("experiment", parents=[sub_glob, run], help="run a parameter sweep")
    exp.add_argument("name", choices=sorted(EXPERIMENTS))
    ana = sub.add_parser("analyze", parents=[sub_glob], help="report on saved images")
    ana.add_argument("images", nargs="+", help="image stems (each with a .cfg beside it)")
    ana.add_argument("--report", help="CSV path (default: <out>/report.csv)")
    sub.add_parser("presets", help="list presets and what each configures")
    return parser


def _flags(args) -> dict:
    out = {}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            out[key] = value
    return out


def config_from_args(args, experiment: bool = False) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "preset", None):
        cfg = cfg.update(PRESETS[args.preset])
        cfg = cfg.update({"label": args.preset})
    if args.config:
        cfg = load_config(args.config, cfg)
    if args.scale is not None and not experiment:
        cfg = cfg.update(scale_overrides(args.scale))
    return cfg.update(_flags(args))


def _cmd_forward(args) -> None:
    cfg = config_from_args(args)
    sino = forward(cfg)
    stem = io.write_sinogram(sino, Path(args.out) / f"{cfg.label}_sinogram")
    print(f"wrote {stem}.f64 ({sino.n_a} x {sino.n_r})")


def _cmd_reconstruct(args) -> None:
    cfg = config_from_args(args)
    sino = io.read_sinogram(args.sinogram) if args.sinogram else None
    image = reconstruct_config(cfg, sino, threads=args.threads)
    stem = write_outputs(cfg, image, args.out)
    print(f"wrote {stem}.f64/.json/.pgm and {stem.name}_profile.csv")


def _cmd_experiment(args) -> None:
    # the experiment fixes curve, arc and window; other flags still apply
    base = config_from_args(args, experiment=True)
    scale = args.scale if args.scale is not None else 512
    rows = run_experiment(args.name, scale, args.out, threads=args.threads, base=base)
    print(summarize(rows))
    print(f"wrote {Path(args.out) / args.name / 'report.csv'}")


def _cmd_analyze(args) -> None:
    rows = analyze_images(args.images)
    path = Path(args.report) if args.report else Path(args.out) / "report.csv"
    io.write_csv(path, rows)
    print(summarize(rows))
    print(f"wrote {path}")


def _cmd_presets(args) -> None:
    for name in PRESETS:
        print(f"{name:8s} {PRESET_FIGURES[name]}")


_COMMANDS = {"forward": _cmd_forward, "reconstruct": _cmd_reconstruct,
             "experiment": _cmd_experiment, "analyze": _cmd_analyze, "presets": _cmd_presets}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (IoFailure, FormatError, OSError) as exc:
        print(f"limview: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LimviewError, ValueError) as exc:
        print(f"limview: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
