"""``wavescope`` command line.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig, Sweep, parse_config, parse_outputs
from .document import run_portrait
from .errors import NumericalError, ValidationError
from .figures import region_grid, reproduce_figures, run_region, run_sweep, write_portrait

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


def _read_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    outputs = parse_outputs(args.formats, None) if args.formats else None
    return cfg.override(alpha0=args.alpha0, lam=args.lam, epsilon=args.epsilon, out_dir=args.out, outputs=outputs)


def cmd_portrait(args) -> int:
    if args.config:
        cfg = _read_config(args.config)
    else:
        if args.alpha0 is None or args.lam is None:
            raise ValidationError("portrait needs --config or both --alpha0 and --lambda")
        cfg = RunConfig(alpha0=args.alpha0, lam=args.lam)
    cfg = _apply_flags(cfg, args)
    if isinstance(cfg.lam, Sweep):
        raise ValidationError("portrait needs a single lambda; use 'wavescope sweep' for sweep(...)")
    doc = run_portrait(cfg)
    for p in write_portrait(doc, cfg.out_dir, cfg.outputs):
        print(p)
    for w in doc.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_region(args) -> int:
    try:
        lo, hi, steps = args.alpha0_range.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise ValidationError(f"--alpha0-range expects LO:HI:STEPS, got {args.alpha0_range!r}") from None
    _, paths = run_region(region_grid(lo, hi, steps), args.out, args.resolution)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _read_config(args.config)
    if args.out is not None:
        cfg = cfg.override(out_dir=args.out)
    rows, merges, paths = run_sweep(cfg, cfg.out_dir)
    for p in paths:
        print(p)
    for m in merges:
        print(f"merge at lambda={m['lambda']!r} ({m['side']})")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    bundle = reproduce_figures(args.out)
    for c in bundle.checks:
        print(c.line())
    return EXIT_OK if bundle.ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavescope", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("portrait", help="phase portrait for one wave")
    p.add_argument("--config", type=Path)
    p.add_argument("--alpha0", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.add_argument("--formats", help="comma list of svg,csv,json")
    p.set_defaults(func=cmd_portrait)

    r = sub.add_parser("region", help="feasible (alpha0, Y0) region")
    r.add_argument("--alpha0-range", required=True, help="LO:HI:STEPS")
    r.add_argument("--resolution", type=int, default=401, help="Y0 samples per alpha0")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_region)

    s = sub.add_parser("sweep", help="critical points along lambda=sweep(lo,hi,steps)")
    s.add_argument("--config", type=Path, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("reproduce-figures", help="regenerate every figure with structural checks")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_reproduce)
    return ap


def _join_negative_range(argv):
    # argparse reads "-10:50:31" as an option; glue it to its flag
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--alpha0-range":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_range(argv))
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
