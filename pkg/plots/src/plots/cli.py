"""`render_figures` entry point.

Renders each requested figure from its harness summary CSV into <out-dir>,
emitting both PNG and SVG.  Exit codes: 0 success, 1 usage error, 2 bad
input (schema mismatch, missing file, empty grid point).
"""
from __future__ import annotations

import argparse
import os
import sys

from .figures import FigureKind, FigureSpec, SchemaError, render

_PANELS = (
    ("fig1", FigureKind.FIG1, "stepsize sweep summary CSV"),
    ("fig2a", FigureKind.FIG2A, "alpha sweep summary CSV"),
    ("fig2b", FigureKind.FIG2B, "gamma1 sweep summary CSV"),
    ("fig3", FigureKind.FIG3, "gamma1 = alpha^2 sweep summary CSV"),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser():
    p = _Parser(prog="render_figures",
                description="Regenerate benchmark figures from sweep CSVs")
    p.add_argument("out_dir", help="directory for the rendered PNG/SVG files")
    for opt, _, help_text in _PANELS:
        p.add_argument(f"--{opt}", metavar="CSV", help=help_text)
    p.add_argument("--theory-overlay", action="store_true",
                   help="overlay the predicted rate line on Fig1")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    requested = [(opt, kind) for opt, kind, _ in _PANELS
                 if getattr(args, opt) is not None]
    if not requested:
        parser.error("at least one of --fig1/--fig2a/--fig2b/--fig3 is required")
    os.makedirs(args.out_dir, exist_ok=True)
    for opt, kind in requested:
        for ext in ("png", "svg"):
            spec = FigureSpec(
                input_csv=getattr(args, opt),
                kind=kind,
                out_path=os.path.join(args.out_dir, f"{opt}.{ext}"),
                show_theory_overlay=args.theory_overlay,
            )
            try:
                annotation = render(spec)
            except SchemaError as e:
                print(f"render_figures: {e}", file=sys.stderr)
                return 2
        print(f"{opt}: wrote {opt}.png, {opt}.svg [{annotation}]",
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
