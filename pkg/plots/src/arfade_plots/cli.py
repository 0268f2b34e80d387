"""`plots --csv <aggregate.csv> --preset fig1|fig2|fig3|fig4 --out <image>`.

Exit codes: 0 success, 1 malformed schema / bad arguments, 2 missing or
unreadable file, 3 empty selection.
"""

from __future__ import annotations

import argparse
import sys

from .render import PRESETS, RenderError, preset_spec, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _Parser(prog="plots", description=__doc__)
    parser.add_argument("--csv", required=True, help="aggregate CSV from an arfade experiment")
    parser.add_argument("--preset", required=True, choices=sorted(PRESETS))
    parser.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    args = parser.parse_args(argv)
    try:
        out = render(preset_spec(args.preset, args.csv, args.out))
    except RenderError as exc:
        print(f"plots: error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
