"""Command-line entry: figure-gen <spec.json> [<spec.json> ...].

Independent figures can be rendered in parallel with --workers; each render
is single-threaded and deterministic.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .render import render
from .spec import SchemaError, load_spec


def _run_one(path):
    spec = load_spec(path)
    return render(spec)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="figure-gen",
        description="render experiment CSVs to deterministic PNG figures",
    )
    parser.add_argument("specs", nargs="+", help="figure spec JSON files")
    parser.add_argument(
        "--workers", type=int, default=1, help="render this many figures at once"
    )
    args = parser.parse_args(argv)
    try:
        if args.workers > 1 and len(args.specs) > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                outputs = list(pool.map(_run_one, args.specs))
        else:
            outputs = [_run_one(path) for path in args.specs]
    except (SchemaError, ValueError, OSError) as exc:
        print(f"figure-gen: {exc}", file=sys.stderr)
        return 1
    for out in outputs:
        print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
