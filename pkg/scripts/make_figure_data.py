#!/usr/bin/env python3
"""Run every documented figure config and emit its data files.

Each JSON in configs/ is a self-contained experiment; outputs land in
<out>/<config-stem>/. The whole set runs at desk scale in a few minutes.
"""

import argparse
import time
from pathlib import Path

from topowalk import load_config, run, write_artifacts

REPO_ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--configs", default=str(REPO_ROOT / "configs"), help="config directory")
    parser.add_argument("--out", default=str(REPO_ROOT / "out" / "figures"), help="output root")
    parser.add_argument("--only", action="append", help="run only configs whose stem contains this")
    args = parser.parse_args()

    paths = sorted(Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if any(tag in p.stem for tag in args.only)]
    if not paths:
        parser.error(f"no configs found under {args.configs}")

    total = time.perf_counter()
    for path in paths:
        t0 = time.perf_counter()
        artifacts = run(load_config(path))
        out_dir = Path(args.out) / path.stem
        write_artifacts(artifacts, out_dir)
        print(f"{path.stem:28s} {time.perf_counter() - t0:6.1f}s -> {out_dir}")
    print(f"total {time.perf_counter() - total:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
