#!/usr/bin/env python3
"""Download the public benchmark instances used by the data-gated tests.

Each instance comes from the SuiteSparse Matrix Collection as a gzipped tar
holding one Matrix Market file; the .mtx lands in the destination directory
under the instance's own name.  Run on a machine with network access:

    python3 tools/fetch_instances.py [--dest DIR] [--only NAME] [--force]
"""

from __future__ import annotations

import argparse
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

BASE_URL = "https://sparse.tamu.edu/MM/{group}/{name}.tar.gz"

INSTANCES = [
    ("Newman", "as-22july06"),
    ("SNAP", "ca-CondMat"),
    ("Pajek", "dictionary28"),
    ("Newman", "cond-mat-2003"),
]


def fetch_one(group: str, name: str, dest: Path, force: bool) -> bool:
    target = dest / f"{name}.mtx"
    if target.exists() and not force:
        print(f"{name}: already present, skipping")
        return True
    url = BASE_URL.format(group=group, name=name)
    print(f"{name}: downloading {url}")
    try:
        with tempfile.NamedTemporaryFile(suffix=".tar.gz") as tmp:
            with urllib.request.urlopen(url, timeout=120) as resp:
                while chunk := resp.read(1 << 20):
                    tmp.write(chunk)
            tmp.flush()
            with tarfile.open(tmp.name, "r:gz") as tar:
                member = next(
                    (m for m in tar.getmembers() if m.name.endswith(f"{name}.mtx")),
                    None,
                )
                if member is None:
                    print(f"{name}: no .mtx member found in archive", file=sys.stderr)
                    return False
                src = tar.extractfile(member)
                assert src is not None
                target.write_bytes(src.read())
    except OSError as exc:
        print(f"{name}: download failed: {exc}", file=sys.stderr)
        return False
    print(f"{name}: saved to {target}")
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dest",
        default=str(Path(__file__).resolve().parent.parent / "data"),
        help="directory to place .mtx files in (default: <repo>/data)",
    )
    parser.add_argument("--only", help="fetch a single instance by name")
    parser.add_argument("--force", action="store_true", help="re-download existing files")
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    wanted = [
        (g, n) for g, n in INSTANCES if args.only is None or n == args.only
    ]
    if not wanted:
        known = ", ".join(n for _, n in INSTANCES)
        print(f"unknown instance {args.only!r}; known: {known}", file=sys.stderr)
        return 1
    ok = all([fetch_one(g, n, dest, args.force) for g, n in wanted])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
