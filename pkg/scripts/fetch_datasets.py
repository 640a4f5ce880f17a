#!/usr/bin/env python3
"""Download the large external datasets used by the non-gating acceptance checks.

Files land in ``$MMCLUST_DATA_DIR`` (or the directory given with ``--dest``):

* ``u.data``: MovieLens 100K ratings (user, item, rating, timestamp; tab separated).
  Fetched automatically from GroupLens.
* ``bibsonomy.tas``: a BibSonomy "tas" dump (user, tag, content id, ... per line,
  tab separated, in the dump's native order). The dumps need a signed license
  agreement, so this script only prints where to request one; place the
  extracted ``tas`` file at the path shown.
* ``hitech.edges`` / ``mexican.edges``: one-mode edge lists in the format read by
  ``mmclust.io.read_edges`` (one ``u v`` pair per line, a lone label for an
  isolated vertex). These come from the UCINET/Pajek network collections and
  must be converted by hand.

Nothing here is imported by the library or the test suite.
"""

import argparse
import io
import os
import sys
import urllib.request
import zipfile
from pathlib import Path

MOVIELENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
BIBSONOMY_INFO = "https://www.kde.cs.uni-kassel.de/bibsonomy/dumps/"


def fetch_movielens(dest: Path) -> Path:
    target = dest / "u.data"
    if target.exists():
        print(f"{target} already present")
        return target
    print(f"downloading {MOVIELENS_URL}")
    with urllib.request.urlopen(MOVIELENS_URL, timeout=120) as resp:
        payload = resp.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        target.write_bytes(zf.read("ml-100k/u.data"))
    print(f"wrote {target}")
    return target


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default=os.environ.get("MMCLUST_DATA_DIR"),
                        help="target directory (default $MMCLUST_DATA_DIR)")
    parser.add_argument("--skip-movielens", action="store_true")
    args = parser.parse_args(argv)
    if not args.dest:
        parser.error("set MMCLUST_DATA_DIR or pass --dest")
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    if not args.skip_movielens:
        fetch_movielens(dest)
    print(f"BibSonomy: request a dump at {BIBSONOMY_INFO} and save the tas file as "
          f"{dest / 'bibsonomy.tas'}")
    for name in ("hitech.edges", "mexican.edges"):
        state = "present" if (dest / name).exists() else "missing (convert by hand)"
        print(f"{dest / name}: {state}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
