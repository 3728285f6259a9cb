"""Run the acceptance suite and print one line per criterion.

Usage::

    python3 scripts/run_acceptance.py [-v]

With ``-v`` every checked cell is shown as well.  The exit status is
pytest's (non-zero when any criterion fails).
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


def main(argv):
    args = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    if "-v" in argv:
        args.append("-s")
    return pytest.main(args)


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
