"""Rebuild the benchmark tables and set them next to the published values.

Usage::

    python3 scripts/reproduce_tables.py [--tables 1 6 7] [--out results/]

For every table a markdown file with our rows, the reference rows and a
per-cell relative difference is written, plus a CSV of our rows.
"""

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

from ringpen.cli import table


@dataclass
class Options:
    tables: list = field(default_factory=lambda: list(range(1, 8)))
    out: Path = Path("results")


def diff_rows(t):
    out = []
    for ours, theirs in zip(t.rows, t.reference):
        row = []
        for a, b in zip(ours, theirs):
            if isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool) \
                    and a is not None and b not in (None, 0) and math.isfinite(a):
                row.append(f"{(a - b) / abs(b):+.2%}")
            else:
                row.append(a if a == b else f"{a} / {b}")
        out.append(row)
    return out


def main(opts):
    opts.out.mkdir(parents=True, exist_ok=True)
    for n in opts.tables:
        t = table(n)
        (opts.out / f"table{n}.csv").write_text(t.to_csv())
        text = [f"# Table {n}", "", "ours", "", t.to_markdown(), "published", "",
                t.to_markdown(t.reference), "relative difference", "", t.to_markdown(diff_rows(t))]
        (opts.out / f"table{n}.md").write_text("\n".join(text))
        print(f"Table {n}\n\n{t.to_markdown()}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--tables", type=int, nargs="+", default=list(range(1, 8)))
    p.add_argument("--out", type=Path, default=Path("results"))
    a = p.parse_args()
    main(Options(a.tables, a.out))
