#!/usr/bin/env python3
"""Regenerate the retrieval corpus (seismic_doc.txt) from the hazard CSV.

The shipped corpus must stay in lockstep with the table; run this after any
table edit. The test suite asserts the two files agree.
"""

import argparse
from pathlib import Path

from rackcheck.datafiles import data_path
from rackcheck.retrieval import load_table, render_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--table", type=Path, default=data_path("seismic_table.csv"))
    parser.add_argument("--out", type=Path, default=data_path("seismic_doc.txt"))
    args = parser.parse_args()

    rows = load_table(args.table)
    text = render_corpus(rows)
    args.out.write_text(text, encoding="utf-8")
    print(f"wrote {args.out} ({len(rows)} cities, {len(text)} chars)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
