"""Recompute tests/data/desk/expected_report.json with the brute-force
reference pipeline from tests/oracles.py.  Run from anywhere; paths inside
the report are stored relative to the package root."""

import json
import os
import sys
from pathlib import Path

PKG_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PKG_ROOT / "src"))
sys.path.insert(0, str(PKG_ROOT / "tests"))

from oracles import build_reference_report  # noqa: E402


def main():
    os.chdir(PKG_ROOT)
    report = build_reference_report(
        "tests/data/desk/corpus.jsonl",
        "tests/data/desk/topics.tsv",
        "tests/data/desk/qrels.txt",
    )
    payload = (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")
    out = Path("tests/data/desk/expected_report.json")
    out.write_bytes(payload)
    print(f"wrote {out} ({len(payload)} bytes)")


if __name__ == "__main__":
    main()
