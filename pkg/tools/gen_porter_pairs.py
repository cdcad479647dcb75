"""Regenerate tests/data/porter_pairs.txt from the reference stemmer port.

Run from the repository root:

    python tools/gen_porter_pairs.py
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import reference_stem  # noqa: E402
from test_porter import grid_vocabulary  # noqa: E402


def main():
    out = ROOT / "tests" / "data" / "porter_pairs.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        for word in grid_vocabulary():
            fh.write(f"{word}\t{reference_stem(word)}\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
