"""Canonicalize raw GAP exports into the package's bundled table fixtures.

    gap -q -A export_ctbllib.g       # with OUTDIR and GROUPS bound, see README
    python tools/build_fixtures.py RAWDIR

Reads ``<G>.raw.json`` and ``<G>mod<p>.raw.json`` from RAWDIR, validates them
with the package parser and writes canonical JSON to src/torsion_units/data.
"""
import json
import re
import sys
from pathlib import Path

from torsion_units.chartab import (DATA_DIR, brauer_to_json, parse_brauer, parse_table,
                                   table_to_json)


def dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main(rawdir: str) -> None:
    raw = Path(rawdir)
    for ordinary in sorted(raw.glob("*.raw.json")):
        m = re.fullmatch(r"(.+)mod(\d+)\.raw\.json", ordinary.name)
        if m:
            continue
        group = ordinary.name[: -len(".raw.json")]
        table = parse_table(ordinary.read_text(encoding="utf-8"))
        dump(table_to_json(table), DATA_DIR / f"{group}.json")
        for bpath in sorted(raw.glob(f"{group}mod*.raw.json")):
            bt = parse_brauer(bpath.read_text(encoding="utf-8"), table)
            dump(brauer_to_json(bt), DATA_DIR / f"{group}.mod{bt.prime}.json")


if __name__ == "__main__":
    main(sys.argv[1])
