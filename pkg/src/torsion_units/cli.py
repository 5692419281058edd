"""Command-line front end.

Exit codes:

    0  success (validate: tables ok; check: computed; kimmerle: confirmed)
    1  I/O failure (missing or unreadable file)
    2  invalid table, Brauer table or selection
    3  check: at least one requested order was skipped
    4  kimmerle: inconclusive (some two-prime order undecided)
    5  kimmerle: not confirmed (an extra edge survives)
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .chartab import (BrauerTable, CharacterTable, TableError, bundled_groups, load_brauer,
                      load_bundled, load_table)
from .lutharpassi import FULL, PAPER_SELECTIONS, Selection, load_selections
from .zassenhaus import (NOT_A_DIVISOR, SKIPPED, Budget, default_jobs, kimmerle_orders,
                         order_spectrum, kimmerle_check, report_to_json, report_to_markdown,
                         verdict_to_json, verdict_to_markdown)

log = logging.getLogger("torsion_units")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_SKIPPED, EXIT_INCONCLUSIVE, EXIT_REFUTED = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    """Bad arguments that only become apparent after loading inputs."""


@dataclass
class RunConfig:
    table: str
    brauer: list[str] = field(default_factory=list)
    selection: str = "full"
    orders: list[int] = field(default_factory=list)
    budget: Budget = Budget()
    fmt: str = "markdown"
    out: str | None = None
    jobs: int = 1


def _load_inputs(cfg: RunConfig) -> tuple[CharacterTable, dict[int, BrauerTable]]:
    """A bundled group name or a path; explicit --brauer files replace bundled ones."""
    if cfg.table in bundled_groups() and not Path(cfg.table).exists():
        table, brauer = load_bundled(cfg.table)
        if cfg.brauer:
            brauer = {}
    else:
        table, brauer = load_table(cfg.table), {}
    for path in cfg.brauer:
        bt = load_brauer(path, table)
        brauer[bt.prime] = bt
    return table, brauer


def _selection_map(cfg: RunConfig, required: Sequence[int]):
    mode = cfg.selection
    if mode == "full":
        return FULL
    if mode == "paper":
        path = PAPER_SELECTIONS
    elif mode.startswith("file:"):
        path = mode[len("file:"):]
    else:
        raise UsageError(f"unknown selection mode {mode!r}; use full, paper or file:<path>")
    sels = load_selections(path)
    missing = [k for k in required if k not in sels]
    if missing:
        raise UsageError(f"selection file {path} has no entry for orders {missing}")
    return sels


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _info(cfg: RunConfig, msg: str) -> None:
    """Human diagnostics: stdout in Markdown mode, stderr in JSON mode."""
    print(msg, file=sys.stderr if cfg.fmt == "json" else sys.stdout)


# -- commands -------------------------------------------------------------------

def cmd_validate(cfg: RunConfig) -> int:
    table, brauer = _load_inputs(cfg)
    _info(cfg, f"table {table.group_name}: {len(table.classes)} classes, order {table.group_order}")
    _info(cfg, f"orthogonality: ok ({len(table.characters)} characters)")
    for p, bt in sorted(brauer.items()):
        _info(cfg, f"{bt.label}: ok ({len(bt.characters)} characters on "
                   f"{len(bt.regular_classes)} {p}-regular classes)")
    if cfg.fmt == "json":
        _emit(json.dumps({"group": table.group_name, "valid": True,
                          "characters": len(table.characters),
                          "brauer": sorted(brauer)}), cfg)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    table, brauer = _load_inputs(cfg)
    if not cfg.orders:
        raise UsageError("check needs at least one --order")
    if any(k < 2 for k in cfg.orders):
        raise UsageError("orders must be at least 2")
    divisible = [k for k in cfg.orders if table.exponent % k == 0]
    sel = _selection_map(cfg, divisible)
    spectra = order_spectrum(table, brauer, sel, cfg.budget, orders=cfg.orders, jobs=cfg.jobs)
    verdicts = [spectra[k] for k in cfg.orders]
    if cfg.fmt == "json":
        _emit(json.dumps([verdict_to_json(v) for v in verdicts], ensure_ascii=False), cfg)
    else:
        parts = []
        for v in verdicts:
            if v.status == NOT_A_DIVISOR:
                parts.append(f"### Order {v.order}: not a divisor of exponent {table.exponent}\n")
            else:
                parts.append(verdict_to_markdown(v, table.class_names))
        _emit("\n".join(parts), cfg)
    return EXIT_SKIPPED if any(v.status == SKIPPED for v in verdicts) else EXIT_OK


def cmd_kimmerle(cfg: RunConfig) -> int:
    table, brauer = _load_inputs(cfg)
    orders = kimmerle_orders(table)
    sel = _selection_map(cfg, [k for k in orders if table.exponent % k == 0])
    spectra = order_spectrum(table, brauer, sel, cfg.budget, orders=orders, jobs=cfg.jobs)
    report = kimmerle_check(table, spectra)
    if cfg.fmt == "json":
        _emit(json.dumps(report_to_json(report), ensure_ascii=False), cfg)
    else:
        _emit(report_to_markdown(report, table.class_names), cfg)
    if report.kc_verdict is None:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if report.kc_verdict else EXIT_REFUTED


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", required=True,
                        help=f"table JSON path or bundled group ({', '.join(bundled_groups())})")
    common.add_argument("--brauer", action="append", default=[], metavar="PATH",
                        help="Brauer table JSON (repeatable)")
    common.add_argument("--format", dest="fmt", choices=("markdown", "json"), default="markdown")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--selection", default="full",
                         help="full (default), paper, or file:<path>")
    solving.add_argument("--budget-cases", "--budget", type=int, default=None, dest="budget_cases",
                         help="skip orders with more case assignments than this")
    solving.add_argument("--budget-seconds", type=float, default=None,
                         help="skip orders that take longer than this")
    solving.add_argument("--jobs", type=int, default=default_jobs(),
                         help="worker processes (default: CPU count)")

    parser = argparse.ArgumentParser(prog="torsion-units",
                                     description="HeLP constraints on torsion units of integral group rings")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="parse and validate tables")
    chk = sub.add_parser("check", parents=[common, solving], help="admissible tuples for given orders")
    chk.add_argument("--order", type=int, action="append", default=[], dest="orders")
    sub.add_parser("kimmerle", parents=[common, solving], help="prime graph comparison")
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        table=ns.table, brauer=ns.brauer, selection=getattr(ns, "selection", "full"),
        orders=getattr(ns, "orders", []),
        budget=Budget(getattr(ns, "budget_cases", None), getattr(ns, "budget_seconds", None)),
        fmt=ns.fmt, out=ns.out, jobs=max(1, getattr(ns, "jobs", 1)),
    )


COMMANDS = {"validate": cmd_validate, "check": cmd_check, "kimmerle": cmd_kimmerle}


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    cfg = _config(ns)
    try:
        return COMMANDS[ns.command](cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TableError, UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
