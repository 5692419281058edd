"""Per-order verdicts, ZC status, prime graphs and the Kimmerle check.

Orders are processed bottom-up over the divisor lattice: the admissible
tuples of every proper power ``u^d`` must be known before order ``k`` is
attempted.
"""
from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence, Union

from .chartab import BrauerTable, CharacterTable
from .cyclotomics import divisors, prime_divisors
from .lutharpassi import (FULL, AugTuple, CaseAssignment, Selection, build_system, divisor_cases,
                          proper_divisors, support_classes)
from .solver import SolutionSet, UnboundedError, enumerate_solutions

log = logging.getLogger(__name__)

EXCLUDED = "excluded"
TRIVIAL = "trivial-only"
CONSTRAINED = "constrained"
SKIPPED = "skipped"
NOT_A_DIVISOR = "not-a-divisor"


@dataclass(frozen=True)
class Budget:
    max_cases: int | None = None
    max_seconds: float | None = None

    def allows_cases(self, n: int) -> bool:
        return self.max_cases is None or n <= self.max_cases


UNLIMITED = Budget()
MIN_PARALLEL_CASES = 16   # below this, process start-up costs more than it saves


@dataclass
class OrderVerdict:
    order: int
    status: str
    support: tuple[str, ...] = ()
    solutions: SolutionSet | None = None
    cases: list[tuple[CaseAssignment, SolutionSet]] = field(default_factory=list)
    selection: str = ""
    note: str = ""

    @property
    def admissible(self) -> list[AugTuple]:
        return list(self.solutions) if self.solutions else []


@dataclass(frozen=True)
class PrimeGraph:
    vertices: frozenset[int]
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        for e in self.edges:
            if not e <= self.vertices or len(e) != 2:
                raise ValueError(f"bad edge {sorted(e)}")

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def __le__(self, other: PrimeGraph) -> bool:
        return self.vertices <= other.vertices and self.edges <= other.edges


@dataclass
class SpectrumReport:
    group: str
    verdicts: dict[int, OrderVerdict]
    graph_G: PrimeGraph
    graph_V: PrimeGraph
    kc_verdict: bool | None          # None: inconclusive
    undecided_orders: list[int] = field(default_factory=list)


# -- helpers -------------------------------------------------------------------------

SelectionMap = Union[Selection, Mapping[int, Selection], Callable[[int], "Selection | None"]]


def _selection_for(selection_map: SelectionMap, k: int) -> Selection | None:
    if isinstance(selection_map, Selection):
        return selection_map
    if callable(selection_map):
        return selection_map(k)
    return selection_map.get(k)


def _selection_label(sel: Selection) -> str:
    if sel.full:
        return "full"
    return ", ".join(f"{c}/{p}/l={l}" for c, p, l in sel.triples) or "none"


def _solve_case(table, brauer, k, case, selection) -> SolutionSet | None:
    """Solutions of one case, or None when the constraints admit infinitely many."""
    try:
        return enumerate_solutions(build_system(table, brauer, k, case, selection))
    except UnboundedError:
        return None


_WORKER: tuple = ()


def _init_worker(*context) -> None:
    global _WORKER
    _WORKER = context   # table, brauer tables, k, selection: shipped once per process


def _solve_in_worker(case: CaseAssignment) -> SolutionSet | None:
    table, brauer, k, selection = _WORKER
    return _solve_case(table, brauer, k, case, selection)


def _classify(k: int, union: SolutionSet, spectra: Mapping[int, OrderVerdict]) -> str:
    if not union:
        return EXCLUDED
    lower_trivial = all(spectra[k // d].status == TRIVIAL for d in proper_divisors(k))
    if lower_trivial and all(t.is_trivial() for t in union):
        return TRIVIAL
    return CONSTRAINED


# -- operations -------------------------------------------------------------------------

def admissible_tuples(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable], k: int,
                      selection: Selection, spectra: Mapping[int, OrderVerdict],
                      budget: Budget = UNLIMITED, jobs: int = 1) -> OrderVerdict:
    """Solve every case assignment for order ``k`` and classify the union."""
    support = tuple(support_classes(table, k))
    label = _selection_label(selection)
    if table.exponent % k:
        return OrderVerdict(k, NOT_A_DIVISOR, support, selection=label,
                            note=f"{k} does not divide the exponent {table.exponent}")
    lower = {k // d for d in proper_divisors(k)}
    missing = sorted(m for m in lower if m not in spectra)
    if missing:
        raise KeyError(f"order {k} needs verdicts for orders {missing} first")
    dead = sorted(m for m in lower if spectra[m].status in (EXCLUDED, NOT_A_DIVISOR))
    if dead:
        return OrderVerdict(k, EXCLUDED, support, SolutionSet.build(support, []), selection=label,
                            note=f"a proper power would have excluded order {dead}")
    blocked = sorted(m for m in lower if spectra[m].status == SKIPPED)
    if blocked:
        return OrderVerdict(k, SKIPPED, support, selection=label,
                            note=f"orders {blocked} were skipped")
    sub = {m: spectra[m].admissible for m in lower}
    n_cases = 1
    for m in lower:
        n_cases *= len(sub[m])
    if not budget.allows_cases(n_cases):
        return OrderVerdict(k, SKIPPED, support, selection=label,
                            note=f"{n_cases} case assignments exceed the budget")
    cases = divisor_cases(k, sub)
    started = time.monotonic()
    results: list[tuple[CaseAssignment, SolutionSet]] = []
    if jobs > 1 and len(cases) >= MIN_PARALLEL_CASES:
        chunk = max(1, len(cases) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(table, dict(brauer_tables), k, selection)) as pool:
            for case, sols in zip(cases, pool.map(_solve_in_worker, cases, chunksize=chunk)):
                results.append((case, sols))
                if budget.max_seconds is not None and time.monotonic() - started > budget.max_seconds:
                    pool.shutdown(cancel_futures=True)
                    return OrderVerdict(k, SKIPPED, support, selection=label,
                                        note=f"time budget of {budget.max_seconds}s exceeded")
    else:
        for case in cases:
            if budget.max_seconds is not None and time.monotonic() - started > budget.max_seconds:
                return OrderVerdict(k, SKIPPED, support, selection=label,
                                    note=f"time budget of {budget.max_seconds}s exceeded")
            results.append((case, _solve_case(table, brauer_tables, k, case, selection)))
    if any(sols is None for _, sols in results):
        return OrderVerdict(k, SKIPPED, support, selection=label,
                            note="the selected constraints leave infinitely many tuples; "
                                 "add characters that separate the classes")
    union = SolutionSet.build(support, [t for _, sols in results for t in sols])
    status = _classify(k, union, spectra)
    log.info("order %d: %d cases, %d tuples, %s", k, len(cases), len(union), status)
    return OrderVerdict(k, status, support, union, results, label)


def candidate_orders(table: CharacterTable) -> list[int]:
    """Divisors of the exponent greater than 1, smallest first."""
    return [d for d in divisors(table.exponent) if d > 1]


def order_spectrum(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable],
                   selection_map: SelectionMap = FULL, budget: Budget = UNLIMITED,
                   orders: Iterable[int] | None = None, jobs: int = 1) -> dict[int, OrderVerdict]:
    """Verdicts for ``orders`` (default: every divisor of the exponent) and their divisors."""
    if orders is None:
        wanted = set(candidate_orders(table))
    else:
        wanted = set()
        for k in orders:
            if table.exponent % k:
                wanted.add(k)
            else:
                wanted.update(d for d in divisors(k) if d > 1)
    element_orders = set(table.element_orders())
    spectra: dict[int, OrderVerdict] = {}
    for k in sorted(wanted):
        if table.exponent % k:
            spectra[k] = OrderVerdict(k, NOT_A_DIVISOR,
                                      note=f"{k} does not divide the exponent {table.exponent}")
            continue
        sel = _selection_for(selection_map, k)
        if sel is None:
            spectra[k] = OrderVerdict(k, SKIPPED, tuple(support_classes(table, k)),
                                      note="no constraint selection for this order")
            continue
        v = admissible_tuples(table, brauer_tables, k, sel, spectra, budget, jobs)
        if k in element_orders and v.status == EXCLUDED:
            raise RuntimeError(f"order {k} of a group element was excluded; the table is inconsistent")
        spectra[k] = v
    return spectra


def prime_graph_of_group(table: CharacterTable) -> PrimeGraph:
    primes = frozenset(prime_divisors(table.group_order))
    edges = set()
    for c in table.classes:
        ps = [p for p in primes if c.element_order % p == 0]
        edges.update(frozenset(e) for e in combinations(ps, 2))
    return PrimeGraph(primes, frozenset(edges))


def kimmerle_orders(table: CharacterTable) -> list[int]:
    """Products ``p*q`` of distinct primes not already realized by a group element."""
    g = prime_graph_of_group(table)
    return sorted(p * q for p, q in combinations(sorted(g.vertices), 2)
                  if frozenset((p, q)) not in g.edges)


def kimmerle_check(table: CharacterTable, spectra: Mapping[int, OrderVerdict]) -> SpectrumReport:
    """Compare the prime graph of G with the one forced on V(ZG) by ``spectra``."""
    g = prime_graph_of_group(table)
    edges = set(g.edges)
    undecided = []
    for p, q in combinations(sorted(g.vertices), 2):
        e = frozenset((p, q))
        if e in g.edges:
            continue
        k = p * q
        if table.exponent % k:
            continue
        v = spectra.get(k)
        if v is None or v.status == SKIPPED:
            undecided.append(k)
        elif v.status != EXCLUDED:
            edges.add(e)
    gv = PrimeGraph(g.vertices, frozenset(edges))
    verdict = None if undecided else gv == g
    return SpectrumReport(table.group_name, dict(sorted(spectra.items())), g, gv, verdict, undecided)


def zc_verdict(spectra: Mapping[int, OrderVerdict]) -> dict[int, dict]:
    """Per order: does every surviving tuple meet the one-class criterion at every level?"""
    out = {}
    for k, v in sorted(spectra.items()):
        if v.status == TRIVIAL:
            out[k] = {"status": "holds", "detail": "rationally conjugate to a group element"}
        elif v.status == CONSTRAINED:
            nontrivial = [t for t in v.admissible if not t.is_trivial()]
            out[k] = {"status": "undecided",
                      "detail": f"{len(nontrivial)} non-trivial tuples survive",
                      "tuples": [list(t.values) for t in nontrivial]}
        elif v.status in (EXCLUDED, NOT_A_DIVISOR):
            out[k] = {"status": "no units", "detail": v.note or "no admissible tuples"}
        else:
            out[k] = {"status": "skipped", "detail": v.note}
    return out


def run_kimmerle(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable],
                 selection_map: SelectionMap = FULL, budget: Budget = UNLIMITED,
                 jobs: int = 1) -> SpectrumReport:
    spectra = order_spectrum(table, brauer_tables, selection_map, budget,
                             orders=kimmerle_orders(table), jobs=jobs)
    return kimmerle_check(table, spectra)


# -- rendering -------------------------------------------------------------------------------

def _tuple_json(t: AugTuple) -> list[int]:
    return list(t.values)


def verdict_to_json(v: OrderVerdict) -> dict:
    out = {"order": v.order, "status": v.status, "support": list(v.support),
           "selection": v.selection, "note": v.note}
    if v.solutions is not None:
        out["solutions"] = [_tuple_json(t) for t in v.solutions]
        out["cases"] = [
            {"assignment": {str(d): {"support": list(t.support), "values": list(t.values)}
                            for d, t in case.parts},
             "solutions": [_tuple_json(t) for t in sols]}
            for case, sols in v.cases
        ]
    return out


def verdict_from_json(obj: Mapping) -> OrderVerdict:
    support = tuple(obj.get("support", ()))
    sols = None
    cases = []
    if "solutions" in obj:
        sols = SolutionSet(support, tuple(AugTuple(support, tuple(x)) for x in obj["solutions"]))
        for c in obj.get("cases", []):
            parts = tuple((int(d), AugTuple(tuple(t["support"]), tuple(t["values"])))
                          for d, t in c["assignment"].items())
            cs = SolutionSet(support, tuple(AugTuple(support, tuple(x)) for x in c["solutions"]))
            cases.append((CaseAssignment(parts), cs))
    return OrderVerdict(int(obj["order"]), obj["status"], support, sols, cases,
                        obj.get("selection", ""), obj.get("note", ""))


def _graph_json(g: PrimeGraph) -> dict:
    return {"vertices": sorted(g.vertices), "edges": [list(e) for e in g.edge_list()]}


def _graph_from_json(obj: Mapping) -> PrimeGraph:
    return PrimeGraph(frozenset(obj["vertices"]), frozenset(frozenset(e) for e in obj["edges"]))


def report_to_json(report: SpectrumReport) -> dict:
    return {
        "group": report.group,
        "verdicts": [verdict_to_json(v) for v in report.verdicts.values()],
        "graph_G": _graph_json(report.graph_G),
        "graph_V": _graph_json(report.graph_V),
        "kc_verdict": report.kc_verdict,
        "undecided_orders": list(report.undecided_orders),
    }


def report_from_json(obj: Mapping | str) -> SpectrumReport:
    if isinstance(obj, str):
        obj = json.loads(obj)
    verdicts = {v["order"]: verdict_from_json(v) for v in obj["verdicts"]}
    return SpectrumReport(obj["group"], verdicts, _graph_from_json(obj["graph_G"]),
                          _graph_from_json(obj["graph_V"]), obj["kc_verdict"],
                          list(obj["undecided_orders"]))


def _fmt_graph(g: PrimeGraph) -> str:
    edges = ", ".join("{%d,%d}" % e for e in g.edge_list()) or "none"
    return f"vertices {{{', '.join(map(str, sorted(g.vertices)))}}}; edges {edges}"


def verdict_to_markdown(v: OrderVerdict, class_order: Sequence[str] | None = None) -> str:
    """Order verdict as Markdown; tuple columns follow ``class_order`` when given."""
    lines = [f"### Order {v.order}: {v.status}", ""]
    if v.note:
        lines += [v.note, ""]
    if v.selection:
        lines += [f"Constraints: {v.selection}", ""]
    if v.solutions:
        cols = [c for c in (class_order or v.support) if c in v.support]
        lines.append("| # | " + " | ".join(f"ν_{c}" for c in cols) + " |")
        lines.append("|---" * (len(cols) + 1) + "|")
        for i, t in enumerate(v.solutions, 1):
            lines.append(f"| {i} | " + " | ".join(str(t[c]) for c in cols) + " |")
        lines.append("")
    if v.cases:
        alive = sum(1 for _, s in v.cases if s)
        lines += [f"{len(v.cases)} case assignments, {alive} with solutions.", ""]
    return "\n".join(lines)


def report_to_markdown(report: SpectrumReport, class_order: Sequence[str] | None = None) -> str:
    if report.kc_verdict is None:
        head = ("KC inconclusive: orders " + ", ".join(map(str, report.undecided_orders))
                + " were not decided")
    elif report.kc_verdict:
        verts = ",".join(map(str, sorted(report.graph_G.vertices)))
        head = f"KC confirmed: π(G) = π(V(ZG)) on {{{verts}}}"
    else:
        head = "KC not confirmed: V(ZG) may have edges missing from π(G)"
    lines = [f"# {report.group}", "", head, "",
             f"- π(G): {_fmt_graph(report.graph_G)}",
             f"- π(V(ZG)): {_fmt_graph(report.graph_V)}", ""]
    zc = zc_verdict(report.verdicts)
    lines += ["| order | status | ZC |", "|---|---|---|"]
    for k, v in report.verdicts.items():
        lines.append(f"| {k} | {v.status} | {zc[k]['status']} |")
    lines.append("")
    for v in report.verdicts.values():
        lines.append(verdict_to_markdown(v, class_order))
    return "\n".join(lines)


def default_jobs() -> int:
    return os.cpu_count() or 1
