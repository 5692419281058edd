"""Constraint systems on partial augmentations of a torsion unit of order k.

For a character ``chi`` (ordinary, or Brauer at a prime coprime to k) and a
residue ``l``, the multiplicity

    mu_l = 1/k * sum_{d | k} Tr_{Q(z^d)/Q}( chi(u^d) * z^(-d*l) ),  z = zeta_k,

must be a non-negative integer.  The ``d = 1`` term is linear in the unknown
partial augmentations of ``u``; the terms ``d > 1`` are fixed once the tuples
of the proper powers ``u^d`` are chosen (a :class:`CaseAssignment`).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .chartab import BrauerTable, CharacterTable, canonical_character_name
from .cyclotomics import divisors, trace_times_root

CharSource = Union[CharacterTable, BrauerTable]


@dataclass(frozen=True)
class AugTuple:
    """Partial augmentations over an ordered support; other classes are zero."""

    support: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.support) != len(self.values):
            raise ValueError("support and values differ in length")

    @classmethod
    def from_mapping(cls, support: Sequence[str], nu: Mapping[str, int]) -> AugTuple:
        extra = set(nu) - set(support)
        if any(nu[c] for c in extra):
            raise ValueError(f"nonzero partial augmentation outside support: {sorted(extra)}")
        return cls(tuple(support), tuple(int(nu.get(c, 0)) for c in support))

    @classmethod
    def indicator(cls, support: Sequence[str], class_name: str) -> AugTuple:
        return cls(tuple(support), tuple(int(c == class_name) for c in support))

    def __getitem__(self, class_name: str) -> int:
        try:
            return self.values[self.support.index(class_name)]
        except ValueError:
            return 0

    def items(self):
        return zip(self.support, self.values)

    def as_dict(self) -> dict[str, int]:
        return dict(self.items())

    def nonzero(self) -> dict[str, int]:
        return {c: v for c, v in self.items() if v}

    def is_trivial(self) -> bool:
        """Exactly one nonzero entry (then necessarily 1)."""
        return len(self.nonzero()) == 1 and sum(self.values) == 1

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


@dataclass(frozen=True)
class CaseAssignment:
    """Tuples chosen for the proper powers ``u^d``, keyed by ``d`` (1 < d < k)."""

    parts: tuple[tuple[int, AugTuple], ...] = ()

    def __getitem__(self, d: int) -> AugTuple:
        for key, tup in self.parts:
            if key == d:
                return tup
        raise KeyError(d)

    def __contains__(self, d: int) -> bool:
        return any(key == d for key, _ in self.parts)

    def as_dict(self) -> dict[int, AugTuple]:
        return dict(self.parts)

    def describe(self) -> str:
        if not self.parts:
            return "-"
        return "; ".join(
            "u^%d: %s" % (d, " + ".join(f"{v}*{c}" for c, v in t.nonzero().items()) or "0")
            for d, t in self.parts
        )


@dataclass(frozen=True)
class AffineForm:
    """``mu = (sum coeff_C * nu_C + constant) / modulus``, required in ``[0, upper/modulus]``."""

    coefficients: tuple[tuple[str, int], ...]
    constant: int
    modulus: int
    label: tuple[str, str, int] = ("", "*", 0)
    upper: int | None = None

    def coefficient(self, class_name: str) -> int:
        return dict(self.coefficients).get(class_name, 0)

    def numerator(self, nu: Mapping[str, int] | AugTuple) -> int:
        get = nu.__getitem__ if isinstance(nu, AugTuple) else (lambda c: nu.get(c, 0))
        return sum(a * get(c) for c, a in self.coefficients) + self.constant

    def satisfied_by(self, nu) -> bool:
        num = self.numerator(nu)
        if num < 0 or num % self.modulus:
            return False
        return self.upper is None or num <= self.upper

    def __str__(self) -> str:
        chi, p, l = self.label
        terms = " ".join(f"{a:+d}*nu_{c}" for c, a in self.coefficients if a)
        return f"mu_{l}({chi},{p}) = 1/{self.modulus} ({terms} {self.constant:+d})"


@dataclass(frozen=True)
class ConstraintSystem:
    """Forms over ``support`` plus the augmentation identity ``sum nu = 1``."""

    order: int
    support: tuple[str, ...]
    forms: tuple[AffineForm, ...]

    def __post_init__(self):
        allowed = set(self.support)
        for f in self.forms:
            bad = [c for c, a in f.coefficients if a and c not in allowed]
            if bad:
                raise ValueError(f"form {f.label} uses classes outside the support: {bad}")

    def check(self, nu) -> bool:
        total = sum(nu[c] for c in self.support) if isinstance(nu, AugTuple) \
            else sum(nu.get(c, 0) for c in self.support)
        return total == 1 and all(f.satisfied_by(nu) for f in self.forms)


@dataclass(frozen=True)
class Selection:
    """Which (character, p-or-'*', l) triples to use, or all of them."""

    triples: tuple[tuple[str, str, int], ...] = ()
    full: bool = False

    @classmethod
    def everything(cls) -> Selection:
        return cls(full=True)

    @classmethod
    def of(cls, triples: Iterable[tuple[str, object, int]]) -> Selection:
        return cls(tuple((canonical_character_name(c), str(p), int(l)) for c, p, l in triples))


FULL = Selection.everything()


# -- operations ----------------------------------------------------------------

def support_classes(table: CharacterTable, k: int) -> list[str]:
    """Classes that may carry a nonzero partial augmentation of a unit of order ``k``.

    A class survives iff each of its p-parts has order dividing the p-part of
    ``k``, i.e. its element order divides ``k``; the identity class is dropped.
    """
    if k < 2:
        raise ValueError("unit order must be at least 2")
    return [c.name for c in table.classes if c.name != "1a" and k % c.element_order == 0]


def proper_divisors(k: int) -> list[int]:
    """Divisors ``d`` with ``1 < d < k``."""
    return [d for d in divisors(k) if 1 < d < k]


def _source_key(source: CharSource) -> str:
    return "*" if isinstance(source, CharacterTable) else str(source.prime)


@lru_cache(maxsize=200_000)
def _trace_term(source: CharSource, chi: str, class_name: str, n: int, l: int) -> int:
    """``Tr_{Q(zeta_n)/Q}(chi(C) * zeta_n^(-l))``, integral for character values."""
    t = trace_times_root(source.value(chi, class_name), n, -l)
    if t.denominator != 1:
        raise ArithmeticError(f"non-integral trace for {chi} at {class_name}, n={n}: {t}")
    return int(t)


def mu_form(table: CharacterTable, source: CharSource, k: int, assignment: CaseAssignment,
            character: str, l: int, *, cap: bool = True) -> AffineForm:
    """The affine form of ``mu_l(u, chi, p)`` for a unit of order ``k``."""
    if isinstance(source, BrauerTable):
        if gcd(k, source.prime) != 1:
            raise ValueError(f"order {k} is not coprime to the characteristic {source.prime}")
        if source.parent is not table:
            raise ValueError("Brauer table belongs to a different ordinary table")
    chi = canonical_character_name(character)
    degree = source.character(chi).degree
    l %= k
    support = support_classes(table, k)
    if isinstance(source, BrauerTable):
        assert all(c in source.regular_classes for c in support)
    coeffs = tuple((c, _trace_term(source, chi, c, k, l)) for c in support)
    constant = degree  # d = k: trace over Q of chi(1)
    for d in proper_divisors(k):
        if d not in assignment:
            raise KeyError(f"case assignment lacks the tuple for u^{d}")
        for c, nu in assignment[d].items():
            if nu:
                constant += nu * _trace_term(source, chi, c, k // d, l)
    label = (chi, _source_key(source), l)
    return AffineForm(coeffs, constant, k, label, k * degree if cap else None)


def _sources(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable]) -> dict[str, CharSource]:
    out: dict[str, CharSource] = {"*": table}
    for p, bt in brauer_tables.items():
        out[str(p)] = bt
    return out


def _is_trivial(chi) -> bool:
    vals = chi.values.values() if isinstance(chi.values, Mapping) else chi.values
    return all(v == 1 for v in vals)


def expand_selection(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable], k: int,
                     selection: Selection) -> list[tuple[str, str, int]]:
    """Concrete, deduplicated (character, source, l) triples for order ``k``."""
    sources = _sources(table, brauer_tables)
    if selection.full:
        triples = []
        for key, src in sources.items():
            if key != "*" and gcd(k, int(key)) != 1:
                continue
            for chi in src.characters:
                if _is_trivial(chi):
                    continue  # only restates sum nu = 1
                triples.extend((chi.name, key, l) for l in range(k))
        return triples
    out = []
    seen = set()
    for chi, key, l in selection.triples:
        if key not in sources:
            raise KeyError(f"selection uses characteristic {key}, which has no loaded table")
        sources[key].character(chi)  # unknown characters fail loudly
        if key != "*" and gcd(k, int(key)) != 1:
            raise ValueError(f"selection uses {chi} mod {key}, not coprime to order {k}")
        t = (canonical_character_name(chi), key, l % k)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def build_system(table: CharacterTable, brauer_tables: Mapping[int, BrauerTable], k: int,
                 assignment: CaseAssignment, selection: Selection = FULL) -> ConstraintSystem:
    sources = _sources(table, brauer_tables)
    forms = [mu_form(table, sources[key], k, assignment, chi, l)
             for chi, key, l in expand_selection(table, brauer_tables, k, selection)]
    return ConstraintSystem(k, tuple(support_classes(table, k)), tuple(forms))


def divisor_cases(k: int, spectra: Mapping[int, Sequence[AugTuple]]) -> list[CaseAssignment]:
    """All combinations of admissible tuples for the proper powers of ``u``.

    ``spectra`` maps an order ``m`` to its admissible tuples; ``u^d`` has order
    ``k/d``.  Combinations are a plain Cartesian product.
    """
    ds = proper_divisors(k)
    missing = [k // d for d in ds if k // d not in spectra]
    if missing:
        raise KeyError(f"no admissible tuples known for orders {sorted(set(missing))}")
    pools = [list(spectra[k // d]) for d in ds]
    return [CaseAssignment(tuple(zip(ds, combo))) for combo in itertools.product(*pools)]


def group_element_assignment(table: CharacterTable, class_name: str) -> CaseAssignment:
    """Assignment induced by an actual group element: ``u^d`` lies in the powered class."""
    k = table.element_order(class_name)
    parts = []
    for d in proper_divisors(k):
        parts.append((d, AugTuple.indicator(support_classes(table, k // d),
                                            table.power_class(class_name, d))))
    return CaseAssignment(tuple(parts))


# -- selection files ---------------------------------------------------------------

PAPER_SELECTIONS = Path(__file__).resolve().parent / "data" / "hs-paper-selections.json"


def parse_selection(obj: Mapping) -> tuple[int, Selection]:
    try:
        k = int(obj["order"])
        triples = []
        for entry in obj["constraints"]:
            ls = entry["l"]
            for l in (ls if isinstance(ls, list) else [ls]):
                triples.append((entry["char"], str(entry["p"]), int(l)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed selection entry {obj!r}") from exc
    return k, Selection.of(triples)


def load_selections(path=PAPER_SELECTIONS) -> dict[int, Selection]:
    """Read a selection file: one ``{"order", "constraints"}`` object or a list of them."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = data if isinstance(data, list) else [data]
    out = {}
    for entry in entries:
        k, sel = parse_selection(entry)
        if k in out:
            raise ValueError(f"order {k} appears twice in {path}")
        out[k] = sel
    return out
