"""Ordinary and Brauer character tables: data model, JSON parser, validation."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

from .cyclotomics import Cyclotomic, conj, factorize, from_json, prime_divisors, to_json

Document = Union[str, bytes, Mapping]

_CLASS_NAME = re.compile(r"^(\d+)([a-z]+)$")


class TableError(ValueError):
    """A character table document failed to parse or validate."""


@dataclass(frozen=True)
class ConjugacyClass:
    name: str
    element_order: int
    size: int


@dataclass(frozen=True)
class Character:
    name: str
    values: tuple[Cyclotomic, ...]

    @property
    def degree(self) -> int:
        return int(self.values[0].to_rational())


def canonical_character_name(name: str) -> str:
    """Accept ``chi_3``/``χ3`` spellings for ``χ_3``."""
    m = re.fullmatch(r"(?:chi|χ)_?(\d+)", name.strip())
    return f"χ_{m.group(1)}" if m else name


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group_name: str
    group_order: int
    exponent: int
    classes: tuple[ConjugacyClass, ...]
    power_maps: Mapping[int, Mapping[str, str]]
    characters: tuple[Character, ...]
    _index: dict = field(init=False, repr=False, compare=False)
    _chars: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {c.name: i for i, c in enumerate(self.classes)})
        object.__setattr__(self, "_chars", {c.name: c for c in self.characters})

    @property
    def class_names(self) -> list[str]:
        return [c.name for c in self.classes]

    def class_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{self.group_name} has no class {name!r}") from None

    def conjugacy_class(self, name: str) -> ConjugacyClass:
        return self.classes[self.class_index(name)]

    def element_order(self, name: str) -> int:
        return self.conjugacy_class(name).element_order

    def character(self, name: str) -> Character:
        try:
            return self._chars[canonical_character_name(name)]
        except KeyError:
            raise KeyError(f"{self.group_name} has no character {name!r}") from None

    def value(self, character: str, class_name: str) -> Cyclotomic:
        return self.character(character).values[self.class_index(class_name)]

    def element_orders(self) -> list[int]:
        return sorted({c.element_order for c in self.classes})

    def power_class(self, class_name: str, m: int) -> str:
        """Class of ``g^m`` for ``g`` in ``class_name``."""
        return power_class(self, class_name, m)

    def regular_classes(self, p: int) -> list[str]:
        return regular_classes(self, p)


@dataclass(frozen=True)
class BrauerCharacter:
    name: str
    values: Mapping[str, Cyclotomic]

    @property
    def degree(self) -> int:
        return int(self.values["1a"].to_rational())


@dataclass(frozen=True, eq=False)
class BrauerTable:
    prime: int
    parent: CharacterTable
    regular_classes: tuple[str, ...]
    characters: tuple[BrauerCharacter, ...]
    _chars: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_chars", {c.name: c for c in self.characters})

    @property
    def label(self) -> str:
        return f"{self.parent.group_name} mod {self.prime}"

    def character(self, name: str) -> BrauerCharacter:
        try:
            return self._chars[canonical_character_name(name)]
        except KeyError:
            raise KeyError(f"{self.label} has no character {name!r}") from None

    def value(self, character: str, class_name: str) -> Cyclotomic:
        chi = self.character(character)
        try:
            return chi.values[class_name]
        except KeyError:
            raise ValueError(
                f"{self.label}: class {class_name} is {self.prime}-singular or unknown"
            ) from None


# -- operations ------------------------------------------------------------------

def power_class(table: CharacterTable, class_name: str, m: int) -> str:
    """Iterate the prime power maps along the factorization of ``m``."""
    if m < 1:
        raise ValueError("power must be positive")
    order = table.element_order(class_name)
    m %= order
    if m == 0:
        return "1a"
    # g^m = g^(m + t*order); pick a representative whose primes all have maps
    for t in range(table.exponent + 1):
        rep = m + t * order
        fac = factorize(rep)
        if all(p in table.power_maps for p, _ in fac):
            break
    else:
        raise ValueError(f"cannot resolve power {m} of class {class_name} from the power maps")
    cls = class_name
    for p, e in fac:
        pm = table.power_maps[p]
        for _ in range(e):
            cls = pm[cls]
    return cls


def regular_classes(table: CharacterTable, p: int) -> list[str]:
    return [c.name for c in table.classes if c.element_order % p]


def _int(value, what: str) -> int:
    if isinstance(value, bool):
        raise TableError(f"{what}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"-?\d+", value.strip()):
        return int(value)
    raise TableError(f"{what}: expected an integer, got {value!r}")


def _load(document: Document) -> Mapping:
    if isinstance(document, Mapping):
        return document
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise TableError(f"not valid JSON: {exc}") from exc


def _class_sort_key(name: str, order: int) -> tuple:
    m = _CLASS_NAME.match(name)
    suffix = m.group(2) if m else name
    return (order, len(suffix), suffix)


def _cyc(obj, where: str) -> Cyclotomic:
    try:
        return from_json(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise TableError(f"{where}: {exc}") from exc


def parse_table(document: Document) -> CharacterTable:
    """Parse and fully validate an ordinary character table document."""
    doc = _load(document)
    for key in ("group", "order", "exponent", "classes", "powermaps", "characters"):
        if key not in doc:
            raise TableError(f"missing top-level field {key!r}")
    group = str(doc["group"])
    order = _int(doc["order"], "order")
    exponent = _int(doc["exponent"], "exponent")
    if order < 1 or exponent < 1:
        raise TableError("order and exponent must be positive")

    raw_classes = []
    seen = set()
    for entry in doc["classes"]:
        try:
            name = str(entry["name"])
            eo = _int(entry["order"], f"class {entry.get('name')} order")
            size = _int(entry["size"], f"class {name} size")
        except (KeyError, TypeError) as exc:
            raise TableError(f"malformed class entry {entry!r}") from exc
        if name in seen:
            raise TableError(f"duplicate class name {name}")
        seen.add(name)
        m = _CLASS_NAME.match(name)
        if not m or int(m.group(1)) != eo:
            raise TableError(f"class {name}: name must be <element order><letters> with order {eo}")
        if eo < 1 or size < 1:
            raise TableError(f"class {name}: order and size must be positive")
        if exponent % eo:
            raise TableError(f"class {name}: element order {eo} does not divide exponent {exponent}")
        raw_classes.append(ConjugacyClass(name, eo, size))
    if "1a" not in seen:
        raise TableError("class 1a is missing")
    one = next(c for c in raw_classes if c.name == "1a")
    if one.element_order != 1 or one.size != 1:
        raise TableError("class 1a must have element order 1 and size 1")
    if sum(c.size for c in raw_classes) != order:
        raise TableError(
            f"class sizes sum to {sum(c.size for c in raw_classes)}, group order is {order}"
        )

    perm = sorted(range(len(raw_classes)),
                  key=lambda i: _class_sort_key(raw_classes[i].name, raw_classes[i].element_order))
    classes = tuple(raw_classes[i] for i in perm)
    by_name = {c.name: c for c in classes}

    power_maps: dict[int, dict[str, str]] = {}
    raw_maps = doc["powermaps"]
    for p in prime_divisors(exponent):
        pm = raw_maps.get(str(p), raw_maps.get(p))
        if pm is None:
            raise TableError(f"power map for prime {p} is missing")
        mapping = {}
        for c in classes:
            if c.name not in pm:
                raise TableError(f"{p}-power map: no image for class {c.name}")
            img = pm[c.name]
            if img not in by_name:
                raise TableError(f"{p}-power map: class {c.name} maps to unknown class {img!r}")
            expect = c.element_order // p if c.element_order % p == 0 else c.element_order
            if by_name[img].element_order != expect:
                raise TableError(
                    f"{p}-power map: class {c.name} maps to {img} of order "
                    f"{by_name[img].element_order}, expected {expect}"
                )
            mapping[c.name] = img
        power_maps[p] = mapping

    chars = []
    names = set()
    for entry in doc["characters"]:
        try:
            name = canonical_character_name(str(entry["name"]))
            vals = entry["values"]
        except (KeyError, TypeError) as exc:
            raise TableError(f"malformed character entry {entry!r}") from exc
        if name in names:
            raise TableError(f"duplicate character name {name}")
        names.add(name)
        if len(vals) != len(raw_classes):
            raise TableError(f"character {name}: {len(vals)} values for {len(raw_classes)} classes")
        parsed = [_cyc(v, f"character {name} at {raw_classes[i].name}") for i, v in enumerate(vals)]
        values = tuple(parsed[i] for i in perm)
        deg = values[0]
        if not deg.is_rational() or deg.to_rational().denominator != 1 or deg.to_rational() <= 0:
            raise TableError(f"character {name}: degree {deg!r} is not a positive integer")
        chars.append(Character(name, values))

    table = CharacterTable(group, order, exponent, classes, power_maps, tuple(chars))
    _check_orthogonality(table)
    return table


def _check_orthogonality(table: CharacterTable) -> None:
    sizes = [c.size for c in table.classes]
    conjugates = [[conj(v) for v in chi.values] for chi in table.characters]
    for i, chi in enumerate(table.characters):
        for j in range(i, len(table.characters)):
            total = Cyclotomic.rational(0)
            for s, a, b in zip(sizes, chi.values, conjugates[j]):
                if not a.is_zero() and not b.is_zero():
                    total = total + a * b * s
            expect = table.group_order if i == j else 0
            if total != expect:
                raise TableError(
                    f"orthogonality fails for {chi.name}, {table.characters[j].name}: "
                    f"inner product {total!r}, expected {expect}"
                )


def parse_brauer(document: Document, parent: CharacterTable) -> BrauerTable:
    """Parse a p-modular table whose values are keyed by p-regular class name."""
    doc = _load(document)
    for key in ("prime", "characters"):
        if key not in doc:
            raise TableError(f"missing top-level field {key!r}")
    p = _int(doc["prime"], "prime")
    if len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
        raise TableError(f"{p} is not a prime")
    if parent.group_order % p:
        raise TableError(f"prime {p} does not divide the order of {parent.group_name}")
    if "parent" in doc and str(doc["parent"]) != parent.group_name:
        raise TableError(f"table is for {doc['parent']!r}, parent given is {parent.group_name!r}")
    regular = tuple(regular_classes(parent, p))
    regular_set = set(regular)
    for q, pm in parent.power_maps.items():
        if q == p:
            continue
        for c in regular:
            if pm[c] not in regular_set:
                raise TableError(f"{q}-power map sends regular class {c} to singular {pm[c]}")
    chars = []
    names = set()
    for entry in doc["characters"]:
        try:
            name = canonical_character_name(str(entry["name"]))
            raw = entry["values"]
        except (KeyError, TypeError) as exc:
            raise TableError(f"malformed character entry {entry!r}") from exc
        if name in names:
            raise TableError(f"duplicate character name {name}")
        names.add(name)
        values = {}
        for cname, v in raw.items():
            if cname not in parent._index:
                raise TableError(f"character {name}: unknown class {cname!r}")
            if cname not in regular_set:
                raise TableError(f"character {name}: value given on {p}-singular class {cname}")
            values[cname] = _cyc(v, f"character {name} at {cname}")
        missing = [c for c in regular if c not in values]
        if missing:
            raise TableError(f"character {name}: no value on regular classes {missing}")
        deg = values["1a"]
        if not deg.is_rational() or deg.to_rational().denominator != 1 or deg.to_rational() <= 0:
            raise TableError(f"character {name}: degree {deg!r} is not a positive integer")
        chars.append(BrauerCharacter(name, {c: values[c] for c in regular}))
    return BrauerTable(p, parent, regular, tuple(chars))


# -- files -------------------------------------------------------------------------

def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_table(path) -> CharacterTable:
    return parse_table(_read(path))


def load_brauer(path, parent: CharacterTable) -> BrauerTable:
    return parse_brauer(_read(path), parent)


def _big(n: int):
    return str(n) if abs(n) > 2**53 else n


def table_to_json(table: CharacterTable) -> dict:
    return {
        "group": table.group_name,
        "order": _big(table.group_order),
        "exponent": _big(table.exponent),
        "classes": [{"name": c.name, "order": c.element_order, "size": _big(c.size)}
                    for c in table.classes],
        "powermaps": {str(p): dict(pm) for p, pm in sorted(table.power_maps.items())},
        "characters": [{"name": chi.name, "values": [to_json(v) for v in chi.values]}
                       for chi in table.characters],
    }


def brauer_to_json(table: BrauerTable) -> dict:
    return {
        "group": f"{table.parent.group_name}mod{table.prime}",
        "prime": table.prime,
        "parent": table.parent.group_name,
        "characters": [{"name": chi.name, "values": {c: to_json(v) for c, v in chi.values.items()}}
                       for chi in table.characters],
    }


# -- bundled fixtures -----------------------------------------------------------------

DATA_DIR = Path(__file__).resolve().parent / "data"


def bundled_groups() -> list[str]:
    return sorted(p.name[: -len(".json")] for p in DATA_DIR.glob("*.json")
                  if ".mod" not in p.name and not p.name.endswith("selections.json"))


def load_bundled(group: str) -> tuple[CharacterTable, dict[int, BrauerTable]]:
    """Ordinary table and every shipped Brauer table of a bundled group."""
    path = DATA_DIR / f"{group}.json"
    if not path.exists():
        raise FileNotFoundError(f"no bundled table for {group!r}; have {bundled_groups()}")
    table = load_table(path)
    brauer = {}
    for bpath in sorted(DATA_DIR.glob(f"{group}.mod*.json")):
        bt = load_brauer(bpath, table)
        brauer[bt.prime] = bt
    return table, brauer


__all__ = [
    "BrauerCharacter", "BrauerTable", "Character", "CharacterTable", "ConjugacyClass",
    "TableError", "brauer_to_json", "bundled_groups", "canonical_character_name",
    "load_brauer", "load_bundled", "load_table", "parse_brauer", "parse_table",
    "power_class", "regular_classes", "table_to_json",
]
