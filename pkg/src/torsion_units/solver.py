"""Exhaustive integer enumeration for :class:`ConstraintSystem`.

The augmentation identity is substituted away first (the last support class
becomes ``1 - sum(others)``), leaving rows ``0 <= a.z + c <= upper`` with
``a.z + c = 0 (mod k)``.  Fourier-Motzkin elimination over the rational
relaxation gives a finite box; a depth-first search with interval
propagation then walks it and checks congruences at the leaves.

When the selected characters do not separate the classes (the coefficient
matrix has a kernel), the rows are rewritten in a unimodular basis so the
search runs on the image.  Any solution then comes with a free integer
direction, so the solution set is infinite.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .lutharpassi import AugTuple, ConstraintSystem


class UnboundedError(ValueError):
    """A variable of the relaxation has no finite bound."""


@dataclass(frozen=True)
class Box:
    bounds: tuple[tuple[str, int, int], ...]
    empty: bool = False

    def __getitem__(self, var: str) -> tuple[int, int]:
        for v, lo, hi in self.bounds:
            if v == var:
                return lo, hi
        raise KeyError(var)

    def as_dict(self) -> dict[str, tuple[int, int]]:
        return {v: (lo, hi) for v, lo, hi in self.bounds}

    @property
    def volume(self) -> int:
        if self.empty:
            return 0
        return math.prod(hi - lo + 1 for _, lo, hi in self.bounds)


EMPTY = Box((), empty=True)


@dataclass(frozen=True)
class SolutionSet:
    support: tuple[str, ...]
    tuples: tuple[AugTuple, ...]

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[AugTuple]:
        return iter(self.tuples)

    def __bool__(self) -> bool:
        return bool(self.tuples)

    def as_value_tuples(self) -> set[tuple[int, ...]]:
        return {t.values for t in self.tuples}

    @classmethod
    def build(cls, support: Sequence[str], tuples) -> SolutionSet:
        """Deduplicate and sort lexicographically in support order."""
        uniq = sorted({t.values: t for t in tuples}.items())
        return cls(tuple(support), tuple(t for _, t in uniq))


# (coefficients, constant, upper or None, modulus):
# 0 <= a.z + c <= upper and k | a.z + c
_Row = tuple


def _reduced_rows(system: ConstraintSystem) -> list[_Row]:
    """Rows over the first n-1 classes after ``nu_last = 1 - sum(others)``."""
    idx = {c: i for i, c in enumerate(system.support)}
    n = len(system.support)
    rows = []
    for f in system.forms:
        a = [0] * n
        for c, v in f.coefficients:
            a[idx[c]] += v
        last = a[-1]
        rows.append((tuple(x - last for x in a[:-1]), f.constant + last, f.upper, f.modulus))
    return rows


def _column_reduce(rows: list[_Row], nvars: int) -> tuple[list[_Row], list[list[int]], int]:
    """Unimodular ``V`` with ``A V = [H | 0]``; returns rows over ``H``, ``V`` and the rank."""
    A = [list(a) for a, *_ in rows]
    V = [[int(i == j) for j in range(nvars)] for i in range(nvars)]

    def colop(dst: int, src: int, q: int) -> None:  # col_dst -= q * col_src
        for M in (A, V):
            for row in M:
                row[dst] -= q * row[src]

    def swap(i: int, j: int) -> None:
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    rank = 0
    for r in range(len(A)):
        if rank == nvars:
            break
        while True:
            nz = [j for j in range(rank, nvars) if A[r][j]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda j: abs(A[r][j]))
            for j in nz:
                if j != piv:
                    colop(j, piv, A[r][j] // A[r][piv])
        nz = [j for j in range(rank, nvars) if A[r][j]]
        if nz:
            swap(rank, nz[0])
            rank += 1
    out = [(tuple(A[i][:rank]), c, u, k) for i, (_, c, u, k) in enumerate(rows)]
    return out, V, rank


# -- relaxation ------------------------------------------------------------------

_Ineq = tuple   # (a, c) meaning a.z + c >= 0, Fractions


def _inequalities(rows: list[_Row]) -> list[_Ineq] | None:
    """Both sides of every row, one per direction (tightest kept); None if a constant row fails."""
    best: dict[tuple[int, ...], Fraction] = {}

    def add(a: tuple[int, ...], c: int) -> bool:
        g = math.gcd(*a)
        if not g:
            return c >= 0
        key = tuple(x // g for x in a)
        val = Fraction(c, g)
        if key not in best or val < best[key]:
            best[key] = val
        return True

    for a, c, upper, _ in rows:
        if not add(a, c):
            return None
        if upper is not None and not add(tuple(-x for x in a), upper - c):
            return None
    return [(tuple(Fraction(x) for x in a), c) for a, c in best.items()]


def _prune(rows: list[_Ineq]) -> list[_Ineq] | None:
    """Keep the tightest constant per direction; None if a constant row is violated."""
    best: dict[tuple, Fraction] = {}
    for a, c in rows:
        if not any(a):
            if c < 0:
                return None
            continue
        s = abs(next(x for x in a if x))
        a, c = tuple(y / s for y in a), c / s
        if a not in best or c < best[a]:
            best[a] = c
    return list(best.items())


def _eliminate(rows: list[_Ineq], j: int) -> list[_Ineq] | None:
    pos, neg, rest = [], [], []
    for a, c in rows:
        (pos if a[j] > 0 else neg if a[j] < 0 else rest).append((a, c))
    for ap, cp in pos:
        for an, cn in neg:
            s, t = -an[j], ap[j]
            rest.append((tuple(s * x + t * y for x, y in zip(ap, an)), s * cp + t * cn))
    return _prune(rest)


def _interval(rows: list[_Ineq], target: int, nvars: int):
    """Rational projection onto one coordinate: ``(lo, hi)`` with None for infinite, or None if empty."""
    cur = _prune(rows)
    for j in range(nvars):
        if cur is None:
            return None
        if j != target:
            cur = _eliminate(cur, j)
    if cur is None:
        return None
    lo = hi = None
    for a, c in cur:
        x = a[target]
        if x > 0:
            lo = -c / x if lo is None else max(lo, -c / x)
        elif x < 0:
            hi = -c / x if hi is None else min(hi, -c / x)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


MAX_FM_ROWS = 16


def _slab_basis(ineqs: list[_Ineq], nvars: int):
    """``nvars`` independent two-sided slabs ``lo <= a.z <= hi``, narrowest first, or None."""
    best = dict(ineqs)
    slabs = []
    for a, c in ineqs:
        neg = tuple(-x for x in a)
        if neg in best and a > neg:
            lo, hi = -c, best[neg]
            slabs.append(((hi - lo) / sum(abs(x) for x in a), a, lo, hi))
    slabs.sort(key=lambda s: s[0])
    basis: list = []
    for _, a, lo, hi in slabs:
        if _invert([b[0] for b in basis] + [a], square=False) is not None:
            basis.append((a, lo, hi))
            if len(basis) == nvars:
                return basis
    return None


def _invert(rows: list[tuple], square: bool = True):
    """Inverse of a square rational matrix; with ``square=False`` only test row independence."""
    n, m = len(rows), len(rows[0])
    M = [list(r) + ([Fraction(int(i == j)) for j in range(n)] if square else []) for i, r in enumerate(rows)]
    rank = 0
    for col in range(m):
        piv = next((r for r in range(rank, n) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        M[rank] = [x / p for x in M[rank]]
        for r in range(n):
            if r != rank and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    if rank < n:
        return None
    return [r[m:] for r in M] if square else True


def _parallelepiped_ranges(basis, targets):
    """Exact range of each affine target over ``{z : lo_i <= a_i.z <= hi_i}``."""
    inv = _invert([a for a, _, _ in basis])
    out = []
    for target, offset in targets:
        # target.z = w.y with y_i = a_i.z, w = target * A^-1
        w = [sum(Fraction(t) * inv[j][i] for j, t in enumerate(target)) for i in range(len(basis))]
        lo = offset + sum(x * (b[1] if x > 0 else b[2]) for x, b in zip(w, basis))
        hi = offset + sum(x * (b[2] if x > 0 else b[1]) for x, b in zip(w, basis))
        out.append((lo, hi))
    return out


def _project(ineqs: list[_Ineq], nvars: int, target: Sequence[int], offset: int):
    """Range of ``target.z + offset`` over the polyhedron."""
    one, zero = Fraction(1), Fraction(0)
    ext = [(a + (zero,), c) for a, c in ineqs]
    t = tuple(Fraction(x) for x in target)
    ext.append((tuple(-x for x in t) + (one,), Fraction(-offset)))
    ext.append((t + (-one,), Fraction(offset)))
    return _interval(ext, nvars, nvars + 1)


def _box(rows: list[_Row], nvars: int, targets):
    """Integer ranges of affine targets; None if empty, raises if unbounded.

    Small relaxations are projected exactly by Fourier-Motzkin.  Large ones
    are bounded by the parallelepiped of their narrowest independent slabs:
    a sound outer box (any subset of the constraints is), which the
    search's propagation against every row then tightens.
    """
    ineqs = _inequalities(rows)
    ineqs = None if ineqs is None else _prune(ineqs)
    if ineqs is None:
        return None
    basis = _slab_basis(ineqs, nvars) if len(ineqs) > MAX_FM_ROWS else None
    if basis is not None:
        ranges = _parallelepiped_ranges(basis, targets)
    else:
        ranges = []
        for target, offset in targets:
            unit = offset == 0 and sorted(target) == [0] * (nvars - 1) + [1]
            iv = _interval(ineqs, list(target).index(1), nvars) if unit \
                else _project(ineqs, nvars, target, offset)
            if iv is None:
                return None
            ranges.append(iv)
    out = []
    for lo, hi in ranges:
        if lo is None or hi is None:
            raise UnboundedError("relaxation is unbounded")
        lo_i, hi_i = math.ceil(lo), math.floor(hi)
        if lo_i > hi_i:
            return None
        out.append((lo_i, hi_i))
    return out


def _unit(i: int, n: int) -> list[int]:
    return [int(j == i) for j in range(n)]


def _const_ok(rows: list[_Row]) -> bool:
    return all(c >= 0 and c % k == 0 and (u is None or c <= u) for _, c, u, k in rows)


def bound_variables(system: ConstraintSystem) -> Box:
    """Integer bounds per support class, or :data:`EMPTY` if the relaxation is infeasible."""
    support = system.support
    n = len(support)
    if n == 0:
        return EMPTY
    rows = _reduced_rows(system)
    m = n - 1
    if m == 0:
        if any(c < 0 or (u is not None and c > u) for _, c, u, _ in rows):
            return EMPTY
        return Box(((support[0], 1, 1),))
    targets = [(_unit(i, m), 0) for i in range(m)] + [([-1] * m, 1)]
    try:
        ranges = _box(rows, m, targets)
    except UnboundedError:
        rank = _column_reduce(rows, m)[2]
        if rank < m:
            raise UnboundedError(
                f"the constraints fix only {rank + 1} of {n} directions of "
                f"({', '.join(support)}), so the partial augmentations are unbounded"
            ) from None
        raise UnboundedError(f"relaxation over ({', '.join(support)}) is unbounded") from None
    if ranges is None:
        return EMPTY
    return Box(tuple((c, lo, hi) for c, (lo, hi) in zip(support, ranges)))


# -- search ------------------------------------------------------------------------

def _propagate(rows: list[_Row], lo: list[int], hi: list[int]) -> bool:
    """Tighten ``lo``/``hi`` in place against ``0 <= numerator <= upper``."""
    changed = True
    while changed:
        changed = False
        for a, c, upper, _ in rows:
            mn = mx = c
            for x, l, h in zip(a, lo, hi):
                if x > 0:
                    mn += x * l
                    mx += x * h
                elif x < 0:
                    mn += x * h
                    mx += x * l
            if mx < 0 or (upper is not None and mn > upper):
                return False
            for i, x in enumerate(a):
                if not x or lo[i] == hi[i]:
                    continue
                if x > 0:
                    rest_max = mx - x * hi[i]
                    rest_min = mn - x * lo[i]
                    nlo = -(rest_max // x)
                    nhi = hi[i] if upper is None else (upper - rest_min) // x
                else:
                    rest_max = mx - x * lo[i]
                    rest_min = mn - x * hi[i]
                    nhi = rest_max // -x
                    nlo = lo[i] if upper is None else -((upper - rest_min) // -x)
                if nlo > lo[i]:
                    lo[i] = nlo
                    changed = True
                if nhi < hi[i]:
                    hi[i] = nhi
                    changed = True
                if lo[i] > hi[i]:
                    return False
    return True


def _search(rows: list[_Row], lo: Sequence[int], hi: Sequence[int],
            first_only: bool) -> list[tuple[int, ...]]:
    """Integer points of the box meeting every row, fail-first variable order."""
    nvars = len(lo)
    weight = [max((abs(a[i]) for a, *_ in rows), default=0) for i in range(nvars)]
    order = sorted(range(nvars), key=lambda i: (-weight[i], i))
    prow = [(tuple(a[i] for i in order), c, u, k) for a, c, u, k in rows]
    found: list[tuple[int, ...]] = []

    def leaf(vals: list[int]) -> None:
        for a, c, upper, k in prow:
            num = c + sum(x * v for x, v in zip(a, vals))
            if num < 0 or num % k or (upper is not None and num > upper):
                return
        z = [0] * nvars
        for pos, i in enumerate(order):
            z[i] = vals[pos]
        found.append(tuple(z))

    def dfs(depth: int, lo: list[int], hi: list[int]) -> bool:
        if not _propagate(prow, lo, hi):
            return False
        if depth == nvars:
            leaf(lo)
            return first_only and bool(found)
        for v in range(lo[depth], hi[depth] + 1):
            nlo, nhi = lo[:], hi[:]
            nlo[depth] = nhi[depth] = v
            if dfs(depth + 1, nlo, nhi):
                return True
        return False

    dfs(0, [lo[i] for i in order], [hi[i] for i in order])
    return found


def _verify(system: ConstraintSystem, tuples: list[AugTuple]) -> None:
    for t in tuples:
        if not system.check(t):
            raise AssertionError(f"solver returned {t}, which violates the system")


def _solve(system: ConstraintSystem, first_only: bool) -> list[AugTuple]:
    support = system.support
    n = len(support)
    if n == 0:
        return []
    rows = _reduced_rows(system)
    m = n - 1

    def lift(z: Sequence[int]) -> AugTuple:
        return AugTuple(support, tuple(z) + (1 - sum(z),))

    if m == 0:
        return [lift(())] if _const_ok(rows) else []
    targets = [(_unit(i, m), 0) for i in range(m)]
    try:
        box = _box(rows, m, targets)
        bounded = True
    except UnboundedError:
        bounded = False
    if bounded:
        if box is None:
            return []
        sols = [lift(z) for z in _search(rows, [b[0] for b in box], [b[1] for b in box], first_only)]
        _verify(system, sols)
        return sols

    image, V, rank = _column_reduce(rows, m)
    if rank == m:
        raise UnboundedError(f"relaxation over ({', '.join(support)}) is unbounded")
    # the constraints see only the image lattice; search there
    if rank:
        wbox = _box(image, rank, [(_unit(i, rank), 0) for i in range(rank)])
        hits = [] if wbox is None else _search(
            image, [b[0] for b in wbox], [b[1] for b in wbox], first_only=True)
    else:
        hits = [()] if _const_ok(image) else []
    if not hits:
        return []
    w = list(hits[0]) + [0] * (m - rank)
    witness = lift([sum(V[i][j] * w[j] for j in range(m)) for i in range(m)])
    _verify(system, [witness])
    if first_only:
        return [witness]
    raise UnboundedError(
        f"infinitely many solutions: the constraints fix only {rank + 1} of {n} "
        f"directions of ({', '.join(support)}), e.g. {witness}"
    )


def enumerate_solutions(system: ConstraintSystem) -> SolutionSet:
    """Every integer tuple satisfying the system, in canonical order."""
    return SolutionSet.build(system.support, _solve(system, first_only=False))


def is_feasible(system: ConstraintSystem) -> bool:
    """True iff some integer tuple satisfies the system; stops at the first."""
    return bool(_solve(system, first_only=True))


def brute_force(system: ConstraintSystem, box: Mapping[str, tuple[int, int]] | Box) -> SolutionSet:
    """Check every point of the box with no propagation; the reference for the search."""
    if isinstance(box, Box) and box.empty:
        return SolutionSet.build(system.support, [])
    bounds = box.as_dict() if isinstance(box, Box) else dict(box)
    ranges = [range(bounds[c][0], bounds[c][1] + 1) for c in system.support]
    sols = (AugTuple(system.support, vals) for vals in itertools.product(*ranges))
    return SolutionSet.build(system.support, [t for t in sols if system.check(t)])
