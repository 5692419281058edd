"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis ``1, z, ..., z^(phi(n)-1)`` of
``Q(zeta_n)`` after reduction modulo the n-th cyclotomic polynomial, and
always at their minimal conductor, so two equal field elements have identical
representations.  Rational scalars are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


# -- elementary number theory ------------------------------------------------

@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` as ``((p, e), ...)`` by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def totient(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def moebius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=None)
def ramanujan_sums(n: int) -> tuple[int, ...]:
    """``c_n(i)`` for ``i = 0..n-1``: the trace of ``zeta_n^i`` over ``Q(zeta_n)``."""
    phi_n = totient(n)
    out = []
    for i in range(n):
        m = n // gcd(n, i)
        out.append(moebius(m) * phi_n // totient(m))
    return tuple(out)


# -- cyclotomic polynomials ----------------------------------------------------

_PHI_CACHE: dict[int, tuple[int, ...]] = {1: (-1, 1)}
_PHI_LOCK = threading.Lock()


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic; num is divisible by den
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            q[i - dn] = c
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    assert not any(num), "inexact cyclotomic polynomial division"
    return q


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the n-th cyclotomic polynomial.

    Uses ``x^n - 1 = prod_{d | n} Phi_d(x)``; results are cached.
    """
    cached = _PHI_CACHE.get(n)
    if cached is not None:
        return cached
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num = _poly_divexact(num, cyclotomic_polynomial(d))
    result = tuple(num)
    with _PHI_LOCK:
        _PHI_CACHE.setdefault(n, result)
    return result


def _reduce(dense: list[Fraction], n: int) -> list[Fraction]:
    """Remainder of a polynomial (list, constant first) modulo Phi_n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    dense = list(dense)
    for i in range(len(dense) - 1, deg - 1, -1):
        c = dense[i]
        if c:
            dense[i] = _ZERO
            base = i - deg
            for j in range(deg):
                if phi[j]:
                    dense[base + j] -= c * phi[j]
    if len(dense) < deg:
        dense.extend([_ZERO] * (deg - len(dense)))
    return dense[:deg]


def _dense_from_exponents(n: int, terms: Iterable[tuple[int, Fraction]]) -> list[Fraction]:
    dense = [_ZERO] * n
    for i, c in terms:
        if c:
            dense[i % n] += c
    return dense


def _minimize(n: int, coeffs: list[Fraction]) -> tuple[int, list[Fraction]]:
    """Move a reduced element of Q(zeta_n) down to its minimal conductor."""
    changed = True
    while changed and n > 1:
        changed = False
        if not any(coeffs[1:]):
            return 1, [coeffs[0]]
        for p, e in factorize(n):
            if e >= 2:
                # Phi_n(x) = Phi_{n/p}(x^p): subfield elements use exponents divisible by p
                if all(not c for i, c in enumerate(coeffs) if i % p):
                    coeffs = coeffs[::p]
                    n //= p
                    changed = True
                    break
            else:
                m = n // p
                cand = _descend_coprime(n, p, coeffs)
                lifted = _reduce(_dense_from_exponents(n, ((p * j, c) for j, c in enumerate(cand))), n)
                if lifted == coeffs:
                    coeffs = cand
                    n = m
                    changed = True
                    break
    return n, coeffs


def _descend_coprime(n: int, p: int, coeffs: list[Fraction]) -> list[Fraction]:
    """Relative trace Q(zeta_n) -> Q(zeta_m), n = p*m with p prime to m, divided by p-1.

    Equals the element itself exactly when the element lies in Q(zeta_m).
    """
    m = n // p
    inv_p = pow(p, -1, m) if m > 1 else 0
    inv_m = pow(m, -1, p)
    scale = Fraction(1, p - 1)
    dense = [_ZERO] * m
    for i, c in enumerate(coeffs):
        if not c:
            continue
        # zeta_n^i = zeta_m^a * zeta_p^b with zeta_m = zeta_n^p, zeta_p = zeta_n^m
        a = (i * inv_p) % m if m > 1 else 0
        b = (i * inv_m) % p
        t = p - 1 if b == 0 else -1
        dense[a] += c * t * scale
    return _reduce(dense, m)


# -- the element type ----------------------------------------------------------

class Cyclotomic:
    """An element of a cyclotomic field in canonical, conductor-minimal form."""

    __slots__ = ("_n", "_c", "_hash")

    def __init__(self, conductor: int, coeffs: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] = ()):
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        dense = _dense_from_exponents(conductor, ((int(i), Fraction(c)) for i, c in items))
        n, c = _minimize(conductor, _reduce(dense, conductor))
        self._n = n
        self._c = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, n: int, c: Iterable[Fraction]) -> Cyclotomic:
        obj = object.__new__(cls)
        obj._n = n
        obj._c = tuple(c)
        obj._hash = None
        return obj

    @classmethod
    def _from_reduced(cls, n: int, c: list[Fraction]) -> Cyclotomic:
        n, c = _minimize(n, c)
        return cls._raw(n, c)

    # constructors

    @classmethod
    def rational(cls, r: Scalar) -> Cyclotomic:
        return cls._raw(1, (Fraction(r),))

    @classmethod
    def root_of_unity(cls, n: int, i: int = 1) -> Cyclotomic:
        """``zeta_n^i``."""
        return cls(n, {i % n: 1})

    # accessors

    @property
    def conductor(self) -> int:
        return self._n

    @property
    def coeffs(self) -> dict[int, Fraction]:
        """Nonzero coefficients of the canonical power-basis representation."""
        return {i: c for i, c in enumerate(self._c) if c}

    def is_rational(self) -> bool:
        return self._n == 1

    def to_rational(self) -> Fraction:
        if self._n != 1:
            raise ValueError(f"{self!r} is not rational")
        return self._c[0]

    def is_zero(self) -> bool:
        return self._n == 1 and not self._c[0]

    # arithmetic

    def _lift(self, n: int) -> list[Fraction]:
        if n == self._n:
            return list(self._c)
        step = n // self._n
        return _reduce(_dense_from_exponents(n, ((i * step, c) for i, c in enumerate(self._c))), n)

    @staticmethod
    def _coerce(other) -> Cyclotomic | None:
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self._n == other._n == 1:
            return Cyclotomic.rational(self._c[0] + other._c[0])
        n = self._n * other._n // gcd(self._n, other._n)
        a, b = self._lift(n), other._lift(n)
        return Cyclotomic._from_reduced(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic._raw(self._n, (-c for c in self._c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other._n == 1:
            r = other._c[0]
            if not r:
                return Cyclotomic.rational(0)
            return Cyclotomic._raw(self._n, (c * r for c in self._c))
        if self._n == 1:
            return other * self
        n = self._n * other._n // gcd(self._n, other._n)
        sa, sb = n // self._n, n // other._n
        prod = [_ZERO] * n
        for i, x in enumerate(self._c):
            if not x:
                continue
            for j, y in enumerate(other._c):
                if y:
                    prod[(i * sa + j * sb) % n] += x * y
        return Cyclotomic._from_reduced(n, _reduce(prod, n))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._n == other._n and self._c == other._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, self._c))
        return self._hash

    def __repr__(self) -> str:
        if self._n == 1:
            return f"Cyclotomic({self._c[0]})"
        terms = " + ".join(f"{c}*E({self._n})^{i}" for i, c in self.coeffs.items())
        return f"Cyclotomic({terms})"


def normalize(conductor: int, coeffs: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]]) -> Cyclotomic:
    """Canonical element ``sum c_i zeta_conductor^i``; exponents may be any integers."""
    return Cyclotomic(conductor, coeffs)


def add(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a + b


def mul(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a * b


def galois(a: Cyclotomic, j: int) -> Cyclotomic:
    """Apply the automorphism ``zeta_n -> zeta_n^j`` of ``Q(zeta_n)``, n the conductor."""
    n = a.conductor
    if gcd(j, n) != 1:
        raise ValueError(f"galois exponent {j} is not coprime to conductor {n}")
    if n == 1:
        return a
    return Cyclotomic(n, ((i * j, c) for i, c in a.coeffs.items()))


def conj(a: Cyclotomic) -> Cyclotomic:
    """Complex conjugate."""
    return galois(a, -1)


def trace_to_rationals(a: Cyclotomic) -> Fraction:
    """Trace from ``Q(zeta_n)`` to ``Q``, n the (minimal) conductor of ``a``."""
    sums = ramanujan_sums(a.conductor)
    return sum((c * sums[i] for i, c in a.coeffs.items()), _ZERO)


def trace_over(a: Cyclotomic, field_conductor: int) -> Fraction:
    """Trace from ``Q(zeta_N)`` to ``Q`` for an element lying in ``Q(zeta_N)``."""
    n = a.conductor
    if field_conductor % n and (2 * field_conductor) % n:
        raise ValueError(f"element of conductor {n} does not lie in Q(zeta_{field_conductor})")
    return trace_to_rationals(a) * (totient(field_conductor) // totient(n))


def trace_times_root(a: Cyclotomic, field_conductor: int, shift: int) -> Fraction:
    """``trace_over(a * zeta_N^shift, N)`` without building the product.

    Traces are linear and ``Tr(zeta_N^i) = c_N(i)`` for any exponent, so the
    non-reduced expansion can be traced term by term.
    """
    N = field_conductor
    n = a.conductor
    if N % n:
        if (2 * N) % n:
            raise ValueError(f"element of conductor {n} does not lie in Q(zeta_{N})")
        # N odd: Q(zeta_N) = Q(zeta_2N), same degree
        return trace_times_root(a, 2 * N, 2 * shift)
    sums = ramanujan_sums(N)
    step = N // n
    return sum((c * sums[(i * step + shift) % N] for i, c in a.coeffs.items()), _ZERO)


# -- serialization -------------------------------------------------------------

def _rational_to_json(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def to_json(a: Cyclotomic) -> dict:
    return {
        "conductor": a.conductor,
        "coeffs": {str(i): _rational_to_json(c) for i, c in a.coeffs.items()},
    }


def from_json(obj: Mapping) -> Cyclotomic:
    try:
        n = int(obj["conductor"])
        raw = obj["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed cyclotomic {obj!r}") from exc
    if n < 1:
        raise ValueError(f"malformed cyclotomic {obj!r}: conductor must be positive")
    return Cyclotomic(n, ((int(i), Fraction(str(c))) for i, c in raw.items()))
