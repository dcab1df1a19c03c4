"""Exact arithmetic over Q, GF(p) and GF(p)[x]/(f).

Field elements are stored as plain Python values so that tensors can keep
them in numpy arrays:

* ``Q``: :class:`fractions.Fraction` (object arrays),
* ``GF(p)``: ``int`` in ``[0, p)`` (int64 arrays),
* ``GF(p)[x]/(f)``: ``int`` code ``c0 + c1*p + ... + c_{m-1}*p^(m-1)`` of the
  coefficient vector in the basis ``1, x, ..., x^(m-1)`` (int64 arrays).

The :class:`Scalar` wrapper pairs a value with its field for callers who want
operator syntax and mismatch checking.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegreeTooLarge,
    DivisionByZero,
    FieldMismatch,
    InvalidModulus,
    NoSuchRoot,
    ParseError,
)

MAX_FIELD_ORDER = 1 << 16
# trial divisions allowed in is_irreducible; covers degree 12 over GF(7)
IRREDUCIBILITY_BUDGET = 200_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Polynomials over GF(p)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Polynomial over GF(p), coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple.
    """

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(a) % self.p for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, p: int, k: int) -> "Poly":
        return cls(p, (0,) * k + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def _check(self, other: "Poly"):
        if other.p != self.p:
            raise FieldMismatch(f"polynomials over GF({self.p}) and GF({other.p})")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(self.p, tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))

    def __neg__(self) -> "Poly":
        return Poly(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return Poly(self.p, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(self.p, tuple(out))

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        db = other.degree
        lead_inv = pow(other.coeffs[-1], -1, p)
        quot = [0] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] * lead_inv % p
            if c:
                quot[k - db] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - db + j] = (rem[k - db + j] - c * b) % p
        return Poly(p, tuple(quot)), Poly(p, tuple(rem[:db]))

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = (acc * x + a) % self.p
        return acc

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            if k == 0:
                terms.append(str(a))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if a == 1 else f"{a}*{mono}")
        return "+".join(terms)

    @classmethod
    def parse(cls, p: int, text: str) -> "Poly":
        """Parse ``c0+c1*x+...+x^k`` (``-`` and ``x^k`` shorthands allowed)."""
        s = text.replace(" ", "")
        if not s:
            raise ParseError("empty polynomial")
        coeffs: dict[int, int] = {}
        for sign, term in re.findall(r"([+-]?)([^+-]+)", s):
            m = re.fullmatch(r"(\d+)?(?:\*?(x)(?:\^(\d+))?)?", term)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ParseError(f"bad polynomial term {term!r}")
            c = int(m.group(1)) if m.group(1) is not None else 1
            if m.group(2) is None:
                k = 0
            else:
                k = int(m.group(3)) if m.group(3) is not None else 1
            if sign == "-":
                c = -c
            coeffs[k] = coeffs.get(k, 0) + c
        top = max(coeffs)
        return cls(p, tuple(coeffs.get(k, 0) for k in range(top + 1)))


def monic_polys(p: int, degree: int) -> Iterator[Poly]:
    """All monic degree-``degree`` polynomials; the lower coefficients are
    enumerated as base-p counters with ``c0`` fastest."""
    for code in range(p**degree):
        low = []
        for _ in range(degree):
            code, r = divmod(code, p)
            low.append(r)
        yield Poly(p, tuple(low) + (1,))


def is_irreducible(f: Poly, budget: int | None = None) -> bool:
    """Exhaustive trial division by every monic polynomial of degree
    ``1..deg f // 2``."""
    if not f.is_monic() or f.degree < 1:
        raise InvalidModulus(f"expected a monic polynomial of degree >= 1, got {f}")
    budget = IRREDUCIBILITY_BUDGET if budget is None else budget
    half = f.degree // 2
    trials = sum(f.p**k for k in range(1, half + 1))
    if trials > budget:
        raise DegreeTooLarge(f"{trials} trial divisors for degree {f.degree} over GF({f.p}) exceeds budget {budget}")
    for k in range(1, half + 1):
        for g in monic_polys(f.p, k):
            if (f % g).is_zero():
                return False
    return True


def find_irreducible(p: int, degree: int, budget: int | None = None) -> Poly:
    """Monic irreducible polynomial of the given degree over GF(p).

    Over GF(2), degrees of the form ``2*3^l`` return the trinomial
    ``x^(2*3^l) + x^(3^l) + 1``, which is irreducible for every ``l``.
    Everything else is the first hit of an exhaustive scan.
    """
    if not is_prime(p):
        raise InvalidModulus(f"{p} is not prime")
    if degree < 1:
        raise InvalidModulus("degree must be >= 1")
    if p == 2 and degree % 2 == 0:
        t = degree // 2
        while t % 3 == 0:
            t //= 3
        if t == 1:
            half = degree // 2
            return Poly(2, (1,) + (0,) * (half - 1) + (1,) + (0,) * (half - 1) + (1,))
    for f in monic_polys(p, degree):
        if is_irreducible(f, budget):
            return f
    raise AssertionError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


class Field:
    """Common interface of the three field kinds.

    Scalar methods take raw values; the ``*_arr`` methods work elementwise on
    numpy arrays (with broadcasting) holding raw values.
    """

    kind: str
    characteristic: int
    order: int | None
    dtype: object
    zero: object
    one: object

    # -- identity -----------------------------------------------------------
    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return self.literal

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def is_ordered(self) -> bool:
        return False

    @property
    def literal(self) -> str:
        raise NotImplementedError

    # -- scalars ------------------------------------------------------------
    def from_int(self, n: int):
        raise NotImplementedError

    def element(self, i: int):
        """The ``i``-th element in the canonical enumeration (0, 1, 2, ...)."""
        raise NotImplementedError

    def elements(self) -> Iterator:
        if self.order is None:
            raise ValueError("infinite field has no finite enumeration")
        return (self.element(i) for i in range(self.order))

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return a == 0

    def contains(self, a) -> bool:
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    # -- arrays -------------------------------------------------------------
    def array(self, values) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, shape) -> np.ndarray:
        return self.array(np.zeros(shape, dtype=np.int64))

    def add_arr(self, a, b):
        raise NotImplementedError

    def neg_arr(self, a):
        raise NotImplementedError

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b):
        raise NotImplementedError

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product of 2-d raw-value arrays."""
        a = np.asarray(a, dtype=self.dtype)
        b = np.asarray(b, dtype=self.dtype)
        out = self.zeros((a.shape[0], b.shape[1]))
        for k in range(a.shape[1]):
            col = a[:, k]
            if not np.any(col != 0):
                continue
            out = self.add_arr(out, self.mul_arr(col[:, None], b[k][None, :]))
        return out


class RationalField(Field):
    kind = "rational"
    characteristic = 0
    order = None
    dtype = object

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def _key(self):
        return ("Q",)

    @property
    def is_ordered(self) -> bool:
        return True

    @property
    def literal(self) -> str:
        return "Q"

    def from_int(self, n):
        return Fraction(n)

    def element(self, i):
        return Fraction(i)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def sub(self, a, b):
        return a - b

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero in Q")
        return 1 / Fraction(a)

    def contains(self, a) -> bool:
        return isinstance(a, (int, Fraction)) and not isinstance(a, bool)

    def format(self, a) -> str:
        return str(Fraction(a))

    def parse(self, text: str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {text!r}") from exc

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values)
        if arr.dtype.kind in "iub":
            # one shared Fraction per distinct integer
            uniq, inverse = np.unique(arr.ravel(), return_inverse=True)
            table = np.empty(uniq.size, dtype=object)
            table[:] = [Fraction(int(v)) for v in uniq]
            return table[inverse.ravel()].reshape(arr.shape)
        arr = np.asarray(values, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        flat = arr.ravel()
        oflat = out.ravel()
        for i, v in enumerate(flat):
            oflat[i] = Fraction(v)
        return out

    def add_arr(self, a, b):
        return np.add(a, b, dtype=object)

    def neg_arr(self, a):
        return np.negative(a, dtype=object)

    def sub_arr(self, a, b):
        return np.subtract(a, b, dtype=object)

    def mul_arr(self, a, b):
        return np.multiply(a, b, dtype=object)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        return self.array(np.dot(a, b))


class PrimeField(Field):
    kind = "prime"
    dtype = np.int64

    def __init__(self, p: int):
        if not is_prime(p):
            raise InvalidModulus(f"{p} is not prime")
        if p > MAX_FIELD_ORDER:
            raise InvalidModulus(f"field order {p} exceeds {MAX_FIELD_ORDER}")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = 0
        self.one = 1

    def _key(self):
        return ("GF", self.p)

    @property
    def literal(self) -> str:
        return f"GF({self.p})"

    def from_int(self, n):
        return int(n) % self.p

    def element(self, i):
        if not 0 <= i < self.p:
            raise IndexError(i)
        return i

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of zero in GF({self.p})")
        return pow(int(a), -1, self.p)

    def contains(self, a) -> bool:
        return isinstance(a, (int, np.integer)) and 0 <= a < self.p

    def format(self, a) -> str:
        return str(int(a))

    def parse(self, text: str):
        try:
            v = int(text.strip())
        except ValueError as exc:
            raise ParseError(f"bad GF({self.p}) element {text!r}") from exc
        return v % self.p

    def array(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=np.int64), self.p)

    def add_arr(self, a, b):
        return np.mod(np.add(a, b, dtype=np.int64), self.p)

    def neg_arr(self, a):
        return np.mod(np.negative(a, dtype=np.int64), self.p)

    def sub_arr(self, a, b):
        return np.mod(np.subtract(a, b, dtype=np.int64), self.p)

    def mul_arr(self, a, b):
        return np.mod(np.multiply(a, b, dtype=np.int64), self.p)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        # chunk the inner dimension so int64 accumulation cannot overflow
        step = max(1, (1 << 62) // (self.p * self.p))
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, a.shape[1], step):
            out = (out + a[:, s : s + step] @ b[s : s + step]) % self.p
        return out


class ExtensionField(Field):
    kind = "extension"
    dtype = np.int64

    def __init__(self, modulus: Poly, check: bool = True):
        p = modulus.p
        if not is_prime(p):
            raise InvalidModulus(f"{p} is not prime")
        if not modulus.is_monic() or modulus.degree < 1:
            raise InvalidModulus(f"modulus {modulus} must be monic of degree >= 1")
        if p**modulus.degree > MAX_FIELD_ORDER:
            raise InvalidModulus(f"field order {p}^{modulus.degree} exceeds {MAX_FIELD_ORDER}")
        if check and not is_irreducible(modulus):
            raise InvalidModulus(f"{modulus} is reducible over GF({p})")
        self.p = p
        self.modulus = modulus
        self.degree = modulus.degree
        self.characteristic = p
        self.order = p**self.degree
        self.zero = 0
        self.one = 1
        self._pows = np.array([p**i for i in range(self.degree)], dtype=np.int64)

    def _key(self):
        return ("GFext", self.p, self.modulus.coeffs)

    @property
    def base_field(self) -> PrimeField:
        return GF(self.p)

    @property
    def literal(self) -> str:
        return f"GF({self.p})[x]/({self.modulus})"

    # -- encoding -----------------------------------------------------------
    def to_coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        a = int(a)
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        poly = Poly(self.p, tuple(coeffs)) % self.modulus
        return sum(c * self.p**i for i, c in enumerate(poly.coeffs))

    def to_poly(self, a: int) -> Poly:
        return Poly(self.p, self.to_coeffs(a))

    @property
    def gen(self) -> int:
        """The class of ``x``."""
        return self.from_coeffs((0, 1))

    def from_int(self, n):
        return int(n) % self.p

    def element(self, i):
        if not 0 <= i < self.order:
            raise IndexError(i)
        return i

    def in_base_field(self, a) -> bool:
        return 0 <= int(a) < self.p

    # -- tables -------------------------------------------------------------
    @functools.cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.order
        factors = prime_factors(q - 1)
        for g in range(2, q) if q > 2 else [1]:
            gp = self.to_poly(g)

            def power(e):
                r, b = Poly(self.p, (1,)), gp
                while e:
                    if e & 1:
                        r = (r * b) % self.modulus
                    b = (b * b) % self.modulus
                    e >>= 1
                return r

            if all(power((q - 1) // r).coeffs != (1,) for r in factors):
                break
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = Poly(self.p, (1,))
        for e in range(q - 1):
            code = sum(c * self.p**i for i, c in enumerate(cur.coeffs))
            exp[e] = code
            log[code] = e
            cur = (cur * gp) % self.modulus
        exp[q - 1 :] = exp[: q - 1]
        return exp, log

    # -- scalar ops ---------------------------------------------------------
    def add(self, a, b):
        if self.p == 2:
            return int(a) ^ int(b)
        return int(self.add_arr(np.int64(a), np.int64(b)))

    def neg(self, a):
        if self.p == 2:
            return int(a)
        return int(self.neg_arr(np.int64(a)))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables
        return int(exp[log[a] + log[b]])

    def inv(self, a):
        if a == 0:
            raise DivisionByZero(f"inverse of zero in {self.literal}")
        exp, log = self._tables
        return int(exp[(self.order - 1 - log[a]) % (self.order - 1)])

    def contains(self, a) -> bool:
        return isinstance(a, (int, np.integer)) and 0 <= a < self.order

    def format(self, a) -> str:
        return "[" + ",".join(str(c) for c in self.to_coeffs(a)) + "]"

    def parse(self, text: str):
        s = text.strip()
        if s.startswith("[") and s.endswith("]"):
            body = s[1:-1].strip()
            try:
                coeffs = [int(t) for t in body.split(",")] if body else []
            except ValueError as exc:
                raise ParseError(f"bad extension element {text!r}") from exc
            if len(coeffs) > self.degree:
                raise ParseError(f"{text!r} has more than {self.degree} coefficients")
            return self.from_coeffs(coeffs)
        try:
            return int(s) % self.p
        except ValueError as exc:
            raise ParseError(f"bad extension element {text!r}") from exc

    # -- array ops ----------------------------------------------------------
    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError(f"codes outside [0, {self.order})")
        return arr

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return [(a // int(pw)) % self.p for pw in self._pows]

    def add_arr(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        da, db = self._digits(a), self._digits(b)
        return sum(((x + y) % self.p) * int(pw) for x, y, pw in zip(da, db, self._pows))

    def neg_arr(self, a):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64).copy()
        return sum(((-x) % self.p) * int(pw) for x, pw in zip(self._digits(a), self._pows))

    def mul_arr(self, a, b):
        exp, log = self._tables
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        zero = (a == 0) | (b == 0)
        la = log[np.where(a == 0, 1, a)]
        lb = log[np.where(b == 0, 1, b)]
        return np.where(zero, 0, exp[la + lb])


# ---------------------------------------------------------------------------
# Constructors and literals
# ---------------------------------------------------------------------------

QQ = RationalField()


@functools.lru_cache(maxsize=None)
def _prime_field(p: int) -> PrimeField:
    return PrimeField(p)


@functools.lru_cache(maxsize=None)
def _extension_field(p: int, coeffs: tuple[int, ...]) -> ExtensionField:
    return ExtensionField(Poly(p, coeffs))


def GF(p: int, degree: int = 1, modulus: Poly | None = None) -> Field:
    """``GF(p)``, ``GF(p, k)`` (modulus from :func:`find_irreducible`) or
    ``GF(p, modulus=f)``."""
    if modulus is not None:
        if modulus.p != p:
            raise FieldMismatch("modulus over a different prime")
        return _extension_field(p, modulus.coeffs)
    if degree == 1:
        if p > 1 and not is_prime(p):
            # GF(q) for a prime power q
            base, k = _prime_power(p)
            return _extension_field(base, find_irreducible(base, k).coeffs)
        return _prime_field(p)
    return _extension_field(p, find_irreducible(p, degree).coeffs)


def _prime_power(q: int) -> tuple[int, int]:
    fs = prime_factors(q)
    if len(fs) != 1:
        raise InvalidModulus(f"{q} is not a prime power")
    p, k = fs[0], 0
    while q > 1:
        q //= p
        k += 1
    return p, k


def parse_field(text: str) -> Field:
    """Parse ``Q``, ``GF(p)``, ``GF(p^k)``, ``GF(q)`` or ``GF(p)[x]/(poly)``."""
    s = text.strip().replace(" ", "")
    if s in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"GF\((\d+)\)\[x\]/\((.+)\)", s)
    if m:
        p = int(m.group(1))
        if not is_prime(p):
            raise ParseError(f"{p} is not prime")
        f = Poly.parse(p, m.group(2))
        try:
            return GF(p, modulus=f)
        except InvalidModulus as exc:
            raise ParseError(str(exc)) from exc
    m = re.fullmatch(r"GF\((\d+)(?:\^(\d+))?\)", s)
    if m:
        base = int(m.group(1))
        k = int(m.group(2)) if m.group(2) else 1
        try:
            if m.group(2) is None and not is_prime(base):
                base, k = _prime_power(base)
        except InvalidModulus as exc:
            raise ParseError(str(exc)) from exc
        if not is_prime(base):
            raise ParseError(f"{base} is not prime")
        try:
            return GF(base, k)
        except InvalidModulus as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unrecognised field literal {text!r}")


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scalar:
    field: Field
    value: object

    def __post_init__(self):
        if not self.field.contains(self.value):
            if isinstance(self.field, RationalField):
                object.__setattr__(self, "value", Fraction(self.value))
            else:
                raise ValueError(f"{self.value!r} is not an element of {self.field}")

    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return Scalar(self.field, self.field.from_int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return Scalar(self.field, self.field.add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return Scalar(self.field, self.field.sub(self.value, o.value))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        return Scalar(self.field, self.field.mul(self.value, o.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return Scalar(self.field, self.field.div(self.value, o.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return Scalar(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.format(self.value)


def field_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    """Dispatch one of ``add, sub, mul, neg, inv, div``."""
    unary = {"neg": lambda x: -x, "inv": Scalar.inverse}
    binary = {
        "add": lambda x, y: x + y,
        "sub": lambda x, y: x - y,
        "mul": lambda x, y: x * y,
        "div": lambda x, y: x / y,
    }
    if op in unary:
        return unary[op](a)
    if op not in binary:
        raise ValueError(f"unknown op {op!r}")
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    return binary[op](a, b)


# ---------------------------------------------------------------------------
# Roots of unity and multiplication matrices
# ---------------------------------------------------------------------------


def element_order(field: Field, a) -> int:
    """Multiplicative order of a nonzero element of a finite field."""
    if field.is_zero(a):
        raise DivisionByZero("zero has no multiplicative order")
    n = field.order - 1
    order = n
    for r in prime_factors(n):
        while order % r == 0 and field.pow(a, order // r) == field.one:
            order //= r
    return order


def primitive_root_of_unity(field: Field, N: int):
    """Smallest element (canonical enumeration) of multiplicative order ``N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return field.one
    if not field.is_finite:
        if N == 2:
            return field.from_int(-1)
        raise NoSuchRoot(f"Q has no primitive {N}-th root of unity")
    q = field.order
    if (q - 1) % N:
        raise NoSuchRoot(f"{N} does not divide |{field}*| = {q - 1}")
    for i in range(1, q):
        a = field.element(i)
        if field.pow(a, N) == field.one and element_order(field, a) == N:
            return a
    raise AssertionError("unreachable: cyclic group has elements of every order dividing q-1")


def multiplication_matrix(field: Field, element):
    """Matrix over the prime subfield of ``y -> element * y`` in the basis
    ``1, x, ..., x^(m-1)``; column ``j`` holds the coordinates of
    ``element * x^j``."""
    from .matrix import Matrix

    if isinstance(element, Scalar):
        if element.field != field:
            raise FieldMismatch(f"{element.field} vs {field}")
        element = element.value
    if not field.contains(element):
        raise FieldMismatch(f"{element!r} is not in {field}")
    if isinstance(field, ExtensionField):
        m = field.degree
        cols = []
        for j in range(m):
            prod = field.mul(element, field.from_coeffs((0,) * j + (1,)))
            cols.append(field.to_coeffs(prod))
        data = np.array(cols, dtype=np.int64).T.copy()
        return Matrix(field.base_field, data)
    return Matrix(field, field.array([[element]]))


def all_vectors(field: Field, length: int) -> Iterator[tuple]:
    """Every vector of ``field^length`` in canonical order."""
    return itertools.product(list(field.elements()), repeat=length)
