"""Exact arithmetic in Q and Q(sqrt d), places of these fields and the S-norm.

Elements are stored as ``(a + b*sqrt(d)) / den`` with integer numerators and a
positive common denominator, reduced so that ``gcd(a, b, den) == 1``.  All
equality and vanishing decisions go through these integers.  Floating point
(``mpmath``) only appears when evaluating Archimedean absolute values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "FieldSpec",
    "Element",
    "Place",
    "PlaceSet",
    "FieldError",
    "make_field",
    "make_place_set",
    "field_norm",
    "abs_at_place",
    "log_abs_at_place",
    "s_norm",
    "is_s_integer",
    "valuation",
    "DEFAULT_DPS",
]

DEFAULT_DPS = 30


class FieldError(ValueError):
    """Invalid field, element or place data."""


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1
    return True


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field Q (``d == 1``) or the quadratic field Q(sqrt d)."""

    d: int

    @property
    def is_rational(self) -> bool:
        return self.d == 1

    @property
    def degree(self) -> int:
        return 1 if self.is_rational else 2

    @property
    def is_real(self) -> bool:
        return self.d > 0

    @property
    def discriminant(self) -> int:
        if self.is_rational:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def ring_generator(self) -> Element:
        """omega with O_K = Z[omega]."""
        if self.is_rational:
            return self.one
        if self.d % 4 == 1:
            return Element(self, 1, 1, 2)
        return Element(self, 0, 1)

    @property
    def one(self) -> Element:
        return Element(self, 1)

    @property
    def zero(self) -> Element:
        return Element(self, 0)

    def __call__(self, a, b=0) -> Element:
        """Build ``a + b*sqrt(d)`` from ints or Fractions."""
        a, b = Fraction(a), Fraction(b)
        den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        return Element(self, int(a * den), int(b * den), den)

    def from_basis(self, x: int, y: int) -> Element:
        """``x + y*omega`` in the integral basis (1, omega)."""
        return self.one * x + self.ring_generator * y

    def __str__(self) -> str:
        return "Q" if self.is_rational else f"Q(sqrt({self.d}))"


def make_field(d) -> FieldSpec:
    """Validate ``d`` and return the field.  ``"rational"``/``"Q"`` give Q."""
    if isinstance(d, str):
        if d.strip().lower() in ("rational", "q"):
            return FieldSpec(1)
        try:
            d = int(d)
        except ValueError:
            raise FieldError(f"cannot parse field parameter {d!r}") from None
    if not isinstance(d, int) or isinstance(d, bool):
        raise FieldError(f"d must be an integer, got {d!r}")
    if d in (0, 1):
        raise FieldError(f"d = {d} does not define a quadratic field")
    if not _is_squarefree(d):
        raise FieldError(f"d = {d} is not squarefree")
    return FieldSpec(d)


class Element:
    """An exact element ``(a + b*sqrt(d)) / den`` of a FieldSpec."""

    __slots__ = ("field", "_a", "_b", "_den", "_hash")

    def __init__(self, field: FieldSpec, a: int, b: int = 0, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if b and field.is_rational:
            raise FieldError("rational field elements have b = 0")
        if den < 0:
            a, b, den = -a, -b, -den
        if den != 1:
            g = math.gcd(a, b, den)
            if g != 1:
                a, b, den = a // g, b // g, den // g
        self.field = field
        self._a = a
        self._b = b
        self._den = den
        self._hash = None

    # -- coordinates -------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._a, self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._b, self._den)

    @property
    def numerators(self) -> tuple[int, int, int]:
        return self._a, self._b, self._den

    def key(self) -> tuple[Fraction, Fraction]:
        """Exact coordinate pair (a, b); used for ordering and dict keys."""
        return self.a, self.b

    def to_basis(self) -> tuple[Fraction, Fraction]:
        """Coordinates (x, y) with self = x + y*omega."""
        if self.field.d % 4 == 1 and not self.field.is_rational:
            return self.a - self.b, 2 * self.b
        return self.a, self.b

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> Element:
        if isinstance(other, Element):
            if other.field != self.field:
                raise FieldError(f"mixing elements of {self.field} and {other.field}")
            return other
        if isinstance(other, int):
            return Element(self.field, other)
        if isinstance(other, Fraction):
            return Element(self.field, other.numerator, 0, other.denominator)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._den == other._den:
            return Element(self.field, self._a + other._a, self._b + other._b, self._den)
        return Element(
            self.field,
            self._a * other._den + other._a * self._den,
            self._b * other._den + other._b * self._den,
            self._den * other._den,
        )

    __radd__ = __add__

    def __neg__(self):
        return Element(self.field, -self._a, -self._b, self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        return Element(
            self.field,
            a1 * a2 + self.field.d * b1 * b2,
            a1 * b2 + a2 * b1,
            self._den * other._den,
        )

    __rmul__ = __mul__

    def conjugate(self) -> Element:
        return Element(self.field, self._a, -self._b, self._den)

    def inverse(self) -> Element:
        n = self._a * self._a - self.field.d * self._b * self._b
        if self.field.is_rational:
            n = self._a
            if n == 0:
                raise ZeroDivisionError("inverse of zero")
            return Element(self.field, self._den, 0, n)
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return Element(self.field, self._a * self._den, -self._b * self._den, n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Element):
            return (
                self.field == other.field
                and self._a == other._a
                and self._b == other._b
                and self._den == other._den
            )
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.d, self._a, self._b, self._den))
        return self._hash

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_algebraic_integer(self) -> bool:
        """Membership in O_K."""
        if self._den == 1:
            return True
        if self.field.is_rational or self.field.d % 4 != 1:
            return False
        return self._den == 2 and self._a % 2 == 1 and self._b % 2 == 1

    def norm(self) -> Fraction:
        return field_norm(self)

    def __repr__(self):
        if self.field.is_rational:
            return f"Element(Q, {self.a})"
        return f"Element(d={self.field.d}, {self.a}, {self.b})"

    def __str__(self):
        if self.field.is_rational or self._b == 0:
            return str(self.a)
        return f"{self.a}{'+' if self._b > 0 else '-'}{abs(self.b)}*sqrt({self.field.d})"


def field_norm(x: Element) -> Fraction:
    """N_{K/Q}(x); equals a for K = Q and a^2 - d*b^2 otherwise."""
    if x.field.is_rational:
        return x.a
    return Fraction(x._a * x._a - x.field.d * x._b * x._b, x._den * x._den)


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of K.

    ``kind`` is ``"real"``, ``"complex"`` or ``"finite"``.  Real places of a real
    quadratic field are told apart by ``sign``, the image of sqrt(d) being
    ``sign * sqrt(d)``.  Finite places carry the rational prime ``p``, residue
    degree ``f``, ramification index ``e`` and a generator ``uniformizer`` of
    the (principal) prime ideal.
    """

    kind: str
    sign: int = 1
    p: int = 0
    f: int = 0
    e: int = 0
    uniformizer: Element | None = field(default=None, compare=False)
    label: str = ""

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        return self.label or self.kind


@dataclass(frozen=True)
class PlaceSet:
    """The set S: all infinite places first, then the chosen finite places."""

    field: FieldSpec
    places: tuple[Place, ...]

    def __post_init__(self):
        inf = [v for v in self.places if not v.is_finite]
        if len(inf) != len(infinite_places(self.field)):
            raise FieldError("S must contain every Archimedean place")
        if any(v.is_finite for v in self.places[: len(inf)]):
            raise FieldError("infinite places must come first in S")

    @property
    def s(self) -> int:
        return len(self.places) - 1

    @property
    def finite(self) -> tuple[Place, ...]:
        return tuple(v for v in self.places if v.is_finite)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({v.p for v in self.finite}))

    def __len__(self):
        return len(self.places)

    def __iter__(self):
        return iter(self.places)


def infinite_places(K: FieldSpec) -> tuple[Place, ...]:
    if K.is_rational:
        return (Place("real", label="inf"),)
    if K.is_real:
        return (Place("real", 1, label="inf+"), Place("real", -1, label="inf-"))
    return (Place("complex", label="inf"),)


def _splitting(K: FieldSpec, p: int) -> str:
    """'split', 'inert' or 'ramified' for the rational prime p in K."""
    d = K.d
    if p == 2:
        if d % 4 in (2, 3):
            return "ramified"
        return "split" if d % 8 == 1 else "inert"
    if d % p == 0:
        return "ramified"
    return "split" if pow(d % p, (p - 1) // 2, p) == 1 else "inert"


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def find_element_of_norm(K: FieldSpec, target: int, limit: int | None = None) -> Element | None:
    """Some element of O_K with |N| == target, or None.

    For real fields the search covers one fundamental domain of the unit
    action, so None is a proof that no such element exists.
    """
    d = K.d
    if K.is_rational:
        return K.one * target
    four = 4 if d % 4 == 1 else 1
    if limit is None:
        if d < 0:
            limit = math.isqrt(four * target // abs(d)) + 1
        else:
            from .sunits import fundamental_unit  # local import, avoids cycle

            eps = float(fundamental_unit(K).a + fundamental_unit(K).b * math.sqrt(d))
            limit = int(math.sqrt(four * target * eps / d)) + 2
    # elements written as (u + y*sqrt d)/2 when d = 1 mod 4, else u + y*sqrt d
    for y in range(0, limit + 1):
        found = []
        for sgn in (1, -1):
            u = _isqrt_exact(d * y * y + sgn * four * target)
            if u is None or (four == 4 and (u - y) % 2):
                continue
            found.append(u)
        if found:
            return Element(K, min(found), y, 2 if four == 4 else 1)
    return None


def valuation(x: Element, v: Place) -> int:
    """ord_v(x) for a nonzero element and a finite place."""
    if x.is_zero():
        raise FieldError("valuation of zero")
    K = x.field
    a, b, den = x.numerators
    p = v.p
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    den_part = v.e * k
    if v.f == 2 or K.is_rational:
        # inert prime (or Q): ord = min p-adic valuation of the coordinates,
        # measured in the integral basis to handle half-integers correctly
        y = Element(K, a, b)
        n = 0
        while True:
            z = Element(K, y._a, y._b, p)
            if not z.is_algebraic_integer():
                break
            y = z
            n += 1
        return n - den_part
    pi = v.uniformizer
    pi_bar = pi.conjugate()
    npi = pi._a * pi._a - K.d * pi._b * pi._b  # pi is integral with den 1 or 2
    npi = Fraction(npi, pi._den * pi._den)
    y = Element(K, a, b)
    n = 0
    while True:
        z = y * pi_bar / npi
        if not z.is_algebraic_integer():
            break
        y = z
        n += 1
    return n - den_part


def make_place_set(K: FieldSpec, primes: Iterable[int] = ()) -> PlaceSet:
    """S = infinite places plus every place above each listed rational prime.

    Finite places must be principal; a non-principal prime raises FieldError.
    """
    places = list(infinite_places(K))
    for p in sorted(set(int(p) for p in primes)):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        if K.is_rational:
            places.append(Place("finite", p=p, f=1, e=1, uniformizer=K.one * p, label=f"p{p}"))
            continue
        kind = _splitting(K, p)
        if kind == "inert":
            places.append(Place("finite", p=p, f=2, e=1, uniformizer=K.one * p, label=f"p{p}"))
            continue
        pi = find_element_of_norm(K, p)
        if pi is None:
            raise FieldError(f"the primes above {p} in {K} are not principal")
        if kind == "ramified":
            places.append(Place("finite", p=p, f=1, e=2, uniformizer=pi, label=f"p{p}"))
        else:
            places.append(Place("finite", p=p, f=1, e=1, uniformizer=pi, label=f"p{p}a"))
            places.append(
                Place("finite", p=p, f=1, e=1, uniformizer=pi.conjugate(), label=f"p{p}b")
            )
    return PlaceSet(K, tuple(places))


# ---------------------------------------------------------------------------
# absolute values


def _embed(x: Element, sign: int) -> mpmath.mpf:
    """sigma(x) for the real embedding sqrt(d) -> sign*sqrt(d), without
    catastrophic cancellation (small conjugates go through N(x)/sigma'(x))."""
    a, b, den = x.numerators
    b = sign * b
    if a == 0 or b == 0 or (a > 0) == (b > 0):
        return (mpmath.mpf(a) + mpmath.mpf(b) * mpmath.sqrt(x.field.d)) / den
    n = a * a - x.field.d * b * b
    other = (mpmath.mpf(a) - mpmath.mpf(b) * mpmath.sqrt(x.field.d)) / den
    return mpmath.mpf(n) / (den * den) / other


def abs_at_place(x: Element, v: Place, dps: int = DEFAULT_DPS):
    """Normalized |x|_v.

    Real places give ``|sigma(x)|`` and the complex place ``|sigma(x)|**2`` as
    ``mpmath.mpf`` at ``dps`` digits; finite places give the exact Fraction
    ``p ** (-f * ord_v(x))``.
    """
    if x.is_zero():
        raise FieldError("absolute value of zero is excluded")
    if v.is_finite:
        k = v.f * valuation(x, v)
        return Fraction(1, v.p**k) if k >= 0 else Fraction(v.p ** (-k))
    with mpmath.workdps(dps):
        if v.kind == "complex":
            return +mpmath.mpf(field_norm(x).numerator) / field_norm(x).denominator
        if x.field.is_rational:
            return abs(mpmath.mpf(x.a.numerator) / x.a.denominator)
        return abs(_embed(x, v.sign))


def log_abs_at_place(x: Element, v: Place, dps: int = DEFAULT_DPS) -> mpmath.mpf:
    with mpmath.workdps(dps):
        if v.is_finite:
            return -v.f * valuation(x, v) * mpmath.log(v.p)
        return mpmath.log(abs_at_place(x, v, dps))


def is_s_integer(x: Element, S: PlaceSet) -> bool:
    """True iff ord_P(x) >= 0 for every prime P outside S."""
    if x.is_zero() or x.is_algebraic_integer():
        return True
    y = x
    for v in S.finite:
        k = valuation(y, v)
        if k < 0:
            y = y * v.uniformizer ** (-k)
    return y.is_algebraic_integer()


def s_norm(x: Element, S: PlaceSet) -> Fraction:
    """N_S(x), computed exactly from |N(x)| and the finite valuations in S."""
    if x.is_zero():
        raise FieldError("N_S(0) is excluded")
    if not S.finite:
        if not x.is_algebraic_integer():
            raise FieldError(f"{x} is not an S-integer")
        return abs(field_norm(x))
    if not is_s_integer(x, S):
        raise FieldError(f"{x} is not an S-integer")
    value = abs(field_norm(x))
    for v in S.finite:
        k = v.f * valuation(x, v)
        value *= Fraction(1, v.p**k) if k >= 0 else v.p ** (-k)
    return value


def s_norm_sequence(xs: Sequence[Element], S: PlaceSet) -> list[Fraction]:
    return [s_norm(x, S) for x in xs]
