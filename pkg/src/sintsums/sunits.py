"""Units and S-units of Q and quadratic fields.

Provides the fundamental unit (continued fractions), the roots of unity, an
S-unit basis together with its logarithmic matrix and the S-regulator, and a
canonical representative for every associate class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from .qfield import (
    DEFAULT_DPS,
    Element,
    FieldError,
    FieldSpec,
    PlaceSet,
    is_s_integer,
    log_abs_at_place,
    s_norm,
)

__all__ = [
    "SUnitGroup",
    "AssocClass",
    "fundamental_unit",
    "roots_of_unity",
    "s_unit_basis",
    "s_regulator",
    "log_matrix",
    "canonical_associate",
    "is_associate",
    "is_s_unit",
    "SingularBasisError",
]

GUARD = mpmath.mpf("1e-9")
HIGH_DPS = 80
SNAP = mpmath.mpf("1e-50")


class SingularBasisError(FieldError):
    """The logarithmic matrix of a proposed S-unit basis is singular."""


def _pell_unit(d: int) -> tuple[int, int]:
    """Smallest (p, q) with p^2 - d q^2 = +-1, from the continued fraction of sqrt d."""
    a0 = math.isqrt(d)
    m, den, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - d * q * q not in (1, -1):
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


@lru_cache(maxsize=None)
def fundamental_unit(K: FieldSpec) -> Element:
    """The fundamental unit eps > 1 of a real quadratic field.

    For d = 1 mod 4 the unit of Z[sqrt d] is eps or eps^3; the cube root is
    tested exactly.
    """
    if K.is_rational or not K.is_real:
        raise FieldError(f"{K} has no fundamental unit")
    d = K.d
    p, q = _pell_unit(d)
    eps = Element(K, p, q)
    if d % 4 != 1:
        return eps
    # candidate cube root (x + y sqrt d)/2 from the real embeddings
    with mpmath.workdps(60):
        conj = mpmath.mpf(p) - q * mpmath.sqrt(d)
        big = mpmath.cbrt(mpmath.mpf(p) + q * mpmath.sqrt(d))
        small = mpmath.sign(conj) * mpmath.cbrt(abs(conj))
        x = int(mpmath.nint(big + small))
        y = int(mpmath.nint((big - small) / mpmath.sqrt(d)))
    cand = Element(K, x, y, 2)
    if cand.is_algebraic_integer() and cand**3 == eps:
        return cand
    return eps


def roots_of_unity(K: FieldSpec) -> tuple[int, Element]:
    """(omega_K, generator of the torsion subgroup)."""
    if K.d == -1:
        return 4, Element(K, 0, 1)
    if K.d == -3:
        return 6, Element(K, 1, 1, 2)
    return 2, -K.one


def is_s_unit(x: Element, S: PlaceSet) -> bool:
    return not x.is_zero() and is_s_integer(x, S) and s_norm(x, S) == 1


@dataclass(frozen=True)
class AssocClass:
    representative: Element

    def key(self):
        return self.representative.key()


@dataclass(eq=False)
class SUnitGroup:
    """Torsion, S-unit basis, log matrix and regulator for (K, S).

    ``log_matrix`` row i holds log|basis[i]|_v over the first s places of S
    (the last place is dropped).
    """

    field: FieldSpec
    places: PlaceSet
    omega: int
    torsion_generator: Element
    basis: tuple[Element, ...]
    log_matrix: mpmath.matrix | None
    regulator: mpmath.mpf
    dps: int = DEFAULT_DPS
    _inv: dict = field(default_factory=dict, repr=False)
    _canon: dict = field(default_factory=dict, repr=False)

    @property
    def s(self) -> int:
        return self.places.s

    @property
    def torsion(self) -> tuple[Element, ...]:
        z = self.torsion_generator
        out = [self.field.one]
        for _ in range(self.omega - 1):
            out.append(out[-1] * z)
        return tuple(out)

    def log_vector(self, x: Element, dps: int | None = None, drop_last: bool = True):
        dps = dps or self.dps
        places = self.places.places[:-1] if drop_last else self.places.places
        return [log_abs_at_place(x, v, dps) for v in places]

    def _inverse(self, dps: int):
        if dps not in self._inv:
            with mpmath.workdps(dps):
                M = log_matrix(self.basis, self.places, dps)
                self._inv[dps] = M**-1
        return self._inv[dps]

    def exponents(self, x: Element) -> list[int]:
        """Integer k with x / prod(basis^k) inside the half-open fundamental cell.

        Coordinates within the guard band of a cell wall are recomputed at
        ``HIGH_DPS``; values that still sit on the wall to 50 digits are
        lattice points and snap exactly.
        """
        if not self.basis:
            return []
        with mpmath.workdps(self.dps):
            t = _row_times(self.log_vector(x), self._inverse(self.dps))
        ks = []
        hi = None
        for i, ti in enumerate(t):
            fl = mpmath.floor(ti)
            frac = ti - fl
            if GUARD < frac < 1 - GUARD:
                ks.append(int(fl))
                continue
            if hi is None:
                with mpmath.workdps(HIGH_DPS):
                    hi = _row_times(self.log_vector(x, HIGH_DPS), self._inverse(HIGH_DPS))
            with mpmath.workdps(HIGH_DPS):
                r = mpmath.nint(hi[i])
                ks.append(int(r) if abs(hi[i] - r) < SNAP else int(mpmath.floor(hi[i])))
        return ks

    def reduce(self, x: Element) -> Element:
        """Divide x by the basis powers given by ``exponents``."""
        y = x
        for u, k in zip(self.basis, self.exponents(x)):
            if k:
                y = y * u ** (-k)
        return y

    def canonical(self, x: Element) -> Element:
        if x.is_zero():
            raise FieldError("zero has no associate class")
        hit = self._canon.get(x)
        if hit is not None:
            return hit
        y = self.reduce(x)
        best = y
        best_key = y.key()
        z = y
        for _ in range(self.omega - 1):
            z = z * self.torsion_generator
            k = z.key()
            if k < best_key:
                best, best_key = z, k
        if len(self._canon) < 200_000:
            self._canon[x] = best
        return best

    def unit(self, torsion_exp: int, exps) -> Element:
        y = self.torsion_generator ** (torsion_exp % self.omega)
        for u, k in zip(self.basis, exps):
            if k:
                y = y * u**k
        return y


def _row_times(vec, M):
    n = len(vec)
    return [mpmath.fsum(vec[i] * M[i, j] for i in range(n)) for j in range(n)]


def log_matrix(basis, S: PlaceSet, dps: int = DEFAULT_DPS, drop: int | None = None):
    """s x s matrix of log|u_i|_v, dropping place ``drop`` (default: last)."""
    s = S.s
    drop = s if drop is None else drop
    places = [v for j, v in enumerate(S.places) if j != drop]
    with mpmath.workdps(dps):
        M = mpmath.matrix(s, s)
        for i, u in enumerate(basis):
            for j, v in enumerate(places):
                M[i, j] = log_abs_at_place(u, v, dps)
    return M


def s_regulator(group: SUnitGroup, drop: int | None = None, dps: int | None = None) -> mpmath.mpf:
    """|det| of the log matrix with place ``drop`` removed."""
    if not group.basis:
        return mpmath.mpf(1)
    dps = dps or group.dps
    with mpmath.workdps(dps):
        det = abs(mpmath.det(log_matrix(group.basis, group.places, dps, drop)))
        scale = max(abs(x) for x in log_matrix(group.basis, group.places, dps, drop))
        if det < mpmath.mpf(10) ** (-dps // 2) * max(scale, 1) ** group.s:
            raise SingularBasisError("S-unit basis is dependent")
        return det


def s_unit_basis(K: FieldSpec, S: PlaceSet, dps: int = DEFAULT_DPS) -> SUnitGroup:
    """Fundamental unit (real fields) followed by one uniformizer per finite place."""
    if S.field != K:
        raise FieldError("place set belongs to a different field")
    basis = []
    if K.is_real and not K.is_rational:
        basis.append(fundamental_unit(K))
    basis.extend(v.uniformizer for v in S.finite)
    if len(basis) != S.s:
        raise FieldError("basis length does not match s")
    omega, zeta = roots_of_unity(K)
    group = SUnitGroup(K, S, omega, zeta, tuple(basis), None, mpmath.mpf(1), dps)
    if basis:
        group.log_matrix = log_matrix(basis, S, dps)
        group.regulator = s_regulator(group)
    return group


def canonical_associate(x: Element, group: SUnitGroup, S: PlaceSet | None = None) -> AssocClass:
    """Canonical representative of [x].

    The log vector is reduced into the half-open fundamental cell of the
    S-unit lattice, then the torsion multiple with the smallest exact (a, b)
    is chosen.
    """
    if S is not None and S != group.places:
        raise FieldError("place set does not match the unit group")
    if not is_s_integer(x, group.places):
        raise FieldError(f"{x} is not an S-integer")
    return AssocClass(group.canonical(x))


def is_associate(x: Element, y: Element, S: PlaceSet) -> bool:
    """x / y is an S-unit."""
    if x.is_zero() or y.is_zero():
        raise FieldError("associate test needs nonzero inputs")
    q = x / y
    return is_s_integer(q, S) and s_norm(q, S) == 1
