"""The principal ideals of O_{K,S} of bounded norm and their fixed generators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .qfield import Element, FieldError, FieldSpec, PlaceSet, s_norm
from .sunits import SUnitGroup, fundamental_unit

__all__ = [
    "IdealInventory",
    "enumerate_ideal_inventory",
    "generator_of",
    "integral_elements",
    "fundamental_domain_bound",
]


def _ceil_sqrt(n: int) -> int:
    if n <= 0:
        return 0
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def integral_elements(
    K: FieldSpec, norm_bound: int, y_bound: int, x_bound: int | None = None
) -> Iterator[Element]:
    """Elements x + y*omega of O_K with 1 <= |N| <= norm_bound and |y| <= y_bound
    (and |x| <= x_bound when given), swept row by row over y."""
    if K.is_rational:
        top = norm_bound if x_bound is None else min(norm_bound, x_bound)
        for a in range(1, top + 1):
            yield K.one * a
            yield K.one * (-a)
        return
    d = K.d
    half = d % 4 == 1
    scale = 4 if half else 1
    for y in range(-y_bound, y_bound + 1):
        lo = _ceil_sqrt(d * y * y - scale * norm_bound)
        hi_sq = d * y * y + scale * norm_bound
        if hi_sq < 0:
            continue
        hi = math.isqrt(hi_sq)
        if lo > hi:
            continue
        for mag in range(lo, hi + 1):
            for u in ((mag, -mag) if mag else (0,)):
                if half and (u - y) % 2:
                    continue
                n = u * u - d * y * y
                if n == 0 or abs(n) > scale * norm_bound:
                    continue
                if x_bound is not None:
                    x = (u - y) // 2 if half else u
                    if abs(x) > x_bound:
                        continue
                yield Element(K, u, y, 2) if half else Element(K, u, y)


def fundamental_domain_bound(K: FieldSpec, norm_bound: int) -> int:
    """Bound on |y| covering one representative (up to O_K^*) of every
    element of O_K with |N| <= norm_bound."""
    if K.is_rational:
        return 0
    scale = 4 if K.d % 4 == 1 else 1
    if K.d < 0:
        return math.isqrt(scale * norm_bound // abs(K.d)) + 1
    eps = fundamental_unit(K)
    eps_real = float(eps.a) + float(eps.b) * math.sqrt(K.d)
    # after unit scaling both embeddings are at most sqrt(norm_bound * eps)
    return int(math.sqrt(scale * norm_bound * eps_real / K.d)) + 2


@dataclass
class IdealInventory:
    """I(m): one canonical generator per principal ideal of norm <= m.

    ``generators[i]`` has S-norm ``norms[i]``; entries are sorted by norm and
    then by exact coordinates.
    """

    m: int
    generators: list[Element]
    norms: list[int]
    group: SUnitGroup = field(repr=False)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            for i, g in enumerate(self.generators):
                self._index[self.group.canonical(g)] = i

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def index_of(self, x: Element) -> int:
        try:
            return self._index[self.group.canonical(x)]
        except KeyError:
            raise FieldError(f"no generator for the class of {x}; inventory incomplete") from None

    def with_generators(self, generators: Sequence[Element]) -> IdealInventory:
        """Same ideals, different (associate) generator choice."""
        if len(generators) != len(self.generators):
            raise FieldError("generator count mismatch")
        new = list(generators)
        for g, old in zip(new, self.generators):
            if self.group.canonical(g) != self.group.canonical(old):
                raise FieldError(f"{g} does not generate the same ideal as {old}")
        return IdealInventory(self.m, new, list(self.norms), self.group, dict(self._index))

    def rows(self) -> list[tuple[int, Fraction, Fraction]]:
        return [(n, g.a, g.b) for n, g in zip(self.norms, self.generators)]


def enumerate_ideal_inventory(
    K: FieldSpec, S: PlaceSet, group: SUnitGroup, m: int, box_scale: int = 1
) -> IdealInventory:
    """List the classes of nonzero S-integers of S-norm <= m.

    Each such class contains an element of O_K prime to the finite places of
    S with |N| equal to its S-norm, so sweeping O_K over one fundamental
    domain of O_K^* with |N| <= m finds every class.  ``box_scale`` widens
    the sweep for saturation checks.
    """
    if not isinstance(m, int) or m < 1:
        raise FieldError(f"m must be a positive integer, got {m!r}")
    if group.places != S or S.field != K:
        raise FieldError("field, place set and unit group do not match")
    seen: dict[Element, int] = {}
    bound = fundamental_domain_bound(K, m) * box_scale
    for x in integral_elements(K, m, bound):
        c = group.canonical(x)
        if c not in seen:
            n = s_norm(c, S)
            if n <= m:
                seen[c] = int(n)
    seen.setdefault(group.canonical(K.one), 1)
    order = sorted(seen, key=lambda g: (seen[g], g.key()))
    return IdealInventory(m, order, [seen[g] for g in order], group)


def generator_of(inventory: IdealInventory, x: Element) -> tuple[Element, Element]:
    """(g, eps) with g in G(m), eps an S-unit and x == g * eps exactly."""
    if x.is_zero():
        raise FieldError("zero has no generator")
    if s_norm(x, inventory.group.places) > inventory.m:
        raise FieldError(f"N_S({x}) exceeds m = {inventory.m}")
    g = inventory.generators[inventory.index_of(x)]
    return g, x / g
