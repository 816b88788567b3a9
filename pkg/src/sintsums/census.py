"""Exhaustive counts of sums of S-integers of bounded S-norm.

Counted quantities, for a field K, places S, n summands, summand bound m and
sum bound q:

* ``w``: projective unit tuples (eps_1 : ... : eps_n) with N_S(sum c_i eps_i) <= q
  and no vanishing subsum, for a fixed coefficient vector c;
* ``V``: classes (alpha_1 : ... : alpha_n) with N_S(alpha_i) <= m,
  N_S(sum) <= q and no vanishing subsum;
* ``V_star``: the part of V whose permutation orbit has n! elements;
* ``u``: associate classes of the sums over V;
* ``collisions``: V_star tuples whose sum class is also produced by a V_star
  tuple from a different permutation orbit.

Unit searches run over an exponent box around eps_1 = 1.  Whether a box is
large enough cannot be certified, so every count is reported together with a
saturation flag obtained by doubling the box until the counts stop changing.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .ideals import IdealInventory, generator_of, integral_elements
from .qfield import Element, FieldError, s_norm
from .sunits import AssocClass, SUnitGroup

__all__ = [
    "ExponentBox",
    "ProjectiveUnitTuple",
    "SumTuple",
    "CensusResult",
    "subsum_ok",
    "box_units",
    "everest_count",
    "enumerate_V",
    "enumerate_V_star",
    "fixing_permutation",
    "count_u",
    "brute_force_oracle",
    "saturation_check",
    "run_census",
    "sum_tuple_from_terms",
]


@dataclass(frozen=True)
class ExponentBox:
    """Exponents {-r_j, ..., r_j} per basis generator; torsion always included."""

    radius: tuple[int, ...]
    torsion_included: bool = True

    def __post_init__(self):
        if any(r < 0 for r in self.radius):
            raise ValueError("box radii must be nonnegative")

    @classmethod
    def uniform(cls, s: int, r: int) -> ExponentBox:
        return cls((r,) * s)

    def doubled(self) -> ExponentBox:
        return ExponentBox(tuple(max(1, 2 * r) for r in self.radius))

    @property
    def max_radius(self) -> int:
        return max(self.radius, default=0)


@dataclass(frozen=True)
class ProjectiveUnitTuple:
    """(eps_1 : ... : eps_n), stored with eps_1 == 1."""

    units: tuple[Element, ...]

    def __post_init__(self):
        if self.units and self.units[0] != 1:
            raise FieldError("projective unit tuples are normalized with first entry 1")


@dataclass(frozen=True)
class SumTuple:
    coefficients: tuple[Element, ...]
    units: ProjectiveUnitTuple
    sum: Element
    sum_class: AssocClass | None

    @property
    def terms(self) -> tuple[Element, ...]:
        return tuple(c * e for c, e in zip(self.coefficients, self.units.units))


@dataclass
class CensusResult:
    q: int
    n: int
    m: int
    u: int
    V: int
    V_star: int
    collisions: int
    w: int | None
    p_classes: int
    p_classes_star: int
    box: ExponentBox
    saturated: bool
    subsum_mode: str = "all"
    coordinate_bound: int | None = None

    def counts(self) -> tuple[int, ...]:
        return (self.u, self.V, self.V_star, self.collisions, self.p_classes, self.p_classes_star)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["box"] = list(self.box.radius)
        return d


def subsum_ok(terms: Sequence[Element], proper_only: bool = False) -> bool:
    """No nonempty subset of ``terms`` sums to zero.

    With ``proper_only`` the full sum is allowed to vanish.
    """
    if not terms:
        return True
    sums: list[Element] = []
    last = len(terms) - 1
    for k, t in enumerate(terms):
        new = [t] + [x + t for x in sums]
        for j, x in enumerate(new):
            if x.is_zero():
                # the full sum is the last entry created in the last round
                if proper_only and k == last and j == len(new) - 1:
                    continue
                return False
        sums.extend(new)
    return True


_UNIT_CACHE: dict = {}


def box_units(group: SUnitGroup, box: ExponentBox) -> list[Element]:
    """Every zeta^j * prod(basis_i^k_i) with |k_i| <= r_i, in a fixed order."""
    if len(box.radius) != len(group.basis):
        raise ValueError(f"box has {len(box.radius)} radii but the basis has {len(group.basis)} elements")
    key = (id(group), box.radius)
    hit = _UNIT_CACHE.get(key)
    if hit is not None and hit[0] is group:
        return hit[1]
    powers = []
    for u, r in zip(group.basis, box.radius):
        powers.append([u**k for k in range(-r, r + 1)])
    out = []
    for zeta in group.torsion:
        for combo in itertools.product(*powers):
            x = zeta
            for y in combo:
                x = x * y
            out.append(x)
    if len(_UNIT_CACHE) > 64:
        _UNIT_CACHE.clear()
    _UNIT_CACHE[key] = (group, out)
    return out


def _norm_le(x: Element, q: int, group: SUnitGroup) -> bool:
    if x.is_zero():
        return True
    return s_norm(x, group.places) <= q


def everest_count(
    c: Sequence[Element],
    q: int,
    box: ExponentBox,
    group: SUnitGroup,
    proper_only: bool = False,
) -> int:
    """Number of (1 : eps_2 : ... : eps_n), eps_i in the box, with
    N_S(sum c_i eps_i) <= q and no vanishing subsum of the c_i eps_i."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if any(x.is_zero() for x in c):
        raise FieldError("coefficients must be nonzero")
    units = box_units(group, box)
    scaled = [[ci * e for e in units] for ci in c[1:]]
    count = 0
    for tail in itertools.product(*scaled):
        terms = (c[0],) + tail
        if not subsum_ok(terms, proper_only):
            continue
        total = terms[0]
        for t in tail:
            total = total + t
        if _norm_le(total, q, group):
            count += 1
    return count


def enumerate_V(
    inventory: IdealInventory,
    n: int,
    q: int,
    box: ExponentBox,
    proper_only: bool = False,
) -> list[SumTuple]:
    """All (c_1 eps_1 : ... : c_n eps_n) with c in G(m)^n, eps_1 = 1 and
    eps_2..eps_n in the box, kept when the subsum and N_S <= q tests pass."""
    if n < 1:
        raise ValueError("n must be positive")
    group = inventory.group
    units = box_units(group, box)
    one = group.field.one
    out = []
    for cs in itertools.product(inventory.generators, repeat=n):
        scaled = [[(e, ci * e) for e in units] for ci in cs[1:]]
        for tail in itertools.product(*scaled):
            terms = (cs[0],) + tuple(t for _, t in tail)
            if not subsum_ok(terms, proper_only):
                continue
            total = terms[0]
            for t in terms[1:]:
                total = total + t
            if not _norm_le(total, q, group):
                continue
            cls = None if total.is_zero() else AssocClass(group.canonical(total))
            eps = ProjectiveUnitTuple((one,) + tuple(e for e, _ in tail))
            out.append(SumTuple(tuple(cs), eps, total, cls))
    return out


def fixing_permutation(terms: Sequence[Element]):
    """(perm, lam) for the first non-identity perm with terms[perm[i]] == lam * terms[i]
    for all i, or None when the orbit under coordinate permutations has n! elements."""
    n = len(terms)
    for perm in itertools.permutations(range(n)):
        if all(i == j for i, j in enumerate(perm)):
            continue
        lam = terms[perm[0]] / terms[0]
        if all(terms[perm[i]] == lam * terms[i] for i in range(1, n)):
            return perm, lam
    return None


def enumerate_V_star(V: Iterable[SumTuple]) -> list[SumTuple]:
    return [t for t in V if fixing_permutation(t.terms) is None]


def _projective_key(terms: Sequence[Element]) -> tuple:
    t0 = terms[0]
    return tuple((t / t0).key() for t in terms[1:])


def _orbit_key(terms: Sequence[Element]) -> tuple:
    return min(_projective_key([terms[i] for i in perm]) for perm in itertools.permutations(range(len(terms))))


def _tally(tuples: Sequence[Sequence[Element]], classes: Sequence[AssocClass | None]):
    """(u, |V|, |V*|, collisions, orbits in V, orbits in V*) from raw term tuples."""
    u = len({c.representative for c in classes if c is not None})
    orbit = [_orbit_key(t) for t in tuples]
    star = [fixing_permutation(t) is None for t in tuples]
    by_class: dict[Element, set] = {}
    for o, c, st in zip(orbit, classes, star):
        if st and c is not None:
            by_class.setdefault(c.representative, set()).add(o)
    collisions = sum(
        1
        for o, c, st in zip(orbit, classes, star)
        if st and c is not None and len(by_class[c.representative]) > 1
    )
    orbits_star = len({o for o, st in zip(orbit, star) if st})
    return u, len(tuples), sum(star), collisions, len(set(orbit)), orbits_star


def count_u(
    V_star: Sequence[SumTuple], V: Sequence[SumTuple], q: int = 0, n: int = 0, m: int = 0
) -> CensusResult:
    """u over all of V, plus the permutation-orbit diagnostics over V*."""
    u, nV, nstar, coll, orbits, orbits_star = _tally([t.terms for t in V], [t.sum_class for t in V])
    if nstar != len(V_star):
        raise ValueError("V_star does not match V")
    return CensusResult(
        q=q, n=n, m=m, u=u, V=nV, V_star=nstar, collisions=coll, w=None,
        p_classes=orbits, p_classes_star=orbits_star,
        box=ExponentBox(()), saturated=False,
    )


def sum_tuple_from_terms(inventory: IdealInventory, terms: Sequence[Element]) -> SumTuple:
    """Decompose alpha_i = g(alpha_i) eps_i and normalize eps_1 = 1."""
    pairs = [generator_of(inventory, a) for a in terms]
    e1 = pairs[0][1]
    units = tuple(e / e1 for _, e in pairs)
    total = sum((a for a in terms[1:]), terms[0]) / e1
    cls = None if total.is_zero() else AssocClass(inventory.group.canonical(total))
    return SumTuple(tuple(g for g, _ in pairs), ProjectiveUnitTuple(units), total, cls)


def _raw_elements(group: SUnitGroup, m: int, bound: int) -> list[Element]:
    K, S = group.field, group.places
    if not S.finite:
        return list(integral_elements(K, m, bound, bound))
    out = []
    if K.is_rational:
        cand = (K.one * a for a in range(-bound, bound + 1) if a)
    else:
        w = K.ring_generator
        cand = (
            K.one * x + w * y
            for y in range(-bound, bound + 1)
            for x in range(-bound, bound + 1)
            if x or y
        )
    for x in cand:
        if s_norm(x, S) <= m:
            out.append(x)
    return out


def _oracle_once(group, n, m, q, bound, proper_only):
    raw = _raw_elements(group, m, bound)
    scale = {}
    for a in raw:
        scale[a] = group.canonical(a) / a
    found: dict[tuple, tuple[Element, ...]] = {}
    for tup in itertools.product(raw, repeat=n):
        if not subsum_ok(tup, proper_only):
            continue
        total = tup[0]
        for t in tup[1:]:
            total = total + t
        if not _norm_le(total, q, group):
            continue
        eta = scale[tup[0]]
        canon = tuple(t * eta for t in tup)
        key = tuple(t.key() for t in canon)
        if key not in found:
            found[key] = canon
    tuples = [found[k] for k in sorted(found)]
    classes = []
    for t in tuples:
        total = t[0]
        for x in t[1:]:
            total = total + x
        classes.append(None if total.is_zero() else AssocClass(group.canonical(total)))
    return _tally(tuples, classes)


def brute_force_oracle(
    group: SUnitGroup,
    n: int,
    m: int,
    q: int,
    coordinate_bound: int,
    proper_only: bool = False,
    cap: int = 1024,
) -> CensusResult:
    """Counts from raw elements x + y*omega of O_K with |x|, |y| <= bound.

    Tuples are deduplicated by scaling with the unit that canonicalizes their
    first entry; no ideal generators or exponent boxes are involved.

    Coordinates of eps^k grow like C^|k|, so doubling the coordinate bound
    only adds a constant to the exponents it reaches.  The bound is squared
    between rounds instead, which doubles the reachable exponents and keeps
    the stopping rule comparable with the exponent-box doubling.
    """
    sat, bound, counts = saturation_check(
        lambda b: _oracle_once(group, n, m, q, b, proper_only), coordinate_bound, cap,
        grow=lambda b: max(2, b * b),
    )
    u, nV, nstar, coll, orbits, orbits_star = counts
    return CensusResult(
        q=q, n=n, m=m, u=u, V=nV, V_star=nstar, collisions=coll, w=None,
        p_classes=orbits, p_classes_star=orbits_star,
        box=ExponentBox(()), saturated=sat,
        subsum_mode="proper" if proper_only else "all", coordinate_bound=bound,
    )


def saturation_check(counter: Callable, box, cap: int, grow: Callable | None = None):
    """Double ``box`` until two consecutive ``counter`` values agree.

    ``box`` is an ExponentBox or an integer bound; ``grow`` overrides the
    doubling step.  Returns ``(saturated, final_box, value)``; saturated is
    False when the next step would exceed ``cap``.
    """
    if grow is None:
        def grow(b):
            return b.doubled() if isinstance(b, ExponentBox) else max(1, 2 * b)

    def size(b):
        return b.max_radius if isinstance(b, ExponentBox) else b

    value = counter(box)
    while True:
        nxt = grow(box)
        if size(nxt) > cap or nxt == box:
            return nxt == box, box, value
        new = counter(nxt)
        if new == value:
            return True, nxt, new
        box, value = nxt, new


def run_census(
    inventory: IdealInventory,
    n: int,
    q: int,
    box: ExponentBox,
    cap: int = 256,
    proper_only: bool = False,
) -> CensusResult:
    """Structured census with saturation over the exponent box."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    group = inventory.group
    if q == 0:
        return CensusResult(q, n, inventory.m, 0, 0, 0, 0, 0, 0, 0, box, True,
                            "proper" if proper_only else "all")

    def counter(b):
        V = enumerate_V(inventory, n, q, b, proper_only)
        return count_u(enumerate_V_star(V), V).counts()

    sat, final, counts = saturation_check(counter, box, cap)
    u, nV, nstar, coll, orbits, orbits_star = counts
    w = everest_count((group.field.one,) * n, q, final, group, proper_only)
    return CensusResult(
        q=q, n=n, m=inventory.m, u=u, V=nV, V_star=nstar, collisions=coll, w=w,
        p_classes=orbits, p_classes_star=orbits_star, box=final, saturated=sat,
        subsum_mode="proper" if proper_only else "all",
    )
