"""Exact volume of {x in R^{ns} : g(x) < 1} and a Monte-Carlo cross-check.

g(x) = sum_k max(0, x_1k, ..., x_nk) + max(0, -sum_k x_1k, ..., -sum_k x_nk)

is the maximum of the linear forms obtained by picking one argument from each
of the s + 1 maxima, so the closed sublevel set is the polytope cut out by
those (n+1)^(s+1) halfspaces.  Vertices come from an exact double description
pass over integer homogeneous coordinates; the volume is the sum of simplex
volumes of a pulling triangulation coned from the origin.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "SublevelPolytope",
    "ExactVolume",
    "VolumeCapError",
    "build_halfspaces",
    "exact_volume",
    "mc_volume",
    "c_constant",
    "g_value",
    "DEFAULT_CAP",
]

log = logging.getLogger(__name__)

DEFAULT_CAP = 6


class VolumeCapError(ValueError):
    """Dimension above the configured cap; use mc_volume instead."""


@dataclass
class SublevelPolytope:
    n: int
    s: int
    halfspaces: list[tuple[int, ...]]
    vertices: list[tuple[Fraction, ...]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.n * self.s

    def normals(self) -> set[tuple[int, ...]]:
        return set(self.halfspaces)


@dataclass(frozen=True)
class ExactVolume:
    value: Fraction

    def __str__(self):
        return f"{self.value.numerator}/{self.value.denominator}"


def _index(i: int, k: int, s: int) -> int:
    # coordinate x_{ik}, rows i = 1..n, columns k = 1..s
    return (i - 1) * s + (k - 1)


def build_halfspaces(n: int, s: int) -> SublevelPolytope:
    """Normals a with a.x <= 1, one per selection (j_0, ..., j_s), deduplicated."""
    if n < 1 or s < 1:
        raise ValueError("build_halfspaces needs n >= 1 and s >= 1")
    dim = n * s
    seen = set()
    out = []
    for sel in itertools.product(range(n + 1), repeat=s + 1):
        j0, rest = sel[0], sel[1:]
        a = [0] * dim
        for k, j in enumerate(rest, start=1):
            if j:
                a[_index(j, k, s)] += 1
        if j0:
            for k in range(1, s + 1):
                a[_index(j0, k, s)] -= 1
        a = tuple(a)
        if any(a) and a not in seen:
            seen.add(a)
            out.append(a)
    return SublevelPolytope(n, s, out)


def g_value(x, n: int, s: int):
    """Vectorised g on an array of shape (..., n*s)."""
    x = np.asarray(x, dtype=float).reshape(x.shape[:-1] + (n, s))
    pos = np.maximum(0.0, x.max(axis=-2)).sum(axis=-1)
    neg = np.maximum(0.0, (-x.sum(axis=-1)).max(axis=-1))
    return pos + neg


# ---------------------------------------------------------------------------
# exact integer linear algebra


def _rank(rows: list[list[int]]) -> int:
    """Rank via fraction-free elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][c]:
                f = m[r][c]
                m[r] = [p[c] * m[r][j] - f * p[j] for j in range(ncols)]
        rank += 1
        if rank == len(m):
            break
    return rank


def _det(rows: list[list[int]]) -> int:
    """Bareiss determinant of an integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _solve_inverse_columns(H: list[list[int]]) -> list[list[int]]:
    """Integer vectors r_j with H r_j = c_j e_j (c_j > 0): the columns of H^-1, scaled."""
    n = len(H)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(H)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    cols = []
    for j in range(n):
        col = [aug[i][n + j] for i in range(n)]
        den = math.lcm(*(x.denominator for x in col))
        ints = [int(x * den) for x in col]
        g = math.gcd(*ints)
        cols.append([x // g for x in ints])
    return cols


def _normalize(v: list[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _vertices(halfspaces: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Vertices of {a.x <= 1}, as primitive integer vectors (x*t, t) with t > 0.

    Double description on the cone {(x, t) : t - a.x >= 0, t >= 0}.
    """
    rows = [list(-c for c in a) + [1] for a in halfspaces]
    rows.append([0] * dim + [1])
    N = dim + 1
    # initial basis of N independent rows, the t >= 0 row first
    chosen = [len(rows) - 1]
    for i in range(len(rows) - 1):
        if len(chosen) == N:
            break
        if _rank([rows[j] for j in chosen] + [rows[i]]) > len(chosen):
            chosen.append(i)
    if len(chosen) < N:
        raise ValueError("halfspaces do not define a bounded full-dimensional polytope")
    cols = _solve_inverse_columns([rows[i] for i in chosen])
    rays: list[tuple[int, ...]] = [tuple(c) for c in cols]
    zeros: list[int] = []
    for r in rays:
        z = 0
        for bit, i in enumerate(chosen):
            if sum(x * y for x, y in zip(rows[i], r)) == 0:
                z |= 1 << i
        zeros.append(z)
    done = set(chosen)
    for i, h in enumerate(rows):
        if i in done:
            continue
        vals = [sum(x * y for x, y in zip(h, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zer]
        new_zeros = [zeros[k] for k in pos] + [zeros[k] | (1 << i) for k in zer]
        if neg:
            for p in pos:
                for q in neg:
                    common = zeros[p] & zeros[q]
                    if bin(common).count("1") < N - 2:
                        continue
                    if any(
                        k != p and k != q and (zeros[k] & common) == common
                        for k in range(len(rays))
                    ):
                        continue
                    vp, vq = vals[p], vals[q]
                    r = [vp * b - vq * a for a, b in zip(rays[p], rays[q])]
                    new_rays.append(_normalize(r))
                    new_zeros.append(common | (1 << i))
        rays, zeros = new_rays, new_zeros
        done.add(i)
    out = []
    for r in rays:
        if r[-1] <= 0:
            raise ValueError("unbounded direction found; polytope is not bounded")
        out.append(r)
    return sorted(set(out))


def _pulling_simplices(verts, tight, dim):
    """Simplices (vertex index tuples) triangulating every facet of the polytope."""
    cache: dict[frozenset, list[tuple[int, ...]]] = {}
    rank_cache: dict[frozenset, int] = {}

    def affine_dim(face: frozenset) -> int:
        if face not in rank_cache:
            rank_cache[face] = _rank([list(verts[v]) for v in sorted(face)]) - 1
        return rank_cache[face]

    def subfaces(face: frozenset, fdim: int):
        found = set()
        for t in tight:
            g = face & t
            if g == face or len(g) < fdim or g in found:
                continue
            if affine_dim(g) == fdim - 1:
                found.add(g)
        return found

    def tri(face: frozenset, fdim: int):
        if face in cache:
            return cache[face]
        if fdim == 0:
            res = [(next(iter(face)),)]
        else:
            apex = min(face)
            res = []
            for g in subfaces(face, fdim):
                if apex in g:
                    continue
                res.extend((apex,) + simp for simp in tri(g, fdim - 1))
        cache[face] = res
        return res

    facets = {t for t in tight if len(t) >= dim and affine_dim(t) == dim - 1}
    simplices = []
    for f in sorted(facets, key=sorted):
        simplices.extend(tri(f, dim - 1))
    return simplices


def exact_volume(p: SublevelPolytope, cap: int = DEFAULT_CAP) -> ExactVolume:
    """Exact rational volume; fills ``p.vertices``."""
    dim = p.dimension
    if dim > cap:
        raise VolumeCapError(
            f"dimension {dim} exceeds the exact-volume cap {cap}; use mc_volume"
        )
    verts = _vertices(p.halfspaces, dim)
    p.vertices = [tuple(Fraction(c, v[-1]) for c in v[:-1]) for v in verts]
    tight = []
    for a in p.halfspaces:
        t = frozenset(
            k for k, v in enumerate(verts) if sum(x * y for x, y in zip(a, v[:-1])) == v[-1]
        )
        tight.append(t)
    total = Fraction(0)
    for simp in _pulling_simplices(verts, tight, dim):
        num = abs(_det([list(verts[k][:-1]) for k in simp]))
        den = math.prod(verts[k][-1] for k in simp)
        total += Fraction(num, den)
    value = total / math.factorial(dim)
    lower = Fraction(2**dim, math.factorial(dim))
    upper = Fraction(2**dim)
    if not lower <= value <= upper:
        raise ArithmeticError(f"c_{{{p.n},{p.s}}} = {value} violates [{lower}, {upper}]")
    if value in (lower, upper):
        log.warning("c_{%d,%d} = %s attains a bound of [%s, %s]", p.n, p.s, value, lower, upper)
    return ExactVolume(value)


def c_constant(n: int, s: int, cap: int = DEFAULT_CAP) -> Fraction:
    """c_{n,s}, with c_{0,s} = c_{n,0} = 1."""
    if n < 0 or s < 0:
        raise ValueError("n and s must be nonnegative")
    if n == 0 or s == 0:
        return Fraction(1)
    return exact_volume(build_halfspaces(n, s), cap).value


def mc_volume(
    p: SublevelPolytope, samples: int, seed: int, substreams: int = 8, chunk: int = 250_000
) -> tuple[float, float]:
    """Hit-or-miss estimate over [-1, 1]^{ns} and its binomial standard error.

    The sample count is split across ``substreams`` independent generators
    spawned from ``seed``; the triple (seed, samples, substreams) fixes the output.
    """
    if samples < 10_000:
        raise ValueError("mc_volume needs at least 10^4 samples")
    dim = p.dimension
    children = np.random.SeedSequence(seed).spawn(substreams)
    per = [samples // substreams + (1 if i < samples % substreams else 0) for i in range(substreams)]
    hits = 0
    for ss, count in zip(children, per):
        rng = np.random.default_rng(ss)
        left = count
        while left:
            k = min(chunk, left)
            x = rng.uniform(-1.0, 1.0, size=(k, dim))
            hits += int(np.count_nonzero(g_value(x, p.n, p.s) < 1.0))
            left -= k
    box = 2.0**dim
    frac = hits / samples
    return box * frac, box * math.sqrt(frac * (1 - frac) / samples)
