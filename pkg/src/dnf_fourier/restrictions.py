"""Restrictions, exact decision-tree depth, and the evasiveness bound.

A restriction keeps a set S of variables free and fixes the rest to a
partial assignment; the restricted function lives on |S| variables with
the free variables renumbered ascending.  Fixed-side assignments are
always enumerated in ascending compressed-mask order (bit t of the
compressed index is the value of the t-th smallest fixed variable), so
per-assignment results are reproducible.

Decision-tree depth DT(g) is computed exactly by the textbook recursion
(0 for constants, else 1 + min over query variable of the max over its two
answers), memoized on the (n, truth table) pair.  The memo is a plain dict:
safe under the GIL, and per-process when work is farmed out to workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitops import bit_indices, pext_array
from .boolfn import (
    BooleanFunction,
    CapExceededError,
    DimensionMismatchError,
    FourierSpectrum,
    fourier_transform,
)
from .dnf import Dnf
from .dyadic import DyadicRational

#: Exact DT recursion is only run on functions of at most this many variables.
DT_CAP = 12

_DT_MEMO: dict[tuple[int, int], int] = {}


@dataclass(frozen=True, slots=True)
class Restriction:
    """Free-variable mask plus values for every fixed variable.

    ``fixed_bits`` holds the assignment of the complement of ``free_mask``
    (a set bit means true); bits at free positions must be zero.
    """

    n: int
    free_mask: int
    fixed_bits: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.free_mask & ~full:
            raise DimensionMismatchError("free variables beyond n")
        if self.fixed_bits & ~full or self.fixed_bits & self.free_mask:
            raise DimensionMismatchError("fixed assignment overlaps free variables")

    @property
    def fixed_mask(self) -> int:
        return ((1 << self.n) - 1) ^ self.free_mask


def _split(table: int, n: int, i: int) -> tuple[int, int]:
    """Tables of the two subfunctions fixing variable i+1 to false / true."""
    block = 1 << i
    ones = (1 << block) - 1
    t0 = t1 = 0
    for j in range(1 << (n - 1 - i)):
        t0 |= ((table >> (2 * j * block)) & ones) << (j * block)
        t1 |= ((table >> ((2 * j + 1) * block)) & ones) << (j * block)
    return t0, t1


def _dt(n: int, table: int) -> int:
    if table == 0 or table == (1 << (1 << n)) - 1:
        return 0
    key = (n, table)
    cached = _DT_MEMO.get(key)
    if cached is not None:
        return cached
    best = n
    for i in range(n):
        t0, t1 = _split(table, n, i)
        depth = 1 + max(_dt(n - 1, t0), _dt(n - 1, t1))
        if depth < best:
            best = depth
            if best == 1:
                break
    _DT_MEMO[key] = best
    return best


def dt_depth(g: BooleanFunction, cap: int = DT_CAP) -> int:
    """Exact decision-tree depth of g (g.n must not exceed the cap)."""
    if g.n > cap:
        raise CapExceededError(f"decision-tree recursion capped at n={cap}")
    return _dt(g.n, g.bits)


def restrict(f: BooleanFunction, r: Restriction) -> BooleanFunction:
    """The function of |S| variables obtained by fixing the complement of S.

    The free set must be nonempty: the result type represents functions of
    at least one variable.  (Depth queries for empty free sets go through
    RestrictionTables, where the answer is always 0.)
    """
    if r.n != f.n:
        raise DimensionMismatchError(f"restriction over n={r.n}, function n={f.n}")
    if r.free_mask == 0:
        raise ValueError("free set is empty; the restriction is a single value")
    if r.free_mask == (1 << f.n) - 1:
        return f
    free = bit_indices(r.free_mask)
    bits = 0
    for xs in range(1 << len(free)):
        x = r.fixed_bits
        for t, b in enumerate(free):
            if (xs >> t) & 1:
                x |= 1 << b
        bits |= f.value(x) << xs
    return BooleanFunction(len(free), bits)


class RestrictionTables:
    """Batch decision-tree-depth lookups for all restrictions of one function.

    For a free-variable mask S this computes, in one pass over the truth
    table, the DT depth of every restriction f_{S|x} indexed by the
    compressed fixed-side assignment, and caches the result.  It is the
    shared workhorse behind the evasiveness checks, the encoder, and the
    family classification.
    """

    def __init__(self, f: BooleanFunction, dt_cap: int = DT_CAP):
        self.f = f
        self.n = f.n
        self.dt_cap = dt_cap
        self._arr = f.to_array().reshape((2,) * f.n)
        self._by_sbar: dict[int, np.ndarray] = {}
        self._by_full: dict[int, np.ndarray] = {}

    def subtables(self, free_mask: int) -> np.ndarray:
        """Row r = truth table of f restricted to free_mask at compressed
        fixed assignment r; columns are compressed free assignments."""
        n = self.n
        free = bit_indices(free_mask)
        fixed = bit_indices(((1 << n) - 1) ^ free_mask)
        axes = [n - 1 - b for b in reversed(fixed)] + [n - 1 - b for b in reversed(free)]
        return self._arr.transpose(axes).reshape(1 << len(fixed), 1 << len(free))

    def dt_by_sbar(self, free_mask: int) -> np.ndarray:
        """DT depth of f_{S|x} for every compressed fixed assignment x."""
        cached = self._by_sbar.get(free_mask)
        if cached is not None:
            return cached
        d = free_mask.bit_count()
        if d > self.dt_cap:
            raise CapExceededError(f"|S|={d} exceeds decision-tree cap {self.dt_cap}")
        sub = self.subtables(free_mask)
        packed = np.packbits(sub, axis=1, bitorder="little")
        keys = [int.from_bytes(row.tobytes(), "little") for row in packed]
        uniq: dict[int, int] = {}
        out = np.empty(sub.shape[0], dtype=np.int8)
        for r, key in enumerate(keys):
            depth = uniq.get(key)
            if depth is None:
                depth = _dt(d, key)
                uniq[key] = depth
            out[r] = depth
        out.setflags(write=False)
        self._by_sbar[free_mask] = out
        return out

    def dt_by_full(self, free_mask: int) -> np.ndarray:
        """DT depth of f_{S|x} indexed by a full n-bit assignment x (the
        values of x on S are ignored)."""
        cached = self._by_full.get(free_mask)
        if cached is not None:
            return cached
        fixed_mask = ((1 << self.n) - 1) ^ free_mask
        out = self.dt_by_sbar(free_mask)[pext_array(self.n, fixed_mask)]
        out.setflags(write=False)
        self._by_full[free_mask] = out
        return out

    def dt_at(self, free_mask: int, x: int) -> int:
        """DT depth of the restriction to free_mask at (the relevant bits of) x."""
        return int(self.dt_by_full(free_mask)[x])

    def full_depth_sbar_indices(self, free_mask: int) -> np.ndarray:
        """Compressed fixed assignments where the restriction needs full depth."""
        return np.nonzero(self.dt_by_sbar(free_mask) == free_mask.bit_count())[0]

    def full_depth_count(self, free_mask: int) -> int:
        return int(self.full_depth_sbar_indices(free_mask).size)


def satisfied_union_table(dnf: Dnf) -> np.ndarray:
    """For every full assignment x, the mask of variables appearing in at
    least one term satisfied by x."""
    x = np.arange(1 << dnf.n, dtype=np.int64)
    union = np.zeros(1 << dnf.n, dtype=np.int64)
    for t in dnf.terms:
        sat = (x & t.vars_mask) == t.pos_mask
        union[sat] |= t.vars_mask
    union.setflags(write=False)
    return union


def evasive_bound_check(
    f: BooleanFunction,
    s_mask: int,
    tables: RestrictionTables | None = None,
    spec: FourierSpectrum | None = None,
) -> tuple[DyadicRational, DyadicRational, bool]:
    """Compare |fhat(S)| against the fraction of fixed-side assignments whose
    restriction requires full decision-tree depth |S|.

    Returns (lhs, rhs, lhs <= rhs), all exact.
    """
    tables = tables or RestrictionTables(f)
    spec = spec or fourier_transform(f)
    d = s_mask.bit_count()
    lhs = abs(spec.coeff(s_mask))
    rhs = DyadicRational(tables.full_depth_count(s_mask), f.n - d)
    return lhs, rhs, lhs <= rhs


def cover_probability_check(
    f_dnf: Dnf,
    s_mask: int,
    spec: FourierSpectrum | None = None,
    sat_union: np.ndarray | None = None,
) -> tuple[DyadicRational, DyadicRational, bool]:
    """Compare |fhat(S)| against 2^|S| times the probability that every
    variable of S lies in some term satisfied by a uniform input.

    Returns (lhs, rhs, lhs <= rhs), all exact.
    """
    spec = spec or fourier_transform(f_dnf.evaluate())
    if sat_union is None:
        sat_union = satisfied_union_table(f_dnf)
    d = s_mask.bit_count()
    lhs = abs(spec.coeff(s_mask))
    covered = int(np.count_nonzero((sat_union & s_mask) == s_mask))
    rhs = DyadicRational(covered << d, f_dnf.n)
    return lhs, rhs, lhs <= rhs
