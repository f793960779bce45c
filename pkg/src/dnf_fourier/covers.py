"""Cover structure of variable subsets and the counting inequalities.

For a full-depth pair (S, x_Sbar) the encoder selects a set of terms, the
*cover*, whose variable union has some size u.  Grouping subsets S by the
most frequent union size of their covers partitions the interesting
subsets into families keyed by (d, u) = (|S|, typical union size).  This
module classifies subsets into those families and machine-checks, with
exact arithmetic, every inequality that relates

* Fourier 1-norms and 2-norms of a family,
* the probability of a full-depth restriction with a given union size,
* and the number of ways S can be covered by terms at all.

A cover of S counted by ``num_covers`` is a set of term indices such that
every selected term shares a variable with S, the union of their variable
sets contains S and has size exactly u, and at most |S| terms are used.
Covers produced by the encoder satisfy all of these (each selected term
contains a free variable), so ``num_covers`` dominates the number of
distinct observed covers, which is what the probability bounds need.
The empty set has the single empty cover, with union size 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .bitops import pdep
from .boolfn import (
    BooleanFunction,
    CapExceededError,
    FourierSpectrum,
    fourier_transform,
    popcount_table,
)
from .dnf import Dnf
from .dyadic import DyadicRational
from .enclosures import RealEnclosure, decide_le, exp_enclosure, ln_enclosure
from .encoder import extract_cover
from .restrictions import DT_CAP, RestrictionTables

#: Soft cap on the number of term subsets a cover enumeration may visit.
COVER_ENUM_CAP = 10_000_000


@dataclass(frozen=True, slots=True)
class FamilyKey:
    d: int
    u: int


@dataclass(slots=True)
class FamilyStats:
    """Aggregates over every subset assigned to one (d, u) family."""

    key: FamilyKey
    members: list[int] = field(default_factory=list)
    one_norm: DyadicRational = DyadicRational(0)
    two_norm_sq: DyadicRational = DyadicRational(0)
    max_abs_coeff: DyadicRational = DyadicRational(0)
    max_num_covers: int = 0


@dataclass(slots=True)
class SubsetProfile:
    """Witness statistics for one subset S with at least one full-depth pair."""

    mask: int
    d: int
    coeff: DyadicRational
    witnesses: int  # number of full-depth fixed-side assignments
    count_by_u: dict[int, int]
    covers_by_u: dict[int, set[tuple[int, ...]]]
    assigned_u: int  # the family key: most frequent u, ties to smallest


class FamilyAnalysis:
    """The family partition of all subsets up to size d_max, plus raw counts."""

    def __init__(
        self,
        dnf: Dnf,
        d_max: int,
        tables: RestrictionTables | None = None,
        spec: FourierSpectrum | None = None,
    ):
        if d_max > DT_CAP:
            raise CapExceededError(f"d_max={d_max} exceeds decision-tree cap {DT_CAP}")
        self.dnf = dnf
        self.d_max = min(d_max, dnf.n)
        self.f: BooleanFunction = tables.f if tables is not None else dnf.evaluate()
        self.tables = tables or RestrictionTables(self.f)
        self.spec = spec or fourier_transform(self.f)
        self.families: dict[FamilyKey, FamilyStats] = {}
        self.profiles: dict[int, SubsetProfile] = {}
        self.unassigned: list[int] = []  # no full-depth witness; coefficient is 0
        self._classify()

    def _classify(self) -> None:
        n = self.dnf.n
        full = (1 << n) - 1
        for s_mask in range(1 << n):
            d = s_mask.bit_count()
            if d > self.d_max:
                continue
            idxs = self.tables.full_depth_sbar_indices(s_mask)
            coeff = self.spec.coeff(s_mask)
            if idxs.size == 0:
                if coeff.numerator != 0:
                    raise AssertionError(
                        f"nonzero coefficient without a full-depth witness: {s_mask:#x}"
                    )
                self.unassigned.append(s_mask)
                continue
            fixed_mask = full ^ s_mask
            count_by_u: dict[int, int] = {}
            covers_by_u: dict[int, set[tuple[int, ...]]] = {}
            for idx in idxs:
                xsbar = pdep(int(idx), fixed_mask)
                cover = extract_cover(self.dnf, s_mask, xsbar, self.tables)
                u = cover.union_size
                count_by_u[u] = count_by_u.get(u, 0) + 1
                covers_by_u.setdefault(u, set()).add(cover.term_indices)
            top = max(count_by_u.values())
            assigned_u = min(u for u, cnt in count_by_u.items() if cnt == top)
            profile = SubsetProfile(
                s_mask, d, coeff, int(idxs.size), count_by_u, covers_by_u, assigned_u
            )
            self.profiles[s_mask] = profile
            key = FamilyKey(d, assigned_u)
            stats = self.families.get(key)
            if stats is None:
                stats = FamilyStats(key)
                self.families[key] = stats
            stats.members.append(s_mask)
            stats.one_norm = stats.one_norm + abs(coeff)
            stats.two_norm_sq = stats.two_norm_sq + coeff.square()
            if abs(coeff) > stats.max_abs_coeff:
                stats.max_abs_coeff = abs(coeff)
            nc = num_covers(self.dnf, s_mask, assigned_u)
            if nc > stats.max_num_covers:
                stats.max_num_covers = nc

    # -- raw counts ----------------------------------------------------------

    def pair_count(self, d: int, u: int) -> int:
        """Number of full-depth pairs with |S| = d and union size u."""
        self._check_degree(d)
        return sum(
            p.count_by_u.get(u, 0) for p in self.profiles.values() if p.d == d
        )

    def pair_count_at_degree(self, d: int) -> int:
        """Number of full-depth pairs with |S| = d."""
        self._check_degree(d)
        return sum(p.witnesses for p in self.profiles.values() if p.d == d)

    def _check_degree(self, d: int) -> None:
        if d > self.d_max:
            raise CapExceededError(f"degree {d} beyond analyzed d_max={self.d_max}")

    def tail_weight(self, u_cutoff: int) -> DyadicRational:
        """Exact Fourier weight outside the union of families with u <= cutoff
        (and d <= d_max)."""
        inside = DyadicRational(0)
        for key, stats in self.families.items():
            if key.u <= u_cutoff:
                inside = inside + stats.two_norm_sq
        return self.spec.total_weight() - inside

    def max_union_size(self) -> int:
        return max((key.u for key in self.families), default=0)


def classify_families(dnf: Dnf, d_max: int) -> dict[FamilyKey, FamilyStats]:
    """Assign every subset of size <= d_max with a full-depth witness to its
    (d, most-frequent-union-size) family; ties go to the smaller union size."""
    return FamilyAnalysis(dnf, d_max).families


# -- cover counting ----------------------------------------------------------


def _covering_candidates(dnf: Dnf, s_mask: int) -> list[int]:
    return [j for j, t in enumerate(dnf.terms) if t.vars_mask & s_mask]


def cover_counts_by_union(dnf: Dnf, s_mask: int) -> dict[int, int]:
    """Number of covers of S per union size, by exhaustive enumeration over
    term subsets of size at most |S| whose members all meet S."""
    d = s_mask.bit_count()
    cands = _covering_candidates(dnf, s_mask)
    work = sum(comb(len(cands), i) for i in range(min(d, len(cands)) + 1))
    if work > COVER_ENUM_CAP:
        raise CapExceededError(f"cover enumeration would visit {work} subsets")
    counts: dict[int, int] = {}
    for size in range(min(d, len(cands)) + 1):
        for combo in combinations(cands, size):
            union = 0
            for j in combo:
                union |= dnf.terms[j].vars_mask
            if s_mask & ~union:
                continue
            u = union.bit_count()
            counts[u] = counts.get(u, 0) + 1
    return counts


def num_covers(dnf: Dnf, s_mask: int, u: int) -> int:
    """Covers of S with union size exactly u (see the module docstring)."""
    return cover_counts_by_union(dnf, s_mask).get(u, 0)


def num_covers_total(dnf: Dnf, s_mask: int) -> int:
    """Covers of S of any union size."""
    return sum(cover_counts_by_union(dnf, s_mask).values())


# -- check results -----------------------------------------------------------


@dataclass(slots=True)
class CheckResult:
    """One verified inequality: lhs <= bound, with optional extra detail.

    Unpacks as the (lhs, bound, holds) triple.
    """

    lhs: object
    bound: object
    holds: bool
    extras: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.lhs, self.bound, self.holds))


# -- degree-level counting checks --------------------------------------------


def onenorm_count_check(
    dnf: Dnf, d: int, analysis: FamilyAnalysis
) -> CheckResult:
    """1-norm at degree d against the density of full-depth pairs:
    sum of |fhat(S)| over |S|=d  <=  2^-(n-d) * #pairs."""
    n = dnf.n
    sel = popcount_table(n) == d
    lhs = DyadicRational(int(np.sum(np.abs(analysis.spec.scaled[sel]))), n)
    pairs = analysis.pair_count_at_degree(d)
    bound = DyadicRational(pairs, n - d)
    return CheckResult(lhs, bound, lhs <= bound, {"pairs": pairs})


def onenorm_width_binom_check(
    dnf: Dnf, d: int, analysis: FamilyAnalysis
) -> CheckResult:
    """1-norm at degree d against the binomial bound C(w*d, d) * 2^(2d)."""
    n = dnf.n
    w = dnf.width()
    sel = popcount_table(n) == d
    lhs = DyadicRational(int(np.sum(np.abs(analysis.spec.scaled[sel]))), n)
    bound = comb(w * d, d) << (2 * d)
    return CheckResult(lhs, DyadicRational(bound), lhs <= DyadicRational(bound))


def pair_count_binom_check(
    dnf: Dnf, d: int, analysis: FamilyAnalysis
) -> CheckResult:
    """Injectivity consequence: the number of full-depth pairs at degree d
    is at most 2^n * C(w*d, d) * 2^d (x_sat choices * sigma choices * a)."""
    w = dnf.width()
    count = analysis.pair_count_at_degree(d)
    bound = comb(w * d, d) << (dnf.n + d)
    return CheckResult(count, bound, count <= bound)


# -- family-level checks -----------------------------------------------------


def family_onenorm_count_check(
    dnf: Dnf, d: int, u: int, analysis: FamilyAnalysis
) -> CheckResult:
    """Family 1-norm against the pair count at (d, u):
    sum over the family of |fhat| <= (wd+1) * 2^-(n-d) * #pairs(d, u)."""
    n, w = dnf.n, dnf.width()
    stats = analysis.families.get(FamilyKey(d, u))
    lhs = stats.one_norm if stats else DyadicRational(0)
    pairs = analysis.pair_count(d, u)
    bound = DyadicRational((w * d + 1) * pairs, n - d)
    return CheckResult(lhs, bound, lhs <= bound, {"pairs": pairs})


def check_onenorm_u(
    dnf: Dnf, d: int, u: int, analysis: FamilyAnalysis | None = None
) -> CheckResult:
    """Family 1-norm bound: sum of |fhat(S)| over the (d, u) family is at
    most (wd+1) * C(u, d) * 2^(2d)."""
    analysis = analysis or FamilyAnalysis(dnf, d)
    w = dnf.width()
    stats = analysis.families.get(FamilyKey(d, u))
    lhs = stats.one_norm if stats else DyadicRational(0)
    bound = DyadicRational((w * d + 1) * comb(u, d) << (2 * d))
    return CheckResult(lhs, bound, lhs <= bound)


def check_abs_fourier_u(
    dnf: Dnf, s_mask: int, analysis: FamilyAnalysis | None = None
) -> CheckResult:
    """Per-subset chain at S's own family key (d, u):

      |fhat(S)|  <=  (wd+1) * Pr[full depth and union size u],
      Pr[...]    <=  2^-(u-d) * #distinct covers  <=  2^-(u-d) * num_covers(S).

    holds is the conjunction; the pieces are in extras.
    """
    d = s_mask.bit_count()
    analysis = analysis or FamilyAnalysis(dnf, d)
    n, w = dnf.n, dnf.width()
    profile = analysis.profiles.get(s_mask)
    if profile is None:
        zero = DyadicRational(0)
        return CheckResult(zero, zero, True, {"witnesses": 0})
    u = profile.assigned_u
    prob = DyadicRational(profile.count_by_u.get(u, 0), n - d)
    lhs = abs(profile.coeff)
    first_bound = (w * d + 1) * prob
    first = lhs <= first_bound
    distinct = len(profile.covers_by_u.get(u, ()))
    ncov = num_covers(dnf, s_mask, u)
    scale = DyadicRational(1, u - d)
    second_bound_distinct = distinct * scale
    second_bound_ncov = ncov * scale
    second = prob <= second_bound_distinct
    third = second_bound_distinct <= second_bound_ncov and prob <= second_bound_ncov
    return CheckResult(
        lhs,
        first_bound,
        first and second and third,
        {
            "u": u,
            "prob": prob,
            "distinct_covers": distinct,
            "num_covers": ncov,
            "prob_le_distinct": second,
            "prob_le_num_covers": third,
        },
    )


def check_twonorm_u(
    dnf: Dnf, d: int, u: int, analysis: FamilyAnalysis | None = None
) -> CheckResult:
    """Family weight bound: sum of fhat(S)^2 over the (d, u) family is at
    most (wd+1)^2 * C(u, d) * 2^(3d) * 2^-u * max num_covers."""
    analysis = analysis or FamilyAnalysis(dnf, d)
    w = dnf.width()
    stats = analysis.families.get(FamilyKey(d, u))
    if stats is None:
        zero = DyadicRational(0)
        return CheckResult(zero, zero, True, {"empty": True})
    lhs = stats.two_norm_sq
    bound = DyadicRational(
        (w * d + 1) ** 2 * comb(u, d) * stats.max_num_covers << (3 * d), u
    )
    return CheckResult(lhs, bound, lhs <= bound, {"max_num_covers": stats.max_num_covers})


def family_cauchy_check(stats: FamilyStats) -> CheckResult:
    """Within a family, the weight never exceeds 1-norm times peak magnitude."""
    lhs = stats.two_norm_sq
    bound = stats.one_norm * stats.max_abs_coeff
    return CheckResult(lhs, bound, lhs <= bound)


# -- cover-count bounds from the read number ----------------------------------


def read_cover_count_bound(dnf: Dnf, s_mask: int) -> CheckResult:
    """Total covers of S against the read-based budget:

      num_covers_total(S)  <=  sum_{i<=d} C(kd, i)  <=  C(kd+d, d)
                           <=  (e(k+1))^d.

    The first inequality is the asserted bound; the rest of the chain is
    verified too (the last link rigorously, via an enclosure of e^d).
    """
    d = s_mask.bit_count()
    k = dnf.read()
    count = num_covers_total(dnf, s_mask)
    bound = sum(comb(k * d, i) for i in range(d + 1))
    mid = comb(k * d + d, d)
    chain1 = bound <= mid
    target = Fraction(mid, (k + 1) ** d)
    chain2, enc = decide_le(target, lambda p: exp_enclosure(Fraction(d), p))
    return CheckResult(
        count,
        bound,
        count <= bound,
        {
            "chain_mid": mid,
            "chain_mid_holds": chain1,
            "chain_top_holds": chain2,
            "e_pow_d": enc,
            "read": k,
        },
    )


def exact_width_cover_bound(dnf: Dnf, s_mask: int, u: int) -> CheckResult:
    """Cover count at union size u for exact-width DNFs.

    Requires every term to have exactly w variables.  A union of l such
    terms has total literal size lw and, with read k, at most ku of it, so
    l <= floor(ku/w) and

      num_covers(S, u)  <=  sum_{i <= floor(ku/w)} C(kd, i).

    When ku/w is an integer m, the classical chain
    C(kd, m) <= C(ku, m) <= (ew)^m is verified as well.
    """
    widths = {t.width for t in dnf.terms}
    if len(widths) > 1:
        raise ValueError(f"term widths are not uniform: {sorted(widths)}")
    d = s_mask.bit_count()
    k = dnf.read()
    count = num_covers(dnf, s_mask, u)
    if not widths or widths == {0}:
        bound = 1 if u == 0 else 0
        return CheckResult(count, bound, count <= bound, {"degenerate": True})
    w = widths.pop()
    l_cap = (k * u) // w
    bound = sum(comb(k * d, i) for i in range(l_cap + 1))
    extras: dict = {"l_cap": l_cap, "read": k, "width": w}
    if (k * u) % w == 0:
        # the classical chain at the integer point m = ku/w:
        # C(kd, m) <= C(ku, m) <= (ew)^m, decided via mid / w^m <= e^m
        m = k * u // w
        left, mid = comb(k * d, m), comb(k * u, m)
        extras["chain_mid"] = mid
        extras["chain_mid_holds"] = left <= mid
        holds_top, enc = decide_le(
            Fraction(mid, w**m), lambda p: exp_enclosure(Fraction(m), p)
        )
        extras["chain_top_holds"] = holds_top
        extras["e_pow_m"] = enc
    return CheckResult(count, bound, count <= bound, extras)


# -- satisfied-mass inequality and the set-size budget bound ------------------


def st_inequality_check(dnf: Dnf, f: BooleanFunction | None = None) -> CheckResult:
    """Sum of 2^-|T_j| over all terms against read * ln(1 / (1 - Pr[f])).

    Exact on the left; the right side is enclosed rigorously.  When f is
    constant true the right side is infinite and the check is vacuous.
    """
    f = f or dnf.evaluate()
    k = dnf.read()
    lhs = DyadicRational(0)
    for t in dnf.terms:
        lhs = lhs + DyadicRational(1, t.width)
    p = Fraction(f.ones, 1 << f.n)
    if p == 1:
        return CheckResult(lhs, None, True, {"vacuous": True, "pr": p})
    q = 1 / (1 - p)

    def make(prec: int) -> RealEnclosure:
        return ln_enclosure(q, prec).scale(k)

    holds, enc = decide_le(lhs.as_fraction(), make)
    return CheckResult(lhs, enc, holds, {"vacuous": False, "pr": p, "read": k})


class BudgetPreconditionError(ValueError):
    """budget_lemma_bound called with its hypotheses violated."""


def budget_lemma_bound(sizes, v, F) -> CheckResult:
    """Family-size budget: given sets of sizes |A_r| with sum of sizes <= v
    and sum of 2^-|A_r| <= F and v > F, the family has at most
    4v / log2(v/F) members.  The verdict is exact rational arithmetic:
    l * log2(v/F) <= 4v  iff  (v/F)^(l*b) <= 2^a with 4v = a/b.
    """
    sizes = list(sizes)
    v = Fraction(v)
    F = Fraction(F)
    if any(s < 0 for s in sizes):
        raise BudgetPreconditionError("negative set size")
    if sum(sizes) > v:
        raise BudgetPreconditionError(f"total size {sum(sizes)} exceeds budget v={v}")
    mass = sum(Fraction(1, 2**s) for s in sizes)
    if mass > F:
        raise BudgetPreconditionError(f"total mass {mass} exceeds budget F={F}")
    if not v > F:
        raise BudgetPreconditionError(f"need v > F, got v={v}, F={F}")
    l = len(sizes)
    four_v = 4 * v
    a, b = four_v.numerator, four_v.denominator
    holds = (v / F) ** (l * b) <= Fraction(2) ** a
    approx_bound = float(four_v) / math.log2(float(v / F))
    return CheckResult(l, approx_bound, holds, {"v": v, "F": F})
