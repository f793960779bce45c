"""Deterministic, seedable DNF instance families.

All randomness comes from SplitMix64, a fixed 64-bit counter-based mixer
(Steele, Lea and Flood's splittable generator).  It is implemented here in
a dozen lines of pure integer arithmetic so that a (parameters, seed) pair
produces byte-identical formulas on every platform and Python version;
no runtime default generator is involved anywhere.

Bounded draws use rejection below the largest multiple of the bound, so
they are unbiased and still deterministic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .boolfn import N_CAP
from .dnf import Dnf, Term


class GenerationError(ValueError):
    """The requested shape was not produced within the rejection budget."""


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The SplitMix64 mixer: state advances by a fixed odd constant and the
    output is a finalizing hash of the state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            z = self.next_u64()
            if z < limit:
                return z % bound

    def coin(self) -> bool:
        return bool(self.below(2))

    def sample(self, pool: list[int], count: int) -> list[int]:
        """count distinct elements of pool, order-insensitive draw."""
        pool = list(pool)
        out = []
        for _ in range(count):
            out.append(pool.pop(self.below(len(pool))))
        return out


def tribes(w: int, t: int) -> Dnf:
    """t disjoint all-positive terms of width exactly w, on n = w*t variables."""
    n = w * t
    if not 1 <= n <= N_CAP:
        raise GenerationError(f"tribes({w},{t}) needs n={n} <= {N_CAP}")
    terms = []
    for i in range(t):
        mask = ((1 << w) - 1) << (i * w)
        terms.append(Term(mask, 0))
    return Dnf(n, tuple(terms))


def random_read_k(
    n: int,
    s: int,
    w: int,
    k: int,
    exact_width: bool = False,
    seed: int = 0,
    budget: int = 10_000,
) -> Dnf:
    """s random terms of width <= w (= w when exact_width) with every
    variable in at most k terms; literal signs are fair coins.

    Terms are drawn one at a time against per-variable occupancy counters;
    if a term cannot be placed the whole instance is retried, up to
    ``budget`` attempts.
    """
    if not (n >= 1 and s >= 0 and w >= 1 and k >= 1):
        raise GenerationError("need n, w, k >= 1 and s >= 0")
    rng = SplitMix64(seed)
    for _ in range(budget):
        occupancy = [0] * (n + 1)
        terms: list[Term] = []
        ok = True
        for _ in range(s):
            width = w if exact_width else 1 + rng.below(w)
            available = [v for v in range(1, n + 1) if occupancy[v] < k]
            if len(available) < width:
                ok = False
                break
            chosen = rng.sample(available, width)
            pos = neg = 0
            for v in sorted(chosen):
                occupancy[v] += 1
                if rng.coin():
                    neg |= 1 << (v - 1)
                else:
                    pos |= 1 << (v - 1)
            terms.append(Term(pos, neg))
        if ok:
            dnf = Dnf(n, tuple(terms))
            _validate(dnf, s=s, w_max=w, k_max=k, w_exact=w if exact_width else None)
            return dnf
    raise GenerationError(
        f"no read-{k} instance with n={n}, s={s}, w={w} found in {budget} attempts"
    )


def dense_pool(n_terms: int, term_width: int, pool_size: int, seed: int = 0) -> Dnf:
    """n_terms random terms of width exactly term_width drawn from the first
    pool_size variables; the read is unconstrained and typically high."""
    if term_width > pool_size:
        raise GenerationError(
            f"term width {term_width} exceeds pool size {pool_size}"
        )
    if not 1 <= pool_size <= N_CAP:
        raise GenerationError(f"pool size {pool_size} outside [1, {N_CAP}]")
    rng = SplitMix64(seed)
    terms = []
    for _ in range(n_terms):
        chosen = rng.sample(list(range(1, pool_size + 1)), term_width)
        pos = neg = 0
        for v in sorted(chosen):
            if rng.coin():
                neg |= 1 << (v - 1)
            else:
                pos |= 1 << (v - 1)
        terms.append(Term(pos, neg))
    dnf = Dnf(pool_size, tuple(terms))
    _validate(dnf, s=n_terms, w_max=term_width, k_max=None, w_exact=term_width)
    return dnf


def _validate(dnf: Dnf, s: int, w_max: int, k_max: int | None, w_exact: int | None):
    size, width, read = dnf.metrics()
    if size != s:
        raise GenerationError(f"generated {size} terms, wanted {s}")
    if width > w_max:
        raise GenerationError(f"generated width {width} > {w_max}")
    if w_exact is not None and s > 0 and any(t.width != w_exact for t in dnf.terms):
        raise GenerationError(f"generated a term of width != {w_exact}")
    if k_max is not None and read > k_max:
        raise GenerationError(f"generated read {read} > {k_max}")


_FAMILIES = {"tribes", "random_read_k", "dense_pool"}


@dataclass(frozen=True, slots=True)
class GeneratorSpec:
    """A named family plus its parameters and seed; builds deterministically."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise GenerationError(
                f"unknown family {self.family!r}; choose from {sorted(_FAMILIES)}"
            )

    def build(self) -> Dnf:
        try:
            if self.family == "tribes":
                return tribes(int(self.params["w"]), int(self.params["t"]))
            if self.family == "random_read_k":
                return random_read_k(
                    n=int(self.params["n"]),
                    s=int(self.params["s"]),
                    w=int(self.params["w"]),
                    k=int(self.params["k"]),
                    exact_width=bool(self.params.get("exact_width", False)),
                    seed=self.seed,
                )
            return dense_pool(
                n_terms=int(self.params["n_terms"]),
                term_width=int(self.params["term_width"]),
                pool_size=int(self.params["pool_size"]),
                seed=self.seed,
            )
        except (KeyError, TypeError) as exc:
            raise GenerationError(
                f"{self.family} is missing or has a bad parameter: {exc}"
            ) from exc

    def label(self) -> str:
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.family}({inner},seed={self.seed})"

    def to_json(self) -> str:
        return json.dumps(
            {"family": self.family, "params": self.params, "seed": self.seed},
            sort_keys=True,
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorSpec":
        return cls(obj["family"], dict(obj.get("params", {})), int(obj.get("seed", 0)))
