"""Shared fixtures: the deterministic instance corpus and per-instance bundles.

The corpus is 200 seeded random DNFs (n between 4 and 8, up to 6 terms,
width at most 4, read unconstrained) plus the two smallest tribes
instances.  Bundles carry the per-instance objects the heavier suites
share: truth table, spectrum, restriction tables, and the family analysis
at d_max = 4.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import pytest

from dnf_fourier import (
    BooleanFunction,
    Dnf,
    FamilyAnalysis,
    FourierSpectrum,
    RestrictionTables,
    fourier_transform,
    random_read_k,
    tribes,
)

CORPUS_D_MAX = 4


def corpus_instances() -> list[tuple[str, Dnf]]:
    out: list[tuple[str, Dnf]] = []
    for i in range(200):
        n = 4 + (i % 5)
        s = 1 + (i % 6)
        w = 1 + (i % 4)
        dnf = random_read_k(n=n, s=s, w=w, k=s, seed=1000 + i)
        out.append((f"random[{i}]", dnf))
    out.append(("tribes(2,2)", tribes(2, 2)))
    out.append(("tribes(2,3)", tribes(2, 3)))
    return out


@dataclass
class Bundle:
    label: str
    dnf: Dnf
    f: BooleanFunction
    spec: FourierSpectrum
    tables: RestrictionTables
    analysis: FamilyAnalysis


@functools.lru_cache(maxsize=1)
def corpus_bundles() -> tuple[Bundle, ...]:
    bundles = []
    for label, dnf in corpus_instances():
        f = dnf.evaluate()
        spec = fourier_transform(f)
        tables = RestrictionTables(f)
        analysis = FamilyAnalysis(dnf, CORPUS_D_MAX, tables, spec)
        bundles.append(Bundle(label, dnf, f, spec, tables, analysis))
    return tuple(bundles)


@pytest.fixture(scope="session")
def corpus():
    return corpus_instances()


@pytest.fixture(scope="session")
def bundles():
    return corpus_bundles()
