"""DNF model: evaluation, metrics, truncation, serialization."""
from itertools import permutations

import pytest

from dnf_fourier import (
    BooleanFunction,
    ContradictoryTermError,
    Dnf,
    DyadicRational,
    ParseError,
    Term,
    hamming_distance_fraction,
    random_read_k,
)
from dnf_fourier.generators import SplitMix64


def test_evaluate_examples():
    and2 = Dnf.from_term_literals(2, [[1, 2]])
    f = and2.evaluate()
    assert f.ones == 1 and f.value(0b11) == 1

    empty = Dnf(2, ())
    assert empty.evaluate().bits == 0

    mix = Dnf.from_term_literals(2, [[1], [-1, 2]])
    g = mix.evaluate()
    # true iff x1 or x2: three satisfying inputs
    assert g.ones == 3
    assert g.value(0b00) == 0


def test_empty_term_is_constant_true():
    d = Dnf.from_term_literals(3, [[]])
    assert d.evaluate() == BooleanFunction.constant(3, True)


def test_metrics_examples():
    assert Dnf.from_term_literals(4, [[1, 2], [3, 4]]).metrics() == (2, 2, 1)
    assert Dnf.from_term_literals(2, [[1], [1, 2]]).metrics() == (2, 2, 2)
    assert Dnf(2, ()).metrics() == (0, 0, 0)


def test_duplicate_terms_count_honestly():
    d = Dnf.from_term_literals(2, [[1], [1]])
    assert d.metrics() == (2, 1, 2)


def test_contradictory_term_rejected():
    with pytest.raises(ContradictoryTermError):
        Term.from_literals([1, -1])
    with pytest.raises(ParseError):
        Dnf.from_text("n=2\n1 -1\n")


def test_satisfied_terms_examples():
    d = Dnf.from_term_literals(3, [[1, 2], [3]])
    assert d.satisfied_terms(0b111) == {1, 2}
    assert d.satisfied_terms(0b000) == frozenset()
    comp = Dnf.from_term_literals(1, [[1], [-1]])
    for x in (0, 1):
        sat = comp.satisfied_terms(x)
        assert len(sat) == 1 and sat in ({1}, {2})


def test_truncate_width_examples():
    d = Dnf.from_term_literals(4, [[1, 2, 3], [4]])
    t = d.truncate_width(1)
    assert [term.literals() for term in t.terms] == [[4]]
    d2 = Dnf.from_term_literals(3, [[1, 2], [3]])
    assert d2.truncate_width(d2.width()) == d2


def test_truncate_to_zero_distance_is_exact():
    # terms all of width exactly w+1 truncated at w: distance <= s * 2^-(w+1)
    w = 2
    d = Dnf.from_term_literals(6, [[1, 2, 3], [4, 5, 6]])
    t = d.truncate_width(w)
    assert t.size() == 0
    dist = hamming_distance_fraction(d.evaluate(), t.evaluate())
    assert dist <= DyadicRational(2, w + 1)


def test_truncation_bound_on_random_dnfs():
    rng = SplitMix64(123)
    for i in range(500):
        n = 4 + i % 5
        s = 1 + i % 6
        w = 1 + i % 4
        d = random_read_k(n, s, w, k=s, seed=9000 + i)
        f = d.evaluate()
        for w_cut in range(d.width()):
            g = d.truncate_width(w_cut)
            dist = hamming_distance_fraction(f, g.evaluate())
            assert dist <= d.truncation_distance_bound(w_cut)


def test_term_order_irrelevant_for_semantics():
    d = Dnf.from_term_literals(4, [[1, -2], [3], [2, 4]])
    base = d.evaluate()
    for perm in permutations(d.terms):
        assert Dnf(4, perm).evaluate() == base


def test_read_matches_incidence_matrix():
    for i in range(500):
        n = 4 + i % 5
        s = 1 + i % 6
        d = random_read_k(n, s, 1 + i % 4, k=s, seed=4000 + i)
        incidence = [[0] * (n + 1) for _ in range(s)]
        for j, t in enumerate(d.terms):
            for v in t.variables():
                incidence[j][v] = 1
        by_columns = max(
            (sum(row[v] for row in incidence) for v in range(1, n + 1)), default=0
        )
        assert d.read() == by_columns


def test_text_roundtrip_with_comments_and_empty_term():
    text = "# a comment\nn=3\n1 -2\n0\n3\n"
    d = Dnf.from_text(text)
    assert d.n == 3 and d.size() == 3
    assert d.terms[1] == Term(0, 0)
    assert Dnf.from_text(d.to_text()) == d


def test_json_roundtrip():
    d = Dnf.from_term_literals(5, [[1, -3], [], [5, 2, -4]])
    assert Dnf.from_json(d.to_json()) == d


def test_parse_errors():
    with pytest.raises(ParseError):
        Dnf.from_text("1 2\n")  # missing header
    with pytest.raises(ParseError):
        Dnf.from_text("n=2\n0 1\n")  # 0 mixed with literals
    with pytest.raises(ParseError):
        Dnf.from_text("n=2\n1 1\n")  # duplicate variable
    with pytest.raises(ParseError):
        Dnf.from_json('{"n": 2}')
    with pytest.raises(ValueError):
        Dnf.from_term_literals(2, [[3]])  # variable beyond n


def test_term_literal_order_is_ascending():
    t = Term.from_literals([4, -1, 3])
    assert t.literals() == [-1, 3, 4]
    assert t.variables() == [1, 3, 4]
