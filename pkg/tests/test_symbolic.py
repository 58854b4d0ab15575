import pytest
from hypothesis import given, strategies as st

from cantorsum.errors import CapExceeded, IdenticalSequences
from cantorsum.symbolic import SymbolPath, Word, cylinder_count, cylinder_enumerate, wedge, word_digits

from oracles import expand


def path(prefix, tail, m=2):
    return SymbolPath.from_symbols(prefix, tail, m)


def test_word_invariants():
    assert len(Word((), 2)) == 0
    with pytest.raises(ValueError):
        Word((0, 2), 2)
    with pytest.raises(ValueError):
        Word((0,), 1)


def test_tail_must_be_nonempty():
    with pytest.raises(ValueError):
        path([0, 1], [])


@pytest.mark.parametrize("a,b,expected", [
    (path([], [0]), path([], [1]), 0),
    (path([0, 1], [0]), path([0, 1], [1]), 2),
    (path([0, 0, 1], [0]), path([], [0, 0, 1]), 5),
])
def test_wedge_examples(a, b, expected):
    assert wedge(a, b) == expected


def test_wedge_identical_raises():
    with pytest.raises(IdenticalSequences):
        wedge(path([0, 1], [0, 1]), path([], [0, 1]))
    with pytest.raises(IdenticalSequences):
        wedge(path([], [1]), path([1, 1, 1], [1, 1]))


def test_cylinder_enumerate_examples():
    assert [list(w) for w in cylinder_enumerate(2, 1)] == [[0], [1]]
    assert [str(w) for w in cylinder_enumerate(2, 2)] == ["00", "01", "10", "11"]
    words = [tuple(w) for w in cylinder_enumerate(3, 2)]
    assert len(words) == 9 and words == sorted(words)


def test_cap():
    with pytest.raises(CapExceeded) as info:
        cylinder_count(2, 30)
    assert info.value.suggested_depth == 26
    with pytest.raises(CapExceeded):
        cylinder_enumerate(3, 5, cap=100)


def test_word_digits_matches_enumeration():
    digits = word_digits(3, 3)
    assert [tuple(r) for r in digits.tolist()] == [tuple(w) for w in cylinder_enumerate(3, 3)]


def test_expand_and_shift():
    p = path([1, 0], [0, 1])
    assert p.expand(7) == (1, 0, 0, 1, 0, 1, 0)
    assert p.shift(3).expand(4) == p.expand(7)[3:]


seqs = st.lists(st.integers(0, 2), max_size=6)
tails = st.lists(st.integers(0, 2), min_size=1, max_size=4)


@given(seqs, tails, seqs, tails)
def test_wedge_symmetric_and_matches_expansion(p1, t1, p2, t2):
    a, b = path(p1, t1, 3), path(p2, t2, 3)
    ea, eb = expand(p1, t1, 60), expand(p2, t2, 60)
    if ea == eb:
        with pytest.raises(IdenticalSequences):
            wedge(a, b)
        return
    n = wedge(a, b)
    assert n == wedge(b, a)
    assert ea[:n] == eb[:n] and ea[n] != eb[n]


@given(st.lists(st.integers(0, 1), max_size=10), st.integers(0, 1), tails, tails)
def test_wedge_equals_common_word_length(u, s, t1, t2):
    t1 = [x % 2 for x in t1]
    t2 = [x % 2 for x in t2]
    a, b = path(u + [s], t1), path(u + [1 - s], t2)
    assert wedge(a, b) == len(u)


@given(st.integers(2, 4), st.integers(0, 5))
def test_enumerate_count_distinct(m, n):
    words = cylinder_enumerate(m, n)
    assert len(words) == m**n == len({tuple(w) for w in words})
