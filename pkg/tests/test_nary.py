from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from merge_hopf.algebra import LinComb
from merge_hopf.errors import DomainError, ParseError, PreconditionError
from merge_hopf.nary import (
    catalan, constant_projection, contract_quotient, enumerate_nary_trees, fuss_catalan,
    nary_merge, nary_merge_op, overgeneration_counts, parse_nary_forest, parse_nary_tree,
    reachable_lengths, undergeneration_gap,
)
from merge_hopf.syntax import UNIT, Forest, counts, leaf, parse_tree

a, b, c, d, e = (leaf(x) for x in "abcde")


def _planar_count(n, leaves):
    """Planar full n-ary shapes with the given number of leaves, built recursively."""
    memo = {1: 1}

    def count(m):
        if m in memo:
            return memo[m]
        # split m leaves among n ordered children
        def ways(i, left):
            if i == n:
                return 1 if left == 0 else 0
            return sum(count(j) * ways(i + 1, left - j) for j in range(1, left - (n - 2 - i)))
        memo[m] = ways(0, m)
        return memo[m]

    return count(leaves)


def test_nary_merge():
    t = nary_merge([a, b, c])
    assert str(t) == "{a b c}"
    assert nary_merge([c, a, b]) is t
    big = nary_merge([a, b, nary_merge([c, d, e])])
    assert str(big) == "{a b {c d e}}" and big.n_leaves == 5
    with pytest.raises(PreconditionError):
        nary_merge([a, b], n=3)
    with pytest.raises(PreconditionError):
        nary_merge([a, b, UNIT])


def test_contract_quotient():
    t = parse_nary_tree("{a b {c d e}}", 3)
    p = next(p for p, s in t.vertices() if str(s) == "{c d e}")
    assert str(contract_quotient(t, p)) == "{XP a b}"
    assert str(contract_quotient(t, p, constant_projection("DP"))) == "{DP a b}"
    assert contract_quotient(t, ()) is UNIT
    q = next(p for p, s in t.vertices() if str(s) == "a")
    assert contract_quotient(t, q) is t
    r = contract_quotient(t, p)
    assert r.n_vertices == t.n_vertices - (t.subtree(p).n_vertices - 1)


def test_ternary_fixture():
    al, be, ga, de, et = (leaf(x) for x in ("α", "β", "γ", "δ", "η"))
    abc = nary_merge([al, be, ga])
    F = Forest([abc, de, et])
    assert str(nary_merge_op((de, et, abc), F)) == "1*{δ η {α β γ}}"
    # internal: extract α and β from the ternary object, then merge them with it
    (g1,) = nary_merge_op((al, UNIT, UNIT), F).terms
    (g2,) = nary_merge_op((be, UNIT, UNIT), g1).terms
    out = nary_merge_op((al, be, abc), g2)
    assert set(out.terms) == {Forest([de, et, nary_merge([al, be, abc])])}


def test_nary_no_match_is_identity():
    F = Forest([a, b])
    assert nary_merge_op((c, d, e), F) == LinComb({F: 1})
    with pytest.raises(PreconditionError):
        nary_merge_op((a, b), F, n=3)


def test_binary_contraction_external_row():
    F = Forest([parse_tree("{a b}"), parse_tree("c")])
    (G,) = nary_merge_op((parse_tree("{a b}"), c), F).terms
    assert counts(G) - counts(F) == (-1, 2, 1, 0)


def test_reachable_lengths():
    assert reachable_lengths(3, 4) == {3, 5, 7, 9}
    assert 2 not in reachable_lengths(3, 10)
    assert reachable_lengths(2, 5) == {2, 3, 4, 5, 6}
    assert reachable_lengths(4, 1) == {4}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_length_stratification(n):
    for k in range(1, 4):
        for t in enumerate_nary_trees(["x", "y"], n, k):
            assert t.n_leaves == k * (n - 1) + 1


def test_catalan_values():
    assert catalan(0) == 1
    assert catalan(4) == 14 == _planar_count(2, 5)
    assert fuss_catalan(3, 2) == 3 == _planar_count(3, 5)
    assert [catalan(r) for r in range(8)] == [_planar_count(2, r + 1) for r in range(8)]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fuss_catalan_brute(n):
    for k in range(0, 5):
        assert fuss_catalan(n, k) == _planar_count(n, k * (n - 1) + 1)


def test_undergeneration_gap():
    assert undergeneration_gap(3, 2, 1) == 11
    assert undergeneration_gap(3, 1, 1) == 1
    assert undergeneration_gap(3, 2, 2) == 2 ** 5 * 11
    for n in (3, 4, 5):
        for k in range(1, 7):
            assert undergeneration_gap(n, k, 1) > 0
    with pytest.raises(DomainError):
        undergeneration_gap(2, 3, 1)


@given(st.integers(3, 8), st.integers(1, 12), st.integers(1, 4))
def test_gap_is_exact_difference(n, k, s):
    assert undergeneration_gap(n, k, s) == s ** ((n - 1) * k + 1) * (
        catalan(k * (n - 1)) - fuss_catalan(n, k))


def test_overgeneration_examples():
    c33 = overgeneration_counts(3, 3)
    assert (c33.leaves, c33.binary_nonroot, c33.nary_nonroot) == (7, 12, 9)
    assert c33.nary_tuples == 72 and c33.holds
    # the printed closed form counts (nk)!/(n(k-1))!, a falling factorial of length n
    assert c33.nary_tuples_printed == 9 * 8 * 7
    c31 = overgeneration_counts(3, 1)
    assert (c31.binary_nonroot, c31.nary_tuples) == (4, 6)
    with pytest.raises(DomainError):
        c31.nonleaf_holds()


def test_overgeneration_brute_force():
    for n in (3, 4):
        for k in (1, 2, 3):
            c_ = overgeneration_counts(n, k)
            for t in enumerate_nary_trees(["x"], n, k):
                nonroot = [p for p, _ in t.vertices() if p]
                assert len(nonroot) == c_.nary_nonroot
                assert sum(1 for _ in permutations(nonroot, n - 1)) == c_.nary_tuples
                internal = [p for p, s in t.vertices() if p and not s.is_leaf]
                assert len(internal) == c_.nary_nonroot_nonleaf
                assert sum(1 for _ in permutations(internal, n - 1)) == c_.nary_tuples_o


@pytest.mark.parametrize("n", [3, 4, 5])
def test_overgeneration_strict(n):
    for k in range(1, 7):
        assert overgeneration_counts(n, k).holds


def test_nary_parse():
    f = parse_nary_forest("{a b c} | d", 3)
    assert len(f) == 2
    with pytest.raises(ParseError):
        parse_nary_tree("{a b}", 3)
