import pytest

from merge_hopf.algebra import LinComb, Tensor
from merge_hopf.dyson_schwinger import (
    DOT, R_EMPTY, DSPoly, RForest, RootedTree, ck_b_plus, ck_coproduct, cocycle_check, ds_core,
    ds_general, rooted_to_syntree, wedderburn_etherington,
)
from merge_hopf.errors import PreconditionError
from merge_hopf.externalization import fiber_sizes
from merge_hopf.nary import catalan
from merge_hopf.syntax import EMPTY, parse_forest, parse_tree, trees_with_leaves

X = ds_core(10)


def _planar_shapes(n):
    """Planar binary shapes with n leaves as nested tuples."""
    if n == 1:
        return ["x"]
    return [(l, r) for i in range(1, n) for l in _planar_shapes(i) for r in _planar_shapes(n - i)]


def _forget(p):
    if p == "x":
        return parse_tree("x")
    from merge_hopf.syntax import merge
    return merge(_forget(p[0]), _forget(p[1]))


def test_low_grades():
    assert str(X[1]) == "1*x"
    assert str(X[2]) == "1*{x x}"
    assert str(X[3]) == "2*{x {x x}}"
    assert X[4] == LinComb({parse_tree("{x {x {x x}}}"): 4, parse_tree("{{x x} {x x}}"): 1})


def test_catalan_mass_and_support():
    we = wedderburn_etherington(10)
    assert we == [1, 1, 1, 2, 3, 6, 11, 23, 46, 98]
    for n in range(1, 11):
        assert X[n].coefficient_sum() == catalan(n - 1)
        assert set(X[n].terms) == set(trees_with_leaves(["x"], n))
        assert len(X[n]) == we[n - 1]


def test_coefficients_count_planar_embeddings():
    for n in range(1, 8):
        brute: dict = {}
        for p in _planar_shapes(n):
            t = _forget(p)
            brute[t] = brute.get(t, 0) + 1
        assert dict(X[n].terms) == brute
        assert fiber_sizes(["x"], n) == brute


def test_summation_order_irrelevant():
    rev = ds_core(10, order=list(range(9, 0, -1)))
    assert all(rev[n] == X[n] for n in range(1, 11))


def test_ds_core_errors():
    with pytest.raises(PreconditionError):
        ds_core(0)


def test_general_square():
    P = DSPoly.parse("1,0,1")
    x = ds_general(P, 9)
    assert x[1] == LinComb({DOT: 1})
    assert x[2] == LinComb()
    assert x[3] == LinComb({ck_b_plus(RForest((DOT, DOT))): 1})
    # odd grades carry the binary shapes, with the same multiplicities as the core recursion
    for m in range(0, 5):
        got = LinComb({rooted_to_syntree(t): c for t, c in x[2 * m + 1].terms.items()})
        assert got == X[m + 1]
        if m:
            assert x[2 * m] == LinComb()


def test_general_ladder():
    x = ds_general(DSPoly.from_mapping({1: 1}), 5)
    t = DOT
    for n in range(1, 6):
        assert x[n] == LinComb({t: 1})
        t = ck_b_plus(t)


def test_dspoly():
    assert DSPoly.parse("1,0,1")[2] == 1 and DSPoly.parse("1,0,1")[7] == 0
    assert DSPoly.from_mapping({2: 3}).coefficients == (1, 0, 3)
    with pytest.raises(PreconditionError):
        DSPoly.from_mapping({0: 5})


def test_rooted_tree_interning():
    t = RootedTree([DOT, RootedTree([DOT])])
    assert t is RootedTree([RootedTree([DOT]), DOT])
    assert t.n_vertices == 4
    assert str(t) == "[[[]] []]"  # children sorted by encoding


def _all_rooted(n):
    out = {DOT}
    for _ in range(n - 1):
        nxt = set(out)
        for t in out:
            nxt.add(ck_b_plus(t))
            for u in out:
                if t.n_vertices + u.n_vertices <= n - 1:
                    nxt.add(ck_b_plus(RForest((t, u))))
        out = {t for t in nxt if t.n_vertices <= n}
    return out


def test_ck_coproduct_small():
    cherry = ck_b_plus(RForest((DOT, DOT)))
    d = ck_coproduct(cherry)
    stick = ck_b_plus(DOT)
    assert d == Tensor({(R_EMPTY, RForest((cherry,))): 1, (RForest((cherry,)), R_EMPTY): 1,
                        (RForest((DOT,)), RForest((stick,))): 2,
                        (RForest((DOT, DOT)), RForest((DOT,))): 1})


def test_ck_cocycle_holds():
    for t in _all_rooted(5):
        assert cocycle_check(RForest((t,)), "ck").holds
    assert cocycle_check(R_EMPTY, "ck").holds
    assert cocycle_check(RForest((DOT, ck_b_plus(DOT))), "ck").holds


def test_workspace_cocycle_is_diagnostic():
    r = cocycle_check(EMPTY, "workspace")
    assert not r.holds
    r = cocycle_check(parse_forest("a"), "workspace")
    assert not r.holds and r.first_difference is not None
    js = r.to_json()
    assert js["first_difference"]["lhs_coeff"] != js["first_difference"]["rhs_coeff"]
    with pytest.raises(ValueError):
        cocycle_check(parse_forest("a | b | c"), "workspace")
    with pytest.raises(ValueError):
        cocycle_check(R_EMPTY, "nope")
