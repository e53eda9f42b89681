import json
import random

import pytest
from hypothesis import given, strategies as st

from merge_hopf.errors import ConfigurationError, ParseError, PreconditionError
from merge_hopf.externalization import (
    PERMISSIVE, Filter, LanguageSpec, OrderParams, PlanarForest, embeddings, enumerate_planar,
    fiber_sizes, filter, grade_dimensions, load_language, malcev_decode, malcev_encode,
    multiplicativity_witness, nc_merge, parse_planar, parse_planar_forest, partial_square,
    passes, pl_square, pleaf, project, random_planar, random_planar_forest, restricted_coproduct,
    restricted_merge, restricted_rho, rho_pl, section,
)
from merge_hopf.nary import catalan
from merge_hopf.syntax import enumerate_trees, parse_forest, parse_tree, trees_with_leaves
from merge_hopf.verify import sample_languages

pp = parse_planar
HEAD_FINAL = LanguageSpec(pi=(1,), m=1, name="head-final")

planar = st.recursive(st.sampled_from("abc").map(pleaf),
                      lambda kids: st.tuples(kids, kids).map(lambda p: nc_merge(*p)),
                      max_leaves=6)


def test_project_examples():
    assert project(pp("(a (b c))")) is parse_tree("{a {b c}}")
    assert project(pp("((c b) a)")) is parse_tree("{a {b c}}")
    assert project(parse_planar_forest("(a b) | c")) == parse_forest("{a b} | c")


def test_fibers():
    assert len(embeddings(parse_tree("{x {x x}}"))) == 2
    assert len(embeddings(parse_tree("{{x x} {x x}}"))) == 1
    assert len(embeddings(parse_tree("{a {b c}}"))) == 4
    for n in range(1, 8):
        fib = fiber_sizes(["x"], n)
        assert sum(fib.values()) == catalan(n - 1)
        assert set(fib) == set(trees_with_leaves(["x"], n))
        for t, k in fib.items():
            assert k == len(set(embeddings(t)))


def test_section_default():
    assert str(section(parse_tree("{a {b c}}"))) == "(a (b c))"
    with pytest.raises(PreconditionError):
        section(parse_tree("1"))


@pytest.mark.parametrize("L", sample_languages() + [HEAD_FINAL], ids=lambda L: L.name)
def test_section_is_a_right_inverse(L):
    for t in enumerate_trees(["a", "b", "c"], 5):
        assert project(section(t, L)) is t


def test_head_final_flips():
    assert str(section(parse_tree("{a {b c}}"), HEAD_FINAL)) == "((c b) a)"


def test_section_not_multiplicative():
    w = multiplicativity_witness(HEAD_FINAL)
    assert w is not None
    t, u, lhs, rhs = w
    assert lhs != rhs and project(lhs) is project(rhs)


def test_precedence_and_head_rules():
    o = OrderParams(("b", "a"), "precedence")
    L = LanguageSpec(order=o)
    assert str(section(parse_tree("{a b}"), L)) == "(b a)"
    L = LanguageSpec(order=OrderParams(("c",), "rightmost"))
    assert str(section(parse_tree("{a {b c}}"), L)) == "((c b) a)"
    with pytest.raises(ConfigurationError):
        OrderParams((), "middle")


def test_nc_merge_and_malcev():
    a, b = pleaf("a"), pleaf("b")
    assert nc_merge(a, b) != nc_merge(b, a)
    fixture = pp("(α ((β γ) δ))")
    assert malcev_encode(fixture) == "c α c c β γ δ"
    assert malcev_encode(fixture, compact=True) == "c α c² β γ δ"
    assert malcev_decode("c α c² β γ δ") == fixture
    assert malcev_decode("c α c^2 β γ δ") == fixture
    assert malcev_encode(nc_merge(a, b), marker="m") == "m a b"


def test_malcev_roundtrip_exhaustive():
    for n in range(1, 7):
        for p in enumerate_planar(["a", "b"], n):
            w = malcev_encode(p)
            assert malcev_decode(w) == p
            assert len(w.split()) == 2 * n - 1
            assert malcev_decode(malcev_encode(p, compact=True)) == p


def test_malcev_errors():
    with pytest.raises(ParseError):
        malcev_decode("c a")
    with pytest.raises(ParseError) as e:
        malcev_decode("c a b d")
    assert e.value.offset == len("c a b ")
    with pytest.raises(PreconditionError):
        malcev_encode(pp("(c a)"))


def test_planar_parse_errors():
    with pytest.raises(ParseError):
        pp("(a b c)")
    with pytest.raises(ParseError):
        pp("(a b")
    assert parse_planar_forest("1") == PlanarForest()


def test_filters():
    deep = pp("((a b) (c d))")
    L = LanguageSpec(pi=(1,), filters=(Filter.make(0, "max_depth", k=1),))
    out = filter(deep, L)
    assert not out.accepted and (out.bit, out.component, out.kind) == (0, 0, "max_depth")
    assert filter(deep, PERMISSIVE).accepted
    off = LanguageSpec(pi=(0,), filters=L.filters)
    assert filter(deep, off).accepted
    adj = Filter.make(0, "forbid_adjacent", pair=["a", "b"])
    assert not adj.accepts(pp("((a b) c)")) and adj.accepts(pp("(b a)"))
    sub = Filter.make(0, "forbid_subtree", pattern="(a b)")
    assert not sub.accepts(pp("(c (a b))")) and sub.accepts(pp("(c (b a))"))
    assert not Filter.make(0, "max_leaves", k=2).accepts(pp("(a (b c))"))
    with pytest.raises(ConfigurationError):
        Filter.make(0, "max_depth")
    with pytest.raises(ConfigurationError):
        Filter.make(0, "vibes", k=1)
    with pytest.raises(ConfigurationError):
        LanguageSpec(pi=(1,), filters=(Filter.make(3, "max_depth", k=1),))


def test_filters_are_hereditary():
    kinds = [Filter.make(0, "max_depth", k=2), Filter.make(0, "max_leaves", k=3),
             Filter.make(0, "forbid_subtree", pattern="(a a)"),
             Filter.make(0, "forbid_adjacent", pair=["a", "b"])]
    for f in kinds:
        for n in range(1, 6):
            for p in enumerate_planar(["a", "b"], n):
                if f.accepts(p):
                    assert all(f.accepts(s) for _, s in p.vertices())


def test_restricted_merge():
    a, b = pp("(a b)"), pp("(c d)")
    assert restricted_merge(a, b, PERMISSIVE) == nc_merge(a, b)
    L = LanguageSpec(pi=(1,), filters=(Filter.make(0, "max_depth", k=1),))
    assert restricted_merge(a, b, L) is None
    with pytest.raises(PreconditionError):
        restricted_merge(pp("((a b) c)"), b, L)


def test_restricted_coproduct_keeps_passing_terms():
    L = LanguageSpec(pi=(1,), filters=(Filter.make(0, "max_leaves", k=2),))
    F = parse_planar_forest("(a b) | c")
    for s, rest in restricted_coproduct(F, L):
        assert passes(s, L) and filter(rest, L).accepted


def test_squares_seeded():
    rng = random.Random(11)
    langs = sample_languages()
    for i in range(60):
        T = random_planar(rng, "abc", rng.randint(1, 3))
        F = random_planar_forest(rng, "abc", 5)
        x, y = pl_square(T, F)
        assert x == y
        L = langs[i % len(langs)]
        if passes(T, L) and filter(F, L).accepted:
            x, y = partial_square(T, F, L)
            assert x == y


@given(planar, planar)
def test_plain_square_property(t, u):
    x, y = pl_square(t, PlanarForest((u,)))
    assert x == y


def test_rho_pl_counts_vertices():
    F = parse_planar_forest("(a b) | c")
    assert rho_pl(pleaf("d"), F).coefficient_sum() == 4
    assert restricted_rho(pleaf("d"), F, PERMISSIVE) == rho_pl(pleaf("d"), F)


def test_grade_dimensions():
    tab = grade_dimensions(PERMISSIVE, 7)
    assert [r["d"] for r in tab.rows] == [catalan(l - 1) for l in range(1, 8)]
    assert [r["d_L"] for r in tab.rows] == [r["d"] for r in tab.rows]
    twin = LanguageSpec(pi=(1, 1), filters=(Filter.make(0, "max_depth", k=3),
                                            Filter.make(1, "max_depth", k=3)))
    tab = grade_dimensions(twin, 7)
    for r in tab.rows:
        assert r["d_L"] == r["per_bit"]["0"] == r["per_bit"]["1"] <= r["d"]


def test_grade_dimensions_monotone_in_bits():
    filters = (Filter.make(0, "max_depth", k=3), Filter.make(1, "forbid_adjacent", pair=["a", "b"]),
               Filter.make(2, "max_leaves", k=5))
    prev = None
    for pi in [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)]:
        tab = grade_dimensions(LanguageSpec(pi=pi, filters=filters), 6, labels=("a", "b"))
        dl = [r["d_L"] for r in tab.rows]
        for r in tab.rows:
            assert all(r["d_L"] <= v <= r["d"] for v in r["per_bit"].values())
        if prev is not None:
            assert all(x <= y for x, y in zip(dl, prev))
        prev = dl


def test_grade_dimensions_truncation():
    tab = grade_dimensions(PERMISSIVE, 12, budget=1000)
    assert tab.truncated and tab.truncated_at == len(tab.rows) + 1
    assert tab.to_csv().strip().splitlines()[-1].startswith("# truncated")


def test_language_json_roundtrip(tmp_path):
    L = sample_languages()[2]
    p = tmp_path / "lang.json"
    p.write_text(json.dumps(L.to_json()), encoding="utf-8")
    assert load_language(p) == L
    p.write_text('{"filters": [{"bit": 2, "kind": "max_depth", "args": {"k": 2}}]}', encoding="utf-8")
    assert load_language(p).pi == (1, 1, 1)
    p.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_language(p)
