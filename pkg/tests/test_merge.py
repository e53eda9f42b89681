import re

import pytest

from merge_hopf.algebra import LinComb, Tensor
from merge_hopf.errors import InvariantViolation, PreconditionError
from merge_hopf.merge import (
    BAD_FORMS, FormKind, MergeForm, WeightedWorkspace, apply_merge_case, b_plus,
    check_constraints, classify_form, constraint_check, countercyclic_by_composition,
    delta_match, derive, eps_moves, expected_delta, form_degree, internal_merge,
    internal_merge_by_composition, load_script, merge_eps, merge_op, merge_op_terms,
    minimal_search_limit, rho, size_delta,
)
from merge_hopf.syntax import EMPTY, UNIT, Forest, enumerate_forests, parse_forest, parse_tree
from merge_hopf.verify import external_outputs, occurrence_forms

P, F = parse_tree, parse_forest

SMALL = enumerate_forests(["a", "b"], max_vertices=7)


def _counts_from_text(f: Forest):
    """(b0, acc, sigma, sigma_hat) read off the text encoding: a binary tree with n leaves has 2n-1 vertices."""
    b0 = len(f.trees)
    sigma = sum(2 * len(re.findall(r"[^{}\s]+", str(t))) - 1 for t in f.trees)
    return (b0, sigma - b0, sigma, b0 + sigma)


def _oracle_delta(form, f):
    after = apply_merge_case(form, f)
    x, y = _counts_from_text(after), _counts_from_text(f)
    return tuple(u - v for u, v in zip(x, y))


# -- grafting and the Merge operator ------------------------------------------------

def test_b_plus():
    assert b_plus(F("a | b")) is P("{a b}")
    assert str(b_plus(F("a | b | c"))) == "{a b c}"
    assert b_plus(F("{a b}")) is P("{a b}")
    assert b_plus(EMPTY) is UNIT


def test_merge_op_examples():
    f = F("{a b} | c")
    assert merge_op(P("{a b}"), P("c"), f) == LinComb({F("{c {a b}}"): 1})
    assert merge_op(P("{b c}"), UNIT, F("{a {b c}}")) == LinComb({F("{b c} | a"): 1})
    assert merge_op(P("{x y}"), P("z"), f) == LinComb({f: 1})


def test_merge_op_sums_over_matches():
    f = F("a | a | b")
    out = merge_op(P("a"), P("b"), f)
    assert out == LinComb({F("a | {a b}"): 2})


def test_delta_match():
    f = F("{a b} | c")
    t = (F("{a b} | c"), EMPTY)
    assert delta_match(P("{a b}"), P("c"), t, f) == Tensor({t: 1})
    assert delta_match(P("{a b}"), P("c"), (F("a"), F("b | c")), f) == Tensor()


def test_internal_merge_examples():
    assert internal_merge((0, (1,)), F("{a {b c}}")) == LinComb({F("{a {b c}}"): 1})
    assert internal_merge((0, (0,)), F("{a b}")) == LinComb({F("{a b}"): 1})
    t = F("{{a b} {a {b c}}}")
    p = next(p for p, s in t.trees[0].vertices() if str(s) == "{b c}")
    assert internal_merge((0, p), t) == LinComb({F("{{b c} {a {a b}}}"): 1})
    with pytest.raises(PreconditionError):
        internal_merge((0, ()), F("{a b}"))


def test_internal_merge_is_a_composition_exhaustive():
    n = 0
    for f in SMALL:
        for occ, _ in f.vertices():
            if occ[1]:
                assert internal_merge_by_composition(occ, f) == internal_merge(occ, f).support()[0]
                n += 1
    assert n > 100


def test_internal_composition_through_merge_op():
    f = F("{a {b c}}")
    beta, rest = P("{b c}"), P("a")
    step = merge_op(beta, UNIT, f).support()[0]
    assert merge_op(rest, beta, step).support() == internal_merge((0, (1,)), f).support()


def test_countercyclic_is_a_composition_exhaustive():
    n = 0
    for f in SMALL:
        for form in occurrence_forms(f):
            if form.variant is FormKind.COUNTERCYCLIC_III:
                assert countercyclic_by_composition(form, f) == apply_merge_case(form, f)
                n += 1
    assert n > 20


# -- classification and size rows ----------------------------------------------------

def test_classify_examples():
    f = F("{a b} | {c {a b}}")
    assert classify_form(f, (0, ()), (1, ())).variant is FormKind.EXTERNAL
    assert classify_form(f, (1, ()), (1, (1,))).variant is FormKind.INTERNAL
    assert classify_form(f, (0, (0,)), (1, ())).variant is FormKind.SIDEWARD_2B
    assert classify_form(f, (0, (0,)), (1, (0,))).variant is FormKind.SIDEWARD_3B
    g = F("{{a b} {c {a b}}}")
    assert classify_form(g, (0, (0,)), (0, (1, 1))).variant is FormKind.COUNTERCYCLIC_III
    assert classify_form(g, (0, (1,)), (0, (1, 1))).variant is FormKind.COUNTERCYCLIC_I
    assert classify_form(g, (0, (1, 1)), (0, (1,))).variant is FormKind.COUNTERCYCLIC_II
    assert classify_form(g, (0, (1, 1))).variant is FormKind.UNARY_EXTRACT
    with pytest.raises(PreconditionError):
        classify_form(g, (0, (1,)), (0, (1,)))


def test_root_children_pair_is_internal():
    # the two children of a root: M(alpha, beta) with alpha = T/beta
    f = F("{{a b} c}")
    form = classify_form(f, (0, (0,)), (0, (1,)))
    assert form.variant is FormKind.INTERNAL
    assert apply_merge_case(form, f) == f


def test_published_rows():
    f = F("{a b} | c")  # stored as c | {a b}
    assert size_delta(classify_form(f, (0, ()), (1, ())), f) == (-1, 2, 1, 0)
    assert size_delta(classify_form(f, (1, (0,))), f) == (1, -2, -1, 0)
    g = F("{a {b c}}")
    assert size_delta(classify_form(g, (0, ()), (0, (1,))), g) == (0, 0, 0, 0)
    h = F("{{a b} {c {a b}}}")
    form = classify_form(h, (0, (1,)), (0, (1, 1)))
    assert size_delta(form, h) == (1, 2, 3, 4)


def test_rows_other_than_sideward_hold_exhaustively():
    n = 0
    for f in SMALL:
        for form in occurrence_forms(f):
            if form.variant in (FormKind.SIDEWARD_2B, FormKind.SIDEWARD_3B):
                continue
            assert _oracle_delta(form, f) == expected_delta(form, f)
            n += 1
    assert n > 500


def test_sideward_rows_by_vertex_counting():
    # Removing T_v drops sigma(T_v) + 1 vertices and merging adds sigma(T_v) + 1,
    # so 2b preserves every count and 3b loses one vertex net.
    seen = set()
    for f in SMALL:
        for form in occurrence_forms(f):
            if form.variant is FormKind.SIDEWARD_2B:
                assert _oracle_delta(form, f) == (0, 0, 0, 0)
                seen.add(form.variant)
            elif form.variant is FormKind.SIDEWARD_3B:
                assert _oracle_delta(form, f) == (1, -2, -1, 0)
                seen.add(form.variant)
    assert len(seen) == 2


def test_sideward_printed_rows_raise_on_check():
    f = F("{a b} | {c d}")
    form = classify_form(f, (0, (0,)), (1, (0,)))
    assert expected_delta(form, f) == (1, 0, 1, 2)
    with pytest.raises(InvariantViolation):
        size_delta(form, f)
    assert size_delta(form, f, check=False) == (1, -2, -1, 0)


def test_constraints():
    assert check_constraints((-1, 2, 1, 0)) == {
        "db0<=0": True, "dacc>=0": True, "0<=dsigma<=1": True, "dsigma_hat==0": True}
    f = F("{{a b} {c d}}")
    cc3 = classify_form(f, (0, (0, 0)), (0, (1, 0)))
    assert "".join("Y" if v else "N" for v in constraint_check(cc3, f).values()) == "NNNY"


def test_bad_forms_fail_some_constraint():
    for f in SMALL:
        for form in occurrence_forms(f):
            ok = check_constraints(_oracle_delta(form, f))
            if form.variant in (FormKind.COUNTERCYCLIC_I, FormKind.COUNTERCYCLIC_II,
                                FormKind.COUNTERCYCLIC_III, FormKind.SIDEWARD_3B):
                assert not all(ok.values())


# -- degrees and Minimal Search ------------------------------------------------------

def test_merge_eps_examples():
    f = F("{a b} | c")
    out = merge_eps(P("{a b}"), P("c"), f)
    assert [W.degrees for W in out.support()] == [(0,)]
    g = F("{a b} | {c d}")
    out = merge_eps(P("a"), P("c"), g)
    (W,) = out.support()
    assert W.total_degree > 0
    assert minimal_search_limit(out) == LinComb()


def test_unary_extract_is_removed():
    W0 = WeightedWorkspace.from_forest(F("{a {b c}}"))
    out = merge_eps(P("{b c}"), UNIT, W0)
    assert minimal_search_limit(out) == LinComb()
    assert minimal_search_limit(LinComb({W0: 1})) == LinComb({W0.forest: 1})


def test_internal_degrees_cancel():
    f = F("{a {b c}}")
    W1 = merge_eps(P("{b c}"), UNIT, f).support()[0]
    assert sorted(W1.degrees) == [-1, 1]
    W2 = merge_eps(P("a"), P("{b c}"), W1).support()[0]
    assert W2.degrees == (0,)
    assert W2.forest == internal_merge((0, (1,)), f).support()[0]


def test_single_step_survivors_are_external():
    for f in enumerate_forests(["a", "b"], max_vertices=6):
        W0 = WeightedWorkspace.from_forest(f)
        got = {W.forest for _, W in eps_moves(W0) if W.total_degree == 0 and W != W0}
        assert got == external_outputs(f)


def test_bad_single_shot_degrees_positive():
    for f in SMALL:
        for form in occurrence_forms(f):
            if form.variant in BAD_FORMS:
                assert form_degree(form, f) > 0


# -- rho, copy cancellation, derivations ---------------------------------------------------

def test_rho_examples():
    r = rho(P("c"), F("{a b}"))
    assert r[F("{c {a b}}")] == 1
    assert rho(UNIT, F("{a b}"))[F("{a b}")] == 1


def test_rho_contains_merge_outputs():
    # every M_{T,S'} output with T in F is a term of rho(T) applied to F/T
    for f in enumerate_forests(["a", "b"], max_vertices=5):
        for occ, T in f.vertices():
            from merge_hopf.syntax import forest_quotient
            sup = set(rho(T, forest_quotient(f, [occ])).support())
            for _, S2 in f.vertices():
                for ext, out in merge_op_terms(T, S2, f):
                    if occ in ext:
                        assert out in sup


def test_copy_cancellation_structural():
    for f in SMALL:
        for occ_s, S in f.vertices():
            for occ_t, S2 in f.vertices():
                if occ_s[0] == occ_t[0]:
                    continue
                for ext, out in merge_op_terms(S, S2, f):
                    new = b_plus(Forest([S, S2]))
                    assert new in out.trees
                    # the source components appear quotiented
                    assert out.n_vertices == f.n_vertices + 1 - sum(
                        1 for _, p in ext if p)


def test_derive_external_twice():
    d = derive("a | b | c", [{"op": "merge", "S": "a", "S2": "b"},
                             {"op": "merge", "S": "{a b}", "S2": "c"}])
    assert str(d.final) == "{c {a b}}"
    assert [s.counts_before.b0 for s in d.steps] + [d.steps[-1].counts_after.b0] == [3, 2, 1]
    assert [s.form for s in d.steps] == ["External", "External"]


def test_derive_empty_and_unary():
    d = derive("a | b", [])
    assert d.steps == [] and d.final == F("a | b")
    d = derive("{a {b c}}", [{"op": "merge", "S": "{b c}"}])
    assert d.steps[0].form == "UnaryExtract"
    assert d.steps[0].constraints["dacc>=0"] is False


def test_derive_ambiguous_lists_candidates():
    with pytest.raises(PreconditionError, match="candidates"):
        derive("{a b} | {a c} | d", [{"op": "merge", "S": "a", "S2": "d"}])
    d = derive("{a b} | {a c} | d", [{"op": "merge", "S": "a", "S2": "d",
                                      "occurrence": [[1, [0]], [0, []]]}])
    assert d.steps[0].form == "Sideward2b"


def test_load_script():
    f, steps = load_script('{"initial": "a | b", "steps": [{"op": "merge", "S": "a", "S2": "b"}]}')
    assert f == F("a | b") and len(steps) == 1


def test_merge_form_json():
    form = MergeForm(FormKind.EXTERNAL, (0, ()), (1, ()))
    assert form.to_json() == {"variant": "External", "occurrences": [
        {"component": 0, "path": []}, {"component": 1, "path": []}]}
