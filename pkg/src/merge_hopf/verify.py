"""Invariant suites shared by the CLI ``verify`` subcommand and the acceptance tests.

Each suite returns a :class:`Report`.  Reports never contain timings, so the
same parameters and seed always give byte-identical JSON.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Sequence

from .algebra import (
    ONE, antipode, coassociativity_sides, convolve, coproduct, coproduct_reference, counit,
)
from .dyson_schwinger import ds_core, wedderburn_etherington
from .externalization import (
    Filter, LanguageSpec, OrderParams, embeddings, enumerate_planar, fiber_sizes, filter,
    malcev_decode, malcev_encode, parse_planar, partial_square, passes, pl_square, project,
    random_planar,
    random_planar_forest, section,
)
from .merge import (
    BAD_FORMS, CONSTRAINTS, FormKind, MergeForm, WeightedWorkspace, apply_merge_case,
    check_constraints, classify_form, eps_moves, expected_delta, form_degree,
)
from .nary import (
    catalan, enumerate_nary_trees, fuss_catalan, nary_merge_op, overgeneration_counts,
    reachable_lengths, undergeneration_gap,
)
from .syntax import (
    Forest, counts, enumerate_forests, enumerate_trees, forest_quotient, leaf, merge, node,
    parse_tree, random_forest, trees_with_leaves,
)

MAX_FAILURES = 5

# the constraint table as printed, rows in BAD_FORMS order, columns in CONSTRAINTS order
PRINTED_YN = {
    FormKind.SIDEWARD_3B: "NYYN",
    FormKind.SIDEWARD_2B: "YYYN",
    FormKind.COUNTERCYCLIC_I: "NYNN",
    FormKind.COUNTERCYCLIC_II: "NYNN",
    FormKind.COUNTERCYCLIC_III: "NNNY",
}


@dataclass
class Report:
    suite: str
    params: dict
    checked: int = 0
    failures: list = field(default_factory=list)
    n_failures: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.n_failures == 0

    def fail(self, what: str, **info) -> None:
        self.n_failures += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append({"what": what, **{k: str(v) for k, v in info.items()}})

    def to_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "params": self.params,
                "checked": self.checked, "n_failures": self.n_failures,
                "failures": self.failures, "details": self.details}

    def summary(self) -> str:
        head = f"{self.suite}: {'PASS' if self.passed else 'FAIL'} ({self.checked} checked, {self.n_failures} failures)"
        lines = [head]
        for f in self.failures:
            lines.append("  - " + "; ".join(f"{k}={v}" for k, v in f.items()))
        return "\n".join(lines)


def _sampled(labels, max_leaves, samples, sample_leaves, seed):
    forests = enumerate_forests(labels, max_leaves=max_leaves)
    rng = random.Random(seed)
    extra = [random_forest(rng, labels, sample_leaves) for _ in range(samples)]
    return forests, extra


# -- Hopf structure ------------------------------------------------------------------

def verify_coassoc(labels=("a", "b"), max_leaves: int = 7, samples: int = 200,
                   sample_leaves: int = 12, seed: int = 0) -> Report:
    """(Delta x id) Delta = (id x Delta) Delta, exhaustively plus seeded samples."""
    rep = Report("coassoc", {"labels": list(labels), "max_leaves": max_leaves, "samples": samples,
                             "sample_leaves": sample_leaves, "seed": seed})
    forests, extra = _sampled(labels, max_leaves, samples, sample_leaves, seed)
    for f in forests + extra:
        lhs, rhs = coassociativity_sides(f)
        if lhs != rhs:
            rep.fail("coassociativity", forest=f)
        rep.checked += 1
    rep.details = {"exhaustive": len(forests), "sampled": len(extra)}
    return rep


def _tensor_product(x, y):
    acc: dict = {}
    for (a, b), c in x.terms.items():
        for (u, v), d in y.terms.items():
            k = (a | u, b | v)
            acc[k] = acc.get(k, 0) + c * d
    return acc


def verify_compat(labels=("a", "b"), max_leaves: int = 7, samples: int = 200,
                  sample_leaves: int = 12, seed: int = 0) -> Report:
    """Delta(F1 F2) = Delta(F1) Delta(F2) for every split, against the brute-force coproduct."""
    rep = Report("compat", {"labels": list(labels), "max_leaves": max_leaves, "samples": samples,
                            "sample_leaves": sample_leaves, "seed": seed})
    forests, extra = _sampled(labels, max_leaves, samples, sample_leaves, seed)
    reference = lru_cache(maxsize=None)(coproduct_reference)
    splits = 0
    for f in forests + extra:
        ref = reference(f)
        if coproduct(f) != ref:
            rep.fail("coproduct differs from brute-force extraction", forest=f)
        n = len(f)
        seen = set()
        for mask in range(1, (1 << n) - 1) if n > 1 else ():
            left = Forest(t for i, t in enumerate(f.trees) if mask >> i & 1)
            if left in seen:
                continue
            seen.add(left)
            right = Forest(t for i, t in enumerate(f.trees) if not mask >> i & 1)
            got = _tensor_product(reference(left), reference(right))
            splits += 1
            if {k: c for k, c in got.items() if c} != ref.terms:
                rep.fail("product/coproduct compatibility", forest=f, split=f"{left} / {right}")
                break
        rep.checked += 1
    rep.details = {"exhaustive": len(forests), "sampled": len(extra), "splits": splits}
    return rep


def verify_antipode(labels=("a", "b"), max_leaves: int = 6) -> Report:
    """m (S x id) Delta = m (id x S) Delta = unit o counit."""
    rep = Report("antipode", {"labels": list(labels), "max_leaves": max_leaves})
    for f in enumerate_forests(labels, max_leaves=max_leaves, include_empty=True):
        want = ONE * counit(f)
        d = coproduct(f)
        if convolve(d, fn_left=antipode) != want:
            rep.fail("left convolution", forest=f)
        if convolve(d, fn_right=antipode) != want:
            rep.fail("right convolution", forest=f)
        rep.checked += 1
    return rep


# -- size tables -----------------------------------------------------------------------

def occurrence_forms(F: Forest):
    """Every non-root single occurrence and every pair of distinct occurrences.

    A nested pair is visited in both orders (Countercyclic i and ii).
    """
    verts = [occ for occ, _ in F.vertices()]
    for o in verts:
        if o[1]:
            yield classify_form(F, o)
    for i, p in enumerate(verts):
        for q in verts[i + 1:]:
            yield classify_form(F, p, q)
            if p[0] == q[0] and p[1] and q[1][:len(p[1])] == p[1]:
                yield classify_form(F, q, p)


def verify_tables(labels=("a", "b", "c"), max_vertices: int = 8) -> Report:
    """Computed size changes against the published rows, plus the Y/N constraint matrix."""
    rep = Report("tables", {"labels": list(labels), "max_vertices": max_vertices})
    per: dict = {k.value: {"instances": 0, "mismatches": 0} for k in FormKind}
    yn = {k: {c: True for c in CONSTRAINTS} for k in BAD_FORMS}
    observed: dict = {k.value: set() for k in FormKind}
    for F in enumerate_forests(labels, max_vertices=max_vertices):
        for form in occurrence_forms(F):
            got = counts(apply_merge_case(form, F)) - counts(F)
            want = expected_delta(form, F)
            row = per[form.variant.value]
            row["instances"] += 1
            rep.checked += 1
            if len(observed[form.variant.value]) < 8:
                observed[form.variant.value].add(got)
            if got != want:
                row["mismatches"] += 1
                rep.fail("table row", variant=form.variant.value, forest=F,
                         occurrences=form.to_json()["occurrences"], computed=got, table=want)
            if form.variant in yn:
                for c, ok in check_constraints(got).items():
                    yn[form.variant][c] &= ok
    matrix = {k.value: "".join("Y" if yn[k][c] else "N" for c in CONSTRAINTS) for k in BAD_FORMS}
    printed = {k.value: v for k, v in PRINTED_YN.items()}
    rep.details = {
        "per_variant": per,
        "observed_deltas": {k: sorted(v) for k, v in observed.items() if v},
        "yn_computed": matrix,
        "yn_printed": printed,
        "yn_matches": matrix == printed,
        "claims": constraint_claims(matrix),
    }
    return rep


def constraint_claims(matrix: dict) -> dict:
    """Which constraint sets rule out every bad variant, given a Y/N matrix."""
    idx = {c: i for i, c in enumerate(CONSTRAINTS)}

    def survivors(cs):
        return sorted(k for k, row in matrix.items() if all(row[idx[c]] == "Y" for c in cs))

    pairs = {c: survivors(["dsigma_hat==0", c]) for c in CONSTRAINTS if c != "dsigma_hat==0"}
    b0_acc = survivors(["db0<=0", "dacc>=0"])
    return {
        "hat_plus_one_rules_out_all": all(not s for s in pairs.values()),
        "hat_plus_one_survivors": pairs,
        "b0_acc_survivors": b0_acc,
        "b0_acc_insufficient_with_2b": b0_acc == [FormKind.SIDEWARD_2B.value],
    }


def verify_yn(labels=("a", "b", "c"), max_vertices: int = 8) -> Report:
    """The Y/N matrix and its corollary claims, as a pass/fail report."""
    t = verify_tables(labels, max_vertices)
    rep = Report("yn", t.params, checked=t.checked)
    d = t.details
    if not d["yn_matches"]:
        for k, row in d["yn_computed"].items():
            if row != d["yn_printed"][k]:
                rep.fail("Y/N row", variant=k, computed=row, printed=d["yn_printed"][k])
    claims = d["claims"]
    if not claims["hat_plus_one_rules_out_all"]:
        rep.fail("sigma_hat conservation plus one constraint leaves survivors",
                 survivors=claims["hat_plus_one_survivors"])
    if not claims["b0_acc_insufficient_with_2b"]:
        rep.fail("db0<=0 and dacc>=0 survivors", survivors=claims["b0_acc_survivors"])
    rep.details = {"yn_computed": d["yn_computed"], "yn_printed": d["yn_printed"], "claims": claims}
    return rep


# -- Minimal Search ----------------------------------------------------------------------

def external_outputs(F: Forest) -> set:
    out = set()
    for a in range(len(F)):
        for b in range(a + 1, len(F)):
            out.add(apply_merge_case(MergeForm(FormKind.EXTERNAL, (a, ()), (b, ())), F))
    return out


def ei_moves(F: Forest) -> set:
    """Forests one External or Internal Merge away from F."""
    out = external_outputs(F)
    for a, t in enumerate(F.trees):
        for p, _ in t.vertices():
            if p:
                out.add(apply_merge_case(classify_form(F, (a, ()), (a, p)), F))
    return out


def surgery_outputs(F: Forest) -> set:
    """M(M(T', T_v), T/T_v) with the rest of F kept.

    This is Internal Merge on the tree obtained from T by replacing T_v with
    M(T', T_v): the moved object is M(T', T_v) and the remainder is T/T_v.
    """
    out = set()
    for a, t in enumerate(F.trees):
        for b, u in enumerate(F.trees):
            if a == b:
                continue
            rest = Forest(F.without([a, b]))
            for p, s in t.vertices():
                if p:
                    out.add(rest | merge(merge(u, s), forest_quotient(t, [p])))
    return out


def verify_minimal_search(labels=("a", "b", "c"), max_vertices: int = 8, two_step: bool = True) -> Report:
    """Degree-0 survivors of one and two depth-weighted Merge steps."""
    rep = Report("minimal-search", {"labels": list(labels), "max_vertices": max_vertices,
                                    "two_step": two_step})
    stats = {"forests": 0, "single_moves": 0, "single_survivors": 0, "positive_bad": 0,
             "two_step_pairs": 0, "two_step_survivors": 0}
    for F in enumerate_forests(labels, max_vertices=max_vertices):
        stats["forests"] += 1
        W0 = WeightedWorkspace.from_forest(F)
        moves = eps_moves(W0)
        survivors = set()
        for ext, W in moves:
            stats["single_moves"] += 1
            if W.total_degree == 0 and W != W0:
                survivors.add(W.forest)
            if len(ext) == 2:
                form = classify_form(F, *ext)
                if form.variant in BAD_FORMS and W.total_degree <= 0:
                    rep.fail("Sideward term with degree 0", forest=F, ext=ext)
                elif form.variant in BAD_FORMS:
                    stats["positive_bad"] += 1
        # same-component pairs are never single-shot terms; their degree is that of the merged object
        for occ_a, _ in F.vertices():
            for occ_b, _ in F.vertices():
                if occ_a < occ_b and occ_a[0] == occ_b[0]:
                    form = classify_form(F, occ_a, occ_b)
                    if form.variant in BAD_FORMS:
                        if form_degree(form, F) <= 0:
                            rep.fail("Countercyclic term with degree 0", forest=F, form=form.to_json())
                        else:
                            stats["positive_bad"] += 1
        ext_out = external_outputs(F)
        stats["single_survivors"] += len(survivors)
        if survivors != ext_out:
            rep.fail("degree-0 single-step survivors differ from External outputs", forest=F,
                     extra=sorted(map(str, survivors - ext_out)), missing=sorted(map(str, ext_out - survivors)))
        rep.checked += 1
        if not two_step:
            continue
        one = ei_moves(F)
        allowed = {F} | one | surgery_outputs(F)
        for G in one:
            allowed |= ei_moves(G)
        seen = set()
        for _, W in moves:
            if W in seen or sum(1 for d in W.degrees if d) > 2:
                continue
            seen.add(W)
            for _, W2 in eps_moves(W):
                stats["two_step_pairs"] += 1
                if W2.total_degree:
                    continue
                stats["two_step_survivors"] += 1
                G = W2.forest
                if G not in allowed:
                    rep.fail("two-step survivor is not an External/Internal sequence", forest=F,
                             intermediate=W, result=G)
    rep.details = stats
    return rep


# -- Dyson-Schwinger, Catalan, overgeneration -----------------------------------------------

def verify_ds(n_max: int = 12, embed_max: int = 10) -> Report:
    rep = Report("ds", {"n_max": n_max, "embed_max": embed_max})
    X = ds_core(n_max)
    if str(X[2]) != "1*{x x}":
        rep.fail("X_2", got=X[2])
    if n_max >= 3 and str(X[3]) != "2*{x {x x}}":
        rep.fail("X_3", got=X[3])
    we = wedderburn_etherington(n_max)
    census = []
    for n in range(1, n_max + 1):
        x = X[n]
        support = set(x.terms)
        oracle = set(trees_with_leaves(["x"], n))
        if support != oracle:
            rep.fail("support differs from enumerated trees", n=n)
        if len(support) != we[n - 1]:
            rep.fail("Wedderburn-Etherington", n=n, got=len(support), want=we[n - 1])
        if x.coefficient_sum() != catalan(n - 1):
            rep.fail("Catalan mass", n=n, got=x.coefficient_sum(), want=catalan(n - 1))
        if n <= embed_max:
            fib = fiber_sizes(["x"], n)
            for t, c in x.terms.items():
                if fib.get(t) != c:
                    rep.fail("coefficient vs planar embeddings", n=n, tree=t, coeff=c, embeddings=fib.get(t))
                if len(embeddings(t)) != c:
                    rep.fail("coefficient vs embedding list", n=n, tree=t)
        census.append([n, len(support), x.coefficient_sum()])
        rep.checked += 1
    rep.details = {"census": census, "X_4": str(X[4]) if n_max >= 4 else None}
    return rep


def _planar_nary_count(n: int, k: int) -> int:
    """Brute force: build every planar full n-ary tree with k internal vertices."""
    table = {0: ["x"]}
    for j in range(1, k + 1):
        out = []

        def fill(i, left, kids):
            if i == n:
                if left == 0:
                    out.append(tuple(kids))
                return
            for m in range(left + 1):
                for t in table[m]:
                    kids.append(t)
                    fill(i + 1, left - m, kids)
                    kids.pop()

        fill(0, j - 1, [])
        table[j] = out
    return len(table[k])


def verify_catalan(ns: Sequence[int] = (3, 4, 5), k_max: int = 6) -> Report:
    rep = Report("catalan", {"ns": list(ns), "k_max": k_max})
    if catalan(4) != 14 or len(enumerate_planar(["x"], 5)) != 14:
        rep.fail("catalan(4)", got=catalan(4))
    if fuss_catalan(3, 2) != 3 or _planar_nary_count(3, 2) != 3:
        rep.fail("fuss_catalan(3,2)", got=fuss_catalan(3, 2))
    for n in ns:
        for k in range(1, 4):
            if fuss_catalan(n, k) != _planar_nary_count(n, k):
                rep.fail("Fuss-Catalan vs planar enumeration", n=n, k=k)
        for k in range(1, k_max + 1):
            g = undergeneration_gap(n, k, 1)
            if not g > 0:
                rep.fail("undergeneration gap not positive", n=n, k=k, gap=g)
            rep.checked += 1
    lengths = reachable_lengths(3, k_max)
    if 2 in lengths:
        rep.fail("length 2 reachable by ternary Merge")
    brute = {t.n_leaves for k in range(1, 4) for t in enumerate_nary_trees(["x"], 3, k)}
    if brute != {x for x in lengths if x <= 7}:
        rep.fail("reachable lengths vs enumeration", brute=sorted(brute))
    rep.details = {"gaps": {str(n): [undergeneration_gap(n, k, 1) for k in range(1, k_max + 1)] for n in ns},
                   "reachable_3": sorted(lengths)}
    return rep


def _caterpillar(n: int, k: int):
    t = node(*[leaf(f"l{i}") for i in range(n)])
    for j in range(1, k):
        t = node(t, *[leaf(f"l{j}_{i}") for i in range(n - 1)])
    return t


def verify_overgen(ns: Sequence[int] = (3, 4, 5), k_max: int = 6, brute_k: int = 3) -> Report:
    rep = Report("overgen", {"ns": list(ns), "k_max": k_max, "brute_k": brute_k})
    for n in ns:
        for k in range(1, k_max + 1):
            c = overgeneration_counts(n, k)
            if not c.holds:
                rep.fail("strict inequality", n=n, k=k, tuples=c.nary_tuples, binary=c.binary_nonroot)
            if k <= brute_k:
                t = _caterpillar(n, k)
                nonroot = [p for p, _ in t.vertices() if p]
                internal = [p for p, s in t.vertices() if p and not s.is_leaf]
                tuples = sum(1 for _ in permutations(nonroot, n - 1))
                tuples_o = sum(1 for _ in permutations(internal, n - 1))
                b = trees_with_leaves(["x"], c.leaves)[0]
                b_nonroot = sum(1 for p, _ in b.vertices() if p)
                if (tuples, len(nonroot), tuples_o, len(internal), b_nonroot) != (
                        c.nary_tuples, c.nary_nonroot, c.nary_tuples_o, c.nary_nonroot_nonleaf,
                        c.binary_nonroot):
                    rep.fail("brute-force tuple count", n=n, k=k)
            rep.checked += 1
    # the ternary fixture
    al, be, ga, de, et = (leaf(x) for x in ("α", "β", "γ", "δ", "η"))
    abc = node(al, be, ga)
    F = Forest([node(al, be, ga), de, et])
    ext = nary_merge_op((abc, de, et), F)
    if str(ext) != "1*{δ η {α β γ}}":
        rep.fail("External ternary fixture", got=ext)
    unit = parse_tree("1")
    step = nary_merge_op((al, unit, unit), F)
    (g1,) = step.terms
    step = nary_merge_op((be, unit, unit), g1)
    (g2,) = step.terms
    internal = nary_merge_op((al, be, abc), g2)
    want = Forest([de, et, node(al, be, abc)])
    if set(internal.terms) != {want}:
        rep.fail("internal ternary fixture", got=internal)
    rep.details = {"external": str(ext), "internal": str(internal)}
    return rep


# -- externalization -----------------------------------------------------------------------

def sample_languages() -> list:
    return [
        LanguageSpec(name="head-initial"),
        LanguageSpec(pi=(1, 1), m=1, name="head-final",
                     filters=(Filter.make(1, "max_depth", k=4),),
                     order=OrderParams(("b", "a", "c"), "precedence")),
        LanguageSpec(pi=(0, 1, 1), m=1, name="rightmost-head",
                     filters=(Filter.make(1, "forbid_adjacent", pair=["a", "a"]),
                              Filter.make(2, "max_leaves", k=5)),
                     order=OrderParams(("c",), "rightmost")),
    ]


def verify_external(labels=("a", "b", "c"), max_leaves: int = 6, fiber_max: int = 8,
                    samples: int = 200, seed: int = 0) -> Report:
    rep = Report("external", {"labels": list(labels), "max_leaves": max_leaves,
                              "fiber_max": fiber_max, "samples": samples, "seed": seed})
    trees = enumerate_trees(labels, max_leaves)
    for L in sample_languages():
        for t in trees:
            if project(section(t, L)) is not t:
                rep.fail("project o section", language=L.name, tree=t)
            rep.checked += 1
    for ell in range(1, fiber_max + 1):
        fib = fiber_sizes(["x"], ell)
        if sum(fib.values()) != catalan(ell - 1) or set(fib) != set(trees_with_leaves(["x"], ell)):
            rep.fail("fiber sizes", grade=ell)
        rep.checked += 1
    for ell in range(1, max_leaves + 1):
        for p in enumerate_planar(labels[:2], ell):
            w = malcev_encode(p)
            if malcev_decode(w) != p or len(w.split()) != 2 * ell - 1:
                rep.fail("Malcev round trip", tree=p)
            rep.checked += 1
    fixture = parse_planar("(α ((β γ) δ))")
    if malcev_encode(fixture) != "c α c c β γ δ" or malcev_encode(fixture, compact=True) != "c α c² β γ δ":
        rep.fail("Malcev fixture", got=malcev_encode(fixture))
    rng = random.Random(seed)
    langs = sample_languages()
    for i in range(samples):
        T = random_planar(rng, labels, rng.randint(1, 3))
        F = random_planar_forest(rng, labels, 5)
        a, b = pl_square(T, F)
        if a != b:
            rep.fail("planar square", T=T, F=F)
        L = langs[i % len(langs)]
        while not (passes(T, L) and filter(F, L).accepted):
            T = random_planar(rng, labels, rng.randint(1, 3))
            F = random_planar_forest(rng, labels, 5)
        a, b = partial_square(T, F, L)
        if a != b:
            rep.fail("restricted square", T=T, F=F, language=L.name)
        rep.checked += 1
    rep.details = {"fixture": malcev_encode(fixture), "fixture_compact": malcev_encode(fixture, compact=True)}
    return rep


SUITES = {
    "coassoc": verify_coassoc,
    "compat": verify_compat,
    "antipode": verify_antipode,
    "tables": verify_tables,
    "yn": verify_yn,
    "minimal-search": verify_minimal_search,
    "ds": verify_ds,
    "catalan": verify_catalan,
    "overgen": verify_overgen,
    "external": verify_external,
}
