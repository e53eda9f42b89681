"""Merge acting on workspaces.

``merge_op(S, S2, F)`` searches the workspace for copies of ``S`` and ``S2``
(as whole components or accessible terms of *different* components), merges
each matching pair and keeps the quotient remainders, so the deeper copies are
cancelled.  Every matching extraction contributes one term of a formal sum.

The depth-weighted version ``merge_eps`` tags extracted terms with ``+depth``
and the quotients they leave behind with ``-depth``; ``minimal_search_limit``
keeps the workspaces in which every component has degree zero.

Forms of Merge (External, Internal, Sideward, Countercyclic, unary extraction)
are classified from an occurrence pair, built directly by
``apply_merge_case`` and compared against the published size-change tables by
``size_delta``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .algebra import LinComb, Tensor
from .errors import AddressError, InvariantViolation, PreconditionError
from .syntax import (
    EMPTY, Counts, Forest, SynTree, UNIT, _MutVertex, as_forest, counts, forest_quotient,
    format_path, merge, node, parse_forest, parse_tree, sequential_quotient,
)


class FormKind(str, Enum):
    EXTERNAL = "External"
    INTERNAL = "Internal"
    SIDEWARD_2B = "Sideward2b"
    SIDEWARD_3B = "Sideward3b"
    COUNTERCYCLIC_I = "CountercyclicI"
    COUNTERCYCLIC_II = "CountercyclicII"
    COUNTERCYCLIC_III = "CountercyclicIII"
    UNARY_EXTRACT = "UnaryExtract"

    def __str__(self) -> str:
        return self.value


BAD_FORMS = (FormKind.SIDEWARD_3B, FormKind.SIDEWARD_2B, FormKind.COUNTERCYCLIC_I,
             FormKind.COUNTERCYCLIC_II, FormKind.COUNTERCYCLIC_III)


@dataclass(frozen=True)
class MergeForm:
    """A form of Merge plus the occurrences it acts on.

    ``first``/``second`` are ``(component, path)`` pairs; ``second`` is None for
    a unary extraction.  For Internal and Sideward 2b, ``first`` is the whole
    component.  For Countercyclic, ``first`` is v and ``second`` is w.
    """
    variant: FormKind
    first: tuple
    second: Optional[tuple] = None

    def to_json(self) -> dict:
        occ = [self.first] + ([self.second] if self.second is not None else [])
        return {"variant": self.variant.value,
                "occurrences": [{"component": a, "path": list(p)} for a, p in occ]}


def _occ(o) -> tuple:
    a, p = o
    return (int(a), tuple(p))


def _resolve(F: Forest, o) -> SynTree:
    a, p = o
    if not 0 <= a < len(F.trees):
        raise AddressError(f"no component {a} in a workspace with {len(F.trees)} components")
    return F.trees[a].subtree(p)


def _is_prefix(p, q) -> bool:
    return len(p) < len(q) and q[:len(p)] == p


def classify_form(F, first, second=None) -> MergeForm:
    """Case analysis by component equality and path nesting."""
    F = as_forest(F)
    first = _occ(first)
    _resolve(F, first)
    if second is None:
        if not first[1]:
            raise PreconditionError("M(T, 1) on a whole component is the identity, not a form of Merge")
        return MergeForm(FormKind.UNARY_EXTRACT, first)
    second = _occ(second)
    _resolve(F, second)
    (a, p), (b, q) = first, second
    if a != b:
        if not p and not q:
            return MergeForm(FormKind.EXTERNAL, first, second)
        if not p:
            return MergeForm(FormKind.SIDEWARD_2B, first, second)
        if not q:
            return MergeForm(FormKind.SIDEWARD_2B, second, first)
        return MergeForm(FormKind.SIDEWARD_3B, first, second)
    if p == q:
        raise PreconditionError("the two occurrences coincide")
    if not p:
        return MergeForm(FormKind.INTERNAL, first, second)
    if not q:
        return MergeForm(FormKind.INTERNAL, second, first)
    if _is_prefix(p, q):
        return MergeForm(FormKind.COUNTERCYCLIC_I, first, second)
    if _is_prefix(q, p):
        return MergeForm(FormKind.COUNTERCYCLIC_II, first, second)
    if len(p) == 1 and len(q) == 1:
        # the two children of the root: M(alpha, beta) rebuilds T and alpha = T/beta
        return MergeForm(FormKind.INTERNAL, (a, ()), second)
    return MergeForm(FormKind.COUNTERCYCLIC_III, first, second)


def apply_extraction(F: Forest, ext: Sequence[tuple]) -> Forest:
    """Merge the subtrees at ``ext`` (one or two occurrences) and quotient them out."""
    subs = [_resolve(F, o) for o in ext]
    merged = subs[0] if len(subs) == 1 else merge(subs[0], subs[1])
    return forest_quotient(F, ext) | merged


def apply_merge_case(form: MergeForm, F) -> Forest:
    """Build F' for the given form directly from the case formulas."""
    F = as_forest(F)
    expect = classify_form(F, form.first, form.second)
    if expect != form:
        raise PreconditionError(f"occurrences describe {expect.variant}, not {form.variant}")
    kind = form.variant
    if kind is FormKind.INTERNAL:
        a, beta_path = form.second
        T = F.trees[a]
        beta = T.subtree(beta_path)
        return Forest(F.without([a])) | merge(beta, forest_quotient(T, [beta_path]))
    if kind is FormKind.UNARY_EXTRACT:
        return apply_extraction(F, [form.first])
    alpha, beta = _resolve(F, form.first), _resolve(F, form.second)
    if kind is FormKind.COUNTERCYCLIC_I:
        removed = [form.first]
    elif kind is FormKind.COUNTERCYCLIC_II:
        removed = [form.second]
    else:
        removed = [form.first, form.second]
    return forest_quotient(F, removed) | merge(alpha, beta)


def expected_delta(form: MergeForm, F) -> tuple:
    """The published size-change row for ``form`` on ``F``."""
    F = as_forest(F)
    kind = form.variant
    if kind is FormKind.EXTERNAL:
        return (-1, 2, 1, 0)
    if kind is FormKind.INTERNAL:
        return (0, 0, 0, 0)
    if kind is FormKind.SIDEWARD_3B:
        return (1, 0, 1, 2)
    if kind is FormKind.SIDEWARD_2B:
        return (0, 1, 1, 1)
    if kind in (FormKind.COUNTERCYCLIC_I, FormKind.COUNTERCYCLIC_II):
        inner = _resolve(F, form.second if kind is FormKind.COUNTERCYCLIC_I else form.first)
        s = inner.n_vertices
        return (1, s - 1, s, s + 1)
    return (1, -2, -1, 0)


def size_delta(form: MergeForm, F, check: bool = True) -> tuple:
    """counts(F') - counts(F) as (b0, acc, sigma, sigma_hat).

    With ``check`` the result is compared with :func:`expected_delta` and a
    mismatch raises :class:`InvariantViolation`.
    """
    F = as_forest(F)
    got = counts(apply_merge_case(form, F)) - counts(F)
    if check:
        want = expected_delta(form, F)
        if got != want:
            raise InvariantViolation(
                f"{form.variant} on {F}: computed {got}, table row {want}")
    return got


CONSTRAINTS = ("db0<=0", "dacc>=0", "0<=dsigma<=1", "dsigma_hat==0")


def check_constraints(delta: Sequence[int]) -> dict:
    db0, dacc, dsigma, dhat = delta
    return {"db0<=0": db0 <= 0, "dacc>=0": dacc >= 0,
            "0<=dsigma<=1": 0 <= dsigma <= 1, "dsigma_hat==0": dhat == 0}


def constraint_check(form: MergeForm, F) -> dict:
    return check_constraints(size_delta(form, F, check=False))


# -- the Merge action ----------------------------------------------------------

def b_plus(f) -> SynTree:
    """Graft the component roots onto a new root. Unit rules for 0 or 1 component."""
    f = as_forest(f)
    if not f.trees:
        return UNIT
    if len(f.trees) == 1:
        return f.trees[0]
    return node(*f.trees)


def occurrences(F: Forest, S: SynTree) -> list:
    """Every ``(component, path)`` whose subtree is a copy of ``S``."""
    return [occ for occ, s in F.vertices() if s is S]


def extraction_sets(S: SynTree, S2: SynTree, F: Forest) -> list:
    """Matching extraction sets for M_{S,S2}: occurrences in distinct components.

    Each set is listed once, so S = S2 is not double counted.
    """
    if S.is_unit:
        S, S2 = S2, S
    if S.is_unit:
        return []
    ps = occurrences(F, S)
    if S2.is_unit:
        return [(p,) for p in ps]
    qs = occurrences(F, S2)
    seen, out = set(), []
    for p in ps:
        for q in qs:
            if p[0] == q[0]:
                continue
            key = frozenset((p, q))
            if key not in seen:
                seen.add(key)
                out.append((p, q))
    return out


def delta_match(S: SynTree, S2: SynTree, term: tuple, F) -> Tensor:
    """The matched part of delta_{S,S2} on one coproduct term ``(F_v, F/F_v)`` of ``F``.

    Pairs that are not of the form (matched extraction, its quotient) give 0.
    """
    F = as_forest(F)
    left, right = term
    acc = 0
    for ext in extraction_sets(S, S2, F):
        e = Forest(_resolve(F, o) for o in ext)
        if e == left and forest_quotient(F, ext) == right:
            acc += 1
    return Tensor({(left, right): acc})


def delta_apply(S: SynTree, S2: SynTree, F) -> Tensor:
    """delta_{S,S2} applied to the whole coproduct of F; ``1 (x) F`` once if nothing matches."""
    F = as_forest(F)
    sets = extraction_sets(S, S2, F)
    if not sets:
        return Tensor({(EMPTY, F): 1})
    acc: dict = {}
    for ext in sets:
        key = (Forest(_resolve(F, o) for o in ext), forest_quotient(F, ext))
        acc[key] = acc.get(key, 0) + 1
    return Tensor(acc)


def merge_op(S: SynTree, S2: SynTree, F) -> LinComb:
    """M_{S,S2}(F) = union o (B+ (x) id) o delta_{S,S2} o coproduct."""
    acc: dict = {}
    for (e, q), c in delta_apply(S, S2, as_forest(F)).terms.items():
        k = q | b_plus(e)
        acc[k] = acc.get(k, 0) + c
    return LinComb(acc)


def merge_op_terms(S: SynTree, S2: SynTree, F) -> list:
    """``(extraction, F')`` for each matching extraction set, without collecting."""
    F = as_forest(F)
    return [(ext, apply_extraction(F, ext)) for ext in extraction_sets(S, S2, F)]


def internal_merge(beta, F) -> LinComb:
    """Replace the component T holding ``beta`` by M(beta, T/beta)."""
    F = as_forest(F)
    a, p = _occ(beta)
    if not p:
        raise PreconditionError("internal merge needs a proper accessible term; "
                                "use external merge on a whole component")
    _resolve(F, (a, p))
    form = MergeForm(FormKind.INTERNAL, (a, ()), (a, p))
    return LinComb.single(apply_merge_case(form, F))


def relocate(t: SynTree, removed: Sequence[tuple], target: tuple) -> tuple:
    """Path of ``target`` inside ``sequential_quotient(t, removed)``."""
    for p in removed:
        if target[:len(p)] == p:
            raise PreconditionError("target lies inside a removed subtree")
    root = _MutVertex(t, None)

    def find(p):
        v = root
        for s in p:
            v = v.kids[s]
        return v

    goal = find(target)
    for v in [find(p) for p in removed]:
        parent = v.parent
        parent.kids = [k for k in parent.kids if k is not v]
        if len(parent.kids) == 1:
            only = parent.kids[0]
            only.parent = parent.parent
            if parent.parent is None:
                root = only
            else:
                parent.parent.kids = [only if k is parent else k for k in parent.parent.kids]
    chain = []
    v = goal
    while v is not root:
        chain.append(v)
        v = v.parent
    path = []
    cur = root
    for v in reversed(chain):
        frozen = cur.freeze()
        sub = v.freeze()
        path.append(frozen.children.index(sub))
        cur = v
    return tuple(path)


def internal_merge_by_composition(beta, F) -> Forest:
    """M_{T/beta, beta} o M_{beta, 1} restricted to the designated occurrence."""
    F = as_forest(F)
    a, p = _occ(beta)
    T = F.trees[a]
    step1 = apply_extraction(F, [(a, p)])
    b_tree, q_tree = T.subtree(p), forest_quotient(T, [p])
    i = step1.trees.index(b_tree)
    j = next(k for k, t in enumerate(step1.trees) if t is q_tree and k != i)
    return apply_extraction(step1, [(j, ()), (i, ())])


def countercyclic_by_composition(form: MergeForm, F) -> Forest:
    """M_{alpha,beta} o M_{alpha,1} o M_{beta,1} on the designated occurrences (case iii)."""
    F = as_forest(F)
    if form.variant is not FormKind.COUNTERCYCLIC_III:
        raise PreconditionError("the three-step composition only applies to disjoint occurrences")
    (a, v), (_, w) = form.first, form.second
    T = F.trees[a]
    alpha, beta = T.subtree(v), T.subtree(w)
    step1 = apply_extraction(F, [(a, w)])
    q1 = forest_quotient(T, [w])
    v1 = relocate(T, [w], v)
    ia = next(k for k, t in enumerate(step1.trees) if t is q1)
    step2 = apply_extraction(step1, [(ia, v1)])
    ib = step2.trees.index(beta)
    ja = next(k for k, t in enumerate(step2.trees) if t is alpha and k != ib)
    return apply_extraction(step2, [(ja, ()), (ib, ())])


# -- depth weights and Minimal Search -----------------------------------------

class WeightedWorkspace:
    """Components tagged with integer powers of the formal parameter epsilon."""

    __slots__ = ("components", "_hash")

    def __init__(self, components=()):
        comps = [(t, int(d)) for t, d in components if not t.is_unit]
        comps.sort(key=lambda c: (c[0].sort_key, c[1]))
        self.components = tuple(comps)
        self._hash = hash(self.components)

    @classmethod
    def from_forest(cls, F) -> "WeightedWorkspace":
        return cls((t, 0) for t in as_forest(F).trees)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, WeightedWorkspace) and self.components == other.components

    def __len__(self):
        return len(self.components)

    @property
    def forest(self) -> Forest:
        return Forest(t for t, _ in self.components)

    @property
    def degrees(self) -> tuple:
        return tuple(d for _, d in self.components)

    @property
    def total_degree(self) -> int:
        """Sum of absolute degrees; zero exactly when every component survives epsilon -> 0."""
        return sum(abs(d) for _, d in self.components)

    @property
    def sort_key(self):
        return tuple((t.sort_key, d) for t, d in self.components)

    def __str__(self):
        if not self.components:
            return "1"
        return " | ".join(f"{t}@{d}" for t, d in self.components)

    def __repr__(self):
        return f"WeightedWorkspace({str(self)!r})"


def _eps_apply(W: WeightedWorkspace, ext: Sequence[tuple]) -> WeightedWorkspace:
    F = W.forest
    subs, out_deg = [], 0
    by_comp: dict = {}
    for a, p in ext:
        subs.append(F.trees[a].subtree(p))
        out_deg += W.components[a][1] + len(p)
        by_comp.setdefault(a, []).append(p)
    merged = subs[0] if len(subs) == 1 else merge(subs[0], subs[1])
    comps = []
    for a, (t, d) in enumerate(W.components):
        if a in by_comp:
            paths = by_comp[a]
            comps.append((forest_quotient(t, paths), d - sum(len(p) for p in paths)))
        else:
            comps.append((t, d))
    comps.append((merged, abs(out_deg)))
    return WeightedWorkspace(comps)


def eps_moves(W: WeightedWorkspace) -> list:
    """Every single-shot extraction on W: ``(ext, W')``.

    Unary moves extract one occurrence (merged with the unit); binary moves take
    two occurrences in different components.
    """
    F = W.forest
    verts = [occ for occ, _ in F.vertices()]
    out = [((o,), _eps_apply(W, (o,))) for o in verts]
    for i, p in enumerate(verts):
        for q in verts[i + 1:]:
            if p[0] != q[0]:
                out.append(((p, q), _eps_apply(W, (p, q))))
    return out


def merge_eps(S: SynTree, S2: SynTree, W) -> LinComb:
    """The depth-weighted Merge action on a weighted workspace."""
    if not isinstance(W, WeightedWorkspace):
        W = WeightedWorkspace.from_forest(W)
    sets = extraction_sets(S, S2, W.forest)
    if not sets:
        return LinComb.single(W)
    acc: dict = {}
    for ext in sets:
        k = _eps_apply(W, ext)
        acc[k] = acc.get(k, 0) + 1
    return LinComb(acc)


def minimal_search_limit(x: LinComb) -> LinComb:
    """Keep workspaces whose components all have degree 0; drop the degrees."""
    acc: dict = {}
    for W, c in x.terms.items():
        if W.total_degree == 0:
            acc[W.forest] = acc.get(W.forest, 0) + c
    return LinComb(acc)


def form_degree(form: MergeForm, F) -> int:
    """Degree of the merged component when ``form`` acts on a degree-0 workspace."""
    F = as_forest(F)
    if form.variant is FormKind.INTERNAL:
        return 0
    d = len(form.first[1])
    if form.second is not None:
        d += len(form.second[1])
    return d


# -- representation --------------------------------------------------------------

def rho(T: SynTree, F) -> LinComb:
    """Sum over vertices v of components T_a of M(T, T_{a,v}) | F/T_{a,v}."""
    F = as_forest(F)
    acc: dict = {}
    for occ, s in F.vertices():
        k = forest_quotient(F, [occ]) | merge(T, s)
        acc[k] = acc.get(k, 0) + 1
    return LinComb(acc)


def rho_on_extractions(T: SynTree, F) -> LinComb:
    """rho(T) applied to F/T_u for every occurrence u of T in F.

    This is rho restricted to workspaces containing T: the copy of T that is
    merged is the one extracted from F.
    """
    F = as_forest(F)
    out = LinComb()
    for occ in occurrences(F, T):
        out = out + rho(T, forest_quotient(F, [occ]))
    return out


# -- derivations -----------------------------------------------------------------

@dataclass
class DerivationStep:
    index: int
    operator: dict
    occurrence: list
    form: Optional[str]
    before: Forest
    result: LinComb
    after: Forest
    counts_before: Counts
    counts_after: Counts

    @property
    def deltas(self) -> tuple:
        return self.counts_after - self.counts_before

    @property
    def constraints(self) -> dict:
        return check_constraints(self.deltas)

    def to_json(self) -> dict:
        return {
            "step": self.index,
            "operator": self.operator,
            "occurrence": [{"component": a, "path": list(p)} for a, p in self.occurrence],
            "form": self.form,
            "before": str(self.before),
            "after": str(self.after),
            "result": self.result.to_json(),
            "counts_before": self.counts_before.to_json(),
            "counts_after": self.counts_after.to_json(),
            "deltas": list(self.deltas),
            "constraints": self.constraints,
        }


@dataclass
class Derivation:
    initial: Forest
    steps: list = field(default_factory=list)

    @property
    def final(self) -> Forest:
        return self.steps[-1].after if self.steps else self.initial

    def to_json(self) -> dict:
        return {"initial": str(self.initial), "final": str(self.final),
                "steps": [s.to_json() for s in self.steps]}


def _tree_arg(x) -> SynTree:
    if isinstance(x, SynTree):
        return x
    if x is None:
        return UNIT
    return parse_tree(str(x))


def _occ_list(x) -> list:
    if x is None:
        return []
    if len(x) == 2 and isinstance(x[0], int):
        return [_occ(x)]
    return [_occ(o) for o in x]


def derive(initial, steps: Sequence[dict]) -> Derivation:
    """Replay a sequence of operator specs, choosing one branch per step.

    Step specs are dicts with ``op`` in {"merge", "internal", "case"}:

    - ``{"op": "merge", "S": ..., "S2": ..., "occurrence": [[a, path], ...]}``
    - ``{"op": "internal", "occurrence": [a, path]}``
    - ``{"op": "case", "form": "Sideward2b", "occurrence": [[a, p], [b, q]]}``

    The occurrence selector is needed only when a merge has several distinct
    outcomes; otherwise the unique outcome is taken.
    """
    F = as_forest(initial) if not isinstance(initial, str) else parse_forest(initial)
    d = Derivation(F)
    for i, spec in enumerate(steps, 1):
        op = spec.get("op", "merge")
        sel = _occ_list(spec.get("occurrence"))
        before = F
        if op == "merge":
            S, S2 = _tree_arg(spec.get("S")), _tree_arg(spec.get("S2"))
            operator = {"S": str(S), "S'": str(S2)}
            result = merge_op(S, S2, before)
            branches = merge_op_terms(S, S2, before)
            if not branches:
                after, ext = before, []
            elif sel:
                chosen = [b for b in branches if set(b[0]) == set(sel)]
                if not chosen:
                    raise PreconditionError(f"step {i}: selector {sel} matches no extraction")
                ext, after = chosen[0]
            else:
                outcomes = {b[1] for b in branches}
                if len(outcomes) > 1:
                    cands = "; ".join(
                        f"{[(a, format_path(p)) for a, p in e]} -> {f}" for e, f in branches)
                    raise PreconditionError(f"step {i}: ambiguous merge, candidates: {cands}")
                ext, after = branches[0]
            ext = list(ext)
            form = None
            if ext:
                try:
                    form = classify_form(before, *ext).variant.value
                except PreconditionError:
                    form = "Identity"
        elif op == "internal":
            if len(sel) != 1:
                raise PreconditionError(f"step {i}: internal merge needs one occurrence")
            result = internal_merge(sel[0], before)
            after = result.support()[0]
            ext = sel
            operator = {"S": str(_resolve(before, sel[0])), "S'": "T/S"}
            form = FormKind.INTERNAL.value
        elif op == "case":
            f = MergeForm(FormKind(spec["form"]), *sel)
            after = apply_merge_case(f, before)
            result = LinComb.single(after)
            ext = sel
            operator = {"S": str(_resolve(before, sel[0])),
                        "S'": str(_resolve(before, sel[1])) if len(sel) > 1 else "1"}
            form = f.variant.value
        else:
            raise PreconditionError(f"step {i}: unknown op {op!r}")
        d.steps.append(DerivationStep(i, operator, ext, form, before, result, after,
                                      counts(before), counts(after)))
        F = after
    return d


def load_script(text: str) -> tuple:
    """Parse a derivation script: ``{"initial": "...", "steps": [...]}``."""
    data = json.loads(text)
    return parse_forest(data["initial"]), data.get("steps", [])
