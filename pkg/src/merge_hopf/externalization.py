"""Planar trees and the road from abstract trees to word order.

A planar tree keeps its child order.  ``project`` forgets it, ``section``
chooses one planar embedding per abstract tree using a language's order
parameters, and ``filter`` keeps only the planar forests a language admits.
The restricted operations (``restricted_merge``, ``restricted_rho``) are the
partial versions of non-commutative Merge and its action on workspaces.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

from .algebra import LinComb
from .errors import ConfigurationError, ParseError, PreconditionError
from .merge import rho
from .syntax import Forest, SynTree, _Reader, check_label, leaf, merge


class PlanarTree:
    """Binary tree with ordered children; a leaf has ``label`` and no children."""

    __slots__ = ("label", "left", "right", "encoding", "n_leaves", "_hash")

    def __init__(self, label: str = None, left: "PlanarTree" = None, right: "PlanarTree" = None):
        if label is not None:
            if left is not None or right is not None:
                raise PreconditionError("a planar leaf has no children")
            self.label, self.left, self.right = label, None, None
            self.encoding = label
            self.n_leaves = 1
        else:
            if left is None or right is None:
                raise PreconditionError("a planar node needs two children")
            self.label, self.left, self.right = None, left, right
            self.encoding = f"({left.encoding} {right.encoding})"
            self.n_leaves = left.n_leaves + right.n_leaves
        self._hash = hash(self.encoding)

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    @property
    def children(self) -> tuple:
        return () if self.is_leaf else (self.left, self.right)

    def __eq__(self, other):
        return isinstance(other, PlanarTree) and self.encoding == other.encoding

    def __hash__(self):
        return self._hash

    def __str__(self):
        return self.encoding

    def __repr__(self):
        return f"PlanarTree({self.encoding!r})"

    def leaves(self) -> list:
        """Leaf labels left to right: the linearized sentence."""
        if self.is_leaf:
            return [self.label]
        return self.left.leaves() + self.right.leaves()

    def depth(self) -> int:
        """Longest root-to-leaf path, counted in edges."""
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def vertices(self):
        """``(path, subtree)`` preorder; path steps are 0 for left, 1 for right."""
        stack = [((), self)]
        while stack:
            path, t = stack.pop()
            yield path, t
            if not t.is_leaf:
                stack.append((path + (1,), t.right))
                stack.append((path + (0,), t.left))

    def subtree(self, path: Sequence[int]) -> "PlanarTree":
        t = self
        for step in path:
            t = t.children[step]
        return t


def pleaf(label: str) -> PlanarTree:
    return PlanarTree(check_label(label))


def nc_merge(a: PlanarTree, b: PlanarTree) -> PlanarTree:
    """Order-preserving pairing: ``nc_merge(a, b) = (a b)``."""
    return PlanarTree(None, a, b)


@dataclass(frozen=True)
class PlanarForest:
    trees: tuple = ()

    def __iter__(self):
        return iter(self.trees)

    def __len__(self):
        return len(self.trees)

    def __or__(self, other: "PlanarForest") -> "PlanarForest":
        return PlanarForest(self.trees + other.trees)

    @property
    def encoding(self) -> str:
        return " | ".join(t.encoding for t in self.trees) if self.trees else "1"

    def __str__(self):
        return self.encoding


def as_planar_forest(x) -> PlanarForest:
    if isinstance(x, PlanarForest):
        return x
    if isinstance(x, PlanarTree):
        return PlanarForest((x,))
    return PlanarForest(tuple(x))


# -- text --------------------------------------------------------------------

def _planar(r: _Reader) -> PlanarTree:
    ch = r.peek()
    if ch == "(":
        start = r.pos
        r.pos += 1
        kids = []
        while r.peek() not in (")", ""):
            kids.append(_planar(r))
        r.expect(")")
        if len(kids) != 2:
            r.fail(f"planar node has {len(kids)} children, expected 2", start)
        return PlanarTree(None, *kids)
    if ch in ("", ")", "|"):
        r.fail("expected a planar tree")
    start = r.pos
    word = r.label()
    if word == "1":
        r.fail("the unit is not a planar tree", start)
    return PlanarTree(word)


def parse_planar(text: str, lexicon=None) -> PlanarTree:
    """Parse ``a`` or ``(t t)``; child order is kept as written."""
    r = _Reader(text, lexicon, 2, planar=True)
    t = _planar(r)
    r.done()
    return t


def parse_planar_forest(text: str, lexicon=None) -> PlanarForest:
    r = _Reader(text, lexicon, 2, planar=True)
    if r.peek() == "1":
        r.pos += 1
        r.done()
        return PlanarForest()
    trees = [_planar(r)]
    while r.peek() == "|":
        r.pos += 1
        trees.append(_planar(r))
    r.done()
    return PlanarForest(tuple(trees))


# -- projection and planar enumeration ------------------------------------------

def project(p):
    """Forget the planar embedding (trees map to SynTree, forests to Forest)."""
    if isinstance(p, PlanarForest):
        return Forest(project(t) for t in p.trees)
    if p.is_leaf:
        return leaf(p.label)
    return merge(project(p.left), project(p.right))


@lru_cache(maxsize=None)
def _planar_at(labels: tuple, n: int) -> tuple:
    if n == 1:
        return tuple(PlanarTree(x) for x in labels)
    out = []
    for i in range(1, n):
        for a in _planar_at(labels, i):
            for b in _planar_at(labels, n - i):
                out.append(PlanarTree(None, a, b))
    return tuple(out)


def enumerate_planar(labels: Sequence[str], n_leaves: int) -> list:
    """All planar binary trees with exactly ``n_leaves`` leaves."""
    if n_leaves < 1:
        return []
    return list(_planar_at(tuple(check_label(x) for x in labels), n_leaves))


def embeddings(t: SynTree) -> list:
    """All planar trees projecting to ``t``."""
    if t.is_leaf:
        return [PlanarTree(t.label)]
    a, b = t.children
    ea, eb = embeddings(a), embeddings(b)
    out = [PlanarTree(None, x, y) for x in ea for y in eb]
    if a is not b:
        out += [PlanarTree(None, y, x) for x in ea for y in eb]
    return out


def fiber_sizes(labels: Sequence[str], n_leaves: int) -> dict:
    """Brute-force |Pi^{-1}(T)| for every abstract tree T with ``n_leaves`` leaves."""
    out: dict = {}
    for p in enumerate_planar(labels, n_leaves):
        t = project(p)
        out[t] = out.get(t, 0) + 1
    return out


# -- language specification ------------------------------------------------------

HEAD_RULES = ("leftmost", "rightmost", "precedence")


@dataclass(frozen=True)
class OrderParams:
    """How ``section`` orders two sisters.

    Each sister's head label is looked up in ``precedence`` (labels not listed
    come after all listed ones); ties fall back to canonical-encoding order.
    ``reverse`` flips the result (head-final).
    """
    precedence: tuple = ()
    head_rule: str = "leftmost"
    reverse: bool = False

    def __post_init__(self):
        if self.head_rule not in HEAD_RULES:
            raise ConfigurationError(f"unknown head rule {self.head_rule!r}; use one of {HEAD_RULES}")

    def _rank(self, label: str) -> int:
        try:
            return self.precedence.index(label)
        except ValueError:
            return len(self.precedence)

    def head(self, t: SynTree) -> str:
        if t.is_leaf:
            return t.label
        if self.head_rule == "leftmost":
            return self.head(t.children[0])
        if self.head_rule == "rightmost":
            return self.head(t.children[-1])
        labels = [s.label for _, s in t.vertices() if s.is_leaf]
        return min(labels, key=lambda x: (self._rank(x), x))

    def key(self, t: SynTree) -> tuple:
        return (self._rank(self.head(t)), t.sort_key)

    def order(self, a: SynTree, b: SynTree) -> tuple:
        first, second = (a, b) if self.key(a) <= self.key(b) else (b, a)
        return (second, first) if self.reverse else (first, second)


FILTER_KINDS = ("max_depth", "max_leaves", "forbid_subtree", "forbid_adjacent")


@dataclass(frozen=True)
class Filter:
    """A per-bit predicate. Every kind is closed under taking subtrees.

    ``max_depth``: {"k": int}, depth in edges from the root.
    ``max_leaves``: {"k": int}.
    ``forbid_subtree``: {"pattern": planar text}, no vertex may carry this subtree.
    ``forbid_adjacent``: {"pair": [x, y]}, x may not be immediately followed by y.
    """
    bit: int
    kind: str
    args: tuple = ()

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ConfigurationError(f"unknown filter kind {self.kind!r}; use one of {FILTER_KINDS}")
        a = dict(self.args)
        need = {"max_depth": "k", "max_leaves": "k", "forbid_subtree": "pattern",
                "forbid_adjacent": "pair"}[self.kind]
        if need not in a:
            raise ConfigurationError(f"filter {self.kind} needs argument {need!r}")

    @classmethod
    def make(cls, bit: int, kind: str, **args) -> "Filter":
        return cls(bit, kind, tuple(sorted((k, tuple(v) if isinstance(v, list) else v)
                                           for k, v in args.items())))

    def accepts(self, p: PlanarTree) -> bool:
        a = dict(self.args)
        if self.kind == "max_depth":
            return p.depth() <= a["k"]
        if self.kind == "max_leaves":
            return p.n_leaves <= a["k"]
        if self.kind == "forbid_subtree":
            pat = a["pattern"]
            pat = pat.encoding if isinstance(pat, PlanarTree) else parse_planar(pat).encoding
            return all(s.encoding != pat for _, s in p.vertices())
        x, y = a["pair"]
        words = p.leaves()
        return not any(u == x and v == y for u, v in zip(words, words[1:]))

    def to_json(self) -> dict:
        return {"bit": self.bit, "kind": self.kind,
                "args": {k: list(v) if isinstance(v, tuple) else v for k, v in self.args}}


@dataclass(frozen=True)
class LanguageSpec:
    """Parameter vector ``pi`` (length N), filters keyed by bit, and order parameters.

    The first ``m`` bits are word-order bits; bit 0 (when m >= 1) set to 1
    makes the order head-final.  A filter is enabled iff its bit is 1.
    """
    pi: tuple = ()
    filters: tuple = ()
    order: OrderParams = field(default_factory=OrderParams)
    m: int = 0
    name: str = "L"

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.pi):
            raise ConfigurationError("pi must be a 0/1 vector")
        if not 0 <= self.m <= len(self.pi):
            raise ConfigurationError("need N >= M >= 0")
        for f in self.filters:
            if not 0 <= f.bit < len(self.pi):
                raise ConfigurationError(f"filter bit {f.bit} outside pi of length {len(self.pi)}")

    @property
    def effective_order(self) -> OrderParams:
        if self.m >= 1 and self.pi[0] == 1:
            o = self.order
            return OrderParams(o.precedence, o.head_rule, not o.reverse)
        return self.order

    @property
    def active(self) -> list:
        return [f for f in self.filters if self.pi[f.bit] == 1]

    def active_bits(self) -> list:
        return sorted({f.bit for f in self.active})

    def to_json(self) -> dict:
        return {"name": self.name, "pi": list(self.pi), "m": self.m,
                "order": {"precedence": list(self.order.precedence),
                          "head_rule": self.order.head_rule, "reverse": self.order.reverse},
                "filters": [f.to_json() for f in self.filters]}

    @classmethod
    def from_json(cls, data: dict) -> "LanguageSpec":
        try:
            order = data.get("order", {})
            filters = tuple(Filter.make(f["bit"], f["kind"], **f.get("args", {}))
                            for f in data.get("filters", []))
            pi = data.get("pi")
            if pi is None:
                # no explicit vector: enable every bit a filter mentions
                n = max((f.bit for f in filters), default=-1) + 1
                pi = [1] * n
            return cls(pi=tuple(pi), filters=filters,
                       order=OrderParams(tuple(order.get("precedence", [])),
                                         order.get("head_rule", "leftmost"),
                                         bool(order.get("reverse", False))),
                       m=int(data.get("m", 0)), name=data.get("name", "L"))
        except (KeyError, TypeError, AttributeError) as e:
            raise ConfigurationError(f"bad language spec: {e}") from None


PERMISSIVE = LanguageSpec()


def load_language(path) -> LanguageSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: {e}") from None
    return LanguageSpec.from_json(data)


# -- section -----------------------------------------------------------------------

def section(t: SynTree, L: LanguageSpec = PERMISSIVE) -> PlanarTree:
    """sigma_L: one planar embedding per abstract tree, chosen by L's order."""
    if t.is_unit:
        raise PreconditionError("the unit has no planar section")
    order = L.effective_order

    def go(s: SynTree) -> PlanarTree:
        if s.is_leaf:
            return PlanarTree(s.label)
        a, b = order.order(*s.children)
        return PlanarTree(None, go(a), go(b))

    return go(t)


def section_forest(f: Forest, L: LanguageSpec = PERMISSIVE) -> PlanarForest:
    return PlanarForest(tuple(section(t, L) for t in f.trees))


def multiplicativity_witness(L: LanguageSpec, labels: Sequence[str] = ("a", "b", "c"),
                             max_leaves: int = 3) -> Optional[tuple]:
    """First (T, T') with section(M(T, T')) != nc_merge(section(T), section(T'))."""
    from .syntax import enumerate_trees
    trees = enumerate_trees(labels, max_leaves)
    for t in trees:
        for u in trees:
            if t.n_leaves + u.n_leaves > max_leaves + 1:
                continue
            lhs = section(merge(t, u), L)
            rhs = nc_merge(section(t, L), section(u, L))
            if lhs != rhs:
                return (t, u, lhs, rhs)
    return None


# -- Malcev words ---------------------------------------------------------------------

_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
_UNSUP = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


def malcev_encode(p: PlanarTree, marker: str = "c", compact: bool = False) -> str:
    """Prefix word: c marks each opening parenthesis, so nc_merge(a, b) = c a b.

    ``compact`` writes runs of markers with a superscript count (``c²``).
    """
    out = []

    def go(t):
        if t.is_leaf:
            if t.label == marker:
                raise PreconditionError(f"label {t.label!r} clashes with the marker")
            out.append(t.label)
        else:
            out.append(marker)
            go(t.left)
            go(t.right)

    go(p)
    if not compact:
        return " ".join(out)
    words, i = [], 0
    while i < len(out):
        if out[i] == marker:
            j = i
            while j < len(out) and out[j] == marker:
                j += 1
            words.append(marker if j - i == 1 else marker + str(j - i).translate(_SUP))
            i = j
        else:
            words.append(out[i])
            i += 1
    return " ".join(words)


def _expand_tokens(text: str, marker: str) -> list:
    toks = []
    for w in text.split():
        if w.startswith(marker) and w != marker:
            rest = w[len(marker):]
            rest = rest[1:] if rest.startswith("^") else rest.translate(_UNSUP)
            if rest.isdigit():
                toks.extend([marker] * int(rest))
                continue
        toks.append(w)
    return toks


def malcev_decode(text: str, marker: str = "c") -> PlanarTree:
    """Inverse of :func:`malcev_encode`; accepts both spelled-out and compact runs."""
    toks = _expand_tokens(text, marker)
    pos = 0

    def fail(msg):
        offset = len(" ".join(toks[:pos]).encode("utf-8")) + (1 if pos else 0)
        raise ParseError(msg, offset)

    def go():
        nonlocal pos
        if pos >= len(toks):
            fail("Malcev word ends early")
        w = toks[pos]
        pos += 1
        if w == marker:
            a = go()
            b = go()
            return PlanarTree(None, a, b)
        return PlanarTree(w)

    t = go()
    if pos != len(toks):
        fail("trailing tokens after a complete Malcev word")
    return t


# -- filtering ----------------------------------------------------------------------

@dataclass(frozen=True)
class FilterOutcome:
    accepted: bool
    forest: PlanarForest
    bit: Optional[int] = None
    component: Optional[int] = None
    kind: Optional[str] = None

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "forest": str(self.forest), "bit": self.bit,
                "component": self.component, "kind": self.kind}


def passes(p: PlanarTree, L: LanguageSpec) -> bool:
    return all(f.accepts(p) for f in L.active)


def filter(p, L: LanguageSpec) -> FilterOutcome:  # noqa: A001 - mirrors the operation name
    """Accept iff every component satisfies every enabled predicate.

    Rejections carry the first failing (bit, component), bits in increasing order.
    """
    p = as_planar_forest(p)
    for f in sorted(L.active, key=lambda f: (f.bit, f.kind)):
        for i, t in enumerate(p.trees):
            if not f.accepts(t):
                return FilterOutcome(False, p, f.bit, i, f.kind)
    return FilterOutcome(True, p)


def restricted_merge(a: PlanarTree, b: PlanarTree, L: LanguageSpec) -> Optional[PlanarTree]:
    """M^{nc,L}: nc_merge when the result passes L's filter, otherwise None (undefined)."""
    if not passes(a, L) or not passes(b, L):
        raise PreconditionError("restricted_merge inputs must pass the filter")
    out = nc_merge(a, b)
    return out if passes(out, L) else None


# -- planar action --------------------------------------------------------------------

def planar_quotient(t: PlanarTree, path: tuple) -> Optional[PlanarTree]:
    """Remove T_v and contract its parent edge; the root gives None (the unit)."""
    if not path:
        return None
    return planar_quotient_child(t, path)


def planar_quotient_child(t: PlanarTree, path: tuple) -> PlanarTree:
    if len(path) == 1:
        return t.right if path[0] == 0 else t.left
    kids = list(t.children)
    kids[path[0]] = planar_quotient_child(kids[path[0]], path[1:])
    return PlanarTree(None, *kids)


def planar_extractions(F: PlanarForest):
    """``(component, path, T_v, F/T_v)`` for every vertex of every component."""
    for a, t in enumerate(F.trees):
        for path, s in t.vertices():
            q = planar_quotient(t, path)
            rest = F.trees[:a] + ((q,) if q is not None else ()) + F.trees[a + 1:]
            yield a, path, s, PlanarForest(rest)


def rho_pl(T: PlanarTree, F) -> LinComb:
    """Sum over vertices v of nc_merge(T, T_v) appended to F/T_v."""
    F = as_planar_forest(F)
    acc: dict = {}
    for _, _, s, rest in planar_extractions(F):
        k = rest | PlanarForest((nc_merge(T, s),))
        acc[k] = acc.get(k, 0) + 1
    return LinComb(acc)


def restricted_coproduct(F, L: LanguageSpec) -> list:
    """Delta_L terms (T_v, F/T_v), keeping those where both sides pass."""
    F = as_planar_forest(F)
    return [(s, rest) for _, _, s, rest in planar_extractions(F)
            if passes(s, L) and filter(rest, L).accepted]


def restricted_rho(T: PlanarTree, F, L: LanguageSpec) -> LinComb:
    """rho^{pl,L}: merge T with each Delta_L subtree where M^{nc,L} is defined."""
    acc: dict = {}
    for s, rest in restricted_coproduct(F, L):
        m = restricted_merge(T, s, L)
        if m is None:
            continue
        k = rest | PlanarForest((m,))
        acc[k] = acc.get(k, 0) + 1
    return LinComb(acc)


def project_lincomb(x: LinComb) -> LinComb:
    return x.map(project)


def filter_lincomb(x: LinComb, L: LanguageSpec) -> LinComb:
    return LinComb({k: c for k, c in x.terms.items() if filter(k, L).accepted})


def pl_square(T: PlanarTree, F) -> tuple:
    """Both paths of the planar square: (Pi o rho^pl, rho o (Pi x Pi))."""
    F = as_planar_forest(F)
    return project_lincomb(rho_pl(T, F)), rho(project(T), project(F))


def partial_square(T: PlanarTree, F, L: LanguageSpec) -> tuple:
    """Both paths of the restricted square: (rho^{pl,L}, Pi_L o rho^pl)."""
    F = as_planar_forest(F)
    return restricted_rho(T, F, L), filter_lincomb(rho_pl(T, F), L)


def random_planar(rng, labels: Sequence[str], n_leaves: int) -> PlanarTree:
    if n_leaves == 1:
        return PlanarTree(rng.choice(list(labels)))
    k = rng.randint(1, n_leaves - 1)
    return PlanarTree(None, random_planar(rng, labels, k), random_planar(rng, labels, n_leaves - k))


def random_planar_forest(rng, labels: Sequence[str], max_leaves: int) -> PlanarForest:
    total = rng.randint(1, max_leaves)
    trees = []
    while total > 0:
        k = rng.randint(1, total)
        trees.append(random_planar(rng, labels, k))
        total -= k
    return PlanarForest(tuple(trees))


# -- dimensions per grade ------------------------------------------------------------

@dataclass
class GradeTable:
    bits: list
    rows: list
    truncated: bool = False
    truncated_at: Optional[int] = None

    def to_json(self) -> dict:
        return {"bits": self.bits, "rows": self.rows, "truncated": self.truncated,
                "truncated_at": self.truncated_at}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grade", "d"] + [f"d_bit{b}" for b in self.bits] + ["d_L"])
        for r in self.rows:
            w.writerow([r["grade"], r["d"]] + [r["per_bit"][str(b)] for b in self.bits] + [r["d_L"]])
        if self.truncated:
            w.writerow([f"# truncated at grade {self.truncated_at}: enumeration budget exceeded"])
        return buf.getvalue()


def grade_dimensions(L: LanguageSpec, l_max: int, labels: Sequence[str] = ("x",),
                     budget: int = 2_000_000) -> GradeTable:
    """Per-grade (leaf count) dimensions of the planar space, each bit's subspace, and their intersection.

    Subspaces are spanned by basis trees, so dimensions are counts.  Once the
    number of planar trees to visit would exceed ``budget`` the table stops and
    is marked truncated.
    """
    from .nary import catalan
    bits = L.active_bits()
    by_bit = {b: [f for f in L.active if f.bit == b] for b in bits}
    rows, spent = [], 0
    for ell in range(1, l_max + 1):
        size = len(labels) ** ell * catalan(ell - 1)
        if spent + size > budget:
            return GradeTable(bits, rows, True, ell)
        spent += size
        per_bit = {b: 0 for b in bits}
        d_l = 0
        for p in enumerate_planar(labels, ell):
            ok_all = True
            for b in bits:
                if all(f.accepts(p) for f in by_bit[b]):
                    per_bit[b] += 1
                else:
                    ok_all = False
            d_l += ok_all
        rows.append({"grade": ell, "d": size, "per_bit": {str(b): per_bit[b] for b in bits},
                     "d_L": d_l})
    return GradeTable(bits, rows)
