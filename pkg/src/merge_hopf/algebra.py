"""The workspace bialgebra: formal integer combinations of forests.

Product is disjoint union.  The coproduct extracts admissible subforests:
sets of pairwise disjoint subtrees in which no vertex has both of its children
extracted.  Each term pairs the extracted forest with the quotient remainder.
The sibling restriction is what makes the coproduct coassociative; allowing a
vertex to lose both children produces terms such as ``(a | b) (x) 1`` in the
coproduct of ``{a b}`` that appear twice on one side of the coassociativity
identity and once on the other.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product as _cartesian
from typing import Callable, Iterable, Union

from .syntax import (
    EMPTY, Forest, SynTree, UNIT, as_forest, merge, sequential_quotient,
)


def _sort_key(k):
    if hasattr(k, "sort_key"):
        return k.sort_key
    if isinstance(k, tuple):
        return tuple(_sort_key(x) for x in k)
    return k


class LinComb:
    """Finite formal sum with integer coefficients. Zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        elif isinstance(terms, dict):
            self.terms = {k: c for k, c in terms.items() if c}
        else:
            acc: dict = {}
            for k, c in terms:
                acc[k] = acc.get(k, 0) + c
            self.terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def single(cls, key, coeff: int = 1):
        return cls({key: coeff})

    def _new(self, terms):
        out = object.__new__(type(self))
        out.terms = terms
        return out

    def __getitem__(self, key) -> int:
        return self.terms.get(key, 0)

    def __contains__(self, key) -> bool:
        return key in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.support())

    def support(self) -> list:
        return sorted(self.terms, key=_sort_key)

    def items(self) -> list:
        return [(k, self.terms[k]) for k in self.support()]

    def __eq__(self, other) -> bool:
        if isinstance(other, LinComb):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(out)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar: int):
        if not isinstance(scalar, int):
            return NotImplemented
        if scalar == 0:
            return self._new({})
        return self._new({k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    def map(self, fn: Callable, cls=None) -> "LinComb":
        """Apply ``fn`` to every key; ``fn`` returns a key or a LinComb."""
        cls = cls or type(self)
        acc: dict = {}
        for k, c in self.terms.items():
            img = fn(k)
            if isinstance(img, LinComb):
                for k2, c2 in img.terms.items():
                    acc[k2] = acc.get(k2, 0) + c * c2
            else:
                acc[img] = acc.get(img, 0) + c
        return cls({k: c for k, c in acc.items() if c})

    @staticmethod
    def _fmt_key(k) -> str:
        return str(k)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.items():
            body = f"{abs(c)}*{self._fmt_key(k)}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"

    def to_json(self) -> list:
        return [{"coeff": c, "forest": str(k)} for k, c in self.items()]


class Tensor(LinComb):
    """Formal sum of ordered pairs ``(left, right)`` of forests."""

    __slots__ = ()

    @staticmethod
    def _fmt_key(k) -> str:
        return f"({k[0]} (x) {k[1]})"

    def to_json(self) -> list:
        return [{"coeff": c, "left": str(k[0]), "right": str(k[1]), "eps": None, "eta": None}
                for k, c in self.items()]


class GradedTensor(LinComb):
    """Keys are ``(left, right, eps_degree, eta_degree)``."""

    __slots__ = ()

    @staticmethod
    def _fmt_key(k) -> str:
        return f"({k[0]} (x) {k[1]})@eps^{k[2]}"

    def to_json(self) -> list:
        return [{"coeff": c, "left": str(k[0]), "right": str(k[1]), "eps": k[2], "eta": k[3]}
                for k, c in self.items()]

    def erase_degrees(self) -> Tensor:
        return self.map(lambda k: (k[0], k[1]), Tensor)


def lincomb(x) -> LinComb:
    """Coerce a forest, tree or LinComb to a LinComb of forests."""
    if isinstance(x, LinComb):
        return x
    return LinComb.single(as_forest(x))


ONE = LinComb.single(EMPTY)


def product(x, y) -> LinComb:
    """Bilinear disjoint union."""
    x, y = lincomb(x), lincomb(y)
    acc: dict = {}
    for f, c in x.terms.items():
        for g, d in y.terms.items():
            k = f | g
            acc[k] = acc.get(k, 0) + c * d
    return LinComb({k: c for k, c in acc.items() if c})


def counit(x) -> int:
    return lincomb(x)[EMPTY]


# -- coproduct ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _tree_terms(t: SynTree) -> tuple:
    """Coproduct of a single tree as ``((extracted, quotient_tree, depth), coeff)``.

    ``depth`` is the summed depth of the extracted roots.
    """
    if t.is_unit:
        return (((EMPTY, UNIT, 0), 1),)
    if t.is_leaf:
        return (((EMPTY, t, 0), 1), ((Forest((t,)), UNIT, 0), 1))
    if len(t.children) != 2:
        raise ValueError(f"coproduct is defined on binary trees, got arity {len(t.children)}")
    left, right = t.children
    acc: dict = {(Forest((t,)), UNIT, 0): 1}
    for (e1, q1, d1), c1 in _tree_terms(left):
        for (e2, q2, d2), c2 in _tree_terms(right):
            if q1.is_unit and q2.is_unit:
                continue  # both children extracted: not admissible
            key = (e1 | e2, merge(q1, q2), d1 + d2 + len(e1) + len(e2))
            acc[key] = acc.get(key, 0) + c1 * c2
    return tuple(acc.items())


@lru_cache(maxsize=65536)
def _forest_terms(f: Forest) -> tuple:
    if len(f.trees) == 1:
        return tuple(((e, Forest._sorted((q,)) if not q.is_unit else EMPTY, d), c)
                     for (e, q, d), c in _tree_terms(f.trees[0]))
    # accumulate unsorted tuples; canonicalize once at the end
    acc = {((), (), 0): 1}
    for t in f.trees:
        nxt: dict = {}
        tt = _tree_terms(t)
        for (e, q, d), c in acc.items():
            for (e1, q1, d1), c1 in tt:
                key = (e + e1.trees, q if q1.is_unit else q + (q1,), d + d1)
                nxt[key] = nxt.get(key, 0) + c * c1
        acc = nxt
    out: dict = {}
    for (e, q, d), c in acc.items():
        key = (Forest._sorted(tuple(sorted(e, key=_tkey))), Forest._sorted(tuple(sorted(q, key=_tkey))), d)
        out[key] = out.get(key, 0) + c
    return tuple(out.items())


def _tkey(t):
    return t.sort_key


def coproduct(f) -> Tensor:
    """Sum of ``F_v (x) F/F_v`` over admissible extractions. Linear in LinComb input."""
    if isinstance(f, LinComb):
        out = Tensor()
        for g, c in f.terms.items():
            out = out + coproduct(g) * c
        return out
    out = object.__new__(Tensor)
    out.terms = dict(_coproduct_items(as_forest(f)))
    return out


@lru_cache(maxsize=65536)
def _coproduct_items(f: Forest) -> tuple:
    acc: dict = {}
    for (e, q, _), c in _forest_terms(f):
        acc[(e, q)] = acc.get((e, q), 0) + c
    return tuple((k, c) for k, c in acc.items() if c)


def graded_coproduct(f) -> GradedTensor:
    """Coproduct with each term tagged by the summed depth of its extracted roots."""
    return GradedTensor({(e, q, d, d): c for (e, q, d), c in _forest_terms(as_forest(f))})


def coproduct_by_arity(f, n: int) -> Tensor:
    """The stratum whose extracted forest has n-1 components (n = 2 also keeps ``1 (x) F``)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    keep = {n - 1} | ({0} if n == 2 else set())
    return Tensor({k: c for k, c in coproduct(f).terms.items() if len(k[0]) in keep})


def reduced_coproduct(f) -> Tensor:
    f = as_forest(f)
    return Tensor({k: c for k, c in coproduct(f).terms.items()
                   if k[0] != EMPTY and k[1] != EMPTY})


def admissible_extractions(f) -> list:
    """Brute-force list of admissible extraction sets as lists of ``(component, path)``.

    Independent of the recursive coproduct: walks the vertex set directly and
    keeps antichains with no sibling pair.
    """
    f = as_forest(f)
    verts = [occ for occ, _ in f.vertices()]
    out = []

    def ok(chosen, occ):
        a, p = occ
        for b, q in chosen:
            if a != b:
                continue
            if p[:len(q)] == q or q[:len(p)] == p:
                return False
            if p and q and len(p) == len(q) and p[:-1] == q[:-1]:
                return False
        return True

    def grow(i, chosen):
        out.append(list(chosen))
        for j in range(i, len(verts)):
            if ok(chosen, verts[j]):
                chosen.append(verts[j])
                grow(j + 1, chosen)
                chosen.pop()

    grow(0, [])
    return out


def coproduct_reference(f) -> Tensor:
    """Coproduct computed from :func:`admissible_extractions` and sequential quotients."""
    f = as_forest(f)
    acc: dict = {}
    for ext in admissible_extractions(f):
        extracted = Forest(f.trees[a].subtree(p) for a, p in ext)
        by_comp: dict = {}
        for a, p in ext:
            by_comp.setdefault(a, []).append(p)
        rest = Forest(sequential_quotient(t, by_comp.get(a, [])) for a, t in enumerate(f.trees))
        acc[(extracted, rest)] = acc.get((extracted, rest), 0) + 1
    return Tensor(acc)


def tensor_apply(x: LinComb, fn_left=None, fn_right=None) -> LinComb:
    """Apply ``(fn_left (x) fn_right)`` to a Tensor, giving a LinComb keyed by flattened tuples.

    Each ``fn`` maps a forest to a LinComb whose keys are forests or tuples of
    forests; ``None`` means the identity.
    """
    acc: dict = {}

    def expand(fn, k):
        if fn is None:
            return ((k,), 1),
        return [(kk, c) if type(kk) is tuple else ((kk,), c) for kk, c in fn(k).terms.items()]

    for (l, r), c in x.terms.items():
        for lk, lc in expand(fn_left, l):
            for rk, rc in expand(fn_right, r):
                key = lk + rk
                acc[key] = acc.get(key, 0) + c * lc * rc
    return LinComb({k: v for k, v in acc.items() if v})


def coassociativity_sides(f) -> tuple:
    """((Delta x id) Delta F, (id x Delta) Delta F) as dicts keyed by triples of tree tuples."""
    left: dict = {}
    right: dict = {}
    for (l, r), c in _coproduct_items(as_forest(f)):
        rt, lt = r.trees, l.trees
        for (a, b), c2 in _coproduct_items(l):
            k = (a.trees, b.trees, rt)
            left[k] = left.get(k, 0) + c * c2
        for (a, b), c2 in _coproduct_items(r):
            k = (lt, a.trees, b.trees)
            right[k] = right.get(k, 0) + c * c2
    return ({k: v for k, v in left.items() if v}, {k: v for k, v in right.items() if v})


def convolve(x: Tensor, fn_left=None, fn_right=None) -> LinComb:
    """m o (fn_left (x) fn_right) applied to a Tensor."""
    out = LinComb()
    for (l, r), c in x.terms.items():
        a = lincomb(l) if fn_left is None else fn_left(l)
        b = lincomb(r) if fn_right is None else fn_right(r)
        out = out + product(a, b) * c
    return out


# -- antipode ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _tree_antipode(t: SynTree) -> LinComb:
    out = LinComb.single(Forest((t,)), -1)
    for (e, q, _), c in _tree_terms(t):
        if not e or q.is_unit:
            continue
        out = out - product(antipode(e), LinComb.single(Forest((q,)))) * c
    return out


def antipode(f) -> LinComb:
    """S(T) = -T - sum S(T') T'' over the reduced coproduct; multiplicative on forests."""
    if isinstance(f, LinComb):
        out = LinComb()
        for g, c in f.terms.items():
            out = out + antipode(g) * c
        return out
    out = ONE
    for t in as_forest(f).trees:
        out = product(out, _tree_antipode(t))
    return out


# -- leaf-subset coproduct ---------------------------------------------------

def leaf_coproduct(t: SynTree) -> Tensor:
    """Sum over leaf subsets L of ``T|_L (x) T|_{L^c}``."""
    if t.is_unit:
        raise ValueError("leaf_coproduct needs a non-unit tree")
    from .syntax import forest_quotient
    leaves = t.leaf_paths()
    acc: dict = {}
    for mask in range(1 << len(leaves)):
        keep = [p for i, p in enumerate(leaves) if mask >> i & 1]
        drop = [p for i, p in enumerate(leaves) if not mask >> i & 1]
        key = (as_forest(forest_quotient(t, drop)), as_forest(forest_quotient(t, keep)))
        acc[key] = acc.get(key, 0) + 1
    return Tensor(acc)


def clear_caches() -> None:
    _tree_terms.cache_clear()
    _forest_terms.cache_clear()
    _coproduct_items.cache_clear()
    _tree_antipode.cache_clear()
