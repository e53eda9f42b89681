"""Fixed-point recursions.

``ds_core`` solves X = M(X, X) grade by grade in leaf count, starting from a
single lexical item x.  ``ds_general`` solves X = B+(P(X)) for a polynomial P
in the Hopf algebra of (unlabelled, any-arity) rooted trees, graded by vertex
count.  ``cocycle_check`` evaluates both sides of the 1-cocycle identity for
B+ under either coproduct convention and reports the first difference.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian
from typing import Iterable, Mapping, Sequence

from .algebra import LinComb, Tensor
from .algebra import coproduct as workspace_coproduct
from .errors import PreconditionError
from .syntax import EMPTY, Forest, SynTree, as_forest, leaf, merge, node


@dataclass
class DSSeries:
    """Grade-indexed formal sums; ``grades[i]`` is the grade-(i+1) part."""
    grades: list

    def __getitem__(self, n: int) -> LinComb:
        return self.grades[n - 1]

    def __len__(self) -> int:
        return len(self.grades)

    def census(self) -> list:
        return [(n, len(x), x.coefficient_sum()) for n, x in enumerate(self.grades, 1)]


def _bilinear_merge(x: LinComb, y: LinComb) -> LinComb:
    acc: dict = {}
    for s, c in x.terms.items():
        for t, d in y.terms.items():
            k = merge(s, t)
            acc[k] = acc.get(k, 0) + c * d
    return LinComb(acc)


def ds_core(n_max: int, label: str = "x", order: Sequence[int] = None) -> DSSeries:
    """X_1 = x, X_n = sum_{j=1}^{n-1} M(X_j, X_{n-j}).

    ``order`` optionally permutes the summation index (used to check that the
    result does not depend on it).
    """
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    xs = [LinComb.single(leaf(label))]
    for n in range(2, n_max + 1):
        js = list(range(1, n)) if order is None else [j for j in order if 1 <= j < n]
        total = LinComb()
        for j in js:
            total = total + _bilinear_merge(xs[j - 1], xs[n - j - 1])
        xs.append(total)
    return DSSeries(xs)


def wedderburn_etherington(n_max: int) -> list:
    """W(1..n_max): unordered binary rooted trees by leaf count."""
    w = [0, 1]
    for n in range(2, n_max + 1):
        s = 0
        for i in range(1, (n - 1) // 2 + 1):
            s += w[i] * w[n - i]
        if n % 2 == 0:
            h = w[n // 2]
            s += h * (h + 1) // 2
        w.append(s)
    return w[1:]


# -- rooted trees (any arity, unlabelled) -----------------------------------------

class RootedTree:
    """Unlabelled rooted tree; children kept as a sorted tuple. Interned."""

    __slots__ = ("children", "encoding", "n_vertices", "__weakref__")
    _table: dict = {}

    def __new__(cls, children: Iterable["RootedTree"] = ()):
        kids = tuple(sorted(children, key=lambda c: c.encoding))
        enc = "[" + " ".join(c.encoding for c in kids) + "]"
        t = cls._table.get(enc)
        if t is None:
            t = object.__new__(cls)
            t.children = kids
            t.encoding = enc
            t.n_vertices = 1 + sum(c.n_vertices for c in kids)
            cls._table[enc] = t
        return t

    @property
    def sort_key(self):
        return (self.n_vertices, self.encoding)

    def __str__(self):
        return self.encoding

    def __repr__(self):
        return f"RootedTree({self.encoding!r})"

    def __reduce__(self):
        return (RootedTree, (self.children,))


class RForest:
    """Multiset of rooted trees (the empty forest is the unit)."""

    __slots__ = ("trees", "_hash")

    def __init__(self, trees: Iterable[RootedTree] = ()):
        self.trees = tuple(sorted(trees, key=lambda t: t.sort_key))
        self._hash = hash(self.trees)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, RForest) and self.trees == other.trees

    def __or__(self, other):
        return RForest(self.trees + other.trees)

    def __len__(self):
        return len(self.trees)

    @property
    def sort_key(self):
        return tuple(t.sort_key for t in self.trees)

    def __str__(self):
        return " ".join(t.encoding for t in self.trees) if self.trees else "1"


R_EMPTY = RForest()
DOT = RootedTree()


def ck_b_plus(f) -> RootedTree:
    if isinstance(f, RootedTree):
        f = RForest((f,))
    return RootedTree(f.trees)


@lru_cache(maxsize=None)
def _ck_tree(t: RootedTree) -> tuple:
    # cuts: each child subtree is either cut off whole, or kept and cut inside
    acc: dict = {}
    opts = []
    for c in t.children:
        o = {(RForest((c,)), None): 1}
        for (p, r), k in _ck_tree(c):
            if r is not None:
                o[(p, r)] = o.get((p, r), 0) + k
        opts.append(list(o.items()))
    for choice in _cartesian(*opts):
        pruned, kept, coeff = R_EMPTY, [], 1
        for (p, r), k in choice:
            pruned = pruned | p
            coeff *= k
            if r is not None:
                kept.append(r)
        key = (pruned, RootedTree(kept))
        acc[key] = acc.get(key, 0) + coeff
    acc[(RForest((t,)), None)] = acc.get((RForest((t,)), None), 0) + 1
    return tuple(acc.items())


def ck_coproduct(f) -> Tensor:
    """Connes-Kreimer coproduct by admissible cuts; right slot is the trunk."""
    if isinstance(f, RootedTree):
        f = RForest((f,))
    acc = {(R_EMPTY, R_EMPTY): 1}
    for t in f.trees:
        nxt: dict = {}
        for (p, r), c in acc.items():
            for (p1, r1), c1 in _ck_tree(t):
                key = (p | p1, r | (RForest((r1,)) if r1 is not None else R_EMPTY))
                nxt[key] = nxt.get(key, 0) + c * c1
        acc = nxt
    return Tensor(acc)


@dataclass(frozen=True)
class DSPoly:
    """P(t) = sum a_k t^k with a_0 = 1."""
    coefficients: tuple

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, int]) -> "DSPoly":
        top = max(coeffs) if coeffs else 0
        vals = [0] * (top + 1)
        for k, a in coeffs.items():
            vals[k] = a
        if vals[0] not in (0, 1):
            raise PreconditionError("a_0 is fixed to 1")
        vals[0] = 1
        return cls(tuple(vals))

    @classmethod
    def parse(cls, text: str) -> "DSPoly":
        """Comma separated a_0,a_1,...; e.g. ``1,0,1`` is 1 + t^2."""
        vals = [int(x) for x in text.split(",") if x.strip()]
        return cls.from_mapping(dict(enumerate(vals)))

    def __getitem__(self, k: int) -> int:
        return self.coefficients[k] if k < len(self.coefficients) else 0


def _compositions(n: int, k: int):
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def ds_general(P: DSPoly, n_max: int) -> DSSeries:
    """x_1 = B+(1); x_{n+1} = sum_k sum_{j_1+..+j_k=n} a_k B+(x_{j_1} ... x_{j_k})."""
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    xs = [LinComb.single(DOT)]
    for n in range(1, n_max):
        acc: dict = {}
        for k in range(1, n + 1):
            a = P[k]
            if not a:
                continue
            for js in _compositions(n, k):
                forests = {R_EMPTY: 1}
                for j in js:
                    nxt: dict = {}
                    for f, c in forests.items():
                        for t, d in xs[j - 1].terms.items():
                            g = f | RForest((t,))
                            nxt[g] = nxt.get(g, 0) + c * d
                    forests = nxt
                for f, c in forests.items():
                    t = RootedTree(f.trees)
                    acc[t] = acc.get(t, 0) + a * c
        xs.append(LinComb(acc))
    return DSSeries(xs)


def rooted_to_syntree(t: RootedTree, label: str = "x") -> SynTree:
    """Read a rooted tree whose internal vertices all have two children as a binary SynTree."""
    if not t.children:
        return leaf(label)
    if len(t.children) != 2:
        raise PreconditionError("not a binary rooted tree")
    return node(*(rooted_to_syntree(c, label) for c in t.children))


# -- cocycle -------------------------------------------------------------------------

@dataclass
class CocycleReport:
    convention: str
    holds: bool
    lhs: Tensor
    rhs: Tensor
    first_difference: tuple = None

    def to_json(self) -> dict:
        diff = None
        if self.first_difference is not None:
            (l, r), c_l, c_r = self.first_difference
            diff = {"left": str(l), "right": str(r), "lhs_coeff": c_l, "rhs_coeff": c_r}
        return {"convention": self.convention, "holds": self.holds,
                "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(), "first_difference": diff}


def _workspace_b_plus(f: Forest) -> Forest:
    from .merge import b_plus
    if len(f) > 2:
        raise ValueError("the binary workspace coproduct cannot act on a grafting of "
                         f"{len(f)} components")
    return as_forest(b_plus(f))


def cocycle_check(x, convention: str = "ck") -> CocycleReport:
    """Compare coproduct(B+(X)) with B+(X) (x) 1 + (id (x) B+) coproduct(X).

    ``x`` is a LinComb (or single forest) of rooted-tree forests for ``"ck"``,
    or of workspace forests for ``"workspace"``.
    """
    if convention == "ck":
        cop, bp, unit = ck_coproduct, lambda f: RForest((ck_b_plus(f),)), R_EMPTY
        if isinstance(x, (RForest, RootedTree)):
            x = LinComb.single(x if isinstance(x, RForest) else RForest((x,)))
    elif convention == "workspace":
        cop, bp, unit = workspace_coproduct, _workspace_b_plus, EMPTY
        if not isinstance(x, LinComb):
            x = LinComb.single(as_forest(x))
    else:
        raise ValueError(f"unknown convention {convention!r}")
    lhs, rhs = Tensor(), Tensor()
    for f, c in x.terms.items():
        g = bp(f)
        lhs = lhs + cop(g) * c
        rhs = rhs + Tensor({(g, unit): c})
        for (l, r), d in cop(f).terms.items():
            rhs = rhs + Tensor({(l, bp(r)): c * d})
    holds = lhs == rhs
    diff = None
    if not holds:
        keys = sorted(set(lhs.terms) | set(rhs.terms), key=lambda k: (k[0].sort_key, k[1].sort_key))
        for k in keys:
            if lhs[k] != rhs[k]:
                diff = (k, lhs[k], rhs[k])
                break
    return CocycleReport(convention, holds, lhs, rhs, diff)
