"""Hypothetical n-ary Merge: n-magma trees, contraction quotients, counting.

Trees here are :class:`~merge_hopf.syntax.SynTree` values whose internal
vertices all have exactly n children.  Removing a subtree would break that
shape, so quotients contract the subtree to a single leaf whose label comes
from a projection rule.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations_with_replacement, product
from math import comb, factorial, perm
from typing import Callable, Sequence

from .algebra import LinComb
from .errors import DomainError, PreconditionError
from .merge import b_plus, occurrences
from .syntax import Forest, SynTree, UNIT, as_forest, is_full_nary, leaf, node


def default_projection(t: SynTree) -> str:
    """Leaves keep their label (contracting one vertex changes nothing); larger subtrees become XP."""
    return t.label if t.is_leaf else "XP"


def constant_projection(label: str = "XP") -> Callable[[SynTree], str]:
    return lambda t: label


def nary_merge(args: Sequence[SynTree], n: int = None) -> SynTree:
    n = len(args) if n is None else n
    if len(args) != n:
        raise PreconditionError(f"{n}-ary merge needs {n} arguments, got {len(args)}")
    if any(a.is_unit for a in args):
        raise PreconditionError("n-ary merge arguments must be non-unit")
    return node(*args)


def _replace(t: SynTree, path: tuple, new: SynTree) -> SynTree:
    if not path:
        return new
    kids = list(t.children)
    kids[path[0]] = _replace(kids[path[0]], path[1:], new)
    return node(*kids)


def contract_quotient(t: SynTree, path: Sequence[int], proj: Callable = default_projection) -> SynTree:
    """Contract T_v to a leaf labelled ``proj(T_v)``; the root gives the unit."""
    path = tuple(path)
    sub = t.subtree(path)
    if not path:
        return UNIT
    return _replace(t, path, leaf(proj(sub)))


def nary_merge_op(S: Sequence[SynTree], F, n: int = None, proj: Callable = default_projection) -> LinComb:
    """n-ary Merge on a workspace with contraction quotients.

    Non-unit entries of ``S`` are matched to occurrences in pairwise distinct
    components.  Either all n entries are non-unit, or exactly one is (the
    unit rule M(T, 1, ..., 1) = T).  No match gives the workspace back once.
    """
    F = as_forest(F)
    n = len(S) if n is None else n
    if len(S) != n:
        raise PreconditionError(f"expected {n} operator arguments, got {len(S)}")
    live = [s for s in S if not s.is_unit]
    if len(live) not in (0, 1, n):
        raise PreconditionError("use all non-unit arguments or exactly one")
    if not live:
        return LinComb.single(F)
    choices = [occurrences(F, s) for s in live]
    seen, acc = set(), {}
    for combo in product(*choices):
        comps = [a for a, _ in combo]
        if len(set(comps)) != len(comps):
            continue
        key = frozenset(combo)
        if key in seen:
            continue
        seen.add(key)
        subs = [F.trees[a].subtree(p) for a, p in combo]
        touched = dict(combo)
        rest = [contract_quotient(t, touched[a], proj) if a in touched else t
                for a, t in enumerate(F.trees)]
        out = Forest(rest) | (subs[0] if len(subs) == 1 else node(*subs))
        acc[out] = acc.get(out, 0) + 1
    if not acc:
        return LinComb.single(F)
    return LinComb(acc)


def enumerate_nary_trees(labels: Sequence[str], n: int, k: int) -> list:
    """Abstract full n-ary trees with exactly k internal vertices."""
    table = {0: sorted({leaf(x) for x in labels}, key=lambda t: t.sort_key)}
    for j in range(1, k + 1):
        pool = [(i, t) for i in range(j) for t in table[i]]
        out = set()
        for kids in combinations_with_replacement(range(len(pool)), n):
            if sum(pool[x][0] for x in kids) == j - 1:
                out.add(node(*(pool[x][1] for x in kids)))
        table[j] = sorted(out, key=lambda t: t.sort_key)
    return table[k]


def reachable_lengths(n: int, k_max: int) -> set:
    """Leaf counts reachable by n-ary Merge from single lexical items."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return {k * (n - 1) + 1 for k in range(1, k_max + 1)}


def catalan(r: int) -> int:
    if r < 0:
        raise DomainError("r must be non-negative")
    return comb(2 * r, r) // (r + 1)


def fuss_catalan(n: int, k: int) -> int:
    """Number of planar full n-ary trees with k internal vertices."""
    if n < 2 or k < 0:
        raise DomainError("need n >= 2 and k >= 0")
    return comb(n * k, k) // ((n - 1) * k + 1)


def undergeneration_gap(n: int, k: int, s_size: int) -> int:
    """S^l (C_{k(n-1)} - C^(n)_k) with l = (n-1)k + 1: planar binary minus planar n-ary shapes."""
    if n < 3:
        raise DomainError("the gap is only claimed for n >= 3")
    if k < 1:
        raise DomainError("k must be at least 1")
    return s_size ** ((n - 1) * k + 1) * (catalan(k * (n - 1)) - fuss_catalan(n, k))


def falling(x: int, m: int) -> int:
    """x (x-1) ... (x-m+1); zero when m > x."""
    return perm(x, m) if 0 <= m <= x else 0


@dataclass(frozen=True)
class OvergenerationCounts:
    n: int
    k: int
    leaves: int
    binary_nonroot: int
    nary_nonroot: int
    nary_tuples: int
    nary_tuples_printed: int
    binary_nonroot_nonleaf: int
    binary_nonroot_nonleaf_printed: int
    nary_nonroot_nonleaf: int
    nary_tuples_o: int
    nary_tuples_o_printed: int

    @property
    def holds(self) -> bool:
        """Distinct (n-1)-tuples of non-root vertices outnumber binary non-root vertices."""
        return self.nary_tuples > self.binary_nonroot

    def nonleaf_holds(self) -> bool:
        """The same comparison restricted to non-root non-leaf vertices."""
        if self.k < self.n:
            raise DomainError("the non-leaf comparison needs k >= n")
        return self.nary_tuples_o > self.binary_nonroot_nonleaf

    def to_json(self) -> dict:
        d = asdict(self)
        d["holds"] = self.holds
        return d


def overgeneration_counts(n: int, k: int) -> OvergenerationCounts:
    """Candidate internal-Merge inputs in an n-ary tree versus a binary tree on the same leaves.

    The ``*_printed`` fields carry the closed forms as published; the
    others are exact counts of the objects described.
    """
    if n < 2 or k < 1:
        raise DomainError("need n >= 2 and k >= 1")
    ell = k * (n - 1) + 1
    return OvergenerationCounts(
        n=n, k=k, leaves=ell,
        binary_nonroot=2 * (ell - 1),
        nary_nonroot=k * n,
        nary_tuples=falling(k * n, n - 1),
        nary_tuples_printed=factorial(n * k) // factorial(n * (k - 1)),
        binary_nonroot_nonleaf=ell - 2,
        binary_nonroot_nonleaf_printed=k * (n - 1),
        nary_nonroot_nonleaf=k - 1,
        nary_tuples_o=falling(k - 1, n - 1),
        nary_tuples_o_printed=falling(k, n),
    )


def parse_nary_tree(text: str, n: int, lexicon=None) -> SynTree:
    from .syntax import parse_tree
    return parse_tree(text, lexicon=lexicon, arity=n)


def parse_nary_forest(text: str, n: int, lexicon=None) -> Forest:
    from .syntax import parse_forest
    return parse_forest(text, lexicon=lexicon, arity=n)


__all__ = [
    "OvergenerationCounts", "b_plus", "catalan", "constant_projection", "contract_quotient",
    "default_projection", "enumerate_nary_trees", "falling", "fuss_catalan", "is_full_nary",
    "nary_merge", "nary_merge_op", "overgeneration_counts", "parse_nary_forest",
    "parse_nary_tree", "reachable_lengths", "undergeneration_gap",
]
