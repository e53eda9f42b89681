"""Syntactic objects and workspaces.

A syntactic object is an abstract (non-planar) rooted tree with labelled
leaves, i.e. an element of the free commutative non-associative magma on a
lexicon.  Trees are hash-consed: every structurally distinct tree exists once,
so equality is identity and isomorphism testing is free.  Children are kept in
a canonical order (unit < leaf < node, leaves by label, nodes by encoding),
which gives every tree a unique text encoding such as ``{a {b c}}``.

A workspace is a finite multiset of trees, represented by :class:`Forest`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .errors import AddressError, ConfigurationError, ParseError, PreconditionError

RESERVED = frozenset("{}|*+")

VertexPath = tuple  # tuple[int, ...]; () is the root
Occurrence = tuple  # (component index, VertexPath)


def check_label(label: str) -> str:
    if (not label or label == "1" or any(ch in RESERVED or ch.isspace() for ch in label)):
        raise ConfigurationError(f"invalid label {label!r}")
    return label


_TABLE: dict = {}


class SynTree:
    """Canonical abstract tree. Build with :func:`leaf`, :func:`node`, :func:`merge`."""

    __slots__ = ("label", "children", "encoding", "sort_key", "n_leaves", "n_vertices",
                 "__weakref__")

    def __init__(self, *args, **kwargs):
        raise TypeError("use leaf(), node() or merge() to build trees")

    @classmethod
    def _make(cls, label, children):
        if label is not None:
            enc = label
        elif children:
            enc = "{" + " ".join(c.encoding for c in children) + "}"
        else:
            enc = "1"
        t = _TABLE.get(enc)
        if t is not None:
            return t
        t = object.__new__(cls)
        t.label = label
        t.children = children
        t.encoding = enc
        if label is not None:
            t.sort_key = (1, label)
            t.n_leaves, t.n_vertices = 1, 1
        elif children:
            t.sort_key = (2, enc)
            t.n_leaves = sum(c.n_leaves for c in children)
            t.n_vertices = 1 + sum(c.n_vertices for c in children)
        else:
            t.sort_key = (0, "")
            t.n_leaves, t.n_vertices = 0, 0
        _TABLE[enc] = t
        return t

    def __reduce__(self):
        return (_rebuild, (self.label, self.children))

    @property
    def is_unit(self) -> bool:
        return self.n_vertices == 0

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    @property
    def arity(self) -> int:
        return len(self.children)

    def __lt__(self, other: "SynTree") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"SynTree({self.encoding!r})"

    def __str__(self) -> str:
        return self.encoding

    def subtree(self, path: Sequence[int]) -> "SynTree":
        t = self
        for i, step in enumerate(path):
            if not 0 <= step < len(t.children):
                raise AddressError(f"path {tuple(path)} does not resolve (fails at step {i})")
            t = t.children[step]
        if t.is_unit:
            raise AddressError("the unit tree has no vertices")
        return t

    def vertices(self) -> Iterator[tuple]:
        """Yield ``(path, subtree)`` for every vertex, root first, preorder."""
        if self.is_unit:
            return
        stack = [((), self)]
        while stack:
            path, t = stack.pop()
            yield path, t
            for i in range(len(t.children) - 1, -1, -1):
                stack.append((path + (i,), t.children[i]))

    def leaf_paths(self) -> list:
        return [p for p, t in self.vertices() if t.is_leaf]

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.depth() for c in self.children)


def _rebuild(label, children):
    if label is not None:
        return leaf(label)
    if not children:
        return UNIT
    return node(*children)


UNIT = SynTree._make(None, ())


def leaf(label: str) -> SynTree:
    t = _TABLE.get(label)
    if t is not None and t.label is not None:
        return t
    return SynTree._make(check_label(label), ())


def node(*children: SynTree) -> SynTree:
    """Internal vertex over ``children`` (any arity >= 2), in canonical order."""
    if len(children) < 2:
        raise PreconditionError("a node needs at least two children")
    for c in children:
        if not isinstance(c, SynTree):
            raise TypeError(f"expected SynTree, got {type(c).__name__}")
        if c.is_unit:
            raise PreconditionError("the unit cannot be a child of a node")
    return SynTree._make(None, tuple(sorted(children, key=_key)))


def _key(t):
    return t.sort_key


def merge(a: SynTree, b: SynTree) -> SynTree:
    """The magma product, with the unit rules M(T, 1) = M(1, T) = T."""
    if a.is_unit:
        return b
    if b.is_unit:
        return a
    return node(a, b)


def is_binary(t: SynTree) -> bool:
    return all(len(s.children) in (0, 2) for _, s in t.vertices())


def is_full_nary(t: SynTree, n: int) -> bool:
    return all(len(s.children) in (0, n) for _, s in t.vertices())


class Forest:
    """A workspace: canonically sorted multiset of non-unit trees."""

    __slots__ = ("trees", "_hash")

    def __init__(self, trees: Iterable[SynTree] = ()):
        ts = [t for t in trees if not t.is_unit]
        ts.sort(key=_key)
        self.trees = tuple(ts)
        self._hash = hash(self.trees)

    @classmethod
    def of(cls, *trees: SynTree) -> "Forest":
        return cls(trees)

    @classmethod
    def _sorted(cls, trees: tuple) -> "Forest":
        # trees already non-unit and in canonical order
        f = object.__new__(cls)
        f.trees = trees
        f._hash = hash(trees)
        return f

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (type(other) is Forest and self._hash == other._hash
                and self.trees == other.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    def __or__(self, other: "Forest") -> "Forest":
        if isinstance(other, SynTree):
            return Forest(self.trees + (other,))
        if not other.trees:
            return self
        if not self.trees:
            return other
        return Forest._sorted(tuple(sorted(self.trees + other.trees, key=_key)))

    def __bool__(self) -> bool:
        return bool(self.trees)

    @property
    def sort_key(self) -> tuple:
        return tuple(t.sort_key for t in self.trees)

    @property
    def n_leaves(self) -> int:
        return sum(t.n_leaves for t in self.trees)

    @property
    def n_vertices(self) -> int:
        return sum(t.n_vertices for t in self.trees)

    @property
    def encoding(self) -> str:
        return " | ".join(t.encoding for t in self.trees) if self.trees else "1"

    def __str__(self) -> str:
        return self.encoding

    def __repr__(self) -> str:
        return f"Forest({self.encoding!r})"

    def without(self, indices: Iterable[int]) -> list:
        drop = set(indices)
        return [t for i, t in enumerate(self.trees) if i not in drop]

    def vertices(self) -> Iterator[tuple]:
        """Yield ``((component, path), subtree)`` over all vertices of all components."""
        for a, t in enumerate(self.trees):
            for p, s in t.vertices():
                yield (a, p), s


EMPTY = Forest()


def as_forest(x: Union[Forest, SynTree, Iterable[SynTree]]) -> Forest:
    if isinstance(x, Forest):
        return x
    if isinstance(x, SynTree):
        return Forest((x,))
    return Forest(x)


def accessible_terms(t: SynTree) -> list:
    """``(path, subtree, depth)`` for each non-root vertex, leaves included."""
    return [(p, s, len(p)) for p, s in t.vertices() if p]


def _check_disjoint(paths: Sequence[tuple]) -> None:
    ps = sorted(set(paths))
    if len(ps) != len(paths):
        raise PreconditionError("repeated vertex in quotient set")
    for x, y in zip(ps, ps[1:]):
        if y[:len(x)] == x:
            raise PreconditionError(f"overlapping subtrees at paths {x} and {y}")


def _quotient_many(t: SynTree, paths: Sequence[tuple]) -> SynTree:
    # simultaneous removal; a vertex that loses all children is removed too,
    # a vertex left with one child is contracted
    if any(len(p) == 0 for p in paths):
        return UNIT
    by_child: dict = {}
    for p in paths:
        by_child.setdefault(p[0], []).append(p[1:])
    kids = []
    for i, c in enumerate(t.children):
        sub = by_child.get(i)
        kids.append(c if sub is None else _quotient_many(c, sub))
    kids = [k for k in kids if not k.is_unit]
    if not kids:
        return UNIT
    if len(kids) == 1:
        return kids[0]
    return node(*kids)


def quotient(t: SynTree, path: Sequence[int]) -> SynTree:
    """T/T_v: delete the subtree at ``path`` and contract its parent."""
    path = tuple(path)
    t.subtree(path)
    return _quotient_many(t, [path])


class _MutVertex:
    __slots__ = ("tree", "kids", "parent")

    def __init__(self, tree, parent):
        self.tree = tree
        self.parent = parent
        self.kids = [_MutVertex(c, self) for c in tree.children]

    def freeze(self) -> SynTree:
        if not self.kids:
            return self.tree
        return node(*(k.freeze() for k in self.kids))


def sequential_quotient(t: SynTree, paths: Sequence[Sequence[int]]) -> SynTree:
    """Remove the given subtrees one at a time, in the order given.

    Vertices are tracked by identity, so the paths always refer to the
    original tree ``t`` even after earlier removals have reshaped it.
    """
    paths = [tuple(p) for p in paths]
    for p in paths:
        t.subtree(p)
    _check_disjoint(paths)
    root = _MutVertex(t, None)

    def find(p):
        v = root
        for step in p:
            v = v.kids[step]
        return v

    targets = [find(p) for p in paths]
    alive = root
    for v in targets:
        if alive is None:
            break
        parent = v.parent
        if parent is None:
            alive = None
            continue
        parent.kids = [k for k in parent.kids if k is not v]
        if len(parent.kids) == 1:
            only = parent.kids[0]
            grand = parent.parent
            only.parent = grand
            if grand is None:
                alive = only
            else:
                grand.kids = [only if k is parent else k for k in grand.kids]
    return UNIT if alive is None else alive.freeze()


def forest_quotient(f: Union[Forest, SynTree], vs: Iterable) -> Union[Forest, SynTree]:
    """Quotient by a set of pairwise disjoint subtrees.

    For a tree, ``vs`` holds paths; for a forest it holds ``(component, path)``
    pairs.  Components that become the unit disappear from the forest.
    """
    vs = list(vs)
    if isinstance(f, SynTree):
        paths = [tuple(p) for p in vs]
        for p in paths:
            f.subtree(p)
        _check_disjoint(paths)
        return _quotient_many(f, paths)
    groups: dict = {}
    for a, p in vs:
        if not 0 <= a < len(f.trees):
            raise AddressError(f"no component {a}")
        f.trees[a].subtree(p)
        groups.setdefault(a, []).append(tuple(p))
    for ps in groups.values():
        _check_disjoint(ps)
    out = [(_quotient_many(t, groups[a]) if a in groups else t) for a, t in enumerate(f.trees)]
    return Forest(out)


@dataclass(frozen=True)
class Counts:
    b0: int
    acc: int
    sigma: int
    sigma_hat: int

    def as_tuple(self) -> tuple:
        return (self.b0, self.acc, self.sigma, self.sigma_hat)

    def __sub__(self, other: "Counts") -> tuple:
        return tuple(x - y for x, y in zip(self.as_tuple(), other.as_tuple()))

    def to_json(self) -> dict:
        return {"b0": self.b0, "acc": self.acc, "sigma": self.sigma, "sigma_hat": self.sigma_hat}


def counts(f: Union[Forest, SynTree]) -> Counts:
    f = as_forest(f)
    b0 = len(f.trees)
    sigma = f.n_vertices
    return Counts(b0, sigma - b0, sigma, b0 + sigma)


# -- enumeration -------------------------------------------------------------

@lru_cache(maxsize=None)
def _trees_at(labels: tuple, n: int) -> tuple:
    if n == 1:
        return tuple(sorted((leaf(x) for x in labels), key=_key))
    out = []
    for i in range(1, n // 2 + 1):
        left, right = _trees_at(labels, i), _trees_at(labels, n - i)
        if i == n - i:
            out.extend(node(a, b) for a, b in combinations_with_replacement(left, 2))
        else:
            out.extend(node(a, b) for a in left for b in right)
    out.sort(key=_key)
    return tuple(out)


def _labels(labels: Sequence[str]) -> tuple:
    labels = tuple(dict.fromkeys(labels))
    if not labels:
        raise ConfigurationError("empty alphabet")
    for x in labels:
        check_label(x)
    return labels


def trees_with_leaves(labels: Sequence[str], n: int) -> list:
    """All binary trees with exactly ``n`` leaves over ``labels``."""
    if n < 1:
        return []
    return list(_trees_at(_labels(labels), n))


def enumerate_trees(labels: Sequence[str], max_leaves: int) -> list:
    """All binary trees with at most ``max_leaves`` leaves, by grade then canonical order."""
    labels = _labels(labels)
    if max_leaves < 1:
        raise ConfigurationError("max_leaves must be at least 1")
    out = []
    for n in range(1, max_leaves + 1):
        out.extend(_trees_at(labels, n))
    return out


def enumerate_forests(labels: Sequence[str], max_leaves: int = None, max_vertices: int = None,
                      include_empty: bool = False) -> list:
    """All forests whose total leaf (or vertex) count stays within the bound."""
    if (max_leaves is None) == (max_vertices is None):
        raise ConfigurationError("give exactly one of max_leaves, max_vertices")
    if max_leaves is not None:
        budget = max_leaves
        pool = [(t, t.n_leaves) for t in enumerate_trees(labels, max_leaves)]
    else:
        budget = max_vertices
        pool = [(t, t.n_vertices) for t in enumerate_trees(labels, (max_vertices + 1) // 2)
                if t.n_vertices <= max_vertices]
    out = []

    def grow(start, left, acc):
        if acc or include_empty:
            out.append(Forest(acc))
        for i in range(start, len(pool)):
            t, size = pool[i]
            if size <= left:
                acc.append(t)
                grow(i, left - size, acc)
                acc.pop()

    grow(0, budget, [])
    out.sort(key=lambda f: (f.n_leaves, f.sort_key))
    return out


def random_tree(rng, labels: Sequence[str], n_leaves: int) -> SynTree:
    if n_leaves == 1:
        return leaf(rng.choice(list(labels)))
    k = rng.randint(1, n_leaves - 1)
    return node(random_tree(rng, labels, k), random_tree(rng, labels, n_leaves - k))


def random_forest(rng, labels: Sequence[str], max_leaves: int) -> Forest:
    total = rng.randint(1, max_leaves)
    trees = []
    while total > 0:
        k = rng.randint(1, total)
        trees.append(random_tree(rng, labels, k))
        total -= k
    return Forest(trees)


# -- text format -------------------------------------------------------------

class _Reader:
    def __init__(self, text: str, lexicon=None, arity=2, planar=False):
        self.text = text
        self.pos = 0
        self.lexicon = None if lexicon is None else frozenset(lexicon)
        self.arity = arity
        self.stops = RESERVED | (frozenset("(),") if planar else frozenset())

    def offset(self, pos=None) -> int:
        return len(self.text[: self.pos if pos is None else pos].encode("utf-8"))

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.offset(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def label(self) -> str:
        self.skip_ws()
        start = self.pos
        while (self.pos < len(self.text) and not self.text[self.pos].isspace()
               and self.text[self.pos] not in self.stops):
            self.pos += 1
        if self.pos == start:
            self.fail("expected a label")
        word = self.text[start:self.pos]
        if word != "1" and self.lexicon is not None and word not in self.lexicon:
            self.fail(f"label {word!r} not in lexicon", start)
        return word

    def tree(self) -> SynTree:
        ch = self.peek()
        if ch == "{":
            start = self.pos
            self.pos += 1
            kids = []
            while self.peek() not in ("}", ""):
                kids.append(self.tree())
            self.expect("}")
            if any(k.is_unit for k in kids):
                self.fail("the unit cannot appear inside a node", start)
            if self.arity is not None and len(kids) != self.arity:
                self.fail(f"node has {len(kids)} children, expected {self.arity}", start)
            if len(kids) < 2:
                self.fail("a node needs at least two children", start)
            return node(*kids)
        if ch in ("", "}", "|"):
            self.fail("expected a tree")
        word = self.label()
        return UNIT if word == "1" else leaf(word)

    def done(self):
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail("trailing input")


def parse_tree(text: str, lexicon=None, arity=2) -> SynTree:
    """Parse ``1``, a label, or ``{t t}``.  ``arity=None`` accepts any arity >= 2."""
    r = _Reader(text, lexicon, arity)
    t = r.tree()
    r.done()
    return t


def parse_forest(text: str, lexicon=None, arity=2) -> Forest:
    """Parse ``t | t | ...``; ``1`` is the empty forest."""
    r = _Reader(text, lexicon, arity)
    trees = [r.tree()]
    while r.peek() == "|":
        r.pos += 1
        trees.append(r.tree())
    r.done()
    return Forest(trees)


def format_tree(t: SynTree) -> str:
    return t.encoding


def format_forest(f: Forest) -> str:
    return f.encoding


def format_path(path: Sequence[int]) -> str:
    return ".".join(str(i) for i in path)


def parse_path(text: str) -> tuple:
    text = text.strip()
    if text in ("", "root", "."):
        return ()
    try:
        return tuple(int(x) for x in text.split("."))
    except ValueError:
        raise ParseError(f"bad vertex path {text!r}", 0) from None


def parse_occurrence(text: str) -> tuple:
    """``"2:0.1"`` is component 2, path (0, 1); ``"2:"`` is the root of component 2."""
    comp, sep, path = text.partition(":")
    try:
        a = int(comp)
    except ValueError:
        raise ParseError(f"bad occurrence {text!r}", 0) from None
    return (a, parse_path(path))


def load_lexicon(path) -> tuple:
    labels = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            labels.append(check_label(line))
    if not labels:
        raise ConfigurationError(f"lexicon {path} is empty")
    return tuple(labels)
