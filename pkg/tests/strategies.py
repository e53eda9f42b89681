"""Hypothesis strategies for trees and forests."""
from hypothesis import strategies as st

from merge_hopf.syntax import Forest, leaf, merge

LABELS = ("a", "b", "c")

labels = st.sampled_from(LABELS)

trees = st.recursive(
    labels.map(leaf),
    lambda kids: st.tuples(kids, kids).map(lambda p: merge(*p)),
    max_leaves=6,
)

forests = st.lists(trees, min_size=0, max_size=3).map(Forest)
nonempty_forests = st.lists(trees, min_size=1, max_size=3).map(Forest)
