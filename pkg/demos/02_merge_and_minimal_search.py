"""Merge as an operator on workspaces, its unwanted variants, and Minimal Search.

M_{S,S'} finds S and S' in the workspace through the coproduct, merges them and
cancels the deeper copies.  External and Internal Merge fall out of this; so do
Sideward and Countercyclic Merge.  Weighting each extraction by depth and keeping
the degree-0 part throws the bad ones away.
"""
from merge_hopf import (
    FormKind, UNIT, WeightedWorkspace, apply_merge_case, classify_form, counts, derive,
    internal_merge, merge_eps, merge_op, minimal_search_limit, parse_forest, parse_tree,
    size_delta,
)
from merge_hopf.errors import InvariantViolation
from merge_hopf.merge import expected_delta

P, F = parse_tree, parse_forest

W = F("{a b} | c")
print("External:", merge_op(P("{a b}"), P("c"), W))

T = F("{a {b {c d}}}")
print("Internal, moving {c d}:", internal_merge((0, (1, 1)), T))
# the same result as two steps of the operator: extract, then merge back
step = merge_op(P("{c d}"), UNIT, T).support()[0]
print("  extract {c d} first:", step, " then merge:", merge_op(P("{a b}"), P("{c d}"), step))

print("\nsize changes (b0, acc, sigma, sigma_hat), computed vs tabulated:")
G = F("{a b} | {c d}")
for occ in [((0, ()), (1, ())), ((0, ()), (1, (0,))), ((0, (0,)), (1, (0,)))]:
    form = classify_form(G, *occ)
    got = counts(apply_merge_case(form, G)) - counts(G)
    print(f"  {form.variant.value:<11} computed {got}  table {expected_delta(form, G)}")
    try:
        size_delta(form, G)
    except InvariantViolation as e:
        print("    ", e)

print("\nMinimal Search on", G)
for S, S2 in [(P("{a b}"), P("{c d}")), (P("a"), P("c")), (P("a"), P("{c d}"))]:
    out = merge_eps(S, S2, G)
    W1 = out.support()[0]
    kept = minimal_search_limit(out)
    print(f"  M({S}, {S2}) -> {W1.forest}  degrees {W1.degrees}  kept: {bool(kept.terms)}")

# Internal Merge survives as two steps whose degrees cancel
W0 = WeightedWorkspace.from_forest(T)
W1 = merge_eps(P("{c d}"), UNIT, W0).support()[0]
W2 = merge_eps(P("{a b}"), P("{c d}"), W1).support()[0]
print("\nInternal as two weighted steps:", W1.degrees, "->", W2.degrees, W2.forest)

d = derive("a | b | c", [{"op": "merge", "S": "a", "S2": "b"},
                         {"op": "merge", "S": "{a b}", "S2": "c"}])
print("\nderivation:")
for s in d.steps:
    print(f"  step {s.index}  {s.form:<9} {s.after}   deltas {s.deltas}")
