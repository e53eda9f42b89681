"""Workspaces, accessible terms and the coproduct that extracts them.

A workspace is a multiset of binary trees.  Merge needs to pull subtrees out
of it, and the coproduct lists every way of doing so: each term pairs the
extracted forest with what is left after the copies are cancelled.
"""
from merge_hopf import (
    antipode, coproduct, coproduct_by_arity, counit, counts, graded_coproduct, parse_forest,
    parse_tree,
)
from merge_hopf.algebra import coassociativity_sides, convolve

W = parse_forest("{a {b c}} | d")
print("workspace          ", W)
print("(b0, acc, sigma, sigma_hat) =", counts(W).as_tuple())

T = parse_tree("{a {b c}}")
print("\ncoproduct of", T)
for (left, right), c in coproduct(T).terms.items():
    print(f"  {c:+d}  {left}  (x)  {right}")

print("\nonly the two-component extractions:")
print(" ", coproduct_by_arity(T, 3))

# depth of the extracted roots: this is what Minimal Search will penalise
print("\ndepth-weighted terms:")
for (left, right, d, _), c in sorted(graded_coproduct(T).terms.items(), key=lambda kv: kv[0][2]):
    print(f"  eps^{d}  {left}  (x)  {right}")

lhs, rhs = coassociativity_sides(W)
print("\ncoassociative on", W, ":", lhs == rhs)

S = antipode(parse_forest("{a b}"))
print("antipode of {a b}:", S)
print("m(S x id)Delta({a b}) =", convolve(coproduct(parse_forest("{a b}")), fn_left=antipode),
      " counit:", counit(parse_forest("{a b}")))
