"""Counting what Merge can build.

The fixed point X = M(X, X) generates every binary tree, and the coefficient of
each tree counts its planar drawings, so grade n carries Catalan(n-1) in total.
Then a look at why Merge is binary: a ternary Merge misses sentence lengths and
offers more extraction tuples than a binary one.
"""
from merge_hopf.dyson_schwinger import DSPoly, ds_core, ds_general, wedderburn_etherington
from merge_hopf.nary import (
    catalan, fuss_catalan, overgeneration_counts, reachable_lengths, undergeneration_gap,
)

X = ds_core(8)
for n in range(1, 6):
    print(f"X_{n} = {X[n]}")

we = wedderburn_etherington(8)
print("\ngrade  shapes  W-E  mass  Catalan")
for n in range(1, 9):
    print(f"{n:>5}  {len(X[n]):>6}  {we[n - 1]:>3}  {X[n].coefficient_sum():>4}  {catalan(n - 1):>7}")

# X = B+(1 + X^2) in rooted trees: odd grades only, same multiplicities
x = ds_general(DSPoly.parse("1,0,1"), 7)
print("\nx_7 for P = 1 + t^2:", x[7])

print("\nternary Merge reaches lengths", sorted(reachable_lengths(3, 5)), "so two-word sentences are out")
for n in (3, 4):
    print(f"n={n}: Fuss-Catalan", [fuss_catalan(n, k) for k in range(1, 6)],
          " gap vs binary", [undergeneration_gap(n, k, 1) for k in range(1, 6)])

c = overgeneration_counts(3, 3)
print(f"\n7 leaves: binary has {c.binary_nonroot} accessible terms; ternary has {c.nary_nonroot}, "
      f"giving {c.nary_tuples} ordered pairs to merge")
