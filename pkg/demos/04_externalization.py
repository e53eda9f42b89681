"""From abstract trees to word order.

Syntax builds unordered trees.  A language picks a planar drawing of each one
(the section), checks it against its parameter filters, and reads the leaves
off left to right.  Forgetting the order always gives the tree back.
"""
from merge_hopf.externalization import (
    Filter, LanguageSpec, OrderParams, embeddings, filter, grade_dimensions, malcev_decode,
    malcev_encode, multiplicativity_witness, parse_planar, project, section,
)
from merge_hopf.syntax import parse_tree

T = parse_tree("{a {b c}}")
langs = [
    LanguageSpec(name="head-initial"),
    LanguageSpec(pi=(1,), m=1, name="head-final"),
    LanguageSpec(order=OrderParams(("c",), "rightmost"), name="c-first"),
]
print("planar drawings of", T, ":", ", ".join(map(str, embeddings(T))))
for L in langs:
    p = section(T, L)
    print(f"  {L.name:<12} {str(p):<12} words: {' '.join(p.leaves())}   back to {project(p)}")

w = multiplicativity_witness(langs[1])
if w:
    t, u, lhs, rhs = w
    print(f"\nthe section does not commute with Merge: sigma(M({t}, {u})) = {lhs}, M(sigma, sigma) = {rhs}")

fixture = parse_planar("(α ((β γ) δ))")
word = malcev_encode(fixture, compact=True)
print("\nMalcev word of", fixture, ":", word, "  decodes to", malcev_decode(word))

L = LanguageSpec(pi=(1,), filters=(Filter.make(0, "max_depth", k=2),), name="shallow")
for text in ["((a b) c)", "(((a b) c) d)"]:
    out = filter(parse_planar(text), L)
    print(f"{text:<16} {'accepted' if out.accepted else 'rejected by ' + out.kind}")

print("\nplanar trees per grade, all vs those the shallow language keeps:")
print(grade_dimensions(L, 6).to_csv(), end="")
