"""Weight systems: exact functionals dual to the diagram relations.

Builds the chord and trivalent quotients at small degree, shows their
dimensions agree, and reduces trivalent diagrams to chord combinations with
the STU rewriting.
"""

from knotcsi import algebra, diagrams

print("dimensions of the weight-system spaces")
for k in (1, 2, 3):
    wc = algebra.weight_system_space(k, "chord")
    wt = algebra.weight_system_space(k, "trivalent")
    print(f"  k={k}: chord {len(wc)}, trivalent {len(wt)}")
print()

ws = algebra.casson_weight_system()
print("the degree-2 weight system, scaled to 1 on the crossed chords:")
for d, v in sorted(ws.values.items(), key=lambda kv: diagrams.encode(kv[0])):
    print(f"  {v:+d} on {diagrams.encode(d)}")
print()

print("STU reduction of the tripod into chord diagrams:")
out = algebra.stu_reduce(diagrams.tripod())
for d, c in sorted(out.terms.items(), key=lambda kv: diagrams.encode(kv[0])):
    print(f"  {c:+d} * {diagrams.encode(d)}")
print("(modulo the 1T relation this is minus the crossed-chord diagram,")
print(" which is why the weight system takes values (1, -1) on (X, tripod))")
print()

print("every degree-3 trivalent diagram reduces consistently:")
count = 0
for d in algebra.trivalent_basis(3):
    if d.q:
        algebra.stu_reduce(d)
        count += 1
print(f"  reduced {count} diagrams with free vertices, no contradictions")
