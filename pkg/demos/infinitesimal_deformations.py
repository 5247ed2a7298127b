"""
Is the first-order deformation a coboundary?
============================================

Assemble the cohomology ring of a family as an associative algebra over QQ(t),
take its first Maclaurin coefficient f_1 and ask whether f_1 = d1(g) for some
linear map g.  If not, the rings are pairwise non-isomorphic near a generic value.
"""

from fractions import Fraction

from nilcohom import catalog, cohomology as coh, deformation as dfm

cat = catalog.load_catalog()

for name in ("1357S", "1357QRS_1", "147E_1"):
    M = coh.cohomology(cat.get(name).algebra)
    v = dfm.infinitesimal_test(M, family=name)
    print(f"{name}: {v.unknown_count} unknowns, {v.equation_count} equations")
    if v.solvable:
        print("  solvable, witness verified:", v.verified)
    else:
        inc = v.inconsistency
        print(f"  inconsistent in the shift-{inc['shift']} block;",
              f"{len(inc['combination'])} equations combine to 0 = 1,",
              "checked:", inc["combination_checked"])
        print("  holds away from the roots of", [str(p) for p in v.certificate])

# the same question at a fixed rational base point
M = coh.cohomology(cat.get("1357S").algebra)
v = dfm.infinitesimal_test(M, at=Fraction(7, 2), family="1357S")
print("1357S at 7/2 solvable:", v.solvable)
