"""
Cohomology of a one-parameter family
====================================

Load a family from the shipped catalog, compute its cohomology with the
parameter kept symbolic, and look at the cup product and Poincare pairing.
"""

from fractions import Fraction

from nilcohom import catalog, cohomology as coh, lie

cat = catalog.load_catalog()
A = cat.get("1357M").algebra
print(lie.format_algebra(A))

# the lower central series and the associated graded (Carnot) algebra
print("lcs dims:", lie.lcs(A).dims)
print(lie.format_algebra(lie.carnot(A)))

# cohomology over QQ(t); the certificate lists the polynomials in t that
# had to be nonzero along the way
M = coh.cohomology(A)
print("betti:", M.betti, "total", M.total_dim)
print("certificate:", [str(p) for p in M.genericity_certificate()])

# at t = 2 one of those polynomials vanishes and the Betti numbers jump
print("betti at t=2:", coh.betti_numbers(lie.specialize(A, 2)))
print("betti at t=7/3:", coh.betti_numbers(lie.specialize(A, Fraction(7, 3))))

# H^3 x H^4 -> H^7 is an 8 x 8 table with values in the one-dimensional top class
T = coh.cup_table(M, 3, 4)
print("cup table shape:", T.shape)
P = coh.poincare_pairing(M, 3)
print("pairing H^3 x H^4 has", P.nrows, "rows")
