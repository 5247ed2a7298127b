"""
Graded isomorphism systems
==========================

A graded linear map H(s) -> H(t) is a block-diagonal matrix of unknowns
alpha_{degree}_{j}_{k}.  Asking it to respect cup products gives a polynomial
system, which we reduce with two forcing rules before searching.
"""

from nilcohom import catalog, cohomology as coh, iso, lie

cat = catalog.load_catalog()
A = cat.get("1357M").algebra

# symbolic t on both sides: the identity is always a solution
M = coh.cohomology(A)
S = iso.build_graded_iso_system(M, M)
print(len(S.variables), "variables,", len(S.equations), "equations")
R = iso.reduce_system(S)
print(len(R.ledger), "variables forced,", len(R.equations), "equations left")

# rule R2: y * x = 0 for every x in a full row or column of a diagonal block
# forces y = 0 when that block is assumed invertible
for e in R.ledger:
    if e["rule"].startswith("R2"):
        print(" ", e["var"], "= 0 because of", ", ".join(e["partners"]))

print("identity verifies:", iso.verify_solution(S, iso.identity_assignment(S)).isomorphism)

# two different parameter values of another family, found by guided search
B = cat.get("123457I").algebra
S = iso.build_graded_iso_system(coh.cohomology(lie.specialize(B, 2)), coh.cohomology(lie.specialize(B, 5)))
res = iso.guided_search(S, budget=400)
print("123457I, 2 -> 5:", res.message)
