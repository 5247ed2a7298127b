import json
import random
from fractions import Fraction
from itertools import combinations

import pytest

from nilcohom import cohomology as coh
from nilcohom import iso, lie
from nilcohom.iso import IsoError, MPoly, PolySystem
from nilcohom.linalg import Matrix, determinant
from nilcohom.scalar import QQ


@pytest.fixture(scope="module")
def abelian_system():
    M = coh.cohomology(lie.abelian(4))
    return iso.build_graded_iso_system(M, M)


def exterior_power_assignment(S, A):
    """alpha_k_j_l = minor of A on the rows of the j-th and columns of the l-th k-subset."""
    n = len(A)
    out = {}
    for b in S.blocks:
        subsets = list(combinations(range(n), b.degree))
        for j, J in enumerate(subsets):
            for l, L in enumerate(subsets):
                minor = Matrix([[A[r][c] for c in L] for r in J], QQ)
                out[S.variables[b.var(j, l)]] = determinant(minor)
    return out


def random_invertible(rng, n):
    while True:
        A = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if determinant(Matrix(A, QQ)):
            return A


def test_variable_layout(abelian_system):
    S = abelian_system
    assert [b.size for b in S.blocks] == [4, 6, 4, 1]
    assert S.variables[0] == "alpha_1_1_1"
    assert S.variables[S.blocks[1].var(0, 5)] == "alpha_2_1_6"


def test_exterior_powers_are_isomorphisms(abelian_system):
    """Every GL(4) element induces a graded automorphism of the exterior algebra."""
    S = abelian_system
    R = iso.reduce_system(S)
    rng = random.Random(2024)
    for _ in range(100):
        a = exterior_power_assignment(S, random_invertible(rng, 4))
        assert iso.verify_solution(S, a).isomorphism
        # reduction is sound: no forced value contradicts a genuine isomorphism
        for e in R.ledger:
            assert a[e["var"]] == e["value"], e
        free = {k: v for k, v in a.items() if R.var_index(k) not in R.forced}
        assert iso.verify_solution(R, free).isomorphism


def test_non_isomorphisms_are_rejected(abelian_system):
    S = abelian_system
    rng = random.Random(7)
    A = random_invertible(rng, 4)
    a = exterior_power_assignment(S, A)
    a["alpha_2_1_1"] += 1
    v = iso.verify_solution(S, a)
    assert not v.equations_vanish and not v.isomorphism
    singular = [row[:] for row in A]
    singular[3] = [x + y for x, y in zip(singular[0], singular[1])]
    v = iso.verify_solution(S, exterior_power_assignment(S, singular))
    assert v.equations_vanish and not v.isomorphism and v.determinants[1] == 0


def test_incomplete_assignment(abelian_system):
    with pytest.raises(IsoError, match="incomplete"):
        iso.verify_solution(abelian_system, {"alpha_1_1_1": "1"})


def test_assignment_contradicting_ledger(cat):
    M = coh.cohomology(lie.specialize(cat.get("1357M").algebra, 3))
    R = iso.reduce_system(iso.build_graded_iso_system(M, M))
    assert R.ledger
    e = R.ledger[0]
    a = iso.identity_assignment(R)
    a[e["var"]] = e["value"] + 1
    with pytest.raises(IsoError, match="forced"):
        iso.verify_solution(R, a)


def test_mpoly_canonical_and_dedup():
    p = MPoly({(0, 1): Fraction(2), (2,): Fraction(-4)})
    assert p.canonical().terms == {(0, 1): 1, (2,): -2}
    S = PolySystem(QQ, ["a", "b", "c"], [], [])
    assert S.add(p)
    assert not S.add(MPoly({(0, 1): Fraction(-1), (2,): Fraction(2)}))   # scalar multiple
    assert not S.add(MPoly({}))
    assert len(S.equations) == 1
    S.add(MPoly({(): Fraction(3)}))
    assert S.inconsistent


def test_substitution():
    p = MPoly({(0, 1): Fraction(1), (1,): Fraction(-1)})
    q = p.substitute(0, Fraction(1))
    assert q.is_zero()
    assert p.substitute(1, Fraction(0)).is_zero()
    assert p.evaluate([Fraction(2), Fraction(3)]) == 3


def test_rule_one_forces_lone_monomials():
    S = PolySystem(QQ, ["a", "b", "c"], [], [])
    S.add(MPoly({(0, 0): Fraction(3)}))
    S.add(MPoly({(0, 1): Fraction(1), (2,): Fraction(1)}))
    R = iso.reduce_system(S)
    assert R.forced == {0: 0, 2: 0}
    assert all(e["rule"].startswith("R1") for e in R.ledger)
    assert not R.equations and not R.inconsistent
    assert S.equations and not S.ledger          # the input is left untouched


def test_rule_two_needs_a_full_line():
    # two 2x2 blocks: variables 0..3 form the degree-1 block, 4..7 the degree-2 block
    blocks = [iso.Block(1, 2, 0), iso.Block(2, 2, 4)]
    names = [iso.variable_name(d, j, k) for d in (1, 2) for j in range(2) for k in range(2)]
    S = PolySystem(QQ, names, blocks, [])
    S.add(MPoly({(0, 4): Fraction(1)}))
    R = iso.reduce_system(S)
    assert not R.ledger                          # one product is only a disjunction
    S.add(MPoly({(1, 4): Fraction(2)}))          # y times the whole first row of the degree-1 block
    R = iso.reduce_system(S)
    (e,) = R.ledger
    assert e["var"] == "alpha_2_1_1" and e["rule"].startswith("R2")
    assert e["partners"] == ["alpha_1_1_1", "alpha_1_1_2"]
    assert not R.inconsistent


def test_forced_zero_line_is_inconsistent():
    blocks = [iso.Block(1, 2, 0)]
    S = PolySystem(QQ, [iso.variable_name(1, j, k) for j in range(2) for k in range(2)], blocks, [])
    S.add(MPoly({(0,): Fraction(1)}))
    S.add(MPoly({(2,): Fraction(1)}))
    R = iso.reduce_system(S)
    assert R.inconsistent and "column 1 of the degree-1 block" in R.witness


def test_betti_mismatch_is_inconsistent(cat):
    A, B = cat.get("1357M").algebra, cat.get("1357S").algebra
    S = iso.build_graded_iso_system(coh.cohomology(lie.specialize(A, 3)), coh.cohomology(lie.specialize(B, 5)))
    assert S.inconsistent and "Betti" in S.diagnostic


def test_identity_on_diagonal_small():
    for A in (lie.heisenberg(), lie.direct_sum(lie.heisenberg(), lie.abelian(1))):
        M = coh.cohomology(A)
        S = iso.build_graded_iso_system(M, M)
        assert iso.verify_solution(S, iso.identity_assignment(S)).isomorphism


def test_json_roundtrip(cat):
    M = coh.cohomology(lie.specialize(cat.get("1357N").algebra, 3))
    S = iso.reduce_system(iso.build_graded_iso_system(M, M))
    text = S.dumps()
    T = PolySystem.from_json(json.loads(text))
    assert T.dumps() == text
    assert [p.terms for p in T.equations] == [p.terms for p in S.equations]


def test_symbolic_system_roundtrip(cat, models):
    M = models("1357M")
    Ms = iso.lift_model(coh.cohomology(lie.specialize(cat.get("1357M").algebra, 3)))
    S = iso.build_graded_iso_system(Ms, M)
    T = PolySystem.from_json(json.loads(S.dumps()))
    assert T.field is S.field and T.dumps() == S.dumps()


@pytest.mark.parametrize("name, s, t", [("123457I", 2, 5), ("1357N", 2, 5), ("12457N_2", 2, 5), ("147E", 2, 5)])
def test_guided_search_finds_verified_isomorphism(cat, name, s, t):
    A = cat.get(name).algebra
    S = iso.build_graded_iso_system(coh.cohomology(lie.specialize(A, s)), coh.cohomology(lie.specialize(A, t)))
    res = iso.guided_search(S, budget=400)
    assert res.found, res.message
    assert iso.verify_solution(S, {k: v for k, v in res.assignment.items()}).isomorphism


def test_guided_search_respects_guesses(cat):
    A = cat.get("123457I").algebra
    S = iso.build_graded_iso_system(coh.cohomology(lie.specialize(A, 2)), coh.cohomology(lie.specialize(A, 5)))
    bad = {v: "0" for v in S.variables[:2]}   # kills the first row of the degree-1 block
    res = iso.guided_search(S, [bad], budget=50)
    assert not res.found


def test_assignment_files(tmp_path, abelian_system):
    S = abelian_system
    a = iso.identity_assignment(S)
    path = tmp_path / "a.json"
    path.write_text(iso.dump_assignment(a, QQ))
    assert iso.verify_solution(S, iso.load_assignment(path)).isomorphism
