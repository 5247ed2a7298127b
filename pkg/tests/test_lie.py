import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import small_algebras
from nilcohom import lie
from nilcohom.catalog import SAMPLE, _at_generic
from nilcohom.lie import ExcludedParameterError, JacobiError, LieSyntaxError
from nilcohom.scalar import QQ, QQt, RatFunc, evaluate

FILIFORM = """
# comments and blank lines are ignored
name F5
dim 5
[1,2] = x3 ; [1,3] = x4
[1,4] = x5
"""


def test_parse_basic():
    A = lie.parse(FILIFORM)
    assert A.name == "F5" and A.dim == 5 and A.field is QQ
    assert A.bracket_basis(0, 1) == (0, 0, 1, 0, 0)
    assert A.bracket_basis(1, 0) == (0, 0, -1, 0, 0)
    assert A.bracket_basis(1, 2) is None      # unspecified brackets vanish


def test_parse_parameter_and_reversed_bracket():
    A = lie.parse("dim 3\nparam t excluded 0, 1/2\n[2,1] = (1-t)*x3\n")
    assert A.field is QQt and A.excluded == (0, Fraction(1, 2))
    assert A.bracket_basis(0, 1)[2] == RatFunc.t() - QQt.one


@pytest.mark.parametrize("text, line, fragment", [
    ("dim 3\n[1,4] = x2\n", 2, "out of range"),
    ("dim 3\n[1,2] = x3\n[2,1] = x3\n", 3, "twice"),
    ("dim 3\nfoo\n", 2, "unknown statement"),
    ("dim 3\n[1,2] = 2*y3\n", 2, ""),
    ("[1,2] = x3\n", 1, "dim"),
    ("dim 3\nparam s\n", 2, "named t"),
])
def test_parse_errors_name_the_line(text, line, fragment):
    with pytest.raises(LieSyntaxError) as info:
        lie.parse(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_jacobi_violation_names_the_triple():
    with pytest.raises(JacobiError) as info:
        lie.parse("dim 4\n[1,2] = x3\n[3,4] = x1\n")
    assert info.value.triple == (0, 1, 3)
    assert "(x1, x2, x4)" in str(info.value)


def test_jacobi_residuals_vanish_on_catalog(cat):
    from itertools import combinations
    for rec in cat:
        A = rec.algebra
        for i, j, k in combinations(range(A.dim), 3):
            assert not any(lie.jacobi_residual(A, i, j, k)), (rec.name, i, j, k)


def test_format_roundtrip(cat):
    for rec in cat:
        A = rec.algebra
        B = lie.parse(lie.format_algebra(A))
        assert lie.same_structure(A, B) and B.excluded == A.excluded and B.grading == A.grading


def test_lcs_small():
    assert lie.lcs(lie.heisenberg()).dims == (3, 1)
    assert lie.lcs(lie.parse(FILIFORM)).dims == (5, 3, 2, 1)
    assert lie.lcs(lie.abelian(4)).dims == (4,)


def test_lcs_detects_non_nilpotent():
    A = lie.parse("dim 2\n[1,2] = x2\n")
    flag = lie.lcs(A)
    assert not flag.nilpotent and not lie.is_nilpotent(A)
    with pytest.raises(lie.NotNilpotentError):
        lie.carnot(A)


def test_ucs_dims_match_catalog_names(cat):
    # the leading digits of every name record the dimensions of the upper central series
    for rec in cat.families():
        digits = "".join(ch for ch in rec.name if ch.isdigit())[:len(lie.ucs(_at_generic(rec.algebra)))]
        dims = "".join(map(str, lie.ucs(_at_generic(rec.algebra)).dims))
        assert dims == digits, rec.name


def test_carnot_is_graded_and_idempotent(cat):
    for rec in cat:
        A = _at_generic(rec.algebra)
        C = lie.carnot(A)
        lie.check_grading(C)
        assert lie.lcs(C).dims == lie.lcs(A).dims
        assert lie.same_structure(lie.carnot(C), C)


def test_carnot_of_filiform():
    C = lie.carnot(lie.parse(FILIFORM))
    assert C.grading == (1, 1, 2, 3, 4)


def test_specialize_commutes_with_brackets(cat):
    rng = random.Random(5)
    A = cat.get("1357M").algebra
    for _ in range(10):
        x = Fraction(rng.randint(1, 40), rng.randint(1, 7))
        if x in A.excluded:
            continue
        B = lie.specialize(A, x)
        u = [QQt.from_int(rng.randint(-3, 3)) for _ in range(A.dim)]
        v = [QQt.from_int(rng.randint(-3, 3)) for _ in range(A.dim)]
        w = A.bracket(u, v)
        w0 = B.bracket([evaluate(a, x) for a in u], [evaluate(a, x) for a in v])
        assert [evaluate(a, x) for a in w] == w0


def test_specialize_refuses_excluded():
    A = lie.parse("dim 3\nparam t excluded 0\n[1,2] = t*x3\n")
    with pytest.raises(ExcludedParameterError):
        lie.specialize(A, 0)
    B = lie.specialize(A, 0, allow_excluded=True)
    assert B.flags and not B.brackets


def test_direct_sum():
    H = lie.heisenberg()
    S = lie.direct_sum(H, H)
    assert S.dim == 6 and lie.lcs(S).dims == (6, 2)
    assert S.bracket_basis(3, 4) == (0, 0, 0, 0, 0, 1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(range(len(small_algebras()))), st.randoms(use_true_random=False))
def test_relabel_preserves_invariants(k, rnd):
    from nilcohom.cohomology import betti_numbers
    A = small_algebras()[k]
    perm = list(range(A.dim))
    rnd.shuffle(perm)
    B = lie.relabel(A, perm)
    assert lie.lcs(B).dims == lie.lcs(A).dims
    assert betti_numbers(B) == betti_numbers(A)


def test_form_signature_separates_real_forms(cat):
    split = lie.form_signature(cat.get("N625").algebra)
    definite = lie.form_signature(cat.get("N625a").algebra)
    assert split != definite
    assert lie.lcs(cat.get("N625").algebra).dims == lie.lcs(cat.get("N625a").algebra).dims


def test_inertia():
    assert lie.inertia([[1, 0], [0, -1]]) == (1, 1, 0)
    assert lie.inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert lie.inertia([[2, 1], [1, 2]]) == (2, 0, 0)
    assert lie.inertia([[1, 1], [1, 1]]) == (1, 0, 1)


def test_sample_point_is_generic(cat):
    for rec in cat.families():
        assert SAMPLE not in rec.excluded
