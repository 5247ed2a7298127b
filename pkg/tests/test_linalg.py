from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

import oracle
from nilcohom import linalg
from nilcohom.linalg import DimensionError, Matrix, Subspace
from nilcohom.scalar import QQ, QQt, Poly, RatFunc, evaluate, parse_scalar

small = st.fractions(min_value=-5, max_value=5, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    # bias toward rank deficiency by leaving many zeros
    cell = st.one_of(st.just(Fraction(0)), small)
    return [[draw(cell) for _ in range(c)] for _ in range(r)]


@st.composite
def poly_matrices(draw):
    r = draw(st.integers(1, 4))
    c = draw(st.integers(1, 4))
    coef = st.integers(-3, 3)
    entry = st.lists(coef, min_size=0, max_size=3).map(lambda cs: RatFunc(Poly(cs)))
    return [[draw(entry) for _ in range(c)] for _ in range(r)]


@given(matrices())
def test_rref_matches_gauss_jordan(rows):
    M = Matrix(rows, QQ)
    R, piv = linalg.rref(M)
    ref, ref_piv = oracle.gauss_jordan(rows, M.ncols)
    assert piv == ref_piv
    assert R.rows[:len(piv)] == ref


@given(matrices())
def test_kernel_and_rank_nullity(rows):
    M = Matrix(rows, QQ)
    K = linalg.kernel(M)
    assert K.dim + linalg.rank(M) == M.ncols
    for v in K.basis:
        assert all(x == 0 for x in M.apply(v))


@given(matrices(), st.lists(small, min_size=6, max_size=6))
def test_solve_matches_consistency_oracle(rows, b):
    M = Matrix(rows, QQ)
    b = b[:M.nrows]
    sol = linalg.solve(M, b)
    assert sol.consistent == oracle.consistent(rows, b, M.ncols)
    if sol.consistent:
        assert M.apply(sol.particular) == b
    else:
        w = sol.witness_row
        assert all(x == 0 for x in w[:-1]) and w[-1] != 0


@given(matrices(), matrices())
def test_quotient_coordinates(a, b):
    n = len(a[0])
    b = [r[:n] + [Fraction(0)] * (n - len(r)) for r in b]
    W = Subspace.span(b, n, QQ)
    U = Subspace.span(a + b, n, QQ)
    Q = linalg.quotient_basis(U, W)
    assert len(Q) == U.dim - W.dim
    # each quotient basis vector has coordinates e_k; W vectors have coordinates 0
    for k, q in enumerate(Q):
        c = linalg.quotient_coords(U, W, q)
        assert c == [int(i == k) for i in range(len(Q))]
    for w in W.basis:
        assert not any(linalg.quotient_coords(U, W, w))


def test_quotient_rejects_outside_vector():
    U = Subspace.span([[1, 0, 0]], 3, QQ)
    W = Subspace.zero(3, QQ)
    with pytest.raises(ValueError):
        linalg.quotient_coords(U, W, [0, 1, 0])


def test_ragged_matrix():
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [3]], QQ)


def test_determinant():
    assert linalg.determinant(Matrix([[2, 1], [1, 1]], QQ)) == 1
    t = RatFunc.t()
    M = Matrix([[t, QQt.one], [QQt.one, t]], QQt)
    assert linalg.determinant(M) == t * t - QQt.one


@settings(max_examples=60)
@given(poly_matrices(), st.integers(-30, 30))
def test_symbolic_rank_specializes_off_certificate(rows, x):
    """Away from the certificate roots the symbolic RREF specializes to the rational one."""
    M = Matrix(rows, QQt)
    cert = set()
    R, piv = linalg.rref(M, cert)
    polys = linalg.certificate_polys(cert)
    assume(all(p(x) != 0 for p in polys))
    S = Matrix([[evaluate(e, x) for e in r] for r in rows], QQ)
    R0, piv0 = linalg.rref(S)
    assert piv == piv0
    assert [[evaluate(e, x) for e in r] for r in R.rows[:len(piv)]] == R0.rows[:len(piv0)]


def test_certificate_captures_rank_drop():
    t = RatFunc.t()
    one = QQt.one
    M = Matrix([[one, t], [t, QQt(4)]], QQt)     # singular at t = 2 and t = -2
    cert = set()
    _, piv = linalg.rref(M, cert)
    assert piv == [0, 1]
    roots = {r for p in linalg.certificate_polys(cert) for r in (-2, 2) if p(r) == 0}
    assert roots == {-2, 2}


def test_certificate_is_squarefree_and_coprime():
    t = Poly.t()
    raw = {linalg.certificate_key(p) for p in (t * t, t * (t - 1), (t - 1) ** 3, t + 1)}
    polys = linalg.certificate_polys(raw)
    assert sorted(str(p) for p in polys) == ["t", "t+1", "t-1"]


def test_sparse_solve_inconsistent_witness():
    rows = [{0: Fraction(1), 1: Fraction(1)}, {0: Fraction(2), 1: Fraction(2)}]
    sol = linalg.solve_rows(rows, [Fraction(1), Fraction(3)], 2, QQ)
    assert not sol.consistent
    assert sol.witness_row[:2] == [0, 0] and sol.witness_row[2] != 0


def test_symbolic_solve():
    t = parse_scalar("t")
    M = Matrix([[t, QQt.one], [QQt.one, QQt.zero]], QQt)
    sol = linalg.solve(M, [QQt.one, t])
    assert sol.consistent
    assert M.apply(sol.particular) == [QQt.one, t]
