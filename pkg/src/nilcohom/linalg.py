"""Exact dense linear algebra over QQ and QQ(t).

Over QQ rows are reduced with ``Fraction`` arithmetic.  Over QQ(t) every row is
first cleared of denominators and then eliminated fraction-free in ZZ[t], with
each intermediate row replaced by its primitive part so that coefficient growth
stays controlled; the rational functions only reappear when the finished RREF
is divided through by its pivots.  Every polynomial the QQ(t) path multiplies
or divides by is recorded in an optional *genericity certificate*: at any
rational parameter value that is a root of none of them, the specialised
elimination performs the same steps and yields the same rank and pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import scalar
from .scalar import QQ, QQt, Field, Poly, RatFunc, _igcd, _imul, _isub, _iprimitive, _icontent


class DimensionError(ValueError):
    pass


class Matrix:
    """Rectangular matrix with entries from a single field."""

    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows: Sequence[Sequence], field: Field, ncols: Optional[int] = None):
        self.rows = [[field(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != ncols:
                raise DimensionError("ragged matrix")
        self.ncols = ncols
        self.field = field

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: Field) -> "Matrix":
        z = field.zero
        return cls([[z] * ncols for _ in range(nrows)], field, ncols)

    @classmethod
    def identity(cls, n: int, field: Field) -> "Matrix":
        m = cls.zeros(n, n, field)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], field: Field) -> "Matrix":
        return cls([[field.parse(str(x)) for x in r] for r in rows], field)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.field is other.field
                and self.shape == other.shape and self.rows == other.rows)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(self.field.format(x) for x in r) for r in self.rows)
        return f"Matrix[{self.field}]({self.nrows}x{self.ncols}: {body})"

    def transpose(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)],
                      self.field, self.nrows)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for {self.ncols} columns")
        z = self.field.zero
        out = []
        for r in self.rows:
            acc = z
            for a, x in zip(r, v):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionError("incompatible shapes")
        cols = other.transpose().rows
        z = self.field.zero
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out, self.field, other.ncols)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def specialize(self, value) -> "Matrix":
        if not self.field.parametric:
            return self
        return Matrix([[scalar.evaluate(x, value) for x in r] for r in self.rows], QQ, self.ncols)


@dataclass(frozen=True)
class Subspace:
    """Subspace of field^n stored as a reduced row echelon basis."""

    ambient_dim: int
    basis: tuple
    pivots: tuple
    field: Field

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def zero(cls, n: int, field: Field) -> "Subspace":
        return cls(n, (), (), field)

    @classmethod
    def full(cls, n: int, field: Field) -> "Subspace":
        return cls.span(Matrix.identity(n, field).rows, n, field)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int, field: Field, certificate=None) -> "Subspace":
        vecs = [list(v) for v in vectors]
        if not vecs:
            return cls.zero(n, field)
        r, piv = rref(Matrix(vecs, field, n), certificate)
        return cls(n, tuple(tuple(r.rows[i]) for i in range(len(piv))), tuple(piv), field)

    def coordinates(self, v: Sequence) -> list:
        """Coordinates of v in this basis; raises ValueError if v is outside."""
        coords = [v[p] for p in self.pivots]
        z = self.field.zero
        for j in range(self.ambient_dim):
            acc = z
            for c, b in zip(coords, self.basis):
                if c and b[j]:
                    acc = acc + c * b[j]
            if acc != v[j]:
                raise ValueError("vector is not in the subspace")
        return coords

    def contains(self, v: Sequence) -> bool:
        try:
            self.coordinates(v)
        except ValueError:
            return False
        return True

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def specialize(self, value) -> "Subspace":
        if not self.field.parametric:
            return self
        return Subspace.span([[scalar.evaluate(x, value) for x in b] for b in self.basis],
                             self.ambient_dim, QQ)


# ---------------------------------------------------------------------------
# elimination kernels
# ---------------------------------------------------------------------------

def _rref_qq(rows, ncols: int) -> tuple:
    piv: dict = {}
    for r in rows:
        row = {j: Fraction(x) for j, x in r.items() if x}
        # stored rows are fully reduced, so one pass clears every pivot column
        for c in [j for j in row if j in piv]:
            p = piv[c]
            a = row.get(c)
            if not a:
                continue
            for j, x in p.items():
                y = row.get(j, 0) - a * x
                if y:
                    row[j] = y
                else:
                    row.pop(j, None)
        if not row:
            continue
        c = min(row)
        inv = 1 / row[c]
        row = {j: x * inv for j, x in row.items()}
        # keep the stored rows fully reduced against each other
        for q, pr in piv.items():
            a = pr.get(c)
            if a:
                for j, x in row.items():
                    y = pr.get(j, 0) - a * x
                    if y:
                        pr[j] = y
                    else:
                        pr.pop(j, None)
        piv[c] = row
    pivots = sorted(piv)
    return [piv[c] for c in pivots], pivots


def _record(cert, p: tuple) -> None:
    if cert is not None and len(p) > 1:
        cert.add(_iprimitive(p))


def _row_primitive(row: dict, cert) -> dict:
    """Divide a ZZ[t] row by the gcd of its entries."""
    g = None
    for x in row.values():
        g = x if g is None else _igcd(g, x)
        if len(g) == 1:
            break
    if g is None:
        return row
    if len(g) == 1:
        k = 0
        for x in row.values():
            k = scalar.math.gcd(k, *x)
            if k == 1:
                return row
        if k > 1:
            return {j: tuple(y // k for y in x) for j, x in row.items()}
        return row
    _record(cert, g)
    return {j: scalar._iexactdiv(x, g) for j, x in row.items()}


def _clear_row(r: dict, cert) -> dict:
    """Scale a QQ(t) row into ZZ[t] entries, recording cleared denominators."""
    entries = {j: x for j, x in r.items() if not x.is_zero()}
    if not entries:
        return {}
    lcm = None
    for x in entries.values():
        d = x.den
        if d.degree > 0:
            _record(cert, d.primitive())
            lcm = d if lcm is None else (lcm * d).exact_div(lcm.gcd(d))
    out = {}
    for j, x in entries.items():
        n = x.num if lcm is None else x.num * lcm.exact_div(x.den)
        out[j] = n
    # common integer denominator
    den = 1
    for n in out.values():
        den = den * n._d // scalar.math.gcd(den, n._d)
    res = {j: tuple(c * (den // n._d) for c in n._c) for j, n in out.items()}
    return _row_primitive(res, cert)


def _make_positive(row: dict) -> dict:
    c = min(row)
    lead = row[c]
    if lead[-1] < 0:
        return {j: tuple(-y for y in x) for j, x in row.items()}
    return row


def _ff_eliminate(row: dict, pr: dict, c: int, cert) -> dict:
    """row := p*row - a*pr on column c (p = pr[c], a = row[c])."""
    p = pr[c]
    a = row[c]
    g = _igcd(p, a)
    if len(g) > 1:
        p = scalar._iexactdiv(p, g)
        a = scalar._iexactdiv(a, g)
    # integer gcd between the multipliers as well
    k = scalar.math.gcd(scalar.math.gcd(*p), scalar.math.gcd(*a))
    if k > 1:
        p = tuple(x // k for x in p)
        a = tuple(x // k for x in a)
    _record(cert, p)
    out = {}
    for j, x in row.items():
        if j == c:
            continue
        out[j] = _imul(p, x) if len(p) > 1 or p[0] != 1 else x
    for j, y in pr.items():
        if j == c:
            continue
        v = _isub(out.get(j, ()), _imul(a, y))
        if v:
            out[j] = v
        else:
            out.pop(j, None)
    return _row_primitive(out, cert) if out else out


def _rref_qqt(rows, ncols: int, cert) -> tuple:
    piv: dict = {}
    for r in rows:
        row = _clear_row(r, cert)
        while row:
            c = min(row)
            pr = piv.get(c)
            if pr is None:
                break
            row = _ff_eliminate(row, pr, c, cert)
        if not row:
            continue
        row = _make_positive(row)
        c = min(row)
        _record(cert, row[c])
        piv[c] = row
    pivots = sorted(piv)
    # back substitution from the last pivot upwards
    for idx in range(len(pivots) - 1, -1, -1):
        c = pivots[idx]
        row = piv[c]
        for c2 in pivots[idx + 1:]:
            if c2 in row:
                row = _ff_eliminate(row, piv[c2], c2, cert)
        row = _make_positive(row)
        _record(cert, row[c])
        piv[c] = row
    out = []
    for c in pivots:
        row = piv[c]
        lead = Poly._raw(row[c])
        out.append({j: scalar.ONE_RF if j == c else RatFunc(Poly._raw(x), lead) for j, x in row.items()})
    return out, pivots


def rref_rows(rows, ncols: int, field: Field, certificate: Optional[set] = None) -> tuple:
    """RREF of sparse rows ``{column: value}``; returns (nonzero rows, pivots)."""
    if field.parametric:
        return _rref_qqt(rows, ncols, certificate)
    return _rref_qq(rows, ncols)


def _sparse(rows) -> list:
    return [{j: x for j, x in enumerate(r) if x} for r in rows]


def _dense(rows: list, ncols: int, field: Field) -> list:
    z = field.zero
    out = []
    for r in rows:
        d = [z] * ncols
        for j, x in r.items():
            d[j] = x
        out.append(d)
    return out


def rref(M: Matrix, certificate: Optional[set] = None) -> tuple:
    """Reduced row echelon form and pivot columns (only the nonzero rows are kept).

    ``certificate``, if given, is a set that receives (as primitive ZZ[t]
    coefficient tuples) every polynomial the QQ(t) elimination depends on.
    """
    rows, piv = rref_rows(_sparse(M.rows), M.ncols, M.field, certificate)
    return Matrix(_dense(rows, M.ncols, M.field), M.field, M.ncols), piv


def determinant(M: Matrix):
    """Determinant by Gaussian elimination over the field (square matrices only)."""
    n = M.nrows
    if n != M.ncols:
        raise DimensionError(f"determinant of a {n}x{M.ncols} matrix")
    field = M.field
    a = [list(r) for r in M.rows]
    det = field.one
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return field.zero
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        piv = a[c][c]
        det = det * piv
        inv = field.one / piv
        for r in range(c + 1, n):
            f = a[r][c]
            if f:
                f = f * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


def _coprime_basis(polys: list) -> list:
    """Squarefree, pairwise coprime monic polynomials with the same roots as ``polys``."""
    work = []
    for p in polys:
        g = p.gcd(p.derivative())
        work.append((p.exact_div(g) if g.degree > 0 else p).monic())
    done: list = []
    while work:
        p = work.pop()
        if p.degree < 1:
            continue
        for a, q in enumerate(done):
            g = p.gcd(q)
            if g.degree > 0:
                done.pop(a)
                work.extend([g.monic(), p.exact_div(g).monic(), q.exact_div(g).monic()])
                break
        else:
            if p not in done:
                done.append(p)
    return done


def certificate_polys(certificate: set) -> list:
    """Monic certificate polynomials in a deterministic order.

    The stored polynomials are refined to a squarefree pairwise coprime set, so
    the list names each excluded root exactly once.
    """
    polys = [Poly._raw(p).monic() for p in certificate if len(p) > 1]
    uniq = _coprime_basis(list({p: None for p in polys}))
    return sorted(uniq, key=lambda p: (p.degree, [(c.numerator, c.denominator) for c in p.coeffs]))


def certificate_key(p: Poly) -> tuple:
    """Form in which a polynomial is stored in a certificate set."""
    return _iprimitive(p._c)


def kernel(M: Matrix, certificate: Optional[set] = None) -> Subspace:
    """Null space {v : M v = 0}."""
    n = M.ncols
    field = M.field
    r, piv = rref(M, certificate)
    pivset = set(piv)
    vecs = []
    for f in range(n):
        if f in pivset:
            continue
        v = [field.zero] * n
        v[f] = field.one
        for i, c in enumerate(piv):
            x = r.rows[i][f]
            if x:
                v[c] = -x
        vecs.append(v)
    return Subspace.span(vecs, n, field, certificate)


def image(M: Matrix, certificate: Optional[set] = None) -> Subspace:
    """Column space of M as a subspace of field^nrows."""
    return Subspace.span(M.transpose().rows, M.nrows, M.field, certificate)


@dataclass
class Solution:
    consistent: bool
    particular: Optional[list] = None
    kernel: Optional[Subspace] = None
    witness_row: Optional[list] = None
    pivots: list = dc_field(default_factory=list)


def solve(M: Matrix, b: Sequence, certificate: Optional[set] = None) -> Solution:
    """Solve M x = b exactly; inconsistency comes back as a value with its witness."""
    if len(b) != M.nrows:
        raise DimensionError("right-hand side has the wrong length")
    n = M.ncols
    field = M.field
    aug = Matrix([list(r) + [x] for r, x in zip(M.rows, b)], field, n + 1)
    r, piv = rref(aug, certificate)
    if piv and piv[-1] == n:
        return Solution(False, witness_row=list(r.rows[len(piv) - 1]), pivots=piv)
    x = [field.zero] * n
    for i, c in enumerate(piv):
        x[c] = r.rows[i][n]
    pivset = set(piv)
    vecs = []
    for f in range(n):
        if f in pivset:
            continue
        v = [field.zero] * n
        v[f] = field.one
        for i, c in enumerate(piv):
            y = r.rows[i][f]
            if y:
                v[c] = -y
        vecs.append(v)
    return Solution(True, x, Subspace.span(vecs, n, field), pivots=piv)


def solve_rows(rows: list, rhs: Sequence, ncols: int, field: Field,
               certificate: Optional[set] = None, with_kernel: bool = True) -> Solution:
    """Sparse variant of :func:`solve`: rows are ``{column: value}`` dicts."""
    aug = []
    for r, x in zip(rows, rhs):
        a = dict(r)
        if x:
            a[ncols] = x
        aug.append(a)
    red, piv = rref_rows(aug, ncols + 1, field, certificate)
    if piv and piv[-1] == ncols:
        return Solution(False, witness_row=_dense([red[-1]], ncols + 1, field)[0], pivots=piv)
    x = [field.zero] * ncols
    for r, c in zip(red, piv):
        if ncols in r:
            x[c] = r[ncols]
    kern = None
    if with_kernel:
        pivset = set(piv)
        vecs = []
        for f in range(ncols):
            if f in pivset:
                continue
            v = {f: field.one}
            for r, c in zip(red, piv):
                y = r.get(f)
                if y:
                    v[c] = -y
            vecs.append(v)
        kr, kp = rref_rows(vecs, ncols, field)
        kern = Subspace(ncols, tuple(tuple(d) for d in _dense(kr, ncols, field)), tuple(kp), field)
    return Solution(True, x, kern, pivots=piv)


def complement_pivots(U: Subspace, W: Subspace) -> list:
    wp = set(W.pivots)
    return [p for p in U.pivots if p not in wp]


def quotient_basis(U: Subspace, W: Subspace) -> list:
    """Echelon basis vectors of U whose pivots are not pivots of W."""
    wp = set(W.pivots)
    return [list(b) for b, p in zip(U.basis, U.pivots) if p not in wp]


def quotient_coords(U: Subspace, W: Subspace, v: Sequence, check_inclusion: bool = True) -> list:
    """Coordinates of v + W in the complement basis of W inside U."""
    if U.ambient_dim != W.ambient_dim or len(v) != U.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    if check_inclusion and not W.is_subspace_of(U):
        raise ValueError("W is not contained in U")
    v = list(v)
    for b, p in zip(W.basis, W.pivots):
        a = v[p]
        if a:
            v = [x - a * y if y else x for x, y in zip(v, b)]
    if not U.contains(v):
        raise ValueError("vector is not in U")
    return [v[p] for p in complement_pivots(U, W)]
