"""Formal deformations of a parametric cohomology algebra.

The cohomology algebras of a 1-parameter family are viewed as products on one
vector space with a fixed basis: the representative classes of every degree,
concatenated in degree order.  The m-th Taylor coefficient of the structure
constants is a bilinear map f_m; when f_1 is not a Hochschild coboundary the
algebras cannot be joined by a differentiable family of isomorphisms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from . import linalg, scalar
from .cohomology import CohomologyModel, cup_table
from .scalar import QQ, Field, Poly, RatFunc


class AssociativityError(RuntimeError):
    """The assembled product is not associative (implementation defect)."""


def _add(d: dict, k, x) -> None:
    y = d.get(k)
    y = x if y is None else y + x
    if y:
        d[k] = y
    else:
        d.pop(k, None)


@dataclass
class BilinearMap:
    """f(e_i, e_j) = sum_k table[(i, j)][k] e_k, stored sparsely."""

    dim: int
    field: Field
    table: dict = dc_field(default_factory=dict)

    def get(self, i: int, j: int, k: int):
        return self.table.get((i, j), {}).get(k, self.field.zero)

    def is_zero(self) -> bool:
        return not any(self.table.values())

    def __add__(self, other: "BilinearMap") -> "BilinearMap":
        out = {key: dict(v) for key, v in self.table.items()}
        for key, v in other.table.items():
            cell = out.setdefault(key, {})
            for k, x in v.items():
                _add(cell, k, x)
        return BilinearMap(self.dim, self.field, {k: v for k, v in out.items() if v})

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearMap):
            return NotImplemented
        a = {k: v for k, v in self.table.items() if v}
        b = {k: v for k, v in other.table.items() if v}
        return self.dim == other.dim and a == b

    def dense(self) -> list:
        z = self.field.zero
        return [[[self.get(i, j, k) for k in range(self.dim)] for j in range(self.dim)]
                for i in range(self.dim)]


@dataclass
class FiniteAlgebra:
    """Graded unital algebra with structure constants q[(i, j)][k]."""

    dim: int
    field: Field
    mult: dict
    degrees: tuple
    unit: int = 0

    def product(self, a: Sequence, b: Sequence) -> list:
        out = [self.field.zero] * self.dim
        for (i, j), cell in self.mult.items():
            c = a[i] * b[j]
            if c:
                for k, x in cell.items():
                    out[k] = out[k] + c * x
        return out

    def as_bilinear(self) -> BilinearMap:
        return BilinearMap(self.dim, self.field, {k: dict(v) for k, v in self.mult.items()})

    def specialize(self, value) -> "FiniteAlgebra":
        if not self.field.parametric:
            return self
        ev = self.field.specialize
        mult = {}
        for key, cell in self.mult.items():
            c = {k: ev(x, value) for k, x in cell.items()}
            c = {k: x for k, x in c.items() if x}
            if c:
                mult[key] = c
        return FiniteAlgebra(self.dim, QQ, mult, self.degrees, self.unit)

    def associativity_defect(self) -> list:
        """Basis triples (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k)."""
        bad = []
        n = self.dim
        for i in range(n):
            for j in range(n):
                ij = self.mult.get((i, j), {})
                for k in range(n):
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.degrees[-1]:
                        continue
                    left: dict = {}
                    for m, x in ij.items():
                        for l, y in self.mult.get((m, k), {}).items():
                            _add(left, l, x * y)
                    right: dict = {}
                    for m, x in self.mult.get((j, k), {}).items():
                        for l, y in self.mult.get((i, m), {}).items():
                            _add(right, l, x * y)
                    if left != right:
                        bad.append((i, j, k))
        return bad

    def poles(self) -> list:
        """Monic denominators occurring in the structure constants."""
        seen = set()
        for cell in self.mult.values():
            for x in cell.values():
                if isinstance(x, RatFunc) and x.den.degree > 0:
                    seen.add(linalg.certificate_key(x.den))
        return linalg.certificate_polys(seen)


def assemble(M: CohomologyModel, check: bool = True) -> FiniteAlgebra:
    """The whole cohomology algebra on the concatenated representative basis."""
    betti = M.betti
    n = M.dim
    offsets = [0]
    for b in betti:
        offsets.append(offsets[-1] + b)
    degrees = tuple(k for k in range(n + 1) for _ in range(betti[k]))
    mult: dict = {}
    for p in range(n + 1):
        for q in range(n + 1 - p):
            if not betti[p] or not betti[q] or not betti[p + q]:
                continue
            tab = cup_table(M, p, q)
            for i in range(betti[p]):
                for j in range(betti[q]):
                    cell = {offsets[p + q] + k: x for k, x in enumerate(tab.entries[i][j]) if x}
                    if cell:
                        mult[(offsets[p] + i, offsets[q] + j)] = cell
    A = FiniteAlgebra(offsets[-1], M.field, mult, degrees, 0)
    if check:
        bad = A.associativity_defect()
        if bad:
            raise AssociativityError(f"product not associative on basis triple {bad[0]}")
    return A


def exterior_algebra(n: int, field: Field = QQ) -> FiniteAlgebra:
    """Lambda(R^n) on the lexicographic monomial basis, as a FiniteAlgebra."""
    from .cohomology import ext_basis, merge_sign
    basis = [I for k in range(n + 1) for I in ext_basis(n, k)]
    index = {I: a for a, I in enumerate(basis)}
    mult = {}
    for a, I in enumerate(basis):
        for b, J in enumerate(basis):
            s = merge_sign(I, J)
            if s:
                mult[(a, b)] = {index[tuple(sorted(I + J))]: field.from_int(s)}
    return FiniteAlgebra(len(basis), field, mult, tuple(len(I) for I in basis), 0)


# -- Taylor coefficients -------------------------------------------------------

def _taylor(x, m: int, at):
    if not isinstance(x, RatFunc):
        return x if m == 0 else Fraction(0)
    d = x
    for _ in range(m):
        d = d.derivative()
    if m > 1:
        d = d * RatFunc.constant(Fraction(1, factorial(m)))
    return d if at is None else scalar.evaluate(d, at)


def maclaurin(A: FiniteAlgebra, at, m: int) -> BilinearMap:
    """m-th Taylor coefficient of the product around ``at``.

    ``at=None`` keeps the coefficient as a rational function of the parameter
    (the generic base point); otherwise it is evaluated at the rational ``at``.
    """
    if m < 0:
        raise ValueError("order must be non-negative")
    field = A.field if at is None else QQ
    if at is not None:
        at = Fraction(at)
    table = {}
    for key, cell in A.mult.items():
        c = {}
        for k, x in cell.items():
            y = _taylor(x, m, at)
            if y:
                c[k] = y
        if c:
            table[key] = c
    return BilinearMap(A.dim, field, table)


# -- Hochschild differentials --------------------------------------------------

def _left(A: FiniteAlgebra, i: int, vec: dict) -> dict:
    """e_i * vec."""
    out: dict = {}
    for m, x in vec.items():
        for l, y in A.mult.get((i, m), {}).items():
            _add(out, l, x * y)
    return out


def _right(A: FiniteAlgebra, vec: dict, k: int) -> dict:
    """vec * e_k."""
    out: dict = {}
    for m, x in vec.items():
        for l, y in A.mult.get((m, k), {}).items():
            _add(out, l, x * y)
    return out


def _apply_f(f: BilinearMap, u: dict, k: int, left: bool) -> dict:
    """f(u, e_k) if left else f(e_k, u)."""
    out: dict = {}
    for m, x in u.items():
        cell = f.table.get((m, k) if left else (k, m), {})
        for l, y in cell.items():
            _add(out, l, x * y)
    return out


def hochschild_2cocycle_check(A: FiniteAlgebra, f: BilinearMap) -> dict:
    """Nonzero values of a f(b,c) - f(ab,c) + f(a,bc) - f(a,b) c on basis triples."""
    n = A.dim
    res = {}
    for i in range(n):
        for j in range(n):
            fij = f.table.get((i, j), {})
            ij = A.mult.get((i, j), {})
            for k in range(n):
                out = _left(A, i, f.table.get((j, k), {}))
                for l, x in _apply_f(f, ij, k, True).items():
                    _add(out, l, -x)
                for l, x in _apply_f(f, A.mult.get((j, k), {}), i, False).items():
                    _add(out, l, x)
                for l, x in _right(A, fij, k).items():
                    _add(out, l, -x)
                if out:
                    res[(i, j, k)] = out
    return res


def d1_coboundary(A: FiniteAlgebra, g: Sequence) -> BilinearMap:
    """(a, b) -> a g(b) - g(ab) + g(a) b, with g(e_i) = sum_j g[i][j] e_j."""
    n = A.dim
    rows = [{j: x for j, x in enumerate(g[i]) if x} for i in range(n)]
    table = {}
    for i in range(n):
        for j in range(n):
            out = _left(A, i, rows[j])
            for k, x in A.mult.get((i, j), {}).items():
                for l, y in rows[k].items():
                    _add(out, l, -x * y)
            for l, x in _right(A, rows[i], j).items():
                _add(out, l, x)
            if out:
                table[(i, j)] = out
    return BilinearMap(n, A.field, table)


# -- the coboundary system -----------------------------------------------------

@dataclass
class LinSystem:
    """Linear equations sum_u row[u] b_u = rhs over the unknowns b_{ij} (u = i*N + j).

    ``shift[r]`` is the degree shift deg(l) - deg(i) - deg(j) of equation r;
    every unknown in that equation maps a class of degree d to degree d + shift.
    """

    size: int
    field: Field
    rows: list
    rhs: list
    labels: list
    shift: list
    raw_count: int

    @property
    def unknown_count(self) -> int:
        return self.size * self.size

    @property
    def equation_count(self) -> int:
        return len(self.rows)

    def unknown_name(self, u: int) -> str:
        return f"b_{u // self.size + 1}_{u % self.size + 1}"

    def residual(self, x: Sequence) -> list:
        """Indices of equations not satisfied by the dense assignment x."""
        bad = []
        for r, (row, b) in enumerate(zip(self.rows, self.rhs)):
            s = self.field.zero
            for u, c in row.items():
                if x[u]:
                    s = s + c * x[u]
            if s != b:
                bad.append(r)
        return bad


def _normalize(row: dict, rhs):
    keys = sorted(row)
    if not keys:
        return (), "nonzero"
    lead = row[keys[0]]
    inv = 1 / lead if isinstance(lead, Fraction) else lead.inverse()
    return tuple((u, row[u] * inv) for u in keys), rhs * inv


def coboundary_system(A: FiniteAlgebra, f: BilinearMap) -> LinSystem:
    """Coefficient comparison for d1(g) = f, one equation per (i, j, l)."""
    n = A.dim
    field = A.field
    if f.field is not field:
        raise scalar.FieldMismatch(f"product over {field} but cocycle over {f.field}")
    deg = A.degrees
    # q_{kj}^l indexed by (j, l) -> [(k, value)] and q_{ik}^l by (i, l) -> [(k, value)]
    by_right: dict = {}
    by_left: dict = {}
    for (a, b), cell in A.mult.items():
        for l, x in cell.items():
            by_right.setdefault((b, l), []).append((a, x))
            by_left.setdefault((a, l), []).append((b, x))
    seen = {}
    rows, rhs, labels, shifts = [], [], [], []
    raw = 0
    zero = field.zero
    for i in range(n):
        for j in range(n):
            ij = A.mult.get((i, j), {})
            fij = f.table.get((i, j), {})
            for l in range(n):
                row: dict = {}
                for k, x in by_right.get((j, l), ()):
                    _add(row, i * n + k, x)
                for k, x in ij.items():
                    _add(row, k * n + l, -x)
                for k, x in by_left.get((i, l), ()):
                    _add(row, j * n + k, x)
                b = fij.get(l, zero)
                if not row and not b:
                    continue
                raw += 1
                key = _normalize(row, b)
                if key in seen:
                    continue
                seen[key] = len(rows)
                rows.append(row)
                rhs.append(b)
                labels.append((i, j, l))
                shifts.append(deg[l] - deg[i] - deg[j])
    return LinSystem(n, field, rows, rhs, labels, shifts, raw)


def random_linear_map(n: int, rng, field: Field = QQ, lo: int = -3, hi: int = 3) -> list:
    return [[field.from_int(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)]


@dataclass
class CoboundaryVerdict:
    solvable: bool
    mode: object                 # "symbolic" or the rational base point
    equation_count: int
    raw_equation_count: int
    unknown_count: int
    witness: Optional[list] = None            # g as an N x N matrix
    inconsistency: Optional[dict] = None      # the contradictory combination
    certificate: list = dc_field(default_factory=list)
    family: Optional[str] = None
    verified: Optional[bool] = None
    labels: list = dc_field(default_factory=list, repr=False)   # equation labels (i, j, l)

    def to_json(self, field: Field) -> dict:
        fmt = field.format
        out = {
            "family": self.family,
            "mode": "symbolic" if self.mode == "symbolic" else {"lambda0": scalar.format_rat(Fraction(self.mode))},
            "solvable": self.solvable,
            "equation_count": self.equation_count,
            "raw_equation_count": self.raw_equation_count,
            "unknown_count": self.unknown_count,
            "genericity_certificate": [scalar.format_poly(p) for p in self.certificate],
        }
        if self.solvable:
            n = len(self.witness)
            out["witness"] = {f"b_{i + 1}_{j + 1}": fmt(self.witness[i][j])
                              for i in range(n) for j in range(n) if self.witness[i][j]}
            out["verified"] = self.verified
        else:
            inc = self.inconsistency
            out["inconsistency_row"] = {
                "shift": inc["shift"],
                "terms": {k: fmt(v) for k, v in inc["terms"].items()},
                "rhs": fmt(inc["rhs"]),
            }
            if "combination" in inc:
                out["contradiction"] = {
                    "multipliers": {"({},{},{})".format(*(a + 1 for a in self.labels[r])): fmt(y)
                                    for r, y in sorted(inc["combination"].items())},
                    "checked": inc["combination_checked"],
                }
        return out

    def dumps(self, field: Field) -> str:
        return json.dumps(self.to_json(field), sort_keys=True, indent=2)


def contradiction(system: LinSystem, idx: Sequence[int], cert: Optional[set] = None) -> dict:
    """Multipliers y_r with sum_r y_r row_r = 0 and sum_r y_r rhs_r = 1.

    Found by solving the transposed system, which has one equation per unknown
    plus one for the right-hand side, so it stays small.  Returns {r: y_r}.
    """
    field = system.field
    local = {r: a for a, r in enumerate(idx)}
    trans: dict = {}
    for r in idx:
        for u, c in system.rows[r].items():
            trans.setdefault(u, {})[local[r]] = c
    rows = [trans[u] for u in sorted(trans)]
    rows.append({local[r]: system.rhs[r] for r in idx if system.rhs[r]})
    rhs = [field.zero] * (len(rows) - 1) + [field.one]
    sol = linalg.solve_rows(rows, rhs, len(idx), field, cert, with_kernel=False)
    if not sol.consistent:
        raise RuntimeError("block is consistent; no contradiction exists")
    return {idx[a]: y for a, y in enumerate(sol.particular) if y}


def check_contradiction(system: LinSystem, comb: dict) -> bool:
    """Substitute the multipliers back: every unknown cancels and the sides differ."""
    field = system.field
    total: dict = {}
    for r, y in comb.items():
        for u, c in system.rows[r].items():
            _add(total, u, y * c)
    b = field.zero
    for r, y in comb.items():
        b = b + y * system.rhs[r]
    return not any(total.values()) and b == field.one


def coboundary_verdict(system: LinSystem, mode="symbolic", family: Optional[str] = None) -> CoboundaryVerdict:
    """Decide whether the system has a solution.

    Equations and unknowns split into independent blocks by degree shift (an
    equation of shift d only involves unknowns of shift d), so each block is
    eliminated separately.  Nonzero right-hand sides can only occur in the
    shift-0 block when the cocycle preserves degree, but every block with a
    nonzero right-hand side is solved.
    """
    n = system.size
    field = system.field
    blocks: dict = {}
    for r, d in enumerate(system.shift):
        blocks.setdefault(d, []).append(r)
    cert: set = set()
    x = [field.zero] * (n * n)
    for d in sorted(blocks):
        idx = blocks[d]
        if not any(system.rhs[r] for r in idx):
            continue      # homogeneous: g = 0 on this block
        cols = sorted({u for r in idx for u in system.rows[r]})
        pos = {u: a for a, u in enumerate(cols)}
        rows = [{pos[u]: c for u, c in system.rows[r].items()} for r in idx]
        sol = linalg.solve_rows(rows, [system.rhs[r] for r in idx], len(cols), field, cert, with_kernel=False)
        if not sol.consistent:
            w = sol.witness_row
            terms = {system.unknown_name(cols[a]): w[a] for a in range(len(cols)) if w[a]}
            comb = contradiction(system, idx, cert)
            return CoboundaryVerdict(False, mode, system.equation_count, system.raw_count,
                                     system.unknown_count,
                                     inconsistency={"shift": d, "terms": terms, "rhs": w[-1],
                                                    "combination": comb,
                                                    "combination_checked": check_contradiction(system, comb)},
                                     certificate=linalg.certificate_polys(cert), family=family,
                                     labels=system.labels)
        for a, u in enumerate(cols):
            if sol.particular[a]:
                x[u] = sol.particular[a]
    g = [x[i * n:(i + 1) * n] for i in range(n)]
    ok = not system.residual(x)
    return CoboundaryVerdict(True, mode, system.equation_count, system.raw_count, system.unknown_count,
                             witness=g, certificate=linalg.certificate_polys(cert), family=family,
                             verified=ok)


def infinitesimal_test(M: CohomologyModel, at=None, family: Optional[str] = None,
                       algebra: Optional[FiniteAlgebra] = None) -> CoboundaryVerdict:
    """Is f_1 of the family a Hochschild coboundary at the base point ``at``?

    ``at=None`` runs the test over QQ(t), i.e. at a generic base point.  The
    certificate then also lists the poles of the structure constants and the
    polynomials the cohomology bases depend on.
    """
    A = algebra if algebra is not None else assemble(M)
    f1 = maclaurin(A, at, 1)
    A0 = A if at is None else A.specialize(Fraction(at))
    system = coboundary_system(A0, f1)
    verdict = coboundary_verdict(system, "symbolic" if at is None else Fraction(at), family)
    if at is None and A.field.parametric:
        seen = {linalg.certificate_key(p) for p in verdict.certificate}
        seen |= {linalg.certificate_key(p) for p in A.poles()}
        seen |= M.certificate
        verdict.certificate = linalg.certificate_polys(seen)
    return verdict


def certificate_roots_avoided(cert: Sequence[Poly], value) -> bool:
    return all(p(Fraction(value)) != 0 for p in cert)
