"""Chevalley-Eilenberg cohomology with trivial coefficients and cup products.

Cochains of degree k are coordinate vectors on the basis e^I of Lambda^k g*,
with I running over the k-subsets of {0..n-1} in lexicographic order.  The
differential follows the convention d(e^m) = -sum_{i<j} c_ij^m e^i ^ e^j,
extended as an antiderivation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from . import linalg
from .lie import LieAlgebra
from .linalg import Matrix, Subspace, quotient_basis, quotient_coords
from .scalar import Field


class CohomologyError(RuntimeError):
    """Internal inconsistency; signals a bug rather than a data condition."""


@lru_cache(maxsize=None)
def ext_basis(n: int, k: int) -> tuple:
    """Strictly increasing index tuples of size k, lexicographically ordered."""
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def ext_index(n: int, k: int) -> dict:
    return {I: a for a, I in enumerate(ext_basis(n, k))}


def merge_sign(I: Sequence[int], J: Sequence[int]) -> int:
    """Sign of the shuffle sorting I + J (0 if they overlap)."""
    if set(I) & set(J):
        return 0
    inv = sum(1 for a in I for b in J if a > b)
    return -1 if inv & 1 else 1


def wedge(u: Sequence, v: Sequence, p: int, q: int, n: int, field: Field) -> list:
    """Wedge product of a p-cochain and a q-cochain on an n-dimensional algebra."""
    if p + q > n:
        return []
    bp, bq = ext_basis(n, p), ext_basis(n, q)
    idx = ext_index(n, p + q)
    out = [field.zero] * comb(n, p + q)
    for a, x in enumerate(u):
        if not x:
            continue
        I = bp[a]
        for b, y in enumerate(v):
            if not y:
                continue
            J = bq[b]
            s = merge_sign(I, J)
            if s:
                K = tuple(sorted(I + J))
                c = idx[K]
                out[c] = out[c] + x * y if s > 0 else out[c] - x * y
    return out


def _d_generators(A: LieAlgebra) -> list:
    """d(e^m) as {(i, j): coefficient} for every m."""
    dg = [dict() for _ in range(A.dim)]
    for (i, j), v in A.brackets.items():
        for m, c in enumerate(v):
            if c:
                dg[m][(i, j)] = -c
    return dg


def ce_differential(A: LieAlgebra, k: int) -> Matrix:
    """Matrix of d^k : Lambda^k -> Lambda^{k+1} (columns indexed by Lambda^k)."""
    n = A.dim
    field = A.field
    src = ext_basis(n, k)
    if k >= n:
        return Matrix([], field, len(src))
    idx = ext_index(n, k + 1)
    rows = [[field.zero] * len(src) for _ in range(comb(n, k + 1))]
    dg = _d_generators(A)
    for col, I in enumerate(src):
        for s, m in enumerate(I):
            rest = I[:s] + I[s + 1:]
            for (i, j), c in dg[m].items():
                if i in rest or j in rest:
                    continue
                # e^{I[:s]} ^ (e^i ^ e^j) ^ e^{I[s+1:]}, sign (-1)^s from passing d
                word = I[:s] + (i, j) + I[s + 1:]
                target = tuple(sorted(word))
                sign = _perm_sign(word) * (-1 if s & 1 else 1)
                r = idx[target]
                rows[r][col] = rows[r][col] + c if sign > 0 else rows[r][col] - c
    return Matrix(rows, field, len(src))


def _perm_sign(word: Sequence[int]) -> int:
    inv = 0
    for a in range(len(word)):
        for b in range(a + 1, len(word)):
            if word[a] > word[b]:
                inv += 1
    return -1 if inv & 1 else 1


@dataclass
class CohomologyModel:
    """Cocycles, coboundaries and representative classes in every degree."""

    algebra: LieAlgebra
    differentials: list
    cocycles: list          # Subspace ker d^k
    coboundaries: list      # Subspace im d^{k-1}
    representatives: list   # per degree: list of cochain vectors
    certificate: set = dc_field(default_factory=set)
    _cup_cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def betti(self) -> tuple:
        return tuple(len(r) for r in self.representatives)

    @property
    def total_dim(self) -> int:
        return sum(self.betti)

    def coords(self, k: int, v: Sequence) -> list:
        """Coordinates of the class of a k-cocycle in the representative basis."""
        return quotient_coords(self.cocycles[k], self.coboundaries[k], v, check_inclusion=False)

    def cup(self, p: int, i: int, q: int, j: int) -> list:
        w = wedge(self.representatives[p][i], self.representatives[q][j], p, q, self.dim, self.field)
        try:
            return self.coords(p + q, w)
        except ValueError:
            raise CohomologyError(f"wedge of cocycles in degrees {p},{q} is not a cocycle") from None

    def cup_class(self, p: int, a: Sequence, q: int, b: Sequence) -> list:
        """Cup product of two classes given by coordinates."""
        z = self.field.zero
        out = [z] * self.betti[p + q] if p + q <= self.dim else []
        table = cup_table(self, p, q)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, g in enumerate(table.entries[i][j]):
                    if g:
                        out[k] = out[k] + xy * g
        return out

    def genericity_certificate(self) -> list:
        return linalg.certificate_polys(self.certificate)


def cohomology(A: LieAlgebra) -> CohomologyModel:
    n = A.dim
    field = A.field
    cert: set = set()
    diffs = [ce_differential(A, k) for k in range(n + 1)]
    cocycles, cobounds, reps = [], [], []
    for k in range(n + 1):
        dk = diffs[k]
        Z = linalg.kernel(dk, cert) if dk.nrows else Subspace.full(comb(n, k), field)
        B = linalg.image(diffs[k - 1], cert) if k > 0 else Subspace.zero(1, field)
        cocycles.append(Z)
        cobounds.append(B)
        reps.append(quotient_basis(Z, B))
    return CohomologyModel(A, diffs, cocycles, cobounds, reps, cert)


def betti_numbers(A: LieAlgebra) -> tuple:
    return cohomology(A).betti


@dataclass
class CupTable:
    """entries[i][j] = coordinates of e_p^i cup e_q^j in H^{p+q}."""

    p: int
    q: int
    entries: list
    field: Field

    @property
    def shape(self) -> tuple:
        rows = len(self.entries)
        cols = len(self.entries[0]) if rows else 0
        depth = len(self.entries[0][0]) if rows and cols else 0
        return rows, cols, depth

    def to_json(self) -> dict:
        fmt = self.field.format
        return {"p": self.p, "q": self.q,
                "entries": [[[fmt(x) for x in cell] for cell in row] for row in self.entries]}

    @classmethod
    def from_json(cls, data: dict, field: Field) -> "CupTable":
        ent = [[[field.parse(x) for x in cell] for cell in row] for row in data["entries"]]
        return cls(data["p"], data["q"], ent, field)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def cup_table(M: CohomologyModel, p: int, q: int) -> CupTable:
    if p + q > M.dim:
        raise ValueError(f"p + q = {p + q} exceeds the dimension {M.dim}")
    key = (p, q)
    if key not in M._cup_cache:
        bp, bq = M.betti[p], M.betti[q]
        ent = [[M.cup(p, i, q, j) for j in range(bq)] for i in range(bp)]
        M._cup_cache[key] = CupTable(p, q, ent, M.field)
    return M._cup_cache[key]


def all_cup_tables(M: CohomologyModel) -> dict:
    n = M.dim
    return {(p, q): cup_table(M, p, q) for p in range(n + 1) for q in range(n + 1 - p)}


def poincare_pairing(M: CohomologyModel, k: int) -> Matrix:
    """Matrix of the cup pairing H^k x H^{n-k} -> H^n."""
    n = M.dim
    if M.betti[n] != 1:
        raise ValueError(f"top cohomology has dimension {M.betti[n]}, expected 1")
    t = cup_table(M, k, n - k)
    return Matrix([[cell[0] for cell in row] for row in t.entries], M.field, M.betti[n - k])
