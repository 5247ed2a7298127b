"""Lie algebras given by structure constants, their lower central series and Carnot algebras.

Basis indices are 0-based in the Python API; definition files and printed
output use 1-based names ``x1 .. xn``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from . import linalg, scalar
from .linalg import Matrix, Subspace, quotient_coords, quotient_basis, complement_pivots
from .scalar import QQ, QQt, Field, ScalarSyntaxError


class LieError(ValueError):
    pass


class LieSyntaxError(LieError):
    def __init__(self, line: int, column: int, msg: str, text: str = ""):
        super().__init__(f"line {line}, column {column}: {msg}" + (f": {text!r}" if text else ""))
        self.line = line
        self.column = column


class JacobiError(LieError):
    def __init__(self, triple: tuple, residual: list, field: Field):
        i, j, k = (a + 1 for a in triple)
        res = " + ".join(f"({field.format(c)})*x{m + 1}" for m, c in enumerate(residual) if c)
        super().__init__(f"Jacobi identity fails on (x{i}, x{j}, x{k}): residual {res}")
        self.triple = triple
        self.residual = residual


class NotNilpotentError(LieError):
    pass


class ExcludedParameterError(LieError):
    pass


@dataclass(frozen=True)
class LieAlgebra:
    """Finite-dimensional Lie algebra; only brackets [x_i, x_j] with i < j are stored."""

    name: str
    dim: int
    field: Field
    brackets: dict
    grading: Optional[tuple] = None
    excluded: tuple = ()
    flags: tuple = ()

    def __post_init__(self):
        for (i, j), v in self.brackets.items():
            if not (0 <= i < j < self.dim) or len(v) != self.dim:
                raise LieError(f"bad bracket entry {(i, j)}")

    # -- brackets ----------------------------------------------------------
    def bracket_basis(self, i: int, j: int) -> Optional[tuple]:
        """[x_i, x_j] as a coordinate tuple, or None when it vanishes."""
        if i == j:
            return None
        if i < j:
            return self.brackets.get((i, j))
        v = self.brackets.get((j, i))
        return None if v is None else tuple(-c for c in v)

    def bracket(self, u: Sequence, v: Sequence) -> list:
        out = [self.field.zero] * self.dim
        for (i, j), w in self.brackets.items():
            c = u[i] * v[j] - u[j] * v[i]
            if c:
                for k, x in enumerate(w):
                    if x:
                        out[k] = out[k] + c * x
        return out

    def basis_vector(self, i: int) -> list:
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return v

    def structure_constant(self, i: int, j: int, k: int):
        v = self.bracket_basis(i, j)
        return self.field.zero if v is None else v[k]

    def is_graded(self) -> bool:
        return self.grading is not None

    def layers(self) -> list:
        if self.grading is None:
            raise LieError(f"{self.name} carries no grading")
        top = max(self.grading, default=0)
        return [[i for i, g in enumerate(self.grading) if g == a] for a in range(1, top + 1)]

    def with_name(self, name: str) -> "LieAlgebra":
        return LieAlgebra(name, self.dim, self.field, self.brackets, self.grading, self.excluded, self.flags)

    def __str__(self) -> str:
        return format_algebra(self)


def _clean_brackets(brackets: dict) -> dict:
    return {k: tuple(v) for k, v in sorted(brackets.items()) if any(v)}


def make_algebra(name: str, dim: int, field: Field, brackets: dict, grading=None,
                 excluded=(), check: bool = True, flags=()) -> LieAlgebra:
    """Build an algebra from ``{(i, j): vector}`` (any i != j) and validate Jacobi."""
    norm = {}
    for (i, j), v in brackets.items():
        v = tuple(field(x) for x in v)
        if i > j:
            i, j, v = j, i, tuple(-x for x in v)
        elif i == j:
            raise LieError(f"bracket [x{i + 1}, x{i + 1}] must vanish")
        if (i, j) in norm:
            raise LieError(f"bracket [x{i + 1}, x{j + 1}] given twice")
        norm[(i, j)] = v
    alg = LieAlgebra(name, dim, field, _clean_brackets(norm),
                     tuple(grading) if grading is not None else None,
                     tuple(Fraction(x) for x in excluded), tuple(flags))
    if check:
        check_jacobi(alg)
        if grading is not None:
            check_grading(alg)
    return alg


def jacobi_residual(A: LieAlgebra, i: int, j: int, k: int) -> list:
    """[[x_i,x_j],x_k] + [[x_j,x_k],x_i] + [[x_k,x_i],x_j] in coordinates."""
    e = A.basis_vector
    out = [A.field.zero] * A.dim
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        w = A.bracket_basis(a, b)
        if w is None:
            continue
        r = A.bracket(list(w), e(c))
        out = [x + y for x, y in zip(out, r)]
    return out


def check_jacobi(A: LieAlgebra) -> None:
    for i, j, k in combinations(range(A.dim), 3):
        r = jacobi_residual(A, i, j, k)
        if any(r):
            raise JacobiError((i, j, k), r, A.field)


def check_grading(A: LieAlgebra) -> None:
    g = A.grading
    if len(g) != A.dim:
        raise LieError("grading length differs from the dimension")
    for (i, j), v in A.brackets.items():
        for k, x in enumerate(v):
            if x and g[k] != g[i] + g[j]:
                raise LieError(f"[x{i + 1}, x{j + 1}] leaves layer {g[i] + g[j]}")


# ---------------------------------------------------------------------------
# definition files
# ---------------------------------------------------------------------------

_BRACKET = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*=\s*(.*)$")
_VAR = re.compile(r"x(\d+)\s*$")


def _split_terms(rhs: str) -> list:
    """Split at top-level + and - signs, keeping the sign with each term."""
    terms, depth, start = [], 0, 0
    for pos, ch in enumerate(rhs):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and pos > start and rhs[start:pos].strip() \
                and rhs[:pos].rstrip()[-1:] not in "*/^(":
            terms.append((start, rhs[start:pos]))
            start = pos
    terms.append((start, rhs[start:]))
    return [(s, t) for s, t in terms if t.strip()]


def _parse_rhs(rhs: str, offset: int, lineno: int, dim: int, field: Field) -> list:
    vec = [field.zero] * dim
    if rhs.strip() == "0":
        return vec
    for start, term in _split_terms(rhs):
        m = _VAR.search(term)
        if not m:
            raise LieSyntaxError(lineno, offset + start + 1, "expected a term ending in x<k>", term.strip())
        k = int(m.group(1))
        if not 1 <= k <= dim:
            raise LieSyntaxError(lineno, offset + start + m.start() + 1, f"index x{k} out of range 1..{dim}")
        coef = term[:m.start()].strip()
        if coef.endswith("*"):
            coef = coef[:-1].strip()
        if coef in ("", "+"):
            c = field.one
        elif coef == "-":
            c = -field.one
        else:
            try:
                c = field.parse(coef)
            except ScalarSyntaxError as exc:
                raise LieSyntaxError(lineno, offset + start + exc.column, str(exc)) from None
        vec[k - 1] = vec[k - 1] + c
    return vec


def parse(text: str, name: Optional[str] = None, check: bool = True) -> LieAlgebra:
    """Parse a definition file (see the README for the grammar)."""
    alg_name, dim, field, excluded, grading = name, None, QQ, [], None
    raw = []
    statements = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        col = 0
        for part in line.split(";"):
            if part.strip():
                statements.append((lineno, col + len(part) - len(part.lstrip()), part.strip()))
            col += len(part) + 1
    for lineno, col, stmt in statements:
        word = stmt.split(None, 1)
        key = word[0]
        if key == "name":
            if len(word) < 2:
                raise LieSyntaxError(lineno, col + 1, "missing name")
            alg_name = alg_name or word[1].strip()
        elif key == "dim":
            try:
                dim = int(word[1])
            except (IndexError, ValueError):
                raise LieSyntaxError(lineno, col + 1, "dim expects an integer", stmt) from None
        elif key == "param":
            parts = stmt.split()
            if len(parts) < 2 or parts[1] != "t":
                raise LieSyntaxError(lineno, col + 1, "the parameter must be named t", stmt)
            field = QQt
            if len(parts) > 2:
                if parts[2] != "excluded":
                    raise LieSyntaxError(lineno, col + 1, "expected 'excluded'", stmt)
                vals = " ".join(parts[3:]).replace(",", " ").split()
                try:
                    excluded = [Fraction(v) for v in vals]
                except ValueError:
                    raise LieSyntaxError(lineno, col + 1, "excluded values must be rationals", stmt) from None
        elif key == "grading":
            try:
                grading = [int(x) for x in stmt.split()[1:]]
            except ValueError:
                raise LieSyntaxError(lineno, col + 1, "grading expects integers", stmt) from None
        elif stmt.startswith("["):
            raw.append((lineno, col, stmt))
        else:
            raise LieSyntaxError(lineno, col + 1, "unknown statement", stmt)
    if dim is None:
        raise LieSyntaxError(1, 1, "missing 'dim' statement")
    brackets = {}
    for lineno, col, stmt in raw:
        m = _BRACKET.match(stmt)
        if not m:
            raise LieSyntaxError(lineno, col + 1, "malformed bracket", stmt)
        i, j = int(m.group(1)), int(m.group(2))
        for idx, g in ((i, 1), (j, 2)):
            if not 1 <= idx <= dim:
                raise LieSyntaxError(lineno, col + m.start(g) + 1, f"index {idx} out of range 1..{dim}")
        if i == j:
            raise LieSyntaxError(lineno, col + 1, "bracket of a basis element with itself")
        key = (min(i, j) - 1, max(i, j) - 1)
        if key in brackets:
            raise LieSyntaxError(lineno, col + 1, f"bracket [{key[0] + 1},{key[1] + 1}] defined twice")
        vec = _parse_rhs(m.group(3), col + m.start(3), lineno, dim, field)
        if i > j:
            vec = [-x for x in vec]
        brackets[key] = vec
    if grading is not None and len(grading) != dim:
        raise LieSyntaxError(1, 1, "grading must list one layer per basis element")
    return make_algebra(alg_name or "unnamed", dim, field, brackets, grading, excluded, check=check)


def load(path, check: bool = True) -> LieAlgebra:
    with open(path) as fh:
        return parse(fh.read(), check=check)


def format_algebra(A: LieAlgebra) -> str:
    lines = [f"name {A.name}", f"dim {A.dim}"]
    if A.field.parametric:
        ex = " ".join(str(x) for x in A.excluded)
        lines.append("param t" + (f" excluded {ex}" if ex else ""))
    if A.grading is not None:
        lines.append("grading " + " ".join(str(g) for g in A.grading))
    for (i, j), v in A.brackets.items():
        terms = []
        for k, c in enumerate(v):
            if not c:
                continue
            s = A.field.format(c)
            if s == "1":
                terms.append(f"x{k + 1}")
            elif s == "-1":
                terms.append(f"-x{k + 1}")
            elif any(ch in s for ch in "+-/") and not (s.startswith("-") and s[1:].isdigit()):
                terms.append(f"({s})*x{k + 1}")
            else:
                terms.append(f"{s}*x{k + 1}")
        rhs = " + ".join(terms).replace("+ -", "- ")
        lines.append(f"[{i + 1},{j + 1}] = {rhs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def abelian(n: int, field: Field = QQ, name: Optional[str] = None) -> LieAlgebra:
    return make_algebra(name or f"R{n}", n, field, {}, grading=[1] * n)


def heisenberg(field: Field = QQ) -> LieAlgebra:
    one = field.one
    z = field.zero
    return make_algebra("H3", 3, field, {(0, 1): (z, z, one)})


@dataclass
class Flag:
    """Descending chain of subspaces g_1 >= g_2 >= ... (the trailing {0} is implicit)."""

    terms: list
    nilpotent: bool = True

    @property
    def dims(self) -> tuple:
        return tuple(t.dim for t in self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def bracket_span(A: LieAlgebra, U: Subspace, V: Subspace) -> Subspace:
    vecs = []
    for u in U.basis:
        for v in V.basis:
            w = A.bracket(u, v)
            if any(w):
                vecs.append(w)
    return Subspace.span(vecs, A.dim, A.field)


def lcs(A: LieAlgebra, strict: bool = False) -> Flag:
    """Lower central series g_1 = g, g_{i+1} = [g, g_i], down to (excluding) {0}.

    For a non-nilpotent algebra the series stabilises at a nonzero term; the
    returned flag then has ``nilpotent=False`` (or NotNilpotentError if strict).
    """
    g = Subspace.full(A.dim, A.field)
    terms = [g] if A.dim else []
    cur = g
    for _ in range(A.dim + 1):
        if not cur.dim:
            break
        nxt = bracket_span(A, g, cur)
        if nxt.dim == cur.dim:
            if strict:
                raise NotNilpotentError(f"{A.name} is not nilpotent: lcs stalls at dimension {cur.dim}")
            return Flag(terms, nilpotent=False)
        if nxt.dim:
            terms.append(nxt)
        cur = nxt
    return Flag(terms, nilpotent=True)


def _reduce(W: Subspace, v: Sequence) -> list:
    """v minus its echelon projection onto W (zero exactly when v is in W)."""
    v = list(v)
    for b, p in zip(W.basis, W.pivots):
        c = v[p]
        if c:
            v = [x - c * y for x, y in zip(v, b)]
    return v


def ucs(A: LieAlgebra) -> Flag:
    """Upper central series z_1 = centre, z_{i+1} = {x : [x, g] in z_i}, ascending.

    The terms are returned in ascending order, ending with g itself for
    nilpotent input.
    """
    n = A.dim
    field = A.field
    cur = Subspace.zero(n, field)
    terms = []
    for _ in range(n + 1):
        rows = []
        for j in range(n):
            cols = [_reduce(cur, A.bracket(A.basis_vector(k), A.basis_vector(j))) for k in range(n)]
            rows.extend([cols[k][m] for k in range(n)] for m in range(n))
        nxt = linalg.kernel(Matrix(rows, field, n))
        if nxt.dim == cur.dim:
            return Flag(terms, nilpotent=False)
        terms.append(nxt)
        cur = nxt
        if nxt.dim == n:
            break
    return Flag(terms, nilpotent=True)


def inertia(rows: Sequence[Sequence]) -> tuple:
    """(positive, negative, zero) counts of a symmetric rational matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j]), None)
            if pair is None:
                break
            # e_i + e_j has nonzero square 2 m_ij
            i, j = pair
            for k in range(n):
                m[i][k] += m[j][k]
            for k in range(n):
                m[k][i] += m[k][j]
            piv = i
        d = m[piv][piv]
        pos, neg = (pos + 1, neg) if d > 0 else (pos, neg + 1)
        active.remove(piv)
        for i in active:
            c = m[i][piv] / d
            if c:
                for k in range(n):
                    m[i][k] -= c * m[piv][k]
        for i in active:
            m[i][piv] = m[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def layer_forms(A: LieAlgebra) -> list:
    """Quadratic forms on g/[g,g] read off one-dimensional lcs layers.

    For each r with dim g_r/g_{r+1} = 1 = dim g_{r+2}/g_{r+3}, the symmetrised
    map (u, v) -> [u, [v, z]] modulo g_{r+3}, z spanning g_r mod g_{r+1},
    is an isomorphism invariant of g up to a nonzero scalar.  Returns a list
    of (r, matrix) pairs.
    """
    flag = lcs(A, strict=True)
    terms = list(flag.terms) + [Subspace.zero(A.dim, A.field)] * 3
    c = len(flag.terms)
    gens = quotient_basis(terms[0], terms[1])
    half = A.field.one / A.field.from_int(2)
    out = []
    for r in range(1, c - 1):
        if terms[r - 1].dim - terms[r].dim != 1 or terms[r + 1].dim - terms[r + 2].dim != 1:
            continue
        z = quotient_basis(terms[r - 1], terms[r])[0]
        adz = [A.bracket(v, z) for v in gens]
        vals = [[quotient_coords(terms[r + 1], terms[r + 2], A.bracket(u, w), check_inclusion=False)[0]
                 for w in adz] for u in gens]
        k = len(gens)
        out.append((r, [[(vals[i][j] + vals[j][i]) * half for j in range(k)] for i in range(k)]))
    return out


def form_signature(A: LieAlgebra) -> tuple:
    """Inertia of every layer form, with the overall sign ambiguity removed."""
    sig = []
    for r, m in layer_forms(A):
        p, q, z = inertia(m)
        sig.append((r, max(p, q), min(p, q), z))
    return tuple(sig)


def is_nilpotent(A: LieAlgebra) -> bool:
    return lcs(A).nilpotent


@dataclass
class CarnotData:
    algebra: LieAlgebra
    lifts: list            # original-basis vector lifting each new basis element
    layer_dims: tuple


def carnot_with_lifts(A: LieAlgebra, name: Optional[str] = None) -> CarnotData:
    flag = lcs(A, strict=True)
    terms = list(flag.terms) + [Subspace.zero(A.dim, A.field)]
    lifts, grading = [], []
    for a in range(len(flag.terms)):
        for v in quotient_basis(terms[a], terms[a + 1]):
            lifts.append(v)
            grading.append(a + 1)
    n = A.dim
    brackets = {}
    for p in range(n):
        for q in range(p + 1, n):
            layer = grading[p] + grading[q]
            if layer > len(flag.terms):
                continue
            w = A.bracket(lifts[p], lifts[q])
            if not any(w):
                continue
            coords = quotient_coords(terms[layer - 1], terms[layer], w, check_inclusion=False)
            offset = grading.index(layer)
            vec = [A.field.zero] * n
            for r, c in enumerate(coords):
                vec[offset + r] = c
            if any(vec):
                brackets[(p, q)] = vec
    C = make_algebra(name or f"Car({A.name})", n, A.field, brackets, grading=grading, excluded=A.excluded)
    return CarnotData(C, lifts, tuple(len(l) for l in C.layers()))


def carnot(A: LieAlgebra, name: Optional[str] = None) -> LieAlgebra:
    """Associated graded algebra of the lower central series, relabelled in layer order."""
    return carnot_with_lifts(A, name).algebra


def specialize(A: LieAlgebra, value, allow_excluded: bool = False) -> LieAlgebra:
    """Evaluate a QQ(t) algebra at t = value and revalidate the Jacobi identity."""
    value = Fraction(value)
    if not A.field.parametric:
        return A
    flags = ()
    if value in A.excluded:
        if not allow_excluded:
            raise ExcludedParameterError(f"t = {value} is excluded for {A.name}")
        flags = (f"excluded parameter t = {value}",)
    br = {k: tuple(scalar.evaluate(x, value) for x in v) for k, v in A.brackets.items()}
    return make_algebra(f"{A.name}[t={value}]", A.dim, QQ, br, A.grading, flags=flags)


def direct_sum(A: LieAlgebra, B: LieAlgebra, name: Optional[str] = None) -> LieAlgebra:
    if A.field is not B.field:
        raise scalar.FieldMismatch(f"{A.name} is over {A.field}, {B.name} over {B.field}")
    n = A.dim + B.dim
    z = A.field.zero
    br = {}
    for (i, j), v in A.brackets.items():
        br[(i, j)] = tuple(v) + (z,) * B.dim
    for (i, j), v in B.brackets.items():
        br[(i + A.dim, j + A.dim)] = (z,) * A.dim + tuple(v)
    grading = None
    if A.grading is not None and B.grading is not None:
        grading = A.grading + B.grading
    return make_algebra(name or f"{A.name}+{B.name}", n, A.field, br, grading,
                        excluded=sorted(set(A.excluded) | set(B.excluded)))


def same_structure(A: LieAlgebra, B: LieAlgebra) -> bool:
    """Literal equality of structure constants in the given bases."""
    return A.dim == B.dim and A.field is B.field and A.brackets == B.brackets


def relabel(A: LieAlgebra, perm: Sequence[int], name: Optional[str] = None) -> LieAlgebra:
    """Rename basis element i as perm[i]."""
    n = A.dim
    br = {}
    for (i, j), v in A.brackets.items():
        w = [A.field.zero] * n
        for k, x in enumerate(v):
            w[perm[k]] = x
        br[(perm[i], perm[j])] = w
    grading = None
    if A.grading is not None:
        grading = [0] * n
        for i, g in enumerate(A.grading):
            grading[perm[i]] = g
    return make_algebra(name or A.name, n, A.field, br, grading, A.excluded)
