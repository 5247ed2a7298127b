"""Polynomial systems encoding graded isomorphisms between cohomology algebras.

A graded linear map phi with phi(1) = 1 sends the k-th basis class of degree i
at one parameter to sum_k' alpha_i_k_k' times the classes at the other.  It is
multiplicative exactly when every equation

    phi(e^j_p cup_s e^j'_q) - phi(e^j_p) cup_t phi(e^j'_q) = 0

holds coefficientwise.  The equations are at most quadratic.  Nothing here
solves them in general: the module builds, simplifies, searches under guesses
and verifies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from .cohomology import CohomologyModel, cup_table
from .linalg import Matrix, determinant
from .scalar import QQ, QQt, Field, RatFunc


class IsoError(ValueError):
    pass


# -- polynomials -----------------------------------------------------------------
#
# A monomial is a sorted tuple of variable indices (repetition = exponent); the
# constant monomial is ().  Monomials are ordered by comparing these tuples.

def _inv(x):
    return x.inverse() if isinstance(x, RatFunc) else 1 / x


class MPoly:
    """Sparse polynomial {monomial: coefficient}; immutable once built."""

    __slots__ = ("terms", "_key", "_vars")

    def __init__(self, terms: dict):
        self.terms = {m: c for m, c in terms.items() if c}
        self._key = None
        self._vars = None

    @property
    def monomials(self) -> list:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def variables(self) -> frozenset:
        if self._vars is None:
            self._vars = frozenset(v for m in self.terms for v in m)
        return self._vars

    def canonical(self) -> "MPoly":
        """Scale so that the coefficient of the first monomial is 1."""
        if not self.terms:
            return self
        lead = self.terms[min(self.terms)]
        if lead == 1:
            return self
        inv = _inv(lead)
        return MPoly({m: c * inv for m, c in self.terms.items()})

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def substitute(self, var: int, value) -> "MPoly":
        out: dict = {}
        for m, c in self.terms.items():
            if var in m:
                k = m.count(var)
                rest = tuple(v for v in m if v != var)
                c = c * value ** k if k > 1 else c * value
                if not c:
                    continue
            else:
                rest = m
            y = out.get(rest)
            out[rest] = c if y is None else y + c
        return MPoly(out)

    def evaluate(self, values: Sequence):
        total = 0
        for m, c in self.terms.items():
            x = c
            for v in m:
                x = x * values[v]
                if not x:
                    break
            total = total + x
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"MPoly({self.terms!r})"


# -- systems ---------------------------------------------------------------------

@dataclass
class Block:
    degree: int
    size: int
    offset: int          # index of alpha_degree_1_1

    def var(self, j: int, k: int) -> int:
        """Index of alpha_{degree, j, k} (0-based j, k)."""
        return self.offset + j * self.size + k


@dataclass
class PolySystem:
    field: Field
    variables: list
    blocks: list
    equations: list = dc_field(default_factory=list)
    ledger: list = dc_field(default_factory=list)
    inconsistent: bool = False
    witness: Optional[str] = None
    diagnostic: Optional[str] = None
    _seen: set = dc_field(default_factory=set, repr=False)

    def add(self, p: MPoly) -> bool:
        """Insert the canonical form of p unless zero or already present."""
        if p.is_zero():
            return False
        q = p.canonical()
        k = q.key()
        if k in self._seen:
            return False
        if q.is_constant():
            self.inconsistent = True
            self.witness = self.witness or "an equation reduced to a nonzero constant"
        self._seen.add(k)
        self.equations.append(q)
        return True

    @property
    def forced(self) -> dict:
        return {e["index"]: e["value"] for e in self.ledger}

    def block_of(self, v: int) -> tuple:
        for b in self.blocks:
            if b.offset <= v < b.offset + b.size * b.size:
                r = v - b.offset
                return b, r // b.size, r % b.size
        raise IndexError(v)

    def var_index(self, name: str) -> int:
        try:
            return self._names()[name]
        except KeyError:
            raise IsoError(f"unknown variable {name}") from None

    def _names(self) -> dict:
        return {n: i for i, n in enumerate(self.variables)}

    def copy(self) -> "PolySystem":
        return PolySystem(self.field, list(self.variables), list(self.blocks), list(self.equations),
                          [dict(e) for e in self.ledger], self.inconsistent, self.witness,
                          self.diagnostic, set(self._seen))

    def substitute(self, var: int, value, rule: str, partners: Sequence[int] = ()) -> None:
        value = self.field(value) if not isinstance(value, str) else self.field.parse(value)
        entry = {"var": self.variables[var], "index": var, "value": value, "rule": rule}
        if partners:
            entry["partners"] = [self.variables[v] for v in sorted(partners)]
        self.ledger.append(entry)
        hit = [p for p in self.equations if var in p.variables()]
        self.equations = [p for p in self.equations if var not in p.variables()]
        self._seen = {p.key() for p in self.equations}
        for p in hit:
            self.add(p.substitute(var, value))

    def variables_in_use(self) -> set:
        return {v for p in self.equations for v in p.variables()}

    # -- serialization -------------------------------------------------------
    def to_json(self) -> dict:
        fmt = self.field.format
        names = self.variables
        return {
            "field": self.field.name,
            "blocks": [[b.degree, b.size] for b in self.blocks],
            "variables": list(names),
            "equations": [[[fmt(c), [names[v] for v in m]] for m, c in sorted(p.terms.items())]
                          for p in self.equations],
            "ledger": [{k: (fmt(v) if k == "value" else v) for k, v in e.items() if k != "index"}
                       for e in self.ledger],
            "inconsistent": self.inconsistent,
            "witness": self.witness,
            "diagnostic": self.diagnostic,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "PolySystem":
        field = QQt if data.get("field") == QQt.name else QQ
        blocks, off = [], 0
        for deg, size in data["blocks"]:
            blocks.append(Block(deg, size, off))
            off += size * size
        S = cls(field, list(data["variables"]), blocks)
        if len(S.variables) != off:
            raise IsoError("variable list does not match the block sizes")
        names = S._names()
        for eq in data["equations"]:
            terms: dict = {}
            for c, vs in eq:
                m = tuple(sorted(names[v] for v in vs))
                x = field.parse(c)
                terms[m] = terms[m] + x if m in terms else x
            S.add(MPoly(terms))
        for e in data.get("ledger", []):
            entry = dict(e, index=names[e["var"]], value=field.parse(e["value"]))
            S.ledger.append(entry)
        S.inconsistent = S.inconsistent or bool(data.get("inconsistent"))
        S.witness = data.get("witness") or S.witness
        S.diagnostic = data.get("diagnostic")
        return S


def variable_name(degree: int, j: int, k: int) -> str:
    return f"alpha_{degree}_{j + 1}_{k + 1}"


def _blocks(betti: Sequence[int]) -> tuple:
    blocks, names, off = [], [], 0
    for i in range(1, len(betti)):
        b = betti[i]
        if not b:
            continue
        blocks.append(Block(i, b, off))
        names += [variable_name(i, j, k) for j in range(b) for k in range(b)]
        off += b * b
    return blocks, names


def build_graded_iso_system(Ms: CohomologyModel, Mt: CohomologyModel) -> PolySystem:
    """Equations for a graded algebra map H(s) -> H(t) fixing the unit."""
    if Ms.field is not Mt.field:
        raise IsoError(f"models over different fields ({Ms.field}, {Mt.field}); lift one first")
    field = Ms.field
    bs, bt = Ms.betti, Mt.betti
    if bs != bt:
        diff = [k for k in range(max(len(bs), len(bt)))
                if (bs[k] if k < len(bs) else 0) != (bt[k] if k < len(bt) else 0)]
        blocks, names = _blocks(bs)
        S = PolySystem(field, names, blocks, inconsistent=True,
                       witness="Betti numbers differ", diagnostic=f"Betti numbers differ in degrees {diff}")
        S.add(MPoly({(): field.one}))
        return S
    betti = bs
    n = Ms.dim
    blocks, names = _blocks(betti)
    by_deg = {b.degree: b for b in blocks}
    S = PolySystem(field, names, blocks)
    for p in range(1, n + 1):
        for q in range(1, n + 1 - p):
            r = p + q
            if not betti[p] or not betti[q] or not betti[r]:
                continue
            gs, gt = cup_table(Ms, p, q), cup_table(Mt, p, q)
            Bp, Bq, Br = by_deg[p], by_deg[q], by_deg[r]
            for j in range(betti[p]):
                for jj in range(betti[q]):
                    left = gs.entries[j][jj]
                    for k in range(betti[r]):
                        terms: dict = {}
                        for m, c in enumerate(left):
                            if c:
                                v = (Br.var(m, k),)
                                terms[v] = terms.get(v, field.zero) + c
                        for a in range(betti[p]):
                            for b in range(betti[q]):
                                c = gt.entries[a][b][k]
                                if c:
                                    v = tuple(sorted((Bp.var(j, a), Bq.var(jj, b))))
                                    terms[v] = terms.get(v, field.zero) - c
                        S.add(MPoly(terms))
    return S


def lift_model(M: CohomologyModel) -> CohomologyModel:
    """View a model over QQ as one over QQ(t) (cup tables are lifted on demand)."""
    if M.field.parametric:
        return M
    from .cohomology import all_cup_tables, CupTable
    from . import lie as lie_mod
    A = M.algebra
    br = {k: tuple(QQt.lift(x) for x in v) for k, v in A.brackets.items()}
    A2 = lie_mod.LieAlgebra(A.name, A.dim, QQt, br, A.grading)
    lifted = CohomologyModel(A2, [], [], [], [[tuple(QQt.lift(x) for x in v) for v in reps]
                                             for reps in M.representatives])
    for (p, q), tab in all_cup_tables(M).items():
        ent = [[[QQt.lift(x) for x in cell] for cell in row] for row in tab.entries]
        lifted._cup_cache[(p, q)] = CupTable(p, q, ent, QQt)
    return lifted


# -- reduction -------------------------------------------------------------------

def _single_monomial(p: MPoly):
    if len(p.terms) == 1:
        (m,) = p.terms
        return m
    return None


def _complete_lines(S: PolySystem, partners: set) -> Optional[tuple]:
    """A row or column of a diagonal block fully contained in ``partners``.

    Returns (description, variable indices of the line) or None.  Row j of the
    degree-i block holds alpha_i_j_k for all k; column k holds alpha_i_j_k for all j.
    """
    for b in S.blocks:
        for j in range(b.size):
            line = [b.var(j, k) for k in range(b.size)]
            if all(v in partners for v in line):
                return f"row {j + 1} of the degree-{b.degree} block", line
        for k in range(b.size):
            line = [b.var(j, k) for j in range(b.size)]
            if all(v in partners for v in line):
                return f"column {k + 1} of the degree-{b.degree} block", line
    return None


def _singular_block(S: PolySystem) -> Optional[str]:
    hit = _complete_lines(S, {v for v, x in S.forced.items() if not x})
    return hit[0] if hit else None


def reduce_system(S: PolySystem, in_place: bool = False) -> PolySystem:
    """Apply the monomial rules until nothing changes.

    R1: c * x^k = 0 forces x = 0.
    R2: c * x * y = 0 is a disjunction; if the partners x of some y cover a
        full row or column of a diagonal block, y = 0 (otherwise that block
        would be singular).
    Each forcing is recorded in the ledger and substituted immediately.
    """
    S = S if in_place else S.copy()
    while not S.inconsistent:
        changed = False
        for p in list(S.equations):
            m = _single_monomial(p)
            if m and len(set(m)) == 1 and p in S.equations:
                v = m[0]
                name = S.variables[v]
                S.substitute(v, 0, f"R1: single monomial {name}" + (f"^{len(m)}" if len(m) > 1 else "") + " = 0")
                changed = True
                break
        if changed:
            continue
        partners: dict = {}
        for p in S.equations:
            m = _single_monomial(p)
            if m and len(m) == 2 and m[0] != m[1]:
                x, y = m
                partners.setdefault(x, set()).add(y)
                partners.setdefault(y, set()).add(x)
        for y in sorted(partners):
            hit = _complete_lines(S, partners[y])
            if hit:
                desc, line = hit
                S.substitute(y, 0, f"R2: {S.variables[y]} times every entry of {desc} vanishes; "
                                   "nonzero would make the block singular", partners=line)
                changed = True
                break
        if not changed:
            break
    if not S.inconsistent:
        sing = _singular_block(S)
        if sing:
            S.inconsistent = True
            S.witness = f"forced zeros fill {sing}"
    return S


# -- verification ----------------------------------------------------------------

@dataclass
class Verdict:
    equations_vanish: bool
    failing: list
    determinants: dict
    isomorphism: bool

    def to_json(self, field: Field) -> dict:
        return {"equations_vanish": self.equations_vanish, "failing_equations": self.failing[:20],
                "failing_count": len(self.failing),
                "determinants": {str(k): field.format(v) for k, v in self.determinants.items()},
                "isomorphism": self.isomorphism}


def _full_assignment(S: PolySystem, assignment: dict) -> list:
    vals = [None] * len(S.variables)
    for v, x in S.forced.items():
        vals[v] = x
    for name, x in assignment.items():
        v = S.var_index(name) if isinstance(name, str) else name
        x = S.field.parse(x) if isinstance(x, str) else (S.field.lift(x) if S.field.parametric else S.field(x))
        if vals[v] is not None and vals[v] != x and v in S.forced:
            raise IsoError(f"{S.variables[v]} is forced to {S.field.format(vals[v])} by the ledger")
        vals[v] = x
    missing = [S.variables[i] for i, x in enumerate(vals) if x is None]
    if missing:
        raise IsoError(f"assignment is incomplete: {len(missing)} variables missing, e.g. {missing[:5]}")
    return vals


def block_matrix(S: PolySystem, vals: Sequence, b: Block) -> Matrix:
    return Matrix([[vals[b.var(j, k)] for k in range(b.size)] for j in range(b.size)], S.field)


def verify_solution(S: PolySystem, assignment: dict) -> Verdict:
    vals = _full_assignment(S, assignment)
    failing = [i for i, p in enumerate(S.equations) if p.evaluate(vals)]
    dets = {b.degree: determinant(block_matrix(S, vals, b)) for b in S.blocks}
    ok = not failing and all(dets.values())
    return Verdict(not failing, failing, dets, ok)


def identity_assignment(S: PolySystem) -> dict:
    out = {}
    for b in S.blocks:
        for j in range(b.size):
            for k in range(b.size):
                out[S.variables[b.var(j, k)]] = S.field.one if j == k else S.field.zero
    return out


# -- guided search ---------------------------------------------------------------

@dataclass
class SearchResult:
    found: bool
    assignment: Optional[dict] = None
    verdict: Optional[Verdict] = None
    message: str = ""
    trail: list = dc_field(default_factory=list)


def _propagate(S: PolySystem) -> Optional[str]:
    """Solve equations linear in one variable until none is left; reason on failure."""
    while True:
        reduce_system(S, in_place=True)
        if S.inconsistent:
            return S.witness
        hit = False
        for p in S.equations:
            vs = p.variables()
            if len(vs) == 1 and p.degree() == 1:
                (v,) = vs
                c1 = p.terms.get((v,), S.field.zero)
                c0 = p.terms.get((), S.field.zero)
                S.substitute(v, -c0 * _inv(c1), f"linear: {S.variables[v]} determined")
                hit = True
                break
        if not hit:
            return None


def guided_search(S: PolySystem, guesses: Sequence[dict] = (), fill: str = "identity",
                  budget: int = 2000) -> SearchResult:
    """Best-effort search for a verified isomorphism.

    Guesses are applied in order, each followed by reduction and linear
    propagation.  Remaining variables are then set one at a time (candidate
    values from ``fill``: "identity" tries the Kronecker delta first, "ones"
    tries 1 first, the other of 0/1 second), propagating after each choice and
    backtracking on contradictions, within ``budget`` choices.
    """
    W = S.copy()
    trail = []
    reason = _propagate(W)
    if reason:
        return SearchResult(False, message=f"system is inconsistent before any guess: {reason}")
    for g_index, g in enumerate(guesses):
        for name, x in g.items():
            v = W.var_index(name)
            if v in W.forced:
                continue
            W.substitute(v, x, f"guess {g_index + 1}")
        reason = _propagate(W)
        trail.append(f"guess {g_index + 1} applied")
        if reason:
            return SearchResult(False, message=f"contradiction under guess {g_index + 1}: {reason}", trail=trail)

    steps = [0]

    def candidates(v: int) -> list:
        b, j, k = W.block_of(v)
        one, zero = W.field.one, W.field.zero
        if fill == "ones":
            return [one, zero]
        return [one, zero] if j == k else [zero, one]

    def dfs(T: PolySystem) -> Optional[PolySystem]:
        free = [v for v in sorted(T.variables_in_use()) if v not in T.forced]
        untouched = [v for v in range(len(T.variables)) if v not in T.forced]
        pool = free or untouched
        if not pool:
            return T
        v = pool[0]
        for x in candidates(v):
            steps[0] += 1
            if steps[0] > budget:
                return None
            U = T.copy()
            U.substitute(v, x, "search")
            if _propagate(U):
                continue
            res = dfs(U)
            if res is not None:
                return res
        return None

    done = dfs(W)
    if done is None:
        msg = "search budget exhausted" if steps[0] > budget else "no solution under guesses"
        return SearchResult(False, message=msg, trail=trail)
    assignment = {done.variables[v]: x for v, x in done.forced.items()}
    verdict = verify_solution(S, assignment)
    if not verdict.isomorphism:
        return SearchResult(False, assignment, verdict, "candidate failed verification", trail)
    return SearchResult(True, assignment, verdict, "verified isomorphism", trail)


def load_assignment(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise IsoError("assignment file must be a JSON object mapping variables to values")
    return {k: str(v) for k, v in data.items()}


def dump_assignment(assignment: dict, field: Field) -> str:
    return json.dumps({k: field.format(v) for k, v in sorted(assignment.items())}, indent=1)
