"""Shipped definition files for the 7-dimensional families and their comparison algebras.

A manifest (``manifest.json``) lists every algebra with the invariants it is
expected to have.  Carnot expectations name another catalog entry, optionally
followed by ``+R`` for a direct sum with a line; a sign-dependent expectation
is an object ``{neg, pos, threshold}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import lie
from .cohomology import betti_numbers
from .lie import LieAlgebra

DEFAULT_DIR = Path(__file__).resolve().parent / "data"

# generic sample point for fingerprints of parametric algebras
SAMPLE = Fraction(101, 7)


class CatalogError(ValueError):
    pass


@dataclass
class FamilyRecord:
    name: str
    file: str
    algebra: LieAlgebra
    role: str = "family"
    expected_betti: Optional[tuple] = None
    expected_lcs: Optional[tuple] = None
    expected_carnot: object = None
    excluded: tuple = ()

    @property
    def is_family(self) -> bool:
        return self.role == "family"


@dataclass
class Catalog:
    directory: Path
    records: list

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def names(self) -> list:
        return [r.name for r in self.records]

    def families(self) -> list:
        return [r for r in self.records if r.is_family]

    def get(self, name: str) -> FamilyRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise CatalogError(f"unknown algebra {name!r}; known: {', '.join(self.names())}")

    def resolve(self, name: str) -> LieAlgebra:
        """Algebra for a Carnot expectation such as ``2457A`` or ``N625+R``."""
        if name.endswith("+R"):
            base = self.resolve(name[:-2])
            line = lie.abelian(1, base.field)
            return lie.direct_sum(base, line, name)
        return self.get(name).algebra


def load_catalog(directory=None) -> Catalog:
    d = Path(directory) if directory is not None else DEFAULT_DIR
    manifest = d / "manifest.json"
    if not d.is_dir() or not manifest.is_file():
        raise CatalogError(f"catalog missing: no manifest.json in {d}")
    try:
        entries = json.loads(manifest.read_text())
    except json.JSONDecodeError as exc:
        raise CatalogError(f"manifest {manifest} is not valid JSON: {exc}") from None
    records = []
    for e in entries:
        name = e.get("name", "?")
        path = d / e["file"]
        try:
            A = lie.load(path)
        except OSError as exc:
            raise CatalogError(f"{name}: cannot read {path}: {exc}") from None
        except lie.LieError as exc:
            raise CatalogError(f"{name}: {exc}") from None
        excluded = tuple(Fraction(x) for x in e.get("excluded", []))
        if set(excluded) != set(A.excluded):
            raise CatalogError(f"{name}: manifest excludes {sorted(map(str, excluded))} "
                               f"but the definition file excludes {sorted(map(str, A.excluded))}")
        records.append(FamilyRecord(
            name=name, file=e["file"], algebra=A.with_name(name), role=e.get("role", "family"),
            expected_betti=tuple(e["expected_betti"]) if e.get("expected_betti") else None,
            expected_lcs=tuple(e["expected_lcs"]) if e.get("expected_lcs") else None,
            expected_carnot=e.get("expected_carnot"), excluded=excluded))
    return Catalog(d, records)


# -- Carnot comparison ------------------------------------------------------------

def _at_generic(A: LieAlgebra, value=SAMPLE) -> LieAlgebra:
    if not A.field.parametric:
        return A
    v = Fraction(value)
    while v in A.excluded:
        v += 1
    return lie.specialize(A, v)


def fingerprint(A: LieAlgebra) -> dict:
    """Isomorphism invariants of a rational nilpotent algebra and its Carnot algebra."""
    A = _at_generic(A)
    C = lie.carnot(A)
    return {
        "lcs": lie.lcs(A).dims,
        "ucs": lie.ucs(C).dims,
        "carnot_betti": betti_numbers(C),
        "forms": lie.form_signature(A),
    }


def _lift_to(A: LieAlgebra, field) -> LieAlgebra:
    if A.field is field:
        return A
    br = {k: tuple(field.lift(x) for x in v) for k, v in A.brackets.items()}
    return lie.LieAlgebra(A.name, A.dim, field, br, A.grading)


def compare_carnot(A: LieAlgebra, target: LieAlgebra) -> dict:
    """Compare Car(A) with Car(target): literal structure constants, else fingerprints."""
    C = lie.carnot(A)
    T = _lift_to(lie.carnot(target), C.field)
    if lie.same_structure(C, T):
        return {"match": True, "method": "literal"}
    fa, fb = fingerprint(A), fingerprint(target)
    return {"match": fa == fb, "method": "fingerprint", "computed": fa, "expected": fb}


def sign_samples(threshold: Fraction, excluded=()) -> tuple:
    neg = min(Fraction(-1), threshold - 1)
    pos = max(Fraction(2), threshold + 1)
    while neg in excluded:
        neg -= 1
    while pos in excluded:
        pos += 1
    return neg, pos


@dataclass
class FamilyReport:
    name: str
    checks: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def failures(self) -> list:
        return [k for k, c in self.checks.items() if not c["ok"]]


def validate_record(cat: Catalog, rec: FamilyRecord) -> FamilyReport:
    rep = FamilyReport(rec.name)
    A = rec.algebra
    rep.checks["jacobi"] = {"ok": True}   # enforced by parsing
    if rec.expected_betti is not None:
        b = betti_numbers(A)
        rep.checks["betti"] = {"ok": b == rec.expected_betti, "computed": list(b),
                               "expected": list(rec.expected_betti)}
    if rec.expected_lcs is not None:
        flag = lie.lcs(A)
        rep.checks["lcs"] = {"ok": flag.nilpotent and flag.dims == rec.expected_lcs,
                             "computed": list(flag.dims), "expected": list(rec.expected_lcs)}
    exp = rec.expected_carnot
    if isinstance(exp, str):
        res = compare_carnot(A, cat.resolve(exp))
        rep.checks["carnot"] = {"ok": res["match"], "method": res["method"], "expected": exp}
    elif isinstance(exp, dict):
        thr = Fraction(exp["threshold"])
        neg, pos = sign_samples(thr, rec.excluded)
        An, Ap = lie.specialize(A, neg), lie.specialize(A, pos)
        rn = compare_carnot(An, cat.resolve(exp["neg"]))
        rp = compare_carnot(Ap, cat.resolve(exp["pos"]))
        distinct = fingerprint(An) != fingerprint(Ap)
        rep.checks["carnot"] = {
            "ok": rn["match"] and rp["match"] and distinct,
            "neg": {"at": str(neg), "expected": exp["neg"], "ok": rn["match"], "method": rn["method"]},
            "pos": {"at": str(pos), "expected": exp["pos"], "ok": rp["match"], "method": rp["method"]},
            "distinct": distinct,
        }
    return rep


def validate_catalog(cat: Catalog, names=None) -> list:
    recs = [r for r in cat.records if names is None or r.name in names]
    return [validate_record(cat, r) for r in recs]


def report_json(reports: list) -> dict:
    return {"ok": all(r.ok for r in reports),
            "families": {r.name: {"ok": r.ok, **r.checks} for r in reports}}
