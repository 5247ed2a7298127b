import pytest

from nilcohom import catalog, cohomology, lie
from nilcohom.scalar import QQ

# criterion number -> (ok, detail), filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def record(number: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")


@pytest.fixture(scope="session")
def cat():
    return catalog.load_catalog()


@pytest.fixture(scope="session")
def models(cat):
    """Lazily computed cohomology models of catalog entries, keyed by name."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = cohomology.cohomology(cat.get(name).algebra)
        return cache[name]
    return get


def small_algebras():
    """Algebras of dimension at most 4 over QQ."""
    h3 = lie.heisenberg(QQ)
    return [
        lie.abelian(1), lie.abelian(2), lie.abelian(3), lie.abelian(4),
        h3,
        lie.direct_sum(h3, lie.abelian(1), "H3+R"),
        lie.parse("name F4\ndim 4\n[1,2] = x3\n[1,3] = x4\n"),
    ]
