import numpy as np
import pytest

from fatsub.submersion import make_triple

# (g, h, k) triples with a matrix model, dim g <= 21
CATALOG_TRIPLES = [
    ("so3", "so2", "e"),
    ("su2", "u1", "e"),
    ("so4", "so3", "e"),
    ("so4", "so3", "so2"),
    ("so5", "so4", "so3"),
    ("so5", "so4", "e"),
    ("su3", "s(u2xu1)", "e"),
    ("su3", "s(u2xu1)", "su2"),
    ("su3", "so3", "e"),
    ("su3", "su2", "e"),
    ("sp2", "sp1xsp1", "sp1u"),
    ("sp2", "sp1xsp1", "sp1"),
    ("sp2", "sp1xsp1", "e"),
    ("so6", "so5", "so4"),
    ("su4", "s(u3xu1)", "su3"),
    ("su4", "sp2", "e"),
    ("sp3", "sp2xsp1", "sp2"),
    ("so7", "so6", "so5"),
]

FAT_TRIPLES = [
    ("so3", "so2", "e"),
    ("su2", "u1", "e"),
    ("su3", "s(u2xu1)", "su2"),
    ("sp2", "sp1xsp1", "sp1u"),
    ("sp2", "sp1xsp1", "sp1"),
    ("su4", "s(u3xu1)", "su3"),
    ("sp3", "sp2xsp1", "sp2"),
]

_cache = {}


def triple(g, h, k="e"):
    key = (g, h, k)
    if key not in _cache:
        _cache[key] = make_triple(g, h, k)
    return _cache[key]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sp2():
    """The quaternionic Hopf triple, fat with margin 1."""
    return triple("sp2", "sp1xsp1", "sp1u")


@pytest.fixture(scope="session")
def so4_odd():
    return triple("so4", "so3", "e")


@pytest.fixture(scope="session")
def product():
    return triple("su2+su2", "#1", "e")


@pytest.fixture(scope="session")
def abelian():
    return triple("u(1)+u(1)+u(1)", "#1", "e")


@pytest.fixture(scope="session")
def non_fat():
    """Complex Hopf-type triple with k trivial; A* has a kernel for every X."""
    return triple("su3", "s(u2xu1)", "e")


def unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_spd(rng, n, lo=0.05, hi=20.0):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return (Q * rng.uniform(lo, hi, size=n)) @ Q.T


# acceptance criteria register their verdict lines here; printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
