import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sepkit.graph import Graph, dumbbell, path_graph, random_connected_graph

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@st.composite
def connected_graphs(draw, min_n=2, max_n=7, max_extra=6):
    """Random spanning tree plus a few extra edges, vertices v0.. ."""
    n = draw(st.integers(min_n, max_n))
    names = [f"v{i}" for i in range(n)]
    pairs = set()
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        pairs.add((names[j], names[i]))
    others = [(names[a], names[b]) for a in range(n) for b in range(a + 1, n)
              if (names[a], names[b]) not in pairs]
    if others:
        extra = draw(st.lists(st.sampled_from(others), max_size=max_extra, unique=True))
        pairs.update(extra)
    return Graph.from_pairs(names, sorted(pairs))


@st.composite
def graph_and_two_seps(draw, **kw):
    G = draw(connected_graphs(**kw))
    X = draw(st.integers(0, G.full))
    Y = draw(st.integers(0, G.full))
    return G, X, Y


@pytest.fixture
def pabcd():
    return path_graph("abcd")


@pytest.fixture
def db():
    return dumbbell()


def random_graphs(count, seed, n_range=(4, 8), max_m=16):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(*n_range)
        m = rng.randint(n - 1, min(max_m, n * (n - 1) // 2))
        out.append(random_connected_graph(n, m, rng))
    return out


# -- acceptance summary ---------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.skipped and not rep.failed):
        return
    n, title = mark.args
    ok = rep.passed and not hasattr(rep, "wasxfail")
    prev = _CRITERIA.get(n, (title, True, False))
    _CRITERIA[n] = (title, prev[1] and ok, prev[2] or hasattr(rep, "wasxfail"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, expected = _CRITERIA[n]
        tag = "PASS" if ok else ("FAIL (expected, strict xfail)" if expected else "FAIL")
        terminalreporter.write_line(f"criterion {n:>2}: {tag:<30} {title}")
