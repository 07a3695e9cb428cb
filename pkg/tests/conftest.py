import random
from functools import lru_cache

from hypothesis import strategies as st

from operadic.model import random_complex
from operadic.operads import builtin_operad


@lru_cache(maxsize=None)
def operad(name, arity=4):
    return builtin_operad(name, arity)


@st.composite
def complexes(draw, max_degree=3, max_dim=2, min_total=0):
    top = draw(st.integers(1, max_degree))
    dims = {n: draw(st.integers(0, max_dim)) for n in range(1, top + 1)}
    if sum(dims.values()) < min_total:
        dims[1] += min_total
    seed = draw(st.integers(0, 10 ** 6))
    return random_complex(dims, random.Random(seed), top)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
