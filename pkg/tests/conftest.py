import sympy
import pytest

from vancycles.cli import reset_caches
from vancycles.problem import Problem


def to_sympy(poly):
    return sympy.sympify(str(poly).replace("^", "**"))


def symbols_of(ring):
    return sympy.symbols(list(ring.names))


@pytest.fixture(autouse=True)
def _fresh_caches():
    reset_caches()
    yield
    reset_caches()


@pytest.fixture
def bundled():
    def load(name):
        return Problem.load(f"bundled:{name}").build()
    return load
