import numpy as np
import pytest

from gameinteract import expression as ex
from gameinteract.game import ExpressionModel, TableGame


def expr_game(tree, n):
    return ExpressionModel(tree, n)


def product_pairs():
    """x0*x1 + x2*x3."""
    return expr_game(ex.add(ex.mul(ex.var(0), ex.var(1)), ex.mul(ex.var(2), ex.var(3))), 4)


def additive(n):
    return expr_game(ex.add(*[ex.var(i) for i in range(n)]), n)


def random_table(n, rng):
    return TableGame(rng.standard_normal(1 << n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
