import json

import numpy as np
import pytest

from conftest import additive, expr_game, random_table
from gameinteract import expression as ex
from gameinteract.exceptions import DegenerateError, DomainError, FormatError
from gameinteract.game import (
    FunctionGame,
    TableGame,
    VectorTableGame,
    contract,
    from_table,
    load_model,
    model_from_json,
    project_vector,
    restrict,
)


def test_eval_product_and_empty():
    g = expr_game(ex.mul(ex.var(0), ex.var(1)), 2)
    assert g.eval([0, 1]) == 1
    assert g.eval([]) == 0


def test_eval_pow_offset():
    g = expr_game(ex.add(ex.pow_(ex.var(0), ex.var(1)), ex.var(2)), 3)
    assert g.offset == 1
    assert g.eval([]) == 0
    assert g.eval([0, 1, 2]) == 1


def test_eval_out_of_range():
    with pytest.raises(DomainError):
        additive(3).eval([3])


def test_from_table_examples(rng):
    assert from_table([0, 5]).eval([0]) == 5
    g = from_table([1, 1, 1, 3])
    assert g.eval([]) == 0 and g.eval([0, 1]) == 2
    vals = rng.standard_normal(8)
    g = from_table(vals)
    assert np.array_equal(g.table(), vals - vals[0])


def test_from_table_rejects_non_power_of_two():
    with pytest.raises(FormatError):
        from_table([1, 2, 3])


def test_project_vector_examples():
    const = VectorTableGame(np.tile([1.0, 2.0, 3.0], (4, 1)))
    assert np.allclose(project_vector(const).table(), 0)
    f = np.zeros((4, 3))
    f[3] = [3.0, 4.0, 0.0]
    assert project_vector(VectorTableGame(f)).eval([0, 1]) == pytest.approx(5.0)
    f = np.array([[1.0, 0, 2], [0, 1, 1], [2, 2, 0], [1, 2, 3]])
    u = f[3] / np.linalg.norm(f[3])
    assert np.allclose(project_vector(VectorTableGame(f)).table(), f @ u - f[0] @ u)


def test_project_vector_zero_norm():
    with pytest.raises(DegenerateError):
        project_vector(VectorTableGame(np.zeros((4, 2))))


def test_project_one_dimensional_matches_scalar(rng):
    vals = rng.random(8) + 0.1
    proj = project_vector(VectorTableGame(vals[:, None]))
    assert np.allclose(proj.table(), TableGame(vals).table())


def test_contract_examples():
    g = expr_game(ex.mul(ex.var(0), ex.var(1)), 2)
    c = contract(g, [0, 1])
    assert c.n == 1 and c.eval([0]) == 1
    g = expr_game(ex.add(ex.mul(ex.var(0), ex.var(1)), ex.var(2)), 3)
    c = contract(g, [0, 1])
    assert c.n == 2
    assert (c.eval([0]), c.eval([1]), c.eval([0, 1])) == (1, 1, 2)


def test_contract_singleton_is_identity(rng):
    g = random_table(5, rng)
    for i in range(5):
        assert np.array_equal(contract(g, [i]).table(), g.table())


def test_contract_places_coalition_at_lowest_index():
    g = from_table(np.arange(16, dtype=float))
    c = contract(g, [1, 3])
    assert c.units == [1, 0b1010, 0b100]


def test_contract_empty_raises():
    with pytest.raises(DomainError):
        contract(additive(2), [])


def test_restrict_examples():
    assert restrict(additive(2), [0]).eval([0]) == 1
    assert restrict(expr_game(ex.mul(ex.var(0), ex.var(1)), 2), [0]).eval([0]) == 0
    with pytest.raises(DomainError):
        restrict(additive(2), [2])


def test_restrict_then_contract():
    g = expr_game(ex.add(ex.var(0), ex.mul(ex.var(1), ex.var(2))), 3)
    nc = contract(restrict(g, [1, 2]), [0, 1])
    assert nc.n == 1 and nc.eval([0]) == 1


def test_additive_expression_is_additive():
    g = additive(6)
    t = g.table()
    for s in range(64):
        assert t[s] == bin(s).count("1")


def test_cached_and_uncached_agree(rng):
    vals = rng.standard_normal(1 << 6)
    a = FunctionGame(lambda m: vals[m], 6, cache=True)
    b = FunctionGame(lambda m: vals[m], 6, cache=False)
    masks = rng.integers(0, 64, size=200)
    assert np.array_equal(a.values(masks), b.values(masks))


def test_model_json_formats(tmp_path):
    tree = ex.add(ex.var(0), ex.mul(ex.var(1), ex.var(2)))
    g = model_from_json(expr_game(tree, 3).to_json())
    assert g.eval([0, 1, 2]) == 2
    assert model_from_json({"type": "table", "n": 1, "values": [0, 5]}).eval([0]) == 5
    with pytest.raises(FormatError):
        model_from_json({"type": "table", "n": 2, "values": [0, 5]})
    with pytest.raises(FormatError):
        model_from_json({"type": "graph"})
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"model": expr_game(tree, 3).to_json()}))
    assert load_model(path).eval([1, 2]) == 1


def test_presence_and_baseline_values():
    tree = ex.mul(ex.var(0), ex.var(1))
    g = model_from_json({"n": 2, "type": "expression", "ast": tree.to_json(),
                         "presence": [2.0, 3.0], "baseline": [1.0, 1.0]})
    assert g.eval([0, 1]) == 6 - 1
    assert g.eval([0]) == 2 - 1
