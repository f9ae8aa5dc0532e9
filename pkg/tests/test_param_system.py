import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import framesens as fs
from framesens.errors import EvaluationOverflow, SystemFormatError

EX14_TEXT = """
{
  "name": "diag-eps",
  "n": 3, "N": 1,
  "entries": [
    {"row": 0, "col": 0, "monomials": [{"coeff": 1.0, "powers": [1]}]}
  ]
}
"""

EX8_TEXT = """
{
  "name": "two-param",
  "n": 2, "N": 2,
  "entries": [
    {"row": 0, "col": 0, "monomials": [{"coeff": 2.0, "powers": [1, 1]}]},
    {"row": 0, "col": 1, "monomials": [{"coeff": 1.0, "powers": [0, 2]},
                                        {"coeff": -1.0, "powers": [2, 0]}]}
  ]
}
"""


def test_parse_single_monomial_cell():
    system = fs.parse_system(EX14_TEXT)
    assert system.n == 3 and system.N == 1
    entry = system.entries[0][0]
    assert entry.monomials == (fs.Monomial(1.0, (1,)),)
    assert all(system.entries[i][j].is_zero for i in range(3) for j in range(3)
               if (i, j) != (0, 0))


def test_parse_two_parameter_system():
    system = fs.parse_system(EX8_TEXT)
    assert system.N == 2
    total = sum(len(system.entries[i][j].monomials) for i in range(2) for j in range(2))
    # 2*e1*e2 contributes one monomial, e2^2 - e1^2 two more.
    assert total == 3
    np.testing.assert_allclose(
        system.evaluate([1.0, 1.0]).matrix, [[2.0, 0.0], [0.0, 0.0]]
    )


def test_parse_rejects_out_of_grid_cell():
    bad = json.dumps({
        "name": "", "n": 2, "N": 1,
        "entries": [{"row": 0, "col": 2, "monomials": []}],
    })
    with pytest.raises(SystemFormatError, match="outside"):
        fs.parse_system(bad)


def test_parse_rejects_wrong_power_length():
    bad = json.dumps({
        "name": "", "n": 1, "N": 2,
        "entries": [{"row": 0, "col": 0,
                     "monomials": [{"coeff": 1.0, "powers": [1]}]}],
    })
    with pytest.raises(SystemFormatError, match="power vector"):
        fs.parse_system(bad)


def test_parse_syntax_error_reports_position():
    with pytest.raises(SystemFormatError, match=r"line \d+, column \d+"):
        fs.parse_system("{\n  'bad': }")


def test_parse_rejects_duplicate_cell_and_duplicate_powers():
    dup_cell = json.dumps({
        "n": 1, "N": 1,
        "entries": [
            {"row": 0, "col": 0, "monomials": []},
            {"row": 0, "col": 0, "monomials": []},
        ],
    })
    with pytest.raises(SystemFormatError, match="duplicate cell"):
        fs.parse_system(dup_cell)
    dup_powers = json.dumps({
        "n": 1, "N": 1,
        "entries": [{"row": 0, "col": 0,
                     "monomials": [{"coeff": 1.0, "powers": [0]},
                                    {"coeff": 2.0, "powers": [0]}]}],
    })
    with pytest.raises(SystemFormatError, match="duplicate power"):
        fs.parse_system(dup_powers)


def test_parse_rejects_bad_rhs_index():
    bad = json.dumps({
        "n": 2, "N": 1, "entries": [],
        "rhs": [{"index": 5, "monomials": []}],
    })
    with pytest.raises(SystemFormatError, match="index"):
        fs.parse_system(bad)


def test_round_trip_preserves_everything(eps_family_nh):
    text = fs.serialize_system(eps_family_nh)
    again = fs.parse_system(text)
    assert again == eps_family_nh
    assert fs.serialize_system(again) == text


def test_round_trip_exact_awkward_coefficients():
    system = fs.ParametrizedSystem.from_entry_dict(
        2, 2,
        {(0, 1): [(0.1, (0, 1)), (-1.0 / 3.0, (2, 0)), (1e-17, (3, 3))]},
        name="awkward",
    )
    again = fs.parse_system(fs.serialize_system(system))
    assert again.entries[0][1].monomials == system.entries[0][1].monomials


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(-1e6, 1e6, allow_nan=False).filter(lambda c: c != 0.0),
            st.tuples(st.integers(0, 3), st.integers(0, 3)),
        ),
        min_size=0,
        max_size=5,
        unique_by=lambda term: term[1],
    )
)
def test_round_trip_random_entries(terms):
    system = fs.ParametrizedSystem.from_entry_dict(2, 2, {(1, 0): terms})
    assert fs.parse_system(fs.serialize_system(system)) == system


def test_serialization_is_graded_lex_sorted():
    entry = fs.PolyEntry.from_terms(
        [(1.0, (2, 0)), (2.0, (0, 1)), (3.0, (0, 0)), (4.0, (1, 1))], 2
    )
    degrees = [(sum(m.powers), m.powers) for m in entry.monomials]
    assert degrees == sorted(degrees)


def test_evaluate_examples(worked_family):
    ex8 = fs.corpus("ex8").system
    np.testing.assert_allclose(ex8.evaluate([1.0, 1.0]).matrix, [[2, 0], [0, 0]])
    ex14 = fs.corpus("ex14").system
    np.testing.assert_allclose(ex14.evaluate([5.0]).matrix, np.diag([5.0, 0, 0]))
    zero = fs.ParametrizedSystem.from_entry_dict(2, 1, {})
    np.testing.assert_array_equal(zero.evaluate([3.0]).matrix, np.zeros((2, 2)))
    np.testing.assert_allclose(
        worked_family.evaluate([0.25]).matrix, [[0.25, -1.0], [0.5, -2.0]]
    )


def test_partial_derivative_examples():
    ex8 = fs.corpus("ex8").system
    np.testing.assert_allclose(
        ex8.partial_derivative([1.0, 1.0], 1).matrix, [[2.0, -2.0], [0.0, 0.0]]
    )
    ex14 = fs.corpus("ex14").system
    expected = np.zeros((3, 3))
    expected[0, 0] = 1.0
    for eps in (0.0, 1.7, -4.0):
        np.testing.assert_array_equal(ex14.partial_derivative([eps], 1).matrix, expected)
    const = fs.ParametrizedSystem.from_entry_dict(2, 3, {(0, 0): 5.0, (1, 1): -2.0})
    for j in (1, 2, 3):
        np.testing.assert_array_equal(
            const.partial_derivative([0.1, 0.2, 0.3], j).matrix, np.zeros((2, 2))
        )


def test_partial_derivative_matches_finite_differences(worked_family, eps_family_nh):
    h = 1e-5
    cases = [
        (fs.corpus("ex8").system, np.array([0.7, -0.4])),
        (worked_family, np.array([0.3])),
        (eps_family_nh, np.array([1.2])),
    ]
    for system, pt in cases:
        for j in range(1, system.N + 1):
            step = np.zeros(system.N)
            step[j - 1] = h
            fd = (system.evaluate(pt + step).matrix
                  - system.evaluate(pt - step).matrix) / (2 * h)
            exact = system.partial_derivative(pt, j).matrix
            scale = max(np.abs(exact).max(), 1.0)
            assert np.abs(fd - exact).max() <= 1e-6 * scale
            if system.has_rhs:
                fd_rhs = (system.evaluate(pt + step).rhs
                          - system.evaluate(pt - step).rhs) / (2 * h)
                exact_rhs = system.partial_derivative(pt, j).rhs
                assert np.abs(fd_rhs - exact_rhs).max() <= 1e-6


def test_evaluate_is_pure(worked_family):
    a = worked_family.evaluate([0.37]).matrix
    b = worked_family.evaluate([0.37]).matrix
    assert np.array_equal(a, b)
    da = worked_family.partial_derivative([0.37], 1).matrix
    db = worked_family.partial_derivative([0.37], 1).matrix
    assert np.array_equal(da, db)


def test_evaluate_overflow_reports_entry():
    system = fs.ParametrizedSystem.from_entry_dict(
        2, 1, {(1, 0): [(1e300, (2,))]}
    )
    with pytest.raises(EvaluationOverflow) as err:
        system.evaluate([1e10])
    assert err.value.where == (1, 0)


def test_partial_derivative_index_out_of_range(worked_family):
    with pytest.raises(IndexError):
        worked_family.partial_derivative([0.0], 0)
    with pytest.raises(IndexError):
        worked_family.partial_derivative([0.0], 2)


def test_point_validation(worked_family):
    with pytest.raises(ValueError):
        worked_family.evaluate([1.0, 2.0])
    with pytest.raises(ValueError):
        worked_family.evaluate([np.nan])


def test_rhs_round_trip_and_evaluation(eps_family_nh):
    pair = eps_family_nh.evaluate([2.0])
    np.testing.assert_allclose(pair.matrix, [[1, 2], [2, 4]])
    np.testing.assert_allclose(pair.rhs, [1, 2])
    again = fs.parse_system(fs.serialize_system(eps_family_nh))
    assert again.has_rhs
    np.testing.assert_allclose(again.evaluate([2.0]).rhs, [1, 2])


def test_callable_adapter_matches_polynomial(worked_family):
    adapter = fs.CallableSystem(
        2, 1, lambda pt: worked_family.evaluate(pt).matrix, name="wrapped"
    )
    pt = [0.6]
    np.testing.assert_array_equal(
        adapter.evaluate(pt).matrix, worked_family.evaluate(pt).matrix
    )
    fd = adapter.partial_derivative(pt, 1).matrix
    exact = worked_family.partial_derivative(pt, 1).matrix
    assert np.abs(fd - exact).max() <= 1e-6
    assert not adapter.has_rhs


def test_poly_entry_arithmetic_and_validation():
    p = fs.PolyEntry.from_terms([(1.0, (1, 0)), (2.0, (0, 1))], 2)
    q = p.scaled(-2.0).plus(p)
    assert q == p.scaled(-1.0)
    assert fs.PolyEntry.from_terms([(1.0, (1,)), (-1.0, (1,))], 1).is_zero
    with pytest.raises(ValueError):
        fs.PolyEntry(((1.0, (-1,)),), 1)
    with pytest.raises(ValueError):
        fs.PolyEntry((fs.Monomial(1.0, (0,)), fs.Monomial(2.0, (0,))), 1)
