import numpy as np
import pytest
import sympy

from src.fixtures import FIXTURES, fixture_spec
from src.funcspec import (
    FunctionSpec,
    Verdict,
    check_membership,
    differentiate,
    evaluate,
    flatm,
    flatm_numeric,
    gamma_part,
    parse_expression,
    parse_function,
    taylor_support,
    variables,
)
from src.geometry import build_polyhedron, supporting_face
from src.utils.error_handling import DomainError, ParseError, ValidationError


def test_parse_splits_monomials():
    f = parse_function("x1^2*x2 + 3*x1*x2^2 - x1*x2^2", 2)
    assert f.exponents == ((1, 2), (2, 1))
    assert f.factor((1, 2)) == 2
    assert f.factor((2, 1)) == 1
    assert f.factor((0, 0)) == 0


def test_parse_keeps_smooth_factor():
    f = parse_function("x1^2*(1 + x2 + flat(2,1))", 2)
    x1, x2 = variables(2)
    assert f.exponents == ((2, 0),)
    assert sympy.simplify(f.factor((2, 0)) - (1 + x2 + flatm(x2, 1, 0))) == 0


def test_parse_rationals_and_exp():
    x1, = variables(1)
    assert parse_expression("1/2*x1", 1) == sympy.Rational(1, 2) * x1
    assert parse_expression("exp(x1)", 1) == sympy.exp(x1)


@pytest.mark.parametrize("text, line, column", [
    ("x1^^2", 1, 4),
    ("x1 + ", 1, 6),
    ("x1 $ x2", 1, 4),
    ("x1 +\n (x2", 2, 5),
    ("flat(1,0)", 1, 8),
    ("1/0", 1, 3),
])
def test_parse_errors_report_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_function(text, 2)
    assert info.value.line == line
    assert info.value.column == column


def test_variable_out_of_range():
    with pytest.raises(ValidationError):
        parse_function("x3", 2)
    with pytest.raises(ValidationError):
        parse_function("flat(3,1)", 2)


def test_negative_power_refused():
    with pytest.raises(ParseError):
        parse_function("x1^-1", 1)


def test_flatm_numeric():
    assert flatm_numeric(0.0, 1, 0) == 0.0
    np.testing.assert_allclose(flatm_numeric(1.0, 1, 0), np.exp(-1.0))
    np.testing.assert_allclose(flatm_numeric(-0.5, 1, 1), -np.exp(-4.0) / 0.5)
    # dépassement inférieur ramené à 0, sans avertissement
    assert flatm_numeric(1e-3, 2, 5) == 0.0


def test_flatm_symbolic_rules():
    x, = variables(1)
    assert flatm(sympy.S.Zero, 1, 0) == 0
    assert flatm(-x, 1, 1) == -flatm(x, 1, 1)
    assert flatm(-x, 1, 2) == flatm(x, 1, 2)
    assert sympy.diff(flatm(x, 1, 0), x) == 2 * flatm(x, 1, 3)


def test_round_trip_of_fixtures():
    for name, fixture in FIXTURES.items():
        f = fixture_spec(name)
        text = f.to_text()
        assert parse_function(text, f.n) == f, name
        assert parse_function(text, f.n).to_text() == text


def test_json_round_trip():
    f = parse_function("x1^2*x2^2*(1 + flatm(2,1,2)) - 1/3*x1^5", 2)
    assert FunctionSpec.from_dict(f.to_dict()) == f
    assert f.to_json().endswith("\n")


def test_from_dict_invalid():
    with pytest.raises(ValidationError):
        FunctionSpec.from_dict({"terms": []})
    with pytest.raises(ValidationError):
        FunctionSpec.from_dict({"n": 2, "terms": [{"factor": "1"}]})
    with pytest.raises(ValidationError):
        FunctionSpec.from_terms(2, [((1, -1), 1)])


def test_taylor_support():
    assert taylor_support(parse_function("x1^2 + flat(2,1)", 2)) == [(2, 0)]
    assert taylor_support(parse_function("x1*(x2 - x2)", 2)) == []
    assert taylor_support(parse_function("x1^2*exp(x2)", 2)) == [(2, 0)]
    assert taylor_support(parse_function("x1*(1 + x2)", 2)) == [(1, 0), (1, 1)]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_membership_verdicts(name):
    report = check_membership(fixture_spec(name))
    assert report.verdict.value == FIXTURES[name].verdict


def test_membership_witnesses():
    report = check_membership(parse_function("x1^2 + flat(2,1)", 2))
    assert report.verdict is Verdict.REJECTED
    assert report.witness["vanishing_vertex"] == [0, 0]
    assert report.witness["origin_in_polyhedron"] is True
    assert not report.certified

    report = check_membership(parse_function("0", 2))
    assert report.verdict is Verdict.REJECTED
    assert report.witness["kind"] == "empty"


def test_membership_declared_polyhedron():
    f = FunctionSpec.from_terms(2, [((2, 2), 1), ((1, 1), flatm(variables(2)[1], 1, 1))],
                                declared=[(1, 1)])
    report = check_membership(f)
    assert report.verdict is Verdict.EHATP
    assert report.witness["polyhedron_source"] == "declared"


def test_tilde_class():
    assert check_membership(parse_function("x1^2*(2 + x1) + x2^2", 2)).tilde_class
    assert not check_membership(parse_function("x1^2*(x2 + x1) + x2^2", 2)).tilde_class


def test_gamma_part():
    f = parse_function("x1^2*(1 + x2) + x1*x2 + x2^2", 2)
    P = build_polyhedron(f.exponents)
    face = supporting_face((0, 1), P)
    part = gamma_part(f, face, P)
    assert part.exponents == ((2, 0),)
    assert part.factor((2, 0)) == 1

    other = build_polyhedron([(4, 4)])
    with pytest.raises(DomainError):
        gamma_part(f, supporting_face((1, 1), other), P)


def test_evaluate_and_reflect():
    f = parse_function("x1^3 + x1*x2^2*flat(2,1) + 2*x2", 2)
    x = (0.3, -0.8)
    expected = 0.3 ** 3 + 0.3 * 0.64 * np.exp(-1 / 0.64) - 1.6
    assert evaluate(f, x) == pytest.approx(expected, rel=1e-12)
    g = f.reflect((-1, 1))
    assert evaluate(g, x) == pytest.approx(evaluate(f, (-0.3, -0.8)), rel=1e-12)
    with pytest.raises(DomainError):
        evaluate(f, (np.inf, 0.0))
    with pytest.raises(DomainError):
        evaluate(f, (1.0,))
    with pytest.raises(ValidationError):
        f.reflect((1, 2))


def test_rescale():
    f = parse_function("x1^2*x2 + flat(1,1)", 2)
    g = f.rescale((2.0, 0.5))
    assert evaluate(g, (0.4, 0.6)) == pytest.approx(evaluate(f, (0.8, 0.3)), rel=1e-10)


def test_differentiate():
    f = parse_function("x1^3*x2", 2)
    df = differentiate(f, 1)
    assert df.exponents == ((2, 1),)
    assert df.factor((2, 1)) == 3

    g = parse_function("x1*flat(2,1)", 2)
    dg = differentiate(g, 2)
    x = (0.5, 0.7)
    expected = 0.5 * 2 / 0.7 ** 3 * np.exp(-1 / 0.49)
    assert evaluate(dg, x) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(ValidationError):
        differentiate(g, 3)
