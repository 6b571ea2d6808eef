from itertools import combinations

import numpy as np
import pytest
import sympy

from src.fan import Cone, annotate_cones, gamma_of, normal_fan, unimodular_subdivision
from src.fixtures import fixture_spec
from src.funcspec import flatm, gamma_part, parse_expression, parse_function
from src.geometry import ValidPair, build_polyhedron, enumerate_faces
from src.toric import (
    FaceStatus,
    MonomialMap,
    build_chart,
    chart_identity_check,
    commutation_check,
    compactness_equivalence_check,
    count_real_roots,
    euler_identity_check,
    gamma_part_pullback_check,
    jacobian,
    jacobian_check,
    monomial_map,
    nondegeneracy_check,
    quasihomogeneity_check,
    sign_variations,
)
from src.utils.error_handling import DomainError


def charts_of(f):
    P = build_polyhedron(f.exponents)
    faces = enumerate_faces(P)
    sigma = unimodular_subdivision(normal_fan(P, faces), P, faces)
    annotations = annotate_cones(sigma, P, faces)
    return P, [build_chart(f, a.cone, P) for a in annotations]


def test_monomial_map():
    mapping = MonomialMap.from_cone(Cone.from_rays([(0, 1), (1, 1)]))
    assert monomial_map(Cone.from_rays([(1, 1), (0, 1)])) == mapping
    assert mapping.matrix == ((0, 1), (1, 1))
    assert mapping.determinant == -1
    assert mapping.display() == "(y2, y1*y2)"
    y = np.array([[0.5, 2.0], [1.5, 0.25]])
    np.testing.assert_allclose(mapping.forward(y), [[2.0, 1.0], [0.25, 0.375]])
    np.testing.assert_allclose(mapping.inverse(mapping.forward(y)), y, rtol=1e-12)
    with pytest.raises(DomainError):
        mapping.inverse(np.array([[0.0, 1.0]]))


def test_monomial_map_needs_unimodular_cone():
    with pytest.raises(DomainError):
        MonomialMap.from_cone(Cone.from_rays([(1, 0), (1, 2)]))
    with pytest.raises(DomainError):
        MonomialMap.from_cone(Cone.from_rays([(1, 1)]))


def test_jacobian():
    cone = Cone.from_rays([(1, 0), (1, 1)])
    exponents, sign = jacobian(cone)
    assert exponents == (0, 1)
    assert sign == 1
    assert jacobian_check(cone, seed=1) < 1e-6


def test_chart_of_circle():
    f = parse_function("x1^2 + x2^2", 2)
    P = build_polyhedron(f.exponents)
    chart = build_chart(f, Cone.from_rays([(0, 1), (1, 1)]), P)
    y1, y2 = chart.symbols
    assert chart.l_vector == (0, 2)
    assert chart.vertex == (2, 0)
    assert chart.f_sigma_at_0 == 1
    assert sympy.expand(chart.expression - (1 + y1 ** 2)) == 0
    assert chart_identity_check(f, chart, seed=3) < 1e-10


def displayed_f_sigma(chart):
    """f_σ relu depuis son affichage (variables y renommées en x)."""
    return parse_expression(chart.display().replace("y", "x"), chart.n)


def test_chart_of_noncompact_principal_face():
    f = fixture_spec("ex11_1")
    P = build_polyhedron(f.exponents)
    chart = build_chart(f, Cone.from_rays([(1, 0), (1, 1)]), P)
    y1, y2 = chart.symbols
    x1, x2 = f.symbols
    assert chart.l_vector == (6, 8)
    assert chart.map.display() == "(y1*y2, y2)"
    assert chart.f_sigma_at_0 == 1
    assert sympy.expand(chart.expression - (y1 ** 2 + y1 + 1 + flatm(y2, 1, 0))) == 0
    assert sympy.expand(displayed_f_sigma(chart) - (x1 ** 2 + x1 + 1 + flatm(x2, 1, 0))) == 0


def test_charts_of_logarithmic_fixture():
    f = fixture_spec("ex11_3")
    P = build_polyhedron(f.exponents)
    x1, x2, x3 = f.symbols
    # squelettes triés : le rayon (0, 0, 1) vient en premier, x3 = y1
    for rays in ([(2, 1, 0), (1, 1, 0), (0, 0, 1)], [(1, 2, 0), (1, 1, 0), (0, 0, 1)]):
        chart = build_chart(f, Cone.from_rays(rays), P)
        y1, y2, y3 = chart.symbols
        assert chart.l_vector == (0, 4, 6)
        assert chart.f_sigma_at_0 == 1
        assert sympy.expand(chart.expression - (y2 ** 2 * y3 ** 6 + y2 ** 2 + 1 + flatm(y1, 1, 0))) == 0
        assert sympy.expand(displayed_f_sigma(chart) - (x2 ** 2 * x3 ** 6 + x2 ** 2 + 1 + flatm(x1, 1, 0))) == 0
        assert chart_identity_check(f, chart, seed=5) < 1e-10
    chart = build_chart(f, Cone.from_rays([(2, 1, 0), (1, 1, 0), (0, 0, 1)]), P)
    assert chart.map.display() == "(y2*y3^2, y2*y3, y1)"


@pytest.mark.parametrize("text", [
    "x1^3 + x2^2",
    "x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))",
    "x1^2*x2^2*(1 + x1*flatm(2,1,2))",
    "x1^4 - x1^2*x2 + 2*x2^3",
])
def test_chart_identities(text):
    f = parse_function(text, 2)
    P, charts = charts_of(f)
    for chart in charts:
        assert chart_identity_check(f, chart, seed=7, y_max=2.0) < 1e-10
        assert compactness_equivalence_check(chart.cone, P, seed=7)
        assert commutation_check(chart.cone, P, seed=7)
        assert sympy.N(chart.f_sigma_at_0) != 0
        for size in range(3):
            for indices in combinations(range(2), size):
                face = gamma_of(indices, chart.cone, P)
                assert gamma_part_pullback_check(f, face, chart, indices, P, seed=7) < 1e-10


def test_chart_identity_in_dimension_three():
    f = parse_function("x1^6 + x1^2*x2^2*(1 + flat(3,1)) + x2^6", 3)
    P, charts = charts_of(f)
    for chart in charts:
        assert chart_identity_check(f, chart, seed=11) < 1e-10


def test_pullback_check_rejects_wrong_face():
    f = parse_function("x1^2 + x2^2", 2)
    P, charts = charts_of(f)
    chart = charts[0]
    whole = gamma_of([], chart.cone, P)
    with pytest.raises(DomainError):
        gamma_part_pullback_check(f, whole, chart, [0, 1], P)


def test_euler_and_quasihomogeneity():
    f = parse_function("x1^3 + 2*x1*x2^3 + x2^2*flat(1,1)", 2)
    P = build_polyhedron(f.exponents)
    for face in enumerate_faces(P):
        f_gamma = gamma_part(f, face, P)
        if face.dim != 1:
            continue
        pair = face.defining_pair
        assert euler_identity_check(f_gamma, pair, seed=5) < 1e-8
        assert quasihomogeneity_check(f_gamma, pair, seed=5) < 1e-12


def test_euler_detects_wrong_weight():
    f_gamma = parse_function("x1^2 + x2^2", 2)
    assert euler_identity_check(f_gamma, ValidPair((1, 2), 2), seed=5) > 1e-3


def test_sturm_helpers():
    x = sympy.Symbol("x")
    assert sign_variations([1, -1, 0, 2]) == 2
    assert count_real_roots(sympy.Poly(x ** 2 - 2, x)) == 2
    assert count_real_roots(sympy.Poly(x ** 2 + 1, x)) == 0
    assert count_real_roots(sympy.Poly((x - 1) ** 3, x)) == 1


def test_nondegeneracy_planar():
    f = parse_function("x1^2 + x2^2", 2)
    P = build_polyhedron(f.exponents)
    report = nondegeneracy_check(f, P)
    assert report.verdict is FaceStatus.VERIFIED
    assert len(report.faces) == 3

    f = parse_function("x1^2 - 2*x1*x2 + x2^2", 2)
    report = nondegeneracy_check(f, build_polyhedron(f.exponents))
    assert report.verdict is FaceStatus.REFUTED
    refuted = [v for v in report.faces if v.status is FaceStatus.REFUTED]
    assert refuted[0].face.dim == 1


def test_nondegeneracy_of_monomial():
    f = parse_function("x1^2*x2^2", 2)
    report = nondegeneracy_check(f, build_polyhedron(f.exponents))
    assert report.verdict is FaceStatus.VERIFIED
    assert report.faces[0].method == "vertex"


def test_nondegeneracy_of_nonzero_constant_vertex():
    # sommet à l'origine : f_γ = 2 ne s'annule nulle part
    f = parse_function("2 + x1^2 + x2^2", 2)
    P = build_polyhedron(f.exponents)
    assert P.is_orthant()
    report = nondegeneracy_check(f, P)
    assert report.verdict is FaceStatus.VERIFIED
    assert [(v.face.vertices, v.method, v.witness) for v in report.faces] == [(((0, 0),), "vertex", None)]


def test_nondegeneracy_in_dimension_three():
    f = parse_function("x1^2 + x2^2 + x3^2", 3)
    report = nondegeneracy_check(f, build_polyhedron(f.exponents), budget=2000)
    assert report.verdict is not FaceStatus.REFUTED
    assert "verdict" in report.to_dict()
