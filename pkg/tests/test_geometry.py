from fractions import Fraction

import pytest

from src.geometry import (
    ValidPair,
    build_polyhedron,
    enumerate_faces,
    face_meet,
    l_value,
    newton_distance,
    primitive,
    principal_face_and_multiplicity,
    smallest_face_containing,
    supporting_face,
)
from src.utils.error_handling import DomainError


def test_primitive():
    assert primitive((2, 4, 6)) == (1, 2, 3)
    assert primitive((0, 3)) == (0, 1)
    with pytest.raises(DomainError):
        primitive((0, 0))


def test_build_polyhedron_drops_dominated_points():
    P = build_polyhedron([(2, 0), (0, 2), (1, 1), (3, 3)])
    assert P.vertices == ((0, 2), (2, 0))
    assert ValidPair((1, 1), 2) in P.facets
    assert P.contains((1, 1))
    assert not P.contains((1, 0))
    assert P.contains((Fraction(1, 2), Fraction(3, 2)))


def test_build_polyhedron_single_vertex():
    P = build_polyhedron([(2, 2)])
    assert P.vertices == ((2, 2),)
    assert set(P.facets) == {ValidPair((0, 1), 2), ValidPair((1, 0), 2)}


def test_build_polyhedron_rejects_bad_points():
    with pytest.raises(DomainError):
        build_polyhedron([(1, -1)])
    with pytest.raises(DomainError):
        build_polyhedron([(1, 2), (1, 2, 3)])
    with pytest.raises(DomainError):
        build_polyhedron([(0.5, 1)])
    with pytest.raises(DomainError):
        build_polyhedron([])


def test_empty_polyhedron():
    P = build_polyhedron([], 2)
    assert not P.nonempty
    assert not P.contains((5, 5))
    with pytest.raises(DomainError):
        newton_distance(P)
    with pytest.raises(DomainError):
        enumerate_faces(P)


def test_orthant():
    P = build_polyhedron([(0, 0), (1, 3)])
    assert P.is_orthant()
    d, q_star = newton_distance(P)
    assert d == 0
    assert q_star == (0, 0)


def test_faces_of_circle():
    P = build_polyhedron([(2, 0), (0, 2)])
    faces = enumerate_faces(P)
    assert [face.dim for face in faces] == [0, 0, 1, 1, 1, 2]
    compact = [face for face in faces if face.compact]
    assert len(compact) == 3
    edge = next(face for face in faces if face.dim == 1 and face.compact)
    assert edge.defining_pair == ValidPair((1, 1), 2)
    assert edge.lattice_points == ((0, 2), (1, 1), (2, 0))
    # dualité des ensembles V et W
    for face in faces:
        assert face.V_set | face.W_set == frozenset(range(2))
        assert not face.V_set & face.W_set


def test_face_meet_and_subface():
    P = build_polyhedron([(2, 0), (0, 2)])
    faces = enumerate_faces(P)
    edge = next(face for face in faces if face.dim == 1 and face.compact)
    ray = next(face for face in faces if face.dim == 1 and face.V_set == frozenset({1}))
    vertex = face_meet(edge, ray, P)
    assert vertex.vertices == ((0, 2),)
    assert vertex.dim == 0
    assert vertex.is_subface_of(edge)
    assert vertex.is_subface_of(ray)
    assert not edge.is_subface_of(vertex)


def test_l_value_and_supporting_face():
    P = build_polyhedron([(2, 0), (0, 2)])
    assert l_value((1, 2), P) == 2
    assert l_value((1, 1), P) == 2
    assert l_value((0, 1), P) == 0
    face = supporting_face((0, 1), P)
    assert face.vertices == ((2, 0),)
    assert face.V_set == frozenset({0})
    assert not face.compact
    with pytest.raises(DomainError):
        l_value((-1, 1), P)


def test_newton_distance_and_principal_face():
    P = build_polyhedron([(2, 0), (0, 2)])
    d, q_star = newton_distance(P)
    assert d == 1
    tau, m = principal_face_and_multiplicity(P)
    assert tau.defining_pair == ValidPair((1, 1), 2)
    assert m == 1

    P = build_polyhedron([(2, 2)])
    tau, m = principal_face_and_multiplicity(P)
    assert newton_distance(P)[0] == 2
    assert tau.vertices == ((2, 2),) and tau.dim == 0
    assert m == 2


def test_principal_face_not_compact():
    P = build_polyhedron([(8, 0), (7, 1), (6, 2)])
    d, _ = newton_distance(P)
    tau, m = principal_face_and_multiplicity(P)
    assert d == 6
    assert m == 1
    assert not tau.compact
    assert tau.describe() == "{(6,α2); α2≥2}"


def test_rational_newton_distance():
    P = build_polyhedron([(3, 0), (0, 2)])
    d, q_star = newton_distance(P)
    assert d == Fraction(6, 5)
    assert smallest_face_containing(P, q_star).defining_pair == ValidPair((2, 3), 6)


def test_smallest_face_outside():
    P = build_polyhedron([(2, 0), (0, 2)])
    with pytest.raises(DomainError):
        smallest_face_containing(P, (0, 0))
    assert smallest_face_containing(P, (5, 5)).dim == 2


def test_face_to_dict_is_one_based():
    P = build_polyhedron([(8, 0), (6, 2)])
    tau, _ = principal_face_and_multiplicity(P)
    data = tau.to_dict()
    assert data["V"] == [2]
    assert data["W"] == [1]
    assert "lattice_points" not in data
