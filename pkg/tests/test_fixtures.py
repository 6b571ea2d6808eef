import json
from fractions import Fraction

import pytest

from src.fixtures import FIXTURES, emit_fixture, fixture_names, fixture_path, fixture_spec, write_fixtures
from src.funcspec import FunctionSpec, Verdict
from src.pipeline import analyze_phase
from src.utils.error_handling import ValidationError


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_files_match_definitions(name):
    data = json.loads(fixture_path(name).read_text(encoding="utf-8"))
    assert FunctionSpec.from_dict(data) == fixture_spec(name)


@pytest.mark.parametrize("name", [name for name, fixture in FIXTURES.items() if fixture.d is not None])
def test_fixture_distance_and_multiplicity(name):
    fixture = FIXTURES[name]
    analysis = analyze_phase(fixture_spec(name), with_fan=False, with_nondegeneracy=False)
    assert str(analysis.d) == fixture.d
    assert analysis.m == fixture.m


def test_emit_is_stable():
    assert emit_fixture("ex2_5_k3") == emit_fixture("ex2_5_k3")
    assert json.loads(emit_fixture("ex2_5_k3"))["n"] == 2


def test_unknown_fixture():
    with pytest.raises(ValidationError):
        fixture_spec("ex99")


def test_write_fixtures(tmp_path):
    written = write_fixtures(str(tmp_path))
    assert set(written) == set(FIXTURES)
    for name, path in written.items():
        with open(path, encoding="utf-8") as handle:
            assert handle.read() == emit_fixture(name)


def test_hull_certified_fixture_keeps_taylor_geometry():
    analysis = analyze_phase(fixture_spec("ex2_5_k1"), with_nondegeneracy=False)
    assert analysis.membership.verdict is Verdict.EHATP
    assert analysis.polyhedron.vertices == ((1, 1),)
    assert analysis.newton_polyhedron.vertices == ((2, 2),)
    assert not analysis.tau_on_certifying
    assert (analysis.d, analysis.m) == (2, 2)
    assert analysis.q_star == (2, 2)
    assert analysis.tau.vertices == ((2, 2),)
    # l'éventail reste celui du polyèdre certifiant
    assert analysis.beta_tilde == Fraction(-1)
