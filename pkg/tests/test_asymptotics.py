from fractions import Fraction

import numpy as np
import pandas as pd
import pytest
from scipy import integrate
from scipy.special import gamma

from src.asymptotics import (
    Amplitude,
    OscSample,
    amplitude_integral,
    bump,
    candidate_poles,
    check_hypotheses,
    decay_table,
    extrapolate_to_pole,
    fit_decay,
    leading_zeta_coefficients,
    log_spaced,
    numeric_osc,
    numeric_zeta,
    octants,
    osc_leading_term,
    oscillation_statement,
    select_cone,
)
from src.cubature import adaptive_cubature
from src.fixtures import fixture_spec
from src.funcspec import Verdict, parse_function
from src.pipeline import analyze_phase
from src.utils.error_handling import DomainError, HypothesisError, ValidationError

# ∫_{−1}^{1} exp(−1/(1−u²)) du
BUMP_MASS = 0.4439938161680794


@pytest.fixture
def quartic():
    return analyze_phase(parse_function("x1^4 + x2^4", 2))


@pytest.fixture
def square_1d():
    return analyze_phase(parse_function("x1^2", 1))


@pytest.fixture
def noncompact_analysis():
    return analyze_phase(fixture_spec("ex11_1"))


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------

def test_bump():
    np.testing.assert_allclose(bump(np.array([0.0, 0.5, 1.0, -2.0])),
                               [np.exp(-1.0), np.exp(-4.0 / 3.0), 0.0, 0.0])


def test_amplitude_from_spec():
    assert Amplitude.from_spec("unit", 2) == Amplitude.unit(2)
    assert Amplitude.from_spec(None, 3).radii == (1.0, 1.0, 1.0)
    amplitude = Amplitude.from_spec('{"radius": [0.5, 2], "scale": 3, "center": [0.1, 0]}', 2)
    assert amplitude.radii == (0.5, 2.0)
    assert amplitude.scale == 3.0
    np.testing.assert_allclose(amplitude.box_radius, [0.6, 2.0])
    assert amplitude.at_origin() == pytest.approx(3 * bump(np.array([-0.2]))[0] * np.exp(-1.0))
    assert amplitude.reflect((-1, 1)).centers == (-0.1, 0.0)


@pytest.mark.parametrize("spec", ["{radius: 1}", '{"radius": [1, 1, 1]}', '{"radius": -1}'])
def test_amplitude_invalid(spec):
    with pytest.raises(ValidationError):
        Amplitude.from_spec(spec, 2)


def test_octants():
    assert len(octants(3)) == 8
    assert octants(1) == [(1,), (-1,)]


def test_amplitude_integral():
    assert amplitude_integral(Amplitude.unit(1), 1e-10).value == pytest.approx(BUMP_MASS, rel=1e-7)
    assert amplitude_integral(Amplitude.unit(2), 1e-9).value == pytest.approx(BUMP_MASS ** 2, rel=1e-6)


# ---------------------------------------------------------------------------
# Pôles candidats
# ---------------------------------------------------------------------------

def test_candidate_poles_of_circle(circle_analysis):
    analysis = circle_analysis
    poles = candidate_poles(analysis.polyhedron, analysis.fan, 2, 3, analysis.annotations)
    assert poles.values() == [Fraction(-1), Fraction(-3, 2), Fraction(-2), Fraction(-3)]
    assert poles.beta_tilde == Fraction(-1)
    leading = poles.entries[0]
    assert leading.from_facets
    assert {s["kind"] for s in leading.sources} == {"facet", "negative-integer"}
    assert all(1 <= e.order_bound <= 2 for e in poles.entries)


def test_candidate_poles_of_monomial(monomial_analysis):
    analysis = monomial_analysis
    poles = candidate_poles(analysis.polyhedron, analysis.fan, 1, 1, analysis.annotations)
    assert poles.entries[0].value == Fraction(-1, 2)
    assert poles.entries[0].order_bound == 2
    assert poles.to_dict()["beta_tilde"] == "-1/2"


def test_candidate_poles_of_cusp(cusp):
    analysis = analyze_phase(cusp, with_nondegeneracy=False)
    poles = candidate_poles(analysis.polyhedron, analysis.fan, 0, 0, analysis.annotations)
    assert poles.entries[0].value == Fraction(-5, 6)
    kinds = {s["kind"] for e in poles.entries for s in e.sources}
    assert kinds == {"facet", "subdivision"}


def test_candidate_poles_of_noncompact_principal_face(noncompact_analysis):
    analysis = noncompact_analysis
    poles = candidate_poles(analysis.polyhedron, analysis.fan, 0, 1, analysis.annotations)
    leading = poles.entries[0]
    assert leading.value == Fraction(-1, 6)
    assert leading.order_bound == 1
    assert leading.from_facets
    assert Fraction(-1, 4) in poles.values()
    assert poles.beta_tilde == Fraction(-1, 6)


def test_candidate_poles_validation(circle_analysis):
    with pytest.raises(ValidationError):
        candidate_poles(circle_analysis.polyhedron, circle_analysis.fan, -1, 0)


# ---------------------------------------------------------------------------
# Hypothèses
# ---------------------------------------------------------------------------

def test_hypotheses_refuse_uncertified_phase(unit2):
    for name in ("ex11_4", "ex2_5_k1"):
        analysis = analyze_phase(fixture_spec(name))
        with pytest.raises(HypothesisError):
            check_hypotheses(analysis, unit2)


def test_hypotheses_refuse_degenerate_phase(unit2):
    f = parse_function("x1^4 - 2*x1^3*x2 + 2*x1^2*x2^2 - 2*x1*x2^3 + x2^4", 2)
    analysis = analyze_phase(f)
    with pytest.raises(HypothesisError) as info:
        check_hypotheses(analysis, unit2)
    assert info.value.exit_code == 3
    assert check_hypotheses(analysis, unit2, assume_nondegenerate=True)["provenance"] == "conditional"


def test_hypotheses_refuse_divergent_coefficient(circle_analysis, unit2):
    with pytest.raises(HypothesisError) as info:
        leading_zeta_coefficients(circle_analysis, unit2)
    assert info.value.reasons["m"] == 1


def test_hypotheses_of_quartic(quartic, unit2):
    result = check_hypotheses(quartic, unit2)
    assert "d>1" in result["satisfied"]
    assert "sign-definite" in result["satisfied"]
    assert result["provenance"] == "numeric"


# ---------------------------------------------------------------------------
# Coefficients dominants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("form", ["chart", "principal", "compact", "derivative"])
def test_leading_coefficient_of_monomial(monomial_analysis, unit2, form):
    data = leading_zeta_coefficients(monomial_analysis, unit2, form=form)
    assert data.m == 2
    assert data.L_sigma == Fraction(1, 4)
    assert data.C_plus == pytest.approx(np.exp(-2.0), rel=1e-12)
    assert data.C_minus == 0.0
    assert data.provenance == "exact"


def test_leading_coefficient_of_quartic(quartic, unit2):
    expected = gamma(0.25) ** 2 / (4 * np.sqrt(np.pi)) * np.exp(-2.0)
    values = {}
    for form in ("chart", "principal", "compact"):
        data = leading_zeta_coefficients(quartic, unit2, form=form, tolerance=1e-8)
        assert data.C_minus == pytest.approx(0.0, abs=1e-10)
        assert data.provenance == "numeric"
        values[form] = data.C_plus
    for value in values.values():
        assert value == pytest.approx(expected, rel=1e-5)


def noncompact_coefficient_integrand(y):
    # φ(0, y)·(1 + e^(−1/y²))^(−1/6)/6, le poids y^(−1/3) est porté par quad
    with np.errstate(divide="ignore", over="ignore"):
        flat = np.exp(-1.0 / np.float64(y) ** 2)
    return float(bump(np.array([0.0]))[0] * bump(np.array([y]))[0] * (1.0 + flat) ** (-1.0 / 6.0) / 6.0)


def test_leading_coefficient_of_noncompact_principal_face(noncompact_analysis, unit2):
    data = leading_zeta_coefficients(noncompact_analysis, unit2)
    assert data.m == 1
    assert len(data.octants) == 4
    reference, _ = integrate.quad(noncompact_coefficient_integrand, 0.0, 1.0, weight="alg", wvar=(-1.0 / 3.0, 0.0))
    for octant in data.octants:
        assert octant.c_minus == pytest.approx(0.0, abs=1e-12)
        assert octant.c_plus == pytest.approx(reference, rel=1e-4)
    assert data.C_minus == pytest.approx(0.0, abs=1e-12)
    assert data.C_plus == pytest.approx(4 * reference, rel=1e-4)
    assert data.C_plus == pytest.approx(0.0949752, rel=1e-4)


def test_leading_coefficient_scales_with_amplitude(quartic):
    small = Amplitude(radii=(1.0, 1.0), scale=2.5)
    data = leading_zeta_coefficients(quartic, small, tolerance=1e-8)
    assert data.C_plus == pytest.approx(2.5 * gamma(0.25) ** 2 / (4 * np.sqrt(np.pi)) * np.exp(-2.0), rel=1e-5)
    zero = leading_zeta_coefficients(quartic, Amplitude(radii=(1.0, 1.0), scale=0.0))
    assert zero.C == 0.0
    assert zero.provenance == "exact"


def test_leading_coefficient_inapplicable_forms(quartic, unit2):
    with pytest.raises(DomainError):
        leading_zeta_coefficients(quartic, unit2, form="derivative")
    with pytest.raises(ValidationError):
        leading_zeta_coefficients(quartic, unit2, form="bogus")


def test_select_cone(quartic, cusp):
    assert select_cone(quartic).in_sigma_star
    assert select_cone(quartic, 2).in_sigma_star
    with pytest.raises(ValidationError):
        select_cone(quartic, 3)
    analysis = analyze_phase(cusp, with_nondegeneracy=False)
    outside = next(i for i, a in enumerate(analysis.annotations, start=1) if not a.in_sigma_star)
    with pytest.raises(ValidationError):
        select_cone(analysis, outside)


def test_oscillatory_leading_term(square_1d):
    data = leading_zeta_coefficients(square_1d, Amplitude.unit(1))
    assert data.C_plus == pytest.approx(np.exp(-1.0), rel=1e-12)
    term = osc_leading_term(data, square_1d.d, square_1d.m)
    assert term.exponent == Fraction(-1, 2)
    assert term.log_power == 0
    expected = np.sqrt(np.pi) * np.exp(1j * np.pi / 4) * np.exp(-1.0)
    assert term.coefficient == pytest.approx(expected, rel=1e-12)


def test_oscillation_statement(circle_analysis, quartic, unit2):
    statement = oscillation_statement(circle_analysis, unit2)
    assert statement["beta"] == "-1"
    assert statement["eta"] == 1
    assert statement["reasons"] == ["sign-definite"]
    assert statement["sharp"]
    statement = oscillation_statement(quartic, unit2)
    assert "d>1" in statement["reasons"]
    assert "principal-part-nonvanishing" in statement["reasons"]


# ---------------------------------------------------------------------------
# Intégrales numériques
# ---------------------------------------------------------------------------

def test_numeric_zeta_at_zero(monomial_analysis, unit2):
    assert numeric_zeta(monomial_analysis, unit2, 0.0, 1e-9).value == pytest.approx(BUMP_MASS ** 2, rel=1e-6)


def test_numeric_zeta_against_direct_cubature(circle_analysis, circle, unit2):
    def integrand(x):
        return np.real(circle.numeric(x)) * unit2.numeric(x)

    direct = adaptive_cubature(integrand, [-1.0, -1.0], [1.0, 1.0], 1e-9)
    value = numeric_zeta(circle_analysis, unit2, 1.0, 1e-7)
    assert value.value == pytest.approx(direct.value, rel=1e-5)


def test_numeric_zeta_domain(monomial_analysis, unit2):
    with pytest.raises(DomainError):
        numeric_zeta(monomial_analysis, unit2, -0.5)
    with pytest.raises(DomainError):
        numeric_zeta(monomial_analysis, unit2, float("nan"))


def test_numeric_osc_against_quad(square_1d):
    amplitude = Amplitude.unit(1)
    t = 20.0
    sample = numeric_osc(square_1d.f, amplitude, t, tolerance=1e-8)
    re, _ = integrate.quad(lambda u: bump(np.array([u]))[0] * np.cos(t * u * u), -1, 1, limit=400)
    im, _ = integrate.quad(lambda u: bump(np.array([u]))[0] * np.sin(t * u * u), -1, 1, limit=400)
    assert sample.value == pytest.approx(re + 1j * im, abs=1e-6)
    assert sample.conjugate_residual < 1e-8


def test_numeric_osc_at_zero_and_domain(square_1d):
    amplitude = Amplitude.unit(1)
    assert numeric_osc(square_1d.f, amplitude, 0.0).value == pytest.approx(BUMP_MASS, abs=1e-5)
    with pytest.raises(DomainError):
        numeric_osc(square_1d.f, amplitude, -1.0)
    with pytest.raises(DomainError):
        numeric_osc(square_1d.f, amplitude, float("inf"))


@pytest.mark.slow
def test_numeric_osc_follows_leading_term(square_1d):
    amplitude = Amplitude.unit(1)
    data = leading_zeta_coefficients(square_1d, amplitude)
    term = osc_leading_term(data, square_1d.d, square_1d.m)
    t = 400.0
    sample = numeric_osc(square_1d.f, amplitude, t, tolerance=1e-9)
    predicted = term.coefficient * t ** -0.5
    assert abs(sample.value - predicted) / abs(predicted) < 1e-2


# ---------------------------------------------------------------------------
# Ajustement
# ---------------------------------------------------------------------------

def test_log_spaced():
    ts = log_spaced(10.0, 1000.0, 3)
    np.testing.assert_allclose(ts, [10.0, 100.0, 1000.0])


def test_fit_decay_recovers_exponents():
    ts = log_spaced(10.0, 1e4, 12)
    samples = [(t, 2.0 * t ** -0.5 * np.log(t) * np.exp(0.3j * t)) for t in ts]
    fit = fit_decay(samples, 2)
    assert fit.eta_hat == 1
    assert fit.beta_hat == pytest.approx(-0.5, abs=1e-9)
    assert len(fit.residuals) == 3


@pytest.mark.parametrize("ts", [
    log_spaced(10.0, 1e4, 5),
    log_spaced(10.0, 100.0, 12),
    log_spaced(0.5, 1e3, 12),
])
def test_fit_decay_refuses_poor_samples(ts):
    with pytest.raises(ValidationError):
        fit_decay([(t, t ** -1.0) for t in ts], 1)


def test_decay_table():
    samples = [OscSample(10.0, 3 + 4j, 1e-9, 0.0, 16), OscSample(20.0, 1j, 1e-9, 0.0, 16)]
    table = decay_table(samples)
    assert isinstance(table, pd.DataFrame)
    assert list(table.columns) == ["t", "re", "im", "abs", "error"]
    assert table["abs"].tolist() == [5.0, 1.0]


@pytest.mark.slow
def test_extrapolation_matches_closed_form(monomial_analysis, unit2):
    result = extrapolate_to_pole(monomial_analysis, unit2, tolerance=1e-7)
    assert result["limit"] == pytest.approx(np.exp(-2.0), rel=5e-2)


@pytest.mark.slow
def test_decay_fit_of_noncompact_principal_face():
    analysis = analyze_phase(fixture_spec("ex11_1"), with_fan=False, with_nondegeneracy=False)
    amplitude = Amplitude.unit(2)
    samples = [numeric_osc(analysis.f, amplitude, t) for t in log_spaced(50.0, 5000.0, 12)]
    fit = fit_decay([(s.t, s.value) for s in samples], 2)
    assert fit.eta_hat == 0
    assert fit.beta_hat == pytest.approx(-1 / 6, abs=0.05)


@pytest.mark.slow
def test_extrapolation_matches_noncompact_coefficient(noncompact_analysis, unit2):
    data = leading_zeta_coefficients(noncompact_analysis, unit2)
    result = extrapolate_to_pole(noncompact_analysis, unit2)
    assert result["limit"] == pytest.approx(data.C, rel=5e-2)


@pytest.mark.slow
def test_decay_fit_detects_logarithmic_factor(monomial, unit2):
    samples = [numeric_osc(monomial, unit2, t) for t in log_spaced(50.0, 5000.0, 12)]
    fit = fit_decay([(s.t, s.value) for s in samples], 2)
    assert fit.eta_hat == 1
    assert fit.beta_hat == pytest.approx(-0.5, abs=0.05)


@pytest.mark.slow
def test_flat_vertex_phase_decays_below_square_root(unit2):
    f = fixture_spec("ex11_4")
    analysis = analyze_phase(f, with_fan=False, with_nondegeneracy=False)
    assert analysis.membership.verdict is Verdict.REJECTED
    ts = log_spaced(50.0, 5000.0, 12)
    scaled = np.array([np.sqrt(t) * abs(numeric_osc(f, unit2, t).value) for t in ts])
    assert scaled[-1] < scaled[0]
    slope = np.polyfit(np.log(ts), scaled, 1)[0]
    assert slope < 0
