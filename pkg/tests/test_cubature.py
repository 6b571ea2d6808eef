import numpy as np
import pytest
from scipy import integrate

from src.cubature import (
    CubatureResult,
    adaptive_cubature,
    filon_moments,
    filon_weights,
    gauss_rule,
    oscillatory_cubature,
    tensor_rule,
    worker_count,
)
from src.utils.config import load_config
from src.utils.error_handling import NumericBudgetError, ValidationError


def test_tensor_rule_integrates_polynomials():
    nodes, weights = tensor_rule(2, 4)
    assert nodes.shape == (16, 2)
    # degré 7 exact par axe
    values = nodes[:, 0] ** 6 * nodes[:, 1] ** 2
    assert np.sum(weights * values) == pytest.approx((2 / 7) * (2 / 3), rel=1e-12)


def test_adaptive_cubature_smooth():
    result = adaptive_cubature(lambda x: np.exp(x[:, 0] + x[:, 1]), [0.0, 0.0], [1.0, 1.0], 1e-10)
    assert result.value == pytest.approx((np.e - 1) ** 2, rel=1e-9)
    assert result.error <= 1e-10
    assert result.boxes > 0


def test_adaptive_cubature_singular_integrand():
    # ∫₀¹ u^(−1/2) du = 2, singularité intégrable au bord
    result = adaptive_cubature(lambda x: np.where(x[:, 0] > 0, x[:, 0] ** -0.5, 0.0), [0.0], [1.0], 1e-6)
    assert result.value == pytest.approx(2.0, abs=1e-4)


def test_adaptive_cubature_complex_values():
    result = adaptive_cubature(lambda x: np.exp(1j * x[:, 0]), [0.0], [np.pi], 1e-10)
    np.testing.assert_allclose(result.value, 2j, atol=1e-9)
    assert result.to_dict()["value"] == pytest.approx([0.0, 2.0], abs=1e-9)


def test_adaptive_cubature_degenerate_box():
    assert adaptive_cubature(lambda x: np.ones(len(x)), [0.0, 1.0], [1.0, 1.0], 1e-6).value == 0.0


def test_adaptive_cubature_validation():
    with pytest.raises(ValidationError):
        adaptive_cubature(lambda x: x[:, 0], [0.0], [1.0], 0.0)
    with pytest.raises(ValidationError):
        adaptive_cubature(lambda x: x[:, 0], [0.0], [1.0], 1e-6, max_boxes=0)


def test_adaptive_cubature_budget():
    with pytest.raises(NumericBudgetError) as info:
        adaptive_cubature(lambda x: np.sin(200 * x[:, 0] * x[:, 1]), [0.0, 0.0], [1.0, 1.0], 1e-12,
                          max_boxes=50)
    assert info.value.boxes <= 50
    assert info.value.to_dict()["error"] is not None


def test_filon_moments_match_quadrature():
    omega = 37.0
    moments = filon_moments(omega, 4)
    for k in range(5):
        re, _ = integrate.quad(lambda u: u ** k * np.cos(omega * u), -1, 1, limit=200)
        im, _ = integrate.quad(lambda u: u ** k * np.sin(omega * u), -1, 1, limit=200)
        assert moments[k] == pytest.approx(re + 1j * im, abs=1e-10)


def test_filon_weights_are_exact_on_polynomials():
    nodes, _ = gauss_rule(6)
    for omega in (10.0, 50.0):
        _, weights = filon_weights(omega, 6)
        poly = 1 + nodes - 3 * nodes ** 5
        exact = filon_moments(omega, 5) @ np.array([1, 1, 0, 0, 0, -3])
        assert np.sum(weights * poly) == pytest.approx(exact, abs=1e-9)


def test_oscillatory_cubature_against_quad():
    def amplitude(x):
        return np.exp(-x[:, 0] ** 2)

    def phase(x):
        return x[:, 0] ** 2

    def gradient(x):
        return 2 * x

    t = 40.0
    plus, minus = oscillatory_cubature(phase, gradient, amplitude, [-1.0], [1.0], t, 1e-8)
    re, _ = integrate.quad(lambda u: np.exp(-u ** 2) * np.cos(t * u ** 2), -1, 1, limit=400)
    im, _ = integrate.quad(lambda u: np.exp(-u ** 2) * np.sin(t * u ** 2), -1, 1, limit=400)
    assert plus.value == pytest.approx(re + 1j * im, abs=1e-6)
    assert minus.value == pytest.approx(re - 1j * im, abs=1e-6)


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv("TORASC_THREADS", "2")
    load_config()
    assert worker_count() == 2


def test_result_to_dict():
    assert CubatureResult(1.5, 1e-9, 3).to_dict() == {"value": 1.5, "error": 1e-9, "boxes": 3}
