import logging

import pytest

from src.utils.error_handling import (
    ConsistencyError,
    DomainError,
    HypothesisError,
    NumericBudgetError,
    ParseError,
    ProcessingError,
    TorascError,
    ValidationError,
    handle_errors,
)


@pytest.mark.parametrize("error, code", [
    (ValidationError("x"), 2),
    (ParseError("x", 1, 1), 2),
    (DomainError("x"), 2),
    (ConsistencyError("x"), 1),
    (HypothesisError("x"), 3),
    (NumericBudgetError("x"), 4),
    (ProcessingError("x"), 1),
])
def test_exit_codes(error, code):
    assert error.exit_code == code


def test_parse_error_position():
    error = ParseError("Jeton inattendu", 2, 5, "x1 +\n (x2")
    assert "ligne 2, colonne 5" in error.message
    assert error.to_dict() == {"error": "ParseError", "message": error.message, "line": 2, "column": 5}


def test_budget_error_serializes_complex_estimate():
    error = NumericBudgetError("budget", estimate=1 + 2j, error=1e-3, boxes=10)
    assert error.to_dict()["estimate"] == [1.0, 2.0]
    assert error.to_dict()["boxes"] == 10


def test_hypothesis_error_reasons():
    assert HypothesisError("refus", {"d": "1"}).to_dict()["reasons"] == {"d": "1"}


def test_processing_error_inherits_exit_code():
    error = ProcessingError("échec", "OUTPUT_FAILED", source="csv", original_error=HypothesisError("x"))
    assert error.exit_code == 3
    assert error.error_code == "TORASC_OUTPUT_FAILED"
    assert error.details["source"] == "csv"
    assert ProcessingError("échec", "UNKNOWN").error_code == "TORASC_EXECUTION_FAILED"


def test_handle_errors_reraises(caplog):
    @handle_errors
    def failing():
        raise DomainError("hors domaine")

    with caplog.at_level(logging.ERROR, logger="torasc"):
        with pytest.raises(DomainError):
            failing()
    assert "hors domaine" in caplog.text

    @handle_errors
    def crashing():
        raise KeyError("k")

    with pytest.raises(KeyError):
        crashing()
    assert issubclass(DomainError, TorascError)
