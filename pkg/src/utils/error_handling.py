# src/utils/error_handling.py
import logging
import traceback
from datetime import datetime
from functools import wraps
from typing import Any, Callable, Dict, Optional


def handle_errors(func: Optional[Callable] = None) -> Callable:
    """
    Decorator for standardized error handling in pipeline steps.

    Logs the failure with its traceback under the 'torasc' logger and
    re-raises, so the CLI can still map the exception to an exit code.

    Args:
        func: The function to decorate

    Returns:
        Callable: Decorated function with error handling
    """

    def _get_logger() -> logging.Logger:
        return logging.getLogger("torasc")

    def decorator(fn: Callable) -> Callable:
        logger = _get_logger()

        @wraps(fn)
        def wrapper(*args, **kwargs) -> Any:
            try:
                return fn(*args, **kwargs)
            except TorascError as e:
                # Expected failures: one line, traceback only in debug
                logger.error(f"Error in {fn.__name__}: {e}")
                logger.debug("Traceback:", exc_info=True)
                raise
            except Exception as e:
                logger.error(f"Error in {fn.__name__}: {str(e)}", exc_info=True)
                raise

        return wrapper

    if func is not None:
        return decorator(func)
    return decorator


class TorascError(Exception):
    """Base exception class for all torasc errors."""

    exit_code = 1

    def __init__(self, message: str, original_error: Optional[Exception] = None):
        super().__init__(message)
        self.message = message
        self.original_error = original_error
        self.timestamp = datetime.now()
        self.traceback = traceback.format_exc() if original_error else None

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form used in error reports."""
        return {"error": type(self).__name__, "message": self.message}


class ValidationError(TorascError):
    """Exception for invalid user input.

    Examples:
        - Variable index larger than the dimension
        - Non-positive tolerance or budget
        - Malformed FunctionSpec JSON
    """

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None,
                 value: Optional[Any] = None, original_error: Optional[Exception] = None):
        super().__init__(message, original_error)
        self.field = field
        self.invalid_value = value


class ParseError(ValidationError):
    """Syntax error in an expression, with 1-based line and column."""

    def __init__(self, message: str, line: int, column: int, text: str = ""):
        super().__init__(f"{message} (ligne {line}, colonne {column})", field="expression",
                         value=text)
        self.line = line
        self.column = column

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update(line=self.line, column=self.column)
        return data


class ConfigurationError(TorascError):
    """Exception for configuration-related errors.

    Examples:
        - Missing configuration parameters
        - Unresolvable ${...} references
        - Invalid environment variables
    """

    exit_code = 2

    def __init__(self, message: str, config_key: Optional[str] = None,
                 original_error: Optional[Exception] = None):
        super().__init__(message, original_error)
        self.config_key = config_key


class DomainError(TorascError):
    """Mathematically invalid argument (negative exponent, empty polyhedron, ...)."""

    exit_code = 2


class ConsistencyError(TorascError):
    """An internal invariant does not hold; signals a bug upstream."""

    exit_code = 1


class HypothesisError(TorascError):
    """Refusal: a hypothesis required for the computation is not certified."""

    exit_code = 3

    def __init__(self, message: str, reasons: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.reasons = reasons or {}

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["reasons"] = self.reasons
        return data


class NumericBudgetError(TorascError):
    """Numerical budget exhausted before reaching the requested tolerance."""

    exit_code = 4

    def __init__(self, message: str, estimate: Any = None, error: Optional[float] = None,
                 boxes: Optional[int] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.boxes = boxes

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        estimate = self.estimate
        if isinstance(estimate, complex):
            estimate = [estimate.real, estimate.imag]
        data.update(estimate=estimate, error=self.error, boxes=self.boxes)
        return data


class ProcessingError(TorascError):
    """
    Exception spécifique pour les erreurs de traitement dans le pipeline d'analyse.
    Utilisée pour signaler les problèmes lors de l'exécution d'une étape.
    """

    ERROR_CODES = {
        'OUTPUT_FAILED': "Échec de l'écriture d'une sortie",
        'EXECUTION_FAILED': "Échec de l'exécution de la commande",
    }

    def __init__(self, message: str, error_type: str = 'EXECUTION_FAILED',
                 context: Optional[Dict[str, Any]] = None,
                 source: Optional[str] = None,
                 original_error: Optional[Exception] = None) -> None:
        """
        Initialise une erreur de traitement avec contexte enrichi.

        Args:
            message: Description de l'erreur
            error_type: Type d'erreur parmi les ERROR_CODES définis
            context: Informations contextuelles sur l'erreur
            source: Source ou composant à l'origine de l'erreur
            original_error: Exception d'origine
        """
        if error_type not in self.ERROR_CODES:
            error_type = 'EXECUTION_FAILED'

        super().__init__(message, original_error)
        self.error_code = f"TORASC_{error_type}"
        self.details = {
            'error_type': error_type,
            'error_description': self.ERROR_CODES[error_type],
            'source': source or 'unknown',
        }
        if context:
            self.details.update(context)
        if isinstance(original_error, TorascError):
            self.exit_code = original_error.exit_code

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update(code=self.error_code, details=self.details)
        return data
