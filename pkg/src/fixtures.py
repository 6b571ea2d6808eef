"""
Module des phases de référence.

Chaque fixture est écrite dans la grammaire des phases ; `emit_fixture`
produit un JSON stable octet par octet, identique aux fichiers de
data/fixtures.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from src.funcspec import FunctionSpec, parse_function
from src.utils.config import get
from src.utils.error_handling import ValidationError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)


@dataclass(frozen=True)
class Fixture:
    name: str
    n: int
    text: str
    description: str
    verdict: str
    d: Optional[str] = None
    m: Optional[int] = None


FIXTURES: Dict[str, Fixture] = {
    fixture.name: fixture
    for fixture in (
        Fixture("ex11_1", 2, "x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))",
                "Face principale non compacte {(6, α₂) ; α₂ ≥ 2}", "EHat", "6", 1),
        Fixture("ex11_2", 3, "x1^6 + x1^4*x2^2*flat(3,1) + x1^2*x2^4*flat(3,2) + x2^6",
                "Face principale α₁ + α₂ = 6 en dimension 3", "EHat", "3", 1),
        Fixture("ex11_3", 3, "x1^6 + x1^2*x2^2*(1 + flat(3,1)) + x2^6",
                "Facteur logarithmique : d = 2, m = 2", "EHat", "2", 2),
        Fixture("ex11_4", 2, "x1^2 + flat(2,1)",
                "Facteur plat au sommet (0, 0) : hors de la classe", "Rejected", "2", 1),
        Fixture("ex2_5_k0", 2, "x1^2*x2^2 + flat(2,1)",
                "x₁²x₂² + x₁^k·e^(−1/x₂²), k = 0", "Rejected"),
        Fixture("ex2_5_k1", 2, "x1^2*x2^2 + x1*x2*flatm(2,1,1)",
                "x₁²x₂² + x₁^k·e^(−1/x₂²), k = 1", "EHatP", "2", 2),
        Fixture("ex2_5_k2", 2, "x1^2*x2^2*(1 + flatm(2,1,2))",
                "x₁²x₂² + x₁^k·e^(−1/x₂²), k = 2", "EHat", "2", 2),
        Fixture("ex2_5_k3", 2, "x1^2*x2^2*(1 + x1*flatm(2,1,2))",
                "x₁²x₂² + x₁^k·e^(−1/x₂²), k = 3", "EHat", "2", 2),
        Fixture("monomial_square", 2, "x1^2*x2^2", "Monôme x₁²x₂²", "EHat", "2", 2),
    )
}


def fixture_names() -> Tuple[str, ...]:
    return tuple(FIXTURES)


def fixture_spec(name: str) -> FunctionSpec:
    """
    Raises:
        ValidationError: Nom de fixture inconnu
    """
    fixture = FIXTURES.get(name)
    if fixture is None:
        raise ValidationError(f"Fixture inconnue: {name} (attendu: {', '.join(FIXTURES)})",
                              field="name", value=name)
    return parse_function(fixture.text, fixture.n)


def emit_fixture(name: str) -> str:
    """JSON de la FunctionSpec de la fixture (clés triées, indentation 2)."""
    return fixture_spec(name).to_json()


def fixture_path(name: str) -> Path:
    return Path(get("paths.fixtures_dir")) / f"{name}.json"


def write_fixtures(directory: Optional[str] = None) -> Dict[str, str]:
    """Écrit toutes les fixtures dans data/fixtures (ou `directory`)."""
    target = Path(directory or get("paths.fixtures_dir"))
    target.mkdir(parents=True, exist_ok=True)
    written = {}
    for name in FIXTURES:
        path = target / f"{name}.json"
        path.write_text(emit_fixture(name), encoding="utf-8")
        written[name] = str(path)
    logger.info(f"{len(written)} fixtures écrites dans {target}")
    return written
