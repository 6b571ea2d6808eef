"""
Module des suites de propriétés lancées par la commande `verify`.

Chaque suite parcourt les fixtures certifiées (et, pour les suites
d'éventail, des phases polynomiales aléatoires) et produit des
PropertyCheck comparant un résidu à son seuil.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.asymptotics import candidate_poles
from src.fan import gamma_of, refinement_check, support_check
from src.fixtures import FIXTURES, emit_fixture, fixture_spec
from src.funcspec import FunctionSpec, differentiate, gamma_part, parse_function
from src.geometry import Face, ValidPair, dot, newton_distance, principal_face_and_multiplicity
from src.pipeline import PhaseAnalysis, analyze_phase
from src.toric import (
    build_chart,
    chart_identity_check,
    commutation_check,
    compactness_equivalence_check,
    euler_identity_check,
    gamma_part_pullback_check,
    jacobian_check,
    quasihomogeneity_check,
)
from src.utils.config import get
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)

CHART_TOLERANCE = 1e-10
EULER_TOLERANCE = 1e-8
JACOBIAN_TOLERANCE = 1e-6
QUASIHOMOGENEITY_TOLERANCE = 1e-12
DERIVATIVE_TOLERANCE = 1e-6
PULLBACK_TOLERANCE = 1e-10
RANDOM_PHASES = 20


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    subject: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {"name": self.name, "subject": self.subject, "passed": self.passed}
        if self.value is not None:
            data["value"] = self.value
            data["threshold"] = self.threshold
        return data


@dataclass
class VerificationReport:
    checks: List[PropertyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, subject: str, value: float, threshold: float) -> None:
        self.checks.append(PropertyCheck(name, subject, bool(value <= threshold), float(value), threshold))

    def assert_true(self, name: str, subject: str, condition: bool) -> None:
        self.checks.append(PropertyCheck(name, subject, bool(condition)))

    def summary(self) -> Dict[str, Dict[str, Any]]:
        result: Dict[str, Dict[str, Any]] = {}
        for check in self.checks:
            entry = result.setdefault(check.name, {"count": 0, "failed": 0, "worst": None})
            entry["count"] += 1
            entry["failed"] += 0 if check.passed else 1
            if check.value is not None:
                entry["worst"] = max(entry["worst"] or 0.0, check.value)
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "summary": self.summary(),
            "failures": [c.to_dict() for c in self.checks if not c.passed],
            "checks": [c.to_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Phases de test
# ---------------------------------------------------------------------------

def random_polynomial_phase(rng: np.random.Generator, n: int, terms: int = 4,
                            max_degree: int = 6) -> FunctionSpec:
    """Polynôme à coefficients entiers positifs, sans terme constant."""
    exponents = set()
    while len(exponents) < terms:
        p = tuple(int(c) for c in rng.integers(0, max_degree + 1, size=n))
        if any(p):
            exponents.add(p)
    return FunctionSpec.from_terms(n, [(p, int(rng.integers(1, 4))) for p in sorted(exponents)])


def random_phases(count: int = RANDOM_PHASES, seed: Optional[int] = None) -> List[Tuple[str, FunctionSpec]]:
    rng = np.random.default_rng(get("numerics.seed", 12345) if seed is None else seed)
    phases = []
    for index in range(count):
        n = 2 if index % 2 == 0 else 3
        phases.append((f"random_{index + 1}", random_polynomial_phase(rng, n)))
    return phases


def containing_pairs(face: Face, analysis: PhaseAnalysis) -> List[ValidPair]:
    """Facettes (a, l) du polyèdre avec γ ⊂ H(a, l)."""
    pairs = []
    for pair in analysis.polyhedron.facets:
        on_plane = all(dot(pair.a, v) == pair.l for v in face.vertices)
        if on_plane and all(pair.a[k] == 0 for k in face.V_set):
            pairs.append(pair)
    return pairs


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def suite_charts(report: VerificationReport, name: str, analysis: PhaseAnalysis,
                 y_max: float, seed: Optional[int]) -> None:
    f, polyhedron = analysis.f, analysis.polyhedron
    n = f.n
    for index, annotation in enumerate(analysis.annotations, start=1):
        cone = annotation.cone
        subject = f"{name}#σ{index}"
        chart = build_chart(f, cone, polyhedron)
        report.add("chart_identity", subject,
                   chart_identity_check(f, chart, seed=seed, samples=200, y_max=y_max), CHART_TOLERANCE)
        report.add("jacobian", subject, jacobian_check(cone, seed=seed), JACOBIAN_TOLERANCE)
        report.assert_true("compactness_equivalence", subject,
                           compactness_equivalence_check(cone, polyhedron, seed=seed))
        report.assert_true("commutation", subject, commutation_check(cone, polyhedron, seed=seed))
        worst = 0.0
        for size in range(n + 1):
            for indices in combinations(range(n), size):
                face = gamma_of(indices, cone, polyhedron)
                worst = max(worst, gamma_part_pullback_check(f, face, chart, indices, polyhedron, seed=seed))
        report.add("gamma_part_pullback", subject, worst, PULLBACK_TOLERANCE)


def suite_faces(report: VerificationReport, name: str, analysis: PhaseAnalysis,
                seed: Optional[int]) -> None:
    for face in analysis.faces:
        f_gamma = gamma_part(analysis.f, face, analysis.polyhedron)
        for pair in containing_pairs(face, analysis):
            subject = f"{name}:{face.describe()}:a={pair.a}"
            report.add("euler_identity", subject, euler_identity_check(f_gamma, pair, seed=seed),
                       EULER_TOLERANCE)
            report.add("quasihomogeneity", subject, quasihomogeneity_check(f_gamma, pair, seed=seed),
                       QUASIHOMOGENEITY_TOLERANCE)


def suite_gamma_limit(report: VerificationReport, name: str, analysis: PhaseAnalysis,
                      seed: Optional[int]) -> None:
    """f(t^a·x)/t^l → f_γ(x) pour chaque facette, erreur décroissante en t."""
    rng = np.random.default_rng(get("numerics.seed", 12345) if seed is None else seed)
    n = analysis.f.n
    x = rng.uniform(0.2, 1.0, size=(20, n)) * rng.choice([-1.0, 1.0], size=(20, n))
    for pair in analysis.polyhedron.facets:
        face = next((g for g in analysis.faces if g.dim == n - 1 and g.defining_pair == pair), None)
        if face is None:
            continue
        f_gamma = gamma_part(analysis.f, face, analysis.polyhedron)
        target = np.real(f_gamma.numeric(x)) if not f_gamma.is_zero else np.zeros(len(x))
        errors = []
        for t in (1e-1, 1e-2, 1e-3):
            scaled = x * t ** np.asarray(pair.a, dtype=float)
            quotient = np.real(analysis.f.numeric(scaled)) / t ** pair.l
            errors.append(float(np.max(np.abs(quotient - target) / (1.0 + np.abs(target)))))
        decreasing = all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
        report.assert_true("gamma_part_limit", f"{name}:a={pair.a}", decreasing)


def suite_derivatives(report: VerificationReport, name: str, f: FunctionSpec,
                      seed: Optional[int], samples: int = 100, step: float = 1e-5) -> None:
    rng = np.random.default_rng(get("numerics.seed", 12345) if seed is None else seed)
    x = rng.uniform(0.1, 2.0, size=(samples, f.n)) * rng.choice([-1.0, 1.0], size=(samples, f.n))
    for i in range(1, f.n + 1):
        derivative = differentiate(f, i)
        exact = np.real(derivative.numeric(x)) if not derivative.is_zero else np.zeros(samples)
        shift = np.zeros(f.n)
        shift[i - 1] = step
        central = (np.real(f.numeric(x + shift)) - np.real(f.numeric(x - shift))) / (2 * step)
        scale = np.abs(exact) + 1.0
        report.add("differentiation", f"{name}:∂{i}", float(np.max(np.abs(exact - central) / scale)),
                   DERIVATIVE_TOLERANCE)


def suite_fan(report: VerificationReport, name: str, analysis: PhaseAnalysis) -> None:
    n = analysis.f.n
    fan = analysis.fan
    report.assert_true("unimodular", name, all(cone.unimodular for cone in fan.maximal))
    report.assert_true("support", name, support_check(fan, max_entry=10))
    report.assert_true("refinement", name, refinement_check(fan, analysis.polyhedron))
    report.assert_true("duality_dimension", name, all(
        cone.dim + cone.face.dim == n for cone in analysis.normal_fan.cones if cone.face is not None))
    # l'éventail est celui du polyèdre certifiant P, pas forcément Γ₊(f)
    _, m_P = principal_face_and_multiplicity(analysis.polyhedron, list(analysis.faces))
    m = max(len(a.A_set) for a in analysis.annotations)
    report.assert_true("max_card_A_equals_m", name, m == m_P)
    poles = candidate_poles(analysis.polyhedron, fan, 0, 0, analysis.annotations)
    d, _ = newton_distance(analysis.polyhedron)
    report.assert_true("pole_maximality", name, poles.entries[0].value == Fraction(-1) / d)


def suite_fixtures(report: VerificationReport) -> None:
    """Verdicts, d, m attendus et point fixe émission → analyse → impression → analyse."""
    for name, fixture in FIXTURES.items():
        f = fixture_spec(name)
        analysis = analyze_phase(f, with_fan=False, with_nondegeneracy=False)
        report.assert_true("membership_verdict", name, analysis.membership.verdict.value == fixture.verdict)
        if fixture.d is not None:
            report.assert_true("newton_distance", name,
                               str(analysis.d) == fixture.d and analysis.m == fixture.m)
        reparsed = parse_function(f.to_text(), f.n)
        report.assert_true("round_trip", name,
                           reparsed == f and parse_function(reparsed.to_text(), f.n) == reparsed)
        report.assert_true("byte_stable", name, emit_fixture(name) == f.to_json())


def run_verification(seed: Optional[int] = None, y_max: Optional[float] = None,
                     random_count: int = RANDOM_PHASES,
                     fixtures: Optional[Sequence[str]] = None) -> VerificationReport:
    """
    Lance toutes les suites sur les fixtures et sur `random_count` phases aléatoires.

    Returns:
        VerificationReport: Toutes les vérifications, réussies ou non
    """
    start = time.time()
    y_max = y_max or get("numerics.y_max", 2.0)
    report = VerificationReport()
    logger.info("=== SUITE: FIXTURES ===")
    suite_fixtures(report)

    names = list(fixtures) if fixtures is not None else list(FIXTURES)
    subjects = [(name, fixture_spec(name)) for name in names] + random_phases(random_count, seed)
    for name, f in subjects:
        logger.info(f"=== SUITE: {name} ===")
        analysis = analyze_phase(f, with_nondegeneracy=False)
        suite_derivatives(report, name, f, seed)
        if not analysis.membership.certified:
            continue
        suite_fan(report, name, analysis)
        suite_faces(report, name, analysis, seed)
        suite_gamma_limit(report, name, analysis, seed)
        # les cartes des phases aléatoires sont couvertes par l'éventail
        if name in FIXTURES:
            suite_charts(report, name, analysis, y_max, seed)
    failed = sum(not c.passed for c in report.checks)
    logger.info(f"Vérification: {len(report.checks)} contrôles, {failed} échecs "
                f"en {time.time() - start:.1f} secondes")
    return report
