"""
Module d'orchestration de l'analyse d'une phase.

Ce module enchaîne les étapes (appartenance, géométrie de Newton,
éventail, non-dégénérescence) dans un objet PhaseAnalysis immuable et
assemble les rapports JSON des commandes de la ligne de commande.
"""

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.asymptotics import (
    Amplitude,
    candidate_poles,
    decay_table,
    extrapolate_to_pole,
    fit_decay,
    leading_zeta_coefficients,
    log_spaced,
    numeric_osc,
    numeric_zeta,
    osc_leading_term,
    oscillation_statement,
)
from src.fan import (
    ConeAnnotation,
    Fan,
    annotate_cones,
    beta_tilde,
    fan_to_dict,
    normal_fan,
    refinement_check,
    unimodular_subdivision,
)
from src.fixtures import FIXTURES, fixture_spec
from src.funcspec import FunctionSpec, MembershipReport, check_membership, gamma_part, parse_function
from src.geometry import (
    Face,
    LatticePolyhedron,
    enumerate_faces,
    newton_distance,
    principal_face_and_multiplicity,
)
from src.toric import NondegeneracyReport, build_chart, chart_identity_check, nondegeneracy_check
from src.utils.config import get, override
from src.utils.error_handling import HypothesisError, ProcessingError, ValidationError, handle_errors
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)

COMMANDS = ("analyze", "fan", "resolve", "poles", "coeff", "zeta", "oscillate", "fit", "verify", "fixture")


@dataclass(frozen=True)
class AnalysisRequest:
    """
    Requête de la ligne de commande : une commande, une phase et les
    options numériques (None = valeur de config.yaml).
    """

    command: str
    source: Optional[str] = None
    n: Optional[int] = None
    amplitude: Optional[str] = None
    tolerance: Optional[float] = None
    max_boxes: Optional[int] = None
    budget_boxes: Optional[int] = None
    nu_max: Optional[int] = None
    lambda_max: Optional[int] = None
    y_max: Optional[float] = None
    deterministic: bool = False
    seed: Optional[int] = None
    cone: Optional[int] = None
    form: str = "chart"
    assume_nondegenerate: bool = False
    s_values: Tuple[float, ...] = ()
    t_values: Tuple[float, ...] = ()
    extrapolate: bool = False
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    samples: Optional[int] = None
    csv_path: Optional[str] = None
    random_count: Optional[int] = None

    def validate(self) -> None:
        """
        Raises:
            ValidationError: Commande inconnue, tolérance ou budget non positifs
        """
        if self.command not in COMMANDS:
            raise ValidationError(f"Commande inconnue: {self.command}", field="command", value=self.command)
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValidationError(f"Tolérance non positive: {self.tolerance}", field="tolerance",
                                  value=self.tolerance)
        for name in ("max_boxes", "budget_boxes", "samples", "random_count"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValidationError(f"{name} doit être positif: {value}", field=name, value=value)
        for name in ("nu_max", "lambda_max"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValidationError(f"{name} doit être ≥ 0: {value}", field=name, value=value)
        if self.y_max is not None and not self.y_max > 0:
            raise ValidationError(f"y_max doit être positif: {self.y_max}", field="y_max", value=self.y_max)

    def apply(self) -> None:
        """Reporte les options dans la configuration globale."""
        self.validate()
        override("numerics.tolerance", self.tolerance)
        override("numerics.max_boxes", self.max_boxes)
        override("numerics.budget_boxes", self.budget_boxes)
        override("numerics.nu_max", self.nu_max)
        override("numerics.lambda_max", self.lambda_max)
        override("numerics.y_max", self.y_max)
        override("numerics.seed", self.seed)
        override("numerics.deterministic", self.deterministic or None)
        override("fit.t_min", self.t_min)
        override("fit.t_max", self.t_max)
        override("fit.samples", self.samples)


@dataclass(frozen=True)
class PhaseAnalysis:
    """
    Résultat des étapes exactes : appartenance, polyèdre certifiant,
    d, q*, τ*, m, éventails et annotations, non-dégénérescence.

    `polyhedron` et `faces` sont ceux du polyèdre certifiant P (éventail,
    cartes, γ-parties) ; d, q*, τ* et m sont toujours lus sur le polyèdre
    de Taylor Γ₊(f) (`newton_polyhedron`). Les deux coïncident pour Ê(U).
    Pour une représentation rejetée, P est Γ₊(f) et l'éventail n'est pas
    construit.
    """

    f: FunctionSpec
    membership: MembershipReport
    polyhedron: LatticePolyhedron
    faces: Tuple[Face, ...]
    newton_polyhedron: LatticePolyhedron
    d: Fraction
    q_star: Tuple[Fraction, ...]
    tau: Face
    m: int
    normal_fan: Optional[Fan] = None
    fan: Optional[Fan] = None
    annotations: Tuple[ConeAnnotation, ...] = ()
    beta_tilde: Optional[Fraction] = None
    nondegeneracy: Optional[NondegeneracyReport] = None

    @property
    def tau_on_certifying(self) -> bool:
        """τ* est une face du polyèdre certifiant (vrai dès que P = Γ₊(f))."""
        return self.polyhedron == self.newton_polyhedron


# ---------------------------------------------------------------------------
# Chargement des phases
# ---------------------------------------------------------------------------

def load_function(source: str, n: Optional[int] = None) -> FunctionSpec:
    """
    Charge une phase depuis un fichier JSON, un nom de fixture ou un texte.

    Le JSON suit {"n", "terms": [{"exponent", "factor"}]} ou la forme
    abrégée {"n", "text"} ; un texte brut exige la dimension n.

    Raises:
        ValidationError: Source illisible ou dimension manquante
        ParseError: Erreur de syntaxe dans l'expression
    """
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ValidationError(f"Fichier de phase illisible: {source}", field="source",
                                  value=source, original_error=e)
        except json.JSONDecodeError as e:
            raise ValidationError(f"JSON invalide dans {source}", field="source",
                                  value=source, original_error=e)
        if isinstance(data, dict) and "text" in data and "terms" not in data:
            try:
                return parse_function(str(data["text"]), int(data["n"]), data.get("polyhedron"))
            except (KeyError, TypeError, ValueError) as e:
                raise ValidationError("Champ 'n' manquant ou invalide", field="n", original_error=e)
        if not isinstance(data, dict):
            raise ValidationError(f"Objet JSON attendu dans {source}", field="source", value=source)
        return FunctionSpec.from_dict(data)
    if source in FIXTURES:
        return fixture_spec(source)
    if n is None:
        raise ValidationError("Dimension --n requise pour une phase écrite en ligne", field="n")
    return parse_function(source, n)


# ---------------------------------------------------------------------------
# Étapes
# ---------------------------------------------------------------------------

@handle_errors
def step_membership(f: FunctionSpec) -> MembershipReport:
    logger.info("=== ÉTAPE 1: APPARTENANCE À LA CLASSE ===")
    report = check_membership(f)
    logger.info(f"Verdict: {report.verdict.value}")
    return report


@handle_errors
def step_geometry(membership: MembershipReport) -> Tuple[LatticePolyhedron, List[Face], Fraction,
                                                         Tuple[Fraction, ...], Face, int]:
    """
    Faces du polyèdre certifiant P, puis d, q*, τ*, m de Γ₊(f).

    Raises:
        DomainError: Γ₊(f) vide (phase plate)
    """
    logger.info("=== ÉTAPE 2: POLYÈDRE DE NEWTON ===")
    newton = membership.taylor_polyhedron
    polyhedron = membership.certified_polyhedron or newton
    faces = enumerate_faces(polyhedron)
    newton_faces = faces if polyhedron == newton else enumerate_faces(newton)
    d, q_star = newton_distance(newton)
    tau, m = principal_face_and_multiplicity(newton, newton_faces)
    if polyhedron != newton:
        d_P, _ = newton_distance(polyhedron)
        logger.info(f"Polyèdre certifiant P ≠ Γ₊(f) : d(P) = {d_P}")
    logger.info(f"{len(faces)} faces, d = {d}, m = {m}, τ* = {tau.describe()}")
    return polyhedron, faces, d, q_star, tau, m


@handle_errors
def step_fan(polyhedron: LatticePolyhedron, faces: List[Face]) -> Tuple[Fan, Fan, List[ConeAnnotation], Fraction]:
    logger.info("=== ÉTAPE 3: ÉVENTAIL ET SUBDIVISION ===")
    sigma_0 = normal_fan(polyhedron, faces)
    sigma = unimodular_subdivision(sigma_0, polyhedron, faces)
    annotations = annotate_cones(sigma, polyhedron, faces)
    beta = beta_tilde(sigma, polyhedron)
    return sigma_0, sigma, annotations, beta


@handle_errors
def step_nondegeneracy(f: FunctionSpec, polyhedron: LatticePolyhedron, faces: List[Face],
                       budget: Optional[int]) -> NondegeneracyReport:
    logger.info("=== ÉTAPE 4: NON-DÉGÉNÉRESCENCE ===")
    return nondegeneracy_check(f, polyhedron, faces, budget)


def analyze_phase(f: FunctionSpec, *, with_fan: bool = True, with_nondegeneracy: bool = True,
                  budget: Optional[int] = None) -> PhaseAnalysis:
    """
    Enchaîne les étapes exactes sur une phase.

    Args:
        f: Phase
        with_fan: Construit Σ₀, Σ et les annotations (phase certifiée seulement)
        with_nondegeneracy: Lance le test de non-dégénérescence
        budget: Budget du branch-and-bound

    Returns:
        PhaseAnalysis: Le bilan des étapes
    """
    start = time.time()
    membership = step_membership(f)
    polyhedron, faces, d, q_star, tau, m = step_geometry(membership)
    sigma_0 = sigma = beta = None
    annotations: List[ConeAnnotation] = []
    nondegeneracy = None
    if membership.certified and with_fan:
        sigma_0, sigma, annotations, beta = step_fan(polyhedron, faces)
    if membership.certified and with_nondegeneracy:
        nondegeneracy = step_nondegeneracy(f, polyhedron, faces, budget)
    logger.info(f"Analyse terminée en {time.time() - start:.2f} secondes")
    return PhaseAnalysis(f=f, membership=membership, polyhedron=polyhedron, faces=tuple(faces),
                         newton_polyhedron=membership.taylor_polyhedron,
                         d=d, q_star=q_star, tau=tau, m=m, normal_fan=sigma_0, fan=sigma,
                         annotations=tuple(annotations), beta_tilde=beta,
                         nondegeneracy=nondegeneracy)


def require_certified(analysis: PhaseAnalysis) -> None:
    """
    Raises:
        HypothesisError: Représentation non certifiée
    """
    if not analysis.membership.certified:
        raise HypothesisError("Représentation non certifiée dans Ê(U) ni Ê[P](U)",
                              reasons=analysis.membership.to_dict())


# ---------------------------------------------------------------------------
# Rapports
# ---------------------------------------------------------------------------

def _fraction_list(values) -> List[str]:
    return [str(v) for v in values]


def analysis_report(analysis: PhaseAnalysis) -> Dict[str, Any]:
    newton_faces = (analysis.faces if analysis.tau_on_certifying
                    else tuple(enumerate_faces(analysis.newton_polyhedron)))
    report = {
        "function": analysis.f.to_dict(),
        "text": analysis.f.to_text(),
        "membership": analysis.membership.to_dict(),
        "polyhedron": analysis.newton_polyhedron.to_dict(),
        "faces": [face.to_dict() for face in newton_faces],
        "d": str(analysis.d),
        "m": analysis.m,
        "beta": str(-1 / analysis.d) if analysis.d else None,
        "q_star": _fraction_list(analysis.q_star),
        "tau_star": analysis.tau.to_dict(),
        "tau_star_text": analysis.tau.describe(),
        "provenance": "exact",
    }
    if not analysis.tau_on_certifying:
        # éventail, cartes et pôles candidats portent sur P
        d_P, _ = newton_distance(analysis.polyhedron)
        _, m_P = principal_face_and_multiplicity(analysis.polyhedron, list(analysis.faces))
        report["certifying_polyhedron"] = {"polyhedron": analysis.polyhedron.to_dict(),
                                           "faces": [face.to_dict() for face in analysis.faces],
                                           "d": str(d_P), "m": m_P}
    if analysis.nondegeneracy is not None:
        report["nondegeneracy"] = analysis.nondegeneracy.to_dict()
    return report


def fan_report(analysis: PhaseAnalysis) -> Dict[str, Any]:
    require_certified(analysis)
    return {
        "d": str(analysis.d),
        "m": analysis.m,
        "normal_fan": analysis.normal_fan.to_dict(),
        "subdivision": analysis.fan.to_dict(),
        **fan_to_dict(analysis.annotations, analysis.beta_tilde),
        "refines_normal_fan": refinement_check(analysis.fan, analysis.polyhedron),
        "unimodular": all(cone.unimodular for cone in analysis.fan.maximal),
    }


def resolve_report(analysis: PhaseAnalysis, y_max: Optional[float] = None) -> Dict[str, Any]:
    require_certified(analysis)
    y_max = y_max or get("numerics.y_max", 2.0)
    charts = []
    for index, annotation in enumerate(analysis.annotations, start=1):
        chart = build_chart(analysis.f, annotation.cone, analysis.polyhedron)
        entry = chart.to_dict()
        entry.update({
            "index": index,
            "in_sigma_star": annotation.in_sigma_star,
            "A": sorted(j + 1 for j in annotation.A_set),
            "identity_residual": chart_identity_check(analysis.f, chart, y_max=y_max),
        })
        charts.append(entry)
    return {"d": str(analysis.d), "m": analysis.m, "charts": charts}


def poles_report(analysis: PhaseAnalysis, nu_max: Optional[int] = None,
                 lambda_max: Optional[int] = None) -> Dict[str, Any]:
    require_certified(analysis)
    nu_max = nu_max if nu_max is not None else get("numerics.nu_max", 2)
    lambda_max = lambda_max if lambda_max is not None else get("numerics.lambda_max", 3)
    poles = candidate_poles(analysis.polyhedron, analysis.fan, nu_max, lambda_max, analysis.annotations)
    return {"d": str(analysis.d), "m": analysis.m, "beta": str(poles.beta_tilde),
            "candidate_poles": poles.to_dict()["entries"], "provenance": "exact"}


def coeff_report(analysis: PhaseAnalysis, amplitude: Amplitude, request: AnalysisRequest) -> Dict[str, Any]:
    require_certified(analysis)
    data = leading_zeta_coefficients(analysis, amplitude, form=request.form,
                                     tolerance=request.tolerance, max_boxes=request.max_boxes,
                                     cone_index=request.cone,
                                     assume_nondegenerate=request.assume_nondegenerate,
                                     seed=request.seed)
    term = osc_leading_term(data, analysis.d, analysis.m)
    poles = poles_report(analysis, request.nu_max, request.lambda_max)
    return {
        "d": str(analysis.d),
        "m": analysis.m,
        "beta": str(-1 / analysis.d),
        "candidate_poles": poles["candidate_poles"],
        "C_plus": [data.C_plus, 0.0],
        "C_minus": [data.C_minus, 0.0],
        "leading_coefficient": [term.coefficient.real, term.coefficient.imag],
        "quad_error": data.error,
        "amplitude": amplitude.to_dict(),
        "coefficients": data.to_dict(),
        "oscillatory_term": term.to_dict(),
        "oscillation": oscillation_statement(analysis, amplitude, seed=request.seed),
        "provenance": data.provenance,
    }


def zeta_report(analysis: PhaseAnalysis, amplitude: Amplitude, request: AnalysisRequest) -> Dict[str, Any]:
    require_certified(analysis)
    if not request.s_values and not request.extrapolate:
        raise ValidationError("Au moins une valeur --s (ou --extrapolate) est requise", field="s")
    values = []
    for s in request.s_values:
        result = numeric_zeta(analysis, amplitude, float(s), request.tolerance, request.max_boxes)
        values.append({"s": float(s), **result.to_dict()})
    report = {"d": str(analysis.d), "m": analysis.m, "amplitude": amplitude.to_dict(),
              "values": values, "provenance": "numeric"}
    if request.extrapolate:
        report["extrapolation"] = extrapolate_to_pole(analysis, amplitude, tolerance=request.tolerance)
    return report


def _write_table(samples, csv_path: Optional[str]) -> Optional[str]:
    if not csv_path:
        return None
    path = Path(csv_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        decay_table(samples).to_csv(path, index=False)
    except OSError as e:
        raise ProcessingError(f"Écriture impossible: {path}", "OUTPUT_FAILED",
                              source="decay_table", original_error=e)
    logger.info(f"Table écrite: {path}")
    return str(path)


def oscillate_report(f: FunctionSpec, amplitude: Amplitude, request: AnalysisRequest) -> Dict[str, Any]:
    if not request.t_values:
        raise ValidationError("Au moins une valeur --t est requise", field="t")
    samples = [numeric_osc(f, amplitude, float(t), request.tolerance, request.max_boxes)
               for t in request.t_values]
    report = {"amplitude": amplitude.to_dict(), "samples": [s.to_dict() for s in samples],
              "provenance": "numeric"}
    table = _write_table(samples, request.csv_path)
    if table:
        report["table"] = table
    return report


def fit_report(f: FunctionSpec, amplitude: Amplitude, request: AnalysisRequest,
               analysis: Optional[PhaseAnalysis] = None) -> Dict[str, Any]:
    ts = list(request.t_values) or log_spaced(get("fit.t_min", 50.0), get("fit.t_max", 5000.0),
                                              int(get("fit.samples", 12)))
    samples = [numeric_osc(f, amplitude, float(t), request.tolerance, request.max_boxes) for t in ts]
    fit = fit_decay([(s.t, s.value) for s in samples], f.n)
    report = {"amplitude": amplitude.to_dict(), "samples": [s.to_dict() for s in samples],
              "fit": fit.to_dict(), "provenance": "numeric"}
    if analysis is not None:
        report["predicted"] = {"beta": str(-1 / analysis.d), "eta": analysis.m - 1,
                               "membership": analysis.membership.verdict.value}
    table = _write_table(samples, request.csv_path)
    if table:
        report["table"] = table
    return report


def f_tau_text(analysis: PhaseAnalysis) -> Optional[str]:
    """Affichage de f_τ*, None si τ* n'est pas une face du polyèdre certifiant."""
    if not analysis.tau_on_certifying:
        return None
    return gamma_part(analysis.f, analysis.tau, analysis.polyhedron).to_text()
