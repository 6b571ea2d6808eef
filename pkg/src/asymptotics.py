"""
Module des asymptotiques.

Ce module gère les pôles candidats de Z_±(s; φ) et leurs bornes d'ordre,
les coefficients de Laurent dominants C̃_±, C_±, le terme dominant de
I(t; φ), ainsi que l'évaluation numérique directe de Z(s; φ) et de
I(t; φ) et l'ajustement de la décroissance.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import sympy
from scipy.special import gamma as gamma_function

from src.cubature import CubatureResult, adaptive_cubature, oscillatory_cubature
from src.fan import ConeAnnotation, Fan, annotate_cones, beta_tilde
from src.funcspec import FunctionSpec, Verdict, gamma_part
from src.geometry import LatticePolyhedron
from src.toric import FaceStatus, build_chart
from src.utils.config import get
from src.utils.error_handling import (
    ConsistencyError,
    DomainError,
    HypothesisError,
    ValidationError,
)
from src.utils.logger import get_logger

if TYPE_CHECKING:  # pragma: no cover
    from src.pipeline import PhaseAnalysis

# Initialisation du logger
logger = get_logger(__name__)


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------

def bump(u: np.ndarray) -> np.ndarray:
    """β(u) = exp(−1/(1−u²)) pour |u| < 1, 0 sinon."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        values = np.exp(-1.0 / (1.0 - np.where(inside, u, 0.0) ** 2))
    return np.where(inside, values, 0.0)


@dataclass(frozen=True)
class Amplitude:
    """
    Produit de bosses φ(x) = c·∏ β((x_i − centre_i)/r_i).
    """

    radii: Tuple[float, ...]
    scale: float = 1.0
    centers: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if any(r <= 0 for r in self.radii):
            raise ValidationError(f"Rayons d'amplitude non positifs: {self.radii}", field="radius")
        if not self.centers:
            object.__setattr__(self, "centers", (0.0,) * len(self.radii))
        if len(self.centers) != len(self.radii):
            raise ValidationError("Centres et rayons de dimensions différentes", field="center")

    @classmethod
    def unit(cls, n: int) -> "Amplitude":
        return cls(radii=(1.0,) * n, scale=1.0)

    @classmethod
    def from_spec(cls, spec: Optional[str], n: int) -> "Amplitude":
        """
        Amplitude depuis 'unit', un JSON {"radius", "scale", "center"} ou None
        (valeurs par défaut de la configuration).

        Raises:
            ValidationError: JSON invalide
        """
        if spec is None:
            radius = float(get("amplitude.radius", 1.0))
            return cls(radii=(radius,) * n, scale=float(get("amplitude.scale", 1.0)))
        if spec.strip() == "unit":
            return cls.unit(n)
        try:
            data = json.loads(spec)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Amplitude JSON invalide: {spec!r}", field="amplitude",
                                  value=spec, original_error=e)
        radius = data.get("radius", 1.0)
        radii = tuple(float(r) for r in radius) if isinstance(radius, list) else (float(radius),) * n
        centers = tuple(float(c) for c in data.get("center", [0.0] * n))
        if len(radii) != n or len(centers) != n:
            raise ValidationError(f"Amplitude de dimension incorrecte (n = {n})", field="amplitude")
        return cls(radii=radii, scale=float(data.get("scale", 1.0)), centers=centers)

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.centers) - np.asarray(self.radii)

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.centers) + np.asarray(self.radii)

    @property
    def box_radius(self) -> np.ndarray:
        """R_k = |centre_k| + r_k : la boîte [−R, R] contient le support."""
        return np.abs(np.asarray(self.centers)) + np.asarray(self.radii)

    def numeric(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        u = (points - np.asarray(self.centers)) / np.asarray(self.radii)
        return self.scale * np.prod(bump(u), axis=1)

    def at_origin(self) -> float:
        return float(self.numeric(np.zeros((1, self.n)))[0])

    def reflect(self, theta: Sequence[int]) -> "Amplitude":
        """φ_θ(x) = φ(θx)."""
        return Amplitude(radii=self.radii, scale=self.scale,
                         centers=tuple(t * c for t, c in zip(theta, self.centers)))

    def to_dict(self) -> Dict[str, Any]:
        return {"radius": list(self.radii), "scale": self.scale, "center": list(self.centers)}


def octants(n: int) -> List[Tuple[int, ...]]:
    return [tuple(theta) for theta in product((1, -1), repeat=n)]


# ---------------------------------------------------------------------------
# Pôles candidats
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleCandidate:
    value: Fraction
    order_bound: int
    sources: Tuple[Dict[str, Any], ...]

    @property
    def from_facets(self) -> bool:
        return any(s["kind"] == "facet" for s in self.sources)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": str(self.value), "order_bound": self.order_bound,
                "sources": list(self.sources), "subdivision_free": self.from_facets}


@dataclass(frozen=True)
class CandidatePoleSet:
    entries: Tuple[PoleCandidate, ...]
    beta_tilde: Fraction

    def values(self) -> List[Fraction]:
        return [e.value for e in self.entries]

    def to_dict(self) -> Dict[str, Any]:
        return {"beta_tilde": str(self.beta_tilde), "entries": [e.to_dict() for e in self.entries]}


def _card_A_lambda(annotations: Sequence[ConeAnnotation], lam: Fraction) -> int:
    """max_σ card A_λ(σ), A_λ(σ) = {j ∈ B(σ) : l(a^j)λ − ⟨a^j⟩ ∈ Z₊}."""
    best = 0
    for annotation in annotations:
        count = 0
        for j in annotation.B_set:
            value = annotation.l_values[j] * lam - sum(annotation.cone.skeleton[j])
            if value >= 0 and value.denominator == 1:
                count += 1
        best = max(best, count)
    return best


def candidate_poles(polyhedron: LatticePolyhedron, fan: Fan, nu_max: int, lambda_max: int,
                    annotations: Optional[Sequence[ConeAnnotation]] = None) -> CandidatePoleSet:
    """
    Pôles candidats {−(⟨a⟩+ν)/l(a)} ∪ {−1, …, −λ_max} avec bornes d'ordre.

    Args:
        polyhedron: Polyèdre de Newton
        fan: Subdivision unimodulaire Σ
        nu_max: ν maximal de la progression
        lambda_max: Entier négatif le plus petit listé

    Returns:
        CandidatePoleSet: Entrées triées par valeur décroissante

    Raises:
        DomainError: Aucun rayon avec l(a) > 0
    """
    if nu_max < 0 or lambda_max < 0:
        raise ValidationError("ν_max et λ_max doivent être positifs", field="nu_max")
    annotations = list(annotations) if annotations is not None else annotate_cones(fan, polyhedron)
    beta = beta_tilde(fan, polyhedron)
    n = polyhedron.dim_ambient
    d_inverse = -beta
    m = max(len(a.A_set) for a in annotations)
    facet_normals = {pair.a for pair in polyhedron.facets}
    l_values = {}
    for annotation in annotations:
        l_values.update(zip(annotation.cone.skeleton, annotation.l_values))

    sources: Dict[Fraction, List[Dict[str, Any]]] = {}
    for a in sorted(l_values):
        l = l_values[a]
        if l <= 0:
            continue
        kind = "facet" if a in facet_normals else "subdivision"
        for nu in range(nu_max + 1):
            value = Fraction(-(sum(a) + nu), l)
            sources.setdefault(value, []).append({"kind": kind, "ray": list(a), "nu": nu})
    for lam in range(1, lambda_max + 1):
        sources.setdefault(Fraction(-lam), []).append({"kind": "negative-integer", "lambda": lam})

    ray_values = [v for v, s in sources.items() if any(e["kind"] != "negative-integer" for e in s)]
    if max(ray_values) != beta:
        raise ConsistencyError(f"Plus grand pôle {max(ray_values)} différent de β̃ = {beta}")

    entries = []
    for value in sorted(sources, reverse=True):
        lam = -value
        if lam == d_inverse:
            bound = m if lam.denominator != 1 else min(m + 1, n)
        elif lam.denominator == 1:
            if lam < d_inverse:
                bound = 1
            else:
                bound = min(_card_A_lambda(annotations, lam), n - 1) + 1
        else:
            bound = max(1, min(n, _card_A_lambda(annotations, lam)))
        entries.append(PoleCandidate(value=value, order_bound=bound, sources=tuple(sources[value])))
    logger.info(f"{len(entries)} pôles candidats, le plus grand {entries[0].value}")
    return CandidatePoleSet(entries=tuple(entries), beta_tilde=beta)


# ---------------------------------------------------------------------------
# Hypothèses
# ---------------------------------------------------------------------------

def _support_samples(amplitude: Amplitude, count: int, seed: Optional[int]) -> np.ndarray:
    rng = np.random.default_rng(get("numerics.seed", 12345) if seed is None else seed)
    return rng.uniform(amplitude.lower, amplitude.upper, size=(count, amplitude.n))


def sign_definite(f: FunctionSpec, amplitude: Amplitude, count: Optional[int] = None,
                  seed: Optional[int] = None) -> bool:
    """f ≥ 0 ou f ≤ 0 sur les points échantillonnés du support de φ."""
    points = _support_samples(amplitude, count or 10 * get("numerics.sample_points", 200), seed)
    values = np.real(f.numeric(points))
    return bool(np.all(values >= 0) or np.all(values <= 0))


def principal_part_nonvanishing(analysis: "PhaseAnalysis", amplitude: Amplitude,
                                count: Optional[int] = None, seed: Optional[int] = None) -> bool:
    """f_τ* ne s'annule pas (signe constant par orthant) sur les points échantillonnés."""
    if not analysis.tau_on_certifying:
        return False
    f_tau = gamma_part(analysis.f, analysis.tau, analysis.polyhedron)
    if f_tau.is_zero:
        return False
    points = _support_samples(amplitude, count or 10 * get("numerics.sample_points", 200), seed)
    points = points[np.all(points != 0.0, axis=1)]
    values = np.real(f_tau.numeric(points))
    orthant = np.sign(points)
    for theta in octants(analysis.f.n):
        mask = np.all(orthant == np.asarray(theta), axis=1)
        chunk = values[mask]
        if chunk.size and not (np.all(chunk > 0) or np.all(chunk < 0)):
            return False
    return True


def check_hypotheses(analysis: "PhaseAnalysis", amplitude: Amplitude,
                     assume_nondegenerate: bool = False, seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Vérifie les hypothèses du calcul des coefficients dominants.

    Returns:
        Dict: hypothèses satisfaites et provenance ("exact", "numeric"
        ou "conditional" si la non-dégénérescence est inconnue)

    Raises:
        HypothesisError: Représentation non certifiée Ê(U), face dégénérée,
            ou aucune des hypothèses (d > 1, signe constant, f_τ* non nulle)
    """
    membership = analysis.membership
    if membership.verdict is not Verdict.EHAT:
        raise HypothesisError("La phase n'est pas certifiée dans Ê(U)",
                              reasons={"membership": membership.verdict.value,
                                       "witness": membership.witness})
    report = analysis.nondegeneracy
    status = report.verdict if report is not None else FaceStatus.UNKNOWN
    if status is FaceStatus.REFUTED and not assume_nondegenerate:
        raise HypothesisError("Phase dégénérée", reasons=report.to_dict())
    provenance = "numeric" if status is FaceStatus.VERIFIED else "conditional"

    satisfied = []
    if analysis.d > 1:
        satisfied.append("d>1")
    if sign_definite(analysis.f, amplitude, seed=seed):
        satisfied.append("sign-definite")
    if principal_part_nonvanishing(analysis, amplitude, seed=seed):
        satisfied.append("principal-part-nonvanishing")
    if not satisfied:
        raise HypothesisError("Aucune hypothèse du calcul des coefficients n'est satisfaite",
                              reasons={"d": str(analysis.d), "checked": [
                                  "d>1", "sign-definite", "principal-part-nonvanishing"]})
    if analysis.m < analysis.f.n and analysis.tau.compact and analysis.d <= 1:
        raise HypothesisError("Intégrale du coefficient divergente: face principale compacte et d ≤ 1",
                              reasons={"d": str(analysis.d), "m": analysis.m})
    return {"satisfied": satisfied, "provenance": provenance}


# ---------------------------------------------------------------------------
# Coefficients dominants
# ---------------------------------------------------------------------------

FORMS = ("chart", "principal", "compact", "derivative")


def _signed_power(values: np.ndarray, exponent: float, sign: int) -> np.ndarray:
    """(sign·v)_+^(−exponent), avec la convention 0^(−exponent) = 0."""
    v = sign * np.real(values)
    positive = v > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        powered = np.where(positive, np.abs(v), 1.0) ** (-exponent)
    return np.where(positive, powered, 0.0)


@dataclass(frozen=True)
class OctantCoefficient:
    theta: Tuple[int, ...]
    c_plus: float
    c_minus: float
    error: float

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": list(self.theta), "C_tilde_plus": self.c_plus,
                "C_tilde_minus": self.c_minus, "error": self.error}


@dataclass(frozen=True)
class LeadingCoeffData:
    """Données du coefficient de (s + 1/d)^(−m) dans Z_±(s; φ)."""

    annotation: ConeAnnotation
    d: Fraction
    m: int
    L_sigma: Fraction
    M: Dict[int, Fraction]
    form: str
    octants: Tuple[OctantCoefficient, ...]
    hypotheses: Tuple[str, ...]
    provenance: str

    @property
    def C_plus(self) -> float:
        return float(sum(o.c_plus for o in self.octants))

    @property
    def C_minus(self) -> float:
        return float(sum(o.c_minus for o in self.octants))

    @property
    def C(self) -> float:
        return self.C_plus + self.C_minus

    @property
    def error(self) -> float:
        return float(sum(o.error for o in self.octants))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": [list(a) for a in self.annotation.cone.skeleton],
            "A": sorted(j + 1 for j in self.annotation.A_set),
            "L_sigma": str(self.L_sigma),
            "M": {str(j + 1): str(v) for j, v in sorted(self.M.items())},
            "form": self.form,
            "octants": [o.to_dict() for o in self.octants],
            "C_plus": [self.C_plus, 0.0],
            "C_minus": [self.C_minus, 0.0],
            "C": [self.C, 0.0],
            "quad_error": self.error,
            "hypotheses": list(self.hypotheses),
            "provenance": self.provenance,
        }


def select_cone(analysis: "PhaseAnalysis", cone_index: Optional[int] = None) -> ConeAnnotation:
    """
    Cône σ ∈ Σ*^(n) : le premier par défaut, sinon le cône maximal numéro
    cone_index (compté à partir de 1 dans l'ordre du rapport `fan`).
    """
    if cone_index is None:
        for annotation in analysis.annotations:
            if annotation.in_sigma_star:
                return annotation
        raise DomainError("Σ* vide")
    if not 1 <= cone_index <= len(analysis.annotations):
        raise ValidationError(f"Indice de cône {cone_index} hors de 1..{len(analysis.annotations)}",
                              field="cone", value=cone_index)
    annotation = analysis.annotations[cone_index - 1]
    if not annotation.in_sigma_star:
        raise ValidationError(f"Le cône {cone_index} n'appartient pas à Σ*", field="cone",
                              value=cone_index)
    return annotation


def _closed_form(analysis: "PhaseAnalysis", f_theta: FunctionSpec, annotation: ConeAnnotation,
                 phi0: float, L: Fraction, form: str) -> Tuple[float, float]:
    """Cas m = n : formules fermées sans quadrature."""
    exponent = float(1 / analysis.d)
    if form == "chart":
        chart = build_chart(f_theta, annotation.cone, analysis.polyhedron)
        value = float(sympy.re(sympy.N(chart.f_sigma_at_0)))
        factor = 1.0
    elif form in ("principal", "compact"):
        f_tau = gamma_part(f_theta, analysis.tau, analysis.polyhedron)
        value = float(np.real(f_tau.numeric(np.ones((1, f_theta.n)))[0]))
        factor = 1.0
    else:
        d = int(analysis.d)
        expression = f_theta.expression
        for x in f_theta.symbols:
            expression = sympy.diff(expression, x, d)
        value = float(sympy.re(sympy.N(expression.subs({x: 0 for x in f_theta.symbols}))))
        factor = float(math.factorial(d)) ** (f_theta.n / float(analysis.d))
    values = np.array([value])
    plus = float(L) * factor * phi0 * _signed_power(values, exponent, 1)[0]
    minus = float(L) * factor * phi0 * _signed_power(values, exponent, -1)[0]
    return plus, minus


def _octant_integral(analysis: "PhaseAnalysis", f_theta: FunctionSpec, phi_theta: Amplitude,
                     annotation: ConeAnnotation, L: Fraction, M: Dict[int, Fraction], form: str,
                     tolerance: float, max_boxes: Optional[int]) -> CubatureResult:
    """
    Intégrale sur R₊^(n−m) des coordonnées libres j ∉ A(σ), après les
    changements y = v^(1/(M+1)) puis v = u/(1−u). Les parties réelle et
    imaginaire du résultat portent respectivement C̃₊ et C̃₋.
    """
    n = f_theta.n
    A = sorted(annotation.A_set)
    free = [j for j in range(n) if j not in annotation.A_set]
    exponent = float(1 / analysis.d)
    chart = build_chart(f_theta, annotation.cone, analysis.polyhedron)
    # y^(⟨a⟩−1) = y^M·y^(l/d) pour les coordonnées libres
    extra = np.array([float(annotation.l_values[j] / analysis.d) for j in free])
    powers = np.array([float(M[j]) + 1.0 for j in free])
    phi0 = phi_theta.at_origin()
    f_tau = gamma_part(f_theta, analysis.tau, analysis.polyhedron) if form != "chart" else None

    def integrand(u: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            v = u / (1.0 - u)
            y_free = v ** (1.0 / powers)
            # y^M dy = dv/(M+1), dv = du/(1−u)²
            jac = np.prod(1.0 / powers / (1.0 - u) ** 2, axis=1)
            y = np.zeros((u.shape[0], n))
            y[:, free] = y_free
            x = chart.map.forward(y)
            amp = phi0 * np.ones(u.shape[0]) if form == "compact" else phi_theta.numeric(x)
            live = amp != 0.0
            plus = np.zeros(u.shape[0])
            minus = np.zeros(u.shape[0])
            if not np.any(live):
                return plus + 1j * minus
            if form == "chart":
                g = chart.numeric(y[live])
                weight = np.ones(int(np.sum(live)))
            else:
                y1 = y[live].copy()
                y1[:, A] = 1.0
                g = f_tau.numeric(chart.map.forward(y1))
                weight = np.prod(y_free[live] ** extra, axis=1)
            base = float(L) * amp[live] * weight * jac[live]
            plus[live] = base * _signed_power(g, exponent, 1)
            minus[live] = base * _signed_power(g, exponent, -1)
            values = plus + 1j * minus
        return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)

    dims = len(free)
    return adaptive_cubature(integrand, [0.0] * dims, [1.0] * dims, tolerance, max_boxes)


def leading_zeta_coefficients(analysis: "PhaseAnalysis", amplitude: Amplitude, form: str = "chart",
                              tolerance: Optional[float] = None, max_boxes: Optional[int] = None,
                              cone_index: Optional[int] = None, assume_nondegenerate: bool = False,
                              seed: Optional[int] = None) -> LeadingCoeffData:
    """
    Calcule C̃_±(f_θ, φ_θ) pour les 2ⁿ octants et C_± = Σ_θ C̃_±.

    m < n : quadrature de dimension n − m sur les coordonnées j ∉ A(σ) ;
    m = n : formules fermées. Les formes "chart", "principal", "compact"
    et "derivative" donnent la même valeur quand elles s'appliquent.

    Raises:
        HypothesisError: Hypothèse non certifiée
        DomainError: Forme inapplicable
        NumericBudgetError: Quadrature non convergée
    """
    if form not in FORMS:
        raise ValidationError(f"Forme inconnue {form!r}, attendu {FORMS}", field="form", value=form)
    hypotheses = check_hypotheses(analysis, amplitude, assume_nondegenerate, seed)
    annotation = select_cone(analysis, cone_index)
    tolerance = tolerance or get("numerics.tolerance", 1e-6)
    n, m, d = analysis.f.n, analysis.m, analysis.d
    if form == "derivative" and m != n:
        raise DomainError("La forme par dérivées suppose m = n")
    if form == "compact" and not analysis.tau.compact:
        raise DomainError("La forme compacte suppose une face principale compacte")

    L = Fraction(1)
    for j in annotation.A_set:
        L /= annotation.l_values[j]
    M = {j: Fraction(-annotation.l_values[j]) / d + sum(annotation.cone.skeleton[j]) - 1
         for j in range(n) if j not in annotation.A_set}

    coefficients = []
    if amplitude.scale == 0.0:
        coefficients = [OctantCoefficient(theta, 0.0, 0.0, 0.0) for theta in octants(n)]
        provenance = "exact"
    else:
        provenance = "exact" if m == n else hypotheses["provenance"]
        if m == n and hypotheses["provenance"] == "conditional":
            provenance = "conditional"
        for theta in octants(n):
            f_theta = analysis.f.reflect(theta)
            phi_theta = amplitude.reflect(theta)
            if m == n:
                plus, minus = _closed_form(analysis, f_theta, annotation, phi_theta.at_origin(), L, form)
                coefficients.append(OctantCoefficient(theta, plus, minus, 0.0))
                continue
            result = _octant_integral(analysis, f_theta, phi_theta, annotation, L, M, form,
                                      tolerance / len(octants(n)), max_boxes)
            coefficients.append(OctantCoefficient(theta, float(np.real(result.value)),
                                                  float(np.imag(result.value)), result.error))
            logger.debug(f"Octant {theta}: C̃₊ = {np.real(result.value):.6g}, "
                         f"C̃₋ = {np.imag(result.value):.6g}")
    data = LeadingCoeffData(annotation=annotation, d=d, m=m, L_sigma=L, M=M, form=form,
                            octants=tuple(coefficients), hypotheses=tuple(hypotheses["satisfied"]),
                            provenance=provenance)
    logger.info(f"Coefficients dominants ({form}): C₊ = {data.C_plus:.6g}, C₋ = {data.C_minus:.6g}")
    return data


# ---------------------------------------------------------------------------
# Terme oscillant dominant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OscLeadingTerm:
    exponent: Fraction
    log_power: int
    coefficient: complex

    def to_dict(self) -> Dict[str, Any]:
        return {"exponent": str(self.exponent), "log_power": self.log_power,
                "coefficient": [self.coefficient.real, self.coefficient.imag]}


def osc_leading_term(data: LeadingCoeffData, d: Fraction, m: int) -> OscLeadingTerm:
    """
    I(t) ~ coefficient·t^(−1/d)·(log t)^(m−1) avec
    coefficient = Γ(1/d)/(m−1)!·[e^{iπ/(2d)}C₊ + e^{−iπ/(2d)}C₋].
    """
    inverse = float(1 / d)
    prefactor = gamma_function(inverse) / math.factorial(m - 1)
    phase = np.exp(1j * np.pi * inverse / 2)
    coefficient = prefactor * (phase * data.C_plus + np.conj(phase) * data.C_minus)
    return OscLeadingTerm(exponent=-1 / d, log_power=m - 1, coefficient=complex(coefficient))


def oscillation_statement(analysis: "PhaseAnalysis", amplitude: Amplitude,
                          seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Borne |I(t)| ≤ C·t^(−1/d)·(log t)^(m−1) et conditions suffisantes
    pour β = −1/d et η = m : (a) d > 1, (b) f de signe constant,
    (c) 1/d non entier impair et f_τ* non nulle sur le tore.
    """
    d, m = analysis.d, analysis.m
    inverse = 1 / d
    reasons = []
    if d > 1:
        reasons.append("d>1")
    if sign_definite(analysis.f, amplitude, seed=seed):
        reasons.append("sign-definite")
    odd_integer = inverse.denominator == 1 and inverse.numerator % 2 == 1
    if not odd_integer and principal_part_nonvanishing(analysis, amplitude, seed=seed):
        reasons.append("principal-part-nonvanishing")
    nondegenerate = analysis.nondegeneracy.verdict.value if analysis.nondegeneracy else "unknown"
    applies = analysis.membership.certified and nondegenerate != "refuted"
    provenance = "numeric" if nondegenerate == "verified" else "conditional"
    return {
        "bound": f"|I(t)| <= C t^(-{inverse}) (log t)^{m - 1}",
        "beta": str(-inverse),
        "eta": m,
        "applies": applies,
        "sharp": applies and bool(reasons),
        "reasons": reasons,
        "nondegeneracy": nondegenerate,
        "provenance": provenance,
    }


# ---------------------------------------------------------------------------
# Intégrales numériques directes
# ---------------------------------------------------------------------------

def amplitude_integral(amplitude: Amplitude, tolerance: Optional[float] = None) -> CubatureResult:
    tolerance = tolerance or get("numerics.tolerance", 1e-6)
    return adaptive_cubature(amplitude.numeric, amplitude.lower, amplitude.upper, tolerance)


def numeric_zeta(analysis: "PhaseAnalysis", amplitude: Amplitude, s: float,
                 tolerance: Optional[float] = None, max_boxes: Optional[int] = None) -> CubatureResult:
    """
    Z(s; φ) = ∫ |f|^s φ dx pour s > −1/d.

    Chaque octant est ramené à (0, 1]ⁿ par x = θ·R·u, puis (0, 1]ⁿ est pavé
    par les images π(σ)((0, 1]ⁿ) des cônes maximaux ; dans une carte
    l'intégrande vaut ∏ y_j^(l_j s + ⟨a^j⟩ − 1)·|f_σ(y)|^s·φ(π(y)) et chaque
    facteur y^e est absorbé par y = v^(1/(e+1)).

    Raises:
        DomainError: s ≤ −1/d
    """
    tolerance = tolerance or get("numerics.tolerance", 1e-6)
    d = analysis.d
    if not np.isfinite(s):
        raise DomainError(f"s non fini: {s}")
    if s <= float(-1 / d):
        raise DomainError(f"s = {s} hors de la région de convergence s > −1/d = {-1 / d}")
    if s == 0.0:
        return amplitude_integral(amplitude, tolerance)
    if amplitude.scale == 0.0:
        return CubatureResult(0.0, 0.0, 0)

    n = analysis.f.n
    R = amplitude.box_radius
    volume = float(np.prod(R))
    pieces = [(theta, a) for theta in octants(n) for a in analysis.annotations]
    total, error, boxes = 0.0, 0.0, 0
    for theta, annotation in pieces:
        f_scaled = analysis.f.reflect(theta).rescale(tuple(float(r) for r in R))
        chart = build_chart(f_scaled, annotation.cone, analysis.polyhedron)
        exponents = np.array([l * s + sum(a) - 1.0 for a, l in
                              zip(annotation.cone.skeleton, annotation.l_values)])
        powers = exponents + 1.0
        theta_R = np.asarray(theta, dtype=float) * R

        def integrand(v: np.ndarray, chart=chart, powers=powers, theta_R=theta_R) -> np.ndarray:
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                y = v ** (1.0 / powers)
                jac = 1.0 / np.prod(powers)
                amp = amplitude.numeric(theta_R * chart.map.forward(y))
                values = np.zeros(v.shape[0])
                live = amp != 0.0
                if np.any(live):
                    g = np.abs(np.real(chart.numeric(y[live])))
                    values[live] = np.where(g > 0, g ** s, 0.0) * amp[live] * jac
            return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)

        result = adaptive_cubature(integrand, [0.0] * n, [1.0] * n,
                                   tolerance / (volume * len(pieces)), max_boxes)
        total += volume * result.value
        error += volume * result.error
        boxes += result.boxes
    logger.info(f"Z({s}) = {total:.8g} ± {error:.2e} ({boxes} boîtes)")
    return CubatureResult(float(np.real(total)), float(error), boxes)


def extrapolate_to_pole(analysis: "PhaseAnalysis", amplitude: Amplitude,
                        epsilons: Sequence[float] = (0.05, 0.02, 0.01),
                        tolerance: Optional[float] = None) -> Dict[str, Any]:
    """
    Extrapolation de Richardson de ε^m·Z(−1/d + ε) vers ε = 0.
    """
    d, m = analysis.d, analysis.m
    samples = []
    for eps in epsilons:
        result = numeric_zeta(analysis, amplitude, float(-1 / d) + eps, tolerance)
        samples.append((eps, eps ** m * result.value))
    eps = np.array([e for e, _ in samples])
    values = np.array([v for _, v in samples])
    coefficients = np.polyfit(eps, values, len(samples) - 1)
    limit = float(np.polyval(coefficients, 0.0))
    logger.info(f"Extrapolation ε^m·Z(−1/d + ε) → {limit:.6g}")
    return {"limit": limit, "samples": [[float(e), float(v)] for e, v in samples]}


@dataclass(frozen=True)
class OscSample:
    t: float
    value: complex
    error: float
    conjugate_residual: float
    boxes: int

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "value": [self.value.real, self.value.imag], "error": self.error,
                "conjugate_residual": self.conjugate_residual, "boxes": self.boxes}


def numeric_osc(f: FunctionSpec, amplitude: Amplitude, t: float,
                tolerance: Optional[float] = None, max_boxes: Optional[int] = None) -> OscSample:
    """
    I(t; φ) = ∫ e^{i t f(x)} φ(x) dx, avec I(−t) calculé dans la même passe
    pour le contrôle I(−t) = conj(I(t)).

    Raises:
        DomainError: t négatif ou non fini
        NumericBudgetError: Budget épuisé
    """
    if not np.isfinite(t) or t < 0:
        raise DomainError(f"t doit être fini et ≥ 0: {t}")
    tolerance = tolerance or get("numerics.osc_tolerance", 1e-5)
    if t == 0.0:
        result = amplitude_integral(amplitude, tolerance)
        value = complex(result.value)
        return OscSample(0.0, value, result.error, 0.0, result.boxes)
    gradients = f.numeric_gradient

    def gradient(points: np.ndarray) -> np.ndarray:
        return np.column_stack([np.real(g(points)) for g in gradients])

    def phase(points: np.ndarray) -> np.ndarray:
        return np.real(f.numeric(points))

    plus, minus = oscillatory_cubature(phase, gradient, amplitude.numeric, amplitude.lower,
                                       amplitude.upper, t, tolerance, max_boxes)
    residual = abs(minus.value - np.conj(plus.value))
    logger.info(f"I({t}) = {plus.value:.6g} ± {plus.error:.1e}")
    return OscSample(float(t), complex(plus.value), plus.error, float(residual), plus.boxes)


def log_spaced(t_min: float, t_max: float, count: int) -> List[float]:
    return [float(t) for t in np.geomspace(t_min, t_max, count)]


@dataclass(frozen=True)
class DecayFit:
    beta_hat: float
    eta_hat: int
    residuals: Tuple[float, ...]
    slopes: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"beta_hat": self.beta_hat, "eta_hat": self.eta_hat,
                "residuals": list(self.residuals), "slopes": list(self.slopes)}


def fit_decay(samples: Sequence[Tuple[float, complex]], max_eta: int) -> DecayFit:
    """
    Régresse log|I| − η·log log t sur log t pour η = 0..max_eta et retient
    le η de plus petit résidu.

    Raises:
        ValidationError: Moins de min_samples points ou moins de min_decades décades
    """
    min_samples = get("fit.min_samples", 8)
    min_decades = get("fit.min_decades", 1.5)
    data = [(float(t), abs(complex(v))) for t, v in samples]
    if len(data) < min_samples:
        raise ValidationError(f"{len(data)} échantillons, au moins {min_samples} requis", field="samples")
    ts = np.array([t for t, _ in data])
    magnitudes = np.array([a for _, a in data])
    if np.any(ts <= 1.0) or np.any(magnitudes <= 0):
        raise ValidationError("Ajustement impossible: t ≤ 1 ou |I| nul", field="samples")
    decades = float(np.log10(ts.max() / ts.min()))
    if decades < min_decades:
        raise ValidationError(f"{decades:.2f} décades, au moins {min_decades} requises", field="samples")
    log_t = np.log(ts)
    residuals, slopes = [], []
    for eta in range(max_eta + 1):
        target = np.log(magnitudes) - eta * np.log(log_t)
        coefficients, residual, *_ = np.polyfit(log_t, target, 1, full=True)
        slopes.append(float(coefficients[0]))
        residuals.append(float(residual[0]) if len(residual) else 0.0)
    best = int(np.argmin(residuals))
    logger.info(f"Ajustement: β̂ = {slopes[best]:.4f}, η̂ = {best}")
    return DecayFit(beta_hat=slopes[best], eta_hat=best, residuals=tuple(residuals),
                    slopes=tuple(slopes))


def decay_table(samples: Sequence[OscSample]) -> pd.DataFrame:
    """Table (t, Re I, Im I, |I|, erreur) pour un tracé externe."""
    return pd.DataFrame({
        "t": [s.t for s in samples],
        "re": [s.value.real for s in samples],
        "im": [s.value.imag for s in samples],
        "abs": [abs(s.value) for s in samples],
        "error": [s.error for s in samples],
    })
