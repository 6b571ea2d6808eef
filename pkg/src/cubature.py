"""
Module de cubature adaptative.

Ce module fournit les règles de Gauss tensorielles sur des boîtes
dyadiques, une cubature adaptative globale (comparaison parent/enfants,
niveau par niveau) et la variante oscillante avec poids de Filon par axe
pour les intégrales ∫ φ(x)·exp(i t f(x)) dx.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.utils.config import get
from src.utils.error_handling import NumericBudgetError, ValidationError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
Box = Tuple[np.ndarray, np.ndarray]

# En dessous de cette largeur une boîte est acceptée telle quelle
MIN_WIDTH = 1e-12


@dataclass(frozen=True)
class CubatureResult:
    value: complex
    error: float
    boxes: int

    def to_dict(self):
        value = self.value
        if isinstance(value, complex) or np.iscomplexobj(value):
            value = [float(np.real(value)), float(np.imag(value))]
        else:
            value = float(value)
        return {"value": value, "error": self.error, "boxes": self.boxes}


def worker_count() -> int:
    """Nombre de threads (numerics.threads, surchargé par TORASC_THREADS)."""
    return max(1, int(get("numerics.threads", 4)))


@lru_cache(maxsize=None)
def gauss_rule(points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nœuds et poids de Gauss-Legendre sur [−1, 1]."""
    return leggauss(points)


@lru_cache(maxsize=None)
def tensor_rule(n: int, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Règle produit sur [−1, 1]ⁿ : nœuds (pointsⁿ, n) et poids (pointsⁿ,)."""
    nodes, weights = gauss_rule(points)
    grid = np.array(list(product(nodes, repeat=n)))
    w = np.array([np.prod(c) for c in product(weights, repeat=n)])
    return grid, w


def _box_estimate(integrand: Integrand, lower: np.ndarray, upper: np.ndarray, points: int):
    n = len(lower)
    nodes, weights = tensor_rule(n, points)
    center = (lower + upper) / 2
    half = (upper - lower) / 2
    values = integrand(center + nodes * half)
    return np.sum(weights * values) * np.prod(half)


def _children(lower: np.ndarray, upper: np.ndarray) -> List[Box]:
    mid = (lower + upper) / 2
    boxes = []
    for corner in product((0, 1), repeat=len(lower)):
        lo = np.where(np.array(corner) == 0, lower, mid)
        hi = np.where(np.array(corner) == 0, mid, upper)
        boxes.append((lo, hi))
    return boxes


def _initial_boxes(lower: np.ndarray, upper: np.ndarray, cells: int) -> List[Box]:
    edges = [np.linspace(lo, hi, cells + 1) for lo, hi in zip(lower, upper)]
    boxes = []
    for index in product(range(cells), repeat=len(lower)):
        lo = np.array([edges[k][i] for k, i in enumerate(index)])
        hi = np.array([edges[k][i + 1] for k, i in enumerate(index)])
        boxes.append((lo, hi))
    return boxes


def adaptive_cubature(integrand: Integrand, lower: Sequence[float], upper: Sequence[float],
                      tolerance: float, max_boxes: Optional[int] = None,
                      points: Optional[int] = None, initial_cells: int = 1) -> CubatureResult:
    """
    Cubature adaptative globale sur une boîte.

    Chaque boîte active est comparée à la somme de ses 2ⁿ enfants ; elle
    est acceptée quand l'écart est ≤ tolérance·(volume relatif). Les
    boîtes d'un même niveau sont évaluées en parallèle, la réduction suit
    l'ordre de l'arbre.

    Args:
        integrand: Fonction vectorisée (N, n) -> (N,)
        lower: Bornes inférieures
        upper: Bornes supérieures
        tolerance: Erreur absolue visée
        max_boxes: Nombre maximal de boîtes évaluées
        points: Points de Gauss par axe
        initial_cells: Découpage initial par axe

    Returns:
        CubatureResult: Valeur, erreur estimée, nombre de boîtes

    Raises:
        ValidationError: Tolérance ou budget non positifs
        NumericBudgetError: Budget épuisé avant la tolérance
    """
    if tolerance <= 0:
        raise ValidationError(f"Tolérance non positive: {tolerance}", field="tolerance", value=tolerance)
    max_boxes = max_boxes if max_boxes is not None else get("numerics.max_boxes", 200000)
    if max_boxes <= 0:
        raise ValidationError(f"Budget non positif: {max_boxes}", field="max_boxes", value=max_boxes)
    points = points or get("numerics.gauss_points", 4)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    total_volume = float(np.prod(upper - lower))
    if total_volume == 0.0:
        return CubatureResult(0.0, 0.0, 0)

    active = [(lo, hi, _box_estimate(integrand, lo, hi, points))
              for lo, hi in _initial_boxes(lower, upper, initial_cells)]
    boxes = len(active)
    accepted_value = 0.0
    accepted_error = 0.0
    level = 0

    def refine(item):
        lo, hi, parent = item
        children = [(c_lo, c_hi, _box_estimate(integrand, c_lo, c_hi, points))
                    for c_lo, c_hi in _children(lo, hi)]
        return parent, children

    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        while active:
            level += 1
            results = list(executor.map(refine, active))
            boxes += sum(len(children) for _, children in results)
            next_active = []
            pending_value = 0.0
            pending_error = 0.0
            for (lo, hi, _), (parent, children) in zip(active, results):
                refined = sum(c[2] for c in children)
                error = abs(parent - refined)
                share = tolerance * float(np.prod(hi - lo)) / total_volume
                if error <= share or np.max(hi - lo) < MIN_WIDTH:
                    accepted_value += refined
                    accepted_error += error
                else:
                    next_active.extend(children)
                    pending_value += refined
                    pending_error += error
            logger.debug(f"Cubature niveau {level}: {len(next_active)} boîtes actives, {boxes} évaluées")
            if next_active and boxes + len(next_active) * 2 ** len(lower) > max_boxes:
                raise NumericBudgetError(
                    f"Budget de cubature épuisé ({boxes} boîtes)",
                    estimate=complex(accepted_value + pending_value) if np.iscomplexobj(pending_value)
                    else float(accepted_value + pending_value),
                    error=float(accepted_error + pending_error),
                    boxes=boxes,
                )
            active = next_active

    logger.debug(f"Cubature convergée: erreur {accepted_error:.3e}, {boxes} boîtes")
    return CubatureResult(accepted_value, float(accepted_error), boxes)


# ---------------------------------------------------------------------------
# Intégrales oscillantes
# ---------------------------------------------------------------------------

def filon_moments(omega: float, degree: int) -> np.ndarray:
    """μ_k = ∫_{−1}^{1} u^k e^{iωu} du pour k = 0..degree (récurrence montante)."""
    moments = np.zeros(degree + 1, dtype=complex)
    moments[0] = 2 * np.sin(omega) / omega
    plus, minus = np.exp(1j * omega), np.exp(-1j * omega)
    for k in range(1, degree + 1):
        moments[k] = (plus - (-1) ** k * minus) / (1j * omega) - k / (1j * omega) * moments[k - 1]
    return moments


def filon_weights(omega: float, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Poids w tels que Σ w_q p(u_q) = ∫_{−1}^{1} p(u) e^{iωu} du pour tout p de
    degré < points, aux nœuds de Gauss ; Gauss simple pour |ω| ≤ 4.
    """
    nodes, weights = gauss_rule(points)
    if abs(omega) <= 4.0:
        return nodes, weights * np.exp(1j * omega * nodes)
    vandermonde = np.vander(nodes, points, increasing=True).T
    return nodes, np.linalg.solve(vandermonde, filon_moments(omega, points - 1))


def oscillatory_cubature(phase: Integrand, gradient: Integrand, amplitude: Integrand,
                         lower: Sequence[float], upper: Sequence[float], t: float,
                         tolerance: float, max_boxes: Optional[int] = None,
                         points: Optional[int] = None, initial_cells: Optional[int] = None,
                         phase_tolerance: Optional[float] = None) -> Tuple[CubatureResult, CubatureResult]:
    """
    ∫ φ(x)·e^{±i t f(x)} dx sur une boîte par cellules de Filon.

    Dans chaque cellule f est linéarisé au centre ; le reste
    φ·exp(i t (f − linéaire)) est intégré par Gauss et le facteur linéaire
    exactement par les poids de Filon. Une cellule est coupée tant que
    t·max|f − linéaire| dépasse la tolérance de phase, puis selon l'écart
    parent/enfants.

    Args:
        phase: f vectorisée
        gradient: ∇f vectorisé (N, n) -> (N, n)
        amplitude: φ vectorisée
        lower: Bornes inférieures
        upper: Bornes supérieures
        t: Paramètre d'oscillation (≥ 0)

    Returns:
        Tuple: Résultats pour +t et −t
    """
    max_boxes = max_boxes if max_boxes is not None else get("numerics.max_boxes", 200000)
    points = points or get("numerics.filon_points", 8)
    initial_cells = initial_cells or get("numerics.initial_cells", 16)
    delta = phase_tolerance if phase_tolerance is not None else get("numerics.phase_tolerance", 3.0)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = len(lower)
    total_volume = float(np.prod(upper - lower))
    nodes, _ = gauss_rule(points)
    grid = np.array(list(product(nodes, repeat=n)))

    def cell(lo: np.ndarray, hi: np.ndarray):
        """(I(+t), I(−t), écart de linéarisation) sur une cellule."""
        center = (lo + hi) / 2
        half = (hi - lo) / 2
        xs = center + grid * half
        amp = amplitude(xs)
        if not np.any(amp):
            return 0j, 0j, 0.0
        f_center = phase(center[None, :])[0]
        g = gradient(center[None, :])[0]
        linear = f_center + (xs - center) @ g
        values = phase(xs)
        deviation = float(np.max(np.abs(values - linear))) if t else 0.0
        residual = amp * np.exp(1j * t * (values - linear))
        residual_minus = amp * np.exp(-1j * t * (values - linear))
        w_plus = np.ones(len(xs), dtype=complex)
        w_minus = np.ones(len(xs), dtype=complex)
        for k in range(n):
            omega = t * g[k] * half[k]
            _, wk = filon_weights(omega, points)
            _, wk_minus = filon_weights(-omega, points)
            index = np.searchsorted(nodes, grid[:, k])
            w_plus = w_plus * wk[index]
            w_minus = w_minus * wk_minus[index]
        scale = np.prod(half)
        plus = np.exp(1j * t * f_center) * scale * np.sum(w_plus * residual)
        minus = np.exp(-1j * t * f_center) * scale * np.sum(w_minus * residual_minus)
        return plus, minus, t * deviation

    def refine(item):
        lo, hi = item[0], item[1]
        return [(c_lo, c_hi, *cell(c_lo, c_hi)) for c_lo, c_hi in _children(lo, hi)]

    active = [(lo, hi, *cell(lo, hi)) for lo, hi in _initial_boxes(lower, upper, initial_cells)]
    boxes = len(active)
    total_plus = total_minus = 0j
    error_plus = error_minus = 0.0
    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        while active:
            results = list(executor.map(refine, active))
            boxes += sum(len(children) for children in results)
            next_active = []
            for (lo, hi, plus, minus, deviation), children in zip(active, results):
                refined_plus = sum(c[2] for c in children)
                refined_minus = sum(c[3] for c in children)
                err_plus = abs(plus - refined_plus)
                err_minus = abs(minus - refined_minus)
                share = tolerance * float(np.prod(hi - lo)) / total_volume
                resolved = deviation <= delta and max(err_plus, err_minus) <= share
                if resolved or np.max(hi - lo) < MIN_WIDTH:
                    total_plus += refined_plus
                    total_minus += refined_minus
                    error_plus += err_plus
                    error_minus += err_minus
                else:
                    next_active.extend(children)
            if next_active and boxes + len(next_active) * 2 ** n > max_boxes:
                raise NumericBudgetError(
                    f"Budget de cubature oscillante épuisé à t = {t} ({boxes} boîtes)",
                    estimate=complex(total_plus + sum(c[2] for c in next_active)),
                    error=float(error_plus + sum(abs(c[2]) for c in next_active)),
                    boxes=boxes,
                )
            active = next_active
    logger.debug(f"Cubature oscillante t = {t}: {boxes} boîtes, erreur {error_plus:.3e}")
    return (CubatureResult(complex(total_plus), float(error_plus), boxes),
            CubatureResult(complex(total_minus), float(error_minus), boxes))
