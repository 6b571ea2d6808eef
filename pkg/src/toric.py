"""
Module des cartes toriques.

Ce module gère les applications monomiales π(σ), leurs jacobiens, la
construction de f_σ avec le monôme factorisé, les identités de contrôle
(carte, γ-partie, Euler, commutation) et le test de non-dégénérescence
sur les faces compactes.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations, product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from mpmath import iv
from scipy.optimize import least_squares

from src.fan import Cone, gamma_of, vertex_of
from src.funcspec import (FunctionSpec, compile_expression, factor_at_origin, format_terms,
                          gamma_part, is_nonzero_constant, print_expression, variables)
from src.geometry import (Face, LatticePolyhedron, LatticeVector, ValidPair, dot,
                          enumerate_faces, l_value)
from src.utils.config import get
from src.utils.error_handling import ConsistencyError, DomainError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(get("numerics.seed", 12345) if seed is None else seed)


def _torus_points(rng: np.random.Generator, count: int, n: int,
                  low: float = 0.05, high: float = 1.0) -> np.ndarray:
    """Points aléatoires à coordonnées |y_j| ∈ [low, high] de signes aléatoires."""
    magnitude = rng.uniform(low, high, size=(count, n))
    signs = rng.choice([-1.0, 1.0], size=(count, n))
    return magnitude * signs


# ---------------------------------------------------------------------------
# Applications monomiales
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialMap:
    """
    Application x_k = ∏_j y_j^(A[k][j]), les colonnes de A étant le squelette de σ.
    """

    matrix: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_cone(cls, cone: Cone) -> "MonomialMap":
        """
        Raises:
            DomainError: Cône non maximal ou non unimodulaire
        """
        if not cone.skeleton or not cone.simplicial or cone.dim != cone.n:
            raise DomainError(f"Cône non maximal: {cone.skeleton}")
        if not cone.unimodular:
            raise DomainError(f"Cône non unimodulaire: {cone.skeleton}")
        n = cone.n
        return cls(matrix=tuple(tuple(cone.skeleton[j][k] for j in range(n)) for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def determinant(self) -> int:
        return int(sympy.Matrix(self.matrix).det())

    @cached_property
    def inverse_matrix(self) -> Tuple[Tuple[int, ...], ...]:
        inverse = sympy.Matrix(self.matrix).inv()
        return tuple(tuple(int(c) for c in inverse.row(j)) for j in range(self.n))

    def symbolic(self, ys: Sequence[sympy.Symbol]) -> List[sympy.Expr]:
        return [sympy.Mul(*(y ** e for y, e in zip(ys, row))) for row in self.matrix]

    def forward(self, y: np.ndarray) -> np.ndarray:
        """Image de points (N, n) ; 0⁰ = 1 pour les coordonnées nulles."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        x = np.ones_like(y)
        for k, row in enumerate(self.matrix):
            for j, e in enumerate(row):
                if e:
                    x[:, k] *= y[:, j] ** e
        return x

    def inverse(self, x: np.ndarray) -> np.ndarray:
        """
        Inverse sur l'orthant positif : y_j = ∏_k x_k^(A⁻¹[j][k]).

        Raises:
            DomainError: Point hors de l'orthant ouvert
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if np.any(x <= 0):
            raise DomainError("Inverse défini seulement hors des hyperplans de coordonnées (x > 0)")
        logs = np.log(x) @ np.asarray(self.inverse_matrix, dtype=float).T
        return np.exp(logs)

    def display(self, prefix: str = "y") -> str:
        parts = []
        for row in self.matrix:
            text = "*".join(f"{prefix}{j + 1}" if e == 1 else f"{prefix}{j + 1}^{e}"
                            for j, e in enumerate(row) if e)
            parts.append(text or "1")
        return "(" + ", ".join(parts) + ")"


def monomial_map(cone: Cone) -> MonomialMap:
    return MonomialMap.from_cone(cone)


def jacobian(cone: Cone) -> Tuple[Tuple[int, ...], int]:
    """
    Jacobien J = sign·∏ y_j^(⟨a^j⟩−1).

    Returns:
        Tuple: (exposants, signe du déterminant)
    """
    mapping = monomial_map(cone)
    exponents = tuple(sum(a) - 1 for a in cone.skeleton)
    return exponents, (1 if mapping.determinant > 0 else -1)


def jacobian_check(cone: Cone, seed: Optional[int] = None, samples: int = 50,
                   step: float = 1e-6) -> float:
    """
    Erreur relative max entre |J| et le jacobien par différences finies,
    en des y ∈ [0.2, 1.5]ⁿ.
    """
    mapping = monomial_map(cone)
    exponents, _ = jacobian(cone)
    rng = _rng(seed)
    n = mapping.n
    worst = 0.0
    for y in rng.uniform(0.2, 1.5, size=(samples, n)):
        columns = []
        for j in range(n):
            shift = np.zeros(n)
            shift[j] = step
            columns.append((mapping.forward(y + shift)[0] - mapping.forward(y - shift)[0]) / (2 * step))
        numeric = abs(np.linalg.det(np.column_stack(columns)))
        exact = float(np.prod(y ** np.asarray(exponents, dtype=float)))
        worst = max(worst, abs(numeric - exact) / abs(exact))
    return worst


# ---------------------------------------------------------------------------
# Cartes de résolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolutionChart:
    """
    Carte π(σ) avec f∘π(σ)(y) = (∏ y_j^(l_j))·f_σ(y).

    `terms` contient, pour chaque exposant p de la représentation, le
    vecteur ⟨a^j, p⟩ − l_j et le facteur ψ_p∘π(σ) écrit en y.
    """

    cone: Cone
    map: MonomialMap
    l_vector: Tuple[int, ...]
    jacobian_exponents: Tuple[int, ...]
    jacobian_sign: int
    vertex: LatticeVector
    terms: Tuple[Tuple[Tuple[int, ...], sympy.Expr], ...]
    f_sigma_at_0: sympy.Expr

    @property
    def n(self) -> int:
        return self.map.n

    @property
    def symbols(self) -> Tuple[sympy.Symbol, ...]:
        return variables(self.n, "y")

    @cached_property
    def expression(self) -> sympy.Expr:
        ys = self.symbols
        return sympy.Add(*(sympy.Mul(*(y ** e for y, e in zip(ys, exps))) * factor
                           for exps, factor in self.terms))

    @cached_property
    def numeric(self) -> Callable:
        return compile_expression(self.expression, self.symbols)

    def restricted(self, indices: Sequence[int]) -> sympy.Expr:
        """f_σ(T_I y) : y_j = 0 pour j ∈ I."""
        return self.expression.subs({self.symbols[j]: 0 for j in indices})

    def display(self) -> str:
        return format_terms(self.terms, prefix="y")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "skeleton": [list(a) for a in self.cone.skeleton],
            "matrix": [list(row) for row in self.map.matrix],
            "map": self.map.display(),
            "l_vector": list(self.l_vector),
            "jacobian_exponents": list(self.jacobian_exponents),
            "jacobian_sign": self.jacobian_sign,
            "vertex": list(self.vertex),
            "f_sigma": self.display(),
            "f_sigma_at_0": print_expression(self.f_sigma_at_0),
            "f_sigma_at_0_value": float(sympy.re(sympy.N(self.f_sigma_at_0))),
        }


def build_chart(f: FunctionSpec, cone: Cone, polyhedron: LatticePolyhedron) -> ResolutionChart:
    """
    Construit f_σ(y) = Σ_p (∏_j y_j^(⟨a^j,p⟩ − l(a^j)))·ψ_p(π(σ)(y)).

    Args:
        f: Phase certifiée
        cone: Cône maximal unimodulaire de Σ
        polyhedron: Polyèdre certifiant (Γ₊(f) pour Ê(U))

    Returns:
        ResolutionChart: La carte avec f_σ(0) calculé exactement

    Raises:
        ConsistencyError: Exposant négatif ou f_σ(0) nul
    """
    mapping = monomial_map(cone)
    ls = tuple(l_value(a, polyhedron) for a in cone.skeleton)
    ys = variables(f.n, "y")
    substitution = dict(zip(f.symbols, mapping.symbolic(ys)))
    terms = []
    for p, factor in f.terms:
        exps = tuple(dot(a, p) - l for a, l in zip(cone.skeleton, ls))
        if any(e < 0 for e in exps):
            raise ConsistencyError(f"Exposant négatif {exps} pour p = {p} dans le cône {cone.skeleton}")
        terms.append((exps, factor.subs(substitution, simultaneous=True)))

    origin = {y: 0 for y in ys}
    value = sympy.Add(*(factor.subs(origin) for exps, factor in terms if not any(exps)))
    value = sympy.simplify(value)
    vertex = vertex_of(cone, polyhedron)
    expected = factor_at_origin(f.factor(vertex), f.symbols)
    gap = abs(complex(sympy.N(value - expected)))
    if gap > 1e-12 * (1 + abs(complex(sympy.N(expected)))) or not is_nonzero_constant(value):
        raise ConsistencyError(f"f_σ(0) = {value} incompatible avec ψ_p(σ)(0) = {expected}")
    exponents, sign = jacobian(cone)
    chart = ResolutionChart(cone=cone, map=mapping, l_vector=ls, jacobian_exponents=exponents,
                            jacobian_sign=sign, vertex=vertex, terms=tuple(terms),
                            f_sigma_at_0=value)
    logger.debug(f"Carte {mapping.display()} : l = {ls}, f_σ(0) = {value}")
    return chart


# ---------------------------------------------------------------------------
# Identités de contrôle
# ---------------------------------------------------------------------------

def chart_identity_check(f: FunctionSpec, chart: ResolutionChart, seed: Optional[int] = None,
                         samples: int = 200, y_max: float = 1.0) -> float:
    """max |f(π(y)) − ∏ y^l·f_σ(y)| / (1 + |f(π(y))|) sur des y de la carte."""
    rng = _rng(seed)
    y = _torus_points(rng, samples, chart.n, 0.05, y_max)
    lhs = f.numeric(chart.map.forward(y))
    prefactor = np.prod(y ** np.asarray(chart.l_vector, dtype=float), axis=1)
    rhs = prefactor * chart.numeric(y)
    return float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))))


def gamma_part_pullback_check(f: FunctionSpec, face: Face, chart: ResolutionChart,
                              indices: Sequence[int], polyhedron: LatticePolyhedron,
                              seed: Optional[int] = None, samples: int = 100) -> float:
    """
    max |f_γ(π(y)) − ∏ y^l·f_σ(T_I y)| / (1 + |f_γ(π(y))|), γ = γ(I, σ).

    Raises:
        DomainError: γ ≠ γ(I, σ)
    """
    if gamma_of(indices, chart.cone, polyhedron) != face:
        raise DomainError(f"{face.describe()} n'est pas γ(I, σ) pour I = {sorted(indices)}")
    f_gamma = gamma_part(f, face, polyhedron)
    restricted = compile_expression(chart.restricted(indices), chart.symbols)
    rng = _rng(seed)
    y = _torus_points(rng, samples, chart.n)
    lhs = f_gamma.numeric(chart.map.forward(y)) if not f_gamma.is_zero else np.zeros(samples)
    prefactor = np.prod(y ** np.asarray(chart.l_vector, dtype=float), axis=1)
    rhs = prefactor * restricted(y)
    return float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))))


def euler_identity_check(f_gamma: FunctionSpec, pair: ValidPair, seed: Optional[int] = None,
                         samples: int = 100) -> float:
    """
    Résidu relatif de Σ_k a_k x_k ∂_k f_γ = l·f_γ (dérivées symboliques).
    """
    if f_gamma.is_zero:
        return 0.0
    rng = _rng(seed)
    x = _torus_points(rng, samples, f_gamma.n, 0.1, 2.0)
    value = f_gamma.numeric(x)
    weighted = np.zeros(samples)
    scale = 1.0 + np.abs(pair.l * value)
    for k, gradient in enumerate(f_gamma.numeric_gradient):
        if pair.a[k]:
            term = pair.a[k] * x[:, k] * gradient(x)
            weighted = weighted + term
            scale = scale + np.abs(term)
    return float(np.max(np.abs(weighted - pair.l * value) / scale))


def quasihomogeneity_check(f_gamma: FunctionSpec, pair: ValidPair, seed: Optional[int] = None,
                           samples: int = 200) -> float:
    """Erreur relative de f_γ(t^a·x) = t^l·f_γ(x) pour t ∈ (0, 1]."""
    if f_gamma.is_zero:
        return 0.0
    rng = _rng(seed)
    x = _torus_points(rng, samples, f_gamma.n, 0.1, 1.0)
    t = rng.uniform(1e-3, 1.0, size=samples)
    scaled = x * t[:, None] ** np.asarray(pair.a, dtype=float)
    lhs = f_gamma.numeric(scaled)
    rhs = t ** pair.l * f_gamma.numeric(x)
    scale = np.maximum(np.abs(rhs), t ** pair.l * 1e-8)
    return float(np.max(np.abs(lhs - rhs) / scale))


def compactness_equivalence_check(cone: Cone, polyhedron: LatticePolyhedron,
                                  seed: Optional[int] = None) -> bool:
    """
    Pour tout I : γ(I, σ) compacte ⇔ Σ_{j∈I} a^j_k > 0 pour tout k ⇔ π(σ)(T_I(Rⁿ)) = 0.
    """
    mapping = monomial_map(cone)
    rng = _rng(seed)
    n = mapping.n
    for size in range(n + 1):
        for indices in combinations(range(n), size):
            face = gamma_of(indices, cone, polyhedron)
            combinatorial = all(sum(cone.skeleton[j][k] for j in indices) > 0 for k in range(n))
            y = _torus_points(rng, 20, n)
            y[:, list(indices)] = 0.0
            collapses = bool(np.all(mapping.forward(y) == 0.0))
            if not (face.compact == combinatorial == collapses):
                logger.warning(f"Équivalence de compacité violée pour I = {indices}")
                return False
    return True


def commutation_check(cone: Cone, polyhedron: LatticePolyhedron, seed: Optional[int] = None) -> bool:
    """π(σ)∘T_I = T_W(γ)∘π(σ) point par point, γ = γ(I, σ), pour tout I."""
    mapping = monomial_map(cone)
    rng = _rng(seed)
    n = mapping.n
    for size in range(n + 1):
        for indices in combinations(range(n), size):
            face = gamma_of(indices, cone, polyhedron)
            y = _torus_points(rng, 20, n)
            restricted = y.copy()
            restricted[:, list(indices)] = 0.0
            lhs = mapping.forward(restricted)
            rhs = mapping.forward(y)
            rhs[:, sorted(face.W_set)] = 0.0
            if not np.allclose(lhs, rhs, rtol=1e-14, atol=0.0):
                logger.warning(f"Commutation violée pour I = {indices}")
                return False
    return True


# ---------------------------------------------------------------------------
# Non-dégénérescence
# ---------------------------------------------------------------------------

class FaceStatus(Enum):
    VERIFIED = "verified"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FaceVerdict:
    face: Face
    status: FaceStatus
    method: str
    witness: Optional[Tuple[float, ...]] = None
    residual: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {"face": self.face.describe(), "status": self.status.value, "method": self.method}
        if self.witness is not None:
            data["witness"] = list(self.witness)
            data["residual"] = self.residual
        return data


@dataclass(frozen=True)
class NondegeneracyReport:
    faces: Tuple[FaceVerdict, ...]
    overrides: bool = field(default=False)

    @property
    def verdict(self) -> FaceStatus:
        statuses = {v.status for v in self.faces}
        if FaceStatus.REFUTED in statuses:
            return FaceStatus.REFUTED
        if FaceStatus.UNKNOWN in statuses:
            return FaceStatus.UNKNOWN
        return FaceStatus.VERIFIED

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict.value, "user_override": self.overrides,
                "faces": [v.to_dict() for v in self.faces]}


def _is_rational_poly(poly: sympy.Poly) -> bool:
    return all(c.is_Rational for c in poly.coeffs())


def _gradient_residual(poly: sympy.Poly, point: Sequence[float]) -> float:
    symbols = poly.gens
    values = [abs(complex(sympy.diff(poly.as_expr(), x).evalf(30, subs=dict(zip(symbols, point)))))
              for x in symbols]
    values.append(abs(complex(poly.as_expr().evalf(30, subs=dict(zip(symbols, point))))))
    return max(values)


def sign_variations(values: Sequence) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_real_roots(poly: sympy.Poly) -> int:
    """Nombre de racines réelles distinctes par la suite de Sturm."""
    if poly.degree() <= 0:
        return 0
    sequence = sympy.sturm(poly)
    at_plus = [p.LC() for p in sequence]
    at_minus = [p.LC() * (-1) ** p.degree() for p in sequence]
    return sign_variations(at_minus) - sign_variations(at_plus)


def _vertex_verdict(face: Face, f_gamma: sympy.Expr) -> FaceVerdict:
    """
    f_γ = c·x^p en un sommet : aucun zéro sur le tore si c ≠ 0, y compris
    pour p = 0 (f_γ constante non nulle).
    """
    p = face.vertices[0]
    if f_gamma == 0:
        witness = (1.0,) * len(p)
        return FaceVerdict(face, FaceStatus.REFUTED, "vertex", witness, 0.0)
    return FaceVerdict(face, FaceStatus.VERIFIED, "vertex")


def _planar_verdict(face: Face, poly: sympy.Poly) -> FaceVerdict:
    """
    Cas n = 2 exact : sur la tranche x1 = s, ∇f_γ = 0 hors des axes
    équivaut à une racine multiple réelle non nulle de g(u) = f_γ(s, u).
    """
    x1, x2 = poly.gens
    u = sympy.Symbol("u", real=True)
    for s in (1, -1):
        g = sympy.Poly(poly.as_expr().subs({x1: s, x2: u}), u)
        if g.is_zero:
            return FaceVerdict(face, FaceStatus.REFUTED, "sturm", (float(s), 1.0), 0.0)
        h = sympy.gcd(g, g.diff(u))
        while h.degree() > 0 and h.eval(0) == 0:
            h = sympy.Poly(sympy.quo(h.as_expr(), u), u)
        if count_real_roots(h) > 0:
            root = sympy.real_roots(h)[0]
            witness = (float(s), float(root))
            residual = _gradient_residual(poly, (s, root))
            logger.info(f"Face {face.describe()} dégénérée, témoin {witness}")
            return FaceVerdict(face, FaceStatus.REFUTED, "sturm", witness, residual)
    return FaceVerdict(face, FaceStatus.VERIFIED, "sturm")


def _groebner_certificate(poly: sympy.Poly) -> bool:
    """Vrai si ∇f_γ n'a aucun zéro dans le tore complexe (base de Gröbner [1])."""
    xs = poly.gens
    z = sympy.Symbol("z_torus")
    system = [sympy.diff(poly.as_expr(), x) for x in xs]
    system.append(1 - z * sympy.Mul(*xs))
    try:
        basis = sympy.groebner(system, *xs, z, order="grevlex")
    except Exception as e:  # pragma: no cover - dépend de sympy
        logger.debug(f"Gröbner abandonné: {e}")
        return False
    return list(basis.exprs) == [1]


def _interval(value: sympy.Expr):
    approx = sympy.N(value, 30)
    lo = float(approx) - 1e-15 * (1 + abs(float(approx)))
    hi = float(approx) + 1e-15 * (1 + abs(float(approx)))
    return iv.mpf([lo, hi])


def _interval_polys(polys: Sequence[sympy.Poly]) -> List[List[Tuple[Tuple[int, ...], Any]]]:
    return [[(monom, _interval(c)) for monom, c in p.terms()] for p in polys]


def _eval_interval(poly_terms, box) -> Any:
    total = iv.mpf(0)
    for monom, c in poly_terms:
        term = c
        for x, e in zip(box, monom):
            if e:
                term = term * x ** e
        total = total + term
    return total


def _branch_and_bound(face: Face, poly: sympy.Poly, budget: int, min_width: float = 1e-9) -> FaceVerdict:
    """
    Recherche par intervalles d'un zéro de (g, ∇g) sur le tore, g = f_γ/x^q.

    Chaque orbite quasi-homogène coupe une tranche {x_k = ±1, |x_j| ≤ 1} ;
    une boîte est écartée dès qu'une composante exclut 0.
    """
    xs = poly.gens
    n = len(xs)
    q = [min(m[k] for m in poly.monoms()) for k in range(n)]
    reduced = sympy.Poly(sympy.cancel(poly.as_expr() / sympy.Mul(*(x ** e for x, e in zip(xs, q)))), *xs)
    system = [reduced] + [reduced.diff(x) for x in xs]
    interval_system = _interval_polys(system)
    numeric_system = [sympy.lambdify(xs, p.as_expr(), "numpy") for p in system]

    def residual(point):
        return np.array([fn(*point) for fn in numeric_system], dtype=float)

    boxes = 0
    undecided = False
    for k, s in product(range(n), (1.0, -1.0)):
        stack = [[(-1.0, 1.0) if j != k else (s, s) for j in range(n)]]
        while stack:
            bounds = stack.pop()
            boxes += 1
            if boxes > budget:
                logger.warning(f"Budget de boîtes épuisé pour {face.describe()}")
                return FaceVerdict(face, FaceStatus.UNKNOWN, "interval")
            box = [iv.mpf(list(b)) for b in bounds]
            if any(0 not in _eval_interval(terms, box) for terms in interval_system):
                continue
            widths = [hi - lo for lo, hi in bounds]
            if max(widths) < 1e-3:
                center = np.array([(lo + hi) / 2 for lo, hi in bounds])
                free = [j for j in range(n) if j != k]

                def slice_residual(values):
                    point = center.copy()
                    point[free] = values
                    return residual(point)

                solution = least_squares(slice_residual, center[free], xtol=1e-15, ftol=1e-15, gtol=1e-15)
                point = center.copy()
                point[free] = solution.x
                if (np.max(np.abs(solution.fun)) <= 1e-10 and np.all(np.abs(point) > 1e-6)):
                    witness = tuple(float(c) for c in point)
                    value = _gradient_residual(poly, witness)
                    logger.info(f"Face {face.describe()} dégénérée, témoin {witness}")
                    return FaceVerdict(face, FaceStatus.REFUTED, "interval", witness, value)
            if max(widths) < min_width:
                undecided = True
                continue
            j = max((j for j in range(n) if j != k), key=lambda j: widths[j])
            lo, hi = bounds[j]
            mid = (lo + hi) / 2
            left, right = list(bounds), list(bounds)
            left[j], right[j] = (lo, mid), (mid, hi)
            stack.extend([right, left])
    if undecided:
        return FaceVerdict(face, FaceStatus.UNKNOWN, "interval")
    return FaceVerdict(face, FaceStatus.VERIFIED, "interval")


def nondegeneracy_check(f: FunctionSpec, polyhedron: LatticePolyhedron,
                        faces: Optional[List[Face]] = None,
                        budget: Optional[int] = None) -> NondegeneracyReport:
    """
    Vérifie ∇f_γ ≠ 0 sur (R∖{0})ⁿ pour toute face compacte γ.

    n = 2 (coefficients rationnels) : réduction quasi-homogène et suite de
    Sturm ; sinon certificat de Gröbner puis recherche par intervalles
    avec budget, « unknown » si le budget est épuisé.
    """
    budget = budget if budget is not None else get("numerics.budget_boxes", 20000)
    faces = faces if faces is not None else enumerate_faces(polyhedron)
    verdicts = []
    for face in faces:
        if not face.compact:
            continue
        f_gamma = gamma_part(f, face, polyhedron)
        expression = sympy.expand(f_gamma.expression)
        if face.dim == 0:
            verdicts.append(_vertex_verdict(face, expression))
            continue
        poly = sympy.Poly(expression, *f.symbols)
        if f.n == 2 and _is_rational_poly(poly):
            verdicts.append(_planar_verdict(face, poly))
        elif _is_rational_poly(poly) and _groebner_certificate(poly):
            verdicts.append(FaceVerdict(face, FaceStatus.VERIFIED, "groebner"))
        else:
            verdicts.append(_branch_and_bound(face, poly, budget))
    report = NondegeneracyReport(faces=tuple(verdicts))
    logger.info(f"Non-dégénérescence: {report.verdict.value} ({len(verdicts)} faces compactes)")
    return report
