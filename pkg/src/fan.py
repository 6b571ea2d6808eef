"""
Module des éventails de Newton.

Ce module gère l'éventail normal Σ₀ d'un polyèdre de Newton, sa
subdivision simpliciale unimodulaire Σ et les annotations de cônes
utilisées par les cartes toriques et les asymptotiques : valeurs l(a^j),
ensembles B(σ) et A(σ), appartenance à Σ*^(n).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import sympy

from src.geometry import (Face, LatticePolyhedron, LatticeVector, dot, enumerate_faces,
                          l_value, newton_distance, primitive,
                          principal_face_and_multiplicity, rank, supporting_face)
from src.utils.error_handling import ConsistencyError, DomainError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)


@dataclass(frozen=True)
class Cone:
    """
    Cône rationnel engendré par un squelette de vecteurs primitifs de Z₊ⁿ.

    Le squelette est trié lexicographiquement par ordre croissant ;
    `face` renvoie, pour un cône de l'éventail normal, à la face duale.
    """

    skeleton: Tuple[LatticeVector, ...]
    dim: int
    face: Optional[Face] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence[int]], face: Optional[Face] = None) -> "Cone":
        skeleton = tuple(sorted({primitive(r) for r in rays}))
        return cls(skeleton=skeleton, dim=rank(skeleton), face=face)

    @property
    def n(self) -> int:
        return len(self.skeleton[0]) if self.skeleton else 0

    @property
    def simplicial(self) -> bool:
        return len(self.skeleton) == self.dim

    @property
    def matrix(self) -> sympy.Matrix:
        """Matrice dont les colonnes sont les vecteurs du squelette."""
        return sympy.Matrix([list(r) for r in self.skeleton]).T

    def determinant(self) -> int:
        return self._determinant

    @cached_property
    def _determinant(self) -> int:
        if not self.simplicial or self.dim != self.n:
            raise DomainError(f"Déterminant indéfini pour un cône non maximal: {self.skeleton}")
        return int(self.matrix.det())

    @property
    def unimodular(self) -> bool:
        return abs(self.determinant()) == 1

    @cached_property
    def _adjugate(self) -> Tuple[Tuple[int, ...], ...]:
        adjugate = self.matrix.adjugate()
        return tuple(tuple(int(c) for c in adjugate.row(i)) for i in range(adjugate.rows))

    def coordinates(self, vector: Sequence[int]) -> Tuple[Fraction, ...]:
        """Coordonnées exactes λ de v = Σ λ_j a^j dans un cône simplicial maximal."""
        det = self.determinant()
        return tuple(Fraction(dot(row, vector), det) for row in self._adjugate)

    def contains(self, vector: Sequence[int]) -> bool:
        return all(c >= 0 for c in self.coordinates(vector))

    def to_dict(self) -> Dict:
        return {"skeleton": [list(r) for r in self.skeleton], "dim": self.dim}


@dataclass(frozen=True)
class Fan:
    """
    Éventail de support R₊ⁿ.

    `maximal` contient les cônes de dimension n, `cones` tous les cônes
    (fermé par passage aux faces).
    """

    n: int
    maximal: Tuple[Cone, ...]
    cones: Tuple[Cone, ...]

    @property
    def rays(self) -> Tuple[LatticeVector, ...]:
        return tuple(sorted({r for cone in self.maximal for r in cone.skeleton}))

    def find_maximal(self, vector: Sequence[int]) -> Cone:
        for cone in self.maximal:
            if cone.contains(vector):
                return cone
        raise ConsistencyError(f"Aucun cône maximal ne contient {tuple(vector)}")

    def to_dict(self) -> Dict:
        return {"n": self.n, "maximal": [c.to_dict() for c in self.maximal],
                "rays": [list(r) for r in self.rays]}


@dataclass(frozen=True)
class ConeAnnotation:
    """Données d'un cône maximal σ relativement à P (indices comptés à partir de 0)."""

    cone: Cone
    l_values: Tuple[int, ...]
    B_set: FrozenSet[int]
    A_set: FrozenSet[int]
    in_sigma_star: bool

    def to_dict(self) -> Dict:
        return {
            "skeleton": [list(r) for r in self.cone.skeleton],
            "l": list(self.l_values),
            "B": sorted(j + 1 for j in self.B_set),
            "A": sorted(j + 1 for j in self.A_set),
            "in_sigma_star": self.in_sigma_star,
        }


# ---------------------------------------------------------------------------
# Éventail normal
# ---------------------------------------------------------------------------

def _require_full(polyhedron: LatticePolyhedron) -> None:
    if not polyhedron.nonempty:
        raise DomainError("Éventail normal indéfini pour le polyèdre vide")
    if not polyhedron.facets:
        raise DomainError("Polyèdre de dimension insuffisante")


def normal_fan(polyhedron: LatticePolyhedron, faces: Optional[List[Face]] = None) -> Fan:
    """
    Éventail normal Σ₀ : un cône γ*‾ par face γ, engendré par les
    normales des facettes contenant γ, de dimension n − dim γ.

    Raises:
        DomainError: Polyèdre vide
    """
    _require_full(polyhedron)
    n = polyhedron.dim_ambient
    faces = faces if faces is not None else enumerate_faces(polyhedron)
    cones = []
    for face in faces:
        rays = [polyhedron.facets[i].a for i in sorted(face.facet_indices)]
        cone = Cone.from_rays(rays, face=face) if rays else Cone(skeleton=(), dim=0, face=face)
        if cone.dim != n - face.dim:
            raise ConsistencyError(f"Dualité violée pour {face.describe()}: "
                                   f"dim cône {cone.dim}, dim face {face.dim}")
        cones.append(cone)
    maximal = tuple(c for c in cones if c.dim == n)
    logger.debug(f"Éventail normal: {len(cones)} cônes dont {len(maximal)} maximaux")
    return Fan(n=n, maximal=maximal, cones=tuple(cones))


# ---------------------------------------------------------------------------
# Subdivision unimodulaire
# ---------------------------------------------------------------------------

def _triangulate(polyhedron: LatticePolyhedron, faces: List[Face]) -> List[Tuple[LatticeVector, ...]]:
    """
    Triangulation par tirage du rayon lexicographiquement minimal.

    Le cône de la face γ est triangulé en joignant son plus petit rayon aux
    triangulations des cônes des faces δ ⊃ γ (dim δ = dim γ + 1) qui ne le
    contiennent pas ; l'ordre global rend les triangulations compatibles.
    """
    n = polyhedron.dim_ambient
    by_facets = {face.facet_indices: face for face in faces}

    @lru_cache(maxsize=None)
    def simplices(facet_set: FrozenSet[int]) -> Tuple[FrozenSet[int], ...]:
        face = by_facets[facet_set]
        if len(facet_set) == n - face.dim:
            return (facet_set,)
        pulled = min(facet_set, key=lambda i: polyhedron.facets[i].a)
        result = []
        for other in faces:
            if other.dim != face.dim + 1 or not other.facet_indices < facet_set:
                continue
            if pulled in other.facet_indices:
                continue
            for simplex in simplices(other.facet_indices):
                result.append(simplex | {pulled})
        return tuple(result)

    maximal = []
    for face in faces:
        if face.dim == 0:
            for simplex in simplices(face.facet_indices):
                maximal.append(tuple(sorted(polyhedron.facets[i].a for i in simplex)))
    return maximal


def parallelepiped_point(cone: Cone) -> Optional[LatticeVector]:
    """
    Point entier non nul du parallélépipède fondamental {Σ λ_j a^j, 0 ≤ λ_j < 1}
    minimisant (somme des coordonnées, ordre lexicographique), None si |det| = 1.
    """
    if cone.unimodular:
        return None
    bounds = [sum(r[k] for r in cone.skeleton) for k in range(cone.n)]
    best = None
    for candidate in product(*(range(b) for b in bounds)):
        if not any(candidate):
            continue
        if best is not None and (sum(candidate), candidate) >= (sum(best), best):
            continue
        lam = cone.coordinates(candidate)
        if all(0 <= c < 1 for c in lam):
            best = candidate
    if best is None:
        raise ConsistencyError(f"Parallélépipède vide pour le cône {cone.skeleton}")
    return tuple(best)


def _stellar(maximal: List[Cone]) -> List[Cone]:
    """Subdivisions stellaires successives jusqu'à unimodularité."""
    cones = sorted(maximal, key=lambda c: c.skeleton)
    steps = 0
    while True:
        pending = [c for c in cones if not c.unimodular]
        if not pending:
            break
        target = min(pending, key=lambda c: c.skeleton)
        w = parallelepiped_point(target)
        steps += 1
        logger.debug(f"Subdivision stellaire {steps}: cône {target.skeleton} en {w}")
        refined = []
        for cone in cones:
            lam = cone.coordinates(w)
            if any(c < 0 for c in lam):
                refined.append(cone)
                continue
            for j, c in enumerate(lam):
                if c > 0:
                    rays = list(cone.skeleton)
                    rays[j] = w
                    refined.append(Cone.from_rays(rays))
        cones = sorted(refined, key=lambda c: c.skeleton)
    return cones


def _face_closure(maximal: Sequence[Cone]) -> Tuple[Cone, ...]:
    seen = {}
    for cone in maximal:
        for size in range(len(cone.skeleton) + 1):
            for rays in combinations(cone.skeleton, size):
                if rays not in seen:
                    seen[rays] = Cone(skeleton=rays, dim=size)
    return tuple(seen[k] for k in sorted(seen, key=lambda r: (len(r), r)))


def unimodular_subdivision(fan: Fan, polyhedron: LatticePolyhedron,
                           faces: Optional[List[Face]] = None) -> Fan:
    """
    Raffinement simplicial unimodulaire déterministe de l'éventail normal.

    Les cônes non simpliciaux sont d'abord triangulés, puis chaque cône
    de |det| > 1 est subdivisé en son point de parallélépipède minimal.

    Args:
        fan: Éventail normal Σ₀ de P
        polyhedron: Le polyèdre P dont Σ₀ est l'éventail normal
        faces: Faces de P déjà énumérées

    Returns:
        Fan: Σ, dont tous les cônes maximaux sont unimodulaires
    """
    _require_full(polyhedron)
    faces = faces if faces is not None else enumerate_faces(polyhedron)
    triangulated = [Cone.from_rays(rays) for rays in _triangulate(polyhedron, faces)]
    maximal = _stellar(triangulated)
    logger.info(f"Subdivision unimodulaire: {len(fan.maximal)} cônes maximaux -> {len(maximal)}")
    return Fan(n=fan.n, maximal=tuple(maximal), cones=_face_closure(maximal))


# ---------------------------------------------------------------------------
# Annotations
# ---------------------------------------------------------------------------

def ray_l_values(fan: Fan, polyhedron: LatticePolyhedron) -> Dict[LatticeVector, int]:
    return {ray: l_value(ray, polyhedron) for ray in fan.rays}


def beta_tilde(fan: Fan, polyhedron: LatticePolyhedron) -> Fraction:
    """
    β̃ = max{−⟨a⟩/l(a) : a ∈ Σ^(1), l(a) > 0}.

    Raises:
        DomainError: Tous les l(a) sont nuls (l'origine appartient à P)
    """
    l_values = ray_l_values(fan, polyhedron)
    candidates = [Fraction(-sum(a), l) for a, l in l_values.items() if l > 0]
    if not candidates:
        raise DomainError("origin in polyhedron: aucun rayon avec l(a) > 0")
    return max(candidates)


def annotate_cones(fan: Fan, polyhedron: LatticePolyhedron,
                   faces: Optional[List[Face]] = None) -> List[ConeAnnotation]:
    """
    Annote les cônes maximaux : l(a^j), B(σ), A(σ) et appartenance à Σ*^(n).

    Vérifie au passage β̃ = −1/d.

    Raises:
        DomainError: L'origine appartient à P
        ConsistencyError: β̃ ≠ −1/d
    """
    beta = beta_tilde(fan, polyhedron)
    d, _ = newton_distance(polyhedron)
    if d == 0 or beta != Fraction(-1) / d:
        raise ConsistencyError(f"β̃ = {beta} différent de −1/d = −1/{d}")
    _, m = principal_face_and_multiplicity(polyhedron, faces)
    l_values = ray_l_values(fan, polyhedron)

    annotations = []
    for cone in fan.maximal:
        ls = tuple(l_values[a] for a in cone.skeleton)
        B = frozenset(j for j, l in enumerate(ls) if l != 0)
        A = frozenset(j for j in B if Fraction(-sum(cone.skeleton[j]), ls[j]) == beta)
        annotations.append(ConeAnnotation(cone=cone, l_values=ls, B_set=B, A_set=A,
                                          in_sigma_star=len(A) == m))
    starred = sum(a.in_sigma_star for a in annotations)
    logger.debug(f"Annotations: β̃ = {beta}, {starred} cônes dans Σ*")
    if starred == 0:
        raise ConsistencyError(f"Aucun cône avec card A(σ) = m = {m}")
    return annotations


def sigma_star(annotations: Sequence[ConeAnnotation]) -> List[ConeAnnotation]:
    return [a for a in annotations if a.in_sigma_star]


def gamma_of(indices: Iterable[int], cone: Cone, polyhedron: LatticePolyhedron) -> Face:
    """Face γ(I, σ) = ∩_{j∈I} H(a^j, l(a^j)) ∩ P (P pour I vide)."""
    n = polyhedron.dim_ambient
    a = [0] * n
    for j in indices:
        a = [x + y for x, y in zip(a, cone.skeleton[j])]
    return supporting_face(a, polyhedron)


def I_of(face: Face, cone: Cone, polyhedron: LatticePolyhedron) -> FrozenSet[int]:
    """I(γ, σ) = {j : γ ⊂ H(a^j, l(a^j))}."""
    result = set()
    for j, a in enumerate(cone.skeleton):
        l = l_value(a, polyhedron)
        if all(dot(a, v) == l for v in face.vertices) and all(a[k] == 0 for k in face.V_set):
            result.add(j)
    return frozenset(result)


def vertex_of(cone: Cone, polyhedron: LatticePolyhedron) -> LatticeVector:
    """Le sommet p(σ) = γ({1..n}, σ)."""
    face = gamma_of(range(len(cone.skeleton)), cone, polyhedron)
    if face.dim != 0:
        raise ConsistencyError(f"γ(I_max, σ) n'est pas un sommet pour {cone.skeleton}")
    return face.vertices[0]


def fan_to_dict(annotations: Sequence[ConeAnnotation], beta: Fraction) -> Dict:
    return {"cones": [a.to_dict() for a in annotations], "beta_tilde": str(beta)}


# ---------------------------------------------------------------------------
# Contrôles
# ---------------------------------------------------------------------------

def refinement_check(fan: Fan, polyhedron: LatticePolyhedron) -> bool:
    """Chaque cône maximal de Σ est contenu dans exactement un cône maximal de Σ₀."""
    for cone in fan.maximal:
        containing = 0
        for vertex in polyhedron.vertices:
            if all(dot(a, vertex) == l_value(a, polyhedron) for a in cone.skeleton):
                containing += 1
        if containing != 1:
            logger.warning(f"Cône {cone.skeleton} dans {containing} cônes de Σ₀")
            return False
    return True


def support_check(fan: Fan, max_entry: int = 10) -> bool:
    """Tout vecteur primitif d'entrées ≤ max_entry est dans un cône maximal."""
    for vector in product(range(max_entry + 1), repeat=fan.n):
        if not any(vector):
            continue
        if primitive(vector) != vector:
            continue
        if not any(cone.contains(vector) for cone in fan.maximal):
            logger.warning(f"Vecteur {vector} hors du support")
            return False
    return True
