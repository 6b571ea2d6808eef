"""
Module de géométrie exacte des polyèdres de Newton.

Ce module gère les polyèdres entiers P ⊂ R₊ⁿ stables par P + R₊ⁿ ⊂ P :
construction par double description exacte, treillis des faces,
distance de Newton d, face principale τ* et multiplicité m.

Toutes les valeurs sont immuables et tous les calculs sont exacts
(entiers Python, fractions, matrices sympy).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import sympy

from src.utils.error_handling import DomainError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)

LatticeVector = Tuple[int, ...]


def primitive(vector: Sequence[int]) -> LatticeVector:
    """
    Divise un vecteur entier par le pgcd de ses coordonnées.

    Args:
        vector: Vecteur entier non nul

    Returns:
        LatticeVector: Le vecteur primitif correspondant
    """
    g = reduce(gcd, (abs(int(c)) for c in vector), 0)
    if g == 0:
        raise DomainError("Le vecteur nul n'a pas de forme primitive")
    return tuple(int(c) // g for c in vector)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def rank(vectors: Sequence[Sequence]) -> int:
    """Rang exact d'une famille de vecteurs (0 pour une famille vide)."""
    if not vectors:
        return 0
    return sympy.Matrix([list(v) for v in vectors]).rank()


def _check_lattice_vector(point: Sequence, n: Optional[int], what: str) -> LatticeVector:
    coords = tuple(point)
    if n is not None and len(coords) != n:
        raise DomainError(f"{what} {coords}: dimension {len(coords)} au lieu de {n}")
    for c in coords:
        if isinstance(c, bool) or int(c) != c:
            raise DomainError(f"{what} {coords}: coordonnée non entière")
        if c < 0:
            raise DomainError(f"{what} {coords}: coordonnée négative")
    return tuple(int(c) for c in coords)


@dataclass(frozen=True, order=True)
class ValidPair:
    """Paire (a, l) définissant le demi-espace ⟨a, α⟩ ≥ l."""

    a: LatticeVector
    l: int

    def value(self, alpha: Sequence) -> Fraction:
        return dot(self.a, alpha) - self.l

    def contains(self, alpha: Sequence) -> bool:
        return self.value(alpha) >= 0

    def is_tight(self, alpha: Sequence) -> bool:
        return self.value(alpha) == 0

    def to_dict(self) -> Dict:
        return {"a": list(self.a), "l": self.l}


@dataclass(frozen=True)
class LatticePolyhedron:
    """
    Polyèdre entier à cône de récession R₊ⁿ.

    `facets` est la liste irrédondante des paires (a, l), triée
    lexicographiquement ; `vertices` la liste triée des sommets.
    Le polyèdre vide (phase plate) a ni facette ni sommet.
    """

    dim_ambient: int
    facets: Tuple[ValidPair, ...]
    vertices: Tuple[LatticeVector, ...]

    @property
    def nonempty(self) -> bool:
        return bool(self.vertices)

    @classmethod
    def empty(cls, n: int) -> "LatticePolyhedron":
        return cls(dim_ambient=n, facets=(), vertices=())

    def contains(self, point: Sequence) -> bool:
        """Test d'appartenance exact (coordonnées entières ou Fraction)."""
        if not self.nonempty:
            return False
        return all(pair.contains(point) for pair in self.facets)

    def tight_facets(self, point: Sequence) -> FrozenSet[int]:
        return frozenset(i for i, pair in enumerate(self.facets) if pair.is_tight(point))

    def is_orthant(self) -> bool:
        """Vrai si P = R₊ⁿ (l'origine appartient à P)."""
        return self.nonempty and self.contains((0,) * self.dim_ambient)

    def to_dict(self) -> Dict:
        return {
            "n": self.dim_ambient,
            "empty": not self.nonempty,
            "facets": [pair.to_dict() for pair in self.facets],
            "vertices": [list(v) for v in self.vertices],
        }


@dataclass(frozen=True)
class Face:
    """
    Face non vide d'un polyèdre de Newton.

    Une face est décrite par ses générateurs : ses sommets et les
    directions e_k (k ∈ V) qui la laissent invariante. Les indices de
    coordonnées sont comptés à partir de 0 ; les rapports JSON les
    affichent à partir de 1.
    """

    defining_pair: ValidPair
    dim: int
    V_set: FrozenSet[int]
    W_set: FrozenSet[int]
    compact: bool
    vertices: Tuple[LatticeVector, ...]
    facet_indices: FrozenSet[int]
    lattice_points: Tuple[LatticeVector, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.V_set) + len(self.W_set)

    def contains(self, point: Sequence, polyhedron: LatticePolyhedron) -> bool:
        """Vrai si le point est dans P et sature toutes les facettes de la face."""
        return polyhedron.contains(point) and all(
            polyhedron.facets[i].is_tight(point) for i in self.facet_indices)

    def is_subface_of(self, other: "Face") -> bool:
        return other.facet_indices <= self.facet_indices

    def key(self) -> Tuple:
        return (self.dim, self.vertices, tuple(sorted(self.V_set)))

    def describe(self) -> str:
        """
        Affichage lisible, par exemple {(6,α2); α2≥2} ou conv{(8,0),(6,2)}.
        """
        if len(self.vertices) == 1:
            vertex = self.vertices[0]
            coords = [f"α{k + 1}" if k in self.V_set else str(c) for k, c in enumerate(vertex)]
            if not self.V_set:
                return "{(" + ",".join(coords) + ")}"
            bounds = ", ".join(f"α{k + 1}≥{vertex[k]}" for k in sorted(self.V_set))
            return "{(" + ",".join(coords) + "); " + bounds + "}"
        hull = "conv{" + ",".join("(" + ",".join(map(str, v)) + ")" for v in self.vertices) + "}"
        rays = "".join(f" + R₊e{k + 1}" for k in sorted(self.V_set))
        return hull + rays

    def to_dict(self) -> Dict:
        data = {
            "dim": self.dim,
            "compact": self.compact,
            "vertices": [list(v) for v in self.vertices],
            "V": [k + 1 for k in sorted(self.V_set)],
            "W": [k + 1 for k in sorted(self.W_set)],
            "defining_pair": self.defining_pair.to_dict(),
            "display": self.describe(),
        }
        if self.compact:
            data["lattice_points"] = [list(p) for p in self.lattice_points]
        return data


# ---------------------------------------------------------------------------
# Construction du polyèdre
# ---------------------------------------------------------------------------

def _minimal_points(points: Iterable[LatticeVector]) -> List[LatticeVector]:
    """Retire les points dominés (q ≤ p coordonnée par coordonnée, q ≠ p)."""
    pts = sorted(set(points))
    result = []
    for i, p in enumerate(pts):
        dominated = any(
            q != p and all(qk <= pk for qk, pk in zip(q, p))
            for q in pts[:i] + pts[i + 1:]
        )
        if not dominated:
            result.append(p)
    return result


def _double_description(points: List[LatticeVector], n: int) -> List[Tuple[LatticeVector, int]]:
    """
    Rayons extrêmes du cône des inégalités valides {(a, l) : a ≥ 0, ⟨p, a⟩ − l ≥ 0}.

    Les contraintes 0..n−1 sont a_k ≥ 0, la contrainte n + i est celle du
    point i. Chaque rayon est stocké avec son ensemble de contraintes
    saturées ; l'adjacence est testée combinatoirement.
    """
    p0 = points[0]
    rays: List[Tuple[Tuple[int, ...], FrozenSet[int]]] = []
    for k in range(n):
        ray = tuple(1 if j == k else 0 for j in range(n)) + (p0[k],)
        tight = frozenset(j for j in range(n) if j != k) | {n}
        rays.append((ray, tight))
    rays.append(((0,) * n + (-1,), frozenset(range(n))))

    for index, p in enumerate(points[1:], start=1):
        constraint = n + index

        def h(ray):
            return dot(p, ray[:n]) - ray[n]

        values = [h(ray) for ray, _ in rays]
        positive = [i for i, v in enumerate(values) if v > 0]
        negative = [i for i, v in enumerate(values) if v < 0]
        zero = [i for i, v in enumerate(values) if v == 0]
        if not negative:
            # Contrainte redondante : elle sature seulement les rayons de R0
            rays = [(ray, tight | {constraint}) if values[i] == 0 else (ray, tight)
                    for i, (ray, tight) in enumerate(rays)]
            continue

        new_rays = [(rays[i][0], rays[i][1] | {constraint}) for i in zero]
        new_rays += [rays[i] for i in positive]
        for i_pos in positive:
            for i_neg in negative:
                common = rays[i_pos][1] & rays[i_neg][1]
                if len(common) < n - 1:
                    continue
                adjacent = all(
                    not common <= rays[k][1]
                    for k in range(len(rays)) if k not in (i_pos, i_neg)
                )
                if not adjacent:
                    continue
                r_pos, r_neg = rays[i_pos][0], rays[i_neg][0]
                combined = tuple(values[i_pos] * rn - values[i_neg] * rp
                                 for rp, rn in zip(r_pos, r_neg))
                new_rays.append((primitive(combined), common | {constraint}))
        rays = new_rays
        logger.debug(f"Double description: point {p} traité, {len(rays)} rayons")

    facets = []
    for ray, _ in rays:
        a, l = ray[:n], ray[n]
        if any(a):
            facets.append((a, l))
    return facets


def build_polyhedron(support: Iterable[Sequence[int]], n: Optional[int] = None) -> LatticePolyhedron:
    """
    Construit Γ₊ = conv(∪ α + R₊ⁿ) à partir d'un support fini.

    Args:
        support: Points entiers positifs (exposants)
        n: Dimension ambiante, obligatoire si le support est vide

    Returns:
        LatticePolyhedron: Facettes irrédondantes et sommets, triés

    Raises:
        DomainError: Coordonnée négative, non entière, ou dimensions incohérentes
    """
    raw = list(support)
    if n is None:
        if not raw:
            raise DomainError("Support vide : la dimension doit être fournie")
        n = len(tuple(raw[0]))
    if n < 1:
        raise DomainError(f"Dimension ambiante invalide: {n}")
    points = [_check_lattice_vector(p, n, "Point du support") for p in raw]
    if not points:
        logger.debug("Support vide : polyèdre vide")
        return LatticePolyhedron.empty(n)

    minimal = _minimal_points(points)
    pairs = _double_description(minimal, n)
    facets = tuple(sorted(ValidPair(a, l) for a, l in pairs))

    vertices = []
    for p in minimal:
        normals = [pair.a for pair in facets if pair.is_tight(p)]
        if rank(normals) == n:
            vertices.append(p)
    polyhedron = LatticePolyhedron(dim_ambient=n, facets=facets, vertices=tuple(sorted(vertices)))
    logger.debug(f"Polyèdre construit: {len(facets)} facettes, {len(vertices)} sommets")
    return polyhedron


# ---------------------------------------------------------------------------
# Faces
# ---------------------------------------------------------------------------

def _require_nonempty(polyhedron: LatticePolyhedron) -> None:
    if not polyhedron.nonempty:
        raise DomainError("Opération impossible sur le polyèdre vide")


def _lattice_points(polyhedron: LatticePolyhedron, vertices: Sequence[LatticeVector],
                    facet_indices: FrozenSet[int]) -> Tuple[LatticeVector, ...]:
    """Points entiers d'une face compacte (énumération sur la boîte englobante)."""
    n = polyhedron.dim_ambient
    lows = [min(v[k] for v in vertices) for k in range(n)]
    highs = [max(v[k] for v in vertices) for k in range(n)]
    points = []
    for candidate in product(*(range(lo, hi + 1) for lo, hi in zip(lows, highs))):
        if polyhedron.contains(candidate) and all(
                polyhedron.facets[i].is_tight(candidate) for i in facet_indices):
            points.append(tuple(candidate))
    return tuple(sorted(points))


def make_face(polyhedron: LatticePolyhedron, vertices: Iterable[LatticeVector],
              directions: Iterable[int]) -> Face:
    """
    Construit la face engendrée par des sommets et des directions e_k.

    Args:
        polyhedron: Polyèdre ambiant
        vertices: Sommets de la face (non vide)
        directions: Indices k tels que γ + R₊e_k ⊂ γ

    Returns:
        Face: La face avec dimension, V/W, paire définissante, points entiers
    """
    n = polyhedron.dim_ambient
    verts = tuple(sorted(set(vertices)))
    dirs = frozenset(directions)
    if not verts:
        raise DomainError("Une face non vide a au moins un sommet")
    facet_indices = frozenset(
        i for i, pair in enumerate(polyhedron.facets)
        if all(pair.is_tight(v) for v in verts) and all(pair.a[k] == 0 for k in dirs)
    )
    spanning = [tuple(c - c0 for c, c0 in zip(v, verts[0])) for v in verts[1:]]
    spanning += [tuple(1 if j == k else 0 for j in range(n)) for k in sorted(dirs)]
    dim = rank(spanning)

    a = tuple(sum(polyhedron.facets[i].a[k] for i in facet_indices) for k in range(n))
    l = sum(polyhedron.facets[i].l for i in facet_indices)
    if any(a):
        g = reduce(gcd, a, 0)
        a, l = tuple(c // g for c in a), l // g
    compact = not dirs
    lattice_points = _lattice_points(polyhedron, verts, facet_indices) if compact else ()
    return Face(
        defining_pair=ValidPair(a, l),
        dim=dim,
        V_set=dirs,
        W_set=frozenset(range(n)) - dirs,
        compact=compact,
        vertices=verts,
        facet_indices=facet_indices,
        lattice_points=lattice_points,
    )


def enumerate_faces(polyhedron: LatticePolyhedron) -> List[Face]:
    """
    Énumère toutes les faces non vides, P compris.

    Chaque facette est représentée par ses générateurs incidents ; les
    faces sont les intersections de facettes qui contiennent au moins un
    sommet (tout face non vide d'un polyèdre pointé a un sommet).

    Returns:
        List[Face]: Faces triées par (dimension, sommets, directions)
    """
    _require_nonempty(polyhedron)
    n = polyhedron.dim_ambient
    vertices = polyhedron.vertices

    def generators(pair: ValidPair) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        vs = frozenset(i for i, v in enumerate(vertices) if pair.is_tight(v))
        ds = frozenset(k for k in range(n) if pair.a[k] == 0)
        return vs, ds

    everything = (frozenset(range(len(vertices))), frozenset(range(n)))
    family = {everything}
    frontier = {generators(pair) for pair in polyhedron.facets}
    frontier = {g for g in frontier if g[0]}
    facet_sets = set(frontier)
    while frontier:
        family |= frontier
        new = set()
        for left in frontier:
            for right in facet_sets:
                meet = (left[0] & right[0], left[1] & right[1])
                if meet[0] and meet not in family:
                    new.add(meet)
        frontier = new

    faces = [make_face(polyhedron, [vertices[i] for i in vs], ds) for vs, ds in family]
    faces.sort(key=Face.key)
    logger.debug(f"{len(faces)} faces énumérées")
    return faces


def face_meet(left: Face, right: Face, polyhedron: LatticePolyhedron) -> Optional[Face]:
    """Intersection de deux faces (None si elle est vide)."""
    vertices = set(left.vertices) & set(right.vertices)
    if not vertices:
        return None
    return make_face(polyhedron, vertices, left.V_set & right.V_set)


def smallest_face_containing(polyhedron: LatticePolyhedron, point: Sequence,
                             faces: Optional[List[Face]] = None) -> Face:
    """
    Face dont l'intérieur relatif contient le point donné.

    Raises:
        DomainError: Si le point n'est pas dans P
    """
    _require_nonempty(polyhedron)
    if not polyhedron.contains(point):
        raise DomainError(f"Le point {tuple(point)} n'appartient pas au polyèdre")
    tight = polyhedron.tight_facets(point)
    faces = faces if faces is not None else enumerate_faces(polyhedron)
    for face in faces:
        if face.facet_indices == tight:
            return face
    raise DomainError(f"Aucune face ne correspond aux facettes saturées {sorted(tight)}")


# ---------------------------------------------------------------------------
# Quantités de Newton
# ---------------------------------------------------------------------------

def l_value(a: Sequence[int], polyhedron: LatticePolyhedron) -> int:
    """
    l(a) = min ⟨a, α⟩ sur P, atteint en un sommet car a ∈ Z₊ⁿ.

    Raises:
        DomainError: Entrée négative dans a ou polyèdre vide
    """
    _require_nonempty(polyhedron)
    a = _check_lattice_vector(a, polyhedron.dim_ambient, "Vecteur a")
    return min(dot(a, v) for v in polyhedron.vertices)


def supporting_face(a: Sequence[int], polyhedron: LatticePolyhedron) -> Face:
    """La face γ(a) = H(a, l(a)) ∩ P associée à l_value."""
    l = l_value(a, polyhedron)
    vertices = [v for v in polyhedron.vertices if dot(a, v) == l]
    directions = [k for k, c in enumerate(a) if c == 0]
    return make_face(polyhedron, vertices, directions)


def newton_distance(polyhedron: LatticePolyhedron) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """
    Distance de Newton d et point q* = (d, …, d).

    d est le plus petit t tel que (t, …, t) ∈ P ; il vaut 0 quand
    l'origine appartient à P.

    Raises:
        DomainError: Polyèdre vide
    """
    _require_nonempty(polyhedron)
    candidates = [Fraction(pair.l, sum(pair.a)) for pair in polyhedron.facets if pair.l > 0]
    d = max(candidates, default=Fraction(0))
    return d, (d,) * polyhedron.dim_ambient


def principal_face_and_multiplicity(polyhedron: LatticePolyhedron,
                                    faces: Optional[List[Face]] = None) -> Tuple[Face, int]:
    """
    Face principale τ* (celle dont l'intérieur relatif contient q*) et m = n − dim τ*.
    """
    _, q_star = newton_distance(polyhedron)
    tau = smallest_face_containing(polyhedron, q_star, faces)
    return tau, polyhedron.dim_ambient - tau.dim
