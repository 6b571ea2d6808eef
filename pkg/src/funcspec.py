"""
Module du langage d'expressions des phases.

Ce module gère les facteurs lisses ψ_p (expressions sympy avec atomes plats),
la représentation f(x) = Σ x^p ψ_p(x) des phases, l'analyse syntaxique et
l'impression réversible de la grammaire, le support de Taylor, le test
d'appartenance aux classes Ê(U) / Ê[P](U), les γ-parties, l'évaluation
numérique et la dérivation.
"""

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.core.function import ArgumentIndexError
from sympy.printing.str import StrPrinter

from src.geometry import (Face, LatticePolyhedron, LatticeVector, build_polyhedron,
                          make_face)
from src.utils.error_handling import DomainError, ParseError, ValidationError
from src.utils.logger import get_logger

# Initialisation du logger
logger = get_logger(__name__)

# exp(t) vaut 0 en double précision en dessous de ce seuil
UNDERFLOW_EXPONENT = -745.0


# ---------------------------------------------------------------------------
# Atomes plats
# ---------------------------------------------------------------------------

class flatm(sympy.Function):
    """
    Atome plat étendu flatm(x, k, m) = x^(−m)·exp(−1/x^(2k)), nul en x = 0.

    flat(i, k) s'écrit flatm(x_i, k, 0). La famille est stable par
    dérivation et par réflexion x → −x.
    """

    nargs = 3

    @classmethod
    def eval(cls, x, k, m):
        if x.is_zero:
            return sympy.S.Zero
        if x.could_extract_minus_sign():
            return sympy.S.NegativeOne ** m * cls(-x, k, m)
        return None

    def fdiff(self, argindex=1):
        if argindex != 1:
            raise ArgumentIndexError(self, argindex)
        x, k, m = self.args
        return -m * flatm(x, k, m + 1) + 2 * k * flatm(x, k, m + 2 * k + 1)

    def _eval_is_real(self):
        return self.args[0].is_real


def flatm_numeric(x, k, m):
    """
    Évaluation vectorisée de flatm : 0 en x = 0, signe(x)^m·exp(−|x|^(−2k) − m·ln|x|)
    ailleurs, ramenée à 0 quand l'exposant passe sous le seuil de dépassement inférieur.
    """
    x = np.asarray(x, dtype=float)
    k = int(k)
    m = int(m)
    ax = np.abs(x)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        exponent = -ax ** (-2 * k) - m * np.log(ax)
        value = np.where(exponent <= UNDERFLOW_EXPONENT, 0.0, np.exp(exponent))
        value = value * np.sign(x) ** m
    return np.where(ax == 0.0, 0.0, value)


NUMERIC_MODULES = [{"flatm": flatm_numeric}, "numpy"]


def variables(n: int, prefix: str = "x") -> Tuple[sympy.Symbol, ...]:
    """Symboles x1..xn (réels) partagés par tout le paquet."""
    return tuple(sympy.Symbol(f"{prefix}{i}", real=True) for i in range(1, n + 1))


def contains_flat(expr: sympy.Expr) -> bool:
    return expr.has(flatm)


def compile_expression(expr: sympy.Expr, symbols: Sequence[sympy.Symbol]) -> Callable:
    """
    Compile une expression en fonction numpy vectorisée.

    La fonction renvoyée prend un tableau (N, n) et renvoie un tableau (N,)
    (réel ou complexe selon l'expression).
    """
    raw = sympy.lambdify(list(symbols), expr, modules=NUMERIC_MODULES)

    def evaluate(points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        with np.errstate(all="ignore"):
            values = raw(*pts.T)
        return np.broadcast_to(np.asarray(values), (pts.shape[0],)).copy()

    return evaluate


# ---------------------------------------------------------------------------
# Impression réversible
# ---------------------------------------------------------------------------

class GrammarPrinter(StrPrinter):
    """Imprime une expression dans la grammaire d'entrée (réanalysable)."""

    def _print_flatm(self, expr):
        x, k, m = expr.args
        name = x.name[1:] if isinstance(x, sympy.Symbol) and x.name[1:].isdigit() else None
        arg = name if name is not None else self._print(x)
        if m == 0:
            return f"flat({arg},{k})"
        return f"flatm({arg},{k},{m})"

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_exp(self, expr):
        return f"exp({self._print(expr.args[0])})"

    def _print_Rational(self, expr):
        return f"{expr.p}/{expr.q}"

    def _print_Pow(self, expr, rational=False):
        base, power = expr.as_base_exp()
        text = self._print(base)
        if not (base.is_Symbol or base.is_Function or (base.is_Integer and base >= 0)):
            text = f"({text})"
        if power.is_Integer and power >= 0:
            return f"{text}^{power}"
        return f"{text}^({self._print(power)})"

    def _print_Mul(self, expr):
        coeff, rest = expr.as_coeff_Mul()
        if rest == 1:
            return self._print(coeff)
        parts = []
        for factor in rest.as_ordered_factors():
            text = self._print(factor)
            if factor.is_Add:
                text = f"({text})"
            parts.append(text)
        body = "*".join(parts)
        if coeff == 1:
            return body
        if coeff == -1:
            return f"-{body}"
        return f"{self._print(coeff)}*{body}"

    def _print_Add(self, expr, order=None):
        text = ""
        for i, term in enumerate(expr.as_ordered_terms()):
            negative = term.could_extract_minus_sign()
            body = self._print(-term if negative else term)
            if i == 0:
                text = f"-{body}" if negative else body
            else:
                text += f" - {body}" if negative else f" + {body}"
        return text


def print_expression(expr: sympy.Expr) -> str:
    return GrammarPrinter().doprint(sympy.sympify(expr))


def monomial_text(p: Sequence[int], prefix: str = "x") -> str:
    parts = []
    for i, e in enumerate(p, start=1):
        if e == 1:
            parts.append(f"{prefix}{i}")
        elif e > 1:
            parts.append(f"{prefix}{i}^{e}")
    return "*".join(parts)


def term_text(p: Sequence[int], factor: sympy.Expr, prefix: str = "x") -> str:
    """Texte d'un terme x^p·ψ sans signe de tête négatif géré par l'appelant."""
    mono = monomial_text(p, prefix)
    coeff, rest = sympy.sympify(factor).as_coeff_Mul()
    pieces = []
    if coeff != 1 or (rest == 1 and not mono):
        pieces.append(print_expression(coeff))
    if mono:
        pieces.append(mono)
    if rest != 1:
        text = print_expression(rest)
        pieces.append(f"({text})" if rest.is_Add else text)
    return "*".join(pieces)


def format_terms(terms: Sequence[Tuple[Sequence[int], sympy.Expr]], prefix: str = "x") -> str:
    """Somme Σ x^p·ψ_p imprimée dans la grammaire ("0" pour une somme vide)."""
    if not terms:
        return "0"
    text = ""
    for i, (p, factor) in enumerate(terms):
        negative = factor.could_extract_minus_sign() and not factor.is_Add
        body = term_text(p, -factor if negative else factor, prefix)
        if i == 0:
            text = f"-{body}" if negative else body
        else:
            text += f" - {body}" if negative else f" + {body}"
    return text


# ---------------------------------------------------------------------------
# Représentation f = Σ x^p ψ_p
# ---------------------------------------------------------------------------

Term = Tuple[LatticeVector, sympy.Expr]


def _merge_terms(terms: Sequence[Term]) -> Tuple[Term, ...]:
    """Fusionne les exposants identiques et retire les facteurs nuls."""
    merged: Dict[LatticeVector, sympy.Expr] = {}
    for p, factor in terms:
        merged[p] = merged.get(p, sympy.S.Zero) + factor
    return tuple((p, merged[p]) for p in sorted(merged) if merged[p] != 0)


@dataclass(frozen=True)
class FunctionSpec:
    """
    Phase f(x) = Σ_p x^p·ψ_p(x) donnée par sa représentation.

    `declared` contient éventuellement les générateurs d'un polyèdre P
    déclaré par l'utilisateur pour le test Ê[P](U).
    """

    n: int
    terms: Tuple[Term, ...]
    declared: Optional[Tuple[LatticeVector, ...]] = field(default=None)

    @classmethod
    def from_terms(cls, n: int, terms: Sequence[Tuple[Sequence[int], Any]],
                   declared: Optional[Sequence[Sequence[int]]] = None) -> "FunctionSpec":
        normalized = []
        for p, factor in terms:
            p = tuple(int(c) for c in p)
            if len(p) != n or any(c < 0 for c in p):
                raise ValidationError(f"Exposant invalide {p} pour n={n}", field="exponent", value=p)
            normalized.append((p, sympy.sympify(factor)))
        declared_points = None
        if declared is not None:
            declared_points = tuple(tuple(int(c) for c in q) for q in declared)
        return cls(n=n, terms=_merge_terms(normalized), declared=declared_points)

    @property
    def symbols(self) -> Tuple[sympy.Symbol, ...]:
        return variables(self.n)

    @property
    def exponents(self) -> Tuple[LatticeVector, ...]:
        return tuple(p for p, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def factor(self, p: Sequence[int]) -> sympy.Expr:
        for q, factor in self.terms:
            if q == tuple(p):
                return factor
        return sympy.S.Zero

    def monomial(self, p: Sequence[int]) -> sympy.Expr:
        return sympy.Mul(*(x ** e for x, e in zip(self.symbols, p)))

    @cached_property
    def expression(self) -> sympy.Expr:
        return sympy.Add(*(self.monomial(p) * factor for p, factor in self.terms))

    @cached_property
    def numeric(self) -> Callable:
        return compile_expression(self.expression, self.symbols)

    @cached_property
    def numeric_gradient(self) -> Tuple[Callable, ...]:
        return tuple(compile_expression(sympy.diff(self.expression, x), self.symbols)
                     for x in self.symbols)

    def to_text(self) -> str:
        return format_terms(self.terms)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "n": self.n,
            "terms": [{"exponent": list(p), "factor": print_expression(factor)}
                      for p, factor in self.terms],
        }
        if self.declared is not None:
            data["polyhedron"] = [list(q) for q in self.declared]
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FunctionSpec":
        """
        Construit une phase depuis sa forme JSON {"n": .., "terms": [..]}.

        Raises:
            ValidationError: Champ manquant ou mal typé
            ParseError: Facteur syntaxiquement invalide
        """
        try:
            n = int(data["n"])
            raw_terms = data["terms"]
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError("FunctionSpec JSON invalide: champs 'n' et 'terms' requis",
                                  original_error=e)
        if n < 1:
            raise ValidationError(f"Dimension invalide: {n}", field="n", value=n)
        terms = []
        for entry in raw_terms:
            try:
                exponent = entry["exponent"]
                factor_text = str(entry.get("factor", "1"))
            except (KeyError, TypeError) as e:
                raise ValidationError("Terme JSON invalide", value=entry, original_error=e)
            terms.append((exponent, parse_expression(factor_text, n)))
        return cls.from_terms(n, terms, declared=data.get("polyhedron"))

    def with_terms(self, terms: Sequence[Term]) -> "FunctionSpec":
        return FunctionSpec(n=self.n, terms=_merge_terms(terms), declared=self.declared)

    def substitute(self, mapping: Dict[sympy.Symbol, sympy.Expr]) -> "FunctionSpec":
        """Substitue dans les facteurs seulement (les monômes sont gérés par l'appelant)."""
        return self.with_terms([(p, factor.subs(mapping, simultaneous=True))
                                for p, factor in self.terms])

    def reflect(self, theta: Sequence[int]) -> "FunctionSpec":
        """
        f_θ(x) = f(θx) pour θ ∈ {−1, 1}ⁿ, sans quitter la grammaire.
        """
        if len(theta) != self.n or any(t not in (-1, 1) for t in theta):
            raise ValidationError(f"Réflexion invalide: {tuple(theta)}", field="theta")
        mapping = {x: t * x for x, t in zip(self.symbols, theta)}
        terms = []
        for p, factor in self.terms:
            sign = 1
            for t, e in zip(theta, p):
                sign *= t ** e
            terms.append((p, sign * factor.subs(mapping, simultaneous=True)))
        return self.with_terms(terms)

    def rescale(self, radii: Sequence[float]) -> "FunctionSpec":
        """f_R(x) = f(R·x) pour des R_i > 0 (sert aux intégrales numériques)."""
        if len(radii) != self.n or any(r <= 0 for r in radii):
            raise ValidationError(f"Facteurs d'échelle invalides: {tuple(radii)}", field="radii")
        mapping = {x: sympy.Float(r) * x for x, r in zip(self.symbols, radii)}
        terms = []
        for p, factor in self.terms:
            scale = 1.0
            for r, e in zip(radii, p):
                scale *= float(r) ** e
            terms.append((p, sympy.Float(scale) * factor.subs(mapping, simultaneous=True)))
        return self.with_terms(terms)


# ---------------------------------------------------------------------------
# Analyse syntaxique
# ---------------------------------------------------------------------------

TOKEN_SPEC = [
    ("NUMBER", r"\d+"),
    ("IDENT", r"[A-Za-z_][A-Za-z_0-9]*"),
    ("OP", r"[+\-*/^(),]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("MISMATCH", r"."),
]
TOKEN_REGEX = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """
    Découpe le texte en lexèmes avec ligne et colonne (à partir de 1).

    Raises:
        ParseError: Caractère inattendu
    """
    tokens = []
    line, line_start = 1, 0
    for match in TOKEN_REGEX.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind == "SKIP":
            continue
        if kind == "MISMATCH":
            raise ParseError(f"Caractère inattendu {match.group()!r}", line, column, text)
        tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class ExpressionParser:
    """
    Analyseur descendant récursif de la grammaire des facteurs lisses.

    expr := ["-"] term {("+"|"-") term} ; term := factor {"*" factor} ;
    factor := base ["^" nat] ; base := rational | var | "(" expr ")"
    | "exp" "(" expr ")" | "flat" "(" nat "," nat ")" | "flatm" "(" nat "," nat "," nat ")".
    """

    def __init__(self, text: str, n: int):
        if n < 1:
            raise ValidationError(f"Dimension invalide: {n}", field="n", value=n)
        self.text = text
        self.n = n
        self.symbols = variables(n)
        self.tokens = tokenize(text)
        self.position = 0

    # Primitives
    @property
    def token(self) -> Token:
        return self.tokens[self.position]

    def peek(self, text: str) -> bool:
        return self.token.kind == "OP" and self.token.text == text

    def accept(self, text: str) -> bool:
        if self.peek(text):
            self.position += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.error(f"'{text}' attendu, trouvé {self.token.text or 'fin de texte'!r}")

    def error(self, message: str, token: Optional[Token] = None):
        token = token or self.token
        raise ParseError(message, token.line, token.column, self.text)

    def nat(self) -> int:
        token = self.token
        if token.kind != "NUMBER":
            if self.peek("-"):
                self.error("Puissance ou indice négatif interdit hors flatm")
            self.error(f"Entier naturel attendu, trouvé {token.text or 'fin de texte'!r}")
        self.position += 1
        return int(token.text)

    def variable_index(self) -> int:
        token = self.token
        index = self.nat()
        if not 1 <= index <= self.n:
            raise ValidationError(
                f"Variable x{index} hors limites pour n={self.n} "
                f"(ligne {token.line}, colonne {token.column})",
                field="variable", value=index)
        return index

    # Règles
    def parse(self) -> List[Tuple[int, List[sympy.Expr]]]:
        terms = self.expr_terms()
        if self.token.kind != "EOF":
            self.error(f"Lexème inattendu {self.token.text!r}")
        return terms

    def expr_terms(self) -> List[Tuple[int, List[sympy.Expr]]]:
        sign = -1 if self.accept("-") else 1
        terms = [(sign, self.term())]
        while self.peek("+") or self.peek("-"):
            sign = 1 if self.accept("+") else (self.accept("-") and -1)
            terms.append((sign, self.term()))
        return terms

    def expr(self) -> sympy.Expr:
        return sympy.Add(*(sign * sympy.Mul(*factors) for sign, factors in self.expr_terms()))

    def term(self) -> List[sympy.Expr]:
        factors = [self.factor()]
        while self.accept("*"):
            factors.append(self.factor())
        return factors

    def factor(self) -> sympy.Expr:
        base = self.base()
        if self.accept("^"):
            base = base ** self.nat()
        return base

    def base(self) -> sympy.Expr:
        token = self.token
        if token.kind == "NUMBER" or self.peek("-"):
            return self.rational()
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        if token.kind != "IDENT":
            self.error(f"Expression attendue, trouvé {token.text or 'fin de texte'!r}")
        self.position += 1
        name = token.text
        if re.fullmatch(r"x\d+", name):
            index = int(name[1:])
            if not 1 <= index <= self.n:
                raise ValidationError(
                    f"Variable {name} hors limites pour n={self.n} "
                    f"(ligne {token.line}, colonne {token.column})",
                    field="variable", value=index)
            return self.symbols[index - 1]
        if name == "exp":
            self.expect("(")
            value = self.expr()
            self.expect(")")
            return sympy.exp(value)
        if name in ("flat", "flatm"):
            self.expect("(")
            index = self.variable_index()
            self.expect(",")
            k_token = self.token
            k = self.nat()
            if k < 1:
                self.error("Le paramètre k d'un atome plat doit être ≥ 1", k_token)
            m = 0
            if name == "flatm":
                self.expect(",")
                m = self.nat()
            self.expect(")")
            return flatm(self.symbols[index - 1], k, m)
        self.error(f"Identificateur inconnu {name!r}", token)

    def rational(self) -> sympy.Expr:
        sign = -1 if self.accept("-") else 1
        numerator = self.nat()
        if self.accept("/"):
            denominator_token = self.token
            denominator = self.nat()
            if denominator == 0:
                self.error("Division par zéro", denominator_token)
            return sympy.Rational(sign * numerator, denominator)
        return sympy.Integer(sign * numerator)


def parse_expression(text: str, n: int) -> sympy.Expr:
    """
    Analyse un facteur lisse et renvoie l'expression sympy.

    Raises:
        ParseError: Erreur de syntaxe (ligne/colonne)
        ValidationError: Variable hors limites
    """
    parser = ExpressionParser(text, n)
    value = sympy.Add(*(sign * sympy.Mul(*factors) for sign, factors in parser.parse()))
    return value


def _split_monomial(value: sympy.Expr, symbols: Sequence[sympy.Symbol]) -> Tuple[List[int], sympy.Expr]:
    """Sépare une facteur en partie monôme x^p et partie lisse ψ."""
    exponents = [0] * len(symbols)
    rest = sympy.S.One
    position = {x: i for i, x in enumerate(symbols)}
    for arg in sympy.Mul.make_args(value):
        if arg in position:
            exponents[position[arg]] += 1
        elif arg.is_Pow and arg.base in position and arg.exp.is_Integer and arg.exp > 0:
            exponents[position[arg.base]] += int(arg.exp)
        else:
            rest = rest * arg
    return exponents, rest


def parse_function(text: str, n: int, declared: Optional[Sequence[Sequence[int]]] = None) -> FunctionSpec:
    """
    Analyse une phase écrite dans la grammaire et construit sa représentation.

    Chaque terme de premier niveau est découpé en monôme x^p (facteurs
    x_i^e) et facteur lisse ψ (le reste) ; les exposants égaux sont fusionnés.

    Args:
        text: Texte UTF-8 de la phase
        n: Dimension ambiante
        declared: Générateurs optionnels d'un polyèdre déclaré

    Returns:
        FunctionSpec: La représentation normalisée
    """
    parser = ExpressionParser(text, n)
    terms = []
    for sign, factors in parser.parse():
        exponents = [0] * n
        psi = sympy.Integer(sign)
        for factor in factors:
            part, rest = _split_monomial(factor, parser.symbols)
            exponents = [a + b for a, b in zip(exponents, part)]
            psi = psi * rest
        terms.append((tuple(exponents), psi))
    spec = FunctionSpec.from_terms(n, terms, declared=declared)
    logger.debug(f"Phase analysée: {len(spec.terms)} termes")
    return spec


# ---------------------------------------------------------------------------
# Support de Taylor et appartenance
# ---------------------------------------------------------------------------

def _constant_exponentials(expr: sympy.Expr, symbols: Sequence[sympy.Symbol]) -> sympy.Expr:
    """Remplace chaque exp(g) par la constante exp(g(0))."""
    origin = {x: 0 for x in symbols}
    return expr.replace(lambda e: isinstance(e, sympy.exp),
                        lambda e: sympy.exp(e.args[0].subs(origin)))


def is_nonzero_constant(value: sympy.Expr) -> bool:
    """Test exact de non-nullité, avec repli numérique en précision étendue."""
    value = sympy.sympify(value)
    if value.is_zero is True:
        return False
    if value.is_zero is False:
        return True
    return abs(complex(value.evalf(50))) > 1e-40


def taylor_support(f: FunctionSpec) -> List[LatticeVector]:
    """
    Support de la série de Taylor formelle de f à l'origine.

    Une composante additive contenant un atome plat ne contribue pas ;
    exp(g) ne contribue que par sa constante exp(g(0)), ce qui rend le
    résultat prudent pour des arguments d'exponentielle non constants.
    """
    symbols = f.symbols
    coefficients: Dict[LatticeVector, sympy.Expr] = {}
    for p, factor in f.terms:
        smooth = sympy.expand(_constant_exponentials(factor, symbols))
        regular = sympy.Add(*(c for c in sympy.Add.make_args(smooth) if not contains_flat(c)))
        if regular == 0:
            continue
        poly = sympy.Poly(regular, *symbols)
        for beta, coeff in poly.terms():
            alpha = tuple(a + b for a, b in zip(p, beta))
            coefficients[alpha] = coefficients.get(alpha, sympy.S.Zero) + coeff
    return sorted(alpha for alpha, c in coefficients.items() if is_nonzero_constant(c))


class Verdict(Enum):
    EHAT = "EHat"
    EHATP = "EHatP"
    REJECTED = "Rejected"


@dataclass(frozen=True)
class MembershipReport:
    """
    Certificat d'appartenance d'une représentation.

    Rejected signifie « non certifié par cette représentation », pas
    « hors de la classe ».
    """

    hull_P: LatticePolyhedron
    taylor_polyhedron: LatticePolyhedron
    verdict: Verdict
    certified_polyhedron: Optional[LatticePolyhedron]
    witness: Dict[str, Any]
    tilde_class: bool

    @property
    def certified(self) -> bool:
        return self.verdict is not Verdict.REJECTED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "hull": self.hull_P.to_dict(),
            "taylor_polyhedron": self.taylor_polyhedron.to_dict(),
            "certified_polyhedron": (self.certified_polyhedron.to_dict()
                                     if self.certified_polyhedron is not None else None),
            "witness": self.witness,
            "tilde_class": self.tilde_class,
            "note": "certificat de représentation (conditions suffisantes), pas procédure de décision",
        }


def factor_at_origin(factor: sympy.Expr, symbols: Sequence[sympy.Symbol]) -> sympy.Expr:
    return sympy.sympify(factor).subs({x: 0 for x in symbols})


def check_membership(f: FunctionSpec) -> MembershipReport:
    """
    Certifie f ∈ Ê(U), ou seulement f ∈ Ê[P](U), à partir de la représentation.

    EHat : l'enveloppe des exposants coïncide avec le polyèdre de Taylor et
    tout facteur en un sommet de l'enveloppe est non nul en 0.
    EHatP(P) : tous les exposants sont dans P (déclaré, sinon l'enveloppe)
    et P ≠ R₊ⁿ, cas où la condition ne dit rien.
    """
    symbols = f.symbols
    hull = build_polyhedron(f.exponents, f.n)
    taylor = build_polyhedron(taylor_support(f), f.n)
    tilde = bool(f.terms) and all(
        is_nonzero_constant(factor_at_origin(factor, symbols)) for _, factor in f.terms)

    if f.is_zero:
        witness = {"kind": "empty", "detail": "f ≡ 0 : polyèdre de Newton vide"}
        return MembershipReport(hull, taylor, Verdict.REJECTED, None, witness, False)

    vanishing = [v for v in hull.vertices
                 if not is_nonzero_constant(factor_at_origin(f.factor(v), symbols))]
    if not vanishing and hull == taylor:
        logger.info("Représentation certifiée dans Ê(U)")
        return MembershipReport(hull, taylor, Verdict.EHAT, hull,
                                {"kind": "none"}, tilde)

    reasons: Dict[str, Any] = {}
    if vanishing:
        reasons["vanishing_vertex"] = list(vanishing[0])
        reasons["vanishing_vertices"] = [list(v) for v in vanishing]
    if hull != taylor:
        reasons["hull_vertices"] = [list(v) for v in hull.vertices]
        reasons["taylor_vertices"] = [list(v) for v in taylor.vertices]

    if f.declared is not None:
        declared = build_polyhedron(f.declared, f.n)
        source = "declared"
    else:
        declared = hull
        source = "hull"
    outside = [p for p in f.exponents if not declared.contains(p)]
    if not outside and not declared.is_orthant():
        logger.info(f"Représentation certifiée seulement dans Ê[P](U) (P = {source})")
        witness = {"kind": "ehat_p_only", "polyhedron_source": source, **reasons}
        return MembershipReport(hull, taylor, Verdict.EHATP, declared, witness, tilde)

    if outside:
        reasons["exponent_outside_polyhedron"] = list(outside[0])
    if declared.is_orthant():
        reasons["origin_in_polyhedron"] = True
    kind = "vanishing_vertex_factor" if vanishing else "hull_taylor_mismatch"
    logger.info(f"Représentation non certifiée ({kind})")
    return MembershipReport(hull, taylor, Verdict.REJECTED, None,
                            {"kind": kind, "polyhedron_source": source, **reasons}, tilde)


# ---------------------------------------------------------------------------
# γ-parties, évaluation, dérivation
# ---------------------------------------------------------------------------

def gamma_part(f: FunctionSpec, face: Face, polyhedron: LatticePolyhedron) -> FunctionSpec:
    """
    γ-partie f_γ(x) = Σ_{p ∈ γ} x^p·ψ_p(T_W(γ)(x)).

    Raises:
        DomainError: γ n'est pas une face du polyèdre certifiant
    """
    if not polyhedron.nonempty or make_face(polyhedron, face.vertices, face.V_set) != face:
        raise DomainError(f"{face.describe()} n'est pas une face du polyèdre certifiant")
    symbols = f.symbols
    restriction = {symbols[j]: 0 for j in face.W_set}
    terms = [(p, factor.subs(restriction)) for p, factor in f.terms if face.contains(p, polyhedron)]
    return f.with_terms(terms)


def evaluate(f: FunctionSpec, x: Sequence[float]) -> float:
    """
    Valeur de f en un point.

    Raises:
        DomainError: Point non fini ou de mauvaise dimension
    """
    point = np.asarray(x, dtype=float)
    if point.shape != (f.n,):
        raise DomainError(f"Point de dimension {point.shape} au lieu de ({f.n},)")
    if not np.all(np.isfinite(point)):
        raise DomainError(f"Point non fini: {tuple(point)}")
    return float(np.real(f.numeric(point[None, :])[0]))


def differentiate(f: FunctionSpec, i: int) -> FunctionSpec:
    """
    ∂f/∂x_i (i compté à partir de 1, comme le nom de variable), dans la même représentation.
    """
    if not 1 <= i <= f.n:
        raise ValidationError(f"Indice de dérivation {i} hors de 1..{f.n}", field="i", value=i)
    x = f.symbols[i - 1]
    terms = []
    for p, factor in f.terms:
        if p[i - 1] > 0:
            lowered = tuple(c - 1 if k == i - 1 else c for k, c in enumerate(p))
            terms.append((lowered, p[i - 1] * factor))
        terms.append((p, sympy.diff(factor, x)))
    return f.with_terms(terms)
