#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Point d'entrée principal du projet torasc.

Ce script lit une phase (fichier JSON, fixture ou texte), orchestre les
étapes de l'analyse et écrit un rapport JSON sur la sortie standard ;
les diagnostics partent sur la sortie d'erreur.

Codes de sortie : 0 succès, 2 entrée invalide, 3 refus (hypothèse non
certifiée), 4 budget numérique épuisé, 1 erreur interne.
"""

import argparse
import datetime
import json
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

from src.asymptotics import FORMS, Amplitude
from src.fixtures import FIXTURES, emit_fixture, write_fixtures
from src.pipeline import (
    AnalysisRequest,
    analysis_report,
    analyze_phase,
    coeff_report,
    f_tau_text,
    fan_report,
    fit_report,
    load_function,
    oscillate_report,
    poles_report,
    resolve_report,
    zeta_report,
)
from src.utils.config import Config, get, load_config
from src.utils.error_handling import ProcessingError, TorascError, ValidationError
from src.utils.logger import get_logger, setup_logger
from src.verification import RANDOM_PHASES, run_verification


def _float_list(values: Optional[List[str]]) -> Tuple[float, ...]:
    """Accepte « 50 100 » comme « 50,100 »."""
    if not values:
        return ()
    result = []
    for value in values:
        for part in value.split(","):
            if part.strip():
                try:
                    result.append(float(part))
                except ValueError as e:
                    raise ValidationError(f"Nombre invalide: {part!r}", value=part, original_error=e)
    return tuple(result)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse les arguments de ligne de commande.

    Returns:
        argparse.Namespace: Les arguments parsés
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="Chemin vers un fichier de configuration personnalisé")
    common.add_argument("--debug", action="store_true", help="Active le mode debug avec logs détaillés")
    common.add_argument("--format", choices=["json", "text"], default="json",
                        help="Format du rapport : json (défaut) ou text")
    common.add_argument("--tolerance", type=float, help="Tolérance des quadratures (override config)")
    common.add_argument("--max-boxes", type=int, help="Budget de boîtes des quadratures")
    common.add_argument("--budget-boxes", type=int, help="Budget du test de non-dégénérescence")
    common.add_argument("--nu-max", type=int, help="ν maximal des pôles candidats")
    common.add_argument("--lambda-max", type=int, help="Plus grand entier négatif −λ listé")
    common.add_argument("--y-max", type=float, help="Borne des points de contrôle des cartes")
    common.add_argument("--deterministic", action="store_true",
                        help="Rapports identiques octet par octet (pas de durées)")
    common.add_argument("--seed", type=int, help="Graine des échantillonnages")
    common.add_argument("--amplitude", type=str, help="Amplitude : 'unit' ou JSON {radius, scale, center}")
    common.add_argument("--n", type=int, help="Dimension d'une phase écrite en ligne")

    parser = argparse.ArgumentParser(
        description="torasc - Polyèdres de Newton, résolution torique et asymptotiques d'intégrales oscillantes"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, with_source: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        if with_source:
            sub.add_argument("source", help="Fichier JSON, nom de fixture ou phase en ligne")
        return sub

    command("analyze", "Polyèdre, d, m, τ*, appartenance et non-dégénérescence")
    command("fan", "Éventail normal, subdivision et annotations")
    command("resolve", "Cartes toriques f_σ")
    command("poles", "Pôles candidats et bornes d'ordre")
    coeff = command("coeff", "Coefficients dominants C̃±, C± et terme oscillant")
    coeff.add_argument("--cone", type=int, help="Indice (à partir de 1) du cône maximal utilisé")
    coeff.add_argument("--form", choices=FORMS, default="chart", help="Formule du coefficient")
    coeff.add_argument("--assume-nondegenerate", action="store_true",
                       help="Passe outre un verdict de non-dégénérescence 'refuted' ou 'unknown'")
    zeta = command("zeta", "Z(s; φ) par quadrature")
    zeta.add_argument("--s", nargs="+", help="Valeurs de s (liste)")
    zeta.add_argument("--extrapolate", action="store_true", help="Extrapole ε^m·Z(−1/d + ε) en ε = 0")
    oscillate = command("oscillate", "I(t; φ) par quadrature oscillante")
    oscillate.add_argument("--t", nargs="+", required=True, help="Valeurs de t (liste)")
    oscillate.add_argument("--csv", type=str, help="Écrit la table (t, Re I, Im I, |I|) en CSV")
    fit = command("fit", "Ajustement de la décroissance de |I(t; φ)|")
    fit.add_argument("--t", nargs="+", help="Valeurs de t (sinon t_min..t_max)")
    fit.add_argument("--t-min", type=float, help="Plus petit t (override config)")
    fit.add_argument("--t-max", type=float, help="Plus grand t (override config)")
    fit.add_argument("--samples", type=int, help="Nombre de t log-espacés")
    fit.add_argument("--csv", type=str, help="Écrit la table (t, Re I, Im I, |I|) en CSV")
    verify = command("verify", "Suites de propriétés sur les fixtures", with_source=False)
    verify.add_argument("--random", type=int, default=None, help="Nombre de phases aléatoires")
    fixture = command("fixture", "Émet le JSON d'une fixture", with_source=False)
    fixture.add_argument("name", nargs="?", help=f"Nom parmi {', '.join(FIXTURES)}")
    fixture.add_argument("--write-all", action="store_true", help="Écrit toutes les fixtures dans data/fixtures")

    return parser.parse_args(argv)


def build_request(args: argparse.Namespace) -> AnalysisRequest:
    """Traduit les arguments en AnalysisRequest validée."""
    request = AnalysisRequest(
        command=args.command,
        source=getattr(args, "source", None),
        n=args.n,
        amplitude=args.amplitude,
        tolerance=args.tolerance,
        max_boxes=args.max_boxes,
        budget_boxes=args.budget_boxes,
        nu_max=args.nu_max,
        lambda_max=args.lambda_max,
        y_max=args.y_max,
        deterministic=args.deterministic,
        seed=args.seed,
        cone=getattr(args, "cone", None),
        form=getattr(args, "form", "chart"),
        assume_nondegenerate=getattr(args, "assume_nondegenerate", False),
        s_values=_float_list(getattr(args, "s", None)),
        t_values=_float_list(getattr(args, "t", None)),
        extrapolate=getattr(args, "extrapolate", False),
        t_min=getattr(args, "t_min", None),
        t_max=getattr(args, "t_max", None),
        samples=getattr(args, "samples", None),
        csv_path=getattr(args, "csv", None),
        random_count=getattr(args, "random", None),
    )
    request.apply()
    return request


def setup_environment(args: argparse.Namespace) -> logging.Logger:
    """
    Charge la configuration et configure la journalisation.

    Args:
        args: Arguments de ligne de commande

    Returns:
        logging.Logger: Logger de la session
    """
    if args.config:
        load_config(args.config)
    console_level = logging.DEBUG if args.debug else Config.get_log_level(get("logging.console_level", "INFO"))
    logger = setup_logger(
        logs_dir=get("paths.logs_dir"),
        name="torasc",
        console_level=console_level,
        file_level=Config.get_log_level(get("logging.file_level", "DEBUG")),
        enable_file=bool(get("logging.file_enabled", False)),
    )
    logger.debug(f"Démarrage: {datetime.datetime.now().strftime('%d/%m/%Y %H:%M:%S')}")
    return logger


def run(request: AnalysisRequest) -> Tuple[Dict[str, Any], int]:
    """
    Exécute une commande.

    Returns:
        Tuple: (rapport, code de sortie)
    """
    command = request.command
    if command == "fixture":
        raise ValidationError("La commande fixture est traitée par run_fixture", field="command")
    if command == "verify":
        report = run_verification(seed=request.seed, y_max=request.y_max,
                                  random_count=request.random_count or RANDOM_PHASES)
        return report.to_dict(), 0 if report.passed else 1

    f = load_function(request.source, request.n)
    amplitude = Amplitude.from_spec(request.amplitude, f.n)
    if command == "oscillate":
        return oscillate_report(f, amplitude, request), 0

    needs_fan = command not in ("fit",)
    needs_nondegeneracy = command in ("analyze", "coeff")
    analysis = analyze_phase(f, with_fan=needs_fan, with_nondegeneracy=needs_nondegeneracy)
    if command == "analyze":
        report = analysis_report(analysis)
        if not analysis.membership.certified:
            report["status"] = "refused"
            return report, 3
        report["status"] = "ok"
        report["f_tau_star"] = f_tau_text(analysis)
        return report, 0
    if command == "fan":
        return fan_report(analysis), 0
    if command == "resolve":
        return resolve_report(analysis, request.y_max), 0
    if command == "poles":
        return poles_report(analysis, request.nu_max, request.lambda_max), 0
    if command == "coeff":
        return coeff_report(analysis, amplitude, request), 0
    if command == "zeta":
        return zeta_report(analysis, amplitude, request), 0
    return fit_report(f, amplitude, request, analysis), 0


def run_fixture(args: argparse.Namespace) -> Tuple[str, int]:
    if args.write_all:
        return json.dumps(write_fixtures(), indent=2, sort_keys=True, ensure_ascii=False) + "\n", 0
    if not args.name:
        raise ValidationError("Nom de fixture requis", field="name")
    return emit_fixture(args.name), 0


def format_text(report: Dict[str, Any], indent: int = 0) -> str:
    """Résumé lisible : une ligne par clé, les listes longues résumées."""
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(format_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}: {len(value)} entrées")
            for entry in value[:10]:
                lines.append(f"{pad}  - " + ", ".join(f"{k}={v}" for k, v in entry.items()
                                                     if not isinstance(v, (dict, list))))
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(line for line in lines if line)


def render(report: Dict[str, Any], fmt: str) -> str:
    if fmt == "text":
        return format_text(report) + "\n"
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    """
    Fonction principale d'orchestration.

    Returns:
        int: Code de sortie
    """
    args = parse_arguments(argv)
    try:
        logger = setup_environment(args)
    except TorascError as e:
        sys.stderr.write(f"{e.message}\n")
        return e.exit_code
    logger.info(f"=== TORASC: {args.command.upper()} ===")
    start_time = time.time()
    fmt = args.format

    try:
        if args.command == "fixture":
            output, code = run_fixture(args)
            sys.stdout.write(output)
            return code
        request = build_request(args)
        try:
            report, code = run(request)
        except TorascError:
            raise
        except Exception as e:
            raise ProcessingError(f"Erreur inattendue: {e}", "EXECUTION_FAILED",
                                  source=args.command, original_error=e)
        if not request.deterministic:
            report["elapsed_seconds"] = round(time.time() - start_time, 3)
        sys.stdout.write(render(report, fmt))
        logger.info(f"Commande terminée (code {code})")
        return code
    except TorascError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        logger.debug("Traceback:", exc_info=True)
        sys.stdout.write(render({"status": "error", **e.to_dict()}, fmt))
        return e.exit_code
    except KeyboardInterrupt:
        get_logger("torasc").warning("Interruption par l'utilisateur")
        return 130


if __name__ == "__main__":
    sys.exit(main())
