# src/utils/logger.py
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union

import colorama


class ColorFormatter(logging.Formatter):
    """Formatter personnalisé pour l'affichage coloré des logs dans la console"""

    COLORS = {
        'DEBUG': colorama.Fore.LIGHTBLACK_EX,  # Gris
        'INFO': colorama.Fore.WHITE,  # Blanc
        'WARNING': colorama.Fore.YELLOW,  # Orange
        'ERROR': colorama.Fore.RED + colorama.Style.BRIGHT,  # Rouge vif
        'CRITICAL': colorama.Fore.WHITE + colorama.Back.RED,  # Texte blanc sur fond rouge
    }
    RESET = colorama.Style.RESET_ALL

    def format(self, record):
        color = self.COLORS.get(record.levelname, self.RESET)
        return f"{color}{super().format(record)}{self.RESET}"


class SafeRotatingFileHandler(RotatingFileHandler):
    """Gestion robuste des fichiers de log avec création automatique des répertoires"""

    def __init__(self, filename: Union[str, Path], **kwargs):
        path = Path(filename).absolute()
        path.parent.mkdir(parents=True, exist_ok=True)
        super().__init__(str(path), **kwargs)


LOG_FORMAT = (
    '%(asctime)s | %(levelname)-8s | '
    '%(threadName)s | '
    '%(name)s.%(funcName)s:%(lineno)d | '
    '%(message)s'
)


def setup_logger(logs_dir: Union[str, Path],
                 name: str = "torasc",
                 *,
                 console_level: int = logging.INFO,
                 file_level: int = logging.DEBUG,
                 max_bytes: int = 10 * 1024 * 1024,  # 10 MB
                 backup_count: int = 10,
                 log_format: Optional[str] = None,
                 date_format: str = "%Y-%m-%d %H:%M:%S",
                 enable_colors: bool = True,
                 enable_file: bool = False) -> logging.Logger:
    """
    Configure et retourne le logger racine du projet.

    Les modules de `src` loguent sous `src.<module>`, qui ne propage pas
    vers 'torasc' : les handlers sont donc posés sur le logger racine et
    sur le logger nommé, la sortie console part toujours sur stderr
    (stdout est réservé au rapport JSON).

    Args:
        logs_dir: Répertoire de stockage des logs
        name: Nom unique du logger
        console_level: Niveau de log pour la console
        file_level: Niveau de log pour les fichiers
        max_bytes: Taille max des fichiers avant rotation
        backup_count: Nombre de fichiers de backup à conserver
        log_format: Format personnalisé des logs
        date_format: Format de date/heure
        enable_colors: Active les couleurs dans la console
        enable_file: Active le fichier de log avec rotation

    Returns:
        logging.Logger: Logger configuré
    """
    logger = logging.getLogger(name)
    root = logging.getLogger()
    if getattr(root, "_torasc_configured", False):
        return logger  # Évite la réinitialisation multiple

    log_format = log_format or LOG_FORMAT
    levels = [console_level] + ([file_level] if enable_file else [])
    root.setLevel(min(levels))

    if enable_colors:
        colorama.just_fix_windows_console()
        formatter = ColorFormatter(log_format, date_format)
    else:
        formatter = logging.Formatter(log_format, date_format)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(console_level)
    root.addHandler(console_handler)

    if enable_file:
        log_file = Path(logs_dir) / f"{name}.log"
        file_handler = SafeRotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding="utf-8"
        )
        file_handler.setFormatter(logging.Formatter(log_format, date_format))
        file_handler.setLevel(file_level)
        root.addHandler(file_handler)

    root._torasc_configured = True
    logger.debug("Logger initialisé avec succès")
    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Récupère un logger configuré ou le logger racine"""
    return logging.getLogger(name or __name__)
