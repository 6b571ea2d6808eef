"""
Module de gestion de la configuration du projet torasc.

Ce module gère le chargement et l'accès à la configuration du projet,
avec la résolution des références ${...} et les surcharges par variables
d'environnement (TORASC_THREADS).
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from src.utils.error_handling import ConfigurationError

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "config" / "config.yaml"

# Variables d'environnement reconnues -> chemin dans la configuration
ENV_OVERRIDES = {
    "TORASC_THREADS": ("numerics.threads", int),
}


class Config:
    """Classe de gestion de la configuration"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialise la configuration depuis un fichier YAML.

        Args:
            config_path: Chemin vers le fichier de configuration. Si None, utilise le chemin par défaut.

        Raises:
            ConfigurationError: Si le fichier est absent ou illisible
        """
        if config_path is None:
            config_path = DEFAULT_CONFIG_PATH
        self.config_path = Path(config_path)

        try:
            yaml_content = self.config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(
                f"Fichier de configuration illisible: {self.config_path}",
                config_key="config_path",
                original_error=e,
            )

        # Remplacer __BASE_DIR__ par le chemin absolu du projet
        base_dir = str(Path(__file__).resolve().parent.parent.parent)
        yaml_content = yaml_content.replace("__BASE_DIR__", base_dir.replace("\\", "/"))

        try:
            self.config = yaml.safe_load(yaml_content) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(
                f"YAML invalide dans {self.config_path}", original_error=e
            )

        # Résoudre les références de type ${...}
        self._resolve_references(self.config)
        self._apply_environment()

    def _apply_environment(self) -> None:
        """Applique les surcharges issues des variables d'environnement."""
        for env_name, (path, cast) in ENV_OVERRIDES.items():
            raw = os.environ.get(env_name)
            if raw is None:
                continue
            try:
                value = cast(raw)
            except ValueError as e:
                raise ConfigurationError(
                    f"Valeur invalide pour {env_name}: {raw!r}",
                    config_key=path,
                    original_error=e,
                )
            self.set(path, value)

    @staticmethod
    def get_log_level(level_name: str) -> int:
        """
        Convertit un nom de niveau ('DEBUG', 'INFO', ...) en niveau logging.

        Args:
            level_name: Nom du niveau tel qu'écrit dans config.yaml

        Returns:
            int: Niveau de log correspondant (INFO par défaut)
        """
        return {
            "DEBUG": logging.DEBUG,
            "INFO": logging.INFO,
            "WARNING": logging.WARNING,
            "ERROR": logging.ERROR,
        }.get(str(level_name).upper(), logging.INFO)

    def _resolve_references(self, config_dict: Dict[str, Any]) -> None:
        """
        Résout les références dans la configuration (comme ${paths.base_dir}).

        Args:
            config_dict: Dictionnaire de configuration à traiter
        """
        for key, value in config_dict.items():
            if isinstance(value, dict):
                self._resolve_references(value)
            elif isinstance(value, str):
                # Les références peuvent elles-mêmes contenir des références
                for _ in range(8):
                    matches = re.findall(r"\${([\w.]+)}", value)
                    if not matches:
                        break
                    for match in matches:
                        ref_value = self._get_nested_value(match)
                        if ref_value is None:
                            raise ConfigurationError(
                                f"Référence inconnue ${{{match}}} dans '{key}'",
                                config_key=match,
                            )
                        value = value.replace(f"${{{match}}}", str(ref_value))
                config_dict[key] = value

    def _get_nested_value(self, path: str) -> Optional[Any]:
        """
        Récupère une valeur imbriquée à partir d'un chemin comme 'paths.base_dir'.

        Args:
            path: Chemin d'accès à la valeur dans la configuration

        Returns:
            Any: Valeur trouvée ou None si le chemin n'existe pas
        """
        current = self.config
        for part in path.split("."):
            if isinstance(current, dict) and part in current:
                current = current[part]
            else:
                return None
        return current

    def get(self, path: str, default: Any = None) -> Any:
        """
        Récupère une valeur de configuration par son chemin.

        Args:
            path: Chemin d'accès à la valeur dans la configuration
            default: Valeur par défaut si le chemin n'existe pas

        Returns:
            Any: Valeur de configuration ou valeur par défaut
        """
        value = self._get_nested_value(path)
        return value if value is not None else default

    def require(self, path: str) -> Any:
        """Comme get(), mais lève ConfigurationError si la clé manque."""
        value = self._get_nested_value(path)
        if value is None:
            raise ConfigurationError(f"Clé de configuration manquante: {path}", config_key=path)
        return value

    def set(self, path: str, value: Any) -> None:
        """Écrit une valeur (utilisé pour les surcharges d'environnement)."""
        parts = path.split(".")
        current = self.config
        for part in parts[:-1]:
            current = current.setdefault(part, {})
        current[parts[-1]] = value


# Instance globale de la configuration
config = Config()


def load_config(config_path: Optional[str] = None) -> Config:
    """
    Remplace la configuration globale (option --config de la ligne de commande).

    Args:
        config_path: Chemin du fichier YAML à charger

    Returns:
        Config: La nouvelle configuration globale
    """
    global config
    config = Config(config_path)
    return config


# Fonction d'accès pour importer directement des valeurs
def get(path: str, default: Any = None) -> Any:
    """
    Fonction utilitaire pour accéder à la configuration globale.

    Args:
        path: Chemin d'accès à la valeur dans la configuration
        default: Valeur par défaut si le chemin n'existe pas

    Returns:
        Any: Valeur de configuration ou valeur par défaut
    """
    return config.get(path, default)


def override(path: str, value: Any) -> None:
    """
    Surcharge une valeur de la configuration globale (options de la ligne de commande).

    Args:
        path: Chemin d'accès à la valeur dans la configuration
        value: Nouvelle valeur, ignorée si None
    """
    if value is not None:
        config.set(path, value)
