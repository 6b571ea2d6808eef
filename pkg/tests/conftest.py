"""
Fixtures pytest communes : configuration rechargée après chaque test,
phases de référence et amplitude unité.
"""

import logging

import pytest

from src.asymptotics import Amplitude
from src.funcspec import parse_function
from src.pipeline import analyze_phase
from src.utils.config import load_config


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    # setup_logger ne pose pas de handler pendant les tests (capture pytest)
    logging.getLogger()._torasc_configured = True
    yield


@pytest.fixture(autouse=True)
def fresh_config():
    """Les commandes surchargent la configuration globale : on la recharge."""
    load_config()
    yield
    load_config()


@pytest.fixture
def circle():
    return parse_function("x1^2 + x2^2", 2)


@pytest.fixture
def monomial():
    return parse_function("x1^2*x2^2", 2)


@pytest.fixture
def cusp():
    # éventail normal non unimodulaire (rayon (2, 3))
    return parse_function("x1^3 + x2^2", 2)


@pytest.fixture
def circle_analysis(circle):
    return analyze_phase(circle)


@pytest.fixture
def monomial_analysis(monomial):
    return analyze_phase(monomial)


@pytest.fixture
def unit2():
    return Amplitude.unit(2)
