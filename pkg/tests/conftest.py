import pytest
from hypothesis import settings

from mazebdd.fixtures import fixture_text
from mazebdd.scenario import parse_scenario
from mazebdd.site_model import load_site_model

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def shop_graph():
    return load_site_model(fixture_text("shop.site"))


@pytest.fixture(scope="session")
def shop_spec():
    return parse_scenario(fixture_text("place-order.scenario"))


@pytest.fixture(scope="session")
def market_graph():
    return load_site_model(fixture_text("market.site"))


@pytest.fixture(scope="session")
def market_spec():
    return parse_scenario(fixture_text("market-order.scenario"))


@pytest.fixture(scope="session")
def branching_graph():
    return load_site_model(fixture_text("branching.site"))
