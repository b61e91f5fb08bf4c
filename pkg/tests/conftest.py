import random

import pytest

from hardcore_ratios import config
from hardcore_ratios.exact_arith import GaussianRational
from hardcore_ratios.fast_impl import design_implementer, search_fast_implementer
from hardcore_ratios.fast_impl.sources import CatalogPairSource

LAMBDA0 = GaussianRational(-1, 1)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def implementer():
    """Certified value-only implementer at lambda0 = -1+i, shared by the pipeline tests."""
    return design_implementer(LAMBDA0, 3)


@pytest.fixture(scope="session")
def catalog_source():
    """Catalog source over trees with at most 12 vertices at lambda0 = -1+i."""
    source = CatalogPairSource({})
    source.prepare(LAMBDA0, 3, None)
    return source


@pytest.fixture(scope="session")
def tree_implementer():
    """Certified implementer at lambda0 = -1+i whose pairs are backed by trees."""
    return search_fast_implementer(LAMBDA0, 3, seed=0)


@pytest.fixture
def config_home(tmp_path, monkeypatch):
    path = tmp_path / "hardcore" / "config.json"
    monkeypatch.setattr(config, "CONFIG_PATH", str(path))
    return path
