import pytest

from modules.config_loader import get_settings
from modules.family_gen import FamilySpec, generate
from modules.graph_core import complete_bipartite, complete_graph, cycle_graph
from modules.search_budget import SearchBudget


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Every test sees default settings and writes reports under its own tmp dir."""
    for var in ("DYCK_LAB_BUDGET", "DYCK_LAB_WORKERS", "DYCK_LAB_MAX_BLOCK_EDGES",
                "DYCK_LAB_ISO_LIMIT", "DYCK_LAB_SEED"):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("DYCK_LAB_REPORT_DIR", str(tmp_path / "reports"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def budget():
    return SearchBudget(2_000_000, "test")


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def k33():
    return complete_bipartite(3, 3)


@pytest.fixture
def c10():
    return cycle_graph(10)


@pytest.fixture
def torus_grid():
    return generate(FamilySpec(family="dyck", k=2, h=1, c=0))
