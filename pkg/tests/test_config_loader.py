import pytest

from modules.config_loader import LabSettings, get_settings, load_claims, load_claims_file, load_toml
from modules.errors import ConfigError


def write(tmp_path, text, name="claims.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_defaults():
    settings = LabSettings.from_env({})
    assert settings.budget == 5_000_000
    assert settings.workers == 4
    assert settings.max_block_edges == 24
    assert settings.iso_limit == 16


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DYCK_LAB_BUDGET", "1234")
    monkeypatch.setenv("DYCK_LAB_WORKERS", "2")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.budget == 1234
    assert settings.workers == 2
    assert settings.report_dir.endswith("reports")


@pytest.mark.parametrize("var, value", [("DYCK_LAB_BUDGET", "0"), ("DYCK_LAB_WORKERS", "many")])
def test_bad_environment_raises(var, value):
    with pytest.raises(ConfigError):
        LabSettings.from_env({var: value})


@pytest.mark.parametrize("suite", ["paper", "smoke", "full"])
def test_bundled_suites_load(suite):
    claims = load_claims(suite)
    assert claims
    assert len({c.id for c in claims}) == len(claims)


def test_full_includes_the_other_suites():
    full = {c.id for c in load_claims("full")}
    assert {c.id for c in load_claims("smoke")} <= full
    assert {c.id for c in load_claims("paper")} <= full


def test_unknown_suite():
    with pytest.raises(ConfigError):
        load_claims("nightly")


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        load_toml(tmp_path / "absent.toml")
    with pytest.raises(ConfigError):
        load_toml(write(tmp_path, "claim = [", "broken.toml"))


def test_claim_file_validation(tmp_path):
    good = write(tmp_path, """
[[claim]]
id = "k5-kc"
operation = "kuratowski_connected"
inputs = { graph = "k5" }
expect = { kind = "exact", value = true }
""")
    [claim] = load_claims_file(good)
    assert claim.id == "k5-kc"
    assert claim.expect.value is True


@pytest.mark.parametrize("body", [
    # unknown operation
    '[[claim]]\nid = "x"\noperation = "levitate"\nexpect = { kind = "property" }\n',
    # exact without a value
    '[[claim]]\nid = "x"\noperation = "counts"\nexpect = { kind = "exact" }\n',
    # bound without limits
    '[[claim]]\nid = "x"\noperation = "counts"\nexpect = { kind = "bound" }\n',
    # non-positive budget
    '[[claim]]\nid = "x"\noperation = "counts"\nbudget = 0\nexpect = { kind = "property" }\n',
    # duplicate ids
    '[[claim]]\nid = "x"\noperation = "counts"\nexpect = { kind = "property" }\n' * 2,
    # no claims at all
    'title = "empty"\n',
])
def test_bad_claim_files(tmp_path, body):
    with pytest.raises(ConfigError):
        load_claims_file(write(tmp_path, body))
