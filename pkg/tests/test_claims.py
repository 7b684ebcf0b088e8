import json

import pandas as pd
import pytest

from modules.claims import (EXIT_FAIL, EXIT_PASS, EXIT_REFUSED, OPERATIONS, ClaimSpec, Report, exit_code_for,
                            run_claim, verify_suite)
from modules.errors import ConfigError


def claim(**fields):
    return ClaimSpec.model_validate(fields)


def test_exact_claim_passes():
    report = run_claim(claim(id="svg1-counts", operation="counts", inputs={"family": "svg:1"},
                             expect={"kind": "exact", "value": {"n": 4, "m": 6}}))
    assert report.status == "pass"
    assert report.computed == {"n": 4, "m": 6}


def test_wrong_expectation_fails():
    report = run_claim(claim(id="k3-g6", operation="graph6", inputs={"graph": "k3"},
                             expect={"kind": "exact", "value": "Bx"}))
    assert report.status == "fail"
    assert report.computed == "Bw"


def test_formula_counts_property():
    report = run_claim(claim(id="grid-formula", operation="counts", inputs={"family": "grid:3,4", "formula": True},
                             expect={"kind": "property"}))
    assert report.status == "pass"
    assert report.certificate["counts"] == {"n": 12, "m": 17}


def test_pack_claim_carries_certificate():
    report = run_claim(claim(id="k5-in-k6", operation="pack", inputs={"z": ["k5"], "host": "k6", "k": 1},
                             expect={"kind": "exact", "value": "found"}))
    assert report.status == "pass"
    assert report.certificate["certificate"]["size"] == 1


def test_small_budget_is_refused_not_failed():
    report = run_claim(claim(id="k6-in-petersen", operation="minor",
                             inputs={"pattern": "k6", "host": "petersen"},
                             expect={"kind": "exact", "value": False}, budget=1))
    assert report.status == "refused"
    assert report.computed is None
    assert report.search_stats["refusals"] >= 1


def test_raises_expectation():
    report = run_claim(claim(id="core-bad-sep", operation="core",
                             inputs={"graph": "k5", "a": [0, 1, 2, 3], "b": [0, 1, 2, 4]},
                             expect={"kind": "raises", "value": "PreconditionError"}))
    assert report.status == "pass"
    assert report.computed == "PreconditionError"
    assert "separation" in report.note


def test_raises_expectation_fails_on_normal_return():
    report = run_claim(claim(id="k5-kc", operation="kuratowski_connected", inputs={"graph": "k5"},
                             expect={"kind": "raises", "value": "PreconditionError"}))
    assert report.status == "fail"


def test_malformed_inputs_are_config_errors():
    with pytest.raises(ConfigError):
        run_claim(claim(id="no-graph", operation="kuratowski_connected", inputs={},
                        expect={"kind": "exact", "value": True}))


def test_sobs_claim():
    report = run_claim(claim(id="sobs-klein", operation="sobs_of_members", inputs={"members": ["0,2"]},
                             expect={"kind": "exact", "value": ["S(1,0)"]}))
    assert report.status == "pass"


@pytest.mark.parametrize("statuses, code", [
    (["pass", "pass"], EXIT_PASS),
    (["pass", "refused"], EXIT_REFUSED),
    (["refused", "fail"], EXIT_FAIL),
    ([], EXIT_PASS),
])
def test_exit_codes(statuses, code):
    assert exit_code_for([Report(claim_id=str(i), status=s) for i, s in enumerate(statuses)]) == code


def test_verify_suite_writes_reports(tmp_path):
    claims = [
        claim(id="kc-k33", operation="kuratowski_connected", inputs={"graph": "k3,3"},
              expect={"kind": "exact", "value": True}),
        claim(id="kc-j", operation="kuratowski_connected", inputs={"graph": "j"},
              expect={"kind": "exact", "value": False}),
        claim(id="iso", operation="isomorphic", inputs={"a": "mobius:6", "b": "k3,3"},
              expect={"kind": "exact", "value": True}),
    ]
    reports, code = verify_suite("custom", workers=2, report_dir=tmp_path, claims=claims)
    assert code == EXIT_PASS
    assert [r.claim_id for r in reports] == ["kc-k33", "kc-j", "iso"]
    table = pd.read_csv(tmp_path / "custom.csv")
    assert list(table["Status"]) == ["pass"] * 3
    payload = json.loads((tmp_path / "custom.json").read_text())
    assert payload["suite"] == "custom"
    summary = pd.read_csv(tmp_path / "summary.csv")
    assert summary.loc[0, "Passed"] == 3


def test_verify_suite_uses_configured_report_dir(tmp_path):
    claims = [claim(id="g6", operation="graph6", inputs={"decode": "Bw"},
                    expect={"kind": "exact", "value": {"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}})]
    _, code = verify_suite("one", claims=claims)
    assert code == EXIT_PASS
    assert (tmp_path / "reports" / "one.csv").exists()


def test_unexpected_error_fails_only_its_claim(monkeypatch, tmp_path):
    def broken(inputs, budget):
        raise ValueError("crosscap count out of range")

    monkeypatch.setitem(OPERATIONS, "genus_table", broken)
    claims = [
        claim(id="broken-genus", operation="genus_table", inputs={"graphs": ["k5"]},
              expect={"kind": "exact", "value": 2}),
        claim(id="kc-k33", operation="kuratowski_connected", inputs={"graph": "k3,3"},
              expect={"kind": "exact", "value": True}),
    ]
    reports, code = verify_suite("mixed", workers=2, report_dir=tmp_path, claims=claims)
    assert [r.status for r in reports] == ["fail", "pass"]
    assert reports[0].computed == "ValueError"
    assert "crosscap count out of range" in reports[0].note
    assert code == EXIT_FAIL


@pytest.mark.parametrize("operation, inputs, graphs", [
    ("embedder_oracle", {"max_edges": 5}, 1 + 1 + 3 + 5 + 12),
    ("disk", {"max_edges": 4}, 1 + 2 + 5 + 11),
])
def test_oracle_sweeps_cover_every_class(operation, inputs, graphs):
    report = run_claim(claim(id=f"{operation}-sweep", operation=operation, inputs=inputs,
                             expect={"kind": "property"}))
    assert report.status == "pass"
    assert report.computed["graphs"] == graphs


def test_disk_sweep_checks_every_boundary_set():
    report = run_claim(claim(id="disk-two-edges", operation="disk", inputs={"max_edges": 2},
                             expect={"kind": "property"}))
    # K2: 4 subsets; P3: 8; 2K2: 16.
    assert report.computed["instances"] == 4 + 8 + 16


def test_smoke_suite_passes(tmp_path):
    reports, code = verify_suite("smoke", report_dir=tmp_path)
    failing = [(r.claim_id, r.status, r.note) for r in reports if r.status != "pass"]
    assert failing == []
    assert code == EXIT_PASS


@pytest.mark.slow
def test_paper_suite_passes(tmp_path):
    reports, code = verify_suite("paper", report_dir=tmp_path)
    assert [r.claim_id for r in reports if r.status != "pass"] == []
    assert code == EXIT_PASS
