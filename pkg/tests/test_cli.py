import json

import pandas as pd
import pytest

from dyck_lab import main, parse_args, split_tokens


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_emits_json(capsys):
    code, out, _ = run(capsys, "gen", "k4")
    assert code == 0
    payload = json.loads(out)
    assert payload["family"] == "k4"
    assert (payload["n"], payload["m"]) == (4, 6)


def test_gen_emits_graph6(capsys):
    code, out, _ = run(capsys, "--emit", "g6", "gen", "k3")
    assert code == 0
    assert out == "Bw\n"


def test_gen_emits_edge_list_and_dot(capsys):
    _, edges, _ = run(capsys, "--emit", "edges", "gen", "k3")
    assert "0 1" in edges
    _, dot, _ = run(capsys, "--emit", "dot", "gen", "k3")
    assert dot.startswith("graph")


def test_csv_flattens_payload(capsys, tmp_path):
    code, out, _ = run(capsys, "--emit", "csv", "kc", "k5")
    assert code == 0
    path = tmp_path / "kc.csv"
    path.write_text(out)
    assert bool(pd.read_csv(path).loc[0, "kuratowski_connected"])


def test_graph_format_needs_graph_verb(capsys):
    code, _, err = run(capsys, "--emit", "dot", "kc", "k5")
    assert code == 3
    assert "config error" in err


def test_unknown_token_is_config_error(capsys):
    code, _, _ = run(capsys, "gen", "zzz")
    assert code == 3


def test_kc_reports_violation(capsys):
    code, out, _ = run(capsys, "kc", "j")
    assert code == 0
    payload = json.loads(out)
    assert payload["kuratowski_connected"] is False
    assert payload["violation"]["disk_side"] is None


def test_sobs(capsys):
    code, out, _ = run(capsys, "sobs", "--members", "0,0")
    assert code == 0
    assert json.loads(out)["sobs"] == ["S(0,1)", "S(1,0)"]
    code, _, _ = run(capsys, "sobs")
    assert code == 3


def test_refusal_exit_code_and_stats(capsys, tmp_path):
    code, _, err = run(capsys, "--budget", "1", "minor", "k6", "petersen")
    assert code == 2
    assert "refused" in err
    stats = pd.read_csv(tmp_path / "reports" / "cli_stats.csv")
    assert list(stats["Outcome"]) == ["refused"]


def test_core_verb(capsys):
    code, out, _ = run(capsys, "core", "k3,3", "--a", "0", "1", "2", "3", "--b", "0", "1", "2", "4", "5")
    assert code == 0
    assert json.loads(out)["status"] == "none"


def test_precondition_failure_exit_code(capsys):
    code, _, err = run(capsys, "core", "k5", "--a", "0", "1", "2", "3", "--b", "0", "1", "2", "4")
    assert code == 1
    assert "precondition" in err


def test_core_accepts_comma_lists(capsys):
    code, out, _ = run(capsys, "core", "--in", "k3,3", "--a", "0,1,2,3", "--b", "0,1,2,4,5")
    assert code == 0
    assert json.loads(out)["status"] == "none"


@pytest.mark.parametrize("values, expected", [
    (["k5,k33"], ["k5", "k33"]),
    (["k5,k3,3"], ["k5", "k3,3"]),
    (["grid:3,4,dyck:2,1,0"], ["grid:3,4", "dyck:2,1,0"]),
    (["k5", "ring:k4:0,1,2"], ["k5", "ring:k4:0,1,2"]),
    ([], []),
])
def test_split_tokens(values, expected):
    assert split_tokens(values) == expected


def test_disk_takes_a_comma_list():
    args = parse_args(["disk", "--in", "k4", "--x", "0,1,2"])
    assert args.graph == "k4"
    assert args.x == [0, 1, 2]


@pytest.mark.parametrize("x, expected", [("0,1,2", True), ("0,1,2,3", False)])
def test_disk_verb(capsys, x, expected):
    code, out, _ = run(capsys, "disk", "--in", "k4", "--x", x)
    assert code == 0
    assert json.loads(out)["disk_embeddable"] is expected


def test_sobs_splits_pattern_list(capsys):
    code, out, _ = run(capsys, "sobs", "--z", "k5,k33")
    assert code == 0
    assert json.loads(out)["sobs"] == ["S(0,1)", "S(1,0)"]


def test_gen_from_family_flags_writes_tags_sidecar(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--family", "dyck", "--k", "2", "--h", "1", "--c", "0",
                       "--emit", "g6", "--tags", "--tags-dir", str(tmp_path))
    assert code == 0
    assert out[0] == chr(63 + 32)
    sidecar = json.loads((tmp_path / "dyck_2_1_0.tags.json").read_text())
    assert sidecar["family"] == "dyck:2,1,0"
    assert sidecar["tags"]


def test_gen_rejects_bad_family_flags(capsys):
    code, _, err = run(capsys, "gen", "--family", "dyck", "--k", "2", "--c", "3")
    assert code == 3
    assert "config error" in err


def test_minor_with_named_inputs(capsys):
    code, out, _ = run(capsys, "minor", "--pattern", "k4", "--host", "k5")
    assert code == 0
    assert json.loads(out)["minor"] is True


def test_budget_after_the_verb(capsys):
    code, _, _ = run(capsys, "minor", "--pattern", "k6", "--host", "petersen", "--budget", "1")
    assert code == 2


def test_pack_flags():
    args = parse_args(["pack", "--z", "k5,k3,3", "--host", "j", "--k", "2", "--half", "--mixed"])
    assert args.z == ["k5", "k3,3"]
    assert args.multiplicity == 2
    assert args.kind == "mixed"
    assert parse_args(["ep", "--z", "k5", "--host", "j", "--kmax", "3"]).k_max == 3


def test_pack_verb(capsys):
    code, out, _ = run(capsys, "pack", "--z", "k5", "--host", "j", "--k", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "absent"
    assert payload["upper"] == 1


def test_cover_verb(capsys):
    code, out, _ = run(capsys, "cover", "--z", "k5", "--host", "j", "--cap", "2")
    assert code == 0
    assert json.loads(out)["size"] == 1


def test_embeds_and_genus_take_in(capsys):
    code, out, _ = run(capsys, "embeds", "--in", "k5", "--surface", "1,0")
    assert code == 0
    assert json.loads(out)["embeds"] is True
    code, out, _ = run(capsys, "genus", "--in", "k5")
    assert code == 0
    assert json.loads(out)["orientable_euler_genus"] == 2


@pytest.mark.parametrize("argv", [
    ["disk"],
    ["minor", "--pattern", "k4"],
    ["frobnicate"],
    ["genus", "--in", "k4", "--eg-max", "many"],
    ["disk", "--in", "k4", "--x", "a,b"],
    ["pack", "--host", "j"],
])
def test_usage_errors_exit_with_config_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert "config error" in err
