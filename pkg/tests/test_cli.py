import csv
import io
import json

import numpy as np
import pytest

from gaussnet import __version__
from gaussnet.cli import main
from gaussnet.errors import ConfigError
from gaussnet.network import chain_example
from gaussnet.report import dumps, format_float, parse_config

TRITTERS = [{"kind": "tritter", "gamma": 0.5}] * 3


def chain_doc(unitary=None, command="verify-network"):
    u = unitary or {"design": "I"}
    return {
        "command": command,
        "sources": TRITTERS,
        "operations": [{"modes": [3, 4], "unitary": u}, {"modes": [6, 7], "unitary": u}],
    }


def run_cli(tmp_path, doc, *flags, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    out = tmp_path / "out.txt"
    code = main(["--config", str(path), "--output", str(out), *flags])
    return code, out.read_text() if out.exists() else None


def test_minimal_ggqc_config():
    cfg = parse_config('{"command": "ggqc", "sources": [{"kind": "tritter", "gamma": 0.5}]}')
    assert cfg.command == "ggqc"
    assert cfg.spec.sources[0].params == {"gamma": 0.5}


def test_chain_document_matches_constructor():
    cfg = parse_config(json.dumps(chain_doc()))
    ref = chain_example(0.5)
    assert sum(s.build().n for s in cfg.spec.sources) == 9
    assert [op.modes for op in cfg.spec.operations] == [op.modes for op in ref.operations]
    assert cfg.spec.operations == ref.operations


@pytest.mark.parametrize(
    "doc,path",
    [
        ({"command": "ggqc", "sources": TRITTERS, "bogus": 1}, "$.bogus"),
        ({"command": "ggqc", "sources": [{"kind": "tritter", "gamma": 0.5, "phase": 0}]}, "$.sources[0].phase"),
        ({"command": "ggqc", "sources": [{"kind": "tritter", "gamma": -0.5}]}, "$.sources[0].gamma"),
        ({"command": "ggqc", "sources": TRITTERS, "operations": [{"modes": [2, 2], "unitary": {"xi": 1}}]}, "$.operations[0].modes"),
        ({"command": "ggqc", "sources": TRITTERS, "operations": [{"modes": [1, 10], "unitary": {"xi": 1}}]}, "$.operations[0].modes"),
        ({"command": "ggqc", "sources": TRITTERS, "operations": [{"modes": [1, 4], "unitary": {"type": "I", "lambda": -1}}]}, "$.operations[0].unitary"),
        ({"command": "ggqc", "sources": TRITTERS, "options": {"colour": 1}}, "$.options.colour"),
        ({"command": "fly", "sources": TRITTERS}, "$.command"),
        ({"command": "sweep", "sources": TRITTERS, "options": {"sweep_type": "I"}}, "$.options.grid"),
    ],
)
def test_semantic_errors_are_path_qualified(doc, path):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path == path


def test_syntax_error_reports_position():
    with pytest.raises(ConfigError) as info:
        parse_config('{"command": "ggqc",\n  "sources": [,]}')
    assert info.value.line == 2
    assert info.value.column == 15


def test_operation_encodings():
    ops = [
        {"modes": [1, 4], "unitary": {"type": "IV", "lambda": 0.5, "lambda2": -0.5}},
        {"modes": [2, 5], "unitary": {"xi": 0.3}},
        {"modes": [3, 6], "unitary": {"rows": np.eye(4).tolist()}},
        {"modes": [4, 7], "unitary": {"design": "II", "rule": "condition", "margin": 1e-3}},
    ]
    cfg = parse_config(json.dumps({"command": "ggqc", "sources": TRITTERS, "operations": ops}))
    assert len(cfg.spec.operations) == 4


def test_explicit_rows_checked_symplectic(tmp_path):
    doc = chain_doc({"rows": (2 * np.eye(4)).tolist()})
    code, out = run_cli(tmp_path, doc)
    assert code == 2 and out is None


def test_verify_network_report(tmp_path):
    code, out = run_cli(tmp_path, chain_doc({"design": "I", "rule": "attain"}))
    assert code == 0
    rep = json.loads(out)
    assert rep["command"] == "verify-network"
    assert rep["version"] == __version__
    assert rep["seed"] == 0
    assert abs(rep["results"]["gap"]) <= 1e-6
    assert rep["results"]["eq9_ok"] == [True, True]
    assert len(rep["inputs_digest"]) == 64


def test_report_is_byte_identical(tmp_path):
    _, a = run_cli(tmp_path, chain_doc(), "--seed", "5")
    _, b = run_cli(tmp_path, chain_doc(), "--seed", "5")
    assert a == b
    assert a.endswith("\n")


def test_digest_tracks_inputs(tmp_path):
    _, a = run_cli(tmp_path, chain_doc(), "--seed", "5")
    _, b = run_cli(tmp_path, chain_doc(), "--seed", "6")
    assert json.loads(a)["inputs_digest"] != json.loads(b)["inputs_digest"]


def test_classify_bare_matrix(tmp_path):
    code, out = run_cli(tmp_path, "[[0,0,1,0],[0,0,0,1],[-1,0,0,0],[0,-1,0,0]]")
    assert code == 0
    assert json.loads(out)["results"]["type"] == "V"


def test_classify_object(tmp_path):
    code, out = run_cli(tmp_path, {"command": "classify", "matrix": np.eye(4).tolist()})
    assert json.loads(out)["results"]["type"] == "III"


def test_classify_nonsymplectic_exit_two(tmp_path, capsys):
    code, out = run_cli(tmp_path, {"command": "classify", "matrix": (2 * np.eye(4)).tolist()})
    assert code == 2 and out is None
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "not-symplectic"


def test_unphysical_source_exit_two(tmp_path, capsys):
    doc = {"command": "ggqc", "sources": [{"kind": "two_mode_standard", "a": 1, "b": 1, "c": 1, "d": 1}]}
    code, _ = run_cli(tmp_path, doc)
    assert code == 2
    err = json.loads(capsys.readouterr().err)["error"]
    assert err["code"] == "not-physical"
    assert "eigenvalue" in err


def test_config_error_exit_one(tmp_path, capsys):
    code, _ = run_cli(tmp_path, '{"command": "ggqc", "sources": [}')
    assert code == 1
    err = json.loads(capsys.readouterr().err)["error"]
    assert err["code"] == "config" and err["line"] == 1


def test_missing_config_flag(capsys):
    assert main([]) == 1
    assert json.loads(capsys.readouterr().err)["error"]["code"] == "usage"


def test_unreadable_config(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "missing.json")]) == 1


def test_command_mismatch(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(chain_doc()))
    assert main(["ggqc", "--config", str(path)]) == 1


def test_ggqc_of_product_sources(tmp_path):
    code, out = run_cli(tmp_path, {"command": "ggqc", "sources": TRITTERS})
    assert code == 0
    assert abs(json.loads(out)["results"]["value"]) <= 1e-12


def test_full_table_flag(tmp_path):
    _, out = run_cli(tmp_path, {"command": "ggqc", "sources": TRITTERS[:1]}, "--full-table")
    table = json.loads(out)["results"]["table"]
    assert [row["alpha"] for row in table] == [[1], [1, 2], [1, 3]]


def test_design_command(tmp_path):
    doc = {"command": "design", "design": {"type": "I", "gamma1": 2.0, "gamma2": 2.0}}
    code, out = run_cli(tmp_path, doc)
    res = json.loads(out)["results"]
    assert code == 0
    assert res["threshold"] == pytest.approx((np.sqrt(2) - 1) / 2)
    assert res["eq9_ok"] is True


def test_design_rejects_type_five(tmp_path):
    code, _ = run_cli(tmp_path, {"command": "design", "design": {"type": "V", "gamma1": 2.0, "gamma2": 2.0}})
    assert code == 1


def test_sweep_csv(tmp_path):
    doc = chain_doc(command="sweep")
    doc["options"] = {"sweep_type": "I", "grid": [0.0, 0.5, 1.0]}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "ggqc", "eq9", "gap"]
    assert [r[0] for r in rows[1:]] == ["0.0", "0.5", "1.0"]
    assert rows[1][2] == "false" and rows[3][2] == "true"


def test_sweep_json_format(tmp_path):
    doc = chain_doc(command="sweep")
    doc["options"] = {"sweep_type": "I", "grid": {"start": 0, "stop": 1, "num": 3}}
    code, out = run_cli(tmp_path, doc, "--format", "json")
    assert [r["lambda"] for r in json.loads(out)["results"]] == [0.0, 0.5, 1.0]


def test_csv_only_for_sweep(tmp_path):
    code, _ = run_cli(tmp_path, chain_doc(), "--format", "csv")
    assert code == 1


def test_search_option(tmp_path):
    doc = chain_doc()
    doc["options"] = {"search": True, "design_rules": ["attain"]}
    code, out = run_cli(tmp_path, doc, "--samples", "10", "--seed", "2")
    res = json.loads(out)["results"]["search"]
    assert code == 0
    assert abs(res["gap"]) <= 1e-6
    assert res["best_value"] <= res["bound"] + 1e-9


def test_floats_round_trip_at_17_digits():
    values = [0.1, 1 / 3, np.pi * 1e-7, 2.0**-40, 1e300, 0.79848424843866428]
    text = dumps({"v": values})
    assert json.loads(text)["v"] == values
    assert dumps(json.loads(text)) == text


def test_float_format():
    assert format_float(1.0) == "1.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(float("nan")) == "null"


def test_dumps_sorted_and_newline():
    text = dumps({"b": 1, "a": [True, None, "é"]})
    assert text.index('"a"') < text.index('"b"')
    assert "é" in text and text.endswith("}\n")
