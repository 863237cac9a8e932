from __future__ import annotations

import copy
import json

import pytest
from hypothesis import given, strategies as st

from omegarb import oracle
from omegarb.cli_io import SCHEMA, canonical, dumps, from_document, load, loads, to_document
from omegarb.cli_io.cli import main
from omegarb.errors import SchemaError, SemigroupNotAssociative
from omegarb.omega_maps import OmegaMultiMap
from omegarb.structures import AbsoluteRBSystem

FIXTURE_NAMES = ["trivial_k", "z2_family", "zero_system", "minus_lambda_id", "relative_z2",
                 "deformation_k", "deformation_nontrivial"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def _no_numbers(obj, key=None):
    if key == "document":
        return True
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return True
    if isinstance(obj, (int, float)):
        return False
    if isinstance(obj, dict):
        return all(_no_numbers(v, k) for k, v in obj.items())
    return all(_no_numbers(v) for v in obj)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip(fixtures_dir, name):
    doc = json.loads((fixtures_dir / f"{name}.json").read_text())
    prob = from_document(doc)
    again = json.loads(dumps(prob))
    assert canonical(again) == canonical(doc)
    assert loads(json.dumps(doc)).relative == ("module" in doc)


def test_to_document_of_random_systems(rng):
    for i in range(6):
        s = oracle.random_relative_system(rng) if i % 2 else oracle.random_absolute_system(rng)
        back = from_document(to_document(s)).system
        assert back == s


def test_schema_pointer(fixtures_dir):
    doc = json.loads((fixtures_dir / "trivial_k.json").read_text())
    doc["T"]["e"][0][0] = 0.5
    with pytest.raises(SchemaError) as e:
        from_document(doc)
    assert "/T/e/0/0" in str(e.value)


def test_non_associative_table(tmp_path, capsys, fixtures_dir):
    doc = json.loads((fixtures_dir / "z2_family.json").read_text())
    doc["semigroup"]["table"] = [[1, 0], [0, 0]]
    with pytest.raises(SemigroupNotAssociative):
        from_document(copy.deepcopy(doc))
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, rep = run_json(capsys, "validate", p)
    assert code == 2 and rep["status"] == "error"
    assert rep["error"] == "SemigroupNotAssociative"


def test_relative_complex_needs_module(capsys, fixtures_dir):
    code, rep = run_json(capsys, "cohomology", fixtures_dir / "trivial_k.json", "--complex", "relrba")
    assert code == 2 and rep["error"] == "ShapeError"
    code, rep = run_json(capsys, "cohomology", fixtures_dir / "trivial_k.json", "--complex", "relrba",
                         "--regular")
    assert code == 0


def test_k_cohomology_table(capsys, fixtures_dir):
    code, rep = run_json(capsys, "cohomology", fixtures_dir / "trivial_k.json")
    assert code == 0
    assert [r["dim_H"] for r in rep["table"]] == ["0", "1", "1"]
    assert _no_numbers(rep)


def test_z2_defaults_from_commands_block(capsys, fixtures_dir):
    code, rep = run_json(capsys, "cohomology", fixtures_dir / "z2_family.json")
    assert code == 0
    assert [r["dim_H"] for r in rep["table"]] == ["0", "2", "4"]


def test_validate_minus_lambda_id(capsys, fixtures_dir):
    code, rep = run_json(capsys, "validate", fixtures_dir / "minus_lambda_id.json")
    assert code == 0 and rep["ok"] is True and rep["witnesses"] == []


def test_validate_failure_exit_code(tmp_path, capsys, fixtures_dir):
    doc = json.loads((fixtures_dir / "minus_lambda_id.json").read_text())
    doc["T"]["e"] = [["1"]]
    p = tmp_path / "bad_T.json"
    p.write_text(json.dumps(doc))
    code, rep = run_json(capsys, "validate", p)
    assert code == 1 and rep["status"] == "fail"
    assert rep["witnesses"][0]["identity"] == "Rota-Baxter"


def test_deform_verify_constant(tmp_path, capsys, fixtures_dir):
    doc = json.loads((fixtures_dir / "trivial_k.json").read_text())
    doc["deformation"] = {"order": 2}
    p = tmp_path / "const.json"
    p.write_text(json.dumps(doc))
    code, rep = run_json(capsys, "deform", "verify", p)
    assert code == 0
    code, rep = run_json(capsys, "deform", "infinitesimal", p)
    assert code == 0


def test_deform_trivialize(capsys, fixtures_dir):
    assert run(capsys, "deform", "trivialize", fixtures_dir / "deformation_k.json")[0] == 0
    assert run(capsys, "deform", "trivialize", fixtures_dir / "deformation_nontrivial.json")[0] == 1


@pytest.mark.parametrize("argv", [
    ("validate", "relative_z2.json"),
    ("mc-residual", "z2_family.json"),
    ("les-check", "z2_family.json"),
    ("cohomology", "relative_z2.json", "--complex", "relrba", "--max-degree", "2"),
])
def test_reports_deterministic(capsys, fixtures_dir, argv):
    args = (argv[0], fixtures_dir / argv[1]) + argv[2:]
    c1, o1 = run(capsys, *args)
    c2, o2 = run(capsys, *args)
    assert c1 == c2 == 0 and o1 == o2
    assert _no_numbers(json.loads(o1))


def test_text_format(capsys, fixtures_dir):
    code, out = run(capsys, "--format", "text", "les-check", fixtures_dir / "trivial_k.json")
    assert code == 0
    assert out.startswith("[PASS] les-check")
    code, out = run(capsys, "validate", fixtures_dir / "missing.json", "--format", "text")
    assert code == 2 and out.startswith("[ERROR]")


def test_degree_cap_is_input_error(capsys, fixtures_dir):
    code, rep = run_json(capsys, "cohomology", fixtures_dir / "relative_z2.json", "--complex", "relrba",
                         "--max-degree", "5")
    assert code == 2 and rep["error"] == "DegreeCapExceeded"


def test_oracle_search_out(tmp_path, capsys, fixtures_dir):
    code, rep = run_json(capsys, "oracle", "search", fixtures_dir / "minus_lambda_id.json",
                         "--out", tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("*.json"))
    assert len(files) == 2  # T = 0 and T = -1
    for f in files:
        assert load(f).system.validate().ok


def test_oracle_random_document(capsys):
    for extra in ((), ("--relative",), ("--invalid",)):
        code, rep = run_json(capsys, "--seed", "3", "oracle", "random", *extra)
        assert code == 0
        prob = from_document(rep["document"])
        assert prob.system.validate().ok == ("--invalid" not in extra)
    assert run(capsys, "--seed", "3", "oracle", "random")[1] == run(capsys, "--seed", "3", "oracle", "random")[1]


def test_bracket_command(capsys, fixtures_dir):
    code, rep = run_json(capsys, "bracket", fixtures_dir / "z2_family.json", "mc", "mc")
    assert code == 0
    code, rep = run_json(capsys, "bracket", fixtures_dir / "z2_family.json", "pi")
    assert code == 2


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=4))
def test_weight_strings_round_trip(values):
    S = oracle.semigroup("trivial")
    for v in values:
        s = AbsoluteRBSystem(oracle.algebra(S, "k"), v, OmegaMultiMap.zeros(S, 1, (1,)))
        doc = to_document(s)
        assert doc["weight"] == str(v)
        assert from_document(doc).system.weight == v


def test_schema_is_draft_2020():
    assert SCHEMA["$schema"].endswith("2020-12/schema")
