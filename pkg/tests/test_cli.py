import json
from pathlib import Path

import pytest

from crdelp.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_inspect_example1(capsys):
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp")
    assert code == 0
    lines = out.splitlines()
    assert "arguments: 6" in lines
    assert "conflicts: 1" in lines
    assert "resolutions: 4" in lines
    assert "attacks: 12" in lines
    assert lines[-1] == "total: yes"


def test_inspect_explicit_strategy_file(capsys):
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp",
                       "--strategy", SAMPLES / "example1.strategy.json")
    assert code == 0 and "resolutions: 4" in out.splitlines()
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp",
                       "--strategy", SAMPLES / "example1.rho1.json")
    assert code == 0 and out.splitlines()[-1] == "total: yes"


def test_inspect_empty_program(capsys, tmp_path):
    code, out, _ = run(capsys, "inspect", write(tmp_path, "e.delp", ""))
    assert code == 0
    assert out.splitlines() == ["arguments: 0", "conflicts: 0", "resolutions: 0",
                                "attacks: 0", "total: yes"]


def test_inspect_partial_strategy_is_not_total(capsys):
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp", "--strategy", "empty")
    assert code == 0 and out.splitlines()[-1] == "total: no"


def test_inspect_malformed_strategy(capsys, tmp_path):
    bad = write(tmp_path, "bad.json", '{"resolutions": [{"conflict": ["[=> a]"]}]}')
    code, _, err = run(capsys, "inspect", SAMPLES / "example1.delp", "--strategy", bad)
    assert code == 2 and err.startswith("error:")
    code, _, _ = run(capsys, "inspect", SAMPLES / "example1.delp",
                     "--strategy", write(tmp_path, "junk.json", "{not json"))
    assert code == 2


def test_inspect_parse_error_and_missing_file(capsys, tmp_path):
    assert run(capsys, "inspect", write(tmp_path, "p.delp", "h <- a"))[0] == 2
    assert run(capsys, "inspect", tmp_path / "missing.delp")[0] == 2


def test_inspect_json_and_dot(capsys):
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["total"] is True
    assert len(doc["arguments"]) == 6 and len(doc["strategy"]["resolutions"]) == 4
    code, out, _ = run(capsys, "inspect", SAMPLES / "example1.delp", "--format", "dot")
    assert out.startswith("digraph") and sum(" -> r" in l for l in out.splitlines()) == 12


def test_extensions_example3(capsys):
    code, out, _ = run(capsys, "extensions", SAMPLES / "example1.delp", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    outputs = {frozenset(e["output"]) for e in doc["complete"]}
    assert outputs == {frozenset({"b", "c", "d", "-h"}), frozenset({"a", "c", "d", "-h"}),
                       frozenset({"a", "b", "d", "h"}), frozenset({"a", "b", "c", "h"}),
                       frozenset()}
    assert len(doc["complete"]) == 5
    assert doc["grounded"] == [{"members": [], "output": []}]
    text = run(capsys, "extensions", SAMPLES / "example1.delp")[1]
    assert "complete: 5" in text.splitlines()


def test_extensions_empty_strategy(capsys):
    code, out, _ = run(capsys, "extensions", SAMPLES / "example1.delp", "--strategy", "empty",
                       "--format", "json")
    assert code == 0
    assert [e["members"] for e in json.loads(out)["complete"]] == [[]]


def test_extensions_size_guard(capsys, tmp_path):
    # 15 independent rebuttals, two resolutions each
    prog = write(tmp_path, "big.delp", "".join(f"a{i} -< . -a{i} -< .\n" for i in range(15)))
    code, _, err = run(capsys, "extensions", prog)
    assert code == 3 and "error:" in err
    assert "resolutions: 30" in run(capsys, "inspect", prog)[1].splitlines()


@pytest.mark.parametrize("mode, code, verdict", [("skeptical", 1, "no"), ("credulous", 0, "yes")])
def test_query_example4_both_engines(capsys, mode, code, verdict):
    c, out, _ = run(capsys, "query", SAMPLES / "example4.delp", "a", "--mode", mode,
                    "--engine", "both")
    assert c == code
    assert out.splitlines()[-1] == f"RESULT: {verdict}"


def test_query_traces(capsys):
    _, _, err = run(capsys, "query", SAMPLES / "example4.delp", "a", "--mode", "credulous")
    assert err.splitlines()[0] == "m1 = (P, _, {a -< .})"
    _, _, err = run(capsys, "query", SAMPLES / "example4.delp", "a")
    assert err.startswith("argument [=> a] fails:")


@pytest.mark.parametrize("mode", ["skeptical", "credulous"])
def test_query_strict_fact(capsys, tmp_path, mode):
    prog = write(tmp_path, "f.delp", "a <- .")
    code, out, _ = run(capsys, "query", prog, "a", "--mode", mode, "--engine", "both")
    assert code == 0 and out == "RESULT: yes\n"


def test_query_unknown_literal(capsys):
    code, _, err = run(capsys, "query", SAMPLES / "example4.delp", "zz")
    assert code == 2 and "zz" in err


def test_query_json(capsys):
    code, out, _ = run(capsys, "query", SAMPLES / "example4.delp", "a", "--mode", "credulous",
                       "--engine", "both", "--format", "json")
    body, result = out.rsplit("}\n", 1)
    doc = json.loads(body + "}")
    assert result == "RESULT: yes\n"
    assert doc["result"] == "yes" and doc["oracle"] is True
    assert doc["game"]["root"]["player"] == "PRO"


def test_mcs_example8(capsys):
    for mode in ("skeptical", "credulous"):
        code, out, err = run(capsys, "mcs", SAMPLES / "example8" / "system.json", "a",
                             "--mode", mode)
        assert code == 0 and out == "RESULT: yes\n"
        assert "query b -> C2" in err and ": no" in err


def test_mcs_example7_cycle(capsys):
    code, _, err = run(capsys, "mcs", SAMPLES / "example7" / "system.json", "a")
    assert code == 4
    assert "cycle: C1 C2" in err.splitlines()


def test_mcs_example6_compare(capsys):
    for lit in ["a", "b", "c", "d", "h", "-h"]:
        for mode in ("skeptical", "credulous"):
            code, out, err = run(capsys, "mcs", "--mode", mode, "--compare-monolithic",
                                 SAMPLES / "example6" / "system.json", "--", lit)
            assert code in (0, 1), (lit, mode, err)
            assert "agrees" in err


def test_mcs_json_round_trip(capsys):
    code, out, _ = run(capsys, "mcs", SAMPLES / "example8" / "system.json", "a", "--format", "json")
    body, result = out.rsplit("}\n", 1)
    doc = json.loads(body + "}")
    assert result == "RESULT: yes\n"
    assert json.dumps(doc, indent=2, sort_keys=True) + "\n" == body + "}\n"
    assert doc["success"] is True
