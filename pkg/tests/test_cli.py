import json
from pathlib import Path

import pytest

from infgraph import cli, library

PRES = Path(__file__).resolve().parent.parent / "presentations"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_trace_accepts_abc(capsys):
    code, out, _ = run(capsys, "trace", PRES / "fig2.json", "--initial", "()", "--final", "bot", "--word", "abc")
    assert code == 0 and "accepted" in out


def test_trace_rejects_with_exit_one(capsys):
    code, out, _ = run(capsys, "trace", PRES / "fig2.json", "--initial", "()", "--final", "bot", "--word", "aabbc")
    assert code == 1 and "rejected" in out


def test_ladder_arc(capsys):
    assert run(capsys, "arc", PRES / "ladder.json", "BBA", "c", "BA")[0] == 0
    assert run(capsys, "arc", PRES / "ladder.json", "A", "b", "AB")[0] == 1


def test_view_of_length_zero(capsys):
    code, out, _ = run(capsys, "view", PRES / "fig2.json", "--max-len", "0", "--dot")
    assert code == 0
    assert out.startswith("digraph") and out.count("label=") == 1 and "->" not in out


@pytest.mark.parametrize("where", ["global", "verb"])
def test_json_output(capsys, where):
    argv = ["arc", PRES / "fig2.json", "001", "b", "011"]
    argv = ["--json", *argv] if where == "global" else [*argv, "--json"]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and json.loads(out) == {"arc": True}


def test_successors_and_sample(capsys):
    code, out, _ = run(capsys, "--json", "successors", PRES / "fig2.json", "", "a", "--max-len", "3")
    assert code == 0 and json.loads(out)["words"] == ["0"]
    code, out, _ = run(capsys, "sample", PRES / "fig2.json", "--final", "bot", "--max-len", "6")
    assert code == 0 and out.split() == ["abc", "aabbcc"]


def test_generate_and_colour(capsys, tmp_path):
    code, out, _ = run(capsys, "--json", "generate", PRES / "triangle.json", "--level", "2")
    assert code == 0 and len(json.loads(out)["arcs"]) == 9
    spec = library.triangle_grammar_spec()
    spec["terminals"].update({"s": 1, "r": 1})
    spec["axiom"]["hyperarcs"].append(["s", "v1"])
    source, target = tmp_path / "source.json", tmp_path / "coloured.json"
    source.write_text(json.dumps(spec))
    code, _, _ = run(capsys, "colour-access", source, "--source", "s", "--new", "r", "-o", target)
    assert code == 0 and run(capsys, "validate", target)[0] == 0
    code, out, _ = run(capsys, "--json", "generate", target, "--level", "2")
    graph = json.loads(out)
    assert {v for c, v in graph["colours"] if c == "r"} == set(graph["vertices"])


def test_pcp(capsys):
    code, out, _ = run(capsys, "pcp", "--pairs", "ab:a,b:bb")
    assert code == 0 and "step 7" in out


def test_rational_round_trip_files(capsys, tmp_path):
    chr_file, back = tmp_path / "anbncn_chr.json", tmp_path / "anbncn_back.json"
    assert run(capsys, "from-rational", PRES / "fig2.json", "-o", chr_file)[0] == 0
    assert run(capsys, "to-rational", chr_file, "-o", back)[0] == 0
    code, out, _ = run(capsys, "iso", PRES / "fig2.json", back, "--max-len", "3")
    assert code == 0 and "isomorphic" in out


@pytest.mark.parametrize("argv", [["frobnicate"], ["arc"], ["view", "/no/such/file.json"],
                                  ["arc", str(PRES / "fig2.json"), "2", "a", "0"]])
def test_usage_and_validation_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_resource_cap_exits_two(capsys, monkeypatch):
    monkeypatch.setenv("INFGRAPH_MAX_STATES", "2")
    code, _, err = run(capsys, "view", PRES / "fig2.json", "--max-len", "3")
    assert code == 2 and err


def test_output_is_byte_identical(capsys):
    argv = ["chr-generate", PRES / "pcp_ab_a_b_bb.json", "--steps", "7", "--dot"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0
