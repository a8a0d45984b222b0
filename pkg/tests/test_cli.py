import json
import tempfile
import pytest

from pcm_conley.cli import main
from pcm_conley.fixtures import FIXTURES
from pcm_conley.mapfile import MapFileError, dump_map, parse_map
from pcm_conley.pcm_model import validate

JUMP = """\
name: jump
space: {lo: "0", hi: "1"}
pieces:
  - {lo: "0", hi: "1/2", lo_closed: true, hi_closed: false, a: "1", b: "0"}
  - {lo: "1/2", hi: "1", lo_closed: true, hi_closed: true, a: "1/2", b: "1/2"}
"""


@pytest.fixture
def jump_file(tmp_path):
    path = tmp_path / "jump.yaml"
    path.write_text(JUMP)
    return str(path)


def run_json(capsys, *argv):
    status = main([*argv, "--format", "json"])
    return status, json.loads(capsys.readouterr().out)


def test_paper_example(capsys):
    status, r = run_json(capsys, "paper-example")
    assert status == 0
    assert r["schema"] == "pcm-conley/report/1"
    assert r["compatibility"]["status"] == "Certified"
    assert r["index_pair"]["p0"] == 0
    assert r["homology"]["components"] == 5 and r["homology"]["betti"]["0"] == 5
    assert r["index"]["trivial"] is False
    assert r["wazewski"]["witness"]["orbit"] == ["2/3"]
    assert r["adjoints"] == 64


def test_index_on_jump_map(capsys, jump_file):
    status, r = run_json(capsys, "index", jump_file, "--neighborhood", "0,3/5")
    assert status == 0
    assert r["isolation"]["status"] == "Certified"
    assert r["index"]["degrees"]["0"]["matrix"] == [[1]]


def test_validate_overlap(capsys, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(JUMP.replace('hi_closed: false', 'hi_closed: true'))
    status, r = run_json(capsys, "validate", str(path))
    assert status == 1
    assert r["map"]["violations"] == ["disjoint: overlap at 1/2"]


def test_validate_good_map(capsys, jump_file):
    assert run_json(capsys, "validate", jump_file)[0] == 0


def test_compatibility_violation_exit_code(capsys):
    m = FIXTURES["adjoint-witness"][0]()
    status, r = run_json(capsys, "isolate", _write(m), "--neighborhood", "1/4,1/2")
    assert status == 2
    assert r["isolation"]["status"] == "Violated"
    assert r["isolation"]["evidence"]["invariant_orbit"] == ["1/2"]


def test_refinement_exhausted_exit_code(capsys):
    m = FIXTURES["repeller"][0]()
    status, r = run_json(capsys, "index", _write(m), "--neighborhood=-1/2,1/2", "--grid-depth", "2",
                         "--max-refinements", "0")
    assert status == 3 and r["outcome"] in ("refine", "unknown")


def test_refinement_loop_recovers(capsys):
    m = FIXTURES["repeller"][0]()
    status, r = run_json(capsys, "index", _write(m), "--neighborhood=-1/2,1/2", "--grid-depth", "2")
    assert status == 0
    assert [a["outcome"] for a in r["attempts"]][-1] == "ok" and len(r["attempts"]) > 1
    assert r["index"]["degrees"]["1"]["matrix"] == [[1]]


def _write(m):
    f = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
    f.write(dump_map(m))
    f.close()
    return f.name


def test_other_subcommands(capsys, jump_file):
    status, r = run_json(capsys, "adjoints", jump_file)
    assert status == 0 and r["count"] == 2 and r["discontinuities"] == ["1/2"]
    status, r = run_json(capsys, "partition", jump_file)
    assert r["minimal_partition"]["piece_count"] == 2 and "interval" in r["minimal_partition"]["note"]
    status = main(["code", jump_file, "--point", "2/5", "--point", "1/2", "--code-depth", "3"])
    assert status == 0
    assert capsys.readouterr().out == "2/5: 0,0,0\n1/2: 1,1,1\n"


def test_wazewski_command(capsys):
    m = FIXTURES["adjoint-witness"][0]()
    status, r = run_json(capsys, "wazewski", _write(m), "--neighborhood", "1/4,3/4")
    assert status == 0
    assert r["wazewski"]["disjunct"] == 2 and r["wazewski"]["witness"]["map"] == "{1/2->0}"


def test_dot_and_csv_exports(capsys, tmp_path, jump_file):
    dot, csv = tmp_path / "g.dot", tmp_path / "g.csv"
    main(["index", jump_file, "--neighborhood", "0,3/5", "--emit-dot", str(dot), "--emit-csv", str(csv)])
    capsys.readouterr()
    assert dot.read_text().startswith("digraph lifted {")
    assert csv.read_text().splitlines()[0].endswith("cinv,p1,p0")


@pytest.mark.parametrize(
    "argv",
    [
        ["index", "{file}", "--neighborhood", "0,2"],
        ["index", "{file}", "--neighborhood", "0"],
        ["index", "/nonexistent/map.yaml", "--neighborhood", "0,1"],
    ],
)
def test_usage_errors(capsys, jump_file, argv):
    assert main([a.replace("{file}", jump_file) for a in argv]) == 1
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text,fragment",
    [
        ('space: {lo: "0"}\npieces: []\n', "line 1: 'space' is missing field 'hi'"),
        ('space: {lo: "0", hi: "1"}\npieces:\n  - {lo: "0", hi: "0.5", a: "1", b: "0"}\n', "line 3: field 'hi'"),
        ('space: {lo: "0", hi: "1"}\npieces:\n  - {lo: "0", hi: "1", a: "1"}\n', "piece 0 is missing field 'b'"),
        ('space: {lo: "0", hi: "1"}\npieces:\n  - {lo: "0", hi: "1", a: "1", b: "0", lo_closed: maybe}\n', "lo_closed"),
    ],
)
def test_parse_errors_name_line_and_field(text, fragment):
    with pytest.raises(MapFileError, match=fragment):
        parse_map(text)


def test_output_is_deterministic(capsys):
    main(["paper-example", "--format", "json"])
    first = capsys.readouterr().out
    main(["paper-example", "--format", "json"])
    assert capsys.readouterr().out == first


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_round_trip(name, capsys):
    mk, N = FIXTURES[name]
    m = mk()
    again = parse_map(dump_map(m))
    assert again == m
    assert validate(again) == validate(m)
    reports = []
    for path in (_write(m), _write(again)):
        main(["index", path, f"--neighborhood={N.lo},{N.hi}", "--format", "json"])
        reports.append(capsys.readouterr().out)
    assert reports[0] == reports[1]


def test_text_output(capsys, jump_file):
    assert main(["index", jump_file, "--neighborhood", "0,3/5"]) == 0
    out = capsys.readouterr().out
    assert "schema: pcm-conley/report/1" in out and "status: Certified" in out
