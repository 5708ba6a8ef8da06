import json
import subprocess
import sys
from pathlib import Path

import pytest

from invsub import fixtures
from invsub.cli import main
from invsub.exact import Matrix
from invsub.jordan import jordan_matrix
from invsub.subspace import Subspace

GOLDEN = Path(__file__).parent / "golden"


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def example_c(tmp_path):
    f = fixtures.load("C")
    a = write(tmp_path / "a.json", jordan_matrix(f.structure).to_text())
    chains = write(tmp_path / "chains.json", f.spec("M1").to_data())
    return f, a, chains


def test_construct_with_chains(example_c, capsys):
    f, a, chains = example_c
    assert main(["construct", "--input", a, "--chains", chains]) == 0
    m = Matrix.from_json(capsys.readouterr().out)
    assert m == f.expected("M1", "M")


def test_construct_with_subspace(tmp_path, capsys):
    a = write(tmp_path / "a.json", [["1", "1", "0"], ["0", "1", "0"], ["0", "0", "2"]])
    sub = write(tmp_path / "s.json", [["1", "0"], ["0", "0"], ["0", "1"]])
    for method in ("construct", "rowreduce"):
        assert main(["construct", "--input", a, "--subspace", sub, "--method", method]) == 0
        n_mat = Matrix.from_json(capsys.readouterr().out)
        assert Subspace.kernel(n_mat) == Subspace(3, [[1, 0, 0], [0, 0, 1]])


def test_construction_then_verify(example_c, tmp_path, capsys):
    _, a, chains = example_c
    out = str(tmp_path / "c.json")
    assert main(["construct", "--input", a, "--chains", chains, "--emit", "construction", "--output", out]) == 0
    assert main(["verify", "--input", out, "--matrix", a]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")

    data = json.loads(Path(out).read_text())
    data["M"][0][3] = "5"
    bad = write(tmp_path / "bad.json", data)
    assert main(["verify", "--input", bad]) == 1
    err = capsys.readouterr().err
    assert "bad.json: M differs from P Z T^-1 P^t at entry (1, 4)" in err


def test_range(tmp_path, capsys):
    a = write(tmp_path / "a.json", [["0", "1"], ["0", "0"]])
    sub = write(tmp_path / "s.json", [["1"], ["0"]])
    assert main(["range", "--input", a, "--subspace", sub]) == 0
    r = Matrix.from_json(capsys.readouterr().out)
    assert Subspace.image(r) == Subspace(2, [[1, 0]])


def test_lattice_dot_and_json(tmp_path, capsys):
    a = write(tmp_path / "a.json", jordan_matrix(fixtures.load("D").structure).to_text())
    assert main(["lattice", "--input", a]) == 0
    assert capsys.readouterr().out == (GOLDEN / "lattice_3_1.dot").read_text()
    assert main(["lattice", "--input", a, "--emit", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["nodes"]) == 9


def test_jordanize(tmp_path, capsys):
    a = write(tmp_path / "a.json", [["2", "1"], ["0", "2"]])
    assert main(["jordanize", "--input", a]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["J"] == [["2", "1"], ["0", "2"]]


def test_demo_goldens(capsys):
    assert main(["demo", "exampleD", "--emit", "dot"]) == 0
    assert capsys.readouterr().out == (GOLDEN / "lattice_3_1.dot").read_text()
    assert main(["demo", "C"]) == 0
    assert capsys.readouterr().out == (GOLDEN / "demo_C.txt").read_text()


@pytest.mark.parametrize(
    "argv, code, message",
    [
        (["construct", "--input", "missing.json", "--subspace", "x.json"], 2, "cannot read input file missing.json"),
        (["demo", "exampleQ"], 2, "unknown example"),
        (["construct"], 2, "construct needs --input"),
    ],
)
def test_error_codes(argv, code, message, capsys):
    assert main(argv) == code
    assert message in capsys.readouterr().err


def test_domain_errors(tmp_path, capsys):
    a = write(tmp_path / "a.json", [["1", "1"], ["0", "1"]])
    sub = write(tmp_path / "s.json", [["0"], ["1"]])
    assert main(["construct", "--input", a, "--subspace", sub]) == 1
    assert "not invariant" in capsys.readouterr().err
    rot = write(tmp_path / "r.json", [["0", "2"], ["1", "0"]])
    assert main(["lattice", "--input", rot]) == 1
    assert "irreducible factor" in capsys.readouterr().err
    assert main(["lattice", "--input", rot, "--eigenvalues", "1,2"]) == 1


def test_malformed_files(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text("[[1, 2")
    assert main(["jordanize", "--input", str(junk)]) == 2
    assert "not valid JSON" in capsys.readouterr().err
    rect = write(tmp_path / "rect.json", [["1", "2"]])
    assert main(["jordanize", "--input", rect]) == 2
    assert "square" in capsys.readouterr().err
    words = write(tmp_path / "w.json", [["one"]])
    assert main(["jordanize", "--input", words]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "invsub", "demo", "B"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# Example B")
