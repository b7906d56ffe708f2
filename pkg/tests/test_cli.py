import json
import subprocess
import sys

from klyachko.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from klyachko.matlin import Matrix, to_text


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_witness_then_verify(tmp_path, capsys):
    mat = write(tmp_path, "g.txt", to_text(Matrix.identity(2, 3)))
    cert = str(tmp_path / "c.txt")
    assert main(["witness", "--matrix", mat, "--p", "3", "--n", "2", "--r", "2", "--rprime", "0", "--out", cert]) == EXIT_OK
    text = open(cert).read()
    assert "epsilon=+1" in text and "value=1" in text
    assert main(["verify", cert]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "PASS"


def test_verify_tampered(tmp_path, capsys):
    mat = write(tmp_path, "g.txt", to_text(Matrix.identity(2, 3)))
    cert = str(tmp_path / "c.txt")
    main(["witness", "--matrix", mat, "--r", "2", "--rprime", "2", "--out", cert])
    text = open(cert).read()
    assert "epsilon=-1" in text
    bad = write(tmp_path, "bad.txt", text.replace("epsilon=-1", "epsilon=+1"))
    assert main(["verify", bad]) == EXIT_FAIL
    assert "FAIL clause (d)" in capsys.readouterr().out


def test_invalid_inputs(tmp_path, capsys):
    mat = write(tmp_path, "g.txt", to_text(Matrix.identity(3, 3)))
    assert main(["witness", "--matrix", mat, "--r", "2", "--rprime", "1"]) == EXIT_INPUT
    assert "invalid input" in capsys.readouterr().err
    sing = write(tmp_path, "s.txt", "n=2 p=3\n1 1\n1 1\n")
    assert main(["witness", "--matrix", sing, "--r", "2", "--rprime", "2"]) == EXIT_INPUT
    assert main(["witness", "--matrix", mat, "--p", "5", "--r", "1", "--rprime", "1"]) == EXIT_INPUT
    junk = write(tmp_path, "j.txt", "not a certificate\n")
    assert main(["verify", junk]) == EXIT_INPUT
    assert main(["sweep", "--n", "2", "--q", "4"]) == EXIT_INPUT


def test_bruhat(tmp_path, capsys):
    mat = write(tmp_path, "g.txt", to_text(Matrix.identity(3, 5)))
    assert main(["bruhat", "--matrix", mat, "--r", "3", "--rprime", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("w: 1 2 3\n") and "pbar:" in out


def test_sweep_and_mackey(capsys):
    assert main(["sweep", "--n", "2", "--q", "2", "--no-footer"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0 failures / 6 elements" in out and "elapsed" not in out
    assert main(["sweep", "--n", "2", "--q", "3", "--pairs", "2,2;0,0", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["failures"] == 0 and [p["r"] for p in doc["pairs"]] == [2, 0]
    assert main(["mackey", "--n", "2", "--q", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "klyachko_sum_check: PASS" in out and "class_count: 3" in out
    assert main(["mackey", "--n", "3", "--q", "3", "--budget", "10"]) == EXIT_BUDGET


def test_stdin_and_entry_point(tmp_path):
    text = to_text(Matrix([[0, 1], [2, 0]], 3))
    proc = subprocess.run(
        [sys.executable, "-m", "klyachko.cli", "witness", "--matrix", "-", "--r", "2", "--rprime", "2"],
        input=text, capture_output=True, text=True, check=True,
    )
    assert proc.stdout.startswith("kly-cert/1\n")
    proc = subprocess.run([sys.executable, "-m", "klyachko.cli", "verify", "-"],
                          input=proc.stdout, capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "PASS"


def test_byte_reproducible(tmp_path):
    outs = []
    for k, workers in enumerate(("1", "2")):
        path = tmp_path / f"s{k}.txt"
        main(["sweep", "--n", "2", "--q", "3", "--no-footer", "--workers", workers, "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    a, b = tmp_path / "m0.txt", tmp_path / "m1.txt"
    main(["mackey", "--n", "2", "--q", "3", "--no-footer", "--out", str(a)])
    main(["mackey", "--n", "2", "--q", "3", "--no-footer", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
