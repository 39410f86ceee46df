import numpy as np
import pytest

import qclock as q
from qclock.cli import main


CIRCUIT = """\
n_input 1
n_ancilla 0
accept 0
epsilon 0.25
gate H 0
"""

REJECT_CIRCUIT = """\
n_input 1
n_ancilla 1
accept 1
epsilon 0.25
gate X 0
"""


@pytest.fixture
def circuit_file(tmp_path):
    p = tmp_path / "c.qc"
    p.write_text(CIRCUIT)
    return str(p)


@pytest.fixture
def ham_file(tmp_path, circuit_file):
    out = tmp_path / "c.ham"
    assert main(["compile", circuit_file, "--out", str(out)]) == 0
    return str(out)


def test_compile_stdout_and_summary(circuit_file, capsys):
    assert main(["compile", circuit_file]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("qubits 2\n")
    assert "term out" in cap.out
    assert "compiled 2 qubits" in cap.err
    # stdout parses back into the same Hamiltonian text
    h = q.parse_hamiltonian(cap.out)
    assert q.serialize_hamiltonian(h) == cap.out


def test_compile_out_file(tmp_path, circuit_file, capsys):
    out = tmp_path / "h.txt"
    assert main(["compile", circuit_file, "--out", str(out)]) == 0
    cap = capsys.readouterr()
    assert cap.out == ""
    text = out.read_text()
    assert text.startswith("qubits 2\n")


def test_compile_clock_penalty_flag(circuit_file, capsys):
    assert main(["compile", circuit_file, "--clock-penalty", "9"]) == 0
    # single-step circuit has no clock pair terms; penalty only gates input
    h = q.parse_hamiltonian(capsys.readouterr().out)
    assert h.part_counts()["clock"] == 0


def test_spectrum_report(ham_file, capsys):
    assert main(["spectrum", ham_file, "--k", "3"]) == 0
    cap = capsys.readouterr()
    lines = dict(line.split(" ", 1) for line in cap.out.strip().split("\n"))
    assert set(lines) == {"lambda_min", "spectrum", "method", "residual", "seed"}
    assert lines["method"] == "dense"
    assert abs(float(lines["lambda_min"])) < 1e-9  # perfect witness instance
    assert "lambda_min" in cap.err


def test_spectrum_sparse_alias(ham_file, capsys):
    assert main(["spectrum", ham_file, "--method", "sparse"]) == 0
    lines = dict(line.split(" ", 1)
                 for line in capsys.readouterr().out.strip().split("\n"))
    # 2-qubit instance: the iterative path falls back to dense honestly
    assert lines["method"] == "dense"


def test_witness_output_block(circuit_file, capsys):
    assert main(["witness", circuit_file]) == 0
    out = capsys.readouterr().out
    head, tail = out.split("accept_probability", 1)
    report = dict(line.split(" ", 1)
                  for line in ("accept_probability" + tail).strip().split("\n"))
    assert float(report["accept_probability"]) > 0.999
    assert report["flags"] == "-"
    assert report["k"] == "1"
    n, entries = q.read_matrix(head)
    assert n == 1
    assert abs(np.trace(entries) - 1.0) < 1e-12


def test_witness_gibbs_source(circuit_file, capsys):
    assert main(["witness", circuit_file, "--source", "gibbs:0.01"]) == 0
    out = capsys.readouterr().out
    assert "accept_probability" in out


def test_witness_bad_source(circuit_file, capsys):
    assert main(["witness", circuit_file, "--source", "what"]) == 2
    assert "unknown source" in capsys.readouterr().err


def test_witness_hot_source_fails_consistency(circuit_file, capsys):
    # maximally mixed input from a very hot Gibbs source misses the energy
    # target for a witness-regime circuit
    code = main(["witness", circuit_file, "--source", "gibbs:50"])
    assert code == 5
    assert "consistency" in capsys.readouterr().err


def test_amplify_table(capsys):
    assert main(["amplify", "--k", "16,81", "--eps", "0.25,0.1"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert rows[0] == ("k,epsilon,l,exact_reject,kl_bound,sqrt_k_bound,"
                       "mc_estimate,mc_stderr,seed")
    assert len(rows) == 5  # header + 2x2 grid
    first = rows[1].split(",")
    assert first[0] == "16" and first[2] == "4"
    assert first[6] == "nan" and first[7] == "nan"


def test_amplify_mc_columns(capsys):
    assert main(["amplify", "--k", "16", "--eps", "0.25", "--mc", "2000",
                 "--seed", "3"]) == 0
    row = capsys.readouterr().out.strip().split("\n")[1].split(",")
    est, err = float(row[6]), float(row[7])
    assert 0.0 <= est <= 1.0 and err >= 0.0
    assert row[8] == "3"


def test_amplify_sweep_grammar(capsys):
    assert main(["amplify", "--sweep", "k=16,81;eps=0.25"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert len(rows) == 3
    assert main(["amplify", "--sweep", "k=16"]) == 2
    assert main(["amplify"]) == 2  # nothing to tabulate


def test_gibbs_table(ham_file, capsys):
    assert main(["gibbs", ham_file, "--temp", "0.01,0.1"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert rows[0] == "T,mean_energy,bound_rhs,Z,lambda_min,e_max,verdict"
    assert len(rows) == 3
    assert rows[1].endswith(",-")  # no decision requested
    assert rows[1].split(",")[2] == "nan"


def test_gibbs_auto_qma_decides(ham_file, capsys):
    assert main(["gibbs", ham_file, "--auto-qma", "0.25", "1", "2",
                 "--decide"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert len(rows) == 2
    assert rows[1].endswith("witness-exists")


def test_gibbs_rejects_zero_temperature(ham_file, capsys):
    assert main(["gibbs", ham_file, "--temp", "0"]) == 2
    assert "must be > 0" in capsys.readouterr().err


def test_gibbs_needs_some_temperature(ham_file, capsys):
    assert main(["gibbs", ham_file]) == 2
    assert main(["gibbs", ham_file, "--decide"]) == 2


def test_exit_code_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.qc"
    bad.write_text("n_input 1\naccept 0\ngate NOPE 0\n")
    assert main(["compile", str(bad)]) == 2
    assert "line" in capsys.readouterr().err


def test_exit_code_missing_file(capsys):
    assert main(["compile", "/nonexistent/file.qc"]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_exit_code_resource_limit(tmp_path, capsys):
    big = tmp_path / "big.qc"
    big.write_text("n_input 12\nn_ancilla 4\naccept 0\ngate H 0\n")
    assert main(["compile", str(big)]) == 3
    assert "resource" in capsys.readouterr().err


def test_exit_code_convergence(ham_file, capsys):
    # an impossible residual target forces the convergence failure path
    code = main(["spectrum", ham_file, "--tolerance", "residual=1e-30"])
    assert code == 4
    assert "convergence" in capsys.readouterr().err


def test_unknown_tolerance_name(ham_file, capsys):
    assert main(["spectrum", ham_file, "--tolerance", "wat=1"]) == 2
    assert "unknown tolerance" in capsys.readouterr().err


def test_seed_changes_mc_output(capsys):
    assert main(["amplify", "--k", "81", "--eps", "0.25", "--mc", "400",
                 "--seed", "1"]) == 0
    out1 = capsys.readouterr().out
    assert main(["amplify", "--k", "81", "--eps", "0.25", "--mc", "400",
                 "--seed", "1"]) == 0
    out2 = capsys.readouterr().out
    assert out1 == out2


def test_global_flags_accepted_before_subcommand(circuit_file, capsys):
    assert main(["--seed", "2", "compile", circuit_file]) == 0
    capsys.readouterr()
