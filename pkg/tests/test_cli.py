"""End-to-end tests of the command-line interface."""

import json

import pytest

from specratio.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_eig_subcommand(tmp_path, capsys):
    # diag(1, 2i) as interleaved re,im CSV
    matrix = tmp_path / "matrix.csv"
    matrix.write_text("1,0,0,0\n0,0,0,2\n")
    assert run_cli("eig", "--in", str(matrix)) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "re,im"
    got = {complex(float(r.split(",")[0]), float(r.split(",")[1])) for r in rows[1:]}
    assert any(abs(e - 1.0) < 1e-12 for e in got)
    assert any(abs(e - 2.0j) < 1e-12 for e in got)


def test_eig_rejects_bad_shape(tmp_path):
    matrix = tmp_path / "matrix.csv"
    matrix.write_text("1,0,0\n0,0,0\n")
    with pytest.raises(SystemExit):
        run_cli("eig", "--in", str(matrix))


def test_kernel_gap(tmp_path):
    out = tmp_path / "gap.csv"
    assert run_cli("kernel-gap", "--n", "100,1000", "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,gap"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["100", "1000"]
    assert float(rows[0][1]) > float(rows[1][1])


def test_kostlan(tmp_path):
    out = tmp_path / "moduli.csv"
    assert run_cli("kostlan", "--n", "16", "--trials", "3", "--seed", "7", "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "modulus"
    assert len(lines) == 1 + 16 * 3


def test_limit_cdf_grid(tmp_path):
    out = tmp_path / "cdf.csv"
    assert run_cli("limit-cdf", "--which", "rinf", "--grid", "0.5:3:0.5", "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,cdf"
    xs = [float(line.split(",")[0]) for line in lines[1:]]
    cdfs = [float(line.split(",")[1]) for line in lines[1:]]
    assert xs == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    assert all(b >= a for a, b in zip(cdfs, cdfs[1:]))


def test_limit_sample_and_hist(tmp_path):
    samples = tmp_path / "samples.csv"
    assert run_cli("limit-sample", "--which", "r0", "--n", "500", "--seed", "3", "--out", str(samples)) == 0
    lines = samples.read_text().strip().splitlines()
    assert lines[0] == "sample"
    assert len(lines) == 501
    hist = tmp_path / "hist.csv"
    assert run_cli("hist", "--in", str(samples), "--bins", "10", "--range", "0:3", "--out", str(hist)) == 0
    rows = hist.read_text().strip().splitlines()
    assert rows[0] == "bin_left,bin_right,count,density"
    counts = [int(r.split(",")[2]) for r in rows[1:]]
    assert sum(counts) <= 500
    assert len(counts) == 10


def test_radius_csv_and_json(tmp_path):
    csv_out = tmp_path / "radius.csv"
    code = run_cli(
        "radius", "--law-a", "gaussian", "--n", "8", "--trials", "12",
        "--seed", "5", "--out", str(csv_out),
    )
    assert code == 0
    lines = csv_out.read_text().strip().splitlines()
    assert lines[0] == "sample"
    assert len(lines) == 13

    json_out = tmp_path / "radius.json"
    code = run_cli(
        "radius", "--law-a", "gaussian", "--n", "8", "--trials", "12",
        "--seed", "5", "--format", "json", "--out", str(json_out),
    )
    assert code == 0
    doc = json.loads(json_out.read_text())
    assert doc["schema_version"] == 1
    assert doc["provenance"]["config"]["n"] == 8
    assert sorted(doc["samples"]) == doc["samples"]
    # CSV and JSON routes saw the same experiment
    assert [float(v) for v in lines[1:]] == doc["samples"]


def test_radius_config_file_with_override(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"law_a": "ghq:k=4", "n": 6, "trials": 10, "seed": 1}))
    out = tmp_path / "r.csv"
    assert run_cli("radius", "--config", str(cfg), "--trials", "4", "--out", str(out)) == 0
    assert len(out.read_text().strip().splitlines()) == 5


def test_radius_rejection_off():
    assert run_cli("radius", "--law-a", "gaussian", "--n", "4", "--trials", "3", "--rejection", "off", "--out", "-") == 0


def test_compare(tmp_path):
    out = tmp_path / "pairs.csv"
    code = run_cli(
        "compare", "--laws", "gaussian,ghq:k=4", "--n", "8", "--trials", "40",
        "--seed", "2", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "law_a,law_b,ks"
    law_i, law_j, ks = lines[1].split(",")
    assert (law_i, law_j) == ("gaussian", "ghq:k=4")
    assert 0.0 <= float(ks) <= 1.0


def test_audit_json(capsys):
    assert run_cli("audit", "--law", "bernoulli", "--n", "128") == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"variant", "deviations", "satisfies_c2"}
    assert doc["deviations"]["4"] == pytest.approx(0.5, abs=1e-12)


def test_local_law(tmp_path, capsys):
    out = tmp_path / "ll.csv"
    code = run_cli(
        "local-law", "--law", "gaussian", "--n", "32", "--eta", "0.5",
        "--z", "0", "--trials", "5", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "trial,residual"
    assert len(lines) == 6
    assert all(float(line.split(",")[1]) >= 0 for line in lines[1:])


def test_logdet_check(capsys):
    assert run_cli("logdet-check", "--n", "6", "--grid", "31", "--extent", "4") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "logdet_check"
    assert doc["abs_error"] == pytest.approx(abs(doc["lhs"] - doc["rhs"]))
    assert doc["support_warning"] is False


def test_sval_tail(tmp_path):
    out = tmp_path / "tail.csv"
    code = run_cli(
        "sval-tail", "--n", "6", "--z", "1", "--trials", "1000",
        "--t-grid", "1e-3:1:9", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,prob"
    probs = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b >= a for a, b in zip(probs, probs[1:]))


def test_unknown_command():
    with pytest.raises(SystemExit):
        run_cli("frobnicate")
