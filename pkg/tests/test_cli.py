import csv
import json

import pytest

from qtraffic.cli import SUMMARY_COLUMNS, main


def _gen(tmp_path, *extra, name="c.cq"):
    out = tmp_path / name
    assert main(["generate", "--bench", "qft", "--qubits", "8", "-o", str(out), *extra]) == 0
    return out


def _compile(tmp_path, arch="cores=2,capacity=4"):
    src = _gen(tmp_path)
    out = tmp_path / "c.cc"
    assert main(["compile", str(src), "--arch", arch, "-o", str(out)]) == 0
    return out


def test_generate_stdout(capsys):
    assert main(["generate", "--bench", "cuccaro", "--qubits", "6"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("version 1.0\nqubits 6\n")


def test_compile_and_analyze(tmp_path):
    cc = _compile(tmp_path)
    assert "# num_cores 2" in cc.read_text()
    out = tmp_path / "out"
    assert main(["analyze", str(cc), "-o", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"metrics.json", "manifest.json", "series.csv", "schedule.csv", "trace_physical.pgm"} <= names
    doc = json.loads((out / "metrics.json").read_text())
    assert doc["arch"]["num_cores"] == 2


def test_analyze_no_raster(tmp_path):
    cc = _compile(tmp_path)
    out = tmp_path / "out"
    assert main(["analyze", str(cc), "--no-raster", "--window", "3", "-o", str(out)]) == 0
    assert not (out / "trace_physical.pgm").exists()
    assert json.loads((out / "metrics.json").read_text())["temporal"]["window"] == 3


def test_arch_mismatch_fails(tmp_path, capsys):
    cc = _compile(tmp_path)
    assert main(["analyze", str(cc), "--arch", "cores=4,capacity=2", "-o", str(tmp_path / "o")]) == 1
    assert capsys.readouterr().err.startswith("error: UsageError:")


def test_width_mismatch_fails(tmp_path, capsys):
    src = _gen(tmp_path)
    assert main(["compile", str(src), "--arch", "cores=3,capacity=2"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: MappingError:") and err.count("\n") == 1


def test_pad(tmp_path, capsys):
    src = _gen(tmp_path)
    assert main(["compile", str(src), "--arch", "cores=3,capacity=3", "--pad"]) == 0
    assert "qubits 9" in capsys.readouterr().out


def test_corrupt_teleswap_reports_line(tmp_path, capsys):
    cc = _compile(tmp_path)
    lines = cc.read_text().splitlines()
    idx = next(i for i, l in enumerate(lines) if l.startswith("teleswap"))
    lines[idx] = "teleswap q[0], q[0]"
    cc.write_text("\n".join(lines) + "\n")
    assert main(["analyze", str(cc), "-o", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert f"line {idx + 1}" in err


def test_pipeline_bundle(tmp_path):
    out = tmp_path / "p"
    assert main(["pipeline", "--bench", "grover", "--arch", "cores=2,capacity=3", "--virtual", "-o", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert {"circuit.cq", "compiled.cq", "metrics.json", "trace_virtual.csv"} <= set(man["hashes"])
    assert man["config"]["mapper"]["lookahead"] == 16


def test_seed_env_fallback(tmp_path, monkeypatch):
    a = _gen(tmp_path, "--bench", "random", "--seed", "11", name="a.cq").read_text()
    monkeypatch.setenv("QTRAFFIC_SEED", "11")
    b = _gen(tmp_path, "--bench", "random", name="b.cq").read_text()
    c = _gen(tmp_path, "--bench", "random", "--seed", "12", name="c.cq").read_text()
    assert a == b != c


def test_bad_seed_env(monkeypatch, capsys):
    monkeypatch.setenv("QTRAFFIC_SEED", "abc")
    assert main(["generate", "--bench", "random", "--qubits", "4"]) == 1
    assert "QTRAFFIC_SEED" in capsys.readouterr().err


def test_sweep(tmp_path):
    args = ["sweep", "--bench", "qft,random", "--cores", "1,2", "--capacity", "4"]
    assert main([*args, "-o", str(tmp_path / "a")]) == 0
    assert main([*args, "--jobs", "2", "-o", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "summary.csv").read_bytes()
    assert a == (tmp_path / "b" / "summary.csv").read_bytes()
    rows = list(csv.DictReader(a.decode().splitlines()))
    assert list(rows[0]) == SUMMARY_COLUMNS
    assert [(r["bench"], r["cores"]) for r in rows] == [("qft", "1"), ("qft", "2"), ("random", "1"), ("random", "2")]
    for r in rows:
        assert r["error"] == ""
        if r["cores"] == "1":
            assert r["burstiness_cov"] == r["hotspotness_cov"] == r["mean_teleports"] == "0"
    assert (tmp_path / "a" / "qft_c2" / "metrics.json").exists()


def test_sweep_failed_cell(tmp_path, capsys):
    assert main(["sweep", "--bench", "qft", "--cores", "1", "--capacity", "1", "-o", str(tmp_path)]) == 1
    row = list(csv.DictReader((tmp_path / "summary.csv").read_text().splitlines()))[0]
    assert row["error"]
    assert "error: cell qft/c1" in capsys.readouterr().err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit):
        main(["generate", "--bench", "nope", "--qubits", "4"])
    assert main(["generate", "--bench", "random", "--qubits", "4", "--twoq", "2"]) == 1
