import math

import pytest

from qtraffic.circuit import (
    Circuit,
    CircuitError,
    Gate,
    GateKind as K,
    ParseError,
    dependency_dag,
    gate_stats,
    parse_circuit,
    scan,
    serialize_circuit,
)
from qtraffic.benchgen import BenchSpec, Family, generate


def test_parse_minimal():
    c = parse_circuit("version 1.0\nqubits 2\nh q[0]\ncnot q[0], q[1]\n")
    assert c.width == 2
    assert [g.kind for g in c.gates] == [K.H, K.CNOT]
    assert c.gates[1].operands == (0, 1)


def test_comments_and_blank_lines_are_ignored():
    text = "# header\nversion 1.0\n\nqubits 3  # three\nrz q[2], 0.5 # angle\n"
    c = parse_circuit(text)
    assert c.gates == (Gate(K.RZ, (2,), 0.5),)


def test_out_of_range_reports_line_and_column():
    with pytest.raises(ParseError) as e:
        parse_circuit("version 1.0\nqubits 2\nh q[0]\ncnot q[0], q[5]\n")
    assert e.value.line == 4
    assert "out of range" in str(e.value)


def test_unknown_mnemonic():
    with pytest.raises(ParseError, match="unknown gate"):
        parse_circuit("version 1.0\nqubits 2\nfoo q[0]\n")


def test_missing_header():
    with pytest.raises(ParseError):
        parse_circuit("qubits 2\nh q[0]\n")


@pytest.mark.parametrize("body", ["rz q[0]", "h q[0], 0.3", "cnot q[0], q[0]", "cphase q[0], q[1]"])
def test_malformed_gates(body):
    with pytest.raises(ParseError):
        parse_circuit(f"version 1.0\nqubits 2\n{body}\n")


def test_slice_directive_rejected_in_plain_circuits():
    with pytest.raises(ParseError):
        parse_circuit("version 1.0\nqubits 2\nslice 0\nh q[0]\n")
    with pytest.raises(ParseError):
        parse_circuit("version 1.0\nqubits 2\nteleswap q[0], q[1]\n")


def test_scan_keeps_compiled_statements():
    width, st = scan("version 1.0\nqubits 2\n# place v0 -> c0\nslice 0\nh q[0]\n", compiled=True)
    assert width == 2
    assert [s.kind for s in st] == ["comment", "slice", "gate"]


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate(K.CNOT, (1,))
    with pytest.raises(CircuitError):
        Gate(K.RZ, (0,), float("nan"))
    with pytest.raises(CircuitError):
        Circuit(2, (Gate(K.H, (2,)),))


@pytest.mark.parametrize("family,width", [("qft", 9), ("grover", 5), ("cuccaro", 8), ("qv", 6), ("random", 7)])
def test_round_trip_benchmarks(family, width):
    c = generate(BenchSpec(Family(family), width, seed=3))
    text = serialize_circuit(c)
    back = parse_circuit(text)
    assert back.same_as(c)
    assert serialize_circuit(back) == text


def test_angle_text_precision():
    c = Circuit(1, (Gate(K.RZ, (0,), math.pi / 3),))
    text = serialize_circuit(c)
    assert "rz q[0], 1.0471975512\n" in text
    assert abs(parse_circuit(text).gates[0].angle - math.pi / 3) < 1e-9


def test_same_as_tolerance():
    a = Circuit(1, (Gate(K.RZ, (0,), 1.0),))
    assert a.same_as(Circuit(1, (Gate(K.RZ, (0,), 1.0 + 1e-12),)))
    assert not a.same_as(Circuit(1, (Gate(K.RZ, (0,), 1.1),)))


def test_dependency_dag_edges():
    c = Circuit(3, (Gate(K.H, (0,)), Gate(K.CNOT, (0, 1)), Gate(K.H, (2,)), Gate(K.CNOT, (1, 2))))
    dag = dependency_dag(c)
    assert set(dag.edges) == {(0, 1), (1, 3), (2, 3)}
    assert dag.successors()[1] == [3]


def test_gate_stats():
    c = Circuit(2, (Gate(K.H, (0,)), Gate(K.CNOT, (0, 1)), Gate(K.H, (1,)), Gate(K.H, (0,))))
    s = gate_stats(c)
    assert (s.total, s.two_qubit) == (4, 1)
    assert s.per_kind == {"cnot": 1, "h": 3}
    assert s.two_qubit_fraction == 0.25
