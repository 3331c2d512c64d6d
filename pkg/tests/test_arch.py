import json

import pytest

from qtraffic.arch import (
    DEFAULT_TELEPORT_NS,
    Architecture,
    ArchitectureError,
    core_of,
    load_architecture,
    load_architecture_file,
    parse_arch_shorthand,
)
from qtraffic.circuit import GateKind as K


def test_defaults():
    a = load_architecture({"num_cores": 8, "capacity": 16})
    assert a.num_qubits == 128
    assert a.teleport_ns == DEFAULT_TELEPORT_NS == 1000
    assert a.duration(K.TELESWAP) == 1000
    assert a.duration(K.H) == 20 and a.duration(K.CNOT) == 40 and a.duration(K.CPHASE) == 40
    assert a.cycle_ns == 20


def test_single_core_platform():
    a = load_architecture({"num_cores": 1, "capacity": 16})
    assert a.num_qubits == 16


@pytest.mark.parametrize(
    "cfg",
    [
        {"num_cores": 8, "capacity": 1},
        {"capacity": 4},
        {"num_cores": 2},
        {"num_cores": 2, "capacity": 4, "cycle_ns": 30},
        {"num_cores": 2, "capacity": 4, "durations": {"cnot": 50}},
        {"num_cores": 2, "capacity": 4, "durations": {"bogus": 20}},
        {"num_cores": 2, "capacity": 4, "colour": "red"},
    ],
)
def test_invalid_configs(cfg):
    with pytest.raises(ArchitectureError):
        load_architecture(cfg)


def test_swap_needs_explicit_duration():
    a = Architecture(2, 4)
    with pytest.raises(ArchitectureError, match="swap"):
        a.duration(K.SWAP)
    b = load_architecture({"num_cores": 2, "capacity": 4, "cycle_ns": 10, "durations": {"swap": 250}})
    assert b.duration(K.SWAP) == 250
    # the 4x teleport/SWAP ratio holds with a 10 ns cycle
    assert b.teleport_ns == 4 * b.duration(K.SWAP)


@pytest.mark.parametrize("phys,core", [(0, 0), (17, 1), (127, 7)])
def test_core_of(phys, core):
    assert core_of(Architecture(8, 16), phys) == core


def test_core_of_out_of_range():
    with pytest.raises(ArchitectureError):
        core_of(Architecture(8, 16), 128)


def test_physical_bijection():
    a = Architecture(3, 5)
    for core in range(3):
        for off in range(5):
            pq = a.physical(a.phys_id(core, off))
            assert (pq.core, pq.offset) == (core, off)
            assert core_of(a, pq.id) == core


def test_shorthand_and_file(tmp_path):
    a = parse_arch_shorthand("cores=4,capacity=8,teleport=2000")
    assert (a.num_cores, a.capacity, a.teleport_ns) == (4, 8, 2000)
    with pytest.raises(ArchitectureError):
        parse_arch_shorthand("cores=4,cap=8")
    path = tmp_path / "arch.json"
    path.write_text(json.dumps({"num_cores": 2, "capacity": 3, "durations": {"h": 40}}))
    b = load_architecture_file(path)
    assert b.duration(K.H) == 40
    assert b.to_dict()["durations"]["h"] == 40
