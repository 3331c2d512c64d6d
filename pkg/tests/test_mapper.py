import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import circuit, cnots
from qtraffic import kernels
from qtraffic.arch import Architecture
from qtraffic.benchgen import BenchSpec, Family, gen_qft, gen_random, generate
from qtraffic.circuit import Gate, GateKind as K, ParseError
from qtraffic.kernels import _fallback
from qtraffic.mapper import (
    LookaheadGraph,
    MapperOptions,
    MappingError,
    TeleportOp,
    Timeslice,
    apply_teleports,
    check_program,
    compile_circuit,
    initial_partition,
    insert_teleports,
    lookahead_graph,
    parse_compiled,
    refine_partition,
    serialize_compiled,
    slice_circuit,
)


def _slices_as_lists(c):
    return [list(s.gates) for s in slice_circuit(c)]


def test_slice_dependency_forced():
    assert _slices_as_lists(circuit(4, cnots((0, 1), (2, 3), (0, 2)))) == [[0, 1], [2]]


def test_slice_shared_qubit():
    assert _slices_as_lists(circuit(3, cnots((0, 1), (0, 2)))) == [[0], [1]]


def test_single_qubit_gates_ride_along():
    c = circuit(2, [Gate(K.H, (0,)), Gate(K.CNOT, (0, 1)), Gate(K.H, (1,)), Gate(K.CNOT, (1, 0))])
    assert _slices_as_lists(c) == [[0, 1, 2], [3]]


def test_slices_preserve_per_qubit_order():
    c = gen_random(6, 200, 0.6, seed=4)
    order = [gi for s in slice_circuit(c) for gi in s.gates]
    for q in range(6):
        src = [i for i, g in enumerate(c.gates) if q in g.operands]
        assert [i for i in order if q in c.gates[i].operands] == src


def _timeslices(pair_at):
    return [Timeslice(t, (), tuple(pairs)) for t, pairs in enumerate(pair_at)]


def test_lookahead_weights():
    opts = MapperOptions()
    g = lookahead_graph(_timeslices([[(0, 1)], [], [], []]), 0, opts, 4)
    assert g.weight(0, 1) == 1.0 and (0, 1) in g.must
    assert lookahead_graph(_timeslices([[], [], [], [(0, 1)]]), 0, opts, 4).weight(0, 1) == 0.125
    g = lookahead_graph(_timeslices([[], [(0, 1)], [(0, 1)]]), 0, opts, 4)
    assert g.weight(0, 1) == 0.75 and g.must == ()


def test_lookahead_window_cutoff():
    sl = _timeslices([[]] * 17 + [[(0, 1)]])
    assert lookahead_graph(sl, 0, MapperOptions(), 4).weight(0, 1) == 0.0
    assert lookahead_graph(sl, 1, MapperOptions(), 4).weight(0, 1) == 2.0**-16


def _graph(width, pairs_weights, must=()):
    w = np.zeros((width, width))
    for (p, q), x in pairs_weights.items():
        w[p, q] = w[q, p] = x
    return LookaheadGraph(w, tuple(must), 0)


def test_initial_partition_no_gates_keeps_blocks():
    a = Architecture(2, 3)
    assert initial_partition(_graph(6, {}), a).tolist() == [0, 0, 0, 1, 1, 1]


def test_initial_partition_colocates_must():
    a = Architecture(2, 4)
    part = initial_partition(_graph(8, {(0, 4): 1.0}, [(0, 4)]), a)
    assert part[0] == part[4]


def test_initial_partition_exhaustive_small():
    a = Architecture(2, 2)
    g = _graph(4, {(0, 2): 1.0, (1, 3): 1.0}, [(0, 2), (1, 3)])
    part = initial_partition(g, a)
    # the three balanced bipartitions of 4 qubits; only one keeps both pairs together
    bipartitions = [({0, 1}, {2, 3}), ({0, 2}, {1, 3}), ({0, 3}, {1, 2})]
    feasible = [bp for bp in bipartitions if all(any({p, q} <= side for side in bp) for p, q in g.must)]
    assert feasible == [({0, 2}, {1, 3})]
    sides = {frozenset(np.flatnonzero(part == c).tolist()) for c in range(2)}
    assert sides == {frozenset({0, 2}), frozenset({1, 3})}


def test_refine_keeps_optimal_placement():
    a = Architecture(2, 2)
    prev = np.array([0, 0, 1, 1], np.int32)
    g = _graph(4, {(0, 1): 1.0, (2, 3): 0.5}, [(0, 1)])
    out = refine_partition(prev, g, a)
    assert out.tolist() == prev.tolist()


def test_refine_repairs_split_edge_with_one_exchange():
    a = Architecture(2, 3)
    prev = np.array([0, 0, 0, 1, 1, 1], np.int32)
    g = _graph(6, {(0, 3): 1.0}, [(0, 3)])
    out = refine_partition(prev, g, a)
    assert out[0] == out[3]
    assert int(np.count_nonzero(out != prev)) == 2
    assert len(insert_teleports(prev, out)) == 1


def test_insert_teleports_examples():
    p = np.array([0, 1, 2], np.int32)
    assert insert_teleports(p, p) == []
    ops = insert_teleports(np.array([0, 1], np.int32), np.array([1, 0], np.int32))
    assert [op.qubits for op in ops] == [(0, 1)]
    ops = insert_teleports(np.array([0, 1, 2], np.int32), np.array([1, 2, 0], np.int32))
    assert len(ops) == 2
    assert apply_teleports(np.array([0, 1, 2]), ops).tolist() == [1, 2, 0]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 3), (3, 2), (3, 4), (4, 4)]))
def test_insert_teleports_count_is_moved_minus_cycles(seed, shape):
    ncores, cap = shape
    rng = np.random.default_rng(seed)
    prev = rng.permutation(np.repeat(np.arange(ncores), cap)).astype(np.int32)
    nxt = rng.permutation(np.repeat(np.arange(ncores), cap)).astype(np.int32)
    ops = insert_teleports(prev, nxt)
    assert apply_teleports(prev, ops).tolist() == nxt.tolist()
    moved = int(np.count_nonzero(prev != nxt))
    assert (moved + 1) // 2 <= len(ops) <= max(0, moved - 1)


def test_insert_teleports_rejects_unbalanced():
    with pytest.raises(MappingError):
        insert_teleports(np.array([0, 0, 1, 1]), np.array([0, 0, 0, 1]))


def test_single_core_never_teleports():
    c = gen_random(8, 300, 0.7, seed=2)
    p = compile_circuit(c, Architecture(1, 8))
    assert p.teleports == [] and check_program(p) == []


def test_width_mismatch_and_pad():
    c = gen_qft(6)
    with pytest.raises(MappingError, match="pad"):
        compile_circuit(c, Architecture(2, 4))
    p = compile_circuit(c, Architecture(2, 4), MapperOptions(pad=True))
    assert p.width == 8 and check_program(p) == []


def test_odd_capacity_is_feasible():
    c = gen_random(9, 300, 0.8, seed=5)
    p = compile_circuit(c, Architecture(3, 3))
    assert check_program(p) == []
    for sl in p.slices:
        assert len(sl.pairs) <= 3


def _reference_compile(c, a, opts):
    """Slow compile straight from the per-slice public operations."""
    slices = slice_circuit(c, a.num_cores * (a.capacity // 2) if a.capacity % 2 else 0)
    cur = initial_partition(lookahead_graph(slices, 0, opts, c.width), a, opts.seed, opts)
    out = [cur]
    for s in range(1, len(slices)):
        cur = refine_partition(cur, lookahead_graph(slices, s, opts, c.width), a, opts)
        out.append(cur)
    return np.array(out)


@pytest.mark.parametrize("family,cores,cap", [("qft", 2, 4), ("random", 4, 4), ("cuccaro", 3, 4), ("qv", 2, 5)])
def test_incremental_lookahead_matches_reference(family, cores, cap):
    c = generate(BenchSpec(Family(family), cores * cap, seed=1))
    a = Architecture(cores, cap)
    opts = MapperOptions(lookahead=5)
    p = compile_circuit(c, a, opts)
    assert np.array_equal(p.assignment, _reference_compile(c, a, opts))


def test_compile_backends_agree(monkeypatch):
    c = generate(BenchSpec(Family.RANDOM, 16, seed=8))
    a = Architecture(4, 4)
    fast = compile_circuit(c, a)
    for name in ("slice_layers", "refine", "teleport_ops"):
        monkeypatch.setattr(kernels, name, getattr(_fallback, name))
    slow = compile_circuit(c, a)
    assert np.array_equal(fast.assignment, slow.assignment)
    assert fast.teleports == slow.teleports


def test_compile_deterministic():
    c = generate(BenchSpec(Family.QVOLUME, 12, seed=3))
    a = Architecture(3, 4)
    assert serialize_compiled(compile_circuit(c, a)) == serialize_compiled(compile_circuit(c, a))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 4), (4, 2)]), st.floats(0.0, 1.0))
def test_compiled_programs_are_sound(seed, shape, p2q):
    cores, cap = shape
    c = gen_random(cores * cap, 60, p2q, seed=seed)
    p = compile_circuit(c, Architecture(cores, cap))
    assert check_program(p) == []


def test_round_trip_compiled_text():
    c = generate(BenchSpec(Family.QFT, 12))
    p = compile_circuit(c, Architecture(3, 4))
    text = serialize_compiled(p)
    q = parse_compiled(text)
    # the file lists gates slice by slice: same slices, same per-qubit order
    for a, b in zip(p.slices, q.slices):
        ga = circuit(c.width, [p.source.gates[i] for i in a.gates])
        assert ga.same_as(circuit(c.width, [q.source.gates[i] for i in b.gates]))
        assert a.pairs == b.pairs
    for v in range(c.width):
        mine = circuit(c.width, [g for g in c.gates if v in g.operands])
        assert mine.same_as(circuit(c.width, [g for g in q.source.gates if v in g.operands]))
    assert np.array_equal(q.assignment, p.assignment)
    assert q.teleports == p.teleports
    assert q.options == p.options
    assert serialize_compiled(q) == text
    assert "# place v0 -> c" in text and "teleswap" in text


def _compiled(width=4, place=(0, 0, 1, 1), body="slice 0\ncnot q[0], q[1]\n"):
    head = f"version 1.0\nqubits {width}\n# num_cores 2\n# capacity {width // 2}\n"
    head += "".join(f"# place v{v} -> c{c}\n" for v, c in enumerate(place))
    return head + body


def test_parse_rejects_colocation_violation():
    with pytest.raises(ParseError, match="co-location") as e:
        parse_compiled(_compiled(body="slice 0\ncnot q[0], q[2]\n"))
    assert e.value.line == 10


def test_parse_rejects_bad_slice_order():
    with pytest.raises(ParseError, match="sequence"):
        parse_compiled(_compiled(body="slice 0\nh q[0]\nslice 2\nh q[1]\n"))
    with pytest.raises(ParseError, match="before the first slice"):
        parse_compiled(_compiled(body="h q[0]\nslice 0\n"))


def test_parse_rejects_bad_teleswaps():
    with pytest.raises(ParseError, match="same core") as e:
        parse_compiled(_compiled(body="slice 0\ncnot q[0], q[1]\nteleswap q[0], q[1]\nslice 1\nh q[0]\n"))
    assert e.value.line == 11
    with pytest.raises(ParseError, match="after the last slice"):
        parse_compiled(_compiled(body="slice 0\nteleswap q[0], q[2]\n"))
    with pytest.raises(ParseError, match="after teleswap"):
        parse_compiled(_compiled(body="slice 0\nteleswap q[0], q[2]\nh q[0]\nslice 1\n"))
    with pytest.raises(ParseError):
        parse_compiled(_compiled(body="slice 0\nteleswap q[0], q[9]\nslice 1\n"))


def test_parse_rejects_bad_placement():
    with pytest.raises(ParseError, match="balanced"):
        parse_compiled(_compiled(place=(0, 0, 0, 1)))
    with pytest.raises(ParseError, match="every virtual qubit"):
        parse_compiled(_compiled(place=(0, 0, 1)))


def test_parse_applies_teleswaps():
    body = "slice 0\ncnot q[0], q[1]\nteleswap q[1], q[2]\nslice 1\ncnot q[0], q[2]\n"
    p = parse_compiled(_compiled(body=body))
    assert p.assignment.tolist() == [[0, 0, 1, 1], [0, 1, 0, 1]]
    assert p.teleports == [TeleportOp((0, 1), (1, 2), (0, 1))]
    assert check_program(p) == []
