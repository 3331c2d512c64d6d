"""Multi-core compilation: timeslicing, per-slice core assignment and
teleport-swap insertion.

The circuit is cut into timeslices (ASAP layers in which every qubit takes
part in at most one two-qubit gate).  Slice 0 gets an initial placement; each
later slice starts from the previous placement and is repaired so that all
of its two-qubit gates are core-local, then improved by pairwise exchanges
driven by an exponentially decaying lookahead graph.  The difference between
consecutive placements becomes a list of teleport-swaps.
"""
from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import kernels
from .arch import Architecture
from .circuit import Circuit, CircuitError, Gate, GateKind, ParseError, format_angle, scan


class MappingError(RuntimeError):
    pass


@dataclass(frozen=True)
class Timeslice:
    index: int
    gates: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class TeleportOp:
    between_slices: tuple[int, int]
    qubits: tuple[int, int]
    cores: tuple[int, int]


@dataclass(frozen=True)
class MapperOptions:
    lookahead: int = 16
    decay_base: float = 2.0
    migration_penalty: float = 0.5
    max_passes: int | None = None  # default 10 * width
    seed: int = 0
    restarts: int = 8
    pad: bool = False

    def passes_for(self, width: int) -> int:
        return 10 * width if self.max_passes is None else self.max_passes


@dataclass
class CompiledProgram:
    source: Circuit
    slices: list[Timeslice]
    assignment: np.ndarray  # (num_slices, width) core of every virtual qubit
    teleports: list[TeleportOp]
    options: MapperOptions
    num_cores: int
    capacity: int
    initial: np.ndarray = field(default=None)  # slice-0 placement

    def __post_init__(self):
        if self.initial is None:
            self.initial = self.assignment[0].copy()

    @property
    def width(self) -> int:
        return self.source.width

    def teleports_between(self, s: int) -> list[TeleportOp]:
        return [t for t in self.teleports if t.between_slices[0] == s]


# ---------------------------------------------------------------------------
# slicing


def _operand_arrays(c: Circuit) -> tuple[np.ndarray, np.ndarray]:
    q0 = np.fromiter((g.operands[0] for g in c.gates), dtype=np.int32, count=len(c.gates))
    q1 = np.fromiter(
        (g.operands[1] if g.is_two_qubit else -1 for g in c.gates), dtype=np.int32, count=len(c.gates)
    )
    return q0, q1


def slice_circuit(c: Circuit, max_pairs: int = 0) -> list[Timeslice]:
    """Greedy ASAP timeslicing.

    A two-qubit gate goes to the earliest slice after every slice in which
    one of its operands already has a two-qubit gate; single-qubit gates
    join the latest slice of their qubit.  ``max_pairs`` optionally caps the
    number of two-qubit gates per slice.
    """
    if not c.gates:
        return []
    q0, q1 = _operand_arrays(c)
    idx = kernels.slice_layers(q0, q1, c.width, max_pairs)
    count = int(idx.max()) + 1
    order = np.argsort(idx, kind="stable")
    bounds = np.searchsorted(idx[order], np.arange(count + 1))
    out = []
    for s in range(count):
        members = order[bounds[s] : bounds[s + 1]]
        pairs = tuple((int(q0[i]), int(q1[i])) for i in members if q1[i] >= 0)
        out.append(Timeslice(s, tuple(int(i) for i in members), pairs))
    return out


# ---------------------------------------------------------------------------
# lookahead


@dataclass(frozen=True)
class LookaheadGraph:
    weights: np.ndarray  # symmetric (width, width)
    must: tuple[tuple[int, int], ...]
    slice_index: int

    def weight(self, p: int, q: int) -> float:
        return float(self.weights[p, q])

    def edges(self) -> dict[tuple[int, int], float]:
        iu = np.argwhere(np.triu(self.weights, 1) != 0)
        return {(int(p), int(q)): float(self.weights[p, q]) for p, q in iu}


def _must_array(pairs) -> np.ndarray:
    return np.array(pairs, dtype=np.int32).reshape(-1, 2)


def lookahead_graph(slices: list[Timeslice], s: int, opts: MapperOptions, width: int) -> LookaheadGraph:
    """Edge (p, q) weighs sum over slices t in [s, s+lookahead] using (p, q) of base^-(t-s)."""
    if not 0 <= s < len(slices):
        raise IndexError(f"slice {s} out of range")
    W = np.zeros((width, width))
    for t in range(s, min(s + opts.lookahead, len(slices) - 1) + 1):
        w = opts.decay_base ** -(t - s)
        for p, q in slices[t].pairs:
            W[p, q] += w
            W[q, p] += w
    return LookaheadGraph(W, slices[s].pairs, s)


def _intra_weight(W: np.ndarray, core: np.ndarray) -> float:
    same = core[:, None] == core[None, :]
    return float(np.triu(W * same, 1).sum())


def _pack(core: np.ndarray, must, ncores: int, capacity: int) -> np.ndarray:
    """Rebuild a balanced placement honouring every MUST pair, moving little."""
    n = len(core)
    new = np.full(n, -1, dtype=np.int32)
    load = [0] * ncores
    placed_pairs = []
    for a, b in must:
        a, b = int(a), int(b)
        if core[a] == core[b]:
            placed_pairs.append((a, b, int(core[a])))
    for a, b, c in placed_pairs:
        new[a] = new[b] = c
        load[c] += 2
    for a, b in must:
        a, b = int(a), int(b)
        if new[a] >= 0:
            continue
        choices = [int(core[a]), int(core[b])] + list(range(ncores))
        for c in choices:
            if load[c] + 2 <= capacity:
                new[a] = new[b] = c
                load[c] += 2
                break
        else:
            raise MappingError("cannot co-locate all two-qubit gates of a slice")
    for q in range(n):
        if new[q] >= 0:
            continue
        c = int(core[q])
        if load[c] >= capacity:
            c = next(k for k in range(ncores) if load[k] < capacity)
        new[q] = c
        load[c] += 1
    return new


def _refine(W, core, prev, must, arch: Architecture, mu: float, passes: int) -> np.ndarray:
    must_arr = _must_array(must)
    work = np.ascontiguousarray(core, dtype=np.int32).copy()
    prev = np.ascontiguousarray(prev, dtype=np.int32)
    moves = kernels.refine(W, work, prev, must_arr, arch.num_cores, mu, passes)
    if moves < 0:
        work = _pack(np.asarray(core, dtype=np.int32), must, arch.num_cores, arch.capacity)
        moves = kernels.refine(W, work, prev, must_arr, arch.num_cores, mu, passes)
        if moves < 0:
            raise MappingError("partition repair failed")
    return work


def block_assignment(width: int, capacity: int) -> np.ndarray:
    return (np.arange(width, dtype=np.int32) // capacity).astype(np.int32)


def initial_partition(
    graph: LookaheadGraph, arch: Architecture, seed: int = 0, opts: MapperOptions | None = None
) -> np.ndarray:
    """Placement for slice 0: refine the block layout against the slice-0 graph.

    Moves are free before execution starts, so no migration penalty applies.
    Seeded random restarts replace the block result only if strictly better.
    """
    opts = opts or MapperOptions(seed=seed)
    width = arch.num_qubits
    W = np.ascontiguousarray(graph.weights, dtype=np.float64)
    passes = opts.passes_for(width)
    start = block_assignment(width, arch.capacity)
    if arch.num_cores == 1:
        return start
    best = _refine(W, start, start, graph.must, arch, 0.0, passes)
    best_score = _intra_weight(W, best)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), 7])))
    for _ in range(opts.restarts):
        trial = rng.permutation(start).astype(np.int32)
        trial = _refine(W, trial, trial, graph.must, arch, 0.0, passes)
        score = _intra_weight(W, trial)
        if score > best_score:
            best, best_score = trial, score
    return best


def refine_partition(
    prev: np.ndarray, graph: LookaheadGraph, arch: Architecture, opts: MapperOptions | None = None
) -> np.ndarray:
    """Next-slice placement: repair split MUST edges, then greedy improving exchanges.

    Gain of an exchange is the change in core-internal lookahead weight minus
    ``migration_penalty`` times the change in qubits displaced from ``prev``.
    """
    opts = opts or MapperOptions()
    prev = np.asarray(prev, dtype=np.int32)
    if arch.num_cores == 1:
        return prev.copy()
    W = np.ascontiguousarray(graph.weights, dtype=np.float64)
    return _refine(W, prev, prev, graph.must, arch, opts.migration_penalty, opts.passes_for(len(prev)))


def insert_teleports(prev: np.ndarray, nxt: np.ndarray, between: tuple[int, int] = (0, 1)) -> list[TeleportOp]:
    """Exchanges turning placement ``prev`` into ``nxt``; a k-cycle costs k - 1."""
    prev = np.ascontiguousarray(prev, dtype=np.int32)
    nxt = np.ascontiguousarray(nxt, dtype=np.int32)
    if np.bincount(prev).tolist() != np.bincount(nxt, minlength=prev.max() + 1).tolist()[: prev.max() + 1] or len(
        np.bincount(nxt)
    ) > len(np.bincount(prev)):
        raise MappingError("assignments are not balanced over the same cores")
    rows = kernels.teleport_ops(prev, nxt)
    return [TeleportOp(between, (int(a), int(b)), (int(x), int(y))) for a, b, x, y in rows]


def apply_teleports(placement: np.ndarray, ops: list[TeleportOp]) -> np.ndarray:
    cur = np.array(placement, dtype=np.int32)
    for op in ops:
        a, b = op.qubits
        if (cur[a], cur[b]) != op.cores:
            raise MappingError(f"teleport {op} does not match the placement")
        cur[a], cur[b] = cur[b], cur[a]
    return cur


# ---------------------------------------------------------------------------
# compile


def pair_capacity(arch: Architecture) -> int:
    """Per-slice cap on two-qubit gates; 0 means no cap.

    With odd capacity a core can host at most capacity // 2 pairs, so an
    uncapped slice could be impossible to co-locate.
    """
    return arch.num_cores * (arch.capacity // 2) if arch.capacity % 2 else 0


def compile_circuit(c: Circuit, arch: Architecture, opts: MapperOptions | None = None) -> CompiledProgram:
    opts = opts or MapperOptions()
    n = arch.num_qubits
    if c.width != n:
        if opts.pad and c.width < n:
            c = Circuit(n, c.gates, c.name)
        else:
            raise MappingError(
                f"circuit width {c.width} != {arch.num_cores} cores x {arch.capacity} qubits = {n}"
                + (" (use pad to fill idle qubits)" if c.width < n and not opts.pad else "")
            )
    if any(g.kind is GateKind.TELESWAP for g in c.gates):
        raise MappingError("source circuit already contains teleswap operations")
    slices = slice_circuit(c, pair_capacity(arch))
    S = len(slices)
    if S == 0:
        initial = block_assignment(n, arch.capacity)
        return CompiledProgram(c, [], np.empty((0, n), dtype=np.int32), [], opts, arch.num_cores, arch.capacity, initial)

    L, base = opts.lookahead, opts.decay_base
    passes = opts.passes_for(n)
    W = np.zeros((n, n))
    for t in range(min(S, L + 1)):
        w = base**-t
        for p, q in slices[t].pairs:
            W[p, q] += w
            W[q, p] += w
    assignment = np.empty((S, n), dtype=np.int32)
    assignment[0] = initial_partition(LookaheadGraph(W.copy(), slices[0].pairs, 0), arch, opts.seed, opts)
    teleports: list[TeleportOp] = []
    tail_w = base**-L
    mu = opts.migration_penalty
    for s in range(1, S):
        for p, q in slices[s - 1].pairs:
            W[p, q] -= 1.0
            W[q, p] -= 1.0
        W *= base
        if s + L < S:
            for p, q in slices[s + L].pairs:
                W[p, q] += tail_w
                W[q, p] += tail_w
        prev = assignment[s - 1]
        if arch.num_cores == 1:
            assignment[s] = prev
            continue
        cur = _refine(W, prev, prev, slices[s].pairs, arch, mu, passes)
        assignment[s] = cur
        for a, b, x, y in kernels.teleport_ops(prev, cur):
            teleports.append(TeleportOp((s - 1, s), (int(a), int(b)), (int(x), int(y))))
    return CompiledProgram(c, slices, assignment, teleports, opts, arch.num_cores, arch.capacity)


# ---------------------------------------------------------------------------
# invariants


def check_program(p: CompiledProgram) -> list[str]:
    """Return a list of violated invariants (empty when the program is sound)."""
    problems = []
    c, n = p.source, p.width
    S = len(p.slices)
    if p.assignment.shape != (S, n):
        return [f"assignment shape {p.assignment.shape} != {(S, n)}"]
    seen = []
    for sl in p.slices:
        seen.extend(sl.gates)
        busy = set()
        for gi in sl.gates:
            g = c.gates[gi]
            if g.is_two_qubit:
                a, b = g.operands
                if a in busy or b in busy:
                    problems.append(f"slice {sl.index}: qubit in two two-qubit gates")
                busy.update((a, b))
                if p.assignment[sl.index, a] != p.assignment[sl.index, b]:
                    problems.append(f"slice {sl.index}: gate {gi} operands on different cores")
    if sorted(seen) != list(range(len(c.gates))):
        problems.append("slices do not partition the gate list")
    per_qubit_src: dict[int, list[int]] = {q: [] for q in range(n)}
    for i, g in enumerate(c.gates):
        for q in g.operands:
            per_qubit_src[q].append(i)
    per_qubit_sl: dict[int, list[int]] = {q: [] for q in range(n)}
    for sl in p.slices:
        for gi in sl.gates:
            for q in c.gates[gi].operands:
                per_qubit_sl[q].append(gi)
    if per_qubit_src != per_qubit_sl:
        problems.append("per-qubit gate order not preserved")
    for s in range(S):
        counts = np.bincount(p.assignment[s], minlength=p.num_cores)
        if len(counts) != p.num_cores or np.any(counts != p.capacity):
            problems.append(f"slice {s}: core loads {counts.tolist()} != capacity {p.capacity}")
    if S:
        if not np.array_equal(p.initial, p.assignment[0]):
            problems.append("initial placement differs from slice 0")
        by_gap: dict[int, list[TeleportOp]] = {}
        last = (-1, -1)
        for op in p.teleports:
            if op.between_slices < last:
                problems.append("teleports not sorted by slice")
            last = op.between_slices
            if op.between_slices[1] != op.between_slices[0] + 1:
                problems.append(f"teleport {op} spans non-adjacent slices")
            if op.qubits[0] == op.qubits[1] or op.cores[0] == op.cores[1]:
                problems.append(f"degenerate teleport {op}")
            by_gap.setdefault(op.between_slices[0], []).append(op)
        for s in range(1, S):
            try:
                replay = apply_teleports(p.assignment[s - 1], by_gap.get(s - 1, []))
            except MappingError as e:
                problems.append(f"slices {s - 1}->{s}: {e}")
                continue
            if not np.array_equal(replay, p.assignment[s]):
                problems.append(f"slices {s - 1}->{s}: teleports do not reproduce the placement")
    return problems


# ---------------------------------------------------------------------------
# compiled text format

_PLACE_RE = re.compile(r"place\s+v(\d+)\s*->\s*c(\d+)$")
_HEADER_RE = re.compile(r"(num_cores|capacity)\s+(\d+)$")
_OPTION_RE = re.compile(r"option\s+(\w+)\s+(\S+)$")


def serialize_compiled(p: CompiledProgram) -> str:
    lines = ["version 1.0", f"qubits {p.width}", "# qtraffic compiled program"]
    lines.append(f"# num_cores {p.num_cores}")
    lines.append(f"# capacity {p.capacity}")
    for f_ in fields(MapperOptions):
        value = getattr(p.options, f_.name)
        lines.append(f"# option {f_.name} {'none' if value is None else value}")
    for v, c in enumerate(p.initial):
        lines.append(f"# place v{v} -> c{int(c)}")
    by_gap: dict[int, list[TeleportOp]] = {}
    for op in p.teleports:
        by_gap.setdefault(op.between_slices[0], []).append(op)
    gates = p.source.gates
    for sl in p.slices:
        lines.append(f"slice {sl.index}")
        lines.extend(str(gates[i]) for i in sl.gates)
        for op in by_gap.get(sl.index, []):
            a, b = op.qubits
            lines.append(f"teleswap q[{a}], q[{b}]")
    return "\n".join(lines) + "\n"


def _parse_option(name: str, raw: str):
    kinds = {"lookahead": int, "decay_base": float, "migration_penalty": float, "max_passes": int,
             "seed": int, "restarts": int, "pad": lambda s: s == "True"}
    if raw == "none":
        return None
    return kinds[name](raw)


def parse_compiled(text: str, name: str = "") -> CompiledProgram:
    """Rebuild a CompiledProgram from compiled text, validating it on the way."""
    width, statements = scan(text, compiled=True)
    num_cores = capacity = None
    placement: dict[int, int] = {}
    options = {}
    gates: list[Gate] = []
    slice_gates: list[list[int]] = []
    slice_tele: list[list[tuple[int, int, int]]] = []  # (a, b, line)
    for st in statements:
        if st.kind == "comment":
            m = _PLACE_RE.match(st.text)
            if m:
                v, c = int(m.group(1)), int(m.group(2))
                if v in placement:
                    raise ParseError(f"duplicate placement for v{v}", st.line)
                placement[v] = c
                continue
            m = _HEADER_RE.match(st.text)
            if m:
                if m.group(1) == "num_cores":
                    num_cores = int(m.group(2))
                else:
                    capacity = int(m.group(2))
                continue
            m = _OPTION_RE.match(st.text)
            if m and m.group(1) in {f_.name for f_ in fields(MapperOptions)}:
                try:
                    options[m.group(1)] = _parse_option(m.group(1), m.group(2))
                except ValueError:
                    raise ParseError(f"bad option value {m.group(2)!r}", st.line) from None
            continue
        if st.kind == "slice":
            if st.slice_index != len(slice_gates):
                raise ParseError(
                    f"slice directive {st.slice_index} out of sequence (expected {len(slice_gates)})", st.line
                )
            slice_gates.append([])
            slice_tele.append([])
            continue
        g = st.gate
        if not slice_gates:
            raise ParseError("instruction before the first slice directive", st.line)
        if g.kind is GateKind.TELESWAP:
            slice_tele[-1].append((g.operands[0], g.operands[1], st.line))
            continue
        if slice_tele[-1]:
            raise ParseError("gate after teleswap within a slice block", st.line)
        slice_gates[-1].append(len(gates))
        gates.append(g)
    if num_cores is None or capacity is None:
        raise ParseError("compiled header lacks num_cores/capacity")
    if num_cores * capacity != width:
        raise ParseError(f"num_cores x capacity = {num_cores * capacity} != qubits {width}")
    if sorted(placement) != list(range(width)):
        raise ParseError("placement header must list every virtual qubit exactly once")
    initial = np.array([placement[v] for v in range(width)], dtype=np.int32)
    if np.any(initial >= num_cores) or np.any(np.bincount(initial, minlength=num_cores) != capacity):
        raise ParseError("placement header is not a balanced assignment")
    if slice_tele and slice_tele[-1]:
        raise ParseError("teleswap after the last slice", slice_tele[-1][0][2])
    source = Circuit(width, tuple(gates), name)
    S = len(slice_gates)
    assignment = np.empty((S, width), dtype=np.int32)
    slices: list[Timeslice] = []
    teleports: list[TeleportOp] = []
    cur = initial.copy()
    for s in range(S):
        if s:
            for a, b, line in slice_tele[s - 1]:
                if cur[a] == cur[b]:
                    raise ParseError(f"teleswap q[{a}], q[{b}] between qubits on the same core {cur[a]}", line)
                teleports.append(TeleportOp((s - 1, s), (a, b), (int(cur[a]), int(cur[b]))))
                cur[a], cur[b] = cur[b], cur[a]
        assignment[s] = cur
        busy = set()
        pairs = []
        for gi in slice_gates[s]:
            g = gates[gi]
            if g.is_two_qubit:
                a, b = g.operands
                if a in busy or b in busy:
                    raise ParseError(f"qubit used by two two-qubit gates in slice {s}", g.source_line)
                busy.update((a, b))
                if cur[a] != cur[b]:
                    raise ParseError(
                        f"co-location violated in slice {s}: q[{a}] on core {cur[a]}, q[{b}] on core {cur[b]}",
                        g.source_line,
                    )
                pairs.append((a, b))
        slices.append(Timeslice(s, tuple(slice_gates[s]), tuple(pairs)))
    return CompiledProgram(
        source, slices, assignment, teleports, MapperOptions(**options), num_cores, capacity, initial
    )


def options_dict(o: MapperOptions) -> dict:
    return asdict(o)
