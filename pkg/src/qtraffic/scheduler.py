"""ASAP list scheduling of a compiled program.

Operations are issued in (slice, gate order) with each inter-slice teleport
batch placed just before the slice it feeds.  Since the only resources are
the qubits themselves, every operation starts as soon as its operands are
free; teleports of one batch overlap each other and unrelated gates.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .arch import Architecture
from .circuit import GateKind
from .mapper import CompiledProgram

_KINDS = list(GateKind)
_KIND_CODE = {k: i for i, k in enumerate(_KINDS)}
TELESWAP_CODE = _KIND_CODE[GateKind.TELESWAP]


@dataclass(frozen=True)
class TimedOp:
    kind: GateKind
    virtual: tuple[int, ...]
    physical: tuple[int, ...]
    cores: tuple[int, ...]
    start_ns: int
    duration_ns: int
    slice: int

    @property
    def end_ns(self) -> int:
        return self.start_ns + self.duration_ns


class Schedule:
    """Timed execution stored column-wise; ``ops`` materializes TimedOp rows.

    Arrays are in issue order: ``order`` sorts them by (start, issue index).
    For a teleport, ``slice`` is the slice it feeds and the physical/core
    columns describe the placement just before the exchange.
    """

    def __init__(self, program: CompiledProgram, arch: Architecture, kind, q0, q1, p0, p1, c0, c1, sl, start, dur):
        self.program = program
        self.arch = arch
        self.kind = kind
        self.q0, self.q1 = q0, q1
        self.p0, self.p1 = p0, p1
        self.c0, self.c1 = c0, c1
        self.slice = sl
        self.start = start
        self.dur = dur
        self.order = np.lexsort((np.arange(len(start)), start))
        self.makespan_ns = int((start + dur).max()) if len(start) else 0

    def __len__(self) -> int:
        return len(self.start)

    @property
    def is_teleport(self) -> np.ndarray:
        return self.kind == TELESWAP_CODE

    @cached_property
    def ops(self) -> list[TimedOp]:
        out = []
        for i in self.order:
            two = self.q1[i] >= 0
            out.append(
                TimedOp(
                    _KINDS[self.kind[i]],
                    (int(self.q0[i]), int(self.q1[i])) if two else (int(self.q0[i]),),
                    (int(self.p0[i]), int(self.p1[i])) if two else (int(self.p0[i]),),
                    (int(self.c0[i]), int(self.c1[i])) if two else (int(self.c0[i]),),
                    int(self.start[i]),
                    int(self.dur[i]),
                    int(self.slice[i]),
                )
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["op_index", "kind", "slice", "v_operands", "p_operands", "cores", "start_ns", "duration_ns"])
        for n, op in enumerate(self.ops):
            w.writerow(
                [
                    n,
                    op.kind.mnemonic,
                    op.slice,
                    " ".join(map(str, op.virtual)),
                    " ".join(map(str, op.physical)),
                    " ".join(map(str, op.cores)),
                    op.start_ns,
                    op.duration_ns,
                ]
            )
        return buf.getvalue()


def initial_slots(placement: np.ndarray, capacity: int) -> np.ndarray:
    """Physical qubit of every virtual qubit: within a core, ascending virtual index."""
    slots = np.empty(len(placement), dtype=np.int64)
    fill: dict[int, int] = {}
    for v, c in enumerate(placement):
        c = int(c)
        slots[v] = c * capacity + fill.get(c, 0)
        fill[c] = fill.get(c, 0) + 1
    return slots


def _issue_order(p: CompiledProgram, a: Architecture):
    """Flatten the program into issue-order columns."""
    gates = p.source.gates
    by_gap: dict[int, list] = {}
    for op in p.teleports:
        by_gap.setdefault(op.between_slices[1], []).append(op)
    total = sum(len(sl.gates) for sl in p.slices) + len(p.teleports)
    kind = np.empty(total, dtype=np.int8)
    q0 = np.empty(total, dtype=np.int32)
    q1 = np.empty(total, dtype=np.int32)
    p0 = np.empty(total, dtype=np.int32)
    p1 = np.empty(total, dtype=np.int32)
    sl_col = np.empty(total, dtype=np.int32)
    dur = np.empty(total, dtype=np.int64)
    slots = initial_slots(p.initial, p.capacity)
    dur_of = {k: (a.duration(k) if k is GateKind.TELESWAP or k in a.durations else None) for k in GateKind}
    i = 0
    for sl in p.slices:
        for op in by_gap.get(sl.index, ()):
            x, y = op.qubits
            kind[i] = TELESWAP_CODE
            q0[i], q1[i] = x, y
            p0[i], p1[i] = slots[x], slots[y]
            slots[x], slots[y] = slots[y], slots[x]
            sl_col[i] = sl.index
            dur[i] = a.teleport_ns
            i += 1
        for gi in sl.gates:
            g = gates[gi]
            d = dur_of[g.kind]
            if d is None:
                a.duration(g.kind)  # raises with a clear message
            kind[i] = _KIND_CODE[g.kind]
            q0[i] = g.operands[0]
            p0[i] = slots[g.operands[0]]
            if g.is_two_qubit:
                q1[i] = g.operands[1]
                p1[i] = slots[g.operands[1]]
            else:
                q1[i] = p1[i] = -1
            sl_col[i] = sl.index
            dur[i] = d
            i += 1
    c0 = p0 // a.capacity
    c1 = np.where(p1 >= 0, p1 // a.capacity, -1).astype(np.int32)
    return kind, q0, q1, p0, p1, c0.astype(np.int32), c1, sl_col, dur


def schedule_asap(p: CompiledProgram, a: Architecture) -> Schedule:
    if (p.num_cores, p.capacity) != (a.num_cores, a.capacity):
        raise ValueError(
            f"program compiled for {p.num_cores}x{p.capacity}, architecture is {a.num_cores}x{a.capacity}"
        )
    kind, q0, q1, p0, p1, c0, c1, sl, dur = _issue_order(p, a)
    start = kernels.asap(q0, q1, dur, p.width)
    return Schedule(p, a, kind, q0, q1, p0, p1, c0, c1, sl, start, dur)


def critical_path_ns(p: CompiledProgram, a: Architecture) -> int:
    """Longest duration-weighted path through the per-qubit dependency DAG."""
    kind, q0, q1, _, _, _, _, _, dur = _issue_order(p, a)
    finish = np.zeros(len(dur), dtype=np.int64)
    last = [-1] * p.width
    best = 0
    for i in range(len(dur)):
        preds = [last[q0[i]]]
        if q1[i] >= 0:
            preds.append(last[q1[i]])
        ready = max((finish[j] for j in preds if j >= 0), default=0)
        finish[i] = ready + dur[i]
        best = max(best, int(finish[i]))
        last[q0[i]] = i
        if q1[i] >= 0:
            last[q1[i]] = i
    return best


def check_schedule(s: Schedule) -> list[str]:
    """Scan a Schedule for overlap, dependency and slice-ordering violations."""
    problems = []
    cyc = s.arch.cycle_ns
    if np.any(s.start < 0) or np.any(s.start % cyc):
        problems.append("start times must be non-negative multiples of the cycle")
    end_of_last = np.zeros(s.program.width, dtype=np.int64)
    # issue order already follows per-qubit program order, so overlap and
    # dependency checks reduce to: each op starts after the previous op on
    # each of its qubits has ended
    for i in range(len(s)):
        for q in (s.q0[i], s.q1[i]):
            if q < 0:
                continue
            if s.start[i] < end_of_last[q]:
                problems.append(f"op {i} on qubit {q} starts before its predecessor ends")
            end_of_last[q] = s.start[i] + s.dur[i]
    tele = s.is_teleport
    if len(s):
        tele_end = {}
        for i in np.flatnonzero(tele):
            for q in (s.q0[i], s.q1[i]):
                key = (int(s.slice[i]), int(q))
                tele_end[key] = max(tele_end.get(key, 0), int(s.start[i] + s.dur[i]))
        for i in np.flatnonzero(~tele):
            for q in (s.q0[i], s.q1[i]):
                if q >= 0 and s.start[i] < tele_end.get((int(s.slice[i]), int(q)), 0):
                    problems.append(f"op {i} starts before the teleport moving qubit {q} ends")
        if s.makespan_ns != int((s.start + s.dur).max()):
            problems.append("makespan mismatch")
    return problems
