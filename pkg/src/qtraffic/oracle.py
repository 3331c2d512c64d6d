"""Exhaustive minimum-teleport oracle for tiny instances.

Used to check the heuristic mapper.  The search is a dynamic program over
timeslices whose states are all balanced core assignments satisfying the
slice's co-location pairs.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .arch import Architecture
from .circuit import Circuit
from .mapper import pair_capacity, slice_circuit

MAX_QUBITS = 8
MAX_CORES = 3
MAX_SLICES = 8


class OracleLimitError(ValueError):
    pass


@lru_cache(maxsize=None)
def balanced_assignments(width: int, ncores: int, capacity: int) -> tuple[tuple[int, ...], ...]:
    """Every map qubit -> core with exactly ``capacity`` qubits per core."""
    out = []

    def rec(prefix, loads):
        if len(prefix) == width:
            out.append(tuple(prefix))
            return
        for c in range(ncores):
            if loads[c] < capacity:
                loads[c] += 1
                prefix.append(c)
                rec(prefix, loads)
                prefix.pop()
                loads[c] -= 1

    rec([], [0] * ncores)
    return tuple(out)


def swap_cost(prev, nxt, ncores: int) -> int:
    """Fewest inter-core exchanges turning ``prev`` into ``nxt``.

    Equals |M| minus the largest number of cycles in a decomposition of the
    core-level migration multigraph.  With at most three cores the best
    decomposition takes every available 2-cycle and leaves only 3-cycles.
    """
    if ncores > 3:
        raise OracleLimitError("closed-form swap cost needs at most 3 cores")
    flow = [[0] * ncores for _ in range(ncores)]
    moved = 0
    for x, y in zip(prev, nxt):
        if x != y:
            flow[x][y] += 1
            moved += 1
    two = 0
    for x, y in itertools.combinations(range(ncores), 2):
        k = min(flow[x][y], flow[y][x])
        two += k
        flow[x][y] -= k
        flow[y][x] -= k
    residual = sum(map(sum, flow))
    return moved - two - residual // 3


def optimal_oracle(c: Circuit, a: Architecture) -> int:
    if c.width > MAX_QUBITS or a.num_cores > MAX_CORES:
        raise OracleLimitError(f"oracle limited to {MAX_QUBITS} qubits and {MAX_CORES} cores")
    if c.width != a.num_qubits:
        raise OracleLimitError("circuit width must equal num_cores x capacity")
    slices = slice_circuit(c, pair_capacity(a))
    if len(slices) > MAX_SLICES:
        raise OracleLimitError(f"oracle limited to {MAX_SLICES} slices (got {len(slices)})")
    if not slices:
        return 0
    states = balanced_assignments(c.width, a.num_cores, a.capacity)

    def feasible(sl):
        return [s for s in states if all(s[p] == s[q] for p, q in sl.pairs)]

    layer = feasible(slices[0])
    cost = {s: 0 for s in layer}
    for sl in slices[1:]:
        nxt_layer = feasible(sl)
        new = {}
        for t in nxt_layer:
            new[t] = min(cost[s] + swap_cost(s, t, a.num_cores) for s in cost)
        cost = new
    return min(cost.values())


def migration_lower_bound(assignment: np.ndarray) -> int:
    """max over consecutive slices of ceil(|M| / 2): each exchange moves two qubits."""
    best = 0
    for s in range(1, len(assignment)):
        m = int(np.count_nonzero(assignment[s] != assignment[s - 1]))
        best = max(best, (m + 1) // 2)
    return best
