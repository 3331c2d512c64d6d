"""Pure-Python/numpy reference implementations of the hot kernels.

Each function here has a twin in ``_core.pyx`` with the same signature and
bit-identical results.  Gains are sums of dyadic fractions, so both backends
compute them exactly and tie-breaking is the only thing that has to agree.
"""
from __future__ import annotations

import numpy as np


def slice_layers(q0, q1, width: int, max_pairs: int = 0) -> np.ndarray:
    """Greedy ASAP layering; returns the slice index of every gate.

    ``q1[i] < 0`` marks a single-qubit gate.  A qubit may carry at most one
    two-qubit gate per slice; ``max_pairs > 0`` also caps two-qubit gates
    per slice.
    """
    g = len(q0)
    out = np.empty(g, dtype=np.int32)
    last = [0] * width  # slice of the qubit's latest gate
    busy = [False] * width  # whether that slice holds a two-qubit gate on it
    pairs: list[int] = []
    for i in range(g):
        a = int(q0[i])
        b = int(q1[i])
        if b < 0:
            out[i] = last[a]
            continue
        s = max(last[a] + busy[a], last[b] + busy[b])
        if max_pairs > 0:
            while s < len(pairs) and pairs[s] >= max_pairs:
                s += 1
        while len(pairs) <= s:
            pairs.append(0)
        pairs[s] += 1
        out[i] = s
        last[a] = last[b] = s
        busy[a] = busy[b] = True
    return out


def _affinity(W: np.ndarray, core: np.ndarray, ncores: int) -> np.ndarray:
    onehot = np.zeros((len(core), ncores))
    onehot[np.arange(len(core)), core] = 1.0
    return W @ onehot


def _gain(W, aff, core, prev, mu, a, b):
    x, y = core[a], core[b]
    d = aff[a, y] - aff[a, x] + aff[b, x] - aff[b, y] - 2.0 * W[a, b]
    dmig = (int(y != prev[a]) + int(x != prev[b])) - (int(x != prev[a]) + int(y != prev[b]))
    return d - mu * dmig


def _exchange(W, aff, core, a, b):
    x, y = core[a], core[b]
    aff[:, x] += W[:, b] - W[:, a]
    aff[:, y] += W[:, a] - W[:, b]
    core[a], core[b] = y, x


def refine(W, core, prev, must, ncores: int, mu: float, max_passes: int) -> int:
    """Repair MUST edges, then apply best-gain exchanges while the gain is positive.

    Modifies ``core`` in place.  Returns the number of exchanges, or -1 if a
    split MUST edge could not be repaired by a single exchange.
    """
    n = len(core)
    aff = _affinity(W, core, ncores)
    fixed = np.zeros(n, dtype=bool)
    for a, b in must:
        if core[a] == core[b]:
            fixed[a] = fixed[b] = True
    moves = 0
    for a, b in must:
        a, b = int(a), int(b)
        if core[a] == core[b]:
            # may have been joined by an earlier repair; protect it from now on
            fixed[a] = fixed[b] = True
            continue
        if aff[a, core[a]] < aff[b, core[b]]:
            order = ((a, b), (b, a))
        else:
            order = ((b, a), (a, b))
        done = False
        for mover, partner in order:
            y = core[partner]
            best, best_gain = -1, 0.0
            for r in range(n):
                if core[r] != y or r == partner or fixed[r]:
                    continue
                gain = _gain(W, aff, core, prev, mu, mover, r)
                if best < 0 or gain > best_gain:
                    best, best_gain = r, gain
            if best >= 0:
                _exchange(W, aff, core, mover, best)
                fixed[mover] = fixed[partner] = True
                moves += 1
                done = True
                break
        if not done:
            return -1
    free = np.flatnonzero(~fixed)
    if len(free) < 2:
        return moves
    sub = np.ix_(free, free)
    for _ in range(max_passes):
        cf = core[free]
        own = aff[free, cf]
        # gains[i, j] for exchanging free[i] and free[j]
        cross = aff[free][:, cf]
        gains = cross + cross.T - own[:, None] - own[None, :] - 2.0 * W[sub]
        pf = prev[free]
        mig_old = (cf != pf).astype(np.int64)
        mig_new = (cf[None, :] != pf[:, None]).astype(np.int64)  # [i, j]: i moves to j's core
        dmig = mig_new + mig_new.T - mig_old[:, None] - mig_old[None, :]
        gains = gains - mu * dmig
        gains[cf[:, None] == cf[None, :]] = -np.inf
        gains = np.triu(gains, 1) + np.tril(np.full_like(gains, -np.inf))
        flat = int(np.argmax(gains))
        i, j = divmod(flat, len(free))
        if not gains[i, j] > 0.0:
            break
        _exchange(W, aff, core, int(free[i]), int(free[j]))
        moves += 1
    return moves


def teleport_ops(prev, nxt) -> np.ndarray:
    """Decompose the migration prev -> nxt into qubit exchanges.

    Rows are ``(a, b, core_a, core_b)`` with cores taken before the exchange.
    Two-cycles are resolved first (lowest index first), then the remaining
    cycles are followed from their lowest-index qubit.
    """
    cur = [int(c) for c in prev]
    want = [int(c) for c in nxt]
    n = len(cur)
    ops = []

    def swap(a, b):
        ops.append((a, b, cur[a], cur[b]))
        cur[a], cur[b] = cur[b], cur[a]

    for a in range(n):
        if cur[a] == want[a]:
            continue
        x, y = cur[a], want[a]
        for b in range(a + 1, n):
            if cur[b] == y and want[b] == x:
                swap(a, b)
                break
    for a0 in range(n):
        a = a0
        while cur[a] != want[a]:
            x, y = cur[a], want[a]
            pick = fallback = -1
            for b in range(n):
                if b != a and cur[b] == y and want[b] != y:
                    if want[b] == x:
                        pick = b
                        break
                    if fallback < 0:
                        fallback = b
            b = pick if pick >= 0 else fallback
            if b < 0:
                raise ValueError("unbalanced assignments")
            swap(a, b)
            a = b
    return np.array(ops, dtype=np.int32).reshape(-1, 4)


def asap(q0, q1, dur, width: int) -> np.ndarray:
    free = [0] * width
    starts = np.empty(len(q0), dtype=np.int64)
    for i in range(len(q0)):
        a = int(q0[i])
        b = int(q1[i])
        t = free[a]
        if b >= 0 and free[b] > t:
            t = free[b]
        starts[i] = t
        end = t + int(dur[i])
        free[a] = end
        if b >= 0:
            free[b] = end
    return starts


def fill_trace(grid, r0, r1, c0, c1, state) -> None:
    for i in range(len(r0)):
        grid[r0[i], c0[i] : c1[i]] = state[i]
        if r1[i] >= 0:
            grid[r1[i], c0[i] : c1[i]] = state[i]
