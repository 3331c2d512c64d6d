"""Seeded generators for the benchmark families.

All generators return :class:`~qtraffic.circuit.Circuit` objects containing
only one- and two-qubit gates.  Randomness comes from numpy's PCG64 bit
generator; every random draw is taken from a child stream keyed by
``(seed, family, index)`` so the order in which layers or gates are produced
never changes their content.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .circuit import Circuit, Gate, GateKind

H, X, Z, T, TDG = GateKind.H, GateKind.X, GateKind.Z, GateKind.T, GateKind.TDG
RX, RY, RZ = GateKind.RX, GateKind.RY, GateKind.RZ
CNOT, CZ, CPHASE = GateKind.CNOT, GateKind.CZ, GateKind.CPHASE


class Family(Enum):
    QFT = "qft"
    GROVER = "grover"
    CUCCARO = "cuccaro"
    QVOLUME = "qv"
    RANDOM = "random"


_MIN_WIDTH = {
    Family.QFT: 1,
    Family.GROVER: 2,
    Family.CUCCARO: 4,
    Family.QVOLUME: 2,
    Family.RANDOM: 2,
}

# stream tags for the child generators
_TAG_QV_PERM = 1
_TAG_QV_ANGLES = 2
_TAG_RANDOM = 3


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), *key])))


# ---------------------------------------------------------------------------
# gate-level decompositions


def toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    """Toffoli as the standard 6-CNOT network (2 H + 7 T/Tdg)."""
    g = Gate
    return [
        g(H, (t,)),
        g(CNOT, (c2, t)),
        g(TDG, (t,)),
        g(CNOT, (c1, t)),
        g(T, (t,)),
        g(CNOT, (c2, t)),
        g(TDG, (t,)),
        g(CNOT, (c1, t)),
        g(T, (c2,)),
        g(T, (t,)),
        g(H, (t,)),
        g(CNOT, (c1, c2)),
        g(T, (c1,)),
        g(TDG, (c2,)),
        g(CNOT, (c1, c2)),
    ]


def rccx(c1: int, c2: int, t: int) -> list[Gate]:
    """Toffoli up to a diagonal relative phase (3 CNOTs).

    Only valid where the phase cancels, i.e. inside a ``U . D . U^dagger``
    sandwich around a diagonal ``D``.
    """
    g = Gate
    return [
        g(H, (t,)),
        g(T, (t,)),
        g(CNOT, (c2, t)),
        g(TDG, (t,)),
        g(CNOT, (c1, t)),
        g(T, (t,)),
        g(CNOT, (c2, t)),
        g(TDG, (t,)),
        g(H, (t,)),
    ]


_INVERSE_KIND = {T: TDG, TDG: T, GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S}


def inverse(gates: list[Gate]) -> list[Gate]:
    out = []
    for g in reversed(gates):
        if g.kind in _INVERSE_KIND:
            out.append(Gate(_INVERSE_KIND[g.kind], g.operands))
        elif g.kind.has_angle:
            out.append(Gate(g.kind, g.operands, -g.angle))
        else:
            out.append(g)
    return out


def mcx(controls: list[int], target: int, dirty: list[int], exact: bool = True) -> list[Gate]:
    """Multi-controlled X that borrows ``dirty`` qubits and restores them.

    With at least ``m - 2`` borrowed qubits the Toffoli ladder uses
    ``4 * (m - 2)`` Toffolis; with fewer, the controls are split in two
    halves around one borrowed qubit.  ``exact=False`` swaps in
    relative-phase Toffolis, so the result is only correct up to a diagonal
    phase.
    """
    tof = toffoli if exact else rccx
    m = len(controls)
    if m == 0:
        return [Gate(X, (target,))]
    if m == 1:
        return [Gate(CNOT, (controls[0], target))]
    if m == 2:
        return tof(controls[0], controls[1], target)
    if len(dirty) >= m - 2:
        return _ladder(controls, target, list(dirty[: m - 2]), tof)
    if not dirty:
        raise ValueError(f"{m}-controlled X needs at least one borrowed qubit")
    a, spare = dirty[0], list(dirty[1:])
    m1 = (m + 1) // 2
    g1, g2 = list(controls[:m1]), list(controls[m1:])
    x1 = mcx(g1, a, g2 + [target] + spare, exact)
    x2 = mcx(g2 + [a], target, g1 + spare, exact)
    return x1 + x2 + x1 + x2


def _ladder(controls, target, anc, tof) -> list[Gate]:
    m = len(controls)
    # rung i + 1 is flipped by control i + 2 and rung i; the last rung is the target
    rungs = anc + [target]

    def step(i):
        if i == 0:
            return tof(controls[0], controls[1], rungs[0])
        return tof(controls[i + 1], rungs[i - 1], rungs[i])

    top = m - 2
    seq: list[Gate] = []
    for i in range(top, 0, -1):
        seq += step(i)
    seq += step(0)
    for i in range(1, top + 1):
        seq += step(i)
    # second sweep restores the borrowed rungs
    for i in range(top - 1, 0, -1):
        seq += step(i)
    seq += step(0)
    for i in range(1, top):
        seq += step(i)
    return seq


def mcphase(controls: list[int], target: int, angle: float) -> list[Gate]:
    """Phase ``angle`` on the all-ones state of ``controls + [target]``.

    Recursive controlled-rotation ladder, no extra qubits: the last control
    carries half of the rotation and is toggled by a multi-controlled X over
    the remaining controls (borrowing the already-peeled qubits and the
    target), the rest recurses with the angle halved.
    """
    gates: list[Gate] = []
    ctrl = list(controls)
    peeled: list[int] = []
    phi = angle
    while len(ctrl) > 1:
        c = ctrl.pop()
        flip = mcx(ctrl, c, [target] + peeled[::-1], exact=False)
        gates.append(Gate(CPHASE, (c, target), phi / 2))
        gates += flip
        gates.append(Gate(CPHASE, (c, target), -phi / 2))
        gates += inverse(flip)
        peeled.append(c)
        phi /= 2
    if ctrl:
        if phi == math.pi:
            gates.append(Gate(CZ, (ctrl[0], target)))
        else:
            gates.append(Gate(CPHASE, (ctrl[0], target), phi))
    elif phi == math.pi:
        gates.append(Gate(Z, (target,)))
    else:
        gates.append(Gate(RZ, (target,), phi))
    return gates


def mcz(qubits: list[int]) -> list[Gate]:
    """Phase flip on the all-ones state of ``qubits`` (last one is the target)."""
    if not qubits:
        return []
    return mcphase(list(qubits[:-1]), qubits[-1], math.pi)


# ---------------------------------------------------------------------------
# families


def gen_qft(n: int) -> Circuit:
    if n < 1:
        raise ValueError("QFT width must be >= 1")
    gates = []
    for t in range(n):
        gates.append(Gate(H, (t,)))
        for k in range(t + 1, n):
            gates.append(Gate(CPHASE, (k, t), math.pi / 2 ** (k - t)))
    return Circuit(n, tuple(gates), f"qft{n}")


def gen_grover(n: int, iterations: int = 1, marked: str | None = None) -> Circuit:
    """Grover search: uniform superposition, then oracle + diffusion rounds.

    ``marked[i]`` is the bit of qubit ``i``; qubits whose bit is ``0`` are
    X-conjugated around the oracle's multi-controlled Z.
    """
    if n < 2:
        raise ValueError("Grover width must be >= 2")
    if iterations < 1:
        raise ValueError("Grover needs at least one iteration")
    if marked is None:
        marked = "1" * n
    if len(marked) != n or set(marked) - {"0", "1"}:
        raise ValueError(f"marked bitstring must have {n} binary digits, got {marked!r}")
    qs = list(range(n))
    flips = [Gate(X, (q,)) for q in qs if marked[q] == "0"]
    gates = [Gate(H, (q,)) for q in qs]
    for _ in range(iterations):
        gates += flips + mcz(qs) + flips
        gates += [Gate(H, (q,)) for q in qs]
        gates += [Gate(X, (q,)) for q in qs]
        gates += mcz(qs)
        gates += [Gate(X, (q,)) for q in qs]
        gates += [Gate(H, (q,)) for q in qs]
    return Circuit(n, tuple(gates), f"grover{n}")


def cuccaro_layout(w: int) -> tuple[int, list[int], list[int], int]:
    """Qubit roles for a width-``w`` adder: (carry_in, a, b, carry_out).

    Registers are laid out as contiguous blocks: carry-in, a, b, carry-out.
    """
    n = (w - 2) // 2
    return 0, list(range(1, n + 1)), list(range(n + 1, 2 * n + 1)), 2 * n + 1


def _maj(c: int, b: int, a: int) -> list[Gate]:
    return [Gate(CNOT, (a, b)), Gate(CNOT, (a, c)), *toffoli(c, b, a)]


def _uma(c: int, b: int, a: int) -> list[Gate]:
    return [*toffoli(c, b, a), Gate(CNOT, (a, c)), Gate(CNOT, (c, b))]


def gen_cuccaro(w: int) -> Circuit:
    """Ripple-carry adder b <- a + b with carry-out, MAJ/UMA ladder."""
    if w < 4 or w % 2:
        raise ValueError(f"Cuccaro width must be even and >= 4, got {w}")
    cin, a, b, cout = cuccaro_layout(w)
    n = len(a)
    gates = _maj(cin, b[0], a[0])
    for i in range(1, n):
        gates += _maj(a[i - 1], b[i], a[i])
    gates.append(Gate(CNOT, (a[n - 1], cout)))
    for i in range(n - 1, 0, -1):
        gates += _uma(a[i - 1], b[i], a[i])
    gates += _uma(cin, b[0], a[0])
    return Circuit(w, tuple(gates), f"cuccaro{w}")


def _su4_block(p: int, q: int, angles: np.ndarray) -> list[Gate]:
    it = iter(float(x) for x in angles)
    out: list[Gate] = []

    def rot(kinds, qubit):
        for k in kinds:
            out.append(Gate(k, (qubit,), next(it)))

    rot((RZ, RY, RZ), p)
    rot((RZ, RY, RZ), q)
    out.append(Gate(CNOT, (p, q)))
    rot((RZ, RY), p)
    rot((RZ, RY), q)
    out.append(Gate(CNOT, (p, q)))
    rot((RY,), p)
    rot((RY,), q)
    out.append(Gate(CNOT, (p, q)))
    rot((RZ, RY, RZ), p)
    rot((RZ, RY, RZ), q)
    return out


SU4_ANGLES = 18


def gen_qvolume(n: int, depth: int | None = None, seed: int = 0) -> Circuit:
    if n < 2:
        raise ValueError("quantum volume width must be >= 2")
    depth = n if depth is None else depth
    if depth < 1:
        raise ValueError("quantum volume depth must be >= 1")
    gates: list[Gate] = []
    for layer in range(depth):
        perm = _stream(seed, _TAG_QV_PERM, layer).permutation(n)
        pairs = n // 2
        angles = _stream(seed, _TAG_QV_ANGLES, layer).uniform(0.0, 2 * math.pi, (pairs, SU4_ANGLES))
        for j in range(pairs):
            gates += _su4_block(int(perm[2 * j]), int(perm[2 * j + 1]), angles[j])
    return Circuit(n, tuple(gates), f"qv{n}")


def gen_random(n: int, g: int, p: float = 0.5, seed: int = 0) -> Circuit:
    """``g`` gates: CNOT with probability ``p``, else one of H, X, RZ."""
    if n < 2:
        raise ValueError("random circuit width must be >= 2")
    if g < 1:
        raise ValueError("random circuit needs at least one gate")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"two-qubit fraction must lie in [0, 1], got {p}")
    gates = []
    for i in range(g):
        rng = _stream(seed, _TAG_RANDOM, i)
        if rng.random() < p:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate(CNOT, (int(a), int(b))))
        else:
            which = int(rng.integers(3))
            q = int(rng.integers(n))
            if which == 0:
                gates.append(Gate(H, (q,)))
            elif which == 1:
                gates.append(Gate(X, (q,)))
            else:
                gates.append(Gate(RZ, (q,), float(rng.uniform(0.0, 2 * math.pi))))
    return Circuit(n, tuple(gates), f"random{n}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchSpec:
    family: Family
    width: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.family, str):
            object.__setattr__(self, "family", Family(self.family))
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        lo = _MIN_WIDTH[self.family]
        if self.width < lo:
            raise ValueError(f"{self.family.value} needs width >= {lo}, got {self.width}")
        if self.family is Family.CUCCARO and self.width % 2:
            raise ValueError("cuccaro width must be even")

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "width": self.width,
            "seed": self.seed,
            "params": dict(sorted(self.params.items())),
        }


def default_random_gates(width: int) -> int:
    return 20 * width


def generate(spec: BenchSpec) -> Circuit:
    f, n, p = spec.family, spec.width, spec.params
    if f is Family.QFT:
        return gen_qft(n)
    if f is Family.GROVER:
        return gen_grover(n, p.get("iterations", 1), p.get("marked"))
    if f is Family.CUCCARO:
        return gen_cuccaro(n)
    if f is Family.QVOLUME:
        return gen_qvolume(n, p.get("depth"), spec.seed)
    return gen_random(n, p.get("gates") or default_random_gates(n), p.get("twoq", 0.5), spec.seed)
