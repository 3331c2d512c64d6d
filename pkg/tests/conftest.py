import math

import numpy as np
import pytest

from qtraffic.arch import Architecture
from qtraffic.circuit import Circuit, Gate, GateKind as K

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_FIXED = {
    K.H: _H,
    K.X: np.array([[0, 1], [1, 0]]),
    K.Y: np.array([[0, -1j], [1j, 0]]),
    K.Z: np.diag([1, -1]),
    K.S: np.diag([1, 1j]),
    K.SDG: np.diag([1, -1j]),
    K.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    K.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]),
    K.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    K.CZ: np.diag([1, 1, 1, -1]),
    K.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
}


def gate_matrix(g: Gate) -> np.ndarray:
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    a = g.angle
    if g.kind is K.RZ:
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])
    if g.kind is K.RX:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if g.kind is K.RY:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]])
    if g.kind is K.CPHASE:
        return np.diag([1, 1, 1, np.exp(1j * a)])
    raise ValueError(g.kind)


def unitary(n: int, gates) -> np.ndarray:
    """Dense unitary of a gate list; qubit 0 is the most significant bit."""
    u = np.eye(2**n, dtype=complex).reshape([2] * n + [2**n])
    for g in gates:
        q = list(g.operands)
        k = len(q)
        m = gate_matrix(g).reshape([2] * (2 * k))
        u = np.moveaxis(np.tensordot(m, u, axes=(list(range(k, 2 * k)), q)), list(range(k)), q)
    return u.reshape(2**n, 2**n)


def cnots(*pairs) -> list[Gate]:
    return [Gate(K.CNOT, p) for p in pairs]


@pytest.fixture
def arch_8x8():
    return Architecture(8, 8)


def circuit(width, gates, name=""):
    return Circuit(width, tuple(gates), name)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the terminal summary lists them all."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(ok), detail)
        print(f"C{number} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"C{number:<3} {'PASS' if ok else 'FAIL'}  {detail}")
