"""Circuit intermediate representation and its cQASM-1.0 subset text format.

A :class:`Circuit` is an ordered list of one- and two-qubit :class:`Gate`
objects over virtual qubits.  The text format is a strict subset of cQASM 1.0::

    version 1.0
    qubits 3
    h q[0]
    cphase q[0], q[1], 1.57079632679
    rz q[2], 0.5

Compiled programs reuse the same grammar plus ``slice <k>`` directives and
``teleswap`` instructions; see :mod:`qtraffic.mapper`.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum


class CircuitError(ValueError):
    """Invalid circuit content (bad operands, arity, angles)."""


class ParseError(CircuitError):
    """Syntax or semantic error in circuit text, with its source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cnot"
    CZ = "cz"
    CPHASE = "cphase"
    SWAP = "swap"
    TELESWAP = "teleswap"

    @property
    def mnemonic(self) -> str:
        return self.value

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def has_angle(self) -> bool:
        return self in _ANGLED

    @classmethod
    def from_mnemonic(cls, name: str) -> "GateKind":
        return cls(name.lower())


_TWO_QUBIT = frozenset(
    {GateKind.CNOT, GateKind.CZ, GateKind.CPHASE, GateKind.SWAP, GateKind.TELESWAP}
)
_ANGLED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CPHASE})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    operands: tuple[int, ...]
    angle: float | None = None
    source_line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        if len(self.operands) != self.kind.arity:
            raise CircuitError(
                f"{self.kind.mnemonic} takes {self.kind.arity} operand(s), "
                f"got {len(self.operands)}"
            )
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"duplicate operand in {self.kind.mnemonic} {self.operands}")
        if any(q < 0 for q in self.operands):
            raise CircuitError(f"negative qubit index in {self.operands}")
        if self.kind.has_angle:
            if self.angle is None:
                raise CircuitError(f"{self.kind.mnemonic} requires an angle")
            angle = float(self.angle)
            if not math.isfinite(angle):
                raise CircuitError(f"non-finite angle {self.angle!r}")
            object.__setattr__(self, "angle", angle)
        elif self.angle is not None:
            raise CircuitError(f"{self.kind.mnemonic} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind.arity == 2

    def __str__(self) -> str:
        ops = ", ".join(f"q[{q}]" for q in self.operands)
        if self.angle is None:
            return f"{self.kind.mnemonic} {ops}"
        return f"{self.kind.mnemonic} {ops}, {format_angle(self.angle)}"


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 1:
            raise CircuitError(f"circuit width must be >= 1, got {self.width}")
        for i, g in enumerate(self.gates):
            for q in g.operands:
                if q >= self.width:
                    raise CircuitError(
                        f"gate {i} ({g}): qubit index {q} out of range for width {self.width}"
                    )

    def __len__(self) -> int:
        return len(self.gates)

    def same_as(self, other: "Circuit", tol: float = 1e-9) -> bool:
        """Field-wise equality with an angle tolerance (names are ignored)."""
        if self.width != other.width or len(self.gates) != len(other.gates):
            return False
        for a, b in zip(self.gates, other.gates):
            if a.kind is not b.kind or a.operands != b.operands:
                return False
            if (a.angle is None) != (b.angle is None):
                return False
            if a.angle is not None and abs(a.angle - b.angle) > tol:
                return False
        return True


def format_angle(angle: float) -> str:
    return format(angle, ".12g")


# ---------------------------------------------------------------------------
# parsing

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_QUBIT_RE = re.compile(r"q\[\s*(\d+)\s*\]")
_NUMBER_RE = re.compile(_NUMBER + r"$")
_VERSION_RE = re.compile(r"version\s+1\.0$")
_QUBITS_RE = re.compile(r"qubits\s+(\d+)$")
_SLICE_RE = re.compile(r"slice\s+(\d+)$")
_STATEMENT_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*(.*)$")


@dataclass
class Statement:
    """One meaningful source line, as seen by the line scanner."""

    line: int
    column: int
    kind: str  # "gate" | "slice" | "comment"
    gate: Gate | None = None
    slice_index: int | None = None
    text: str = ""


def _strip_comment(raw: str) -> tuple[str, str | None]:
    pos = raw.find("#")
    if pos < 0:
        return raw, None
    return raw[:pos], raw[pos + 1 :]


def _parse_gate(body: str, lineno: int, col: int, width: int) -> Gate:
    m = _STATEMENT_RE.match(body)
    if not m:
        raise ParseError("expected a gate mnemonic", lineno, col)
    name, rest = m.group(1), m.group(2)
    try:
        kind = GateKind.from_mnemonic(name)
    except ValueError:
        raise ParseError(f"unknown gate mnemonic {name!r}", lineno, col) from None
    args = [a.strip() for a in rest.split(",")] if rest.strip() else []
    arg_col = col + len(name) + 1
    qubits: list[int] = []
    angles: list[float] = []
    for arg in args:
        qm = _QUBIT_RE.fullmatch(arg)
        if qm:
            if angles:
                raise ParseError("qubit operand after angle", lineno, arg_col)
            qubits.append(int(qm.group(1)))
        elif _NUMBER_RE.match(arg):
            angles.append(float(arg))
        else:
            raise ParseError(f"malformed operand {arg!r}", lineno, arg_col)
        arg_col += len(arg) + 2
    if len(qubits) != kind.arity:
        raise ParseError(
            f"{kind.mnemonic} expects {kind.arity} qubit operand(s), got {len(qubits)}",
            lineno,
            col,
        )
    for q in qubits:
        if q >= width:
            raise ParseError(f"qubit index out of range: q[{q}] with qubits {width}", lineno, col)
    if len(set(qubits)) != len(qubits):
        raise ParseError(f"duplicate operand q[{qubits[0]}]", lineno, col)
    if kind.has_angle and len(angles) != 1:
        raise ParseError(f"{kind.mnemonic} expects exactly one angle", lineno, col)
    if not kind.has_angle and angles:
        raise ParseError(f"{kind.mnemonic} takes no angle", lineno, col)
    angle = angles[0] if angles else None
    if angle is not None and not math.isfinite(angle):
        raise ParseError("angle must be finite", lineno, col)
    return Gate(kind, tuple(qubits), angle, source_line=lineno)


def scan(text: str, *, compiled: bool = False) -> tuple[int, list[Statement]]:
    """Tokenise circuit text into a width and a statement list.

    Comments are kept as statements only when ``compiled`` is set, because the
    compiled format carries its header metadata in comment lines.
    """
    width: int | None = None
    seen_version = False
    statements: list[Statement] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, comment = _strip_comment(raw)
        stripped = body.strip()
        col = len(body) - len(body.lstrip()) + 1
        if not stripped:
            if comment is not None and compiled:
                statements.append(Statement(lineno, col, "comment", text=comment.strip()))
            continue
        if not seen_version:
            if not _VERSION_RE.match(stripped):
                raise ParseError("expected 'version 1.0'", lineno, col)
            seen_version = True
            continue
        if width is None:
            m = _QUBITS_RE.match(stripped)
            if not m:
                raise ParseError("expected 'qubits <N>'", lineno, col)
            width = int(m.group(1))
            if width < 1:
                raise ParseError("qubit count must be >= 1", lineno, col)
            continue
        m = _SLICE_RE.match(stripped)
        if m:
            if not compiled:
                raise ParseError("'slice' directive is only allowed in compiled files", lineno, col)
            statements.append(Statement(lineno, col, "slice", slice_index=int(m.group(1))))
            continue
        if stripped.startswith("slice"):
            raise ParseError("malformed slice directive", lineno, col)
        gate = _parse_gate(stripped, lineno, col, width)
        if gate.kind is GateKind.TELESWAP and not compiled:
            raise ParseError("'teleswap' is only allowed in compiled files", lineno, col)
        statements.append(Statement(lineno, col, "gate", gate=gate))
    if not seen_version:
        raise ParseError("empty input: expected 'version 1.0'", 1, 1)
    if width is None:
        raise ParseError("missing 'qubits <N>' declaration")
    return width, statements


def parse_circuit(text: str, name: str = "") -> Circuit:
    """Parse source circuit text; raises :class:`ParseError` on bad input."""
    width, statements = scan(text)
    return Circuit(width, tuple(s.gate for s in statements), name)


def serialize_circuit(c: Circuit) -> str:
    lines = ["version 1.0", f"qubits {c.width}"]
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# analysis


@dataclass(frozen=True)
class DependencyDag:
    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def successors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.edges):
            out[a].append(b)
        return out


def dependency_dag(c: Circuit) -> DependencyDag:
    last: dict[int, int] = {}
    edges = set()
    for i, g in enumerate(c.gates):
        for q in g.operands:
            if q in last:
                edges.add((last[q], i))
            last[q] = i
    return DependencyDag(tuple(range(len(c.gates))), frozenset(edges))


@dataclass(frozen=True)
class GateStats:
    total: int
    two_qubit: int
    per_kind: dict[str, int]
    two_qubit_fraction: float


def gate_stats(c: Circuit) -> GateStats:
    counts = Counter(g.kind.mnemonic for g in c.gates)
    total = len(c.gates)
    two = sum(1 for g in c.gates if g.is_two_qubit)
    return GateStats(total, two, dict(sorted(counts.items())), two / total if total else 0.0)
