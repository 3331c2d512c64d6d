"""Multi-core platform model: equal cores, full intra-core connectivity,
uniform teleport latency between any two cores (shared EPR source)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .circuit import GateKind

DEFAULT_TELEPORT_NS = 1000
DEFAULT_CYCLE_NS = 20
DEFAULT_DURATIONS = {
    **{k: 20 for k in GateKind if k.arity == 1},
    GateKind.CNOT: 40,
    GateKind.CZ: 40,
    GateKind.CPHASE: 40,
}


class ArchitectureError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalQubit:
    id: int
    core: int
    offset: int


@dataclass(frozen=True)
class Architecture:
    num_cores: int
    capacity: int
    teleport_ns: int = DEFAULT_TELEPORT_NS
    cycle_ns: int = DEFAULT_CYCLE_NS
    durations: Mapping[GateKind, int] = field(default_factory=lambda: dict(DEFAULT_DURATIONS))

    def __post_init__(self):
        if self.num_cores < 1:
            raise ArchitectureError("num_cores must be >= 1")
        if self.capacity < 2:
            raise ArchitectureError("capacity must be >= 2 so a two-qubit gate fits in a core")
        if self.cycle_ns < 1:
            raise ArchitectureError("cycle_ns must be positive")
        if self.teleport_ns <= 0 or self.teleport_ns % self.cycle_ns:
            raise ArchitectureError(
                f"teleport_ns={self.teleport_ns} is not a positive multiple of cycle_ns={self.cycle_ns}"
            )
        durations = {GateKind(k) if isinstance(k, str) else k: int(v) for k, v in self.durations.items()}
        for kind, ns in durations.items():
            if kind is GateKind.TELESWAP:
                raise ArchitectureError("teleswap duration is set through teleport_ns")
            if ns <= 0 or ns % self.cycle_ns:
                raise ArchitectureError(
                    f"duration of {kind.mnemonic} ({ns} ns) is not a positive multiple of "
                    f"cycle_ns={self.cycle_ns}"
                )
        object.__setattr__(self, "durations", durations)

    @property
    def num_qubits(self) -> int:
        return self.num_cores * self.capacity

    def duration(self, kind: GateKind) -> int:
        if kind is GateKind.TELESWAP:
            return self.teleport_ns
        try:
            return self.durations[kind]
        except KeyError:
            raise ArchitectureError(f"no duration configured for {kind.mnemonic}") from None

    def physical(self, phys: int) -> PhysicalQubit:
        return PhysicalQubit(phys, core_of(self, phys), phys % self.capacity)

    def phys_id(self, core: int, offset: int) -> int:
        if not (0 <= core < self.num_cores and 0 <= offset < self.capacity):
            raise ArchitectureError(f"(core {core}, offset {offset}) out of range")
        return core * self.capacity + offset

    def to_dict(self) -> dict:
        return {
            "num_cores": self.num_cores,
            "capacity": self.capacity,
            "teleport_ns": self.teleport_ns,
            "cycle_ns": self.cycle_ns,
            "durations": {k.mnemonic: v for k, v in sorted(self.durations.items(), key=lambda kv: kv[0].mnemonic)},
        }


def core_of(a: Architecture, phys: int) -> int:
    if not 0 <= phys < a.num_qubits:
        raise ArchitectureError(f"physical qubit {phys} out of range [0, {a.num_qubits})")
    return phys // a.capacity


def load_architecture(config: Mapping) -> Architecture:
    """Build an Architecture from a key-value document (e.g. parsed JSON).

    Missing durations fall back to the defaults; SWAP has no default and must
    be given explicitly, cycle-aligned, if a circuit uses it.
    """
    for key in ("num_cores", "capacity"):
        if key not in config:
            raise ArchitectureError(f"missing mandatory field {key!r}")
    known = {"num_cores", "capacity", "teleport_ns", "cycle_ns", "durations"}
    unknown = set(config) - known
    if unknown:
        raise ArchitectureError(f"unknown architecture fields: {sorted(unknown)}")
    durations = dict(DEFAULT_DURATIONS)
    for name, ns in (config.get("durations") or {}).items():
        try:
            kind = GateKind.from_mnemonic(name)
        except ValueError:
            raise ArchitectureError(f"unknown gate {name!r} in durations") from None
        durations[kind] = ns
    return Architecture(
        num_cores=int(config["num_cores"]),
        capacity=int(config["capacity"]),
        teleport_ns=int(config.get("teleport_ns", DEFAULT_TELEPORT_NS)),
        cycle_ns=int(config.get("cycle_ns", DEFAULT_CYCLE_NS)),
        durations=durations,
    )


def load_architecture_file(path: str | Path) -> Architecture:
    with open(path) as f:
        return load_architecture(json.load(f))


_SHORTHAND_KEYS = {"cores": "num_cores", "capacity": "capacity", "teleport": "teleport_ns", "cycle": "cycle_ns"}


def parse_arch_shorthand(text: str) -> Architecture:
    """Parse ``cores=8,capacity=16`` (also ``teleport=``/``cycle=``)."""
    config = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in _SHORTHAND_KEYS:
            raise ArchitectureError(f"bad architecture item {part!r}; expected e.g. cores=8,capacity=16")
        try:
            config[_SHORTHAND_KEYS[key.strip()]] = int(value)
        except ValueError:
            raise ArchitectureError(f"non-integer value in {part!r}") from None
    return load_architecture(config)
