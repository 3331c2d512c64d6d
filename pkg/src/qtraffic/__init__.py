"""Inter-core qubit traffic analysis for multi-core quantum architectures."""
__version__ = "0.1.0"

from .arch import Architecture, load_architecture, parse_arch_shorthand
from .benchgen import BenchSpec, Family, generate
from .circuit import Circuit, Gate, GateKind, parse_circuit, serialize_circuit
from .mapper import CompiledProgram, MapperOptions, compile_circuit, parse_compiled, serialize_compiled
from .scheduler import Schedule, schedule_asap
from .traffic import MetricsReport, build_report

__all__ = [
    "Architecture", "load_architecture", "parse_arch_shorthand",
    "BenchSpec", "Family", "generate",
    "Circuit", "Gate", "GateKind", "parse_circuit", "serialize_circuit",
    "CompiledProgram", "MapperOptions", "compile_circuit", "parse_compiled", "serialize_compiled",
    "Schedule", "schedule_asap", "MetricsReport", "build_report",
]
