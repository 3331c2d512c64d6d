"""generate -> compile -> schedule -> analyze, in memory or through files."""
from __future__ import annotations

from dataclasses import dataclass

from . import report as rep
from .arch import Architecture
from .benchgen import BenchSpec, generate
from .circuit import Circuit, serialize_circuit
from .mapper import CompiledProgram, MapperOptions, compile_circuit, serialize_compiled
from .scheduler import Schedule, schedule_asap
from .traffic import Axis, MetricsReport, build_report, build_trace


@dataclass
class PipelineResult:
    circuit: Circuit
    program: CompiledProgram
    schedule: Schedule
    report: MetricsReport


def analyze_program(program: CompiledProgram, arch: Architecture, window: int | None = None) -> tuple[Schedule, MetricsReport]:
    sched = schedule_asap(program, arch)
    return sched, build_report(program, sched, window)


def run(circuit: Circuit, arch: Architecture, opts: MapperOptions | None = None, window: int | None = None) -> PipelineResult:
    program = compile_circuit(circuit, arch, opts)
    sched, report = analyze_program(program, arch, window)
    return PipelineResult(circuit, program, sched, report)


def run_bench(spec: BenchSpec, arch: Architecture, opts: MapperOptions | None = None,
              window: int | None = None) -> PipelineResult:
    return run(generate(spec), arch, opts, window)


def bundle_files(program: CompiledProgram, sched: Schedule, report: MetricsReport, *, compiled_text: str | None = None,
                 circuit: Circuit | None = None, raster: bool = True, virtual: bool = False) -> dict[str, bytes | str]:
    files: dict[str, bytes | str] = {
        "series.csv": rep.series_csv(report.teleports_per_slice, report.moving_avg),
        "schedule.csv": sched.to_csv(),
        "compiled.cq": compiled_text if compiled_text is not None else serialize_compiled(program),
    }
    if circuit is not None:
        files["circuit.cq"] = serialize_circuit(circuit)
    axes = []
    if raster:
        axes.append(Axis.PHYSICAL)
    if virtual:
        axes.append(Axis.VIRTUAL)
    for axis in axes:
        g = build_trace(sched, axis)
        files[f"trace_{axis.value}.csv"] = rep.trace_csv(g)
        files[f"trace_{axis.value}.pgm"] = rep.trace_pgm(g)
    return files
