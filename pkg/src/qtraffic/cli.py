"""Command-line front end: ``qtraffic generate|compile|analyze|pipeline|sweep``.

Every invocation takes one ``--seed`` (falling back to ``$QTRAFFIC_SEED``,
then 0).  The benchmark generator and the mapper draw from separate child
streams of that seed.  Failures exit with status 1 and print one line of
the form ``error: <Kind>: <message>`` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import report as rep
from .arch import Architecture, ArchitectureError, load_architecture_file, parse_arch_shorthand
from .benchgen import BenchSpec, Family, generate
from .circuit import CircuitError, parse_circuit, serialize_circuit
from .mapper import MapperOptions, MappingError, compile_circuit, parse_compiled, serialize_compiled
from .pipeline import analyze_program, bundle_files

SUMMARY_COLUMNS = ["bench", "cores", "capacity", "burstiness_cov", "hotspotness_cov", "mean_teleports", "makespan_ns", "error"]


class UsageError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QTRAFFIC_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"QTRAFFIC_SEED={env!r} is not an integer") from None
    return 0


def _bench_spec(args, family: str | None = None, width: int | None = None) -> BenchSpec:
    params = {}
    for key in ("gates", "twoq", "depth", "iterations", "marked"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if args.twoq is not None and not 0.0 <= args.twoq <= 1.0:
        raise UsageError("--twoq must lie in [0, 1]")
    fam = family or args.bench
    qubits = width or args.qubits
    if fam is None or qubits is None:
        raise UsageError("--bench and --qubits are required")
    return BenchSpec(Family(fam), qubits, _seed(args), params)


def _arch(args, required: bool = True) -> Architecture | None:
    if getattr(args, "arch_file", None):
        return load_architecture_file(args.arch_file)
    if getattr(args, "arch", None):
        return parse_arch_shorthand(args.arch)
    if required:
        raise UsageError("an architecture is required (--arch cores=N,capacity=M or --arch-file)")
    return None


def _mapper_opts(args) -> MapperOptions:
    kw = {"seed": _seed(args), "pad": bool(getattr(args, "pad", False))}
    if args.lookahead is not None:
        if args.lookahead < 0:
            raise UsageError("--lookahead must be >= 0")
        kw["lookahead"] = args.lookahead
    if args.migration_penalty is not None:
        kw["migration_penalty"] = args.migration_penalty
    return MapperOptions(**kw)


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    spec = _bench_spec(args)
    _emit(serialize_circuit(generate(spec)), args.out)
    return 0


def cmd_compile(args) -> int:
    arch = _arch(args)
    circuit = parse_circuit(Path(args.circuit).read_text(), name=Path(args.circuit).stem)
    program = compile_circuit(circuit, arch, _mapper_opts(args))
    _emit(serialize_compiled(program), args.out)
    return 0


def _analyze_text(text: str, arch: Architecture | None, args, bench: dict, seed: int, out_dir, circuit=None, extra=None):
    program = parse_compiled(text)
    if arch is None:
        arch = Architecture(program.num_cores, program.capacity)
    elif (arch.num_cores, arch.capacity) != (program.num_cores, program.capacity):
        raise UsageError(
            f"compiled file targets {program.num_cores}x{program.capacity}, --arch gives {arch.num_cores}x{arch.capacity}"
        )
    if args.window is not None and args.window < 1:
        raise UsageError("--window must be >= 1")
    sched, report = analyze_program(program, arch, args.window)
    files = bundle_files(
        program, sched, report, compiled_text=text, circuit=circuit, raster=not args.no_raster, virtual=args.virtual
    )
    rep.write_bundle(out_dir, files, report, bench=bench, arch=arch.to_dict(), seed=seed, extra=extra)
    return report


def cmd_analyze(args) -> int:
    text = Path(args.compiled).read_text()
    _analyze_text(text, _arch(args, required=False), args, {"source": Path(args.compiled).name}, _seed(args), args.out_dir)
    return 0


def _run_cell(spec: BenchSpec, arch: Architecture, opts: MapperOptions, args, out_dir):
    circuit = generate(spec)
    program = compile_circuit(circuit, arch, opts)
    text = serialize_compiled(program)
    config = {"mapper": {k: v for k, v in vars(opts).items()}, "window": args.window}
    return _analyze_text(text, arch, args, spec.to_dict(), spec.seed, out_dir, circuit=circuit, extra=config)


def cmd_pipeline(args) -> int:
    arch = _arch(args)
    spec = _bench_spec(args, width=args.qubits or arch.num_qubits)
    _run_cell(spec, arch, _mapper_opts(args), args, args.out_dir)
    return 0


def _sweep_cell(job):
    family, cores, args = job
    try:
        base = _arch(args, required=False)
        arch = Architecture(
            cores,
            args.capacity,
            base.teleport_ns if base else Architecture(1, 2).teleport_ns,
            base.cycle_ns if base else Architecture(1, 2).cycle_ns,
            dict(base.durations) if base else Architecture(1, 2).durations,
        )
        spec = _bench_spec(args, family=family, width=cores * args.capacity)
        r = _run_cell(spec, arch, _mapper_opts(args), args, Path(args.out_dir) / f"{family}_c{cores}")
        return [family, cores, args.capacity, format(r.burstiness_cov, ".12g"), format(r.hotspotness_cov, ".12g"),
                format(r.mean_teleports_per_slice, ".12g"), r.makespan_ns, ""]
    except Exception as e:  # a failed cell is reported, the sweep goes on
        msg = f"{type(e).__name__}: {e}".replace("\n", " ")
        return [family, cores, args.capacity, "", "", "", "", msg]


def cmd_sweep(args) -> int:
    families = [Family(b).value for b in args.benches.split(",") if b]
    cores = [int(c) for c in args.cores.split(",") if c]
    if any(c < 1 for c in cores):
        raise UsageError("core counts must be positive")
    jobs = [(f, c, args) for f in families for c in cores]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    w.writerows(rows)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text(buf.getvalue())
    failed = [r for r in rows if r[-1]]
    for r in failed:
        print(f"error: cell {r[0]}/c{r[1]}: {r[-1]}", file=sys.stderr)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser


def _add_bench(p, required: bool):
    p.add_argument("--bench", choices=[f.value for f in Family], required=required)
    p.add_argument("--qubits", type=int, required=required and True, help="circuit width")
    _add_bench_params(p)


def _add_bench_params(p):
    p.add_argument("--gates", type=int, help="random: gate count (default 20 x qubits)")
    p.add_argument("--twoq", type=float, help="random: probability of a two-qubit gate (default 0.5)")
    p.add_argument("--depth", type=int, help="qv: number of layers (default: qubits)")
    p.add_argument("--iterations", type=int, help="grover: iterations (default 1)")
    p.add_argument("--marked", help="grover: marked bitstring, bit i = qubit i (default all ones)")


def _add_seed(p):
    p.add_argument("--seed", type=int, help="master seed (default $QTRAFFIC_SEED or 0)")


def _add_arch(p):
    p.add_argument("--arch", help="cores=<n>,capacity=<m>[,teleport=<ns>,cycle=<ns>]")
    p.add_argument("--arch-file", help="JSON architecture description")


def _add_mapper(p):
    p.add_argument("--lookahead", type=int, help="lookahead window in slices (default 16)")
    p.add_argument("--migration-penalty", type=float, help="exchange penalty per migrated qubit (default 0.5)")
    p.add_argument("--pad", action="store_true", help="append idle qubits up to cores x capacity")


def _add_analysis(p):
    p.add_argument("--window", type=int, help="moving-average window (default 5%% of slices, min 1)")
    p.add_argument("--virtual", action="store_true", help="also emit the virtual-qubit trace raster")
    p.add_argument("--no-raster", action="store_true", help="skip the physical trace raster")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtraffic", description="Inter-core qubit traffic analysis for multi-core quantum architectures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a benchmark circuit")
    _add_bench(p, required=True)
    _add_seed(p)
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compile", help="map a circuit onto a multi-core architecture")
    p.add_argument("circuit")
    _add_arch(p)
    _add_mapper(p)
    _add_seed(p)
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("analyze", help="schedule a compiled file and write the metrics bundle")
    p.add_argument("compiled")
    _add_arch(p)
    _add_analysis(p)
    _add_seed(p)
    p.add_argument("-o", "--out-dir", default="qtraffic-out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pipeline", help="generate, compile and analyze one configuration")
    p.add_argument("--bench", choices=[f.value for f in Family], required=True)
    p.add_argument("--qubits", type=int, help="circuit width (default cores x capacity)")
    _add_bench_params(p)
    _add_arch(p)
    _add_mapper(p)
    _add_analysis(p)
    _add_seed(p)
    p.add_argument("-o", "--out-dir", default="qtraffic-out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep", help="run the pipeline over benchmarks x core counts")
    p.add_argument("--bench", dest="benches", default=",".join(f.value for f in Family),
                   help="comma-separated benchmark list")
    p.add_argument("--cores", default="2,4,8,16", help="comma-separated core counts")
    p.add_argument("--capacity", type=int, default=8)
    _add_bench_params(p)
    _add_arch(p)
    _add_mapper(p)
    _add_analysis(p)
    _add_seed(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel cells")
    p.add_argument("-o", "--out-dir", default="qtraffic-sweep")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CircuitError, ArchitectureError, MappingError, ValueError, OSError) as e:
        msg = str(e).replace("\n", " ")
        print(f"error: {type(e).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
