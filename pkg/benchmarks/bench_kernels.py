"""Compare the compiled and pure-Python kernel backends.

Times each hot kernel on inputs captured from a real compile, then runs the
whole pipeline once per backend.  Usage::

    python benchmarks/bench_kernels.py [--qubits 64] [--cores 8] [--bench grover] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from qtraffic import kernels
from qtraffic.arch import Architecture
from qtraffic.benchgen import BenchSpec, Family, generate
from qtraffic.pipeline import run
from qtraffic.traffic import build_trace

KERNELS = ["slice_layers", "refine", "teleport_ops", "asap", "fill_trace"]


def capture(spec: BenchSpec, arch: Architecture, limit: int = 200) -> dict[str, list[tuple]]:
    """Run the pipeline once and record up to ``limit`` argument tuples per kernel."""
    calls: dict[str, list[tuple]] = {k: [] for k in KERNELS}
    originals = {k: getattr(kernels, k) for k in KERNELS}

    def recorder(name):
        fn = originals[name]

        def wrapped(*args):
            if len(calls[name]) < limit:
                calls[name].append(tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args))
            return fn(*args)

        return wrapped

    try:
        for k in KERNELS:
            setattr(kernels, k, recorder(k))
        build_trace(run(generate(spec), arch).schedule)
    finally:
        for k, fn in originals.items():
            setattr(kernels, k, fn)
    return calls


def time_kernel(fn, arg_list, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        # kernels that mutate their inputs get fresh copies outside the timed region
        fresh = [tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args) for args in arg_list]
        t0 = time.perf_counter()
        for args in fresh:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def time_pipeline(impl, spec, arch) -> float:
    originals = {k: getattr(kernels, k) for k in KERNELS}
    try:
        for k in KERNELS:
            setattr(kernels, k, getattr(impl, k))
        t0 = time.perf_counter()
        build_trace(run(generate(spec), arch).schedule)
        return time.perf_counter() - t0
    finally:
        for k, fn in originals.items():
            setattr(kernels, k, fn)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bench", default="grover", choices=[f.value for f in Family])
    ap.add_argument("--qubits", type=int, default=64)
    ap.add_argument("--cores", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    try:
        fast = kernels.backend("cython")
    except ImportError:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` first")
        return 1
    slow = kernels.backend("python")
    arch = Architecture(args.cores, args.qubits // args.cores)
    spec = BenchSpec(Family(args.bench), args.qubits)
    calls = capture(spec, arch)

    print(f"{args.bench}-{args.qubits} on {args.cores} cores x {arch.capacity} qubits")
    print(f"{'kernel':<14}{'calls':>7}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name in KERNELS:
        if not calls[name]:
            continue
        tp = time_kernel(getattr(slow, name), calls[name], args.repeat)
        tc = time_kernel(getattr(fast, name), calls[name], args.repeat)
        print(f"{name:<14}{len(calls[name]):>7}{tp:>12.4f}{tc:>12.4f}{tp / max(tc, 1e-9):>9.1f}x")
    tp = time_pipeline(slow, spec, arch)
    tc = time_pipeline(fast, spec, arch)
    print(f"{'pipeline':<14}{'':>7}{tp:>12.3f}{tc:>12.3f}{tp / max(tc, 1e-9):>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
