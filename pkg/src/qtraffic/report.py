"""Stable on-disk formats for metrics, series, schedules and trace rasters.

Everything written here is deterministic: JSON keys are sorted, floats are
rounded to 12 significant digits and all text files use LF line endings, so
identical inputs reproduce identical bytes.

Trace rasters use IDLE=0, COMPUTE=1, COMM=2 both in the CSV grid and in the
PGM image (P2, maxval 2: idle is black, communication is white).
"""
from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .traffic import MetricsReport, TraceGrid

SCHEMA_NAME = "metrics.schema.json"


def _round(x: float) -> float:
    return float(format(float(x), ".12g"))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def metrics_document(r: MetricsReport, bench: dict | None = None, arch: dict | None = None,
                     manifest: dict | None = None) -> dict:
    m = r.traffic_matrix
    return {
        "bench": bench or {},
        "arch": arch or {},
        "totals": r.totals,
        "traffic_matrix": {"counts": m.counts, "ratios": m.ratios},
        "per_core": {"teleports": r.per_core_teleports, "gates": r.per_core_gates},
        "temporal": {
            "series": r.teleports_per_slice,
            "moving_avg": r.moving_avg,
            "window": r.window,
            "mean": r.mean_teleports_per_slice,
        },
        "cov": {"burstiness": r.burstiness_cov, "hotspotness": r.hotspotness_cov},
        "time_fractions": r.time_fractions,
        "flags": {"zero_traffic": r.zero_traffic},
        "manifest": manifest or {"seed": 0, "version": __version__, "hashes": {}},
    }


def load_schema() -> dict:
    return json.loads(resources.files("qtraffic").joinpath(SCHEMA_NAME).read_text())


def _write(path: str | Path, data: str | bytes) -> Path:
    path = Path(path)
    if isinstance(data, str):
        data = data.encode()
    path.write_bytes(data)
    return path


def write_metrics(r: MetricsReport, path, bench=None, arch=None, manifest=None) -> Path:
    return _write(path, dumps(metrics_document(r, bench, arch, manifest)))


def grid_text(cells: np.ndarray, sep: str) -> bytes:
    rows, cols = cells.shape
    if cols == 0:
        return b"\n" * rows
    buf = np.full((rows, 2 * cols), ord(sep), dtype=np.uint8)
    buf[:, 0::2] = cells.astype(np.uint8) + ord("0")
    buf[:, -1] = ord("\n")
    return buf.tobytes()


def trace_csv(g: TraceGrid) -> bytes:
    return grid_text(g.cells, ",")


def trace_pgm(g: TraceGrid) -> bytes:
    return f"P2\n{g.cols} {g.rows}\n2\n".encode() + grid_text(g.cells, " ")


def write_trace_raster(g: TraceGrid, path) -> tuple[Path, Path]:
    """Write ``<path>.csv`` and ``<path>.pgm``; returns both paths."""
    base = Path(path)
    base = base.with_suffix("") if base.suffix in (".csv", ".pgm") else base
    return (
        _write(base.with_name(base.name + ".csv"), trace_csv(g)),
        _write(base.with_name(base.name + ".pgm"), trace_pgm(g)),
    )


def read_trace_csv(text: str) -> np.ndarray:
    rows = [list(map(int, line.split(","))) for line in text.splitlines() if line]
    return np.array(rows, dtype=np.int8)


def read_trace_pgm(text: str) -> np.ndarray:
    tokens = text.split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 2:
        raise ValueError("unexpected maxval")
    return np.array(tokens[4:], dtype=np.int8).reshape(rows, cols)


def series_csv(series, moving_avg) -> str:
    lines = ["slice_index,teleports,moving_avg"]
    for k, (t, m) in enumerate(zip(series, moving_avg)):
        lines.append(f"{k},{t},{format(float(m), '.12g')}")
    return "\n".join(lines) + "\n"


def write_series_csv(series, moving_avg, path) -> Path:
    return _write(path, series_csv(series, moving_avg))


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_bundle(out_dir, files: dict[str, bytes | str], r: MetricsReport, *, bench: dict, arch: dict,
                 seed: int, extra: dict | None = None) -> dict[str, Path]:
    """Write ``files`` plus metrics.json and manifest.json into ``out_dir``.

    The metrics manifest hashes every other emitted file; manifest.json
    additionally hashes metrics.json itself.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    hashes = {}
    for name in sorted(files):
        data = files[name].encode() if isinstance(files[name], str) else files[name]
        written[name] = _write(out / name, data)
        hashes[name] = sha256(data)
    manifest = {"seed": seed, "version": __version__, "hashes": hashes}
    metrics = dumps(metrics_document(r, bench, arch, manifest)).encode()
    written["metrics.json"] = _write(out / "metrics.json", metrics)
    full = dict(hashes, **{"metrics.json": sha256(metrics)})
    top = {"seed": seed, "version": __version__, "bench": bench, "arch": arch, "hashes": full}
    if extra:
        top["config"] = extra
    written["manifest.json"] = _write(out / "manifest.json", dumps(top))
    return written
