"""Traces and traffic metrics of a scheduled program.

Spatial metrics come from the core-pair traffic matrix, temporal ones from
the number of teleports per timeslice.  Burstiness and hotspotness are both
coefficients of variation (population standard deviation over the mean).
Hotspot participation counts every teleport for both endpoint cores, so the
per-core totals add up to twice the number of teleports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from . import kernels
from .mapper import CompiledProgram
from .scheduler import Schedule


class Axis(Enum):
    PHYSICAL = "physical"
    VIRTUAL = "virtual"


class CellState(IntEnum):
    IDLE = 0
    COMPUTE = 1
    COMM = 2


@dataclass(frozen=True)
class TraceGrid:
    axis: Axis
    cells: np.ndarray  # int8 (rows, cols)
    cycle_ns: int

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]


@dataclass(frozen=True)
class TrafficMatrix:
    counts: np.ndarray  # int64 symmetric, zero diagonal
    total: int

    @property
    def ratios(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(self.counts.shape)
        return self.counts / self.total

    @property
    def empty(self) -> bool:
        return self.total == 0


@dataclass
class MetricsReport:
    traffic_matrix: TrafficMatrix
    per_core_teleports: list[int]
    per_core_gates: list[int]
    teleports_per_slice: list[int]
    moving_avg: list[float]
    window: int
    mean_teleports_per_slice: float
    burstiness_cov: float
    hotspotness_cov: float
    time_fractions: dict[str, float]
    makespan_ns: int
    totals: dict[str, int]
    zero_traffic: bool
    extra: dict = field(default_factory=dict)


def build_trace(s: Schedule, axis: Axis = Axis.PHYSICAL) -> TraceGrid:
    cyc = s.arch.cycle_ns
    cols = s.makespan_ns // cyc
    grid = np.zeros((s.program.width, cols), dtype=np.int8)
    if axis is Axis.PHYSICAL:
        r0, r1 = s.p0, s.p1
    else:
        r0, r1 = s.q0, s.q1
    state = np.where(s.is_teleport, CellState.COMM, CellState.COMPUTE).astype(np.int8)
    c0 = (s.start // cyc).astype(np.int64)
    c1 = ((s.start + s.dur) // cyc).astype(np.int64)
    kernels.fill_trace(
        grid, np.ascontiguousarray(r0, dtype=np.int32), np.ascontiguousarray(r1, dtype=np.int32), c0, c1, state
    )
    return TraceGrid(axis, grid, cyc)


def traffic_matrix(s: Schedule) -> TrafficMatrix:
    n = s.arch.num_cores
    counts = np.zeros((n, n), dtype=np.int64)
    t = s.is_teleport
    np.add.at(counts, (s.c0[t], s.c1[t]), 1)
    counts = counts + counts.T
    return TrafficMatrix(counts, int(t.sum()))


def temporal_series(p: CompiledProgram) -> tuple[list[int], float]:
    """Teleports per timeslice and their mean.

    Element k counts the teleports executed just before slice k (those
    between slices k-1 and k), so element 0 is always 0.
    """
    S = len(p.slices)
    series = [0] * S
    for op in p.teleports:
        series[op.between_slices[1]] += 1
    mean = sum(series) / S if S else 0.0
    return series, mean


def moving_average(series, window: int) -> list[float]:
    """Trailing moving average: out[k] = mean(series[max(0, k-W+1) .. k])."""
    if window < 1:
        raise ValueError("moving-average window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        return []
    csum = np.concatenate(([0.0], np.cumsum(x)))
    k = np.arange(x.size)
    lo = np.maximum(0, k - window + 1)
    return ((csum[k + 1] - csum[lo]) / (k + 1 - lo)).tolist()


def coefficient_of_variation(series) -> float:
    """Population standard deviation over the mean; 0 when the mean is 0."""
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("coefficient of variation of an empty series")
    mean = x.mean()
    if mean <= 0:
        return 0.0
    return float(np.sqrt(np.mean((x - mean) ** 2)) / mean)


def hotspot_series(m: TrafficMatrix) -> list[int]:
    return m.counts.sum(axis=1).tolist()


def time_distribution(s: Schedule) -> dict[str, float]:
    """Fraction of cycles with only gates, only teleports, both, or nothing active."""
    if s.makespan_ns == 0:
        raise ValueError("empty schedule has no time distribution")
    cyc = s.arch.cycle_ns
    cols = s.makespan_ns // cyc
    c0 = s.start // cyc
    c1 = (s.start + s.dur) // cyc
    active = {}
    for name, mask in (("gate", ~s.is_teleport), ("tele", s.is_teleport)):
        diff = np.zeros(cols + 1, dtype=np.int64)
        np.add.at(diff, c0[mask], 1)
        np.add.at(diff, c1[mask], -1)
        active[name] = np.cumsum(diff[:-1]) > 0
    g, t = active["gate"], active["tele"]
    both = int(np.count_nonzero(g & t))
    compute = int(np.count_nonzero(g)) - both
    comm = int(np.count_nonzero(t)) - both
    idle = cols - both - compute - comm
    return {
        "compute_only": compute / cols,
        "comm_only": comm / cols,
        "both": both / cols,
        "idle": idle / cols,
    }


def per_core_gates(s: Schedule) -> list[int]:
    gates = ~s.is_teleport
    return np.bincount(s.c0[gates], minlength=s.arch.num_cores).tolist()


def wallclock_series(s: Schedule, bin_ns: int) -> list[int]:
    """Teleport start counts per wall-clock bin (cross-check for the per-slice series)."""
    if bin_ns < 1:
        raise ValueError("bin width must be positive")
    nbins = max(1, math.ceil(s.makespan_ns / bin_ns))
    starts = s.start[s.is_teleport] // bin_ns
    return np.bincount(starts, minlength=nbins).tolist()


def default_window(num_slices: int) -> int:
    return max(1, math.ceil(0.05 * num_slices))


def build_report(p: CompiledProgram, s: Schedule, window: int | None = None) -> MetricsReport:
    m = traffic_matrix(s)
    series, mean = temporal_series(p)
    w = default_window(len(series)) if window is None else window
    hot = hotspot_series(m)
    fractions = (
        time_distribution(s)
        if s.makespan_ns
        else {"compute_only": 0.0, "comm_only": 0.0, "both": 0.0, "idle": 1.0}
    )
    gates = len(p.source.gates)
    return MetricsReport(
        traffic_matrix=m,
        per_core_teleports=hot,
        per_core_gates=per_core_gates(s),
        teleports_per_slice=series,
        moving_avg=moving_average(series, w),
        window=w,
        mean_teleports_per_slice=mean,
        burstiness_cov=coefficient_of_variation(series) if series else 0.0,
        hotspotness_cov=coefficient_of_variation(hot),
        time_fractions=fractions,
        makespan_ns=s.makespan_ns,
        totals={
            "gates": gates,
            "two_qubit": sum(1 for g in p.source.gates if g.is_two_qubit),
            "teleports": len(p.teleports),
            "slices": len(p.slices),
            "makespan_ns": s.makespan_ns,
        },
        zero_traffic=m.total == 0,
    )
