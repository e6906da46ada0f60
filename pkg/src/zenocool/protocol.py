"""Repeated-measurement protocol engine.

The post-measurement operator is diagonal in the Fock basis and the
initial state is diagonal, so a run never materializes a density matrix:
each measurement multiplies the population weights elementwise by the
squared coefficient magnitudes, exactly and in O(n_max) per step. All
observables (mean occupancy, ground fidelity, cumulative survival
probability, effective temperature, thermality) are evaluated after every
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .params import HBAR, KB, PhysicalParams
from .fock import (
    DEFAULT_HARD_CAP,
    PopulationDistribution,
    ThermalSpec,
    thermal_distribution,
    thermal_occupation,
)
from .coefficients import (
    CoefficientTable,
    build_table,
    cooling_free_report,
    first_protected_index,
)

DEFAULT_NORM_LOG_FLOOR = -700.0

SWEEP_AXES = ("g_f", "T", "tau", "N")


@dataclass(frozen=True)
class Segment:
    """One schedule leg: a variant applied for at most ``steps`` measurements.

    If ``until_n_bar`` is set, the segment also ends as soon as the
    conditional mean occupancy drops to that threshold.
    """

    variant: str
    params: PhysicalParams
    steps: int
    until_n_bar: float | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be nonnegative, got {self.steps}")
        if self.until_n_bar is not None and not self.until_n_bar > 0.0:
            raise ValueError(f"until_n_bar must be positive, got {self.until_n_bar}")


@dataclass(frozen=True)
class ProtocolSchedule:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @property
    def total_steps(self) -> int:
        return sum(s.steps for s in self.segments)


@dataclass(frozen=True)
class StepRecord:
    """Observables after measurement number ``step`` (0 = initial state)."""

    step: int
    n_bar: float
    ground_fidelity: float
    survival_probability: float
    t_eff_kelvin: float
    thermal_fidelity: float
    segment: int


@dataclass(frozen=True)
class RunResult:
    records: tuple[StepRecord, ...]
    final: PopulationDistribution
    terminated_early: bool


@dataclass(frozen=True)
class AsymptoticReport:
    """Infinite-measurement limit of a variant on an initial distribution.

    The protected indices are generically non-integer, so two readings are
    reported: ``survival_ideal``/``n_bar_ideal`` evaluate the limit formula
    at the real indices with log-linearly interpolated populations, while
    ``survival_strict``/``n_bar_strict`` count only integer levels whose
    coefficient magnitude is 1 within 1e-12.
    """

    survival_ideal: float
    n_bar_ideal: float
    survival_strict: float
    n_bar_strict: float
    contributions: tuple[tuple[float, float], ...]  # (real index, weight)


def step(d: PopulationDistribution, table: CoefficientTable) -> PopulationDistribution:
    """Apply one successful ground-state measurement.

    Each log-weight grows by 2 log|coef_n|; a zero coefficient kills the
    level outright (log-zero weight). The new total mass is the updated
    cumulative survival probability.
    """
    if table.n_max < d.n_max:
        raise ValueError(
            f"table covers n <= {table.n_max} but distribution needs {d.n_max}"
        )
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(table.values[: d.n_max + 1]))
    lw = d.log_weights + 2.0 * log_mag
    return PopulationDistribution(lw, norm_log=float(logsumexp(lw)))


def effective_temperature(n_bar: float, omega_m: float) -> float:
    """Temperature of the thermal state with the given mean occupancy.

    ``hbar omega_m / (kB ln(1 + 1/n_bar))`` in kelvin; occupancies below
    1e-15 map to 0 K.
    """
    if n_bar < 0.0:
        raise ValueError(f"n_bar must be nonnegative, got {n_bar}")
    if not omega_m > 0.0:
        raise ValueError(f"omega_m must be positive, got {omega_m}")
    if n_bar < 1e-15:
        return 0.0
    return HBAR * omega_m / (KB * math.log1p(1.0 / n_bar))


def _geometric_fidelity(p: np.ndarray, n_bar_q: float) -> float:
    """Uhlmann fidelity of diagonal p against a geometric state, truncated alike."""
    if n_bar_q <= 0.0:
        return float(p[0])
    n = np.arange(p.size, dtype=float)
    lq = n * math.log(n_bar_q / (1.0 + n_bar_q)) - math.log1p(n_bar_q)
    lq -= logsumexp(lq)
    q = np.exp(lq)
    return float(np.sum(np.sqrt(p * q)) ** 2)


def thermal_fidelity(d: PopulationDistribution, t_eff_kelvin: float,
                     omega_m: float) -> float:
    """Overlap of ``d`` with the thermal state at ``t_eff_kelvin``.

    For two diagonal states the Uhlmann fidelity reduces to
    ``(sum_n sqrt(p_n q_n))^2``; the comparison state is truncated to the
    same n_max and renormalized.
    """
    p = d.probabilities()
    if t_eff_kelvin <= 0.0:
        return float(p[0])
    return _geometric_fidelity(p, thermal_occupation(omega_m, t_eff_kelvin))


def _observables(idx: int, d: PopulationDistribution, segment_id: int,
                 omega_m: float | None) -> StepRecord:
    p = d.probabilities()
    n_bar = float(np.dot(np.arange(p.size, dtype=float), p))
    if omega_m is not None:
        t_eff = effective_temperature(n_bar, omega_m)
    else:
        t_eff = math.nan
    return StepRecord(
        step=idx,
        n_bar=n_bar,
        ground_fidelity=float(p[0]),
        survival_probability=d.survival_probability,
        t_eff_kelvin=t_eff,
        thermal_fidelity=_geometric_fidelity(p, n_bar),
        segment=segment_id,
    )


def run(initial: PopulationDistribution, schedule: ProtocolSchedule, *,
        norm_log_floor: float = DEFAULT_NORM_LOG_FLOOR) -> RunResult:
    """Evolve ``initial`` through the schedule, one record per measurement.

    The first record is the untouched initial state. A segment ends when
    its step budget is exhausted or its ``until_n_bar`` threshold is
    reached on the conditional state, whichever comes first. If the
    cumulative survival probability underflows ``exp(norm_log_floor)``
    the run stops early with ``terminated_early`` set.
    """
    omega_m = schedule.segments[0].params.omega_m
    d = initial
    records = [_observables(0, d, 0, omega_m)]
    idx = 0
    terminated = False
    for seg_id, seg in enumerate(schedule.segments):
        if terminated:
            break
        if seg.steps == 0:
            continue
        table = build_table(seg.variant, seg.params, d.n_max)
        for _ in range(seg.steps):
            d = step(d, table)
            idx += 1
            rec = _observables(idx, d, seg_id, seg.params.omega_m)
            records.append(rec)
            if d.norm_log < norm_log_floor:
                terminated = True
                break
            if seg.until_n_bar is not None and rec.n_bar <= seg.until_n_bar:
                break
    return RunResult(tuple(records), d, terminated)


def _interpolate_log_weight(log_p: np.ndarray, index: float) -> float:
    """Log-linear interpolation of a log-probability array at a real index."""
    lo = int(math.floor(index))
    hi = min(lo + 1, log_p.size - 1)
    frac = index - lo
    a, b = log_p[lo], log_p[hi]
    if frac == 0.0 or lo == hi:
        return float(a)
    if not (np.isfinite(a) and np.isfinite(b)):
        return -math.inf
    return float((1.0 - frac) * a + frac * b)


def asymptotic_limit(initial: PopulationDistribution, variant: str,
                     params: PhysicalParams) -> AsymptoticReport:
    """Large-measurement-number limit of survival probability and occupancy.

    Only the ground state and the cooling-free indices survive infinitely
    many measurements; the limiting survival probability is the initial
    weight they carry and the limiting occupancy is their weighted mean.
    """
    log_p = initial.log_weights - initial.norm_log
    p0 = float(np.exp(log_p[0]))
    report = cooling_free_report(variant, params, initial.n_max)

    contributions = []
    ideal_mass, ideal_moment = p0, 0.0
    strict_mass, strict_moment = p0, 0.0
    for entry in report.entries:
        if entry.index <= 0.0:
            continue
        w = math.exp(_interpolate_log_weight(log_p, entry.index))
        contributions.append((entry.index, w))
        ideal_mass += w
        ideal_moment += entry.index * w
        if entry.coef_magnitude >= 1.0 - 1e-12:
            w_int = float(np.exp(log_p[entry.nearest]))
            strict_mass += w_int
            strict_moment += entry.nearest * w_int
    return AsymptoticReport(
        survival_ideal=ideal_mass,
        n_bar_ideal=ideal_moment / ideal_mass,
        survival_strict=strict_mass,
        n_bar_strict=strict_moment / strict_mass,
        contributions=tuple(contributions),
    )


def truncation_floor(schedule: ProtocolSchedule) -> int:
    """Smallest n_max that keeps population near protected indices unclipped.

    1.5 times the first positive cooling-free index, maximized over the
    schedule's segments.
    """
    floor = 0
    for seg in schedule.segments:
        idx = first_protected_index(seg.variant, seg.params)
        if idx is not None:
            floor = max(floor, math.ceil(1.5 * idx))
    return floor


def initial_state(thermal: ThermalSpec, schedule: ProtocolSchedule, *,
                  hard_cap: int = DEFAULT_HARD_CAP) -> PopulationDistribution:
    """Thermal start truncated generously enough for the whole schedule."""
    return thermal_distribution(thermal, n_max_floor=truncation_floor(schedule),
                                hard_cap=hard_cap)


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: float
    record: StepRecord | None
    error: str | None = None


def _apply_axis(axis: str, value: float, thermal: ThermalSpec,
                schedule: ProtocolSchedule) -> tuple[ThermalSpec, ProtocolSchedule]:
    if axis == "g_f":
        # Grid values are driving strengths in units of g_m.
        segs = tuple(
            replace(s, params=replace(s.params, g_f=value * s.params.g_m))
            if s.variant in ("driven", "driven-detuned") else s
            for s in schedule.segments
        )
        return thermal, ProtocolSchedule(segs)
    if axis == "T":
        if thermal.omega_m is None:
            raise ValueError("temperature sweep needs a thermal spec with omega_m")
        return replace(thermal, temperature=value, n_bar_th=None), schedule
    if axis == "tau":
        segs = tuple(replace(s, params=replace(s.params, tau=value))
                     for s in schedule.segments)
        return thermal, ProtocolSchedule(segs)
    if axis == "N":
        segs = schedule.segments[:-1] + (replace(schedule.segments[-1],
                                                 steps=int(value)),)
        return thermal, ProtocolSchedule(segs)
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def sweep(axis: str, values, thermal: ThermalSpec, schedule: ProtocolSchedule, *,
          hard_cap: int = DEFAULT_HARD_CAP) -> list[SweepPoint]:
    """Independent runs over a parameter grid, keeping terminal observables.

    A failing grid point is recorded with its error message and the sweep
    moves on.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ValueError("sweep grid must be nonempty")
    points = []
    for value in values:
        try:
            th, sched = _apply_axis(axis, float(value), thermal, schedule)
            init = initial_state(th, sched, hard_cap=hard_cap)
            result = run(init, sched)
            points.append(SweepPoint(axis, float(value), result.records[-1]))
        except Exception as exc:  # noqa: BLE001 - per-point isolation is the contract
            points.append(SweepPoint(axis, float(value), None, f"{type(exc).__name__}: {exc}"))
    return points
