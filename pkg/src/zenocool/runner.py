"""Experiment orchestration and persistent CSV/JSON artifacts.

Numbers are written with 17 significant digits so regression tolerances on
the files are meaningful; identical config and seed produce byte-identical
CSV output.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .fock import PopulationDistribution
from .coefficients import CoefficientTable, build_table
from .protocol import (
    ProtocolSchedule,
    RunResult,
    Segment,
    StepRecord,
    initial_state,
    run,
    sweep,
)
from .oracle import compare_random_draws, sample_trajectories
from .config import ConfigError, ExperimentConfig

RUN_COLUMNS = ("N", "n_bar", "F_ground", "P_g", "T_eff_K", "F_th", "segment")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _probe_writable(out_dir: Path):
    """Fail on unwritable output locations before any computation starts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write_probe"
    probe.touch()
    probe.unlink()


def _record_row(rec: StepRecord):
    return (rec.step, rec.n_bar, rec.ground_fidelity, rec.survival_probability,
            rec.t_eff_kelvin, rec.thermal_fidelity, rec.segment)


def write_run_csv(path: Path, result: RunResult):
    _write_csv(path, RUN_COLUMNS, (_record_row(r) for r in result.records))


def write_histogram_csv(path: Path, d: PopulationDistribution):
    p = d.probabilities()
    _write_csv(path, ("n", "p_n"), ((n, p[n]) for n in range(p.size)))


def write_coefficients_csv(path: Path, table: CoefficientTable, powers):
    header = ["n", "re", "im", "abs2"] + [f"abs2_pow_{2 * N}" for N in powers]
    abs2 = np.abs(table.values) ** 2
    rows = (
        [n, table.values[n].real, table.values[n].imag, abs2[n]]
        + [abs2[n] ** N for N in powers]
        for n in range(table.values.size)
    )
    _write_csv(path, header, rows)


def _manifest(config: ExperimentConfig, command: str, resolved: dict,
              outputs: dict[str, str], elapsed: float) -> dict:
    return {
        "package": "zenocool",
        "version": __version__,
        "command": command,
        "config": config.to_dict(),
        "resolved": resolved,
        "outputs": outputs,
        "wall_time_s": elapsed,
    }


def _write_manifest(out_dir: Path, manifest: dict):
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _dimensionless_params(params) -> dict:
    return {"g_m": params.g_m, "g_f": params.g_f, "delta_e": params.delta_e,
            "tau": params.tau, "omega_m_rad_s": params.omega_m}


def _base_variant(config: ExperimentConfig) -> str:
    variant = "driven" if config.params.g_f > 0 else "conventional"
    if config.params.delta_e != 0.0:
        variant += "-detuned"
    return variant


def _write_tables(config: ExperimentConfig, out_dir: Path, default_n_max: int | None,
                  outputs: dict[str, str]):
    variants = config.outputs.variants
    if variants is None:
        variants = (tuple(dict.fromkeys(s.variant for s in config.segments))
                    or (_base_variant(config),))
    n_max = config.outputs.n_max if config.outputs.n_max is not None else default_n_max
    if n_max is None:
        raise ConfigError("coefficient export needs outputs.n_max when there "
                          "is no thermal state to size the truncation")
    for variant in variants:
        seg_params = config.params
        for spec in config.segments:
            if spec.variant == variant:
                seg_params = config.segment_params(spec)
                break
        table = build_table(variant, seg_params, n_max)
        name = f"coefficients_{variant}.csv"
        write_coefficients_csv(out_dir / name, table, config.outputs.powers)
        outputs[name] = str(out_dir / name)


def run_experiment(config: ExperimentConfig, out_dir) -> dict[str, str]:
    """Run the configured schedule and write every requested artifact.

    Returns a name -> path mapping of the files written. A zero-segment
    config still produces the single initial-state record (and histogram,
    if requested); a config with no thermal state at all can only export
    coefficient tables.
    """
    out_dir = Path(out_dir)
    _probe_writable(out_dir)
    start = time.perf_counter()
    outputs: dict[str, str] = {}

    has_thermal = config.temperature is not None or config.n_bar_th is not None
    result = None
    initial = None
    schedule = None
    if has_thermal:
        thermal = config.thermal_spec()
        if config.segments:
            schedule = config.schedule()
        else:
            # Observation-only: one zero-step segment of the base model.
            schedule = ProtocolSchedule((Segment(_base_variant(config),
                                                 config.params, 0),))
        initial = initial_state(thermal, schedule, hard_cap=config.hard_cap)
        result = run(initial, schedule)
        if config.outputs.run_csv:
            path = out_dir / "run.csv"
            write_run_csv(path, result)
            outputs["run_csv"] = str(path)
        if config.outputs.histogram_csv:
            path = out_dir / "histogram.csv"
            write_histogram_csv(path, result.final)
            outputs["histogram_csv"] = str(path)
    elif config.segments or config.outputs.run_csv and not config.outputs.coefficients_csv:
        raise ConfigError("running a schedule needs a thermal state: "
                          "set T_kelvin or n_bar_th")

    if config.outputs.coefficients_csv:
        _write_tables(config, out_dir,
                      initial.n_max if initial is not None else None, outputs)

    resolved: dict = {
        "params": _dimensionless_params(config.params),
        "seed": config.seed,
    }
    if has_thermal:
        resolved.update({
            "n_bar_th": config.thermal_spec().n_bar,
            "epsilon_tail": config.epsilon_tail,
            "n_max": initial.n_max,
            "segments": [
                {"variant": s.variant, "steps": s.steps,
                 "until_n_bar": s.until_n_bar,
                 "params": _dimensionless_params(s.params)}
                for s in schedule.segments
            ],
            "measurements_recorded": len(result.records) - 1,
            "terminated_early": result.terminated_early,
        })
    if config.outputs.coefficients_csv and config.outputs.n_max is not None:
        resolved["table_n_max"] = config.outputs.n_max
    _write_manifest(out_dir, _manifest(config, "run", resolved, outputs,
                                       time.perf_counter() - start))
    outputs["manifest"] = str(out_dir / "manifest.json")
    return outputs


def run_sweep(config: ExperimentConfig, out_dir) -> dict[str, str]:
    """Independent runs over the configured grid, one terminal row each."""
    if config.sweep is None:
        raise ConfigError("config has no 'sweep' block")
    out_dir = Path(out_dir)
    _probe_writable(out_dir)
    start = time.perf_counter()

    points = sweep(config.sweep.axis, config.sweep.values, config.thermal_spec(),
                   config.schedule(), hard_cap=config.hard_cap)
    path = out_dir / "sweep.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("axis", "value") + RUN_COLUMNS + ("error",))
        for pt in points:
            if pt.record is None:
                writer.writerow([pt.axis, _fmt(pt.value)] + [""] * len(RUN_COLUMNS)
                                + [pt.error])
            else:
                writer.writerow([pt.axis, _fmt(pt.value)]
                                + [_fmt(v) for v in _record_row(pt.record)] + [""])
    outputs = {"sweep_csv": str(path)}
    resolved = {
        "params": _dimensionless_params(config.params),
        "axis": config.sweep.axis,
        "values": list(config.sweep.values),
        "failures": sum(1 for p in points if p.error is not None),
        "seed": config.seed,
    }
    _write_manifest(out_dir, _manifest(config, "sweep", resolved, outputs,
                                       time.perf_counter() - start))
    outputs["manifest"] = str(out_dir / "manifest.json")
    return outputs


def run_oracle_check(out_dir, *, draws: int = 200, seed: int = 7,
                     tolerance: float = 1e-10,
                     unitarity_tolerance: float = 1e-12) -> dict:
    """Closed form versus eigen-exponential report; raises if out of tolerance."""
    out_dir = Path(out_dir)
    _probe_writable(out_dir)
    start = time.perf_counter()
    rows = compare_random_draws(draws, seed)
    report = {
        "seed": seed,
        "draws": draws,
        "max_abs_error": max(r["abs_error"] for r in rows),
        "max_phase_aligned_error": max(r["phase_aligned_error"] for r in rows),
        "max_unitarity_defect": max(r["unitarity_defect"] for r in rows),
        "tolerance": tolerance,
        "unitarity_tolerance": unitarity_tolerance,
        "rows": rows,
        "wall_time_s": time.perf_counter() - start,
        "package": "zenocool",
        "version": __version__,
    }
    with open(out_dir / "oracle_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if report["max_abs_error"] > tolerance:
        raise FloatingPointError(
            f"oracle disagreement {report['max_abs_error']:g} exceeds {tolerance:g}"
        )
    if report["max_unitarity_defect"] > unitarity_tolerance:
        raise FloatingPointError(
            f"unitarity defect {report['max_unitarity_defect']:g} exceeds "
            f"{unitarity_tolerance:g}"
        )
    return report


def run_trajectories(config: ExperimentConfig, out_dir, *,
                     n_trajectories: int, seed: int | None = None) -> dict[str, str]:
    """Monte Carlo survival estimates next to the deterministic curve."""
    out_dir = Path(out_dir)
    _probe_writable(out_dir)
    start = time.perf_counter()
    seed = config.seed if seed is None else seed

    thermal = config.thermal_spec()
    schedule = config.schedule()
    initial = initial_state(thermal, schedule, hard_cap=config.hard_cap)
    exact = run(initial, schedule)
    batch = sample_trajectories(initial, schedule,
                                n_trajectories=n_trajectories, seed=seed)
    estimates = batch.estimates()
    errors = batch.standard_errors()
    path = out_dir / "trajectories.csv"
    rows = (
        (rec.step, estimates[rec.step], errors[rec.step], rec.survival_probability)
        for rec in exact.records
    )
    _write_csv(path, ("N", "p_hat", "stderr", "p_exact"), rows)
    outputs = {"trajectories_csv": str(path)}
    resolved = {
        "params": _dimensionless_params(config.params),
        "n_bar_th": thermal.n_bar,
        "n_max": initial.n_max,
        "n_trajectories": batch.n_trajectories,
        "n_steps": batch.n_steps,
        "seed": seed,
        "stream_ids": list(batch.stream_ids),
    }
    _write_manifest(out_dir, _manifest(config, "trajectories", resolved, outputs,
                                       time.perf_counter() - start))
    outputs["manifest"] = str(out_dir / "manifest.json")
    return outputs
