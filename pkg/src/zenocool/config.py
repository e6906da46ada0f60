"""Experiment configuration: parsing, validation, presets.

Configs are flat JSON. Exactly one unit convention per file: either
``omega_m_rad_s`` is present and every rate is in rad/s with ``tau`` in
seconds and temperatures in kelvin, or ``"dimensionless": true`` and rates
are ratios to omega_m, ``tau`` is the product omega_m*tau, and the thermal
state must be given as ``n_bar_th``. Unknown keys are rejected by name.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace

from .params import PhysicalParams
from .fock import DEFAULT_EPSILON_TAIL, DEFAULT_HARD_CAP, ThermalSpec
from .coefficients import VARIANTS
from .protocol import SWEEP_AXES, ProtocolSchedule, Segment

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_TOP_KEYS = {
    "preset", "dimensionless", "omega_m_rad_s", "g_m", "g_f", "delta_e", "tau",
    "T_kelvin", "n_bar_th", "epsilon_tail", "segments", "seed", "hard_cap",
    "outputs", "sweep",
}
_SEGMENT_KEYS = {"variant", "steps", "until_n_bar", "g_f", "delta_e"}
_OUTPUT_KEYS = {"run_csv", "histogram_csv", "coefficients_csv", "powers",
                "variants", "n_max"}
_SWEEP_KEYS = {"axis", "values"}


@dataclass(frozen=True)
class SegmentSpec:
    variant: str
    steps: int
    until_n_bar: float | None = None
    g_f: float | None = None      # override, in the file's unit convention
    delta_e: float | None = None


@dataclass(frozen=True)
class OutputOptions:
    run_csv: bool = True
    histogram_csv: bool = False
    coefficients_csv: bool = False
    powers: tuple[int, ...] = (1,)
    variants: tuple[str, ...] | None = None
    n_max: int | None = None


@dataclass(frozen=True)
class SweepOptions:
    axis: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (dimensionless internally)."""

    params: PhysicalParams
    segments: tuple[SegmentSpec, ...] = ()
    temperature: float | None = None
    n_bar_th: float | None = None
    epsilon_tail: float = DEFAULT_EPSILON_TAIL
    seed: int = 0
    hard_cap: int = DEFAULT_HARD_CAP
    outputs: OutputOptions = field(default_factory=OutputOptions)
    sweep: SweepOptions | None = None
    preset: str | None = None

    @property
    def si_units(self) -> bool:
        return self.params.omega_m is not None

    def thermal_spec(self) -> ThermalSpec:
        if self.temperature is not None:
            return ThermalSpec(temperature=self.temperature,
                               omega_m=self.params.omega_m,
                               epsilon_tail=self.epsilon_tail)
        if self.n_bar_th is not None:
            return ThermalSpec(n_bar_th=self.n_bar_th,
                               epsilon_tail=self.epsilon_tail)
        raise ConfigError("config has no thermal state: set T_kelvin or n_bar_th")

    def segment_params(self, spec: SegmentSpec) -> PhysicalParams:
        """Effective parameters of one segment.

        Conventional variants run with the driving off, so g_f is forced
        to zero there; resonant variants must not carry a detuning.
        """
        p = self.params
        if spec.g_f is not None:
            g_f = spec.g_f / p.omega_m if self.si_units else spec.g_f
            p = replace(p, g_f=g_f)
        if spec.delta_e is not None:
            d = spec.delta_e / p.omega_m if self.si_units else spec.delta_e
            p = replace(p, delta_e=d)
        if spec.variant.startswith("conventional"):
            p = replace(p, g_f=0.0)
        if not spec.variant.endswith("detuned") and p.delta_e != 0.0:
            raise ConfigError(
                f"segment variant {spec.variant!r} is resonant but delta_e is "
                f"{p.delta_e:g}; use the {spec.variant + '-detuned'!r} variant"
            )
        return p

    def schedule(self) -> ProtocolSchedule:
        if not self.segments:
            raise ConfigError("config has no segments")
        return ProtocolSchedule(tuple(
            Segment(variant=s.variant, params=self.segment_params(s),
                    steps=s.steps, until_n_bar=s.until_n_bar)
            for s in self.segments
        ))

    def to_dict(self) -> dict:
        """Canonical JSON-ready form; parses back to an equal config."""
        out: dict = {}
        if self.preset is not None:
            out["preset"] = self.preset
        if self.si_units:
            si = self.params.to_si()
            out["omega_m_rad_s"] = si["omega_m_rad_s"]
            out["g_m"] = si["g_m_rad_s"]
            out["g_f"] = si["g_f_rad_s"]
            out["delta_e"] = si["delta_e_rad_s"]
            out["tau"] = si["tau_s"]
        else:
            out["dimensionless"] = True
            out["g_m"] = self.params.g_m
            out["g_f"] = self.params.g_f
            out["delta_e"] = self.params.delta_e
            out["tau"] = self.params.tau
        if self.temperature is not None:
            out["T_kelvin"] = self.temperature
        if self.n_bar_th is not None:
            out["n_bar_th"] = self.n_bar_th
        out["epsilon_tail"] = self.epsilon_tail
        out["segments"] = [
            {k: v for k, v in {
                "variant": s.variant, "steps": s.steps,
                "until_n_bar": s.until_n_bar, "g_f": s.g_f,
                "delta_e": s.delta_e,
            }.items() if v is not None}
            for s in self.segments
        ]
        out["seed"] = self.seed
        out["hard_cap"] = self.hard_cap
        out["outputs"] = {
            "run_csv": self.outputs.run_csv,
            "histogram_csv": self.outputs.histogram_csv,
            "coefficients_csv": self.outputs.coefficients_csv,
            "powers": list(self.outputs.powers),
        }
        if self.outputs.variants is not None:
            out["outputs"]["variants"] = list(self.outputs.variants)
        if self.outputs.n_max is not None:
            out["outputs"]["n_max"] = self.outputs.n_max
        if self.sweep is not None:
            out["sweep"] = {"axis": self.sweep.axis,
                            "values": list(self.sweep.values)}
        return out


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return _typed(data, key, kind, where)


def _typed(data: dict, key: str, kind, where: str):
    value = data[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    if kind in (list, dict, str) and isinstance(value, kind):
        return value
    raise ConfigError(f"key {key!r} in {where} must be {kind.__name__}, "
                      f"got {type(value).__name__}")


def _reject_unknown(data: dict, allowed: set[str], where: str):
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(map(repr, unknown))} in {where}")


def _parse_segment(raw: dict, i: int) -> SegmentSpec:
    where = f"segments[{i}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(raw, _SEGMENT_KEYS, where)
    variant = _require(raw, "variant", str, where)
    if variant not in VARIANTS:
        raise ConfigError(f"key 'variant' in {where}: unknown variant {variant!r}")
    steps = _require(raw, "steps", int, where)
    if steps < 0:
        raise ConfigError(f"key 'steps' in {where} must be nonnegative")
    until = _typed(raw, "until_n_bar", float, where) if "until_n_bar" in raw else None
    g_f = _typed(raw, "g_f", float, where) if "g_f" in raw else None
    delta = _typed(raw, "delta_e", float, where) if "delta_e" in raw else None
    return SegmentSpec(variant, steps, until, g_f, delta)


def _parse_outputs(raw: dict) -> OutputOptions:
    where = "outputs"
    _reject_unknown(raw, _OUTPUT_KEYS, where)
    powers = raw.get("powers", [1])
    if (not isinstance(powers, list) or not powers
            or any(not isinstance(p, int) or isinstance(p, bool) or p < 1 for p in powers)):
        raise ConfigError("key 'powers' in outputs must be a nonempty list of positive ints")
    variants = raw.get("variants")
    if variants is not None:
        if not isinstance(variants, list) or not variants:
            raise ConfigError("key 'variants' in outputs must be a nonempty list")
        for v in variants:
            if v not in VARIANTS:
                raise ConfigError(f"key 'variants' in outputs: unknown variant {v!r}")
        variants = tuple(variants)
    n_max = _typed(raw, "n_max", int, where) if "n_max" in raw else None
    if n_max is not None and n_max < 0:
        raise ConfigError("key 'n_max' in outputs must be nonnegative")
    return OutputOptions(
        run_csv=_typed(raw, "run_csv", bool, where) if "run_csv" in raw else True,
        histogram_csv=_typed(raw, "histogram_csv", bool, where) if "histogram_csv" in raw else False,
        coefficients_csv=_typed(raw, "coefficients_csv", bool, where) if "coefficients_csv" in raw else False,
        powers=tuple(powers),
        variants=variants,
        n_max=n_max,
    )


def parse_config_data(data: dict, preset: str | None = None) -> ExperimentConfig:
    """Validate a raw config mapping, expanding its preset if named.

    ``preset`` overlays the named preset under the explicit keys: the
    preset provides defaults and the mapping's own keys win.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    named = data.get("preset")
    if named is not None and not isinstance(named, str):
        raise ConfigError("key 'preset' must be a string")
    if preset is not None and named is not None and preset != named:
        raise ConfigError(f"preset {preset!r} conflicts with config preset {named!r}")
    preset = named or preset
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; "
                              f"available: {', '.join(sorted(PRESETS))}")
        merged = dict(PRESETS[preset])
        merged.update({k: v for k, v in data.items() if k != "preset"})
        data = merged
        logger.info("expanded preset %r to %s", preset, json.dumps(data, sort_keys=True))

    _reject_unknown(data, _TOP_KEYS, "config")
    dimensionless = _typed(data, "dimensionless", bool, "config") if "dimensionless" in data else False
    has_si = "omega_m_rad_s" in data
    if dimensionless == has_si:
        raise ConfigError("set exactly one unit convention: key 'omega_m_rad_s' "
                          "(SI) or key 'dimensionless': true")

    g_m = _require(data, "g_m", float, "config")
    g_f = _typed(data, "g_f", float, "config") if "g_f" in data else 0.0
    delta_e = _typed(data, "delta_e", float, "config") if "delta_e" in data else 0.0
    tau = _require(data, "tau", float, "config")
    try:
        if has_si:
            params = PhysicalParams.from_si(
                omega_m=_require(data, "omega_m_rad_s", float, "config"),
                g_m=g_m, tau=tau, g_f=g_f, delta_e=delta_e)
        else:
            params = PhysicalParams(g_m=g_m, tau=tau, g_f=g_f, delta_e=delta_e)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    temperature = _typed(data, "T_kelvin", float, "config") if "T_kelvin" in data else None
    n_bar_th = _typed(data, "n_bar_th", float, "config") if "n_bar_th" in data else None
    if temperature is not None and n_bar_th is not None:
        raise ConfigError("give only one of 'T_kelvin' and 'n_bar_th'")
    if temperature is not None and not has_si:
        raise ConfigError("key 'T_kelvin' needs SI units; dimensionless configs "
                          "must use 'n_bar_th'")

    segments = tuple(_parse_segment(s, i)
                     for i, s in enumerate(data.get("segments", [])))
    outputs = _parse_outputs(data.get("outputs", {})) if "outputs" in data else OutputOptions()

    sweep_opts = None
    if "sweep" in data:
        raw = _typed(data, "sweep", dict, "config")
        _reject_unknown(raw, _SWEEP_KEYS, "sweep")
        axis = _require(raw, "axis", str, "sweep")
        if axis not in SWEEP_AXES:
            raise ConfigError(f"key 'axis' in sweep: unknown axis {axis!r}")
        values = _require(raw, "values", list, "sweep")
        if not values or any(isinstance(v, bool) or not isinstance(v, (int, float))
                             for v in values):
            raise ConfigError("key 'values' in sweep must be a nonempty number list")
        sweep_opts = SweepOptions(axis, tuple(float(v) for v in values))

    epsilon_tail = (_typed(data, "epsilon_tail", float, "config")
                    if "epsilon_tail" in data else DEFAULT_EPSILON_TAIL)
    if not 0.0 < epsilon_tail <= 1e-6:
        raise ConfigError("key 'epsilon_tail' must be in (0, 1e-6]")
    seed = _typed(data, "seed", int, "config") if "seed" in data else 0
    hard_cap = _typed(data, "hard_cap", int, "config") if "hard_cap" in data else DEFAULT_HARD_CAP
    if hard_cap < 0:
        raise ConfigError("key 'hard_cap' must be nonnegative")

    config = ExperimentConfig(
        params=params, segments=segments, temperature=temperature,
        n_bar_th=n_bar_th, epsilon_tail=epsilon_tail, seed=seed,
        hard_cap=hard_cap, outputs=outputs, sweep=sweep_opts, preset=preset,
    )
    for spec in segments:
        config.segment_params(spec)  # surface unit/variant conflicts at parse time
    return config


def parse_config(path, preset: str | None = None) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        return parse_config_data(data, preset=preset)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# Preset anchors: a 15.6 GHz (angular) magnetic resonator coupled at
# 2*pi*1 MHz, measured every 700 (or 220) resonator cycles' worth of time.
_OMEGA = 1.56e10
_G_M = 2.0 * math.pi * 1.0e6
_TAU_700 = 700.0 / _OMEGA
_TAU_220 = 220.0 / _OMEGA


def _si_run(T, gf_over_gm, tau, segments, seed, **outputs):
    cfg = {
        "omega_m_rad_s": _OMEGA,
        "g_m": _G_M,
        "g_f": gf_over_gm * _G_M,
        "delta_e": 0.0,
        "tau": tau,
        "T_kelvin": T,
        "segments": segments,
        "seed": seed,
    }
    if outputs:
        cfg["outputs"] = outputs
    return cfg


PRESETS: dict[str, dict] = {
    # Coefficient-range study on a dimensionless grid.
    "fig2": {
        "dimensionless": True,
        "g_m": 0.0004, "g_f": 0.02, "delta_e": 0.0, "tau": 700.0,
        "outputs": {"run_csv": False, "coefficients_csv": True,
                    "powers": [1, 10], "variants": ["driven", "conventional"],
                    "n_max": 2500},
        "seed": 2,
    },
    # Low-temperature runs, driving on versus off.
    "fig3a": _si_run(0.1, 30.0, _TAU_700, [{"variant": "driven", "steps": 80}], 31),
    "fig3a_conventional": _si_run(0.1, 0.0, _TAU_700,
                                  [{"variant": "conventional", "steps": 80}], 31),
    "fig3b": _si_run(1.0, 30.0, _TAU_700, [{"variant": "driven", "steps": 80}], 32),
    "fig3b_conventional": _si_run(1.0, 0.0, _TAU_700,
                                  [{"variant": "conventional", "steps": 80}], 32),
    "fig3c": _si_run(2.2, 30.0, _TAU_700, [{"variant": "driven", "steps": 80}], 33),
    "fig3c_conventional": _si_run(2.2, 0.0, _TAU_700,
                                  [{"variant": "conventional", "steps": 80}], 33),
    # 10 K runs where only the driven protocol cools.
    "fig4": _si_run(10.0, 30.0, _TAU_700, [{"variant": "driven", "steps": 300}], 41),
    "fig4_conventional": _si_run(10.0, 0.0, _TAU_700,
                                 [{"variant": "conventional", "steps": 300}], 41),
    # Population histograms after 60 measurements (5a is the untouched start).
    "fig5a": _si_run(10.0, 0.0, _TAU_700, [], 50, run_csv=True, histogram_csv=True),
    "fig5b": _si_run(10.0, 0.0, _TAU_700,
                     [{"variant": "conventional", "steps": 60}], 51,
                     run_csv=True, histogram_csv=True),
    "fig5c": _si_run(10.0, 30.0, _TAU_700, [{"variant": "driven", "steps": 60}], 52,
                     run_csv=True, histogram_csv=True),
    # Around 100 K with a shorter interval and stronger driving.
    "fig6": _si_run(100.0, 50.0, _TAU_220, [{"variant": "driven", "steps": 300}], 61),
    "fig6_sweep": {
        **_si_run(100.0, 50.0, _TAU_220, [{"variant": "driven", "steps": 50}], 62),
        "sweep": {"axis": "T", "values": [90.0, 100.0, 110.0, 120.0]},
    },
    # Hybrid schedule: driving on for 30 measurements, then off.
    "fig7": _si_run(10.0, 30.0, _TAU_700,
                    [{"variant": "driven", "steps": 30},
                     {"variant": "conventional", "steps": 270}], 71),
    "fig7_threshold": _si_run(10.0, 30.0, _TAU_700,
                              [{"variant": "driven", "steps": 300, "until_n_bar": 10.0},
                               {"variant": "conventional", "steps": 270}], 71),
    # Terminal observables against the driving strength (units of g_m).
    # The grid samples halfway between the g_f*tau = 2*j*pi resonances at
    # which the first cooling-free index crosses the ground state and the
    # survival probability spikes trivially; midway points expose the
    # asymptotic trend instead.
    "fig8": {
        **_si_run(10.0, 30.0, _TAU_700, [{"variant": "driven", "steps": 50}], 81),
        "sweep": {"axis": "g_f",
                  "values": [round((j + 0.5) * 2.0 * math.pi / (_G_M / _OMEGA * 700.0), 2)
                             for j in range(5)]},
    },
    # Detuned coefficient tables on the dimensionless grid.
    "fig9": {
        "dimensionless": True,
        "g_m": 0.0004, "g_f": 0.02, "delta_e": 0.002, "tau": 700.0,
        "outputs": {"run_csv": False, "coefficients_csv": True, "powers": [1],
                    "variants": ["driven-detuned", "conventional-detuned"],
                    "n_max": 2500},
        "seed": 9,
    },
}
