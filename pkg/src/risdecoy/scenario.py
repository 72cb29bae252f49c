"""Scenario-file ingestion: strict TOML schema, canonical form, config hash."""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import SceneConfig, dbm_to_watts
from .ris_kernel import build_basis
from .solver import SolverParams


class SchemaError(ValueError):
    """Scenario file violates the schema."""


class FeasibilityError(ValueError):
    """Scenario is well-formed but the design problem is infeasible."""


_SCENE_KEYS = {
    "carrier_ghz": float,
    "n_radar": int,
    "m_ris": int,
    "p_ris_m": list,
    "t_pilots": int,
    "power_tx_dbm": float,
    "noise_dbm": float,
    "theta_fake_deg": float,
    "theta_true_deg": float,      # optional pin
    "window_half_width_deg": float,
    "window_count": int,
    "rng_seed": int,
}
_SCENE_OPTIONAL = {"theta_true_deg", "rng_seed"}

_SOLVER_KEYS = {
    "gamma": float,
    "i_max": int,
    "eps_null": float,
    "eps_reg": float,
    "refine": bool,
    "n_restarts": int,
    "seed": int,
}

_SWEEP_KEYS = {
    "beampattern_step_deg": float,
    "spectrum_step_deg": float,
    "decoy_step_deg": float,
    "leakage_caps": list,
    "rho_levels": list,
    "n_trials": int,
    "ml_grid_step_deg": float,
    "shortlist_top_n": int,
    "peb_x_m": list,
    "peb_y_m": list,
    "peb_shape": list,
}

_OUTPUT_KEYS = {"directory": str}

_SWEEP_DEFAULTS = {
    "beampattern_step_deg": 0.1,
    "spectrum_step_deg": 0.1,
    "decoy_step_deg": 1.0,
    "leakage_caps": [0.1, 1.0, 10.0],
    "rho_levels": [2.0, 5.0, 10.0],
    "n_trials": 500,
    "ml_grid_step_deg": 0.1,
    "shortlist_top_n": 5,
    "peb_x_m": [0.0, 100.0],
    "peb_y_m": [-80.0, 80.0],
    "peb_shape": [200, 200],
}


@dataclass(frozen=True)
class Sweeps:
    beampattern_step_deg: float
    spectrum_step_deg: float
    decoy_step_deg: float
    leakage_caps: tuple
    rho_levels: tuple
    n_trials: int
    ml_grid_step_deg: float
    shortlist_top_n: int
    peb_x_m: tuple
    peb_y_m: tuple
    peb_shape: tuple


@dataclass(frozen=True)
class Scenario:
    scene: SceneConfig
    solver: SolverParams
    sweeps: Sweeps
    output_dir: str
    raw: dict


def _check_section(name, data, keys, optional=frozenset(), defaults=None):
    if not isinstance(data, dict):
        raise SchemaError(f"[{name}] must be a table")
    unknown = set(data) - set(keys)
    if unknown:
        raise SchemaError(f"[{name}] has unknown keys: {sorted(unknown)}")
    out = dict(defaults or {})
    for key, typ in keys.items():
        if key not in data:
            if key in optional or (defaults is not None and key in out):
                continue
            if defaults is None:
                raise SchemaError(f"[{name}] missing required key '{key}'")
            continue
        val = data[key]
        if typ is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if typ is int and isinstance(val, bool):
            raise SchemaError(f"[{name}].{key} must be an integer")
        if not isinstance(val, typ):
            raise SchemaError(f"[{name}].{key} must be {typ.__name__}")
        out[key] = val
    return out


def parse_scenario(text: str) -> Scenario:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"not valid TOML: {exc}") from exc
    unknown = set(raw) - {"scene", "solver", "sweeps", "output"}
    if unknown:
        raise SchemaError(f"unknown sections: {sorted(unknown)}")
    if "scene" not in raw:
        raise SchemaError("missing [scene] section")
    sc = _check_section("scene", raw["scene"], _SCENE_KEYS, _SCENE_OPTIONAL)
    so = _check_section("solver", raw.get("solver", {}), _SOLVER_KEYS,
                        optional=set(_SOLVER_KEYS))
    sw = _check_section("sweeps", raw.get("sweeps", {}), _SWEEP_KEYS,
                        defaults=_SWEEP_DEFAULTS)
    out = _check_section("output", raw.get("output", {}), _OUTPUT_KEYS,
                         defaults={"directory": "out"})

    p_ris = sc["p_ris_m"]
    if len(p_ris) != 2 or not all(isinstance(v, (int, float)) for v in p_ris):
        raise SchemaError("[scene].p_ris_m must be a 2-element number list")
    if sc["carrier_ghz"] <= 0:
        raise SchemaError("[scene].carrier_ghz must be positive")
    if sc["t_pilots"] < 1:
        raise SchemaError("[scene].t_pilots must be >= 1")
    if sc["window_count"] < 1:
        raise SchemaError("[scene].window_count must be >= 1")
    if not -90 < sc["theta_fake_deg"] < 90:
        raise SchemaError("[scene].theta_fake_deg must lie in (-90, 90)")

    try:
        scene = SceneConfig(
            carrier_hz=sc["carrier_ghz"] * 1e9,
            n_radar=sc["n_radar"],
            m_ris=sc["m_ris"],
            p_ris=(float(p_ris[0]), float(p_ris[1])),
            t_pilots=sc["t_pilots"],
            power_tx=dbm_to_watts(sc["power_tx_dbm"]),
            noise_power=dbm_to_watts(sc["noise_dbm"]),
            theta_fake=np.deg2rad(sc["theta_fake_deg"]),
            window_half_width=np.deg2rad(sc["window_half_width_deg"]),
            window_count=sc["window_count"],
            rng_seed=sc.get("rng_seed", 0),
            theta_true_pinned=(np.deg2rad(sc["theta_true_deg"])
                               if "theta_true_deg" in sc else None),
        )
        solver = SolverParams(**so) if so else SolverParams()
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc

    for key in ("peb_x_m", "peb_y_m", "peb_shape"):
        if len(sw[key]) != 2:
            raise SchemaError(f"[sweeps].{key} must have two entries")
    sweeps = Sweeps(
        beampattern_step_deg=float(sw["beampattern_step_deg"]),
        spectrum_step_deg=float(sw["spectrum_step_deg"]),
        decoy_step_deg=float(sw["decoy_step_deg"]),
        leakage_caps=tuple(float(c) for c in sw["leakage_caps"]),
        rho_levels=tuple(float(r) for r in sw["rho_levels"]),
        n_trials=int(sw["n_trials"]),
        ml_grid_step_deg=float(sw["ml_grid_step_deg"]),
        shortlist_top_n=int(sw["shortlist_top_n"]),
        peb_x_m=tuple(float(v) for v in sw["peb_x_m"]),
        peb_y_m=tuple(float(v) for v in sw["peb_y_m"]),
        peb_shape=tuple(int(v) for v in sw["peb_shape"]),
    )
    merged = {"scene": sc, "solver": so, "sweeps": sw, "output": out}
    return Scenario(scene=scene, solver=solver, sweeps=sweeps,
                    output_dir=out["directory"], raw=merged)


def load_scenario(path) -> Scenario:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_scenario(text)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)}")


def canonical_toml(scenario: Scenario) -> str:
    """Deterministic serialization: fixed section order, sorted keys."""
    lines = []
    for section in ("scene", "solver", "sweeps", "output"):
        data = scenario.raw.get(section, {})
        if not data:
            continue
        lines.append(f"[{section}]")
        for key in sorted(data):
            lines.append(f"{key} = {_fmt(data[key])}")
        lines.append("")
    return "\n".join(lines)


def config_hash(scenario: Scenario) -> str:
    return hashlib.sha256(canonical_toml(scenario).encode()).hexdigest()[:16]


def validate_scenario(scenario: Scenario) -> list[str]:
    """Feasibility pre-checks; returns human-readable diagnostics.

    Raises FeasibilityError naming the violated condition when the design
    problem cannot be posed.
    """
    scene = scenario.scene
    notes = []
    derived = np.rad2deg(scene.theta_true_derived)
    if scene.theta_true_pinned is not None:
        notes.append(f"derived theta_true = {derived:.2f} deg, pinned theta_true = "
                     f"{np.rad2deg(scene.theta_true_pinned):.2f} deg (pinned wins)")
    else:
        notes.append(f"derived theta_true = {derived:.2f} deg (no pin)")
    if scene.m_ris < 2 * scene.window_count:
        raise FeasibilityError(
            f"M >= 2K violated: M = {scene.m_ris}, K = {scene.window_count}")
    try:
        basis = build_basis(scene.window, scene.theta_fake, scene.theta_true,
                            scene.m_ris)
    except ValueError as exc:
        raise FeasibilityError(str(exc)) from exc
    notes.append(f"feasible: rank(V) = {basis.K}, "
                 f"eta(theta_fake) = {basis.eta():.4f}")
    return notes
