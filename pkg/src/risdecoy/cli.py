"""Experiment CLI: scenario validation, pipelines, and tabular export.

Exit codes: 0 success, 2 schema error, 3 infeasible scenario, 4 numerical
failure (solver did not meet the nulling tolerance).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import position_peb_map, Variant
from .channel import deceptive_mean, default_pilots, observe
from .deception import (deception_report, kappa_min, rho_ub_sweep,
                        shortlist_decoys)
from .bounds import kappa
from .radar_ml import ml_spectrum, run_trials, sample_covariance, steering_matrix
from .ris_kernel import Convention, beta_bar_sweep, build_basis, uniform_profile
from .scenario import (FeasibilityError, Scenario, SchemaError, canonical_toml,
                       config_hash, load_scenario, validate_scenario)
from .solver import solve_p3

EXPERIMENTS = ("beampattern", "ml_spectrum", "peb_map", "leakage_ratio",
               "rho_ub", "shortlist", "trials")

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _say(quiet, *msg):
    if not quiet:
        print(*msg)


def _write_csv(path: Path, header: str, rows, cfg_hash: str, seed: int):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# config_hash={cfg_hash} seed={seed} tool=risdecoy-{__version__}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_num(v) for v in row) + "\n")


def _num(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    x = float(v)
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def _db(power_like, floor=1e-300):
    return 10.0 * np.log10(np.maximum(power_like, floor))


class _Run:
    """One scenario run: solve once, serve every requested experiment."""

    def __init__(self, scenario: Scenario, seed_override=None, out_override=None):
        self.sc = scenario
        self.scene = scenario.scene
        if seed_override is not None:
            from dataclasses import replace
            self.scene = replace(self.scene, rng_seed=int(seed_override))
        self.hash = config_hash(scenario)
        self.seed = self.scene.rng_seed
        self.outdir = Path(out_override or scenario.output_dir)
        self.basis = build_basis(self.scene.window, self.scene.theta_fake,
                                 self.scene.theta_true, self.scene.m_ris)
        self.solution = solve_p3(self.basis, scenario.solver)
        self.uniform = uniform_profile(self.scene.m_ris)
        self.files = []

    def _grid_deg(self, step):
        return np.arange(-89.0, 89.0 + 1e-9, step)

    def _emit(self, name, header, rows):
        path = self.outdir / name
        _write_csv(path, header, rows, self.hash, self.seed)
        self.files.append(path)

    def beampattern(self):
        gd = self._grid_deg(self.sc.sweeps.beampattern_step_deg)
        th = np.deg2rad(gd)
        tt = self.scene.theta_true
        M = self.scene.m_ris
        bu = np.abs(beta_bar_sweep(th, self.uniform, Convention.FIXED_INCIDENCE, tt))
        bo = np.abs(beta_bar_sweep(th, self.solution.profile,
                                   Convention.FIXED_INCIDENCE, tt))
        rows = zip(gd, _db(bu ** 2 / M ** 2), _db(bo ** 2 / M ** 2))
        self._emit("beampattern.csv",
                   "angle_deg,uniform_gain_db,optimized_gain_db", rows)

    def ml_spectrum(self):
        gd = self._grid_deg(self.sc.sweeps.spectrum_step_deg)
        th = np.deg2rad(gd)
        N = self.scene.n_radar
        cols = []
        for k, omega in enumerate((self.uniform, self.solution.profile)):
            mu = deceptive_mean(self.scene, omega)
            rng = np.random.default_rng((self.seed, 1 << 20, k))
            Y = observe(mu, default_pilots(self.scene.t_pilots),
                        self.scene.noise_power, rng)
            spec = ml_spectrum(sample_covariance(Y), th, N)
            cols.append(_db(spec.values / spec.peak_value))
        rows = zip(gd, cols[0], cols[1])
        self._emit("ml_spectrum.csv", "angle_deg,uniform_db,optimized_db", rows)

    def peb_map(self):
        sw = self.sc.sweeps
        maps = {}
        for tag, omega in (("uniform", self.uniform),
                           ("optimized", self.solution.profile)):
            maps[tag] = position_peb_map(sw.peb_x_m, sw.peb_y_m, sw.peb_shape,
                                         omega, self.scene,
                                         variant=Variant.CLOSED_FORM)
        g = maps["uniform"]
        rows = []
        for i, xv in enumerate(g.x):
            for j, yv in enumerate(g.y):
                rows.append((xv, yv,
                             maps["uniform"].peb_position[i, j],
                             maps["optimized"].peb_position[i, j],
                             maps["uniform"].peb_angular[i, j],
                             maps["optimized"].peb_angular[i, j]))
        self._emit("peb_map.csv",
                   "x_m,y_m,peb_pos_uniform_m,peb_pos_optimized_m,"
                   "peb_ang_uniform_rad,peb_ang_optimized_rad", rows)

    def leakage_ratio(self):
        sw = self.sc.sweeps
        gd = self._grid_deg(sw.decoy_step_deg)
        th = np.deg2rad(gd)
        tt = self.scene.theta_true
        N = self.scene.n_radar
        rep = deception_report(self.solution.profile, self.basis, self.scene,
                               rho_levels=sw.rho_levels)
        bb = np.abs(beta_bar_sweep(th, self.solution.profile,
                                   Convention.FIXED_INCIDENCE, tt))
        with np.errstate(divide="ignore"):
            ratio = np.where(bb > 0, rep.leakage_worst / bb, np.inf)
        km = kappa_min(self.scene.window, N)
        thresholds = [np.sqrt(kappa(th, N) / (rho * km)) for rho in sw.rho_levels]
        header = "decoy_angle_deg,leakage_ratio," + ",".join(
            f"threshold_rho{rho:g}" for rho in sw.rho_levels)
        rows = zip(gd, ratio, *thresholds)
        self._emit("leakage_ratio.csv", header, rows)

    def rho_ub(self):
        sw = self.sc.sweeps
        gd = self._grid_deg(sw.decoy_step_deg)
        th = np.deg2rad(gd)
        curves = rho_ub_sweep(th, self.basis, self.scene.n_radar, sw.leakage_caps)
        header = "decoy_angle_deg," + ",".join(
            f"rho_ub_cap{cap:g}" for cap in sw.leakage_caps)
        rows = zip(gd, *curves)
        self._emit("rho_ub.csv", header, rows)

    def shortlist(self):
        sw = self.sc.sweeps
        gd = self._grid_deg(sw.decoy_step_deg)
        scores = shortlist_decoys(np.deg2rad(gd), self.scene,
                                  leakage_cap=sw.leakage_caps[len(sw.leakage_caps) // 2],
                                  top_n=sw.shortlist_top_n,
                                  solver_params=self.sc.solver)
        rows = []
        for rank, s in enumerate(scores):
            rows.append((rank, np.rad2deg(s.theta), s.eta, s.phi, s.rho_ub,
                         "" if s.realized_rho is None else _num(s.realized_rho),
                         "" if s.leakage is None else _num(s.leakage),
                         "" if s.decoy_gain is None else _num(s.decoy_gain),
                         "" if s.converged is None else _num(s.converged)))
        self._emit("shortlist.csv",
                   "rank,theta_deg,eta,phi,rho_ub,realized_rho,leakage,"
                   "decoy_gain,converged", rows)

    def trials(self):
        sw = self.sc.sweeps
        grid = np.deg2rad(self._grid_deg(sw.ml_grid_step_deg))
        summary = run_trials(self.scene, self.solution.profile, sw.n_trials, grid)
        rows = [(summary.n_trials, summary.decoyed_rate, summary.revealed_rate,
                 summary.elsewhere_rate, np.rad2deg(summary.rmse_to_fake))]
        self._emit("trials.csv",
                   "n_trials,decoyed_rate,revealed_rate,elsewhere_rate,"
                   "rmse_to_fake_deg", rows)

    def manifest(self):
        path = self.outdir / "manifest.txt"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"tool_version={__version__}\n")
            fh.write(f"config_hash={self.hash}\n")
            fh.write(f"seed={self.seed}\n")
            fh.write(f"solver_converged={int(self.solution.converged)}\n")
            fh.write(f"solver_residual={self.solution.residual:.6e}\n")
            fh.write(f"decoy_gain={self.solution.decoy_gain:.6f}\n")
            for fp in sorted(self.files):
                digest = hashlib.sha256(fp.read_bytes()).hexdigest()[:16]
                fh.write(f"output.{fp.name}={digest}\n")


def run_command(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: cannot read {args.scenario}", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        validate_scenario(scenario)
    except FeasibilityError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    try:
        run = _Run(scenario, seed_override=args.seed, out_override=args.out)
    except ValueError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    run.outdir.mkdir(parents=True, exist_ok=True)
    if not run.solution.converged:
        print(f"numerical failure: nulling residual {run.solution.residual:.3e} "
              "above tolerance", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.experiment == "all":
        wanted = EXPERIMENTS
    elif args.experiment == "none":
        wanted = ()
    else:
        wanted = (args.experiment,)
    for name in wanted:
        _say(args.quiet, f"running {name} ...")
        getattr(run, name)()
    run.manifest()
    _say(args.quiet, f"wrote {len(run.files)} tables + manifest to {run.outdir}")
    return EXIT_OK


def validate_command(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: cannot read {args.scenario}", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        notes = validate_scenario(scenario)
    except FeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for note in notes:
        print(note)
    print(f"config_hash={config_hash(scenario)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risdecoy",
        description="RIS spoofing design and deception analysis experiments.",
        epilog="exit codes: 0 ok, 2 schema error, 3 infeasible scenario, "
               "4 numerical failure")
    parser.add_argument("--version", action="version",
                        version=f"risdecoy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--experiment", default="all",
                       choices=EXPERIMENTS + ("all", "none"))
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the scenario rng seed")
    p_run.add_argument("--out", default=None, help="override output directory")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=run_command)

    p_val = sub.add_parser("validate", help="schema + feasibility checks")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=validate_command)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
