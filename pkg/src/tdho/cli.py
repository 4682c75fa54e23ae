"""Scenario-driven command line: tdho <subcommand> <scenario.json> [...].

A scenario file is the complete experiment record; flags only select the
subcommand, a state index, a time, and the output directory, so identical
scenario + flags reproduce byte-identical outputs.  Subcommands:

  evolve          mode-trajectory CSVs (base mode and per-state squeezed)
  wavefunction    one wave-function CSV at --t for --state-index
  moments         analytic vs quadrature moment JSON over the time grid
  verify          full invariant and cross-check suite (exit 2 on failure)
  static-compare  pipeline vs closed-form sweep report (static profiles)

Exit codes: 0 success, 1 scenario validation error, 2 verification failure
(verify only), 3 numerical error.  TDHO_THREADS caps worker threads for the
per-state sweeps (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .errors import (
    GridError,
    ModeSolverError,
    PhaseUnwrapError,
    ProfileError,
    ScenarioError,
    TdhoError,
)
from .mode_solver import SqueezeParams, apply_squeeze, evolve_mode, polar_decompose, wkb_mode
from .observables import analytic_moments, inner_product, quadrature_moments
from .profiles import OscillatorProfile, parse_profile, profile_hash
from .states import StateSpec, dsn_wavefunction, spatial_grid
from .verification import (
    classical_equation_residual,
    crosscheck_static,
    nieto_t0_identity_residuals,
    nieto_time_identity_residuals,
    schrodinger_residual,
)

# verify-subcommand tolerances
WRONSKIAN_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-8
RESIDUAL_TOL = 1e-4
CLASSICAL_TOL = 1e-6
NIETO_T0_TOL = 1e-12
NIETO_TIME_TOL = 1e-10
CROSSCHECK_TOL = 1e-10


@dataclass(frozen=True)
class Scenario:
    profile: OscillatorProfile
    hbar: float
    states: list
    t_start: float
    t_end: float
    samples: int
    grid_points: int
    half_width_sigmas: float
    ode_rel_tol: float
    quadrature_tol: float
    residual_dt: float
    out_dir: str
    write_csv: bool
    write_json: bool

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.samples)


def _require_keys(mapping: dict, where: str, required: set, optional: set):
    unknown = set(mapping) - required - optional
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(mapping)
    if missing:
        raise ScenarioError(f"{where}: missing key(s) {sorted(missing)}")


def _number(mapping: dict, where: str, key: str, default=None):
    value = mapping.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def load_scenario(path) -> Scenario:
    """Parse and validate one scenario file."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario: expected a JSON object at the top level")
    _require_keys(
        raw,
        "scenario",
        {"profile", "states", "time_grid"},
        {"hbar", "grid", "tolerances", "outputs"},
    )
    try:
        profile = parse_profile(raw["profile"])
    except ProfileError as exc:
        raise ScenarioError(str(exc)) from None

    hbar = _number(raw, "scenario", "hbar", 1.0)
    if hbar <= 0:
        raise ScenarioError("scenario.hbar: must be positive")

    tg = raw["time_grid"]
    if not isinstance(tg, dict):
        raise ScenarioError("scenario.time_grid: expected an object")
    _require_keys(tg, "time_grid", {"t_start", "t_end", "samples"}, set())
    t_start = _number(tg, "time_grid", "t_start")
    t_end = _number(tg, "time_grid", "t_end")
    samples = tg["samples"]
    if not isinstance(samples, int) or samples < 2:
        raise ScenarioError("time_grid.samples: must be an integer >= 2")
    if not t_end > t_start:
        raise ScenarioError("time_grid: t_end must be greater than t_start")

    grid = raw.get("grid", {})
    _require_keys(grid, "grid", set(), {"points", "half_width_sigmas"})
    points = grid.get("points", 2048)
    if not isinstance(points, int) or points < 64:
        raise ScenarioError("grid.points: must be an integer >= 64")
    sigmas = _number(grid, "grid", "half_width_sigmas", 8.0)
    if sigmas < 4:
        raise ScenarioError("grid.half_width_sigmas: must be >= 4")

    tol = raw.get("tolerances", {})
    _require_keys(tol, "tolerances", set(), {"ode_rel_tol", "quadrature_tol", "residual_dt"})
    ode_rel_tol = _number(tol, "tolerances", "ode_rel_tol", 1e-10)
    if not 1e-13 <= ode_rel_tol <= 1e-6:
        raise ScenarioError("tolerances.ode_rel_tol: must lie in [1e-13, 1e-6]")
    quadrature_tol = _number(tol, "tolerances", "quadrature_tol", 1e-6)
    if quadrature_tol <= 0:
        raise ScenarioError("tolerances.quadrature_tol: must be positive")
    residual_dt = _number(tol, "tolerances", "residual_dt", 1e-4)
    if not 0 < residual_dt <= 1e-3:
        raise ScenarioError("tolerances.residual_dt: must lie in (0, 1e-3]")

    outputs = raw.get("outputs", {})
    _require_keys(outputs, "outputs", set(), {"directory", "csv", "json"})
    out_dir = outputs.get("directory", "tdho_out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ScenarioError("outputs.directory: must be a non-empty string")
    write_csv = outputs.get("csv", True)
    write_json = outputs.get("json", True)
    if not isinstance(write_csv, bool) or not isinstance(write_json, bool):
        raise ScenarioError("outputs.csv and outputs.json must be booleans")

    states_raw = raw["states"]
    if not isinstance(states_raw, list) or not states_raw:
        raise ScenarioError("scenario.states: expected a non-empty list")
    states = []
    for i, entry in enumerate(states_raw):
        where = f"states[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{where}: expected an object")
        _require_keys(entry, where, {"n"}, {"alpha", "r", "phi"})
        n = entry["n"]
        if not isinstance(n, int) or n < 0:
            raise ScenarioError(f"{where}.n: must be a non-negative integer")
        alpha_raw = entry.get("alpha", [0.0, 0.0])
        if (
            not isinstance(alpha_raw, list)
            or len(alpha_raw) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in alpha_raw)
        ):
            raise ScenarioError(f"{where}.alpha: expected [re, im]")
        r = _number(entry, where, "r", 0.0)
        if r < 0:
            raise ScenarioError(f"{where}.r: must be >= 0")
        phi = _number(entry, where, "phi", 0.0)
        try:
            states.append(
                StateSpec(
                    n=n,
                    alpha=complex(alpha_raw[0], alpha_raw[1]),
                    squeeze=SqueezeParams(r=r, phi=phi),
                    hbar=hbar,
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from None

    return Scenario(
        profile=profile,
        hbar=hbar,
        states=states,
        t_start=t_start,
        t_end=t_end,
        samples=samples,
        grid_points=points,
        half_width_sigmas=sigmas,
        ode_rel_tol=ode_rel_tol,
        quadrature_tol=quadrature_tol,
        residual_dt=residual_dt,
        out_dir=out_dir,
        write_csv=write_csv,
        write_json=write_json,
    )


def _thread_count() -> int:
    raw = os.environ.get("TDHO_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ScenarioError(f"TDHO_THREADS must be an integer >= 0, got {raw!r}") from None
    if value < 0:
        raise ScenarioError(f"TDHO_THREADS must be an integer >= 0, got {raw!r}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def _map_ordered(fn, items):
    """Apply fn over items, optionally threaded, preserving order."""
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fine_union_grid(scenario: Scenario, extra=()) -> np.ndarray:
    """Scenario time grid merged with a grid fine enough for phase unwrap."""
    span = scenario.t_end - scenario.t_start
    omega_max = float(np.sqrt(np.max(scenario.profile.omega_sq(scenario.time_grid()))))
    r_max = max((s.squeeze.r for s in scenario.states), default=0.0)
    density = max(
        4 * scenario.samples,
        int(math.ceil(span * 16.0 * max(omega_max, 0.25) * math.exp(2.0 * r_max))) + 1,
    )
    fine = np.linspace(scenario.t_start, scenario.t_end, density)
    merged = np.union1d(np.union1d(fine, scenario.time_grid()), np.asarray(extra, dtype=float))
    return merged


def _base_trajectory(scenario: Scenario, extra_times=()):
    initial = wkb_mode(scenario.profile, scenario.t_start)
    path = _fine_union_grid(scenario, extra_times)
    return evolve_mode(scenario.profile, initial, path, rel_tol=scenario.ode_rel_tol)


def _indices_of(times: np.ndarray, targets: np.ndarray) -> list:
    return [int(np.argmin(np.abs(times - s))) for s in np.atleast_1d(targets)]


def _state_label(spec: StateSpec) -> dict:
    return {
        "n": spec.n,
        "alpha": {"re": spec.alpha.real, "im": spec.alpha.imag},
        "r": spec.squeeze.r,
        "phi": spec.squeeze.phi,
    }


# ---------------------------------------------------------------- commands
def _cmd_evolve(scenario: Scenario, args, outdir: Path) -> int:
    base = _base_trajectory(scenario)
    rows = _indices_of(base.t, scenario.time_grid())
    io.write_trajectory_csv(base, outdir / "trajectory_base.csv", indices=rows)
    for i, spec in enumerate(scenario.states):
        squeezed = apply_squeeze(base, spec.squeeze)
        io.write_trajectory_csv(squeezed, outdir / f"trajectory_state_{i:03d}.csv", indices=rows)
    print(f"evolve: wrote {1 + len(scenario.states)} trajectory files to {outdir}")
    return 0


def _cmd_wavefunction(scenario: Scenario, args, outdir: Path) -> int:
    index = args.state_index
    if not 0 <= index < len(scenario.states):
        raise ScenarioError(f"--state-index {index} out of range (0..{len(scenario.states) - 1})")
    t = scenario.t_start if args.t is None else args.t
    if not scenario.t_start <= t <= scenario.t_end:
        raise ScenarioError(f"--t {t} outside the scenario window")
    spec = scenario.states[index]
    base = _base_trajectory(scenario, extra_times=[t])
    squeezed = apply_squeeze(base, spec.squeeze)
    _, theta = polar_decompose(squeezed)
    k = _indices_of(squeezed.t, np.array([t]))[0]
    point = squeezed.point(k)
    x = spatial_grid(
        point,
        scenario.hbar,
        n=spec.n,
        alpha=spec.alpha,
        points=scenario.grid_points,
        half_width_sigmas=scenario.half_width_sigmas,
    )
    grid = dsn_wavefunction(spec, point, x, theta=float(theta[k]))
    grid.meta["profile_hash"] = profile_hash(scenario.profile)
    path = outdir / f"wavefunction_state_{index:03d}_t_{io.fmt(t)}.csv"
    io.write_wavefunction_csv(grid, path)
    print(f"wavefunction: wrote {path}")
    return 0


def _moment_records(scenario: Scenario, base, spec: StateSpec) -> list:
    squeezed = apply_squeeze(base, spec.squeeze)
    _, theta = polar_decompose(squeezed)
    rows = _indices_of(squeezed.t, scenario.time_grid())
    records = []
    for k in rows:
        point = squeezed.point(k)
        x = spatial_grid(
            point,
            scenario.hbar,
            n=spec.n,
            alpha=spec.alpha,
            points=scenario.grid_points,
            half_width_sigmas=scenario.half_width_sigmas,
        )
        grid = dsn_wavefunction(spec, point, x, theta=float(theta[k]))
        analytic = analytic_moments(spec, point)
        quad = quadrature_moments(grid, scenario.hbar)
        diff = max(
            abs(analytic.mean_x - quad.mean_x),
            abs(analytic.mean_p - quad.mean_p),
            abs(analytic.mean_x2 - quad.mean_x2),
            abs(analytic.mean_p2 - quad.mean_p2),
        )
        records.append(
            {
                "t": float(squeezed.t[k]),
                **_state_label(spec),
                "analytic": analytic.to_dict(),
                "quadrature": quad.to_dict(),
                "max_abs_diff": diff,
            }
        )
    return records


def _cmd_moments(scenario: Scenario, args, outdir: Path) -> int:
    base = _base_trajectory(scenario)
    groups = _map_ordered(lambda spec: _moment_records(scenario, base, spec), scenario.states)
    records = [rec for group in groups for rec in group]
    worst = max(rec["max_abs_diff"] for rec in records)
    report = {
        "profile_hash": profile_hash(scenario.profile),
        "worst_max_abs_diff": worst,
        "records": records,
    }
    if scenario.write_json:
        io.write_json(report, outdir / "moments.json")
    print(f"moments: {len(records)} records, worst analytic/quadrature gap {worst:.3e}")
    return 0


def _verify_checks(scenario: Scenario) -> list:
    checks = []

    def add(name, inputs, residual, tolerance, larger_is_fail=True):
        passed = residual <= tolerance if larger_is_fail else residual >= tolerance
        checks.append(
            {
                "check": name,
                "inputs": inputs,
                "residual": float(residual),
                "tolerance": float(tolerance),
                "passed": bool(passed),
            }
        )

    base = _base_trajectory(scenario)
    add("wronskian_drift_base", {"profile": scenario.profile.kind}, base.max_wronskian_drift, WRONSKIAN_TOL)

    time_grid = scenario.time_grid()
    probe_rows = sorted(set(_indices_of(base.t, time_grid[:: max(1, (len(time_grid) - 1) // 4)])))

    def check_state(item):
        idx, spec = item
        results = []
        squeezed = apply_squeeze(base, spec.squeeze)
        _, theta = polar_decompose(squeezed)
        results.append(
            (
                "wronskian_drift_squeezed",
                {"state": idx},
                squeezed.max_wronskian_drift,
                WRONSKIAN_TOL,
                True,
            )
        )
        for k in probe_rows:
            point = squeezed.point(k)
            x = spatial_grid(
                point,
                scenario.hbar,
                n=spec.n,
                alpha=spec.alpha,
                points=scenario.grid_points,
                half_width_sigmas=scenario.half_width_sigmas,
            )
            grid = dsn_wavefunction(spec, point, x, theta=float(theta[k]))
            t_k = float(squeezed.t[k])
            results.append(
                (
                    "normalization",
                    {"state": idx, "t": t_k},
                    abs(grid.norm_sq() - 1.0),
                    scenario.quadrature_tol,
                    True,
                )
            )
            analytic = analytic_moments(spec, point)
            quad = quadrature_moments(grid, scenario.hbar)
            gap = max(
                abs(analytic.mean_x - quad.mean_x),
                abs(analytic.mean_p - quad.mean_p),
                abs(analytic.mean_x2 - quad.mean_x2),
                abs(analytic.mean_p2 - quad.mean_p2),
            )
            results.append(
                ("moment_agreement", {"state": idx, "t": t_k}, gap, scenario.quadrature_tol, True)
            )
            floor = scenario.hbar * (spec.n + 0.5) - scenario.quadrature_tol
            results.append(
                (
                    "uncertainty_floor",
                    {"state": idx, "t": t_k},
                    quad.uncertainty_product,
                    floor,
                    False,
                )
            )
        if spec.alpha != 0:
            span = scenario.t_end - scenario.t_start
            omega_ref = max(0.25, float(np.sqrt(np.max(scenario.profile.omega_sq(time_grid)))))
            count = max(2049, int(math.ceil(span * omega_ref / 0.02)) + 1)
            uniform = np.linspace(scenario.t_start, scenario.t_end, count)
            fine = evolve_mode(
                scenario.profile, base.point(0), uniform, rel_tol=scenario.ode_rel_tol
            )
            fine_nu = apply_squeeze(fine, spec.squeeze)
            classical = classical_equation_residual(fine_nu, spec.alpha, scenario.hbar)
            results.append(
                (
                    "classical_equation",
                    {"state": idx},
                    classical["equation_residual"],
                    CLASSICAL_TOL,
                    True,
                )
            )
            results.append(
                (
                    "classical_momentum",
                    {"state": idx},
                    classical["momentum_mismatch"],
                    CLASSICAL_TOL,
                    True,
                )
            )
        t_mid = 0.5 * (scenario.t_start + scenario.t_end)
        residual = schrodinger_residual(
            spec, scenario.profile, base, t_mid, scenario.residual_dt
        )
        results.append(
            ("schrodinger_residual", {"state": idx, "t": t_mid}, residual, RESIDUAL_TOL, True)
        )
        return results

    for results in _map_ordered(check_state, list(enumerate(scenario.states))):
        for name, inputs, residual, tolerance, larger_is_fail in results:
            add(name, inputs, residual, tolerance, larger_is_fail)

    # orthogonality between states sharing a mode and a displacement
    groups: dict = {}
    for idx, spec in enumerate(scenario.states):
        key = (spec.squeeze.r, spec.squeeze.phi, spec.alpha)
        groups.setdefault(key, []).append((idx, spec))
    for key, members in groups.items():
        if len(members) < 2:
            continue
        r, phi, alpha = key
        squeezed = apply_squeeze(base, SqueezeParams(r=r, phi=phi))
        _, theta = polar_decompose(squeezed)
        k = probe_rows[len(probe_rows) // 2]
        point = squeezed.point(k)
        n_top = max(spec.n for _, spec in members)
        x = spatial_grid(
            point,
            scenario.hbar,
            n=n_top,
            alpha=alpha,
            points=scenario.grid_points,
            half_width_sigmas=scenario.half_width_sigmas,
        )
        grids = {
            idx: dsn_wavefunction(spec, point, x, theta=float(theta[k]))
            for idx, spec in members
        }
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                ia, sa = members[a]
                ib, sb = members[b]
                if sa.n == sb.n:
                    continue
                overlap = abs(inner_product(grids[ia], grids[ib]))
                add(
                    "orthogonality",
                    {"states": [ia, ib], "t": float(squeezed.t[k])},
                    overlap,
                    ORTHOGONALITY_TOL,
                )

    if scenario.profile.kind == "static" and abs(scenario.hbar - 1.0) < 1e-15:
        p = scenario.profile.params
        if abs(p["m0"] - 1.0) < 1e-15 and abs(p["omega0"] - 1.0) < 1e-15:
            for idx, spec in enumerate(scenario.states):
                t0_res = nieto_t0_identity_residuals(spec.squeeze)
                add("nieto_t0", {"state": idx}, max(t0_res.values()), NIETO_T0_TOL)
                t_probe = min(scenario.t_end, scenario.t_start + 2.0 * math.pi)
                if t_probe > 0:
                    time_res = nieto_time_identity_residuals(spec.squeeze, t_probe)
                    add(
                        "nieto_time",
                        {"state": idx, "t": t_probe},
                        max(time_res.values()),
                        NIETO_TIME_TOL,
                    )
                if scenario.t_start >= 0:
                    report = crosscheck_static(
                        spec.squeeze,
                        spec.n,
                        spec.alpha,
                        max(scenario.t_start, min(scenario.t_end, 2.0)),
                    )
                    add(
                        "pipeline_vs_closed_form",
                        {"state": idx, "t": report["t"]},
                        report["max_pointwise_diff"],
                        CROSSCHECK_TOL,
                    )
    return checks


def _cmd_verify(scenario: Scenario, args, outdir: Path) -> int:
    checks = _verify_checks(scenario)
    failed = [c for c in checks if not c["passed"]]
    report = {
        "profile_hash": profile_hash(scenario.profile),
        "checks_total": len(checks),
        "checks_failed": len(failed),
        "checks": checks,
    }
    if scenario.write_json:
        io.write_json(report, outdir / "verify.json")
    for check in checks:
        status = "pass" if check["passed"] else "FAIL"
        print(
            f"{status} {check['check']} residual={check['residual']:.3e} "
            f"tol={check['tolerance']:.3e}"
        )
    print(f"verify: {len(checks) - len(failed)}/{len(checks)} checks passed")
    return 2 if failed else 0


def _cmd_static_compare(scenario: Scenario, args, outdir: Path) -> int:
    if scenario.profile.kind != "static":
        raise ScenarioError("static-compare requires a static profile")
    p = scenario.profile.params
    if scenario.t_start < 0:
        raise ScenarioError("static-compare requires t_start >= 0")
    times = scenario.time_grid()

    def run(item):
        idx, spec = item
        return [
            crosscheck_static(
                spec.squeeze,
                spec.n,
                spec.alpha,
                float(t),
                m0=p["m0"],
                omega0=p["omega0"],
                hbar=scenario.hbar,
            )
            for t in times
        ]

    groups = _map_ordered(run, list(enumerate(scenario.states)))
    reports = [rep for group in groups for rep in group]
    worst = max(rep["max_pointwise_diff"] for rep in reports)
    summary = {
        "profile_hash": profile_hash(scenario.profile),
        "worst_max_pointwise_diff": worst,
        "cases": reports,
    }
    if scenario.write_json:
        io.write_json(summary, outdir / "static_compare.json")
    print(f"static-compare: {len(reports)} cases, worst pointwise gap {worst:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdho",
        description="Displaced and squeezed number states of a time-dependent oscillator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("evolve", "export mode trajectories as CSV"),
        ("wavefunction", "export one wave function as CSV"),
        ("moments", "analytic vs quadrature moments as JSON"),
        ("verify", "run the invariant and cross-check suite"),
        ("static-compare", "pipeline vs closed-form sweep (static profiles)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("scenario", help="path to the scenario JSON file")
        cmd.add_argument("--out", default=None, help="output directory override")
        if name == "wavefunction":
            cmd.add_argument("--state-index", type=int, default=0)
            cmd.add_argument("--t", type=float, default=None)
    return parser


_COMMANDS = {
    "evolve": _cmd_evolve,
    "wavefunction": _cmd_wavefunction,
    "moments": _cmd_moments,
    "verify": _cmd_verify,
    "static-compare": _cmd_static_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        outdir = Path(args.out) if args.out else Path(scenario.out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](scenario, args, outdir)
    except (ScenarioError, ProfileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ModeSolverError, GridError, PhaseUnwrapError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except TdhoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
