"""Command line front end: solves, traces, statistics, validation.

Artifacts land under <out>/<config-hash>/ so downstream commands can verify
they consume the solve they were configured for; a run manifest per command
lists every file emitted. Reruns with the same config and seed produce
byte-identical outputs except for the manifest's wall-time entry.

Exit codes: 0 success, 2 usage, 3 invalid config, 4 missing or mismatched
solve artifacts, 5 infeasible start point.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, PursuitConfig, config_hash, load_config
from .escape import escape_rate
from .grid import FIELD_DUMP_FORMAT, Grid, build_grid, read_field_dump, visibility_stacks, write_field_dump
from .ioutil import atomic_write_json
from .simulate import sample_escape, validation_report
from .stationary import StationarySolution, solve_stationary
from .stats import batch_amc, scatter_to_csv, summary_to_json
from .timedep import TimeDependentSolution, solve_time_dependent
from .tracer import InfeasibleStartError, trace, trajectory_to_csv

EXIT_USAGE = 2
EXIT_BAD_CONFIG = 3
EXIT_MISSING_ARTIFACT = 4
EXIT_INFEASIBLE = 5

CONFIG_ENV_VAR = "CAMOPURSUIT_CONFIG"
MANIFEST_FORMAT = "run-manifest/1"
FILE_FORMATS = {
    ".json": "json",
    ".bin": FIELD_DUMP_FORMAT,
    ".csv": "csv/header-row",
}
_FORMATS_BY_COMMAND = {
    "solve-stationary": {"field-dump": FIELD_DUMP_FORMAT},
    "solve": {"field-dump": FIELD_DUMP_FORMAT, "points-json": "points-json/1"},
    "trace": {"trajectory-csv": "trajectory-csv/1"},
    "stats": {"scatter-csv": "scatter-csv/1", "summary-json": "summary-json/1"},
    "validate": {"validation-json": "validation-json/1"},
}


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _resolve_config(args) -> tuple[PursuitConfig, str]:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        raise _CliError(EXIT_USAGE, f"no config given: pass --config or set {CONFIG_ENV_VAR}")
    try:
        cfg = load_config(path)
    except FileNotFoundError:
        raise _CliError(EXIT_BAD_CONFIG, f"config file not found: {path}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise _CliError(EXIT_BAD_CONFIG, f"config file is not valid JSON: {exc}")
    return cfg, path


def _apply_threads(args) -> None:
    if args.threads is None:
        return
    if args.threads < 1:
        raise _CliError(EXIT_USAGE, "--threads must be at least 1")
    import numba

    numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))


def _artifact_dir(args, cfg: PursuitConfig) -> Path:
    adir = Path(args.out) / config_hash(cfg)
    adir.mkdir(parents=True, exist_ok=True)
    return adir


def _write_manifest(adir: Path, command: str, cfg: PursuitConfig, inputs, outputs,
                    started: float) -> Path:
    path = adir / f"manifest-{command}.json"
    atomic_write_json(path, {
        "format": MANIFEST_FORMAT,
        "command": command,
        "config_hash": config_hash(cfg),
        "inputs": [str(p) for p in inputs],
        "outputs": sorted({*(str(p) for p in outputs), path.name}),
        "file_formats": _FORMATS_BY_COMMAND[command],
        "wall_time_s": time.perf_counter() - started,
    })
    return path


def _dump(adir: Path, name: str, field, grid: Grid, cfg: PursuitConfig,
          time_index=None, t=None) -> list[str]:
    write_field_dump(adir / name, field, grid, name, config_hash(cfg),
                     time_index=time_index, time=t)
    return [f"{name}.json", f"{name}.bin"]


def _slice_names(k: int) -> tuple[str, str, str]:
    return f"u_{k:05d}", f"vx_{k:05d}", f"vy_{k:05d}"


def _read_dump(adir: Path, name: str, cfg: PursuitConfig) -> np.ndarray:
    base = adir / name
    if not base.with_suffix(".json").exists() or not base.with_suffix(".bin").exists():
        raise _CliError(EXIT_MISSING_ARTIFACT,
                        f"missing solve artifact {name} under {adir}; run `solve` first")
    header, arr = read_field_dump(base)
    if header.get("config_hash") != config_hash(cfg):
        raise _CliError(EXIT_MISSING_ARTIFACT,
                        f"artifact {name} was produced by a different config")
    return arr


def _load_solution(adir: Path, cfg: PursuitConfig) -> TimeDependentSolution:
    """Rebuild the solved fields from dumps; masks and visibility are geometry.

    Solver diagnostics (sweep cycles, residual) are not persisted, so the
    reconstructed stationary stage carries placeholders for them.
    """
    grid = build_grid(cfg)
    w = _read_dump(adir, "w", cfg)
    wvx = _read_dump(adir, "wvx", cfg)
    wvy = _read_dump(adir, "wvy", cfg)
    nt = grid.time_cells
    values = np.empty((nt + 1,) + grid.shape)
    policy = np.empty((nt + 1,) + grid.shape + (2,))
    for k in range(nt + 1):
        un, vxn, vyn = _slice_names(k)
        values[k] = _read_dump(adir, un, cfg)
        policy[k, ..., 0] = _read_dump(adir, vxn, cfg)
        policy[k, ..., 1] = _read_dump(adir, vyn, cfg)
    dist = np.linalg.norm(grid.points() - cfg.path.arrival_point, axis=-1)
    stationary = StationarySolution(
        grid=grid, values=w, policy=np.stack([wvx, wvy], axis=-1),
        domain_mask=dist <= cfg.distances.visual_range,
        trigger_mask=dist <= cfg.distances.chase_trigger,
        cycles=0, converged=True, residual=float("nan"))
    visible, ever = visibility_stacks(grid, cfg)
    return TimeDependentSolution(grid=grid, values=values, policy=policy,
                                 visible=visible, ever=ever, stationary=stationary)


def _cmd_solve_stationary(args) -> int:
    started = time.perf_counter()
    cfg, cfg_path = _resolve_config(args)
    _apply_threads(args)
    adir = _artifact_dir(args, cfg)
    grid = build_grid(cfg)
    st = solve_stationary(cfg, grid)
    outputs = _dump(adir, "w", st.values, grid, cfg)
    _write_manifest(adir, "solve-stationary", cfg, [cfg_path], outputs, started)
    print(adir)
    return 0


def _cmd_solve(args) -> int:
    started = time.perf_counter()
    cfg, cfg_path = _resolve_config(args)
    _apply_threads(args)
    adir = _artifact_dir(args, cfg)
    grid = build_grid(cfg)
    if args.slices:
        try:
            keep = sorted({int(s) for s in args.slices.split(",")})
        except ValueError:
            raise _CliError(EXIT_USAGE, f"--slices wants comma-separated integers, got {args.slices!r}")
        bad = [k for k in keep if not 0 <= k <= grid.time_cells]
        if bad:
            raise _CliError(EXIT_USAGE, f"--slices out of range 0..{grid.time_cells}: {bad}")
    else:
        keep = range(grid.time_cells + 1)
    sol = solve_time_dependent(cfg, grid)

    outputs = []
    for k in keep:
        un, vxn, vyn = _slice_names(k)
        t = float(grid.times[k])
        outputs += _dump(adir, un, sol.values[k], grid, cfg, time_index=k, t=t)
        outputs += _dump(adir, vxn, sol.policy[k, ..., 0], grid, cfg, time_index=k, t=t)
        outputs += _dump(adir, vyn, sol.policy[k, ..., 1], grid, cfg, time_index=k, t=t)
    st = sol.stationary
    outputs += _dump(adir, "w", st.values, grid, cfg)
    outputs += _dump(adir, "wvx", st.policy[..., 0], grid, cfg)
    outputs += _dump(adir, "wvy", st.policy[..., 1], grid, cfg)
    lam0 = escape_rate(grid.points(), 0.0, cfg)
    outputs += _dump(adir, "lambda0", lam0, grid, cfg, time_index=0, t=0.0)
    atomic_write_json(adir / "points.json", {
        "format": "points-json/1",
        "config_hash": config_hash(cfg),
        "focal_point": [float(v) for v in cfg.path.focal_point],
        "evader_start": [float(v) for v in cfg.path.position(0.0)],
        "arrival_point": [float(v) for v in cfg.path.arrival_point],
    })
    outputs.append("points.json")
    _write_manifest(adir, "solve", cfg, [cfg_path], outputs, started)
    print(adir)
    return 0


def _cmd_trace(args) -> int:
    started = time.perf_counter()
    cfg, cfg_path = _resolve_config(args)
    adir = _artifact_dir(args, cfg)
    sol = _load_solution(adir, cfg)
    z0 = (args.x0, args.y0)
    traj = trace(z0, sol, cfg)
    stem = f"traj_{args.x0:g}_{args.y0:g}"
    if args.escape_seed is not None:
        t_esc = sample_escape(traj, cfg, args.escape_seed)
        stem += f"_esc{args.escape_seed}"
        if t_esc is not None:
            traj = trace(z0, sol, cfg, mode="stochastic", escape_time=t_esc)
    out = adir / f"{stem}.csv"
    trajectory_to_csv(traj, out)
    _write_manifest(adir, "trace", cfg, [cfg_path, adir], [out.name], started)
    print(out)
    return 0


def _cmd_stats(args) -> int:
    started = time.perf_counter()
    cfg, cfg_path = _resolve_config(args)
    if args.n < 1:
        raise _CliError(EXIT_USAGE, "stats needs --n of at least 1")
    adir = _artifact_dir(args, cfg)
    sol = _load_solution(adir, cfg)
    summary = batch_amc(sol, cfg, n=args.n, seed=args.seed, threshold=args.threshold)
    scatter = adir / "scatter.csv"
    scatter_to_csv(summary, scatter)
    report = adir / "summary.json"
    summary_to_json(summary, report)
    _write_manifest(adir, "stats", cfg, [cfg_path, adir],
                    [scatter.name, report.name], started)
    print(report)
    return 0


def _cmd_validate(args) -> int:
    started = time.perf_counter()
    cfg, cfg_path = _resolve_config(args)
    if args.n < 2:
        raise _CliError(EXIT_USAGE, "validate needs --n of at least 2")
    adir = _artifact_dir(args, cfg)
    sol = _load_solution(adir, cfg)
    report = validation_report((args.x0, args.y0), sol, cfg, n=args.n, seed=args.seed)
    out = adir / "validation.json"
    atomic_write_json(out, report)
    _write_manifest(adir, "validate", cfg, [cfg_path, adir], [out.name], started)
    print(out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camopursuit",
        description="Energy-optimal stalking: solve, trace, and validate pursuits.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config JSON path (or set {CONFIG_ENV_VAR})")
    common.add_argument("--out", default="artifacts", help="artifact root directory")
    common.add_argument("--threads", type=int, default=None, help="solver thread cap")
    common.add_argument("--seed", type=int, default=0, help="sampling seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-stationary", parents=[common],
                       help="solve the post-arrival field and dump it")
    p.set_defaults(func=_cmd_solve_stationary)

    p = sub.add_parser("solve", parents=[common],
                       help="solve the full time-dependent fields and dump them")
    p.add_argument("--slices", help="comma-separated time indices to emit (default: all)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("trace", parents=[common],
                       help="trace one pursuit from a start point")
    p.add_argument("x0", type=float)
    p.add_argument("y0", type=float)
    p.add_argument("--escape-seed", type=int, default=None,
                   help="sample a stochastic escape with this seed")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("stats", parents=[common],
                       help="camouflage statistics over sampled starts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("validate", parents=[common],
                       help="Monte Carlo check of the solved value at a point")
    p.add_argument("x0", type=float)
    p.add_argument("y0", type=float)
    p.add_argument("--n", type=int, default=10_000)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except InfeasibleStartError as exc:
        print(f"infeasible start: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
