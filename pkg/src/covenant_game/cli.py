"""Command-line front end.

Exit codes: 0 success, 1 invalid configuration or parameters, 2 solver
failure, 3 sign-table mismatch in ``statics``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import PARAM_FIELDS, ConfigError, RunConfig, load_config
from .effort import expected_utilities, manager_expected_payoff, solve_effort
from .equilibrium import EquilibriumSolution, solve_equilibrium
from .model import ErrorDensity, InfeasibleError, InvalidParamsError, ModelParams, SolverError, validate_params
from .montecarlo import analytic_reneg_freq, simulate
from .quadrature import QuadratureError
from .statics import sign_tables

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_MISMATCH = 0, 1, 2, 3
SWEEP_COLUMNS = PARAM_FIELDS + ("d1", "d0", "x_star", "corner", "unique", "p_fb", "p_star", "status")
SOLVER_ERRORS = (SolverError, InfeasibleError, QuadratureError)


def _num(v: float) -> str:
    return format(v, ".12g")


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(_num(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if hasattr(obj, "item"):
        return _rounded(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _invalid(params: ModelParams) -> int | None:
    report = validate_params(params)
    if report.ok:
        return None
    for c in report.failures():
        _err(f"validation failed: {c.name}: {c.detail}")
    return EXIT_INVALID


# -- subcommands ------------------------------------------------------------


def cmd_check(cfg: RunConfig, args) -> int:
    report = validate_params(cfg.params)
    _emit(dumps({"params": cfg.params.as_dict(), "validation": report.as_dict()}), cfg)
    for c in report.failures():
        _err(f"validation failed: {c.name}: {c.detail}")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_solve(cfg: RunConfig, args) -> int:
    if (code := _invalid(cfg.params)) is not None:
        return code
    out: dict = {"params": cfg.params.as_dict(), "density": cfg.density.describe()}
    try:
        out["equilibrium"] = solve_equilibrium(cfg.params, cfg.density).as_dict()
        out["effort"] = solve_effort(cfg.params, cfg.density).as_dict()
    except SOLVER_ERRORS as exc:
        out["error"] = str(exc)
        _emit(dumps(out), cfg)
        _err(f"solver failure: {exc}")
        return EXIT_SOLVER
    _emit(dumps(out), cfg)
    return EXIT_OK


def sweep_point(params: ModelParams, density: ErrorDensity) -> dict:
    row: dict = {name: getattr(params, name) for name in PARAM_FIELDS}
    report = validate_params(params)
    if not report.ok:
        row["status"] = "invalid: " + ";".join(c.name for c in report.failures())
        return row
    try:
        eq = solve_equilibrium(params, density)
    except SOLVER_ERRORS as exc:
        row["status"] = f"solver_error: {exc}"
        return row
    row.update(d1=eq.d1, d0=eq.d0, x_star=eq.x_star, corner=eq.corner, unique=eq.unique)
    try:
        eff = solve_effort(params, density, trace_points=0)
    except SOLVER_ERRORS as exc:
        row["status"] = f"effort_error: {exc}"
        return row
    row.update(p_fb=eff.p_fb, p_star=eff.p_star, status="ok")
    return row


def _sweep_task(task):
    return sweep_point(*task)


def sweep_grid(cfg: RunConfig) -> list[ModelParams]:
    if not cfg.sweep:
        return [cfg.params]
    axes = [axis.values() for axis in cfg.sweep]
    names = [axis.name for axis in cfg.sweep]
    return [
        replace(cfg.params, **{n: float(v) for n, v in zip(names, combo)})
        for combo in itertools.product(*axes)
    ]


def format_sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        cells = []
        for col in SWEEP_COLUMNS:
            v = row.get(col, "")
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = _num(v)
            cells.append(v)
        writer.writerow(cells)
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig, args) -> int:
    tasks = [(p, cfg.density) for p in sweep_grid(cfg)]
    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    fmt = args.format or cfg.output_format
    if fmt == "csv":
        _emit(format_sweep_csv(rows), cfg)
    else:
        _emit(dumps({"columns": list(SWEEP_COLUMNS), "rows": rows}), cfg)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    params, density = cfg.params, cfg.density
    eq = None
    if args.from_solution:
        try:
            saved = json.loads(Path(args.from_solution).read_text(encoding="utf-8"))
            params = ModelParams(**saved["params"])
            density = ErrorDensity(saved["density"]["kind"], _table(saved["density"].get("table")))
            eq = EquilibriumSolution(**saved["equilibrium"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            _err(f"{args.from_solution}: cannot read solve output: {exc}")
            return EXIT_INVALID
    if (code := _invalid(params)) is not None:
        return code
    n, seed = cfg.simulate or (1_000_000, 0)
    n = args.n if args.n is not None else n
    seed = args.seed if args.seed is not None else seed
    try:
        if eq is None:
            eq = solve_equilibrium(params, density)
        report = simulate(params, density, eq, n, seed, workers=args.workers)
        manager = manager_expected_payoff(params, density, eq, expected_utilities(params, density, eq))
        reneg = analytic_reneg_freq(params, density, eq)
    except SOLVER_ERRORS as exc:
        _err(f"solver failure: {exc}")
        return EXIT_SOLVER
    k = params.setup_cost
    out = {
        "params": params.as_dict(),
        "density": density.describe(),
        "equilibrium": eq.as_dict(),
        "report": report.as_dict(),
        "comparison": {
            "setup_cost": k,
            "lender_nondisclosure_z": report.lender_mean_nondisclosure.z(k),
            "lender_disclosure_z": report.lender_mean_disclosure.z(k),
            "manager_analytic": manager,
            "manager_z": report.manager_mean.z(manager),
            "reneg_analytic": reneg,
            "reneg_z": report.reneg_freq.z(reneg),
        },
    }
    _emit(dumps(out), cfg)
    return EXIT_OK


def _table(raw):
    return None if raw is None else tuple((float(a), float(b)) for a, b in raw)


def cmd_statics(cfg: RunConfig, args) -> int:
    if (code := _invalid(cfg.params)) is not None:
        return code
    general = cfg.density if cfg.density.kind != "uniform" else None
    try:
        tables = sign_tables(cfg.params, general, kappa_max=args.kappa_max)
    except ValueError as exc:
        _err(f"statics: {exc}")
        return EXIT_INVALID
    except SOLVER_ERRORS as exc:
        _err(f"solver failure: {exc}")
        return EXIT_SOLVER
    passed = all(t.passed for t in tables)
    _emit(dumps({"params": cfg.params.as_dict(), "tables": [t.as_dict() for t in tables], "passed": passed}), cfg)
    for t in tables:
        for name in t.mismatches():
            _err(f"mismatch: {t.target} / {name}: computed {t.rows[name]}, reference {t.expected[name]}")
    return EXIT_OK if passed else EXIT_MISMATCH


COMMANDS = {
    "check": (cmd_check, "validate parameters"),
    "solve": (cmd_solve, "solve the disclosure subgame and effort choice (JSON)"),
    "sweep": (cmd_sweep, "solve over a parameter grid (CSV or JSON)"),
    "simulate": (cmd_simulate, "Monte Carlo check of break-even pricing (JSON)"),
    "statics": (cmd_statics, "comparative-statics sign tables vs. reference (JSON)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="key = value configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
    common.add_argument("-o", "--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="output format (sweep only)")
    common.add_argument("-j", "--workers", type=int, default=1, help="worker processes")

    parser = argparse.ArgumentParser(prog="covenant-game", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if name == "simulate":
            sp.add_argument("--n", type=int, help="number of paths")
            sp.add_argument("--seed", type=int, help="random seed")
            sp.add_argument("--from-solution", help="reuse the equilibrium from a `solve` JSON file")
        if name == "statics":
            sp.add_argument("--kappa-max", type=float, default=0.05,
                            help="largest kappa treated as small (default 0.05)")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, source = None, "<config>"
        if args.config:
            source = args.config
            text = Path(args.config).read_text(encoding="utf-8")
        cfg = load_config(text, source, args.set)
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_INVALID
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_INVALID
    if args.out:
        cfg.output_path = args.out
    if args.workers < 1:
        _err("--workers must be >= 1")
        return EXIT_INVALID
    try:
        return COMMANDS[args.command][0](cfg, args)
    except InvalidParamsError as exc:
        _err(str(exc))
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
