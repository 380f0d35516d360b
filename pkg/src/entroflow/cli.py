"""Command-line front end.

Exit codes: 0 pass, 2 configuration error, 3 solver or runtime failure,
4 an inequality or validation check failed.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import decay_check, eii_estimate, integrate_mckean_vlasov, second_order_estimate
from .core.derivatives import verify_derivatives
from .core.domain import GridSpec
from .core.pointwise import grid_states, reversibility_defect, stationarity_residual
from .errors import (BoundaryTrapError, ConfigError, EntroflowError, LegendreError, ShootingError,
                     UnsupportedOperationError)
from .interpolation import convexity_report, eci_estimate, interpolation_cost, shoot, time_reversal_check
from .io import RunManifest, read_json, write_csv, write_json
from .models.config import build_system, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CHECK = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _point(text: str, system) -> np.ndarray:
    try:
        vals = np.array([float(v) for v in text.replace(" ", "").split(",") if v], dtype=float)
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}") from None
    d, chart = system.dimension, system.coords
    if vals.size == d:
        return vals
    if vals.size == chart.state_dim:
        return chart.to_state(vals)
    raise ConfigError(f"point {text!r} has {vals.size} coordinates; expected {d} or {chart.state_dim}")


def _setup(args):
    cfg = load_config(args.config)
    system = build_system(cfg)
    out = Path(args.out)
    manifest = RunManifest(cfg.source, list(sys.argv[1:]) if args.argv is None else list(args.argv),
                           cfg.tolerances, args.seed, str(out))
    return cfg, system, out, manifest


def cmd_validate(args) -> int:
    cfg, system, out, manifest = _setup(args)
    tol = cfg.tolerances
    result = {"model": system.label, "notes": []}
    deriv = verify_derivatives(system, rel_tol=tol["derivative_rel"])
    result["derivatives"] = deriv.to_json()
    ok = deriv.passed
    if system.has_entropy:
        xs = grid_states(system)
        stat = float(np.max(stationarity_residual(system, xs)))
        result["stationarity"] = {"max_residual": stat, "tol": tol["stationarity"],
                                  "passed": stat < tol["stationarity"]}
        ok &= stat < tol["stationarity"]
        defect = reversibility_defect(system)
        rev = {"defect": defect, "flagged_reversible": system.reversible}
        if system.reversible:
            rev["tol"] = tol["reversibility"]
            rev["passed"] = defect < tol["reversibility"]
            ok &= defect < tol["reversibility"]
        result["reversibility"] = rev
    else:
        result["notes"].append("no-entropy: system has no entropy; only the Hamiltonian derivatives were checked")
    result["passed"] = bool(ok)
    write_json(out / "validate.json", result, manifest)
    print(f"{system.label}: derivatives worst {max(deriv.deviations.values()):.2e} "
          f"(tol {deriv.rel_tol:g})")
    for key in ("stationarity", "reversibility"):
        if key in result:
            print(f"  {key}: {result[key]}")
    for note in result["notes"]:
        print(f"  note: {note}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_flow(args) -> int:
    _, system, out, manifest = _setup(args)
    x0 = _point(args.x0, system)
    traj = integrate_mckean_vlasov(system, x0, args.T, args.dt)
    write_csv(out / "flow.csv", traj.csv_header(), traj.csv_rows())
    print(f"wrote {len(traj)} nodes to {out / 'flow.csv'}")
    if args.kappa is None:
        return EXIT_OK
    rep = decay_check(traj, args.kappa, S_inf=args.s_inf)
    write_json(out / "decay.json", rep.to_json(), manifest)
    print(f"decay at rate {args.kappa:g}: max violation {rep.max_violation:.3e} "
          f"(tol {rep.tol:.1e}) -> {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_scan(args) -> int:
    _, system, out, manifest = _setup(args)
    grid = GridSpec.parse(args.grid, system.coords.state_dim) if args.grid else None
    if args.inequality == "eii":
        floor = 1e-6 if args.floor is None else args.floor
        rep, xs, ratio = eii_estimate(system, grid, s_floor=floor, return_points=True)
        header = [f"x_{i + 1}" for i in range(xs.shape[1])] + ["ratio"]
        rows = [[*x, r] for x, r in zip(xs, ratio)]
    elif args.inequality == "eci":
        floor = 1e-8 if args.floor is None else args.floor
        rep, ratio = eci_estimate(system, grid, lhs_floor=floor, form=args.form, return_points=True)
        g = grid if grid is not None else system.default_grid
        xs = g.states(system.domain, system.coords)
        ps = g.momenta(system.coords)
        X = np.repeat(xs, len(ps), axis=0)
        P = np.tile(ps, (len(xs), 1))
        d = xs.shape[1]
        header = [f"x_{i + 1}" for i in range(d)] + [f"p_{i + 1}" for i in range(d)] + ["ratio"]
        rows = [[*x, *p, r] for x, p, r in zip(X, P, ratio)]
    else:
        floor = 1e-8 if args.floor is None else args.floor
        rep = second_order_estimate(system, grid, i_floor=floor)
        header, rows = None, []
    payload = rep.to_json()
    passed = True
    if args.kappa is not None:
        passed = rep.kappa_estimate >= args.kappa
        payload.update({"kappa": args.kappa, "passed": passed})
    write_json(out / f"scan_{args.inequality}.json", payload, manifest)
    if header is not None:
        write_csv(out / f"scan_{args.inequality}_points.csv", header,
                  [[("" if not np.isfinite(v) else v) if i == len(r) - 1 else v for i, v in enumerate(r)]
                   for r in rows])
    print(f"{system.label}: {rep.kind} estimate {rep.kappa_estimate:.6g} at {rep.binding_point} "
          f"({rep.n_excluded} of {rep.n_grid} points excluded)")
    return EXIT_OK if passed else EXIT_CHECK


def cmd_interpolate(args) -> int:
    cfg, system, out, manifest = _setup(args)
    x0 = _point(getattr(args, "from"), system)
    xT = _point(args.to, system)
    traj = shoot(system, x0, xT, args.T, args.dt, pos_tol=cfg.tolerances["pos_tol"], seed=args.seed)
    cost = interpolation_cost(traj)
    write_csv(out / "interpolation.csv", traj.csv_header(), traj.csv_rows())
    diag = {"cost": cost, "energy_drift": traj.energy_drift, "shooting": traj.diagnostics}
    passed = True
    if system.has_entropy and np.all(system.domain.is_interior(traj.states[1:-1])) and len(traj.times) >= 3:
        diag["time_reversal"] = time_reversal_check(system, traj).to_json()
    if args.kappa is not None:
        rep = convexity_report(system, traj, args.kappa)
        write_json(out / "convexity.json", rep.to_json(), manifest)
        passed = rep.passed
        print(f"convexity at kappa={args.kappa:g}: "
              + ", ".join(f"({k}) {'pass' if rep.form_passed(k) else 'fail'}" for k in rep.forms))
    write_json(out / "diagnostics.json", diag, manifest)
    print(f"{system.label}: cost {cost:.8g}, p0 {traj.momenta[0].tolist()}, "
          f"{len(traj.diagnostics.get('solutions', []))} solution(s) found")
    return EXIT_OK if passed else EXIT_CHECK


def cmd_report(args) -> int:
    entries = []
    ok = True
    for path in args.reports:
        try:
            data = read_json(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read report {path}: {exc}") from None
        passed = data.get("passed")
        if passed is False:
            ok = False
        entries.append({"path": str(path), "passed": passed,
                        "summary": {k: v for k, v in data.items() if k not in ("manifest", "forms", "points")}})
    manifest = RunManifest(None, list(sys.argv[1:]) if args.argv is None else list(args.argv), {}, args.seed,
                           str(Path(args.out)))
    write_json(Path(args.out) / "summary.json", {"reports": entries, "passed": ok}, manifest)
    for e in entries:
        flag = {True: "PASS", False: "FAIL", None: "----"}[e["passed"]]
        print(f"{flag}  {e['path']}")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entroflow", description="Entropy decay and convexity checks for Hamiltonian systems.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check derivatives, stationarity and reversibility")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("flow", parents=[common], help="integrate the zero-cost flow")
    p.add_argument("config")
    p.add_argument("--x0", required=True, help="start point, comma separated")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--kappa", type=float, help="check entropy decay at this rate")
    p.add_argument("--s-inf", type=float, default=0.0, dest="s_inf", help="limiting entropy value")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("scan", parents=[common], help="grid estimate of an inequality constant")
    p.add_argument("config")
    p.add_argument("--inequality", choices=("eii", "eci", "second-order"), required=True)
    p.add_argument("--grid", help="axes 'lo:hi:n;...' (states first, then momenta)")
    p.add_argument("--floor", type=float)
    p.add_argument("--form", choices=("auto", "reversible", "general"), default="auto")
    p.add_argument("--kappa", type=float, help="fail when the estimate is below this value")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("interpolate", parents=[common], help="shoot between two states")
    p.add_argument("config")
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--kappa", type=float, help="also write a convexity report")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("report", parents=[common], help="aggregate JSON reports")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BoundaryTrapError, ShootingError, LegendreError, UnsupportedOperationError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except EntroflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
