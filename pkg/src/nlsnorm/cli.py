"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure,
3 inadmissible mass side or degenerate risk, 4 no synchronized state.
"""

import argparse
from importlib import resources
import json
import math
import os
import sys

import numpy as np

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INADMISSIBLE, EXIT_NO_SYNC = 0, 1, 2, 3, 4

FIGURE_P_LOW = 1.35
FIGURE_P_HIGH = {1: 5.05, 2: 5.05, 3: 5.05, 4: 5.05}
FIGURE_P_HIGH_LARGE_N = 2.3
SUBCRITICAL_GAP = 0.05


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def load_schema(name):
    text = resources.files("nlsnorm.schemas").joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def make_report(schema_name, command, config, body):
    """Assemble a report with a fixed key order and validate it."""
    import jsonschema
    report = {"schema_version": SCHEMA_VERSION, "command": command, "config": _plain(config)}
    report.update(_plain(body))
    jsonschema.validate(report, load_schema(schema_name))
    return report


def _emit(report, out):
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_matrix(text):
    """'1,3;3,2' -> [[1, 3], [3, 2]]."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.strip().split(";") if row.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse matrix {text!r}: {exc}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise UsageError(f"matrix {text!r} is not square")
    return rows


def _read_matrix(args):
    if args.matrix_file:
        try:
            with open(args.matrix_file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(str(exc)) from None
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            return parse_matrix(text.replace("\n", ";"))
    if args.matrix:
        return parse_matrix(args.matrix)
    raise UsageError("give --matrix or --matrix-file")


def cmd_ground(args):
    from .radial import check_exponent, ode_residual, shoot_ground_state
    check_exponent(args.N, args.p)
    gs = shoot_ground_state(args.N, args.p, tol=args.tol)
    config = {"N": args.N, "p": args.p, "tol": args.tol}
    body = {"u0": gs.u0, "gamma": gs.gamma, "gamma_tilde": gs.gamma_tilde,
            "r_max": gs.grid.r_max, "residual": np.max(ode_residual(gs))}
    body = {k: float(v) for k, v in body.items()}
    if args.json:
        _emit(make_report("ground", "ground", config, body), args.out)
    else:
        lines = [f"# ground N={args.N} p={args.p!r} tol={args.tol!r}"]
        lines += [f"{k}\t{v!r}" for k, v in body.items()]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def sweep_file(out_dir, N):
    return os.path.join(out_dir, f"integ_UW_N{N}.dat")


def _run_sweep(N, p_min, p_max, n, path, workers):
    from .linearized import SweepFailure, sweep_alpha, write_sweep
    points = sweep_alpha(N, p_min, p_max, n, workers=workers)
    header = f"alpha-sweep N={N} p_min={p_min!r} p_max={p_max!r} n={n}; columns: p alpha_radial"
    write_sweep(points, path, header=header)
    return points, sum(isinstance(pt, SweepFailure) for pt in points)


def cmd_alpha_sweep(args):
    if args.n < 1:
        raise UsageError("-n must be at least 1")
    path = args.out or sweep_file(".", args.N)
    _check_writable(path)
    _, failures = _run_sweep(args.N, args.p_min, args.p_max, args.n, path, args.workers)
    return EXIT_NUMERIC if failures == args.n else EXIT_OK


def _check_writable(path):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d) or not os.access(d, os.W_OK):
        raise UsageError(f"cannot write to {path}")


def cmd_sync_check(args):
    from .synchronized import SpectrumPolicy, Verdict, check_nondegeneracy
    B = _read_matrix(args)
    policy = SpectrumPolicy(mode=args.spectrum, N=args.N)
    report = check_nondegeneracy(B, policy)
    config = {"matrix": B, "spectrum": args.spectrum, "N": args.N}
    _emit(make_report("sync_check", "sync-check", config, report.to_dict()), args.out)
    if report.verdict == Verdict.NO_SYNCHRONIZED_STATE:
        return EXIT_NO_SYNC
    if report.verdict == Verdict.DEGENERATE_RISK:
        return EXIT_INADMISSIBLE
    return EXIT_OK


def _critical_from_models(args, notes):
    """μ0, α, ΔΓ(ξ0) and τ from a coupling matrix and a potential file (N = 2)."""
    from .concentration import (build_global_potential, find_critical_point,
                                load_potential_model, mass_threshold, predict_tau_critical)
    from .linearized import compute_alpha
    from .radial import shoot_ground_state
    from .synchronized import CouplingMatrix, NoSynchronizedState, solve_sigma
    try:
        model = load_potential_model(args.potential)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if model.N != 2:
        raise UsageError("the critical regime needs potentials on R^2")
    state = solve_sigma(CouplingMatrix(_read_matrix(args)))
    if isinstance(state, NoSynchronizedState):
        return None
    gs = shoot_ground_state(2, 3.0)
    gp = build_global_potential(gs, state, model)
    cp = find_critical_point(gp, np.zeros(2))
    if not cp.nondegenerate:
        notes.append("critical point of Gamma is degenerate")
    out = {"mu0": mass_threshold(gs, state),
           "alpha_full": compute_alpha(2, 3.0, ground=gs).alpha_full,
           "delta_gamma": gp.laplacian(cp.xi0)}
    try:
        out["tau"] = list(predict_tau_critical(gp, gs, cp.xi0))
    except ValueError as exc:
        notes.append(f"tau unavailable: {exc}")
    return out


def cmd_predict(args):
    from .concentration import (predict_critical, predict_critical_gap, predict_noncritical,
                                regime_of)
    notes = []
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    if args.regime == "critical":
        derived = {}
        if args.potential:
            derived = _critical_from_models(args, notes)
            if derived is None:
                return EXIT_NO_SYNC
        mu0 = args.mu0 if args.mu0 is not None else derived.get("mu0")
        alpha = args.alpha if args.alpha is not None else derived.get("alpha_full")
        dgamma = args.delta_gamma if args.delta_gamma is not None else derived.get("delta_gamma")
        if alpha is None or dgamma is None:
            raise UsageError("critical regime needs --alpha and --delta-gamma or model files")
        if args.mu_gap is not None:
            pred = predict_critical_gap(args.mu_gap, alpha, dgamma)
        elif args.mu is not None and mu0 is not None:
            pred = predict_critical(args.mu, mu0, alpha, dgamma)
        else:
            raise UsageError("give --mu and --mu0, or --mu-gap")
        body = {"regime": "critical", "admissible": pred.admissible, "epsilon": pred.epsilon,
                "lambda": pred.lam, "reason": pred.reason}
        if mu0 is not None:
            body["mu0"] = mu0
        body.update({"alpha_full": alpha, "delta_gamma": dgamma})
        if "tau" in derived:
            body["tau"] = derived["tau"]
        body["notes"] = notes
        code = EXIT_OK if pred.admissible else EXIT_INADMISSIBLE
    else:
        if args.N not in (1, 3):
            raise UsageError("the non-critical regime is N = 1 or N = 3")
        if args.mu is None or args.mu0 is None:
            raise UsageError("give --mu and --mu0")
        try:
            eps, lam = predict_noncritical(args.N, args.mu, args.mu0)
            body = {"regime": regime_of(args.N), "admissible": True, "epsilon": eps,
                    "lambda": lam, "reason": ""}
            code = EXIT_OK
        except ValueError as exc:
            body = {"regime": regime_of(args.N), "admissible": False, "epsilon": None,
                    "lambda": None, "reason": str(exc)}
            code = EXIT_INADMISSIBLE
        body["notes"] = ["lambda = (mu0/mu)^(2/(N-2)) from inverting the mass expansion"]
    _emit(make_report("predict", "predict", config, body), args.out)
    return code


def figure_range(N):
    """Visible p-range of the figure panel for N, clipped below the Sobolev exponent."""
    from .radial import critical_exponent
    hi = FIGURE_P_HIGH.get(N, FIGURE_P_HIGH_LARGE_N)
    pc = critical_exponent(N)
    if math.isfinite(pc):
        hi = min(hi, pc - SUBCRITICAL_GAP)
    return FIGURE_P_LOW, hi


def cmd_reproduce_figure(args):
    from .linearized import compute_alpha
    os.makedirs(args.out_dir, exist_ok=True)
    _check_writable(os.path.join(args.out_dir, "summary.json"))
    dims = []
    for N in range(1, 9):
        lo, hi = figure_range(N)
        n = args.n_points if args.n_points else int(round((hi - lo) / args.p_step)) + 1
        path = sweep_file(args.out_dir, N)
        _, failures = _run_sweep(N, lo, hi, n, path, args.workers)
        pstar = 1.0 + 4.0 / N
        a = compute_alpha(N, pstar).alpha_radial
        dims.append({"N": N, "p_critical": pstar, "alpha_radial": a, "positive": a > 0,
                     "file": os.path.basename(path), "failures": failures})
    config = {"p_low": FIGURE_P_LOW, "p_step": args.p_step, "n_points": args.n_points}
    body = {"dimensions": dims, "all_positive": all(d["positive"] for d in dims)}
    _emit(make_report("figure_summary", "reproduce-figure", config, body),
          os.path.join(args.out_dir, "summary.json"))
    return EXIT_OK if body["all_positive"] else EXIT_NUMERIC


def build_parser():
    ap = _Parser(prog="nlsnorm", description="Ground states, linearized responses and"
                 " mass asymptotics for normalized Schrodinger systems.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("ground", help="shoot the radial ground state")
    g.add_argument("-N", type=int, required=True)
    g.add_argument("-p", type=float, required=True)
    g.add_argument("--tol", type=float, default=1e-10)
    g.add_argument("--json", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_ground)

    s = sub.add_parser("alpha-sweep", help="tabulate alpha_radial over a p-range")
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--p-min", type=float, required=True)
    s.add_argument("--p-max", type=float, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--out", help="output file (default ./integ_UW_N{N}.dat)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_alpha_sweep)

    c = sub.add_parser("sync-check", help="synchronized state and non-degeneracy verdict")
    c.add_argument("--matrix", help="rows separated by ';', entries by ','")
    c.add_argument("--matrix-file")
    c.add_argument("--spectrum", choices=["compute", "none"], default="compute")
    c.add_argument("-N", type=int, default=2, help="dimension for the weighted spectrum")
    c.add_argument("--out")
    c.set_defaults(func=cmd_sync_check)

    pr = sub.add_parser("predict", help="leading-order epsilon and lambda for a mass")
    pr.add_argument("--regime", choices=["noncritical", "critical"], required=True)
    pr.add_argument("-N", type=int, default=2)
    pr.add_argument("--mu", type=float)
    pr.add_argument("--mu0", type=float)
    pr.add_argument("--mu-gap", type=float, help="mu0 - mu, critical regime")
    pr.add_argument("--alpha", type=float)
    pr.add_argument("--delta-gamma", type=float)
    pr.add_argument("--potential", help="potential model file (JSON)")
    pr.add_argument("--matrix")
    pr.add_argument("--matrix-file")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_predict)

    f = sub.add_parser("reproduce-figure", help="alpha sweeps for N = 1..8 and a summary")
    f.add_argument("--out-dir", required=True)
    f.add_argument("--p-step", type=float, default=0.05)
    f.add_argument("--n-points", type=int, default=0, help="fixed count per panel")
    f.add_argument("--workers", type=int, default=1)
    f.set_defaults(func=cmd_reproduce_figure)
    return ap


def main(argv=None):
    from .linearized import ResonanceError
    from .radial import GroundStateError
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nlsnorm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nlsnorm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GroundStateError, ResonanceError, ArithmeticError, RuntimeError,
            np.linalg.LinAlgError) as exc:
        print(f"nlsnorm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"nlsnorm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
