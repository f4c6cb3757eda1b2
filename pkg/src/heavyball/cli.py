"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 config validation error,
3 numerical failure.  Data goes to stdout or files; diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from . import dynamics, experiments, spectrum
from .hamiltonian import PhasePoint
from .experiments import ExperimentSpec, SweepKind, make_objective
from .potentials import min_eigenvalue

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (
    spectrum.ZeroEigenvalueError,
    spectrum.NoUnstableDirectionError,
    experiments.NonMinimumConvergenceError,
    np.linalg.LinAlgError,
)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _g17(x) -> float:
    # full double precision survives the JSON round trip
    return float(f"{x:.17g}")


def _print_json(obj):
    json.dump(obj, sys.stdout, indent=2)
    print()


def _load_config(path) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required key {key!r}")
    return cfg[key]


def _objective_from_config(cfg: dict):
    obj = _require(cfg, "objective")
    kind = _require(obj, "kind")
    lam = _require(obj, "lambda")
    try:
        return make_objective(kind, lam)
    except ValueError as e:
        raise ConfigError(str(e)) from e


# ---------------------------------------------------------------------------
# subcommands

def _cmd_predict(args) -> int:
    rate = spectrum.predicted_exit_rate(args.k, args.gamma1, args.alpha)
    _print_json({"k": args.k, "gamma1": args.gamma1, "alpha": args.alpha,
                 "rate": _g17(rate)})
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    f = make_objective(args.kind, [float(v) for v in args.lam.split(",")])
    at = np.zeros(f.dim) if args.at is None \
        else np.array([float(v) for v in args.at.split(",")])
    if at.size != f.dim:
        raise ConfigError(f"--at must have {f.dim} coordinates")
    H = f.hess(at)
    spec = spectrum.saddle_eigensystem(H, args.alpha)
    gamma1 = -min_eigenvalue(H)
    out = {
        "d": spec.d,
        "k": spec.k,
        "mu0": _g17(spec.mu0),
        "gamma1": _g17(gamma1),
        "condition_number": _g17(spec.condition_number),
        "predicted_exit_rate": _g17(
            spectrum.predicted_exit_rate(spec.k, gamma1, args.alpha)),
        "blocks": [
            {"tag": b.tag.value, "lambda": _g17(b.lam),
             "mu_plus": [_g17(b.mu_plus.real), _g17(b.mu_plus.imag)],
             "mu_minus": [_g17(b.mu_minus.real), _g17(b.mu_minus.imag)]}
            for b in spec.blocks
        ],
    }
    _print_json(out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    f = _objective_from_config(cfg)
    d = f.dim
    try:
        params = dynamics.DynamicsParams(
            alpha=float(_require(cfg, "alpha")),
            epsilon=float(cfg.get("epsilon", 0.01)),
            dim=d,
            sigma1=cfg.get("sigma1"),
            sigma2=cfg.get("sigma2", 1.0),
        )
        scheme = dynamics.Scheme(cfg.get("scheme", "EulerMaruyama"))
        config = dynamics.IntegratorConfig(
            step=float(cfg.get("step", params.epsilon)),
            max_steps=int(_require(cfg, "max_steps")),
            seed=int(args.seed if args.seed is not None else cfg.get("seed", 0)),
            scheme=scheme,
        )
        init = cfg.get("initial", {})
        x0 = np.array(init.get("X", np.zeros(d)), dtype=float)
        v0 = np.array(init.get("V", np.zeros(d)), dtype=float)
        initial = PhasePoint(x0, v0)
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e
    traj = dynamics.simulate(f, initial, params, config,
                             stride=int(cfg.get("stride", 1)))
    traj.to_csv(args.output, stride=1)
    print(f"wrote {len(traj)} samples to {args.output} "
          f"(terminated by {traj.terminated_by.value})", file=sys.stderr)
    return EXIT_OK


def _spec_from_config(cfg: dict, seed_override, threads_override) -> ExperimentSpec:
    try:
        sweep_kind = SweepKind(_require(cfg, "sweep_kind"))
    except ValueError as e:
        raise ConfigError(str(e)) from e
    obj = _require(cfg, "objective")
    grid_is_epsilon = False
    if sweep_kind is SweepKind.STEPSIZE:
        if "s_grid" in cfg:
            grid = cfg["s_grid"]
        elif "epsilon_grid" in cfg:
            grid = cfg["epsilon_grid"]
            grid_is_epsilon = True
        else:
            raise ConfigError("StepsizeSweep needs s_grid or epsilon_grid")
    elif sweep_kind is SweepKind.ALPHA:
        grid = _require(cfg, "alpha_grid")
    else:
        grid = _require(cfg, "gamma1_grid")
    initial = cfg.get("initial", {})
    try:
        return ExperimentSpec(
            objective_kind=_require(obj, "kind"),
            lam=tuple(_require(obj, "lambda")),
            alpha=float(cfg.get("alpha", 1.0)),
            sweep_kind=sweep_kind,
            grid=tuple(grid),
            threshold_C=float(_require(cfg, "threshold_C")),
            trials=int(_require(cfg, "trials")),
            master_seed=int(seed_override if seed_override is not None
                            else _require(cfg, "master_seed")),
            epsilon=float(cfg.get("epsilon", 0.003)),
            grid_is_epsilon=grid_is_epsilon,
            initial_center=(tuple(initial["center"])
                            if initial.get("center") is not None else None),
            jitter_radius=float(initial.get("jitter_radius", 1e-3)),
            sigma1=cfg.get("sigma1"),
            sigma2=float(cfg.get("sigma2", 1.0)),
            max_steps=int(cfg.get("max_steps", 10_000_000)),
            threads=(threads_override if threads_override is not None
                     else cfg.get("threads")),
            saddle_chain_k=int(cfg.get("saddle_chain_k", 1)),
        )
    except (ValueError, TypeError, KeyError) as e:
        raise ConfigError(str(e)) from e


def _fit_payload(result) -> dict:
    values = [p.value for p in result.points]
    medians = [p.median_T for p in result.points]
    means = [p.mean_T for p in result.points]
    payload = {"sweep_kind": result.spec.sweep_kind.value,
               "sweep_param": result.sweep_param}
    try:
        fit = experiments.loglog_fit(values, medians)
        payload["loglog_median"] = {
            "slope": _g17(fit.slope), "intercept": _g17(fit.intercept),
            "stderr_slope": _g17(fit.stderr_slope), "r2": _g17(fit.r2),
            "n_points": fit.n_points}
        fit_mean = experiments.loglog_fit(values, means)
        payload["loglog_mean"] = {
            "slope": _g17(fit_mean.slope), "intercept": _g17(fit_mean.intercept),
            "stderr_slope": _g17(fit_mean.stderr_slope), "r2": _g17(fit_mean.r2),
            "n_points": fit_mean.n_points}
    except ValueError as e:
        payload["loglog_error"] = str(e)
    if result.spec.sweep_kind is SweepKind.STEPSIZE:
        rep = experiments.compare_to_theory(result)
        rep["predicted_rate"] = _g17(rep["predicted_rate"])
        rep["points"] = [{k: _g17(v) for k, v in row.items()}
                         for row in rep["points"]]
        payload["theory"] = rep
    return payload


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    spec = _spec_from_config(cfg, args.seed, args.threads)
    os.makedirs(args.out_dir, exist_ok=True)
    result = experiments.run_sweep(spec)
    experiments.write_trials_csv(result, os.path.join(args.out_dir, "trials.csv"))
    experiments.write_summary_csv(result, os.path.join(args.out_dir, "summary.csv"))
    payload = _fit_payload(result)
    fit_path = os.path.join(args.out_dir, "fit.json")
    fd, tmp = tempfile.mkstemp(dir=args.out_dir, prefix=".tmp_", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        json.dump(payload, fh, indent=2)
    os.replace(tmp, fit_path)
    print(f"wrote trials.csv, summary.csv, fit.json to {args.out_dir}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_fit(args) -> int:
    if not os.path.exists(args.csv):
        raise ConfigError(f"CSV not found: {args.csv}")
    with open(args.csv) as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "value" not in rows[0] or "median_T" not in rows[0]:
        raise ConfigError("expected a summary CSV with 'value' and 'median_T' columns")
    values = [float(r["value"]) for r in rows]
    medians = [float(r["median_T"]) for r in rows]
    fit = experiments.loglog_fit(values, medians)
    _print_json({"slope": _g17(fit.slope), "intercept": _g17(fit.intercept),
                 "stderr_slope": _g17(fit.stderr_slope), "r2": _g17(fit.r2),
                 "n_points": fit.n_points})
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heavyball",
                description="Stochastic heavy-ball saddle-escape toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("predict", help="print the predicted hitting-time rate constant")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--gamma1", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.set_defaults(fn=_cmd_predict)

    sp = sub.add_parser("spectrum", help="saddle eigenstructure as JSON")
    sp.add_argument("--kind", default="quadratic",
                    choices=["quadratic", "cubic_reg_quadratic"])
    sp.add_argument("--lam", required=True,
                    help="comma-separated diagonal of the quadratic part")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--at", default=None,
                    help="comma-separated saddle position (default: origin)")
    sp.set_defaults(fn=_cmd_spectrum)

    sp = sub.add_parser("simulate", help="integrate one trajectory, write CSV")
    sp.add_argument("config")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("sweep", help="run a hitting-time sweep, write CSVs + fit")
    sp.add_argument("config")
    sp.add_argument("out_dir")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(fn=_cmd_sweep)

    sp = sub.add_parser("fit", help="log-log fit of a summary CSV")
    sp.add_argument("csv")
    sp.set_defaults(fn=_cmd_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
