"""Command-line interface.

Subcommands: ``nse``, ``mcsv``, ``sigma-profile``, ``width``, ``predict``
and ``summarize``.  Sweep commands take their parameters from an optional
``--config`` file (flat ``key = value`` lines named like the fields of
:class:`~irolasso.harness.ExperimentSpec`), overridden by flags.  They
always require ``--seed``.

Exit codes: 0 success, 2 spec error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace

from . import harness
from .ensembles import RandomSource, Scaling
from .errors import NumericalError, SpecError
from .geometry import width_estimate
from .predictions import (
    ProblemDims,
    ao_nse_comparison,
    ao_saddle_numeric,
    mcsv_bound_comparison,
    mcsv_chi_rho,
    nse_gaussian,
    nse_iro,
)

EXIT_OK, EXIT_SPEC, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

# flag dest -> ExperimentSpec config key
_SWEEP_FLAGS = {
    "seed": "master_seed",
    "ensembles": "ensembles",
    "n": "n",
    "k": "k",
    "m_list": "m_list",
    "sigma_list": "sigma_list",
    "trials": "trials",
    "width_method": "width_method",
    "width_samples": "width_samples",
    "output": "output_path",
    "workers": "workers",
    "max_iters": "solver.max_iters",
    "grad_tol": "solver.grad_tol",
    "m_fractions": "m_fractions",
    "k_fractions": "k_fractions",
    "mcsv_seeds": "mcsv_seeds",
    "mcsv_restarts": "mcsv_restarts",
    "mcsv_iters": "mcsv_iters",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _sweep_args(p: argparse.ArgumentParser, mcsv: bool = False) -> None:
    p.add_argument("--seed", required=True, help="master seed (unsigned 64-bit)")
    p.add_argument("--config", help="flat key = value file with ExperimentSpec fields")
    p.add_argument("--output", "-o", help="CSV path (default: stdout)")
    p.add_argument("--ensembles", help="comma list of gaussian,iro,pdct,phadamard")
    p.add_argument("--n")
    p.add_argument("--k")
    p.add_argument("--width-method", dest="width_method",
                   help="closed_form_sparse (default), monte_carlo or log_bound")
    p.add_argument("--width-samples", dest="width_samples")
    p.add_argument("--workers")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column (breaks byte-reproducibility)")
    if mcsv:
        p.add_argument("--m-fractions", dest="m_fractions")
        p.add_argument("--k-fractions", dest="k_fractions")
        p.add_argument("--mcsv-seeds", dest="mcsv_seeds", help="empirical draws per grid point (0: bounds only)")
        p.add_argument("--mcsv-restarts", dest="mcsv_restarts")
        p.add_argument("--mcsv-iters", dest="mcsv_iters")
    else:
        p.add_argument("--m-list", dest="m_list", help="comma list of measurement counts")
        p.add_argument("--sigma-list", dest="sigma_list", help="comma list of noise levels")
        p.add_argument("--trials")
        p.add_argument("--max-iters", dest="max_iters")
        p.add_argument("--grad-tol", dest="grad_tol")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irolasso", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _sweep_args(sub.add_parser("nse", help="Monte Carlo NSE sweep over ensembles, m and sigma"))
    _sweep_args(sub.add_parser("sigma-profile", help="NSE(sigma) at one (ensemble, m)"))
    _sweep_args(sub.add_parser("mcsv", help="mCSV bounds (and empirical values) over an (m/n, k/n) grid"), mcsv=True)

    p = sub.add_parser("width", help="statistical dimension of the l1 tangent cone")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", default="closed_form_sparse",
                   choices=["closed_form_sparse", "monte_carlo", "log_bound"])
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, help="required for monte_carlo")

    p = sub.add_parser("predict", help="closed-form NSE and mCSV predictions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--omega-sq", type=float, dest="omega_sq")
    g.add_argument("--k", type=int, help="use the closed-form sparse width for this k")
    p.add_argument("--scaling", default=Scaling.ROWS_ORTHONORMAL.value, choices=[s.value for s in Scaling])

    p = sub.add_parser("summarize", help="group statistics of a trial CSV")
    p.add_argument("csv_path")
    return parser


def _spec_from_args(args) -> harness.ExperimentSpec:
    mapping = harness.load_config(args.config) if args.config else {}
    for dest, key in _SWEEP_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            mapping[key] = value
    spec = harness.spec_from_mapping(mapping)
    if args.timing:
        spec = replace(spec, record_timing=True)
    if args.command == "sigma-profile" and "sigma_list" not in mapping:
        spec = replace(spec, sigma_list=(1e-4, 1e-3, 1e-2, 1e-1, 1.0))
    return spec


def _emit_csv(rows, spec, columns) -> None:
    text = harness.write_csv(rows, spec.output_path, columns)
    if not spec.output_path:
        sys.stdout.write(text)


def _cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    if args.command == "mcsv":
        rows = harness.run_mcsv_sweep(replace(spec, output_path=None))
        _emit_csv(rows, spec, harness.MCSV_COLUMNS)
    else:
        run = harness.run_sigma_profile if args.command == "sigma-profile" else harness.run_nse_sweep
        rows = run(replace(spec, output_path=None))
        _emit_csv(rows, spec, harness.TRIAL_COLUMNS)
    return EXIT_OK


def _cmd_width(args) -> int:
    src = None
    if args.method == "monte_carlo":
        if args.seed is None:
            raise SpecError("--seed is required for the monte_carlo method")
        src = RandomSource(args.seed)
    est = width_estimate(args.n, args.k, args.method, args.samples, src)
    print(json.dumps({"n": args.n, "k": args.k, "method": est.method.value, "omega_sq": est.omega_sq,
                      "std_err": est.std_err, "samples": est.samples}))
    return EXIT_OK


def _cmd_predict(args) -> int:
    n, m = args.n, args.m
    omega_sq = args.omega_sq if args.omega_sq is not None else width_estimate(n, args.k).omega_sq
    out = {"n": n, "m": m, "omega_sq": omega_sq, "scaling": args.scaling}
    dims = ProblemDims(n, m, omega_sq, Scaling(args.scaling))
    try:
        out["nse_iro"] = nse_iro(dims)
        out["nse_gaussian"] = nse_gaussian(dims)
        out["nse_ratio"] = out["nse_iro"] / out["nse_gaussian"]
        saddle = ao_saddle_numeric(n, m, omega_sq)
        cmp_ = ao_nse_comparison(n, m, omega_sq)
        out["ao_saddle"] = {"beta_sq": saddle.beta_sq, "t": saddle.t, "value": saddle.value}
        out["ao_reconstructed_nse"] = cmp_.reconstructed
        out["ao_matches_prediction"] = cmp_.agree
    except ValueError as exc:
        out["nse_status"] = str(exc)
    omega = math.sqrt(omega_sq)
    bounds = mcsv_bound_comparison(n, m, omega)
    out["mcsv_iro_bound"] = bounds["iro_bound"]
    out["mcsv_gaussian_bound"] = bounds["gaussian_bound"]
    out["mcsv_status"] = bounds["status"]
    if bounds["status"] in ("ok", "iro_below_gaussian"):
        chi, rho = mcsv_chi_rho(n, m, omega)
        out["mcsv_chi"], out["mcsv_rho"] = chi, rho
    out = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in out.items()}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_summarize(args) -> int:
    sys.stdout.write(harness.summarize(args.csv_path))
    return EXIT_OK


_COMMANDS = {"nse": _cmd_sweep, "sigma-profile": _cmd_sweep, "mcsv": _cmd_sweep,
             "width": _cmd_width, "predict": _cmd_predict, "summarize": _cmd_summarize}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
