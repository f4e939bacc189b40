"""Command-line front door.

Subcommands:

    simulate   run a Monte Carlo plan, write CSV samples or a JSON summary
    constants  print the Normalization JSON for a law and sample size
    verify     run a named verification suite; nonzero exit on failure
    limit-cdf  tabulate a limit-law CDF on a grid

Exit codes: 0 success, 1 suite failure, 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from decimal import Decimal, InvalidOperation

import numpy as np

from . import __version__
from .distributions import parse_law
from .errors import DistributionError, SieveError
from .limits import LimitLaw, normalization_for
from .mc import ExperimentPlan, run_experiment, summary_dict, write_csv
from .processes import Poisson, conditional_variance, walk_functionals

THREADS_ENV = "BERNOULLI_SIEVE_THREADS"


def _positive_int(text: str) -> int:
    """Exact integer, scientific notation allowed (1e9), non-integral
    mantissas rejected."""
    try:
        value = Decimal(text)
    except InvalidOperation as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if value != value.to_integral_value() or value <= 0:
        raise argparse.ArgumentTypeError(f"need a positive integer, got {text!r}")
    return int(value)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"need a positive number, got {text!r}")
    return value


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="bernoulli-sieve",
        description="Bernoulli sieve occupancy simulation and limit-law numerics",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo plan")
    sim.add_argument("--law", required=True)
    size = sim.add_mutually_exclusive_group(required=True)
    size.add_argument("--n", type=_positive_int, help="ball count (fixed mode)")
    size.add_argument("--t", type=_positive_float, help="Poisson horizon")
    sim.add_argument(
        "--target",
        default=None,
        choices=["K_n", "I_n", "L_n", "K_t", "rho_star", "N_star", "cond_var"],
        help="replicate statistic (default K_n, or K_t with --t)",
    )
    sim.add_argument("--replicates", type=_positive_int, default=1000)
    sim.add_argument("--seed", type=_positive_int, default=1)
    sim.add_argument("--eps", type=_positive_float, default=1e-9)
    sim.add_argument("--normalize", action="store_true",
                     help="attach the regime constants (a_n, b_n)")
    sim.add_argument("--threads", type=_positive_int, default=_default_threads())
    sim.add_argument("--output", default=None, help="output path (default stdout)")
    sim.add_argument("--format", default="csv", choices=["csv", "json"])

    con = sub.add_parser("constants", help="print normalization constants")
    con.add_argument("--law", required=True)
    con.add_argument("--n", type=_positive_int, required=True)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument(
        "--suite",
        required=True,
        choices=["variance-log2", "ewens-mean", "shot-noise", "sandwich"],
    )
    ver.add_argument("--law", default="beta:1")
    ver.add_argument("--replicates", type=_positive_int, default=None)
    ver.add_argument("--seed", type=_positive_int, default=1)

    lc = sub.add_parser("limit-cdf", help="tabulate a limit-law CDF")
    lc.add_argument(
        "--kind", required=True, choices=["normal", "stable-c", "stable-d"]
    )
    lc.add_argument("--alpha", type=float, default=None)
    lc.add_argument("--lo", type=float, default=-5.0)
    lc.add_argument("--hi", type=float, default=5.0)
    lc.add_argument("--points", type=_positive_int, default=101)
    lc.add_argument("--output", default=None)
    return top


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    target = args.target or ("K_t" if args.t is not None else "K_n")
    size = args.t if args.t is not None else args.n
    if target.endswith("_n") and args.n is None:
        raise SieveError(f"target {target} needs --n")
    norm = None
    if args.normalize:
        norm = normalization_for(parse_law(args.law), int(size))
    plan = ExperimentPlan(
        law=args.law,
        target=target,
        size=float(size),
        replicates=args.replicates,
        seed=args.seed,
        eps=args.eps,
        normalization=norm,
    )
    sample = run_experiment(plan, threads=args.threads)
    if args.format == "csv":
        if args.output is None:
            write_csv(sys.stdout, sample)
        else:
            write_csv(args.output, sample)
    else:
        summary = summary_dict(plan, sample)
        summary["threads"] = args.threads
        summary["format"] = args.format
        text = json.dumps(summary, indent=2)
        if args.output is None:
            print(text)
        else:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
    return 0


def _cmd_constants(args) -> int:
    norm = normalization_for(parse_law(args.law), args.n)
    print(json.dumps(norm.to_dict(), indent=2))
    return 0


def _cmd_limit_cdf(args) -> int:
    if args.kind == "normal":
        law = LimitLaw.normal()
    elif args.kind == "stable-c":
        if args.alpha is None:
            raise SieveError("stable-c needs --alpha in (1, 2)")
        law = LimitLaw.stable_c(args.alpha)
    else:
        law = LimitLaw.stable_d()
    grid = np.linspace(args.lo, args.hi, args.points)
    lines = ["x,cdf"] + [f"{float(x)!r},{law.cdf(float(x))!r}" for x in grid]
    text = "\n".join(lines) + "\n"
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return 0


def _cmd_verify(args) -> int:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed)))
    spec = parse_law(args.law)
    ok, detail = _SUITES[args.suite](spec, rng, args.replicates)
    status = "pass" if ok else "FAIL"
    print(f"suite {args.suite} [{args.law}]: {status} ({detail})")
    return 0 if ok else 1


def _suite_variance_log2(spec, rng, replicates):
    from .distributions import moments

    reps = replicates or 3000
    t = math.exp(10.0)
    est = float(np.mean([conditional_variance(spec, t, rng) for _ in range(reps)]))
    target = math.log(2.0) / moments(spec).mu
    ok = abs(est / target - 1.0) <= 0.05
    return ok, f"estimate {est:.5f} vs (log 2)/mu = {target:.5f}"


def _suite_ewens_mean(spec, rng, replicates):
    from .mc import run_experiment as run

    if not spec.name.startswith("beta:"):
        raise SieveError("ewens-mean suite needs a beta:<theta> law")
    theta = float(spec.name.split(":")[1])
    n = 10 ** 4
    reps = replicates or 10 ** 4
    plan = ExperimentPlan(
        law=spec.name, target="K_n", size=float(n), replicates=reps, seed=11
    )
    sample = run(plan)
    oracle = float(np.sum(theta / (theta + np.arange(n))))
    se = math.sqrt(sample.variance / reps)
    ok = abs(sample.mean - oracle) <= 3.0 * se
    return ok, f"mean {sample.mean:.4f} vs Ewens {oracle:.4f} (3 SE = {3 * se:.4f})"


def _suite_shot_noise(spec, rng, replicates):
    reps = replicates or 20000
    x = 5.0
    diffs = np.empty(reps)
    for i in range(reps):
        pf = walk_functionals(spec, x, rng, r_scale=0.0)
        diffs[i] = pf.n_count - pf.m_shot
    est = float(np.mean(diffs ** 2))
    # oracle for beta:1: int_0^x (e^{-z} - e^{-2z}) dz against U = 1 + y
    target = (1.0 - math.exp(-x)) - (1.0 - math.exp(-2.0 * x)) / 2.0
    se = float(np.std(diffs ** 2, ddof=1) / math.sqrt(reps))
    ok = abs(est - target) <= 3.0 * se
    return ok, f"E(N-M)^2 {est:.5f} vs {target:.5f} (3 SE = {3 * se:.5f})"


def _suite_sandwich(spec, rng, replicates):
    reps = replicates or 20000
    x, y = 8.0, 2.0
    bad = 0
    for _ in range(reps):
        s = 0.0
        rho_x = 1
        rho_xy = 1
        n_x = 0
        exceed = 0
        while s <= x:
            xi, eta = spec.sample_xi_eta(rng, 64)
            for xi_i, eta_i in zip(xi, eta):
                if s + eta_i <= x:
                    n_x += 1
                if s <= x and eta_i > y:
                    exceed += 1
                s += xi_i
                if s <= x - y:
                    rho_xy += 1
                if s <= x:
                    rho_x += 1
                else:
                    break
        if not (rho_xy - exceed <= n_x <= rho_x):
            bad += 1
    return bad == 0, f"{bad} violations of the sandwich bound in {reps} paths"


_SUITES = {
    "variance-log2": _suite_variance_log2,
    "ewens-mean": _suite_ewens_mean,
    "shot-noise": _suite_shot_noise,
    "sandwich": _suite_sandwich,
}

_COMMANDS = {
    "simulate": _cmd_simulate,
    "constants": _cmd_constants,
    "verify": _cmd_verify,
    "limit-cdf": _cmd_limit_cdf,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.subcommand](args)
    except DistributionError as exc:
        # bad law strings are usage errors, same as unparseable flags
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
