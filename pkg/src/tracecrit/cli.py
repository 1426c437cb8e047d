"""Command-line front end.

Every subcommand writes one report (JSON by default, ``--format csv`` for a
flat table) to ``--output`` or standard output.  Exit status is 0 on
success, 2 for invalid input and 3 for numerical failure.
"""
from __future__ import annotations

import argparse
import sys

from . import bounds, classical, io, quantum, sim
from .classical import MASS_TOL, Distribution
from .errors import ConvergenceError, ValidationError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _both(a, b):
    if isinstance(a, Distribution) and isinstance(b, Distribution):
        return "classical"
    if isinstance(a, quantum.DensityOperator) and isinstance(b, quantum.DensityOperator):
        return "quantum"
    raise ValidationError("inputs must both be distributions or both be density operators")


def _as_density(x):
    return quantum.embed_classical(x) if isinstance(x, Distribution) else x


def cmd_metrics(args):
    a = io.read_state(args.first, tol=args.tol)
    b = io.read_state(args.second, tol=args.tol)
    if _both(a, b) == "classical":
        return {
            "statistical_distance": classical.statistical_distance(a, b),
            "guessing_probability_first": classical.guessing_probability(a),
            "guessing_probability_second": classical.guessing_probability(b),
        }
    return {"trace_distance": quantum.trace_distance(a, b)}


def cmd_helstrom(args):
    a = io.read_state(args.first, tol=args.tol)
    b = io.read_state(args.second, tol=args.tol)
    kind = _both(a, b)
    rho0, rho1 = _as_density(a), _as_density(b)
    p1 = args.p1 if args.p1 is not None else 1.0 - args.p0
    d = quantum.trace_distance(rho0, rho1)
    ideal_given_ideal, ideal_given_real = quantum.equal_prior_conditionals(min(d, 1.0))
    report = {
        "p0": args.p0,
        "p1": p1,
        "helstrom_correct_probability": quantum.helstrom_correct_probability(rho0, rho1, args.p0, p1),
        "trace_distance": d,
        "equal_prior_conditionals": {
            "reading": "symmetrized decision rule at equal priors",
            "ideal_given_ideal": ideal_given_ideal,
            "ideal_given_real": ideal_given_real,
        },
    }
    if kind == "classical":
        report["ml_decision_conditionals"] = quantum.ml_decision_conditionals(a, b).to_dict()
    return report


def cmd_coupling(args):
    p = io.read_distribution(args.first, tol=args.tol)
    q = io.read_distribution(args.second, tol=args.tol)
    c = classical.maximal_coupling(p, q)
    return {
        "statistical_distance": classical.statistical_distance(p, q),
        "equality_probability": classical.equality_probability(c),
        "coupling": c.to_dict(),
    }


def cmd_mixture(args):
    p_x = io.read_distribution(args.first, tol=args.tol)
    if args.second is None:
        p_y = Distribution.uniform(p_x.n_outcomes)
    else:
        p_y = io.read_distribution(args.second, tol=args.tol)
    delta = classical.statistical_distance(p_x, p_y)
    lam = args.lam if args.lam is not None else delta
    residual = classical.mixture_residual(p_x, p_y, lam, tol=args.tol)
    if isinstance(residual, classical.Infeasible):
        res = residual.to_dict()
    else:
        res = {"feasible": True, "distribution": residual.to_dict()}
    report = {"lambda": lam, "statistical_distance": delta, "residual": res}
    if args.second is None:
        report["uniform_bounds"] = classical.uniform_mixture_bounds_check(p_x, lam).to_dict()
    return report


def cmd_extremal(args):
    dist = bounds.extremal_guessing_distribution(args.n, args.d)
    if args.dist_out:
        io.write_text(args.dist_out, io.dumps_json(dist.to_dict()))
    return {
        "n": args.n,
        "d": args.d,
        "delta": classical.statistical_distance(dist, Distribution.uniform(dist.n_outcomes)),
        "guess_prob": classical.guessing_probability(dist),
        "guessing_bound": bounds.guessing_bound(args.n, args.d).value,
    }


def cmd_kpa(args):
    m = args.m
    prefix = args.prefix if args.prefix is not None else "0" * m
    completion = args.completion if args.completion is not None else "0" * (args.n - m)
    dist = bounds.kpa_counterexample(args.n, m, prefix, completion)
    if args.dist_out:
        io.write_text(args.dist_out, io.dumps_json(dist.to_dict()))
    uniform = Distribution.uniform(dist.n_outcomes)
    special = classical.condition_on_prefix(dist, prefix)
    other_prefix = prefix[:-1] + ("1" if prefix[-1] == "0" else "0")
    other = classical.condition_on_prefix(dist, other_prefix)
    return {
        "n": args.n,
        "m": m,
        "special_prefix": prefix,
        "completion": completion,
        "delta": classical.statistical_distance(dist, uniform),
        "delta_closed_form": bounds.kpa_distance(args.n, m),
        "guess_prob": classical.guessing_probability(dist),
        "guessing_bound": bounds.guessing_bound(args.n, bounds.kpa_distance(args.n, m)).value,
        "conditional_guess_prob_special_prefix": classical.guessing_probability(special),
        "other_prefix": other_prefix,
        "conditional_delta_other_prefix": classical.statistical_distance(
            other, Distribution.uniform(other.n_outcomes)
        ),
    }


def cmd_bounds(args):
    reports = []
    if args.n is not None:
        if args.d is None:
            raise ValidationError("--n needs --d")
        reports.append(bounds.guessing_bound(args.n, args.d))
    if args.d is not None:
        reports.append(bounds.naive_ber_bound(args.d))
    if args.threshold is not None:
        average = args.average if args.average is not None else args.d
        if average is None:
            raise ValidationError("--threshold needs --average or --d")
        reports.append(bounds.markov_tail_bound(average, args.threshold))
    if args.total_bits is not None:
        if args.d is None:
            raise ValidationError("--total-bits needs --d")
        reports.append(bounds.failure_per_bit(args.d, args.total_bits, args.accumulate_bits))
    if not reports:
        raise ValidationError("nothing to compute: give at least --d")
    return [r.to_dict() for r in reports]


def _sim_config(args):
    fields = {}
    if args.config:
        data = io.load_json(args.config)
        fields.update(sim.SimConfig.from_dict(data).to_dict())
    for flag, key in (
        ("rounds", "rounds"),
        ("key_len", "key_len"),
        ("d_level", "d_level"),
        ("adversary", "adversary"),
        ("threshold", "threshold"),
        ("seed", "seed"),
    ):
        value = getattr(args, flag)
        if value is not None:
            fields[key] = value
    fields.setdefault("key_len", 100_000)
    missing = {"rounds", "d_level"} - set(fields)
    if missing:
        raise ValidationError(f"simulate: missing {', '.join('--' + m.replace('_', '-') for m in sorted(missing))}")
    return sim.SimConfig(**fields)


def cmd_simulate(args):
    config = _sim_config(args)
    if args.analytic:
        return sim.analytic_expectation(config).to_dict()
    return sim.simulate_rounds(config, workers=args.workers).to_dict()


def _bits(text):
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"not a bit string: {text!r}")
    return text


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=MASS_TOL, help="normalization tolerance for input distributions")

    parser = argparse.ArgumentParser(prog="tracecrit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("metrics", cmd_metrics, "statistical or trace distance between two inputs")
    sp.add_argument("first")
    sp.add_argument("second")

    sp = add("helstrom", cmd_helstrom, "optimal binary discrimination probability")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--p0", type=float, default=0.5, help="prior of the first hypothesis")
    sp.add_argument("--p1", type=float, default=None, help="prior of the second (default 1 - p0)")

    sp = add("coupling", cmd_coupling, "maximal coupling of two distributions")
    sp.add_argument("first")
    sp.add_argument("second")

    sp = add("mixture", cmd_mixture, "mixture residual P' with P_X = (1-lambda) P_Y + lambda P'")
    sp.add_argument("first", help="P_X")
    sp.add_argument("second", nargs="?", help="P_Y (default: uniform)")
    sp.add_argument("--lambda", dest="lam", type=float, default=None, help="mixture weight (default: delta(P_X, P_Y))")

    sp = add("extremal", cmd_extremal, "distribution attaining the guessing bound")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--dist-out", help="write the distribution here")

    sp = add("kpa", cmd_kpa, "known-prefix counterexample distribution")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--prefix", type=_bits)
    sp.add_argument("--completion", type=_bits)
    sp.add_argument("--dist-out", help="write the distribution here")

    sp = add("bounds", cmd_bounds, "scalar security bounds")
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=float)
    sp.add_argument("--average", type=float)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--total-bits", type=float)
    sp.add_argument("--accumulate-bits", type=float)

    sp = add("simulate", cmd_simulate, "multi-round leakage Monte Carlo")
    sp.add_argument("--config", help="JSON SimConfig; flags override its fields")
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--key-len", type=int)
    sp.add_argument("--d-level", type=float)
    sp.add_argument("--adversary", choices=sim.ADVERSARIES)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--analytic", action="store_true", help="closed-form expectation instead of sampling")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
        text = io.dumps_csv(report) if args.format == "csv" else io.dumps_json(report)
        if args.output:
            io.write_text(args.output, text)
        else:
            sys.stdout.write(text)
    except (ValidationError, OSError) as exc:
        print(f"tracecrit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"tracecrit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
