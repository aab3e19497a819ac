"""``infbin`` command line.

Exit status: 0 success, 2 usage or parse error, 3 domain error (e.g. a
move type larger than the ball count), 4 resource cap exceeded, 5 a
verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .automaton import build_automaton, greedy_sync, shortest_sync_exact, word_probability
from .config import apply_word, parse_configuration, parse_lazy, parse_word
from .coupling import build_coupling_plan, plan_length_accounting
from .errors import DomainError, InvalidParams, ParseError, ResourceCapExceeded
from .oracle import sweep_lemmas, verify_all
from .simulate import (
    DistributionSpec,
    estimate_stationary,
    run_chain,
    run_two_chain_coupling,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CAP = 4
EXIT_FAILED = 5


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise ParseError(f"expected k,l, got {text!r}")
    return vals[0], vals[1]


def _emit(obj, fmt: str, out, text_fn=None) -> None:
    if fmt == "text" and text_fn is not None:
        out.write(text_fn(obj) + "\n")
    else:
        out.write(json.dumps(obj, indent=2) + "\n")


def cmd_apply(args, out) -> int:
    word = parse_word(args.word)
    cfg_text = args.config.strip()
    config = parse_lazy(cfg_text) if cfg_text.startswith("base:") else parse_configuration(cfg_text)
    result = apply_word(config, word)
    if args.format == "json":
        out.write(json.dumps({"config": str(config), "word": str(word), "result": str(result)}) + "\n")
    else:
        out.write(str(result) + "\n")
    return EXIT_OK


def cmd_construct(args, out) -> int:
    plan = build_coupling_plan(args.k, args.l, args.N)
    obj = plan.to_json()
    if args.accounting and plan.params is not None:
        acc = plan_length_accounting(plan)
        obj["accounting"] = {
            "L_actual": acc.L_actual,
            "L_paper_formula": acc.L_paper_formula,
            "bound": acc.bound,
            "derivation_bound": acc.derivation_bound,
            "prefix_len": acc.prefix_len,
        }
    _emit(obj, args.format, out, lambda o: f"{o['word']}\nlength {o['length']} < {o['bound']}, target {o['target']}")
    return EXIT_OK


def _report_text(rep: dict) -> str:
    lines = [f"k={rep['k']} l={rep['l']} N={rep['N']} universe={rep['universe_size']} "
             f"{'PASS' if rep['passed'] else 'FAIL'}"]
    for c in rep["checks"]:
        extra = f" counterexample {c['counterexample']}" if c["counterexample"] and not c["passed"] else ""
        lines.append(f"  {'ok  ' if c['passed'] else 'FAIL'} {c['name']}{extra}")
    return "\n".join(lines)


def cmd_verify(args, out) -> int:
    report = verify_all(args.k, args.l, args.N, threads=args.threads)
    _emit(report.to_json(), args.format, out, _report_text)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_lemmas(args, out) -> int:
    if args.sweep_l_max is not None:
        reports = sweep_lemmas(args.sweep_l_max, args.sweep_l_min, threads=args.threads)
    elif args.k is not None and args.l is not None:
        reports = iter([verify_all(args.k, args.l, threads=args.threads, theorem=False)])
    else:
        raise InvalidParams("lemmas needs -k and -l, or --sweep-l-max")
    ok = True
    for rep in reports:
        ok &= rep.passed
        obj = rep.to_json()
        out.write((_report_text(obj) if args.format == "text" else json.dumps(obj)) + "\n")
        out.flush()
    return EXIT_OK if ok else EXIT_FAILED


def cmd_sync(args, out) -> int:
    aut = build_automaton(args.l, _int_list(args.alphabet), threads=args.threads)
    if args.greedy:
        res = greedy_sync(aut)
    else:
        try:
            res = shortest_sync_exact(aut, max_states=args.max_states)
        except ResourceCapExceeded as exc:
            raise ResourceCapExceeded(f"{exc} (try --greedy)") from None
    obj = res.to_json()
    if args.dist:
        dist = DistributionSpec.parse(args.dist)
        p = word_probability(res.word, dict(zip(dist.values, dist.probs)))
        obj["probability"] = p
        obj["probability_per_length"] = p / res.length if res.length else None
    _emit(obj, args.format, out, lambda o: f"{o['word']}\nlength {o['length']}, terminal {o['terminal']}, optimal {o['optimal']}")
    return EXIT_OK


def _watch(args):
    if not args.watch:
        return None
    k, l = _pair(args.watch)
    return build_coupling_plan(k, l, l)


def _run_two_chain(args, a_text, b_text, out) -> int:
    dist = DistributionSpec.parse(args.dist)
    rep = run_two_chain_coupling(
        parse_lazy(a_text), parse_lazy(b_text), dist, args.steps, args.seed,
        watch=_watch(args), depth=args.depth, replicas=args.replicas, threads=args.threads,
    )
    obj = rep.to_json()
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "tv", "uncoupledFraction"])
        for row in rep.tv_distance_series or []:
            w.writerow([row["step"], row["tv"], row["uncoupledFraction"]])
    else:
        _emit(obj, args.format, out, lambda o: (
            f"agreement of {o['projection']}-ball projections from step {o['agreementTime']}, "
            f"violations {o['violations']}, first watch end {o['firstWatchEnd']}"))
    ok = rep.persistent
    if rep.first_watch_end is not None and rep.agreement_time is not None:
        ok &= rep.agreement_time <= rep.first_watch_end
    return EXIT_OK if ok else EXIT_FAILED


def cmd_simulate(args, out) -> int:
    if args.two_chain:
        return _run_two_chain(args, args.two_chain[0], args.two_chain[1], out)
    dist = DistributionSpec.parse(args.dist)
    if args.stationary:
        est = estimate_stationary(dist, args.depth, max(args.replicas, 1), args.steps, args.seed,
                                  threads=args.threads)
        _emit(est.to_json(), "json", out)
        return EXIT_OK
    trace_every = args.trace_every
    if args.format == "csv" and not trace_every:
        trace_every = max(1, args.steps // 1000)
    rep = run_chain(parse_lazy(args.initial), dist, args.steps, args.seed, watch=_watch(args),
                    depth=args.depth, trace_every=trace_every)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "binsCreated", "topBinVector"])
        w.writerows(rep.trace)
    else:
        _emit(rep.to_json(), args.format, out, lambda o: (
            f"front speed {o['frontSpeedEstimate']} over {o['steps']} steps, "
            f"{o['regenerationCount']} regenerations"))
    return EXIT_FAILED if rep.regeneration_sound is False else EXIT_OK


def cmd_couple2(args, out) -> int:
    return _run_two_chain(args, args.initial_a, args.initial_b, out)


def _sim_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("-d", "--dist", required=True, help="det:3 | unif:2,5 | cat:2@0.3,5@0.7")
    p.add_argument("-n", "--steps", type=int, default=100_000)
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("--watch", metavar="K,L", help="watch the coupling word for (k, l)")
    p.add_argument("--depth", type=int, default=1, help="number of rightmost bins to histogram")
    p.add_argument("--replicas", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infbin", description="Infinite-bin model toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(fmt="json"):
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--format", choices=["json", "text", "csv"], default=fmt)
        c.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $INFBIN_THREADS or CPU count)")
        return c

    p = sub.add_parser("apply", parents=[common("text")], help="apply a move word to a configuration")
    p.add_argument("config", help="[2,2,1] or base:2[2,1]")
    p.add_argument("word", help='e.g. "2 5^3"')
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("construct", parents=[common()], help="build the coupling word")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-N", type=int, default=None)
    p.add_argument("--accounting", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common()], help="exhaustively verify lemmas and coupling")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-N", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemmas", parents=[common()], help="lemma checks, one pair or a sweep (JSON lines)")
    p.add_argument("-k", type=int)
    p.add_argument("-l", type=int)
    p.add_argument("--sweep-l-max", type=int)
    p.add_argument("--sweep-l-min", type=int, default=3)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("sync", parents=[common()], help="synchronizing word search")
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-a", "--alphabet", required=True, help="comma-separated move types")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--greedy", action="store_true")
    p.add_argument("--max-states", type=int, default=20)
    p.add_argument("-d", "--dist", help="report occurrence probability under this law")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("simulate", parents=[common()], help="run the Markov chain")
    _sim_options(p)
    p.add_argument("--initial", default="base:1")
    p.add_argument("--two-chain", nargs=2, metavar=("A", "B"))
    p.add_argument("--stationary", action="store_true")
    p.add_argument("--trace-every", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("couple2", parents=[common()], help="two chains on shared moves")
    p.add_argument("initial_a")
    p.add_argument("initial_b")
    _sim_options(p)
    p.set_defaults(func=cmd_couple2)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "N", "unset") is None and args.command == "construct":
        args.N = args.l
    try:
        return args.func(args, out)
    except (ParseError, InvalidParams) as exc:
        print(f"infbin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"infbin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceCapExceeded as exc:
        print(f"infbin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
