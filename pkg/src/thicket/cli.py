"""Command-line entry point: ``thicket <subcommand> ...``.

Machine-readable results go to stdout (or ``-o``); a one-line human summary
goes to stderr. Exit status is 0 on success, 1 on validation errors and 2 when
a search cap is exceeded.
"""
from __future__ import annotations

import argparse
import math
import secrets
import sys
from pathlib import Path

from . import __version__
from .core import ConceptClass
from .dimensions import RankRegion, ldim_by_shatter, littlestone_dim, shelah_rank, thicket_shatter, vc_dim
from .errors import CapExceeded, ThicketError
from .experts import (
    ExpertPool,
    agnostic_experts,
    agnostic_regret_bound,
    finite_regret_bound,
    lower_regret_bound,
    tuned_eta,
    wm_run,
)
from .formats import dumps, read_class, read_distribution, read_schedule, read_sequence, write_csv
from .game import LEARNERS, game_value, make_learner, play_adversarial, play_random, run_game
from .noise import NoiseModel, noisy_run, random_schedule, round_robin
from .pac import pac_experiment
from .zoo import FAMILIES, dual_class, generate, growth, max_half_graph, size_params


class UsageError(ThicketError):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _seed(value):
    return secrets.randbelow(2**31) if value is None else value


def _envelope(command: str, config: dict, result: dict) -> dict:
    return {"tool": "thicket", "version": __version__, "command": command, "config": config, **result}


def _emit(args, payload: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def _params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def cmd_dim(args) -> None:
    cls = read_class(args.cls)
    wanted = {k for k in ("vc", "ldim", "rank", "game") if getattr(args, k)}
    if args.shatter is None and not wanted:
        wanted = {"vc", "ldim"}
    result = {}
    if "vc" in wanted:
        result["vc"] = vc_dim(cls)
    if "ldim" in wanted:
        result["ldim"] = littlestone_dim(cls)
    if "rank" in wanted:
        result["rank"] = shelah_rank(RankRegion.full(cls.matrix()))
    if "game" in wanted:
        result["game_value"] = game_value(cls)
    if args.shatter is not None:
        result["shatter"] = thicket_shatter(cls, args.shatter).to_json()
    config = {"class": args.cls, "measures": sorted(wanted), "shatter": args.shatter}
    _emit(args, dumps(_envelope("dim", config, result)))
    _summary(", ".join(f"{k}={v}" for k, v in result.items() if not isinstance(v, dict)) or "shatter computed")


def cmd_zoo_generate(args) -> None:
    params = _params(args.params)
    cls = generate(args.family, **params)
    _emit(args, dumps(cls.to_json()))
    _summary(f"{args.family}: {len(cls)} concepts over {cls.domain_size} points")


def cmd_zoo_growth(args) -> None:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    extra = _params(args.params)
    rows = growth(args.family, sizes, **extra)
    columns = ["size", "num_concepts", "vc", "ldim", "half_graph"]
    if args.format == "json":
        config = {"family": args.family, "sizes": sizes, "params": extra}
        _emit(args, dumps(_envelope("zoo growth", config, {"rows": rows})))
    else:
        _emit(args, write_csv(rows, columns))
    _summary(f"{args.family}: {len(rows)} sizes tabulated")


def cmd_zoo_halfgraph(args) -> None:
    cls = read_class(args.cls)
    w = max_half_graph(cls, greedy=args.greedy)
    config = {"class": args.cls, "greedy": args.greedy}
    _emit(args, dumps(_envelope("zoo halfgraph", config, {"half_graph": w.to_json()})))
    _summary(f"half-graph of size {w.size}")


def cmd_zoo_dual(args) -> None:
    cls = dual_class(read_class(args.cls))
    _emit(args, dumps(cls.to_json()))
    _summary(f"dual: {len(cls)} concepts over {cls.domain_size} points")


def cmd_play(args) -> None:
    cls = read_class(args.cls)
    # only the random learner draws coins; deterministic runs record no seed
    seed = _seed(args.seed) if args.learner == "random" else args.seed
    learner = make_learner(args.learner, seed or 0)
    adversary = args.adversary
    if adversary == "optimal":
        transcript = play_adversarial(cls, learner, args.rounds)
    elif adversary.startswith("stream:"):
        schedule = read_schedule(adversary[len("stream:"):])
        transcript = run_game(cls, args.target, schedule, learner)
    elif adversary.startswith("random:"):
        try:
            adv_seed = int(adversary[len("random:"):])
        except ValueError:
            raise UsageError("--adversary random:<seed> needs an integer seed") from None
        rounds = args.rounds if args.rounds is not None else cls.domain_size
        transcript = play_random(cls, learner, rounds, adv_seed)
    else:
        raise UsageError("--adversary must be optimal, stream:<file> or random:<seed>")
    d = littlestone_dim(cls)
    if args.format == "csv":
        _emit(args, transcript.to_csv())
    else:
        config = {
            "class": args.cls,
            "learner": args.learner,
            "adversary": adversary,
            "rounds": args.rounds,
            "target": args.target,
            "seed": seed,
        }
        result = {"ldim": d, "transcript": transcript.to_json(), "total_mistakes": transcript.total_mistakes}
        _emit(args, dumps(_envelope("play", config, result)))
    _summary(f"{args.learner} vs {adversary}: {transcript.total_mistakes} mistakes (Ldim {d})")


def cmd_experts_run(args) -> None:
    cls = read_class(args.cls)
    sequence = read_sequence(args.sequence)
    for x, _ in sequence:
        if not 0 <= x < cls.domain_size:
            raise ThicketError(f"index out of range: example {x} in sequence")
    horizon = args.horizon if args.horizon is not None else len(sequence)
    if horizon < 1:
        raise ThicketError("horizon must be at least 1")
    if len(sequence) > horizon:
        raise ThicketError(f"sequence has {len(sequence)} rounds but horizon is {horizon}")
    if args.agnostic:
        pool = agnostic_experts(cls, horizon)
    else:
        pool = ExpertPool.from_class(cls, 1.0)
    if args.eta == "auto":
        eta = tuned_eta(len(pool), horizon)
    else:
        try:
            eta = float(args.eta)
        except ValueError:
            raise UsageError("--eta must be auto or a number") from None
        if not (eta >= 0 and math.isfinite(eta)):
            raise ThicketError("--eta must be a finite non-negative number")
    pool = ExpertPool(pool.experts, eta)
    ledger = wm_run(pool, sequence, seed=args.seed)
    t = len(sequence)
    d = littlestone_dim(cls)
    class_loss = min(sum(((c >> x) & 1) != y for x, y in sequence) for c in cls.concepts)
    result = {
        "expected_loss": ledger.expected_loss,
        "best_expert_loss": ledger.best_expert_loss,
        "regret": ledger.regret,
        "experts": len(pool),
        "eta": eta,
        "horizon": horizon,
        "rounds": t,
        "round_probabilities": ledger.round_probabilities,
    }
    if args.agnostic:
        bound = agnostic_regret_bound(d, t) if t >= 1 else 0.0
        result.update(
            {
                "ldim": d,
                "best_class_loss": class_loss,
                "class_regret": ledger.expected_loss - class_loss,
                "bound": bound,
                "bound_satisfied": ledger.expected_loss - class_loss <= bound + 1e-12,
                "lower_bound_context": lower_regret_bound(d, t),
            }
        )
    else:
        bound = finite_regret_bound(len(pool), t) if t >= 1 else 0.0
        result.update({"bound": bound, "bound_satisfied": ledger.regret <= bound + 1e-12})
    if ledger.realized_predictions is not None:
        result["realized_predictions"] = ledger.realized_predictions
        result["realized_loss"] = ledger.realized_loss
    config = {
        "class": args.cls,
        "sequence": args.sequence,
        "eta": args.eta,
        "horizon": args.horizon,
        "agnostic": args.agnostic,
        "seed": args.seed,
    }
    _emit(args, dumps(_envelope("experts run", config, result)))
    _summary(f"expected loss {ledger.expected_loss:.4f}, regret {result.get('class_regret', ledger.regret):.4f}, bound {bound:.4f}")


def cmd_noisy_run(args) -> None:
    cls = read_class(args.cls)
    seed = _seed(args.seed)
    model = NoiseModel.for_class(cls, args.target, args.gamma, seed)
    if args.schedule == "roundrobin":
        schedule = round_robin(cls.domain_size, args.horizon)
    else:
        schedule = random_schedule(cls.domain_size, args.horizon, seed)
    report = noisy_run(
        cls, model, schedule, args.trials, learner=args.learner, learner_seed=args.learner_seed, jobs=args.jobs
    )
    config = {
        "class": args.cls,
        "target": args.target,
        "gamma": args.gamma,
        "horizon": args.horizon,
        "trials": args.trials,
        "seed": seed,
        "learner": args.learner,
        "learner_seed": args.learner_seed,
        "schedule": args.schedule,
    }
    _emit(args, dumps(_envelope("noisy run", config, {"report": report.to_json()})))
    if args.csv:
        rows = [{"trial": i, "disagreement": v} for i, v in enumerate(report.per_trial)]
        Path(args.csv).write_text(write_csv(rows, ["trial", "disagreement"]), encoding="utf-8")
    _summary(f"mean disagreement {report.mean_disagreement:.4f} over {report.trials} trials; bound {report.bound:.4f}")


def cmd_pac_estimate(args) -> None:
    cls = read_class(args.cls)
    seed = _seed(args.seed)
    mu = read_distribution(args.mu, cls.domain_size)
    result = pac_experiment(cls, args.target, mu, args.eps, args.delta, args.trials, seed, jobs=args.jobs)
    config = {
        "class": args.cls,
        "target": args.target,
        "mu": args.mu,
        "eps": args.eps,
        "delta": args.delta,
        "trials": args.trials,
        "seed": seed,
    }
    _emit(args, dumps(_envelope("pac estimate", config, {"result": result.to_json()})))
    _summary(f"N = {result.sample_size}: failure fraction {result.failure_fraction:.4f}, mean error {result.mean_error:.4f}")


def build_parser() -> Parser:
    parser = Parser(prog="thicket", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"thicket {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=Parser, required=True)

    def add_output(p):
        p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = sub.add_parser("dim", help="dimensions of a concept class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--vc", action="store_true")
    p.add_argument("--ldim", action="store_true")
    p.add_argument("--rank", action="store_true", help="Shelah 2-rank of the membership matrix")
    p.add_argument("--game", action="store_true", help="exact minimax mistake value")
    p.add_argument("--shatter", type=int, metavar="HEIGHT")
    add_output(p)
    p.set_defaults(func=cmd_dim)

    zoo = sub.add_parser("zoo", help="concept-class generators").add_subparsers(
        dest="zoo_command", parser_class=Parser, required=True
    )
    p = zoo.add_parser("generate")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    add_output(p)
    p.set_defaults(func=cmd_zoo_generate)
    p = zoo.add_parser("growth")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--sizes", required=True)
    p.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    add_output(p)
    p.set_defaults(func=cmd_zoo_growth)
    p = zoo.add_parser("halfgraph")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--greedy", action="store_true")
    add_output(p)
    p.set_defaults(func=cmd_zoo_halfgraph)
    p = zoo.add_parser("dual")
    p.add_argument("--class", dest="cls", required=True)
    add_output(p)
    p.set_defaults(func=cmd_zoo_dual)

    p = sub.add_parser("play", help="realizable online game")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--learner", choices=LEARNERS, default="soa")
    p.add_argument("--adversary", default="optimal", help="optimal, stream:<file> or random:<seed>")
    p.add_argument("--rounds", type=int)
    p.add_argument("--target", type=int, default=0, help="target concept for stream adversaries")
    p.add_argument("--seed", type=int, help="seed for the random learner")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_output(p)
    p.set_defaults(func=cmd_play)

    experts = sub.add_parser("experts", help="weighted majority").add_subparsers(
        dest="experts_command", parser_class=Parser, required=True
    )
    p = experts.add_parser("run")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--sequence", required=True, help="CSV with columns example,label")
    p.add_argument("--eta", default="auto")
    p.add_argument("--horizon", type=int)
    p.add_argument("--agnostic", action="store_true")
    p.add_argument("--seed", type=int, help="also sample realized predictions")
    add_output(p)
    p.set_defaults(func=cmd_experts_run)

    noisy = sub.add_parser("noisy", help="bounded stochastic noise").add_subparsers(
        dest="noisy_command", parser_class=Parser, required=True
    )
    p = noisy.add_parser("run")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--learner", choices=("map", "randomized"), default="map")
    p.add_argument("--learner-seed", type=int)
    p.add_argument("--schedule", choices=("roundrobin", "random"), default="roundrobin")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="also write per-trial disagreement counts here")
    add_output(p)
    p.set_defaults(func=cmd_noisy_run)

    pac = sub.add_parser("pac", help="PAC sample complexity").add_subparsers(
        dest="pac_command", parser_class=Parser, required=True
    )
    p = pac.add_parser("estimate")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--mu", default="uniform", help="uniform or a JSON file of probabilities")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    add_output(p)
    p.set_defaults(func=cmd_pac_estimate)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise ThicketError("--jobs must be at least 1")
        args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ThicketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)
    return 0


def main() -> None:
    sys.exit(dispatch())
