"""Command line front end.

One executable, one subcommand per pipeline stage: inspect a corpus
(parse, deps, features), query the learner (predict), emit problems
(translate), and run provers at scale (reprove, experiment) or for a
single goal (advise, minimize).

Exit codes: 0 on proof or normal completion, 1 when a proving command
finds no proof, 2 on usage, input, or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .corpus import (
    AccessRelation,
    Corpus,
    ParseError,
    PrintError,
    Signature,
    UnknownTheorem,
    load_corpus,
    parse_goal,
    parse_tt,
    print_tt,
)
from .features import extract
from .fof import TranslateError
from .harness import (
    DEFAULT_K,
    DEFAULT_TIMEOUT,
    NoProofFound,
    ProverConfig,
    SpawnError,
    UnsatCore,
    build_problem,
    builtin_config,
    conjunct_premises,
    default_provers,
    load_prover_configs,
    minimize_core,
    reprove,
    run_prover,
    suggest,
    experiment,
    advise,
    write_report,
)
from .hol import HolError
from .tptp import parse_problem

_USAGE_ERRORS = (
    ParseError,
    PrintError,
    UnknownTheorem,
    HolError,
    TranslateError,
    SpawnError,
    ValueError,
    OSError,
)


def _default_corpus() -> Path:
    path = Path(str(resources.files("hammerkit") / "data" / "toy"))
    if not path.is_dir():
        raise ValueError(f"bundled corpus not found at {path}")
    return path


def _load(args: argparse.Namespace) -> Corpus:
    root = Path(args.corpus) if args.corpus else _default_corpus()
    return load_corpus(root)


def _goal(args: argparse.Namespace, corpus: Corpus):
    path = Path(args.goal)
    try:
        is_file = path.is_file()
    except OSError:
        is_file = False
    text = path.read_text(encoding="utf-8") if is_file else args.goal
    return parse_goal(text, corpus.signature)


def _budgets(pairs: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise ValueError(f"--budget wants NAME=INT, not {pair!r}")
        try:
            out[name] = int(value)
        except ValueError:
            raise ValueError(f"--budget {name}: {value!r} is not an integer") from None
    return out


def _provers(args: argparse.Namespace) -> list[ProverConfig]:
    timeout = args.timeout if args.timeout is not None else DEFAULT_TIMEOUT
    named: dict[str, ProverConfig] = {}
    if getattr(args, "prover_config", None):
        for cfg in load_prover_configs(args.prover_config):
            named[cfg.name] = cfg
    if args.provers:
        configs = []
        for name in (n.strip() for n in args.provers.split(",")):
            if not name:
                continue
            if name in named:
                configs.append(named[name])
            else:
                configs.append(builtin_config(name, timeout=timeout))
    elif named:
        configs = list(named.values())
    else:
        configs = default_provers(timeout=timeout)
    if args.timeout is not None:
        configs = [replace(c, timeout=args.timeout) for c in configs]
    budgets = _budgets(args.budget or [])
    unknown = set(budgets) - {c.name for c in configs}
    if unknown:
        raise ValueError(f"--budget for provers not in use: {', '.join(sorted(unknown))}")
    return [replace(c, n_premises=budgets.get(c.name, c.n_premises)) for c in configs]


# ------------------------------------------------------------- subcommands


def _cmd_parse(args: argparse.Namespace) -> int:
    if args.files:
        sig = Signature()
        for fname in args.files:
            text = Path(fname).read_text(encoding="utf-8")
            for entry in parse_tt(text, sig):
                print(print_tt(entry))
        return 0
    corpus = _load(args)
    n_defs = sum(1 for e in corpus.theorems.values() if e.is_definition)
    n_conj = sum(len(e.conjuncts) for e in corpus.theorems.values())
    print(f"theories: {len(corpus.theories)} ({', '.join(corpus.theories)})")
    print(f"theorems: {len(corpus.theorems)} ({n_defs} definitions)")
    print(f"conjuncts: {n_conj}")
    print(f"types: {len(corpus.signature.types)}  constants: {len(corpus.signature.consts)}")
    return 0


def _cmd_deps(args: argparse.Namespace) -> int:
    corpus = _load(args)
    if args.names:
        tids = [corpus.by_name[n] if n in corpus.by_name else _unknown(n) for n in args.names]
    else:
        tids = [t for t in corpus.order() if not corpus.theorem(t).is_definition]
    for tid in tids:
        entry = corpus.theorem(tid)
        for cid, deps in zip(entry.conjunct_ids(), entry.dependencies):
            labels = sorted(corpus.conjunct_label(d) for d in deps)
            print(f"{corpus.conjunct_label(cid)}: {' '.join(labels)}".rstrip())
    return 0


def _unknown(name: str):
    raise UnknownTheorem(f"no theorem named {name}")


def _cmd_features(args: argparse.Namespace) -> int:
    corpus = _load(args)
    if args.goal:
        _, term = _goal(args, corpus)
        for feat in sorted(extract(term)):
            print(feat)
        return 0
    if args.names:
        tids = [corpus.by_name[n] if n in corpus.by_name else _unknown(n) for n in args.names]
    else:
        tids = corpus.order()
    for tid in tids:
        entry = corpus.theorem(tid)
        for cid in entry.conjunct_ids():
            feats = " ".join(sorted(extract(corpus.conjunct_statement(cid))))
            print(f"{corpus.conjunct_label(cid)}\t{feats}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    corpus = _load(args)
    _, term = _goal(args, corpus)
    relation = AccessRelation(args.relation)
    ranked = suggest(
        corpus, term, k=args.k, n_premises=args.n_premises, relation=relation
    )
    for cid, weight in ranked:
        print(f"{corpus.conjunct_label(cid)}\t{weight:.6f}")
    return 0


def _cmd_translate(args: argparse.Namespace) -> int:
    corpus = _load(args)
    if args.name:
        tid = corpus.by_name.get(args.name) or _unknown(args.name)
        entry = corpus.theorem(tid)
        union = frozenset().union(*entry.dependencies) if entry.dependencies else frozenset()
        premises = conjunct_premises(corpus, union)
        conjecture = (entry.name, entry.statement)
    else:
        if not args.goal:
            raise ValueError("translate wants a theorem NAME or --goal")
        gname, term = _goal(args, corpus)
        relation = AccessRelation(args.relation)
        ranked = suggest(
            corpus, term, k=args.k, n_premises=args.n_premises, relation=relation
        )
        premises = [
            (corpus.conjunct_label(cid), corpus.conjunct_statement(cid))
            for cid, _ in ranked
        ]
        conjecture = (gname, term)
    _, text = build_problem(corpus, premises, conjecture, args.tag_all)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_reprove(args: argparse.Namespace) -> int:
    corpus = _load(args)
    provers = _provers(args)
    report = reprove(
        corpus, provers, split=args.split, jobs=args.jobs, tag_all=args.tag_all
    )
    print(report.summary_text())
    if args.report:
        csv_path, txt_path = write_report(report, args.report)
        print(f"written: {csv_path} {txt_path}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    corpus = _load(args)
    provers = _provers(args)
    report = experiment(
        corpus,
        args.relation,
        provers,
        k=args.k,
        jobs=args.jobs,
        tag_all=args.tag_all,
        report_path=args.report,
    )
    print(report.summary_text())
    if args.report:
        print(f"written: {args.report}.csv {args.report}.txt")
    return 0


def _cmd_advise(args: argparse.Namespace) -> int:
    corpus = _load(args)
    provers = _provers(args)
    gname, term = _goal(args, corpus)
    relation = AccessRelation(args.relation)
    try:
        advice = advise(
            corpus,
            term,
            provers,
            relation=relation,
            k=args.k,
            jobs=args.jobs,
            tag_all=args.tag_all,
            goal_name=gname,
        )
    except NoProofFound as e:
        print(f"no proof: {e}")
        for r in e.results:
            print(f"  {r.prover}: {r.status} in {r.wall_time:.2f}s")
        _print_timings(e.timings or {})
        return 1
    print(f"proved by {advice.prover} ({advice.status})")
    _print_timings(advice.timings)
    print(f"premises given: {len(advice.premises)}")
    print("core:")
    for name in advice.core.premises:
        print(f"  {name}")
    return 0


def _print_timings(timings) -> None:
    if timings:
        parts = " ".join(f"{k}={v:.3f}s" for k, v in timings.items())
        print(f"timings: {parts}")


def _cmd_minimize(args: argparse.Namespace) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    problem = parse_problem(text)
    # A problem file carries no source mapping; axiom names stand for
    # themselves so every axiom is a shrinkable premise.
    problem = replace(problem, reverse={n: n for n, _ in problem.axioms})
    provers = _provers(args)
    config = provers[0]
    target = problem.conjecture[0]
    core = UnsatCore(tuple(n for n, _ in problem.axioms), False)
    result = minimize_core(problem, core, config, target=target)
    print(f"core ({len(result.premises)} of {len(problem.axioms)} axioms, "
          f"{'confirmed' if result.complete else 'unconfirmed'}):")
    for name in result.premises:
        print(f"  {name}")
    return 0 if result.complete else 1


# ------------------------------------------------------------------ parser


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hammerkit",
        description="premise selection and first-order export for HOL theorem corpora",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    corpus_opt = argparse.ArgumentParser(add_help=False)
    corpus_opt.add_argument(
        "--corpus",
        metavar="DIR",
        help="corpus directory (default: the bundled toy corpus)",
    )

    learn_opt = argparse.ArgumentParser(add_help=False)
    learn_opt.add_argument(
        "--relation",
        choices=[r.value for r in AccessRelation],
        default=AccessRelation.LOADED_THEORIES.value,
        help="accessibility relation (default: loaded)",
    )
    learn_opt.add_argument(
        "--k", type=int, default=DEFAULT_K, help="nearest neighbours (default: 40)"
    )

    prover_opt = argparse.ArgumentParser(add_help=False)
    prover_opt.add_argument(
        "--provers",
        metavar="LIST",
        help="comma-separated prover names (default: every prover found)",
    )
    prover_opt.add_argument(
        "--prover-config", metavar="FILE", help="prover definitions file"
    )
    prover_opt.add_argument(
        "--timeout", type=float, metavar="SECS", help="per-problem prover time limit"
    )
    prover_opt.add_argument(
        "--jobs", type=int, metavar="N", help="parallel prover processes"
    )
    prover_opt.add_argument(
        "--budget",
        action="append",
        metavar="NAME=INT",
        help="premise budget override per prover (repeatable)",
    )

    tag_opt = argparse.ArgumentParser(add_help=False)
    tag_opt.add_argument(
        "--tag-all",
        action="store_true",
        help="tag every term position (sound for finite types, slower)",
    )

    p = sub.add_parser(
        "parse",
        parents=[corpus_opt],
        help="validate theory files and echo them canonically",
    )
    p.add_argument("files", nargs="*", help=".tt files (default: corpus summary)")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser(
        "deps", parents=[corpus_opt], help="show recovered per-conjunct dependencies"
    )
    p.add_argument("names", nargs="*", help="theorem names (default: all)")
    p.set_defaults(func=_cmd_deps)

    p = sub.add_parser(
        "features", parents=[corpus_opt], help="show learner features"
    )
    p.add_argument("names", nargs="*", help="theorem names (default: all)")
    p.add_argument("--goal", metavar="FILE|TEXT", help="formula to featurize instead")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser(
        "predict",
        parents=[corpus_opt, learn_opt],
        help="rank premises for a goal",
    )
    p.add_argument("--goal", required=True, metavar="FILE|TEXT")
    p.add_argument(
        "-n", "--n-premises", type=int, default=32, help="list length (default: 32)"
    )
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser(
        "translate",
        parents=[corpus_opt, learn_opt, tag_opt],
        help="emit a first-order problem file",
    )
    p.add_argument(
        "name",
        nargs="?",
        help="theorem name: its exact-dependency problem (otherwise use --goal)",
    )
    p.add_argument("--goal", metavar="FILE|TEXT", help="goal with predicted premises")
    p.add_argument(
        "-n", "--n-premises", type=int, default=32, help="premise count (default: 32)"
    )
    p.add_argument("-o", "--output", metavar="FILE", help="write here instead of stdout")
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser(
        "reprove",
        parents=[corpus_opt, prover_opt, tag_opt],
        help="re-prove every theorem from its exact dependencies",
    )
    p.add_argument(
        "--split",
        choices=["unsplit", "conjuncts"],
        default="unsplit",
        help="problem granularity (default: unsplit)",
    )
    p.add_argument("--report", metavar="PATH", help="write CSV and text reports here")
    p.set_defaults(func=_cmd_reprove)

    p = sub.add_parser(
        "experiment",
        parents=[corpus_opt, learn_opt, prover_opt, tag_opt],
        help="prove everything under one accessibility relation",
    )
    p.add_argument("--report", metavar="PATH", help="write CSV and text reports here")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser(
        "advise",
        parents=[corpus_opt, learn_opt, prover_opt, tag_opt],
        help="select premises for a goal and try to prove it",
    )
    p.add_argument("--goal", required=True, metavar="FILE|TEXT")
    p.set_defaults(func=_cmd_advise)

    p = sub.add_parser(
        "minimize",
        parents=[prover_opt],
        help="shrink a problem file's axioms to a proving core",
    )
    p.add_argument("file", help="TPTP problem file")
    p.set_defaults(func=_cmd_minimize)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoProofFound as e:
        print(f"no proof: {e}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
