"""Command line interface.

Three subcommands: `learn` searches for a program, `gen` writes a benchmark
task to disk, `eval` scores a saved program against examples.  Progress and
diagnostics go to stderr; the only thing `learn` writes to stdout is the
solution program, so it can be piped straight into a .pl file.

Exit codes: 0 solution found / command succeeded, 2 no solution, 1 error.
"""

import argparse
import sys

from .learner import LearnOptions, learn
from .logic import make_program
from .tasks import FAMILIES, write_task
from .taskio import (
    ListInterner,
    ParseError,
    TaskError,
    evaluate,
    load_task,
    parse_bk,
    parse_exs,
    parse_program,
    print_program,
    stats_json,
)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _progress(kind, **kw):
    if kind == "size":
        print(f"% searching size {kw['k']}", file=sys.stderr)
    elif kind == "conjunction":
        print(f"% built conjunction, cost {kw['cost']}", file=sys.stderr)
    elif kind == "solution":
        print(
            f"% solution, cost {kw['cost']}, new bound {kw['bound']}",
            file=sys.stderr,
        )


def cmd_learn(args):
    task = load_task(_read(args.bias), _read(args.bk), _read(args.exs))
    options = LearnOptions(
        max_solution_size=args.max_size,
        timeout=args.timeout,
        disable_join=args.disable_join,
        allow_splittable=args.allow_splittable,
        seed=args.seed,
        on_event=_progress,
    )
    result = learn(task, options)
    if args.stats:
        print(stats_json(result.stats), file=sys.stderr)
    if result.program is None:
        print("% no solution", file=sys.stderr)
        return 2
    tag = "optimal" if result.optimal else "best within limits"
    print(f"% cost {result.cost} ({tag})", file=sys.stderr)
    sys.stdout.write(print_program(result.program))
    return 0


def cmd_gen(args):
    task = FAMILIES[args.family](
        args.k, n_train=args.train, n_test=args.test, seed=args.seed
    )
    for name, path in write_task(task, args.out).items():
        print(f"% wrote {name}: {path}", file=sys.stderr)
    return 0


def cmd_eval(args):
    rules = parse_program(_read(args.program))
    interner = ListInterner()
    bk_facts, bk_rules = parse_bk(_read(args.bk), interner)
    pos, neg = parse_exs(_read(args.exs), interner)
    for atom in interner.cells.atoms():
        bk_facts.add(*atom)
    examples = pos + neg
    if rules:
        target = examples[0][0] if examples else rules[0].head.pred
        program = make_program(rules, target)
    else:
        program = None
    print(f"{evaluate(program, bk_facts, bk_rules, pos, neg):.6f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rulejoin", description="Learn logic programs with large rules."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    learn_p = sub.add_parser("learn", help="search for a cost-optimal program")
    learn_p.add_argument("--bk", required=True, help="background knowledge file")
    learn_p.add_argument("--exs", required=True, help="examples file")
    learn_p.add_argument("--bias", required=True, help="bias declaration file")
    learn_p.add_argument("--timeout", type=float, default=None, help="seconds")
    learn_p.add_argument("--max-size", type=int, default=100, dest="max_size")
    learn_p.add_argument("--disable-join", action="store_true")
    learn_p.add_argument("--allow-splittable", action="store_true")
    learn_p.add_argument("--stats", action="store_true", help="print run stats JSON")
    learn_p.add_argument("--seed", type=int, default=None)
    learn_p.set_defaults(run=cmd_learn)

    gen_p = sub.add_parser("gen", help="generate a benchmark task")
    gen_p.add_argument("family", choices=sorted(FAMILIES))
    gen_p.add_argument("--k", type=int, required=True, help="target solution size")
    gen_p.add_argument("--train", type=int, default=None)
    gen_p.add_argument("--test", type=int, default=20)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--out", required=True, help="output directory")
    gen_p.set_defaults(run=cmd_gen)

    eval_p = sub.add_parser("eval", help="score a program on examples")
    eval_p.add_argument("--program", required=True, help="program file")
    eval_p.add_argument("--bk", required=True)
    eval_p.add_argument("--exs", required=True)
    eval_p.set_defaults(run=cmd_eval)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (ParseError, TaskError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
