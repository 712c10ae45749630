"""``topospeed`` command line: solvability, checks, speedup tasks and demos.

Exit codes: 0 when the analysis completed (whatever the verdict), 1 when a
demo's expected value is not reproduced, 2 on input errors, 3 when a budget
is exhausted.
"""

import argparse
import os
import sys

from .checkers import (check_edge_checkability, check_local_checkability,
                       check_t_independence, ld_to_edge_transform)
from .demos import BUILTIN_MODELS, BUILTIN_TASKS, DEMOS, builtin, ld_roundtrip
from .errors import BudgetExceeded, InputError, ParseError
from .models import serialize_model
from .protocol import ANONYMOUS, MODES, protocol_complex
from .reports import Report, emit_report
from .solver import DEFAULT_NODE_BUDGET, solve, verify_map
from .speedup import (SpeedupConfig, build_speedup_task, iterate_speedup, render_stables,
                      verify_speedup_pair)
from .tasks import parse_model_file, parse_task_file, serialize_task

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _read(path, what):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path!r}: {exc.strerror}") from None


def load_task(spec):
    """Built-in task name or path to a task file."""
    if spec in BUILTIN_TASKS:
        return builtin(BUILTIN_TASKS, spec, "task")
    if not os.path.exists(spec):
        raise InputError(f"{spec!r} is neither a built-in task ({', '.join(sorted(BUILTIN_TASKS))}) "
                         "nor an existing file")
    return parse_task_file(_read(spec, "task"))


def load_model(spec):
    """Built-in model name or path to a model file."""
    if spec in BUILTIN_MODELS:
        return builtin(BUILTIN_MODELS, spec, "model")
    if not os.path.exists(spec):
        raise InputError(f"{spec!r} is neither a built-in model "
                         f"({', '.join(sorted(BUILTIN_MODELS))}) nor an existing file")
    return parse_model_file(_read(spec, "model"))


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return value


def _non_negative(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("time limit must be positive")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="topospeed", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, task=True, model=True):
        if task:
            sp.add_argument("--task", required=True, help="built-in task name or task file")
        if model:
            sp.add_argument("--model", required=True, help="built-in model name or model file")
        sp.add_argument("--mode", choices=MODES, default=ANONYMOUS)
        sp.add_argument("--node-budget", type=_positive, default=DEFAULT_NODE_BUDGET)
        sp.add_argument("--time-limit", type=_positive_float, default=None,
                        help="seconds; results then depend on machine speed")
        sp.add_argument("--out", help="also write the report to this file")

    sp = sub.add_parser("solve", help="decide t-round solvability")
    common(sp)
    sp.add_argument("--t", type=_non_negative, required=True)
    sp.add_argument("--show-map", action="store_true")

    sp = sub.add_parser("protocol", help="dump the protocol complex P^(t)")
    common(sp)
    sp.add_argument("--t", type=_non_negative, required=True)
    sp.add_argument("--compact", action="store_true")

    sp = sub.add_parser("speedup", help="build the speedup task")
    common(sp)
    sp.add_argument("--tables", action="store_true", help="append the S-table section")
    sp.add_argument("--value-cap", type=_positive, default=3)
    sp.add_argument("--family-cap", type=_positive, default=64)

    sp = sub.add_parser("iterate", help="apply the speedup construction r times")
    common(sp)
    sp.add_argument("--r", type=_non_negative, required=True)

    sp = sub.add_parser("check-independence", help="t-independence of the input complex")
    common(sp)
    sp.add_argument("--t", type=_non_negative, required=True)
    sp.add_argument("--collect", action="store_true", help="list every failing instance")

    sp = sub.add_parser("check-checkability", help="local and edge checkability")
    common(sp)
    sp.add_argument("--kind", choices=("local", "edge", "both"), default="both")

    sp = sub.add_parser("transform-ld", help="labelled-neighbourhood transform on hypergraphs")
    common(sp)

    sp = sub.add_parser("verify-pair", help="check a task against its speedup task")
    common(sp)
    sp.add_argument("--t-max", type=_non_negative, default=1)

    sp = sub.add_parser("demo", help="worked examples with expected values")
    sp.add_argument("name", choices=sorted(DEMOS))
    sp.add_argument("--node-budget", type=_positive, default=DEFAULT_NODE_BUDGET)
    sp.add_argument("--out")
    return p


def _inputs(report, args, task=True, model=True):
    T = M = None
    if task:
        T = load_task(args.task)
        report.add_input(f"task:{args.task}", serialize_task(T))
    if model:
        M = load_model(args.model)
        report.add_input(f"model:{args.model}", serialize_model(M))
    if T is not None and M is not None and T.n != M.n:
        raise InputError(f"task has {T.n} processes but the model has {M.n}")
    report.budgets["node"] = args.node_budget
    if getattr(args, "time_limit", None):
        report.budgets["time"] = args.time_limit
    return T, M


def _stats_text(stats):
    return "\n".join(f"{k}: {stats[k]}" for k in sorted(stats))


def cmd_solve(args, rep):
    T, M = _inputs(rep, args)
    res = solve(T, M, args.t, args.mode, args.node_budget, args.time_limit)
    rep.section("statistics", _stats_text(res.stats))
    rep.set_status("solve", res.status)
    if res.delta is not None:
        vm = verify_map(res.delta, T, M, args.t, res.protocol)
        rep.set_status("certificate", "valid" if vm.valid else "INVALID")
        if args.show_map:
            rep.section("decision map", res.delta.serialize())
    return EXIT_BUDGET if res.status == "BUDGET_EXCEEDED" else EXIT_OK


def cmd_protocol(args, rep):
    T, M = _inputs(rep, args)
    P = protocol_complex(T.I, M, args.t, args.mode)
    rep.section("protocol complex", P.dump(compact=args.compact))
    rep.set_status("facets", len(P.complex.facets))
    return EXIT_OK


def cmd_speedup(args, rep):
    T, M = _inputs(rep, args)
    cfg = SpeedupConfig(value_cap=args.value_cap, family_cap=args.family_cap,
                        node_budget=args.node_budget)
    rep.budgets.update({"value_cap": cfg.value_cap, "family_cap": cfg.family_cap})
    T2 = build_speedup_task(T, M, cfg)
    rep.section("statistics", _stats_text({k: v for k, v in T2.builder.stats.items()}))
    rep.section("notes", "\n".join(T2.notes))
    rep.section("speedup task", serialize_task(T2))
    if args.tables:
        rep.section("tables", render_stables(T2))
    rep.set_status("output facets", len(T2.O.facets))
    rep.set_status("speedup", "EMPTY" if T2.empty else "BUILT")
    return EXIT_OK


def cmd_iterate(args, rep):
    T, M = _inputs(rep, args)
    _, steps = iterate_speedup(T, M, args.r, mode=args.mode)
    code = EXIT_OK
    for s in steps:
        ind = s.independence.verdict if s.independence is not None else "-"
        rep.section(f"step {s.index}", f"edge-checkable: {s.edge.verdict}\n"
                    f"independence: {ind}\nnote: {s.error if s.error else '-'}")
        if isinstance(s.error, BudgetExceeded):
            rep.set_status(f"step {s.index}", "BUDGET_EXCEEDED")
            code = EXIT_BUDGET
        else:
            rep.set_status(f"step {s.index}", f"BUILT facets={len(s.task.O.facets)}")
    rep.set_status("steps", len(steps))
    return code


def cmd_independence(args, rep):
    T, M = _inputs(rep, args)
    res = check_t_independence(T.I, M, args.t, args.mode, collect=args.collect)
    rep.section("independence", res.render())
    if args.collect:
        rep.section("failing unions", "\n".join(f["union"] for f in res.stats.get("failures", [])))
    rep.set_status("independence", res.verdict)
    return EXIT_OK


def cmd_checkability(args, rep):
    T, M = _inputs(rep, args)
    if args.kind in ("local", "both"):
        res = check_local_checkability(T, M)
        rep.section("local checkability", res.render())
        rep.set_status("local", res.verdict)
    if args.kind in ("edge", "both"):
        res = check_edge_checkability(T, M)
        rep.section("edge checkability", res.render())
        rep.set_status("edge", res.verdict)
    return EXIT_OK


def cmd_transform(args, rep):
    T, M = _inputs(rep, args)
    tr = ld_to_edge_transform(T, M)
    rep.section("transformed task", serialize_task(tr.task))
    rep.set_status("edge after", check_edge_checkability(tr.task, M).verdict)
    ok, lines = ld_roundtrip(tr)
    rep.section("forward then backward", "\n".join(lines))
    rep.set_status("round trip", "valid" if ok else "INVALID")
    return EXIT_OK


def cmd_verify_pair(args, rep):
    T, M = _inputs(rep, args)
    T2 = build_speedup_task(T, M)
    pair = verify_speedup_pair(T, T2, M, args.t_max, args.mode, args.node_budget)
    rep.section("speedup pair", pair.render())
    rep.set_status("biconditional", "HOLDS" if pair.holds else "FAILS")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "protocol": cmd_protocol,
    "speedup": cmd_speedup,
    "iterate": cmd_iterate,
    "check-independence": cmd_independence,
    "check-checkability": cmd_checkability,
    "transform-ld": cmd_transform,
    "verify-pair": cmd_verify_pair,
}


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run one analysis and return (exit code, report text)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    label = " ".join(argv if argv is not None else sys.argv[1:])
    rep = Report(label)
    try:
        if args.command == "demo":
            rep = DEMOS[args.name](args.node_budget)
            rep.budgets["node"] = args.node_budget
            code = EXIT_OK if rep.ok else EXIT_MISMATCH
        else:
            code = COMMANDS[args.command](args, rep)
    except (InputError, ParseError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT, ""
    except BudgetExceeded as exc:
        rep.section("budget exceeded", str(exc) + "\n" + _stats_text(exc.stats))
        rep.set_status("analysis", "BUDGET_EXCEEDED")
        code = EXIT_BUDGET
    text = emit_report(rep)
    stdout.write(text)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code, text


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
