"""Command-line interface.

Commands: ``check``, ``plan``, ``verify-plan``, ``prove``,
``countermodel``, ``audit``.  Formulas are quoted command-line arguments;
models and proofs are files.  Exit status: 0 for affirmative results
(true / plan found / proof accepted / countermodel found / zero
violations), 1 for negative results, 2 for usage, file or parse errors
(diagnostics go to stderr).  ``--json`` switches the report on stdout to
a single JSON document whose fields mirror the text output.  Output is
byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .modelgen import GenConfig, find_countermodel, soundness_audit
from .models import Model, ModelFormatError, format_model, parse_model
from .planning import find_plan, verify_plan
from .proofs import (
    ProofFormatError,
    TautologyBudgetError,
    check_proof_under,
    format_verdict,
    parse_proof,
)
from .semantics import ext
from .syntax import Formula, FormulaSyntaxError, Kh, KhPlus, U, parse_formula

__all__ = ["main", "console_main"]


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_model(path: str) -> Model:
    return parse_model(_read(path))


def _emit_json(document: dict) -> None:
    json.dump(document, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _split_letters(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _is_global(phi: Formula) -> bool:
    return isinstance(phi, (Kh, KhPlus, U))


def cmd_check(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    phi = parse_formula(args.formula)
    truth = model.canonical(ext(model, phi))
    verdict: Optional[str] = None
    if _is_global(phi):
        verdict = "GLOBAL-TRUE" if len(truth) == len(model.states) else "GLOBAL-FALSE"
    if args.json:
        _emit_json(
            {
                "command": "check",
                "model": args.model,
                "formula": args.formula,
                "truth_set": list(truth),
                "global_verdict": verdict,
            }
        )
    else:
        print("TRUE AT:", " ".join(truth) if truth else "(none)")
        if verdict is not None:
            print(verdict)
    return 0 if truth else 1


def cmd_plan(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    starts = ext(model, parse_formula(args.pre))
    goals = ext(model, parse_formula(args.goal))
    result = find_plan(model, starts, goals)
    if args.json:
        _emit_json(
            {
                "command": "plan",
                "model": args.model,
                "pre": args.pre,
                "goal": args.goal,
                "found": result.decision,
                "plan": list(result.witness) if result.witness is not None else None,
                "explored": result.explored,
            }
        )
    elif result.decision:
        print("PLAN:", " ".join(result.witness) if result.witness else "(epsilon)")
    else:
        print("NO PLAN")
    return 0 if result.decision else 1


def cmd_verify_plan(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    starts = ext(model, parse_formula(args.pre))
    goals = ext(model, parse_formula(args.goal))
    check = verify_plan(model, starts, goals, tuple(args.actions))
    if args.json:
        failure = None
        if not check.ok:
            failure = {
                "kind": check.kind,
                "start": check.start,
                "step": None if check.step is None else check.step + 1,
                "action": check.action,
                "state": check.state,
            }
        _emit_json(
            {
                "command": "verify-plan",
                "model": args.model,
                "pre": args.pre,
                "goal": args.goal,
                "plan": list(args.actions),
                "ok": check.ok,
                "failure": failure,
            }
        )
    elif check.ok:
        print("OK")
    else:
        print("FAIL:", check.describe())
    return 0 if check.ok else 1


def cmd_prove(args: argparse.Namespace) -> int:
    document = parse_proof(_read(args.file))
    verdict = check_proof_under(document.proof, document.hypotheses)
    if args.json:
        _emit_json(
            {
                "command": "prove",
                "file": args.file,
                "accepted": verdict.accepted,
                "line": verdict.line,
                "reason": verdict.reason,
            }
        )
    else:
        print(format_verdict(verdict))
    return 0 if verdict.accepted else 1


def cmd_countermodel(args: argparse.Namespace) -> int:
    phi = parse_formula(args.formula)
    mode = "exhaustive" if args.exhaustive else "random"
    cfg = GenConfig(
        max_states=args.max_states,
        max_actions=args.max_actions,
        letters=_split_letters(args.letters),
        seed=args.seed,
        mode=mode,
    )
    limit = args.models
    if limit is None and mode == "random":
        limit = 10_000
    found = find_countermodel(phi, cfg, limit)
    if args.json:
        _emit_json(
            {
                "command": "countermodel",
                "formula": args.formula,
                "mode": mode,
                "found": found is not None,
                "model": format_model(found[0]) if found else None,
                "state": found[1] if found else None,
            }
        )
    elif found:
        sys.stdout.write(format_model(found[0]))
        print("FALSIFIED AT:", found[1])
    else:
        print("NONE FOUND")
    return 0 if found else 1


def cmd_audit(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        max_states=args.max_states,
        max_actions=args.max_actions,
        letters=_split_letters(args.letters),
        seed=args.seed,
        mode="exhaustive" if args.exhaustive else "random",
    )
    report = soundness_audit(cfg, args.models)
    if args.json:
        _emit_json(
            {
                "command": "audit",
                "models_checked": report.models_checked,
                "instances_checked": report.instances_checked,
                "violations": [
                    {
                        "model_number": v.model_number,
                        "schema": v.schema,
                        "assignment": dict(v.assignment),
                        "model": format_model(v.model),
                    }
                    for v in report.violations
                ],
            }
        )
    else:
        print(f"checked {report.models_checked} models, {report.instances_checked} instances")
        print(f"violations: {len(report.violations)}")
        for v in report.violations:
            binding = " ".join(f"{letter}={atom}" for letter, atom in v.assignment)
            print(f"VIOLATION model #{v.model_number} schema {v.schema} [{binding}]")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knowhow",
        description=(
            "Decide conditional knowing-how assertions over labelled transition "
            "systems, synthesize and verify plans, check proofs, and search for "
            "countermodels."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="emit a JSON document instead of text")

    p = sub.add_parser("check", help="evaluate a formula on a model")
    p.add_argument("model", help="model file")
    p.add_argument("formula", help="formula text")
    add_json(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plan", help="search for a plan from PRE-states to GOAL-states")
    p.add_argument("model", help="model file")
    p.add_argument("pre", help="precondition formula")
    p.add_argument("goal", help="goal formula")
    add_json(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify-plan", help="check a given action sequence against the definition")
    p.add_argument("model", help="model file")
    p.add_argument("pre", help="precondition formula")
    p.add_argument("goal", help="goal formula")
    p.add_argument("actions", nargs="*", help="plan actions (empty for the empty plan)")
    add_json(p)
    p.set_defaults(func=cmd_verify_plan)

    p = sub.add_parser("prove", help="check a proof file")
    p.add_argument("file", help="proof file")
    add_json(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("countermodel", help="search small models for one falsifying the formula")
    p.add_argument("formula", help="formula text")
    p.add_argument("--max-states", type=int, required=True)
    p.add_argument("--max-actions", type=int, required=True)
    p.add_argument("--letters", default="", help="comma-separated proposition letters")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--seed", type=int, default=0)
    mode.add_argument("--exhaustive", action="store_true", help="enumerate instead of sampling")
    p.add_argument("--models", type=int, default=None, help="cap on models tried (default 10000 for random)")
    add_json(p)
    p.set_defaults(func=cmd_countermodel)

    p = sub.add_parser("audit", help="evaluate the validity schemas on generated models")
    p.add_argument("--models", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=6)
    p.add_argument("--max-actions", type=int, default=3)
    p.add_argument("--letters", default="p,q,r,o")
    p.add_argument("--exhaustive", action="store_true")
    add_json(p)
    p.set_defaults(func=cmd_audit)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        FormulaSyntaxError,
        ModelFormatError,
        ProofFormatError,
        TautologyBudgetError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())
