"""Command-line interface: validate, classify, run, fixtures.

Exit codes: 0 success, 1 scenario validation error, 2 runtime error.
The environment variable SAS_SIM_SEED overrides a scenario's default seed
when no --seed flag is given.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .classify import SasState
from .engine import Simulation
from .errors import InvalidConfig, SasimError, ScenarioError
from .fixtures import PROTESTANT_VARIANTS, build_fixture, fixture_names
from .population import snapshot_states
from .scenario import Scenario, emit_scenario, load_scenario

ENV_SEED = "SAS_SIM_SEED"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sasim",
        description="Deterministic simulator of social resource exchange and its scarcity/abundance/sufficiency states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="check a scenario file against the schema")
    validate.add_argument("file", help="scenario JSON file")

    classify = sub.add_parser("classify", help="one-shot state classification, no ticks")
    classify.add_argument("file", help="scenario JSON file")

    run = sub.add_parser("run", help="run a scenario and emit its report")
    run.add_argument("file", help="scenario JSON file")
    run.add_argument("--ticks", type=int, default=None, help="override the scenario tick count")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--mode", choices=["raw", "coverage"], default=None, help="classification mode")
    run.add_argument("--out", default=None, help="directory for report.json and report.csv")

    fixtures = sub.add_parser("fixtures", help="list or emit built-in scenarios")
    fixtures_sub = fixtures.add_subparsers(dest="fixtures_command", required=True)
    fixtures_sub.add_parser("list", help="list fixture names")
    emit = fixtures_sub.add_parser("emit", help="emit a fixture as scenario JSON")
    emit.add_argument("name", help="fixture name")
    emit.add_argument(
        "--variant",
        default=None,
        help=f"fixture variant (protestant: {', '.join(PROTESTANT_VARIANTS)})",
    )
    emit.add_argument(
        "--enable-rule",
        action="append",
        default=[],
        metavar="RULE_ID",
        help="enable a disabled rule (famine: food_coupons)",
    )
    emit.add_argument("--out", default=None, help="write to a file instead of stdout")
    return parser


def _print_classification(scenario: Scenario, stream) -> None:
    pop = scenario.build_population()
    snapshot = snapshot_states(
        pop,
        policy=scenario.policy,
        mode=scenario.config.mode,
        context=scenario.config.context,
        system_bands=scenario.config.system_bands,
    )
    defined = [c for c in sorted(snapshot.system, key=lambda c: c.value)
               if snapshot.system[c] is not SasState.UNDEFINED]
    print(
        "system: " + ", ".join(f"{c.value}={snapshot.system[c].value}" for c in defined),
        file=stream,
    )
    for agent_id in sorted(snapshot.agents):
        states = snapshot.agents[agent_id]
        cells = []
        for resource_class in sorted(states, key=lambda c: c.value):
            state = states[resource_class]
            if state.sas is SasState.UNDEFINED:
                continue
            e_status = "E-" if state.sas is SasState.SCARCITY else "E+"
            cells.append(f"{resource_class.value}={state.sas.value} [{state.cross.value}] {e_status}")
        line = ", ".join(cells) if cells else "(no declared requirements)"
        print(f"{agent_id}: {line}", file=stream)


def _run(scenario: Scenario, args) -> int:
    config = scenario.config
    if args.ticks is not None:
        config = replace(config, ticks=args.ticks)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    elif os.environ.get(ENV_SEED):
        config = replace(config, seed=int(os.environ[ENV_SEED]))
    if args.mode is not None:
        config = replace(config, mode=args.mode)

    report = Simulation(
        scenario.build_population(), config, scenario.policy, scenario.name
    ).run()

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
        (out_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
        conservation = "ok" if report.audit_ok else "VIOLATED"
        print(
            f"{scenario.name}: {report.ticks_run} tick(s), "
            f"E+ {report.outcome_counts['E+']}, E- {report.outcome_counts['E-']}, "
            f"conservation {conservation} -> {out_dir}/report.json"
        )
    else:
        sys.stdout.write(report.to_json())
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            load_scenario(args.file)
            print(f"{args.file}: ok")
            return 0
        if args.command == "classify":
            _print_classification(load_scenario(args.file), sys.stdout)
            return 0
        if args.command == "run":
            return _run(load_scenario(args.file), args)
        if args.command == "fixtures":
            if args.fixtures_command == "list":
                for name in fixture_names():
                    print(name)
                return 0
            try:
                scenario = build_fixture(
                    args.name, variant=args.variant, enable_rules=tuple(args.enable_rule)
                )
            except (KeyError, ValueError) as error:
                print(f"error: {error}", file=sys.stderr)
                return 1
            text = emit_scenario(scenario)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
                print(f"wrote {args.out}")
            else:
                sys.stdout.write(text)
            return 0
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ScenarioError, InvalidConfig) as error:
        print(f"validation error: {error}", file=sys.stderr)
        return 1
    except (SasimError, OSError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
