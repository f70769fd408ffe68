from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any

from ratsode.config import LOG_LEVEL_ENV
from ratsode.exprio import render_expr, result_to_dict
from ratsode.service import ERROR, INCONCLUSIVE, NO_RGS, SOLVED, PipelineResult, SolverService

EXIT_CODES = {SOLVED: 0, NO_RGS: 1, INCONCLUSIVE: 2, ERROR: 3}
EXIT_RESOURCE_CAP = 4


def parse_positive_int(value: Any, name: str) -> tuple[int | None, str | None]:
    if value is None:
        return None, None
    try:
        n = int(str(value).strip())
    except ValueError:
        return None, f"{name} must be an integer, got {value!r}"
    if n < 1:
        return None, f"{name} must be at least 1"
    return n, None


def parse_seed(value: Any) -> tuple[int | None, str | None]:
    if value is None:
        return None, None
    try:
        n = int(str(value).strip())
    except ValueError:
        return None, f"seed must be an integer, got {value!r}"
    if n < 0:
        return None, "seed must be non-negative"
    return n, None


def exit_code_for(result: PipelineResult) -> int:
    if result.resource_cap and result.status == INCONCLUSIVE:
        return EXIT_RESOURCE_CAP
    return EXIT_CODES.get(result.status, EXIT_CODES[ERROR])


def render_report(result: PipelineResult, show_steps: bool = False) -> str:
    data = result_to_dict(result)
    lines = [f"status:    {data['status']}"]
    if data["genus"] is not None:
        lines.append(f"genus:     {data['genus']}")
    if result.genus is not None and result.genus.samples:
        samples = ", ".join(f"z0={z0}: {g}" for z0, g in result.genus.samples)
        lines.append(f"samples:   {samples}")
    if data["riccati"] is not None:
        r = data["riccati"]
        lines.append(f"riccati:   t' = ({r['A']}) t^2 + ({r['B']}) t + ({r['C']})")
    if data["normal_r"] is not None:
        lines.append(f"normal:    v' + v^2 = {data['normal_r']}")
    if data["solution"] is not None:
        lines.append(f"solution:  w = {data['solution']}")
    lines.append(f"verified:  {'yes' if data['verified'] else 'no'}")
    lines.append(f"reason:    {data['reason']}")

    if show_steps:
        if result.parametrization is not None:
            p = result.parametrization
            lines.append(f"parametrization ({p.source}):")
            lines.append(f"  w  = {render_expr(p.r1)}")
            lines.append(f"  wp = {render_expr(p.r2)}")
        if result.chain is not None and result.chain.steps:
            lines.append("substitutions:")
            lines.extend(f"  {step}" for step in result.chain.steps)
    return "\n".join(lines)


def configure_logging() -> None:
    level = os.environ.get(LOG_LEVEL_ENV, "WARNING").strip().upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="[%(name)s] %(message)s",
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratsode",
        description="Rational general solutions of first-order algebraic ODEs F(z, w, w') = 0.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="decide and compute a rational general solution")
    solve.add_argument("file", help="problem file (equation: ..., optional param_w: / param_wp:)")
    solve.add_argument("--json", action="store_true", help="print the result as a JSON object")
    solve.add_argument("--samples", help="number of specializations for the genus test")
    solve.add_argument("--seed", help="seed for choosing specialization points")
    solve.add_argument("--no-verify", action="store_true", help="skip the final exact check")
    solve.add_argument("--show-steps", action="store_true",
                       help="print the parametrization and substitution chain")
    return parser


def main(argv: list[str] | None = None, service: SolverService | None = None) -> int:
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)

    samples, err = parse_positive_int(args.samples, "samples")
    if err:
        print(f"ratsode: {err}", file=sys.stderr)
        return EXIT_CODES[ERROR]
    seed, err = parse_seed(args.seed)
    if err:
        print(f"ratsode: {err}", file=sys.stderr)
        return EXIT_CODES[ERROR]

    svc = service or SolverService()
    result = svc.solve_file(args.file, samples=samples, seed=seed, verify=not args.no_verify)

    if args.json:
        print(json.dumps(result_to_dict(result), indent=2))
    else:
        print(render_report(result, show_steps=args.show_steps))
    return exit_code_for(result)


if __name__ == "__main__":
    sys.exit(main())
