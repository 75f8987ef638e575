"""Command-line entry point: ``python cli.py <command> ...``.

Exit codes: 0 success or verified, 1 verified false, 2 error or inconclusive.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Callable, Sequence

import config
from autgrp import (
    Subgroup,
    conjugate_count,
    is_branch_evidence,
    is_level_transitive,
    leemann_constant,
    rigid_stabilizer,
)
from catalog import rist_generators_builtin
from clopen import leq
from errors import BglaError, PreconditionError
from lattice import phi, phi_inverse, support
from parsing import ParsedSpec, load_spec, parse_clopen, parse_oracle, parse_ray, parse_vertex, parse_word
from reports import Report, Status, error_report, format_cycles, support_report
from stone import (
    DepthSubalgebra,
    TwoValuedMap,
    homomorphism_violation,
    induced_algebra_map,
    phi_gamma,
    reconstruct_ray,
    reconstruct_vertex_map,
)
from verify import SUITES, run_suite

logger = logging.getLogger(__name__)

LOG_MAX_BYTES = 10 * 1024 * 1024
LOG_BACKUPS = 5


@dataclass(frozen=True)
class SessionConfig:
    """Settings of one CLI run; flags override the ``.env`` values."""

    spec_file: str
    depth: int
    level_cap: int
    degree_limit: int
    seed: int
    fmt: str

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise PreconditionError(f"depth bound must be >= 1, got {self.depth}")
        if self.level_cap < 1 or self.degree_limit < 1:
            raise PreconditionError("caps must be positive")
        if self.fmt not in ("text", "json"):
            raise PreconditionError(f"format must be text or json, got {self.fmt!r}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> SessionConfig:
        return cls(
            spec_file=args.spec or config.SPEC_FILE,
            depth=args.depth if args.depth is not None else config.DEPTH_BOUND,
            level_cap=args.level_cap if args.level_cap is not None else config.LEVEL_SIZE_CAP,
            degree_limit=args.degree_limit if args.degree_limit is not None else config.DEGREE_LIMIT,
            seed=args.seed if args.seed is not None else config.SEED,
            fmt=args.format or config.OUTPUT_FORMAT,
        )


def setup_logging(path: str = config.LOG_FILE, level: str = config.LOG_LEVEL) -> None:
    """Rotating file log next to the working directory."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(path, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUPS, encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    logging.basicConfig(handlers=[handler], level=getattr(logging, level, logging.INFO))


def _group(spec: ParsedSpec, text: str) -> Subgroup:
    """A group named in the spec file, or a comma-separated list of generator words."""
    if text in spec.groups:
        return spec.groups[text]
    gens = tuple(parse_word(item, spec.system) for item in text.split(","))
    return Subgroup(spec.system, gens, text)


def _verdict(command: str, ok: bool, data: dict, lines: Sequence[str]) -> Report:
    return Report(command, Status.OK if ok else Status.FALSE, data, tuple(lines))


def cmd_support(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    H = _group(spec, args.gens)
    result = support(H, session.depth, level_cap=session.level_cap)
    return support_report("support", result)


def cmd_phi(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    C = phi(_group(spec, args.gens), session.depth)
    return Report("phi", Status.OK, {"clopen": str(C)}, (str(C),))


def cmd_phi_inverse(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    x = phi_inverse(G, parse_clopen(args.expr, G.shape), realize=args.realize)
    data: dict = {"class": str(x), "group": str(G)}
    lines = [f"class: {x}"]
    if x.realization is not None:
        data["generators"] = [str(g) for g in x.realization.generators]
        lines.append(f"realized by {len(x.realization.generators)} generators")
        lines.extend(f"  {g}" for g in x.realization.generators)
    return Report("phi-inverse", Status.OK, data, tuple(lines))


def cmd_clopen(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    shape = spec.system.shape
    if args.action == "eval":
        if len(args.exprs) != 1:
            raise PreconditionError("clopen eval takes one expression")
        C = parse_clopen(args.exprs[0], shape)
        return Report("clopen eval", Status.OK, {"clopen": str(C)}, (str(C),))
    if len(args.exprs) != 2:
        raise PreconditionError("clopen leq takes two expressions")
    a, b = (parse_clopen(e, shape) for e in args.exprs)
    ok = leq(a, b)
    return _verdict("clopen leq", ok, {"leq": ok, "a": str(a), "b": str(b)}, (str(ok).lower(),))


def cmd_stone(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    shape = spec.system.shape
    depth = args.depth if args.depth is not None else session.depth
    if args.action == "recon":
        if not args.ray:
            raise PreconditionError("stone recon needs --ray")
        ray = parse_ray(args.ray, shape)
        prefix = reconstruct_ray(phi_gamma(ray), depth)
        return Report("stone recon", Status.OK, {"ray": str(ray), "prefix": str(prefix)}, (str(prefix),))
    if args.action == "vertex-map":
        if not args.word:
            raise PreconditionError("stone vertex-map needs --word")
        g = parse_word(args.word, spec.system)
        mapping = reconstruct_vertex_map(induced_algebra_map(g), depth)
        cycles = format_cycles(mapping)
        return Report("stone vertex-map", Status.OK, {"word": str(g), "cycles": cycles}, (cycles,))
    if not args.oracle:
        raise PreconditionError("stone check-hom needs --oracle")
    table = parse_oracle(Path(args.oracle).read_text(encoding="utf-8"), shape)
    f = TwoValuedMap.from_table(shape, table, name=Path(args.oracle).name)
    universe_depth = args.depth if args.depth is not None else max((c.max_depth for c in table), default=0)
    violation = homomorphism_violation(f, DepthSubalgebra(shape, universe_depth))
    if violation is not None:
        return Report(
            "stone check-hom",
            Status.FALSE,
            {"homomorphism": False, **violation.details()},
            (f"not a homomorphism: {violation}",),
        )
    prefix = reconstruct_ray(f, universe_depth)
    return Report(
        "stone check-hom",
        Status.OK,
        {"homomorphism": True, "prefix": str(prefix)},
        (f"homomorphism; ray prefix {prefix}",),
    )


def cmd_rist(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    v = parse_vertex(args.vertex, G.shape)
    level = args.level if args.level is not None else v.depth + 2
    if args.builtin:
        R = rist_generators_builtin(G, v)
        return Report(
            "rist",
            Status.OK,
            {"vertex": str(v), "generators": [str(g) for g in R.generators], "exact": True},
            (f"rist({v}) generated by {len(R.generators)} words", *(f"  {g}" for g in R.generators)),
        )
    P = rigid_stabilizer(G, v, level, cap=session.level_cap, degree_limit=session.degree_limit)
    order = P.order()
    conjugates = conjugate_count(G, v, level, cap=session.level_cap)
    return Report(
        "rist",
        Status.OK,
        {
            "vertex": str(v),
            "level": level,
            "order": order,
            "approximation": P.approximation,
            "conjugates": conjugates,
        },
        (
            f"rigid stabilizer of {v} on level {level}: order {order} ({P.approximation})",
            f"distinct conjugates: {conjugates}",
        ),
    )


def cmd_leemann(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    N = leemann_constant(G, args.n, args.max, cap=session.level_cap, degree_limit=session.degree_limit)
    if N is None:
        return Report(
            "leemann", Status.INCONCLUSIVE, {"n": args.n, "found": None}, (f"not found <= {args.max}",)
        )
    return Report("leemann", Status.OK, {"n": args.n, "found": N}, (f"N_{args.n} = {N}",))


def cmd_transitivity(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    up_to = args.up_to if args.up_to is not None else session.depth
    ok, failing = is_level_transitive(G, up_to, cap=session.level_cap)
    line = f"level-transitive up to {up_to}" if ok else f"not transitive on level {failing}"
    return _verdict("transitivity", ok, {"transitive": ok, "up_to": up_to, "failing_level": failing}, (line,))


def cmd_branch_evidence(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    up_to = args.up_to if args.up_to is not None else 3
    evidence = is_branch_evidence(G, up_to, trunc=args.level, cap=session.level_cap)
    lines = [f"truncation level {evidence.trunc}"]
    rows = []
    for e in evidence.levels:
        lines.append(
            f"level {e.level}: transitive={str(e.transitive).lower()} index={e.index} "
            f"rist_nontrivial={str(e.rist_nontrivial).lower()}"
        )
        rows.append(
            {"level": e.level, "transitive": e.transitive, "index": str(e.index), "rist_nontrivial": e.rist_nontrivial}
        )
    data = {"trunc": evidence.trunc, "levels": rows, "weakly_branch": evidence.weakly_branch}
    return _verdict("branch-evidence", evidence.transitive, data, lines)


def cmd_verify(session: SessionConfig, spec: ParsedSpec, args: argparse.Namespace) -> Report:
    G = spec.group(args.group)
    results = run_suite(args.suite, G, args.trials, session.seed)
    ok = all(r.passed for r in results)
    lines = [f"{r.name}: {r.trials} checks, {len(r.failures)} failures" for r in results]
    for r in results:
        lines.extend(f"  FAIL {what}" for what in r.failures[:10])
    data = {
        "seed": session.seed,
        "suites": [{"name": r.name, "trials": r.trials, "failures": r.failures} for r in results],
    }
    return _verdict("verify", ok, data, lines)


COMMANDS: dict[str, Callable[[SessionConfig, ParsedSpec, argparse.Namespace], Report]] = {
    "support": cmd_support,
    "phi": cmd_phi,
    "phi-inverse": cmd_phi_inverse,
    "clopen": cmd_clopen,
    "stone": cmd_stone,
    "rist": cmd_rist,
    "leemann": cmd_leemann,
    "transitivity": cmd_transitivity,
    "branch-evidence": cmd_branch_evidence,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Structure lattices of branch groups on rooted trees")
    parser.add_argument("--spec", help=f"automaton spec file (default: {config.SPEC_FILE})")
    parser.add_argument("--format", choices=["text", "json"], help="report format")
    parser.add_argument("--seed", type=int, help="random seed (overrides BGLA_SEED)")
    parser.add_argument("--level-cap", type=int, help="max vertices per materialized level")
    parser.add_argument("--degree-limit", type=int, help="max permutation degree for backtrack searches")
    parser.add_argument("--group", help="group name from the spec file (default: the first one)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("support", help="classify the support of a subgroup")
    p.add_argument("gens", help="group name or comma-separated generator words")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("phi", help="support of a subgroup as a clopen")
    p.add_argument("gens")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("phi-inverse", help="structure class of a clopen")
    p.add_argument("expr")
    p.add_argument("--realize", action="store_true", help="attach builtin rist generators")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("clopen", help="evaluate or compare clopen expressions")
    p.add_argument("action", choices=["eval", "leq"])
    p.add_argument("exprs", nargs="+")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("stone", help="Stone duality checks")
    p.add_argument("action", choices=["recon", "check-hom", "vertex-map"])
    p.add_argument("--ray", help="ray literal such as 01(10)*")
    p.add_argument("--oracle", help="oracle table file")
    p.add_argument("--word", help="automorphism word for vertex-map")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("rist", help="rigid stabilizer of a vertex")
    p.add_argument("vertex")
    p.add_argument("--level", type=int)
    p.add_argument("--builtin", action="store_true", help="exact generators from the shipped recursions")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("leemann", help="search the Leemann constant of a level")
    p.add_argument("n", type=int)
    p.add_argument("--max", type=int, default=4)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("transitivity", help="level-transitivity check")
    p.add_argument("--up-to", type=int)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("branch-evidence", help="finite evidence of branchness")
    p.add_argument("--up-to", type=int)
    p.add_argument("--level", type=int, help="truncation level")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("verify", help="randomized verification suites")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, dest="suite_seed")
    p.add_argument("--depth", type=int)
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[Report, str]:
    """Parse arguments and execute one command; returns the report and its format."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "suite_seed", None) is not None:
        args.seed = args.suite_seed
    command = args.command if args.command not in ("clopen", "stone") else f"{args.command} {args.action}"
    fmt = args.format or config.OUTPUT_FORMAT
    try:
        session = SessionConfig.from_args(args)
        spec = load_spec(session.spec_file)
        report = COMMANDS[args.command](session, spec, args)
    except BglaError as exc:
        logger.warning("%s failed: %s", command, exc)
        report = error_report(command, exc)
    except OSError as exc:
        logger.error("%s failed: %s", command, exc)
        report = error_report(command, exc)
    logger.info("%s finished with status %s", command, report.status.value)
    return report, fmt


def main(argv: Sequence[str] | None = None) -> int:
    setup_logging()
    report, fmt = run(argv)
    print(report.render(fmt))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
