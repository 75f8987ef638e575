"""Text formats: automaton spec files, clopen expressions, rays, words, oracle tables."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from autgrp import IDENTITY, AutSystem, StateRule, Subgroup, TreeAut
from clopen import Clopen, complement, join, meet
from errors import InvalidVertexError, ParseError
from stone import Ray
from tree import ALPHABET, ROOT, ROOT_SYMBOLS, TreeShape, Vertex, make_vertex

logger = logging.getLogger(__name__)

NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_TREE_RE = re.compile(r"^tree\s+(?:arity=(\d+)|(?:pre=([0-9,]+)\s+)?period=([0-9,]+))$")
_STATE_RE = re.compile(rf"^state\s+({NAME})\s*=\s*(.+)$")
_GROUP_RE = re.compile(rf"^group\s+({NAME})\s*=\s*(.+)$")
_CLAUSE_RE = re.compile(r"^perm\s*((?:\([^()]*\)\s*)+)->\s*(.+)$")
_RAY_RE = re.compile(r"^([0-9a-z]*)\(([0-9a-z]+)\)\*$")
_TOKEN_RE = re.compile(rf"^({NAME})(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class WrittenTree:
    """Arity sequence exactly as the tree line spells it, before canonicalization."""

    pre_period: tuple[int, ...]
    period: tuple[int, ...]

    @property
    def class_count(self) -> int:
        return len(self.pre_period) + len(self.period)

    def depth_class(self, depth: int) -> int:
        if depth < len(self.pre_period):
            return depth
        return len(self.pre_period) + (depth - len(self.pre_period)) % len(self.period)


def canonical_rules(
    shape: TreeShape, written: WrittenTree, rules: Mapping[str, tuple[StateRule, ...]]
) -> dict[str, tuple[StateRule, ...]]:
    """Move rules given per written depth class onto the classes of ``shape``.

    A written line such as ``pre=4 period=2,4`` has more depth classes than its
    canonical shape. When the clauses that fall into one canonical class agree
    they are merged. Otherwise every state is split into variants ``x@k``, one
    per written class ``k``, and ``x`` itself is the variant used at the root.
    """
    horizon = max(len(written.pre_period), len(shape.pre_period)) + math.lcm(
        len(written.period), len(shape.period)
    )
    pairs = {(shape.depth_class(d), written.depth_class(d)) for d in range(horizon)}
    merged: dict[int, list[int]] = {}
    for cls, wcls in sorted(pairs):
        merged.setdefault(cls, []).append(wcls)

    if all(len({clauses[w] for w in ws}) == 1 for clauses in rules.values() for ws in merged.values()):
        return {
            state: tuple(clauses[merged[cls][0]] for cls in range(shape.class_count)) for state, clauses in rules.items()
        }

    def variant(state: str, wcls: int) -> str:
        return state if state == IDENTITY or wcls == 0 else f"{state}@{wcls}"

    split: dict[str, tuple[StateRule, ...]] = {}
    for wcls in range(written.class_count):
        child = written.depth_class(wcls + 1)
        for state, clauses in rules.items():
            built = []
            for cls in range(shape.class_count):
                if (cls, wcls) in pairs:
                    rule = clauses[wcls]
                    built.append(StateRule(rule.perm, tuple(variant(s, child) for s in rule.successors)))
                else:
                    built.append(StateRule.trivial(shape.arity(cls)))
            split[variant(state, wcls)] = tuple(built)
    logger.debug("split %d states over %d written depth classes", len(rules), written.class_count)
    return split


@dataclass(frozen=True)
class ParsedSpec:
    system: AutSystem
    groups: Mapping[str, Subgroup]

    def group(self, name: str | None = None) -> Subgroup:
        """Named group, or the first one defined."""
        if not self.groups:
            raise ParseError("spec defines no group")
        if name is None:
            return next(iter(self.groups.values()))
        if name not in self.groups:
            raise ParseError(f"spec defines no group {name!r}")
        return self.groups[name]


def _letter(ch: str) -> int:
    index = ALPHABET.find(ch)
    if index < 0:
        raise ValueError(ch)
    return index


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _parse_tree(body: str, lineno: int) -> tuple[TreeShape, WrittenTree]:
    m = _TREE_RE.match(body)
    if not m:
        raise ParseError("expected 'tree arity=K' or 'tree pre=... period=...'", lineno, 1)
    if m.group(1):
        written = WrittenTree((), (int(m.group(1)),))
    else:
        pre = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
        written = WrittenTree(pre, tuple(int(x) for x in m.group(3).split(",")))
    try:
        return TreeShape(written.pre_period, written.period), written
    except ValueError as exc:
        raise ParseError(str(exc), lineno, 1) from exc


def _parse_cycles(text: str, arity: int, lineno: int, column: int) -> tuple[int, ...]:
    perm = list(range(arity))
    used: set[int] = set()
    for cycle in re.findall(r"\(([^()]*)\)", text):
        try:
            points = [_letter(tok) for tok in cycle.split()]
        except ValueError as exc:
            raise ParseError(f"bad letter {exc.args[0]!r} in permutation", lineno, column) from exc
        for p in points:
            if p >= arity:
                raise ParseError(f"letter {ALPHABET[p]} is outside an alphabet of size {arity}", lineno, column)
            if p in used:
                raise ParseError(f"letter {ALPHABET[p]} repeated in permutation", lineno, column)
            used.add(p)
        for i, p in enumerate(points):
            perm[p] = points[(i + 1) % len(points)]
    return tuple(perm)


def parse_spec(text: str, name: str = "") -> ParsedSpec:
    """Parse and validate an automaton spec file."""
    shape: TreeShape | None = None
    written: WrittenTree | None = None
    clauses: dict[str, list[tuple[str, int, int]]] = {}
    groups_raw: dict[str, tuple[str, int, int]] = {}
    references: list[tuple[str, int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        body = line.strip()
        if not body:
            continue
        indent = len(line) - len(line.lstrip())
        if body.startswith("tree"):
            if shape is not None:
                raise ParseError("duplicate tree line", lineno, indent + 1)
            shape, written = _parse_tree(body, lineno)
            continue
        if shape is None:
            raise ParseError("the tree line must come first", lineno, indent + 1)
        m = _STATE_RE.match(body)
        if m:
            state = m.group(1)
            if state == IDENTITY:
                raise ParseError(f"{IDENTITY!r} is the reserved identity state", lineno, indent + 1)
            if state in clauses:
                raise ParseError(f"duplicate state {state!r}", lineno, indent + 1)
            start = indent + m.start(2)
            parts = []
            offset = 0
            for part in m.group(2).split(";"):
                parts.append((part.strip(), lineno, start + offset + len(part) - len(part.lstrip()) + 1))
                offset += len(part) + 1
            clauses[state] = parts
            continue
        m = _GROUP_RE.match(body)
        if m:
            if m.group(1) in groups_raw:
                raise ParseError(f"duplicate group {m.group(1)!r}", lineno, indent + 1)
            groups_raw[m.group(1)] = (m.group(2), lineno, indent + m.start(2) + 1)
            continue
        raise ParseError(f"cannot parse {body!r}", lineno, indent + 1)

    if shape is None or written is None:
        raise ParseError("missing tree line")

    classes = written.class_count
    rules: dict[str, tuple[StateRule, ...]] = {}
    for state, parts in clauses.items():
        if len(parts) not in (1, classes):
            _, lineno, column = parts[0]
            raise ParseError(
                f"state {state!r} has {len(parts)} clauses, the tree line gives {classes} depth classes", lineno, column
            )
        built = []
        for cls in range(classes):
            clause, lineno, column = parts[cls if len(parts) > 1 else 0]
            m = _CLAUSE_RE.match(clause)
            if not m:
                raise ParseError(f"expected 'perm(...) -> s1, s2, ...', got {clause!r}", lineno, column)
            arity = shape.arity(cls)
            perm = _parse_cycles(m.group(1), arity, lineno, column)
            successors = tuple(s.strip() for s in m.group(2).split(","))
            if len(successors) != arity:
                raise ParseError(
                    f"state {state!r} lists {len(successors)} successors, depth class {cls} has arity {arity}",
                    lineno,
                    column,
                )
            for s in successors:
                if not re.fullmatch(NAME, s):
                    raise ParseError(f"bad state name {s!r}", lineno, column)
                references.append((s, lineno, column + clause.find(s, clause.index("->"))))
            built.append(StateRule(perm, successors))
        rules[state] = tuple(built)

    for ref, lineno, column in references:
        if ref != IDENTITY and ref not in rules:
            raise ParseError(f"unknown state {ref!r}", lineno, column)

    system = AutSystem(shape, canonical_rules(shape, written, rules), name=name)
    groups: dict[str, Subgroup] = {}
    for gname, (body, lineno, column) in groups_raw.items():
        gens = []
        for item in body.split(","):
            try:
                gens.append(parse_word(item, system))
            except ParseError as exc:
                raise ParseError(exc.reason, lineno, column) from exc
        groups[gname] = Subgroup(system, tuple(gens), gname)
    logger.debug("parsed spec %r: %d states, groups %s", name, len(system.states), list(groups))
    return ParsedSpec(system, groups)


def load_spec(path: str | Path) -> ParsedSpec:
    """Read and parse a spec file; the system is named after the file stem."""
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), name=path.stem)


def parse_word(text: str, system: AutSystem) -> TreeAut:
    """Parse ``a b^-1 c^2`` style words; runs of one-letter state names may be written together."""
    word: list[tuple[str, int]] = []
    tokens = text.replace("*", " ").replace("·", " ").split()
    if not tokens:
        raise ParseError("empty word")
    for token in tokens:
        if token == "1":
            continue
        m = _TOKEN_RE.match(token)
        if not m:
            raise ParseError(f"bad word token {token!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name in system.rules:
            names = [name]
        elif all(ch in system.rules for ch in name):
            names = list(name)
        else:
            raise ParseError(f"unknown state in {token!r}")
        for n in names[:-1]:
            word.append((n, 1))
        last = names[-1]
        word.extend([(last, 1 if exp > 0 else -1)] * abs(exp))
    return TreeAut(system, tuple(word))


def parse_vertex(text: str, shape: TreeShape) -> Vertex:
    text = text.strip()
    if text in ROOT_SYMBOLS:
        return ROOT
    try:
        return make_vertex(shape, (_letter(ch) for ch in text))
    except ValueError as exc:
        if isinstance(exc, InvalidVertexError):
            raise
        raise ParseError(f"bad vertex letter {exc.args[0]!r}") from exc


def parse_ray(text: str, shape: TreeShape) -> Ray:
    """Parse ``<pre>(<cycle>)*``."""
    m = _RAY_RE.match(text.strip())
    if not m:
        raise ParseError(f"expected a ray literal like 01(10)*, got {text!r}")
    pre = tuple(_letter(ch) for ch in m.group(1))
    cycle = tuple(_letter(ch) for ch in m.group(2))
    if len(cycle) % len(shape.period):
        # repeat the cycle until it lines up with the shape period
        step = len(shape.period)
        reps = step // math.gcd(len(cycle), step)
        cycle *= reps
    return Ray(shape, pre, cycle)


# Clopen expressions: atoms C(w), 0, 1; ! binds tightest, then &, then |
_BINARY_PREC = {"|": 0, "&": 1}


def _tokenize_clopen(source: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    idx = 0
    while idx < len(source):
        c = source[idx]
        if c.isspace():
            idx += 1
            continue
        if c == "C":
            end = source.find(")", idx)
            if idx + 1 >= len(source) or source[idx + 1] != "(" or end < 0:
                raise ParseError("expected C(<word>)", column=idx + 1)
            tokens.append((source[idx : end + 1], idx + 1))
            idx = end + 1
            continue
        if c in "!&|()01":
            tokens.append((c, idx + 1))
            idx += 1
            continue
        raise ParseError(f"unexpected character {c!r}", column=idx + 1)
    return tokens


def parse_clopen(source: str, shape: TreeShape) -> Clopen:
    """Parse a clopen expression into canonical form."""
    tokens = _tokenize_clopen(source)
    pos = 0

    def peek() -> str | None:
        return tokens[pos][0] if pos < len(tokens) else None

    def atom() -> Clopen:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of expression", column=len(source) + 1)
        token, column = tokens[pos]
        pos += 1
        if token == "!":
            return complement(atom())
        if token == "(":
            value = expr(0)
            if peek() != ")":
                raise ParseError("expected ')'", column=tokens[pos][1] if pos < len(tokens) else len(source) + 1)
            pos += 1
            return value
        if token == "0":
            return Clopen.zero(shape)
        if token == "1":
            return Clopen.one(shape)
        if token.startswith("C("):
            try:
                return Clopen(shape, (parse_vertex(token[2:-1], shape),))
            except (ParseError, InvalidVertexError) as exc:
                raise ParseError(str(exc), column=column) from exc
        raise ParseError(f"unexpected {token!r}", column=column)

    def expr(min_prec: int) -> Clopen:
        nonlocal pos
        lhs = atom()
        while True:
            op = peek()
            if op not in _BINARY_PREC or _BINARY_PREC[op] < min_prec:
                return lhs
            pos += 1
            rhs = expr(_BINARY_PREC[op] + 1)
            lhs = meet(lhs, rhs) if op == "&" else join(lhs, rhs)

    result = expr(0)
    if pos != len(tokens):
        raise ParseError(f"unexpected {tokens[pos][0]!r}", column=tokens[pos][1])
    return result


def parse_oracle(text: str, shape: TreeShape) -> dict[Clopen, int]:
    """Oracle table lines ``<clopen-expr> = 0|1``; ``#`` starts a comment."""
    table: dict[Clopen, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        expr, sep, value = line.rpartition("=")
        if not sep or value.strip() not in ("0", "1"):
            raise ParseError("expected '<clopen> = 0' or '<clopen> = 1'", lineno, 1)
        try:
            key = parse_clopen(expr, shape)
        except ParseError as exc:
            raise ParseError(exc.reason, lineno, exc.column) from exc
        if key in table and table[key] != int(value):
            raise ParseError(f"conflicting values for {key}", lineno, 1)
        table[key] = int(value)
    return table
