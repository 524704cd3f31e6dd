"""The counting logic C^k: formulas, satisfaction, s-expression syntax and a sentence sampler.

Variables are numbered from 1 and written ``x1, x2, ...``.  An assignment maps
variable numbers to vertex ids; only the free variables of a formula are read.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .graphs import ColouredGraph


class FormulaError(ValueError):
    pass


class Formula:
    """Base class; subclasses are frozen dataclasses."""

    @cached_property
    def free(self) -> frozenset:
        raise NotImplementedError

    @cached_property
    def qr(self) -> int:
        raise NotImplementedError

    @cached_property
    def max_var(self) -> int:
        raise NotImplementedError

    def is_sentence(self) -> bool:
        return not self.free

    def __str__(self):
        return format_formula(self)


def _var(i) -> int:
    if not isinstance(i, int) or isinstance(i, bool) or i < 1:
        raise FormulaError(f"variable index must be a positive integer, got {i!r}")
    return i


@dataclass(frozen=True, eq=True)
class Truth(Formula):
    value: bool = True

    @cached_property
    def free(self):
        return frozenset()

    @cached_property
    def qr(self):
        return 0

    @cached_property
    def max_var(self):
        return 0


@dataclass(frozen=True, eq=True)
class Eq(Formula):
    i: int
    j: int

    def __post_init__(self):
        _var(self.i), _var(self.j)

    @cached_property
    def free(self):
        return frozenset((self.i, self.j))

    @cached_property
    def qr(self):
        return 0

    @cached_property
    def max_var(self):
        return max(self.i, self.j)


@dataclass(frozen=True, eq=True)
class Edge(Eq):
    pass


@dataclass(frozen=True, eq=True)
class Col(Formula):
    colour: str
    i: int

    def __post_init__(self):
        _var(self.i)

    @cached_property
    def free(self):
        return frozenset((self.i,))

    @cached_property
    def qr(self):
        return 0

    @cached_property
    def max_var(self):
        return self.i


@dataclass(frozen=True, eq=True)
class Not(Formula):
    body: Formula

    @cached_property
    def free(self):
        return self.body.free

    @cached_property
    def qr(self):
        return self.body.qr

    @cached_property
    def max_var(self):
        return self.body.max_var


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula

    @cached_property
    def free(self):
        return self.left.free | self.right.free

    @cached_property
    def qr(self):
        return max(self.left.qr, self.right.qr)

    @cached_property
    def max_var(self):
        return max(self.left.max_var, self.right.max_var)


@dataclass(frozen=True, eq=True)
class CountExists(Formula):
    """At least r distinct vertices v with body[alpha(x_i / v)]."""

    r: int
    i: int
    body: Formula

    def __post_init__(self):
        _var(self.i)
        if not isinstance(self.r, int) or self.r < 1:
            raise FormulaError("counting threshold must be >= 1")

    @cached_property
    def free(self):
        return self.body.free - {self.i}

    @cached_property
    def qr(self):
        return self.body.qr + 1

    @cached_property
    def max_var(self):
        return max(self.i, self.body.max_var)


@dataclass(frozen=True, eq=True)
class CountExistsTuple(Formula):
    """At least r distinct l-tuples of vertices for the variables ``vars``."""

    r: int
    vars: tuple
    body: Formula = field(default_factory=Truth)

    def __post_init__(self):
        if not self.vars:
            raise FormulaError("tuple quantifier needs at least one variable")
        for i in self.vars:
            _var(i)
        if len(set(self.vars)) != len(self.vars):
            raise FormulaError("tuple quantifier variables must be distinct")
        if not isinstance(self.r, int) or self.r < 1:
            raise FormulaError("counting threshold must be >= 1")

    @cached_property
    def free(self):
        return self.body.free - set(self.vars)

    @cached_property
    def qr(self):
        return self.body.qr + len(self.vars)

    @cached_property
    def max_var(self):
        return max(max(self.vars), self.body.max_var)


def quantifier_rank(phi: Formula) -> int:
    return phi.qr


def free_vars(phi: Formula) -> frozenset:
    return phi.free


# -- semantics --------------------------------------------------------------------------

def _normalise_assignment(alpha) -> dict:
    if alpha is None:
        return {}
    if isinstance(alpha, Mapping):
        return {_var(int(i)): int(v) for i, v in alpha.items()}
    return {i + 1: int(v) for i, v in enumerate(alpha)}


def evaluate(g: ColouredGraph, phi: Formula, alpha=None, k: int | None = None) -> bool:
    """G |= phi[alpha].  ``alpha`` is a mapping from variable numbers or a sequence for x1, x2, ...

    With ``k`` given, formulas using a variable beyond x_k are rejected.
    """
    if k is not None and phi.max_var > k:
        raise FormulaError(f"formula uses x{phi.max_var} but k = {k}")
    env = _normalise_assignment(alpha)
    missing = phi.free - env.keys()
    if missing:
        raise FormulaError(f"assignment misses free variables {sorted(missing)}")
    for i, v in env.items():
        if not 0 <= v < g.n:
            raise FormulaError(f"x{i} = {v} is not a vertex")
    memo: dict = {}
    adjacency = g.edges
    colours = g.colours

    def ev(node: Formula, env: dict) -> bool:
        key = (id(node), tuple(env[i] for i in sorted(node.free)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        t = type(node)
        if t is Truth:
            res = node.value
        elif t is Eq:
            res = env[node.i] == env[node.j]
        elif t is Edge:
            res = (env[node.i], env[node.j]) in adjacency
        elif t is Col:
            res = colours[env[node.i]] == node.colour
        elif t is Not:
            res = not ev(node.body, env)
        elif t is And:
            res = ev(node.left, env) and ev(node.right, env)
        elif t is CountExists:
            res = False
            if node.r <= g.n:
                count, inner = 0, dict(env)
                for v in range(g.n):
                    inner[node.i] = v
                    if ev(node.body, inner):
                        count += 1
                        if count >= node.r:
                            res = True
                            break
        elif t is CountExistsTuple:
            res = False
            if node.r <= g.n ** len(node.vars):
                count, inner = 0, dict(env)
                for vs in itertools.product(range(g.n), repeat=len(node.vars)):
                    inner.update(zip(node.vars, vs))
                    if ev(node.body, inner):
                        count += 1
                        if count >= node.r:
                            res = True
                            break
        else:
            raise FormulaError(f"unknown formula node {node!r}")
        memo[key] = res
        return res

    return ev(phi, env)


# -- s-expressions ----------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()"]+))')
_VAR = re.compile(r"x([1-9][0-9]*)$")


def _tokens(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaError(f"cannot tokenize formula at offset {pos}")
        pos = m.end()
        if m.group(1):
            out.append("(")
        elif m.group(2):
            out.append(")")
        elif m.group(3) is not None:
            out.append(("str", re.sub(r"\\(.)", r"\1", m.group(3))))
        else:
            out.append(m.group(4))
    return out


def _read(tokens, pos):
    if pos >= len(tokens):
        raise FormulaError("unexpected end of formula")
    tok = tokens[pos]
    if tok == ")":
        raise FormulaError("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    items, pos = [], pos + 1
    while True:
        if pos >= len(tokens):
            raise FormulaError("unbalanced parentheses")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)


def _parse_var(tok) -> int:
    m = _VAR.match(tok) if isinstance(tok, str) else None
    if not m:
        raise FormulaError(f"expected a variable like x1, got {tok!r}")
    return int(m.group(1))


def _build(expr) -> Formula:
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise FormulaError(f"expected a parenthesised formula, got {expr!r}")
    head, args = expr[0], expr[1:]

    def arity(n):
        if len(args) != n:
            raise FormulaError(f"{head} takes {n} arguments, got {len(args)}")

    if head in ("true", "false"):
        arity(0)
        return Truth(head == "true")
    if head in ("eq", "edge"):
        arity(2)
        return (Eq if head == "eq" else Edge)(_parse_var(args[0]), _parse_var(args[1]))
    if head == "col":
        arity(2)
        c = args[0][1] if isinstance(args[0], tuple) else args[0]
        if not isinstance(c, str):
            raise FormulaError("colour must be a token")
        return Col(c, _parse_var(args[1]))
    if head == "not":
        arity(1)
        return Not(_build(args[0]))
    if head == "and":
        if len(args) < 2:
            raise FormulaError("and takes at least 2 arguments")
        parts = [_build(a) for a in args]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = And(p, out)
        return out
    if head == "exists>=":
        arity(3)
        try:
            r = int(args[0])
        except (TypeError, ValueError):
            raise FormulaError(f"threshold must be an integer, got {args[0]!r}") from None
        if not isinstance(args[1], list) or not args[1]:
            raise FormulaError("quantified variables must be a non-empty list")
        vs = tuple(_parse_var(v) for v in args[1])
        body = _build(args[2])
        return CountExists(r, vs[0], body) if len(vs) == 1 else CountExistsTuple(r, vs, body)
    raise FormulaError(f"unknown connective {head!r}")


def parse_formula(text: str) -> Formula:
    tokens = _tokens(text)
    expr, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise FormulaError("trailing input after formula")
    return _build(expr)


def _colour_token(c: str) -> str:
    if c and re.fullmatch(r'[^\s()"\\]+', c) and not _VAR.match(c):
        return c
    return '"' + c.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_formula(phi: Formula) -> str:
    t = type(phi)
    if t is Truth:
        return "(true)" if phi.value else "(false)"
    if t is Eq:
        return f"(eq x{phi.i} x{phi.j})"
    if t is Edge:
        return f"(edge x{phi.i} x{phi.j})"
    if t is Col:
        return f"(col {_colour_token(phi.colour)} x{phi.i})"
    if t is Not:
        return f"(not {format_formula(phi.body)})"
    if t is And:
        return f"(and {format_formula(phi.left)} {format_formula(phi.right)})"
    if t is CountExists:
        return f"(exists>= {phi.r} (x{phi.i}) {format_formula(phi.body)})"
    if t is CountExistsTuple:
        vs = " ".join(f"x{i}" for i in phi.vars)
        return f"(exists>= {phi.r} ({vs}) {format_formula(phi.body)})"
    raise FormulaError(f"unknown formula node {phi!r}")


def parse_assignment(text: str) -> dict:
    """``"x1=0,x2=3"`` -> {1: 0, 2: 3}."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        if not sep:
            raise FormulaError(f"malformed assignment item {part!r}")
        try:
            out[_parse_var(name.strip())] = int(value)
        except ValueError:
            raise FormulaError(f"malformed vertex id in {part!r}") from None
    return out


# -- sampling and agreement -------------------------------------------------------------

def degree_sentence(r: int = 3) -> Formula:
    """Some vertex has at least r out-neighbours (qr 2)."""
    return CountExists(1, 1, CountExists(r, 2, Edge(1, 2)))


def sample_sentence(k: int, max_qr: int, colour_alphabet: Sequence[str], seed: int,
                    max_threshold: int = 4) -> Formula:
    """Pseudo-random sentence over x1..xk with quantifier rank at most ``max_qr``.

    ``max_qr = 0`` admits no atoms, so the result is ``(true)`` or ``(false)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if max_qr < 0:
        raise ValueError("max_qr must be >= 0")
    rng = random.Random(seed)
    colours = sorted(set(colour_alphabet))
    if max_qr == 0:
        return Truth(rng.random() < 0.5)

    def atom(bound):
        vs = sorted(bound)
        kinds = ["eq", "edge", "edge"] + (["col"] if colours else [])
        kind = rng.choice(kinds)
        if kind == "col":
            return Col(rng.choice(colours), rng.choice(vs))
        i, j = rng.choice(vs), rng.choice(vs)
        return Eq(i, j) if kind == "eq" else Edge(i, j)

    def quantified(bound, budget, size):
        if budget >= 2 and k >= 2 and rng.random() < 0.15:
            ell = rng.randint(2, min(budget, k, 3))
            vs = tuple(sorted(rng.sample(range(1, k + 1), ell)))
            return CountExistsTuple(rng.randint(1, max_threshold ** 2), vs,
                                    gen(bound | set(vs), budget - ell, size - 1))
        unbound = [j for j in range(1, k + 1) if j not in bound]
        i = rng.choice(unbound) if unbound and rng.random() < 0.75 else rng.randint(1, k)
        return CountExists(rng.randint(1, max_threshold), i, gen(bound | {i}, budget - 1, size - 1))

    def gen(bound, budget, size):
        if not bound:
            return quantified(bound, budget, size)
        roll = rng.random()
        if size <= 0 or (budget == 0 and roll < 0.6) or roll < 0.2:
            return atom(bound)
        if budget == 0 or roll < 0.45:
            if rng.random() < 0.4:
                return Not(gen(bound, budget, size - 1))
            return And(gen(bound, budget, size // 2), gen(bound, budget, size // 2))
        if roll < 0.55:
            return Not(gen(bound, budget, size - 1))
        return quantified(bound, budget, size)

    phi = quantified(frozenset(), max_qr, 12)
    if rng.random() < 0.3:
        phi = Not(phi)
    assert phi.is_sentence() and phi.qr <= max_qr
    return phi


def agree_on(pair: Sequence[ColouredGraph], sentences: Sequence[Formula]) -> dict:
    """Evaluate each sentence on both graphs and list every disagreement."""
    g, h = pair
    for phi in sentences:
        if not phi.is_sentence():
            raise FormulaError(f"not a sentence (free {sorted(phi.free)}): {format_formula(phi)}")
    disagreements = []
    for idx, phi in enumerate(sentences):
        a, b = evaluate(g, phi), evaluate(h, phi)
        if a != b:
            disagreements.append({"index": idx, "sentence": format_formula(phi), "qr": phi.qr,
                                  "g": a, "h": b})
    return {
        "sentences": len(sentences),
        "max_qr": max((phi.qr for phi in sentences), default=0),
        "disagreements": disagreements,
        "status": "PASS" if not disagreements else "DISAGREE",
    }
