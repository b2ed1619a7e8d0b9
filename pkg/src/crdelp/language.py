"""Propositional defeasible logic programs: literals, rules, programs.

Concrete syntax::

    h <- a, ~b.      % strict rule
    -h -< c.         % defeasible rule with a classically negated head
    a -< .           % defeasible fact
    h <- 2:b, a.     % body literal b annotated as imported from context 2
    h -< 2:~b.       % the same for a default literal

``-`` is classical negation, ``~`` is default negation, ``%`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Literal:
    """A classical literal (``a``, ``-a``) or a default literal (``~a``, ``~-a``).

    ``context`` is the optional ``ctx:`` annotation from the source text. It
    takes no part in equality or hashing.
    """

    atom: str
    negated: bool = False
    default: bool = False
    context: str | None = field(default=None, compare=False, repr=False)

    @property
    def is_classical(self) -> bool:
        return not self.default

    @property
    def is_default(self) -> bool:
        return self.default

    @property
    def classical(self) -> Literal:
        """The literal with any default negation removed."""
        return Literal(self.atom, self.negated, False, self.context)

    def complement(self) -> Literal:
        return complement(self)

    def weak_negation(self) -> Literal:
        return Literal(self.atom, self.negated, not self.default, self.context)

    def with_context(self, context: str | None) -> Literal:
        return Literal(self.atom, self.negated, self.default, context)

    def __str__(self) -> str:
        return ("~" if self.default else "") + ("-" if self.negated else "") + self.atom

    def to_source(self) -> str:
        prefix = f"{self.context}:" if self.context is not None else ""
        return prefix + str(self)


def complement(lit: Literal) -> Literal:
    """Classical complement: ``a`` <-> ``-a``. Default literals are rejected."""
    if lit.default:
        raise ValueError(f"complement is defined on classical literals only, got {lit}")
    return Literal(lit.atom, not lit.negated, False, lit.context)


@dataclass(frozen=True)
class Rule:
    head: Literal
    body: tuple[Literal, ...] = ()
    defeasible: bool = False

    def __post_init__(self):
        if self.head.default:
            raise ValueError(f"rule head must be a classical literal, got {self.head}")
        object.__setattr__(self, "body", tuple(self.body))

    @property
    def strict(self) -> bool:
        return not self.defeasible

    @property
    def arrow(self) -> str:
        return "-<" if self.defeasible else "<-"

    def __str__(self) -> str:
        body = ", ".join(str(lit) for lit in self.body)
        return f"{self.head} {self.arrow} {body}." if body else f"{self.head} {self.arrow} ."

    def to_source(self) -> str:
        body = ", ".join(lit.to_source() for lit in self.body)
        head = self.head.to_source()
        return f"{head} {self.arrow} {body}." if body else f"{head} {self.arrow} ."

    def atoms(self) -> set[str]:
        return {self.head.atom} | {lit.atom for lit in self.body}


@dataclass(frozen=True)
class Program:
    strict: frozenset[Rule] = frozenset()
    defeasible: frozenset[Rule] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "strict", frozenset(self.strict))
        object.__setattr__(self, "defeasible", frozenset(self.defeasible))
        if any(r.defeasible for r in self.strict) or any(r.strict for r in self.defeasible):
            raise ValueError("strict and defeasible rule sets are mixed up")

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> Program:
        rules = list(rules)
        return cls(frozenset(r for r in rules if r.strict),
                   frozenset(r for r in rules if r.defeasible))

    @property
    def rules(self) -> tuple[Rule, ...]:
        """All rules in canonical (text-sorted) order."""
        return tuple(sorted(self.strict | self.defeasible, key=str))

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.strict) + len(self.defeasible)

    def __or__(self, other: Program) -> Program:
        return Program(self.strict | other.strict, self.defeasible | other.defeasible)

    def atoms(self) -> set[str]:
        out: set[str] = set()
        for r in self.rules:
            out |= r.atoms()
        return out

    def body_defaults(self) -> set[Literal]:
        """Default literals occurring in rule bodies (annotations dropped)."""
        return {lit.with_context(None) for r in self.rules for lit in r.body if lit.default}


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<strict><-)
  | (?P<defeasible>-<)
  | (?P<neg>-)
  | (?P<naf>~)
  | (?P<comma>,)
  | (?P<dot>\.)
  | (?P<colon>:)
  | (?P<atom>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
""", re.VERBOSE)

_DESCR = {
    "strict": "'<-'", "defeasible": "'-<'", "neg": "'-'", "naf": "'~'",
    "comma": "','", "dot": "'.'", "colon": "':'", "atom": "atom", "num": "number", "eof": "end of input",
}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def fail(self, *expected: str):
        want = " or ".join(_DESCR[e] for e in expected)
        raise ParseError(f"expected {want}, found {_DESCR[self.tok.kind] if self.tok.kind == 'eof' else repr(self.tok.text)}",
                         self.tok.line, self.tok.column)

    def take(self, *kinds: str) -> _Token:
        if self.tok.kind not in kinds:
            self.fail(*kinds)
        t = self.tok
        self.i += 1
        return t

    def program(self) -> list[Rule]:
        rules = []
        while self.tok.kind != "eof":
            rules.append(self.rule())
        return rules

    def rule(self) -> Rule:
        if self.tok.kind == "naf":
            raise ParseError("rule head must not be default-negated", self.tok.line, self.tok.column)
        head = self.clit()
        arrow = self.take("strict", "defeasible")
        body = []
        if self.tok.kind != "dot":
            body.append(self.literal())
            while self.tok.kind == "comma":
                self.i += 1
                body.append(self.literal())
        if self.tok.kind != "dot":
            self.fail("comma", "dot")
        self.i += 1
        return Rule(head, tuple(body), arrow.kind == "defeasible")

    def literal(self) -> Literal:
        context = self.qualifier()
        if self.tok.kind == "naf":
            self.i += 1
            lit = self.clit().weak_negation()
        else:
            lit = self.clit()
        return lit if context is None else lit.with_context(context)

    def qualifier(self) -> str | None:
        if self.tok.kind in ("atom", "num") and self.peek().kind == "colon":
            self.i += 2
            return self.tokens[self.i - 2].text
        return None

    def clit(self) -> Literal:
        context = self.qualifier()
        negated = False
        if self.tok.kind == "neg":
            self.i += 1
            negated = True
        atom = self.take("atom").text
        return Literal(atom, negated, False, context)


def parse_program(text: str) -> Program:
    """Parse DeLP source text. Duplicate rules collapse into one."""
    return Program.from_rules(_Parser(text).program())


def parse_literal(text: str) -> Literal:
    p = _Parser(text)
    lit = p.literal()
    if p.tok.kind != "eof":
        p.fail("eof")
    return lit


def parse_rule(text: str) -> Rule:
    p = _Parser(text)
    rule = p.rule()
    if p.tok.kind != "eof":
        p.fail("eof")
    return rule


def serialize_program(program: Program) -> str:
    return "".join(rule.to_source() + "\n" for rule in sorted(program.rules, key=lambda r: r.to_source()))
