"""Arguments over a knowledge base, their vulnerabilities, and conflicts.

An argument is either a leaf ``[L]`` for a literal of the knowledge base or a
node ``[A1,...,An => h]`` / ``[A1,...,An -> h]`` chaining a defeasible / strict
rule over child arguments. The bracketed text is the canonical identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Union

from .af import SizeGuardError
from .language import Literal, Program, Rule, parse_literal, parse_rule

# A vulnerability is a defeasible rule or a default literal.
Vulnerability = Union[Rule, Literal]


def vuln_key(v: Vulnerability) -> str:
    return str(v)


def is_vulnerability(v) -> bool:
    return (isinstance(v, Rule) and v.defeasible) or (isinstance(v, Literal) and v.default)


def parse_vulnerability(text: str) -> Vulnerability:
    text = text.strip()
    if "<-" in text or "-<" in text:
        rule = parse_rule(text)
        if not rule.defeasible:
            raise ValueError(f"strict rule {text!r} cannot be a vulnerability")
        return rule
    lit = parse_literal(text)
    if not lit.default:
        raise ValueError(f"classical literal {text!r} cannot be a vulnerability")
    return lit.with_context(None)


def sorted_vulns(vs: Iterable[Vulnerability]) -> list[Vulnerability]:
    return sorted(vs, key=vuln_key)


class Argument:
    """Immutable derivation tree. Equality and hashing go through ``text``."""

    __slots__ = ("conclusion", "rule", "children", "foreign", "text", "vulnerabilities",
                 "rules", "foreign_literals", "_hash")

    def __init__(self, conclusion: Literal, rule: Rule | None = None,
                 children: tuple[Argument, ...] = (), foreign: bool = False):
        conclusion = conclusion.with_context(None)
        children = tuple(children)
        if rule is not None:
            if len(children) != len(rule.body):
                raise ValueError(f"rule {rule} needs {len(rule.body)} sub-arguments, got {len(children)}")
            for lit, child in zip(rule.body, children):
                if child.conclusion != lit:
                    raise ValueError(f"sub-argument {child.text} does not conclude {lit}")
        elif children:
            raise ValueError("leaf arguments have no children")
        set_ = object.__setattr__
        set_(self, "conclusion", conclusion)
        set_(self, "rule", rule)
        set_(self, "children", children)
        set_(self, "foreign", foreign and rule is None)
        if rule is None:
            text = f"[{conclusion}]"
            vulns = frozenset() if self.foreign or not conclusion.default else frozenset({conclusion})
            rules = frozenset()
            flits = frozenset({conclusion}) if self.foreign else frozenset()
        else:
            arrow = "=>" if rule.defeasible else "->"
            inner = ",".join(c.text for c in children)
            text = f"[{inner} {arrow} {conclusion}]" if inner else f"[{arrow} {conclusion}]"
            vulns = frozenset().union(*(c.vulnerabilities for c in children))
            if rule.defeasible:
                vulns |= {rule}
            rules = frozenset({rule}).union(*(c.rules for c in children))
            flits = frozenset().union(*(c.foreign_literals for c in children))
        set_(self, "text", text)
        set_(self, "vulnerabilities", vulns)
        set_(self, "rules", rules)
        set_(self, "foreign_literals", flits)
        set_(self, "_hash", hash(text))

    def __setattr__(self, name, value):
        raise AttributeError("Argument is immutable")

    @classmethod
    def leaf(cls, lit: Literal, foreign: bool = False) -> Argument:
        return cls(lit, None, (), foreign)

    @classmethod
    def node(cls, rule: Rule, children: Iterable[Argument] = ()) -> Argument:
        return cls(rule.head, rule, tuple(children))

    @property
    def is_deductive(self) -> bool:
        return self.rule is not None

    @property
    def is_default(self) -> bool:
        return self.rule is None and not self.foreign and self.conclusion.default

    def subarguments(self) -> list[Argument]:
        out = [self]
        for c in self.children:
            out.extend(c.subarguments())
        return out

    def __eq__(self, other):
        return isinstance(other, Argument) and self.text == other.text

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Argument):
        return self.text < other.text

    def __repr__(self):
        return f"Argument({self.text})"

    def __str__(self):
        return self.text


def vuls(arg: Argument) -> frozenset[Vulnerability]:
    return arg.vulnerabilities


@dataclass(frozen=True)
class Conflict:
    """An unordered pair of conflicting arguments, stored in text order."""

    arguments: tuple[Argument, Argument]
    kind: str = field(compare=False)  # "rebutting" | "undercutting"

    def __post_init__(self):
        a, b = sorted(self.arguments, key=lambda x: x.text)
        object.__setattr__(self, "arguments", (a, b))

    @cached_property
    def vulnerabilities(self) -> frozenset[Vulnerability]:
        a, b = self.arguments
        return a.vulnerabilities | b.vulnerabilities

    @cached_property
    def text(self) -> str:
        a, b = self.arguments
        return "{" + a.text + ", " + b.text + "}"

    def __str__(self):
        return self.text


def conflict_kind(a: Argument, b: Argument) -> str | None:
    if a.is_deductive and b.is_deductive:
        c = a.conclusion
        if c.is_classical and b.conclusion == c.complement():
            return "rebutting"
        return None
    for x, y in ((a, b), (b, a)):
        if x.is_deductive and y.is_default and x.conclusion == y.conclusion.weak_negation():
            return "undercutting"
    return None


def default_knowledge(program: Program, foreign: Iterable[str] = ()) -> set[Literal]:
    """Leaves needed by ``program``: local default literals and all foreign
    literals occurring in rule bodies."""
    foreign = set(foreign)
    out = set()
    for rule in program.rules:
        for lit in rule.body:
            if lit.default or lit.atom in foreign:
                out.add(lit.with_context(None))
    return out


def build_arguments(program: Program, knowledge: Iterable[Literal] | None = None,
                    foreign: Iterable[str] = (), max_arguments: int | None = None) -> set[Argument]:
    """All arguments over ``knowledge`` in which no rule repeats on a
    root-to-leaf path.

    ``knowledge`` defaults to the default literals occurring in rule bodies
    (plus foreign body literals when ``foreign`` atoms are given). Literals
    over ``foreign`` atoms become foreign leaves with no vulnerabilities.
    Raises ``SizeGuardError`` once more than ``max_arguments`` exist.
    """
    foreign = frozenset(foreign)
    if knowledge is None:
        knowledge = default_knowledge(program, foreign)
    by_conc: dict[Literal, dict[str, Argument]] = {}
    for lit in knowledge:
        leaf = Argument.leaf(lit, foreign=lit.atom in foreign)
        by_conc.setdefault(leaf.conclusion, {})[leaf.text] = leaf

    rules = [r for r in program.rules if r.head.atom not in foreign]
    count = sum(len(g) for g in by_conc.values())
    changed = True
    while changed:
        changed = False
        for rule in rules:
            pools = []
            for lit in rule.body:
                pool = [a for a in by_conc.get(lit.with_context(None), {}).values() if rule not in a.rules]
                if not pool:
                    break
                pools.append(pool)
            else:
                target = by_conc.setdefault(rule.head.with_context(None), {})
                for combo in product(*pools):
                    arg = Argument.node(rule, combo)
                    if arg.text not in target:
                        target[arg.text] = arg
                        changed = True
                        count += 1
                        if max_arguments is not None and count > max_arguments:
                            raise SizeGuardError(f"more than {max_arguments} arguments")
    return {a for group in by_conc.values() for a in group.values()}


def find_conflicts(args: Iterable[Argument]) -> set[Conflict]:
    deductive: dict[Literal, list[Argument]] = {}
    defaults: list[Argument] = []
    for a in args:
        if a.is_deductive:
            deductive.setdefault(a.conclusion, []).append(a)
        elif a.is_default:
            defaults.append(a)
    out = set()
    for lit, group in deductive.items():
        if lit.negated:
            continue
        for a in group:
            for b in deductive.get(lit.complement(), ()):
                out.add(Conflict((a, b), "rebutting"))
    for b in defaults:
        for a in deductive.get(b.conclusion.classical, ()):
            out.add(Conflict((a, b), "undercutting"))
    return out


class Theory:
    """A program together with its argument set and conflicts."""

    def __init__(self, program: Program, knowledge: Iterable[Literal] | None = None,
                 foreign: Iterable[str] = (), queried: Iterable[Literal] = (),
                 max_arguments: int | None = None):
        self.program = program
        self.foreign = frozenset(foreign)
        if knowledge is None:
            knowledge = default_knowledge(program, self.foreign)
        knowledge = set(knowledge)
        for lit in queried:
            if lit.default:
                knowledge.add(lit.with_context(None))
        self.knowledge = frozenset(knowledge)
        self.arguments: tuple[Argument, ...] = tuple(sorted(build_arguments(program, knowledge, self.foreign, max_arguments)))
        self.by_text = {a.text: a for a in self.arguments}
        self.by_conclusion: dict[Literal, list[Argument]] = {}
        for a in self.arguments:
            self.by_conclusion.setdefault(a.conclusion, []).append(a)
        self.conflicts: tuple[Conflict, ...] = tuple(sorted(find_conflicts(self.arguments), key=lambda c: c.text))
        self.conflict_index = {c.arguments: c for c in self.conflicts}

    def arguments_for(self, lit: Literal) -> list[Argument]:
        return self.by_conclusion.get(lit.with_context(None), [])

    def argument(self, text: str) -> Argument:
        try:
            return self.by_text[text.strip()]
        except KeyError:
            raise KeyError(f"no argument {text!r} in this theory") from None

    def conflict(self, a: Argument, b: Argument) -> Conflict | None:
        key = tuple(sorted((a, b), key=lambda x: x.text))
        return self.conflict_index.get(key)

    @property
    def deductive(self) -> list[Argument]:
        return [a for a in self.arguments if a.is_deductive]


def as_theory(x: Theory | Program) -> Theory:
    return x if isinstance(x, Theory) else Theory(x)
