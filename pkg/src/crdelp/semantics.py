"""Statuses, outputs and entailment relative to complete extensions of the
instantiated framework."""

from __future__ import annotations

from enum import Enum
from typing import Iterable

from .af import DEFAULT_MAX_NODES, Extension, complete_extensions, grounded
from .arguments import Argument, Theory, Vulnerability
from .language import Literal, Program
from .resolution import (ConflictResolution, Strategy, attacks_argument, attacks_resolution,
                         attacks_vulnerability, instantiate)


class Status(str, Enum):
    IN = "in"
    OUT = "out"
    UNDEC = "undec"


class Mode(str, Enum):
    SKEPTICAL = "skeptical"
    CREDULOUS = "credulous"

    def flipped(self) -> Mode:
        return Mode.CREDULOUS if self is Mode.SKEPTICAL else Mode.SKEPTICAL


def _attacks(r: ConflictResolution, item) -> bool:
    if isinstance(item, ConflictResolution):
        return attacks_resolution(r, item)
    if isinstance(item, Argument):
        return attacks_argument(r, item)
    return attacks_vulnerability(r, item)


def status(strategy: Strategy, extension: Iterable[ConflictResolution],
           item: Vulnerability | Argument | ConflictResolution) -> Status:
    e = set(extension)
    attackers = [r for r in strategy if _attacks(r, item)]
    if all(any(attacks_resolution(d, r) for d in e) for r in attackers):
        return Status.IN
    if any(_attacks(d, item) for d in e):
        return Status.OUT
    return Status.UNDEC


def accepted(theory: Theory, strategy: Strategy, extension: Iterable[ConflictResolution]) -> set[Literal]:
    """Conclusions (classical and default) of all arguments with status in."""
    e = set(extension)
    # Statuses of arguments reduce to those of their vulnerabilities.
    vuln_in: dict = {}

    def is_in(v) -> bool:
        if v not in vuln_in:
            vuln_in[v] = status(strategy, e, v) is Status.IN
        return vuln_in[v]

    return {a.conclusion for a in theory.arguments if all(is_in(v) for v in a.vulnerabilities)}


def output(theory: Theory | Program, strategy: Strategy, extension: Iterable[ConflictResolution]) -> set[Literal]:
    theory = theory if isinstance(theory, Theory) else Theory(theory)
    return {lit for lit in accepted(theory, strategy, extension) if lit.is_classical}


def extensions(strategy: Strategy, max_nodes: int = DEFAULT_MAX_NODES) -> list[Extension]:
    return complete_extensions(instantiate(strategy), max_nodes)


def entails(theory: Theory | Program, strategy: Strategy, literal: Literal,
            mode: Mode | str = Mode.SKEPTICAL, max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    mode = Mode(mode)
    literal = literal.with_context(None)
    if not isinstance(theory, Theory):
        theory = Theory(theory, queried=[literal])
    exts = extensions(strategy, max_nodes)
    hits = (literal in accepted(theory, strategy, e) for e in exts)
    return all(hits) if mode is Mode.SKEPTICAL else any(hits)


def grounded_output(theory: Theory, strategy: Strategy) -> set[Literal]:
    return output(theory, strategy, grounded(instantiate(strategy)))
