"""Conflict resolutions, strategies and the attack relation between them."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .af import Framework
from .arguments import (Argument, Conflict, Theory, Vulnerability, parse_vulnerability,
                        sorted_vulns, vuln_key)


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class ConflictResolution:
    """Resolve ``conflict`` by defeating ``vulnerability``."""

    conflict: Conflict
    vulnerability: Vulnerability

    def __post_init__(self):
        if self.vulnerability not in self.conflict.vulnerabilities:
            raise StrategyError(f"{self.vulnerability} is not a vulnerability of conflict {self.conflict}")

    @cached_property
    def text(self) -> str:
        return f"({self.conflict.text}, {self.vulnerability})"

    @cached_property
    def vulnerabilities(self) -> frozenset[Vulnerability]:
        return vuls_of_resolution(self)

    def __str__(self):
        return self.text

    def __lt__(self, other: ConflictResolution):
        return self.text < other.text

    def to_json(self) -> dict:
        a, b = self.conflict.arguments
        return {"conflict": [a.text, b.text], "vulnerability": str(self.vulnerability)}


def con(r: ConflictResolution) -> tuple[Argument, Argument]:
    return r.conflict.arguments


def res(r: ConflictResolution) -> Vulnerability:
    return r.vulnerability


def vuls_of_resolution(r: ConflictResolution) -> frozenset[Vulnerability]:
    """Vulnerabilities that must stand for ``r`` to be a sensible resolution:
    everything in the conflict except the defeated one, unless both sides
    share it."""
    a, b = (x.vulnerabilities for x in r.conflict.arguments)
    v = r.vulnerability
    return (a - {v}) | (b - {v}) | (a & b & {v})


def attacks_vulnerability(r: ConflictResolution, v: Vulnerability) -> bool:
    return r.vulnerability == v


def attacks_argument(r: ConflictResolution, arg: Argument) -> bool:
    return r.vulnerability in arg.vulnerabilities


def attacks_resolution(r: ConflictResolution, r2: ConflictResolution) -> bool:
    """Three-level attack, evaluated on the arguments of ``r2``'s conflict."""
    args = r2.conflict.arguments
    if r.vulnerability != r2.vulnerability:
        return any(attacks_argument(r, a) for a in args)
    return all(attacks_argument(r, a) for a in args)


def attacks_by_characterization(r: ConflictResolution, r2: ConflictResolution) -> bool:
    return r.vulnerability in r2.vulnerabilities


class Strategy:
    """A finite set of conflict resolutions, kept in canonical order."""

    def __init__(self, resolutions: Iterable[ConflictResolution] = ()):
        self.resolutions: tuple[ConflictResolution, ...] = tuple(sorted(set(resolutions)))
        self._set = frozenset(self.resolutions)

    def __iter__(self) -> Iterator[ConflictResolution]:
        return iter(self.resolutions)

    def __len__(self):
        return len(self.resolutions)

    def __contains__(self, r):
        return r in self._set

    def __eq__(self, other):
        return isinstance(other, Strategy) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __or__(self, other: Strategy) -> Strategy:
        return Strategy(self._set | other._set)

    def __repr__(self):
        return f"Strategy({[r.text for r in self.resolutions]})"

    def attackers_of(self, vulns: Iterable[Vulnerability]) -> list[ConflictResolution]:
        """Members whose resolved vulnerability lies in ``vulns``."""
        vulns = set(vulns)
        return [r for r in self.resolutions if r.vulnerability in vulns]

    def label(self, r: ConflictResolution) -> str:
        return f"r{self.resolutions.index(r) + 1}"

    def to_json(self) -> dict:
        return {"resolutions": [r.to_json() for r in self.resolutions]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def is_total(strategy: Strategy, conflicts: Iterable[Conflict]) -> bool:
    covered = {r.conflict for r in strategy}
    return all(c in covered for c in conflicts)


def generate_full_strategy(conflicts: Iterable[Conflict]) -> Strategy:
    """Every resolution of every conflict.

    Raises ``StrategyError`` listing the conflicts that have no vulnerability
    at all (clashes between purely strict arguments).
    """
    conflicts = list(conflicts)
    unresolvable = [c for c in conflicts if not c.vulnerabilities]
    if unresolvable:
        raise StrategyError("conflicts without vulnerabilities: " + "; ".join(sorted(c.text for c in unresolvable)))
    return Strategy(ConflictResolution(c, v) for c in conflicts for v in sorted_vulns(c.vulnerabilities))


def full_strategy(theory: Theory, strict_ok: bool = True) -> Strategy:
    """The full strategy over ``theory``; with ``strict_ok`` unresolvable
    strict clashes are skipped instead of reported."""
    conflicts = theory.conflicts
    if strict_ok:
        conflicts = [c for c in conflicts if c.vulnerabilities]
    return generate_full_strategy(conflicts)


def instantiate(strategy: Strategy) -> Framework:
    nodes = strategy.resolutions
    attacks = {(r, r2) for r in nodes for r2 in nodes if attacks_resolution(r, r2)}
    return Framework(nodes, attacks)


def strategy_from_json(doc: dict, theory: Theory) -> Strategy:
    if not isinstance(doc, dict) or not isinstance(doc.get("resolutions"), list):
        raise StrategyError('strategy document must be an object with a "resolutions" list')
    out = []
    for i, item in enumerate(doc["resolutions"]):
        where = f"resolution #{i + 1}"
        if not isinstance(item, dict):
            raise StrategyError(f"{where}: expected an object")
        pair = item.get("conflict")
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(t, str) for t in pair)):
            raise StrategyError(f'{where}: "conflict" must be a list of two argument texts')
        if not isinstance(item.get("vulnerability"), str):
            raise StrategyError(f'{where}: "vulnerability" must be a string')
        try:
            a, b = (theory.argument(t) for t in pair)
            v = parse_vulnerability(item["vulnerability"])
        except (KeyError, ValueError) as e:
            raise StrategyError(f"{where}: {e}") from None
        conflict = theory.conflict(a, b)
        if conflict is None:
            raise StrategyError(f"{where}: {a.text} and {b.text} are not in conflict")
        out.append(ConflictResolution(conflict, v))
    return Strategy(out)


def load_strategy(text: str, theory: Theory) -> Strategy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StrategyError(f"invalid strategy JSON: {e}") from None
    return strategy_from_json(doc, theory)


def sorted_claim(vulns: Iterable[Vulnerability]) -> list[str]:
    return sorted(vuln_key(v) for v in vulns)
