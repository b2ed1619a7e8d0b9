"""Abstract argumentation frameworks and their complete-family semantics.

Extensions are enumerated exhaustively; this module is the reference oracle
for the argument games, so it favours plainness over speed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Hashable, Iterable

DEFAULT_MAX_NODES = 24


class SizeGuardError(RuntimeError):
    pass


class Framework:
    """Finite directed attack graph. Node order is kept for stable output."""

    def __init__(self, nodes: Iterable[Hashable], attacks: Iterable[tuple[Hashable, Hashable]] = ()):
        self.nodes = tuple(dict.fromkeys(nodes))
        self.attacks = frozenset(attacks)
        known = set(self.nodes)
        for a, b in self.attacks:
            if a not in known or b not in known:
                raise ValueError(f"attack ({a}, {b}) mentions an unknown node")
        self.attackers = {n: set() for n in self.nodes}
        self.attacked = {n: set() for n in self.nodes}
        for a, b in self.attacks:
            self.attackers[b].add(a)
            self.attacked[a].add(b)

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"Framework({len(self.nodes)} nodes, {len(self.attacks)} attacks)"

    def index(self, n) -> int:
        return self.nodes.index(n)

    def attacks_node(self, s: Iterable, n) -> bool:
        return not self.attackers[n].isdisjoint(s)

    def defends(self, s: Iterable, n) -> bool:
        s = set(s)
        return all(self.attacks_node(s, y) for y in self.attackers[n])

    def is_attack_free(self, s: Iterable) -> bool:
        s = set(s)
        return not any(self.attacks_node(s, n) for n in s)

    def is_admissible(self, s: Iterable) -> bool:
        s = set(s)
        return self.is_attack_free(s) and all(self.defends(s, n) for n in s)

    def to_json(self, label=str) -> dict:
        return {
            "nodes": [label(n) for n in self.nodes],
            "attacks": sorted([self.index(a), self.index(b)] for a, b in self.attacks),
        }

    def to_dot(self, label=None) -> str:
        lines = ["digraph {"]
        for i, n in enumerate(self.nodes):
            text = label(n) if label else str(n)
            text = text.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  r{i + 1} [label="{text}"];')
        for i, j in sorted((self.index(a), self.index(b)) for a, b in self.attacks):
            lines.append(f"  r{i + 1} -> r{j + 1};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def dumps(self, label=str) -> str:
        return json.dumps(self.to_json(label))


@dataclass(frozen=True)
class Extension:
    members: frozenset
    label: str = "complete"

    def __contains__(self, n):
        return n in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def characteristic(fw: Framework, s: Iterable) -> frozenset:
    s = set(s)
    return frozenset(n for n in fw.nodes if fw.defends(s, n))


def fixpoint_stages(fw: Framework) -> list[frozenset]:
    """F^0 = {}, F^1, ... up to and including the least fixpoint."""
    stages = [frozenset()]
    while True:
        nxt = characteristic(fw, stages[-1])
        if nxt == stages[-1]:
            return stages
        stages.append(nxt)


def grounded(fw: Framework) -> Extension:
    return Extension(fixpoint_stages(fw)[-1], "grounded")


def _guard(fw: Framework, max_nodes: int):
    if len(fw.nodes) > max_nodes:
        raise SizeGuardError(f"framework has {len(fw.nodes)} nodes, above the limit of {max_nodes}")


def _attack_free_sets(fw: Framework):
    nodes = fw.nodes

    def extend(i: int, chosen: list):
        if i == len(nodes):
            yield frozenset(chosen)
            return
        yield from extend(i + 1, chosen)
        n = nodes[i]
        if n in fw.attackers[n]:
            return
        if any(c in fw.attackers[n] or n in fw.attackers[c] for c in chosen):
            return
        chosen.append(n)
        yield from extend(i + 1, chosen)
        chosen.pop()

    yield from extend(0, [])


def _order(fw: Framework, sets: Iterable[frozenset]) -> list[frozenset]:
    pos = {n: i for i, n in enumerate(fw.nodes)}
    return sorted(sets, key=lambda s: (len(s), sorted(pos[n] for n in s)))


def complete_extensions(fw: Framework, max_nodes: int = DEFAULT_MAX_NODES) -> list[Extension]:
    _guard(fw, max_nodes)
    found = [s for s in _attack_free_sets(fw) if characteristic(fw, s) == s]
    return [Extension(s, "complete") for s in _order(fw, found)]


def preferred_extensions(fw: Framework, max_nodes: int = DEFAULT_MAX_NODES) -> list[Extension]:
    complete = [e.members for e in complete_extensions(fw, max_nodes)]
    maximal = [s for s in complete if not any(s < t for t in complete)]
    return [Extension(s, "preferred") for s in _order(fw, maximal)]


def stable_extensions(fw: Framework, max_nodes: int = DEFAULT_MAX_NODES) -> list[Extension]:
    complete = [e.members for e in complete_extensions(fw, max_nodes)]
    stable = [s for s in complete if all(n in s or fw.attacks_node(s, n) for n in fw.nodes)]
    return [Extension(s, "stable") for s in _order(fw, stable)]


def check_lemma1(fw: Framework, i: int) -> bool:
    """Check that membership in F^(i+1) is the same as being defended from
    F^i by arguments other than the node itself, for every node."""
    stages = fixpoint_stages(fw)
    fi = stages[min(i, len(stages) - 1)]
    nxt = characteristic(fw, fi)
    for a in fw.nodes:
        rhs = all(any(z != a and z in fw.attackers[y] for z in fi) for y in fw.attackers[a])
        if (a in nxt) != rhs:
            return False
    return True
