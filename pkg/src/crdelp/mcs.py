"""Multi-context systems of defeasible logic programs.

Each context owns a vocabulary, a contextual program and a strategy. Body
literals over another context's vocabulary are foreign: inside the context
they are leaves with no vulnerabilities, and a game move that relies on them
sends acceptance queries to the owning context. A query from a proponent
move keeps the game's mode; one from an opponent move flips it.
"""

from __future__ import annotations

import graphlib
import json
import random
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .arguments import Argument, Theory, default_knowledge
from .games import GameNode, LiteralResult, Player, prove_literal
from .language import Literal, Program, Rule, parse_program
from .resolution import (ConflictResolution, Strategy, StrategyError, generate_full_strategy,
                         sorted_claim, strategy_from_json)
from .semantics import Mode


class ContextError(ValueError):
    pass


class ContextualizationError(ValueError):
    pass


class CyclicSystemError(ValueError):
    def __init__(self, cycle: list[str]):
        super().__init__("cyclic multi-context system: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle


class UnknownContextError(KeyError):
    pass


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class Context:
    id: str
    vocabulary: frozenset[str]
    program: Program
    strategy: Strategy
    theory: Theory = field(compare=False, repr=False)

    def is_local(self, lit: Literal) -> bool:
        return lit.atom in self.vocabulary

    def mapping_rules(self) -> list[Rule]:
        return [r for r in self.program.rules if any(not self.is_local(l) for l in r.body)]

    @property
    def arguments(self) -> tuple[Argument, ...]:
        return self.theory.arguments


def build_contextual_arguments(context: Context) -> set[Argument]:
    return set(context.theory.arguments)


def _check_context(cid: str, vocabulary: frozenset[str], program: Program, owner: Mapping[str, str],
                   allow_strict_mapping: bool = False):
    for rule in program.rules:
        if rule.head.atom not in vocabulary:
            raise ContextError(f"context {cid}: rule {rule} has a foreign head")
        foreign = [l for l in rule.body if l.atom not in vocabulary]
        if foreign and rule.strict and not allow_strict_mapping:
            raise ContextError(f"context {cid}: strict rule {rule} uses foreign literal {foreign[0]}")
        for lit in rule.body + (rule.head,):
            if lit.context is not None and owner.get(lit.atom) != lit.context:
                raise ContextError(f"context {cid}: {lit.to_source()} is annotated with the wrong context")


StrategySpec = Strategy | dict | str | None


class MultiContextSystem:
    """An immutable, validated set of contexts with a vocabulary partition."""

    def __init__(self, contexts: Iterable[Context]):
        self.contexts: dict[str, Context] = {}
        for c in contexts:
            if c.id in self.contexts:
                raise ContextError(f"duplicate context id {c.id!r}")
            self.contexts[c.id] = c
        if not self.contexts:
            raise ContextError("a multi-context system needs at least one context")
        self.owner: dict[str, str] = {}
        for c in self.contexts.values():
            for atom in c.vocabulary:
                if atom in self.owner:
                    raise ContextError(f"atom {atom} is in the vocabularies of {self.owner[atom]} and {c.id}")
                self.owner[atom] = c.id
        for c in self.contexts.values():
            missing = c.program.atoms() - set(self.owner)
            if missing:
                raise ContextError(f"context {c.id}: atoms {sorted(missing)} belong to no vocabulary")

    @classmethod
    def build(cls, blocks: Iterable[tuple[str, Iterable[str], Program]],
              strategies: Mapping[str, StrategySpec] | None = None,
              allow_strict_mapping: bool = False) -> MultiContextSystem:
        """Build contexts from ``(id, vocabulary, program)`` blocks.

        A strategy spec is a ``Strategy`` over the context's theory, a strategy
        JSON document, ``"full"``/``None`` for every resolution of every
        contextual conflict, or ``"empty"``. Strict rules must be local unless
        ``allow_strict_mapping`` is set.
        """
        blocks = [(cid, frozenset(v), p) for cid, v, p in blocks]
        strategies = dict(strategies or {})
        owner: dict[str, str] = {}
        for cid, vocab, _ in blocks:
            for atom in vocab:
                if atom in owner:
                    raise ContextError(f"atom {atom} is in the vocabularies of {owner[atom]} and {cid}")
                owner[atom] = cid
        all_atoms = set(owner)
        for cid, vocab, program in blocks:
            all_atoms |= program.atoms()
            missing = program.atoms() - set(owner)
            if missing:
                raise ContextError(f"context {cid}: atoms {sorted(missing)} belong to no vocabulary")
            _check_context(cid, vocab, program, owner, allow_strict_mapping)

        contexts = []
        for cid, vocab, program in blocks:
            foreign = all_atoms - vocab
            imported = {l.with_context(None) for ocid, _, other in blocks if ocid != cid
                        for r in other.rules for l in r.body if l.default and l.atom in vocab}
            knowledge = default_knowledge(program, foreign) | imported
            theory = Theory(program, knowledge, foreign)
            strategy = _resolve_strategy(strategies.get(cid), theory, cid)
            contexts.append(Context(cid, vocab, program, strategy, theory))
        return cls(contexts)

    def __getitem__(self, cid: str) -> Context:
        try:
            return self.contexts[cid]
        except KeyError:
            raise UnknownContextError(cid) from None

    def __iter__(self):
        return iter(self.contexts.values())

    def __len__(self):
        return len(self.contexts)

    def owner_of(self, lit: Literal) -> str:
        try:
            return self.owner[lit.atom]
        except KeyError:
            raise QueryError(f"variable {lit.atom!r} belongs to no context") from None

    def dependencies(self) -> dict[str, set[str]]:
        """Context id -> ids of contexts it imports foreign literals from."""
        deps = {cid: set() for cid in self.contexts}
        for c in self:
            for rule in c.mapping_rules():
                for lit in rule.body:
                    if not c.is_local(lit):
                        deps[c.id].add(self.owner[lit.atom])
        return deps

    def with_strategies(self, strategies: Mapping[str, Strategy]) -> MultiContextSystem:
        return MultiContextSystem(replace(c, strategy=strategies.get(c.id, c.strategy)) for c in self)


def _resolve_strategy(spec: StrategySpec, theory: Theory, cid: str) -> Strategy:
    try:
        if isinstance(spec, Strategy):
            return spec
        if spec is None or spec == "full":
            return generate_full_strategy(theory.conflicts)
        if spec == "empty":
            return Strategy()
        if isinstance(spec, dict):
            return strategy_from_json(spec, theory)
    except StrategyError as e:
        raise ContextError(f"context {cid}: {e}") from None
    raise ContextError(f"context {cid}: unsupported strategy spec {spec!r}")


def find_cycle(system: MultiContextSystem) -> list[str] | None:
    """A dependency cycle through foreign-literal imports, or ``None``."""
    deps = system.dependencies()
    sorter = graphlib.TopologicalSorter({cid: sorted(d) for cid, d in sorted(deps.items())})
    try:
        sorter.prepare()
    except graphlib.CycleError as e:
        cycle = list(e.args[1][:-1])
        # Rotate to the smallest id and follow import direction, for stable output.
        if len(cycle) > 1 and cycle[1] not in deps[cycle[0]]:
            cycle.reverse()
        i = cycle.index(min(cycle))
        return cycle[i:] + cycle[:i]
    return None


def check_acyclic(system: MultiContextSystem) -> bool:
    return find_cycle(system) is None


# ------------------------------------------------------ contextualization

def contextual_version(arg: Argument, vocabulary: Iterable[str]) -> Argument:
    """Cut ``arg`` at its foreign sub-arguments, which become foreign leaves."""
    vocabulary = frozenset(vocabulary)
    if arg.rule is None:
        return Argument.leaf(arg.conclusion, foreign=arg.conclusion.atom not in vocabulary)
    children = [contextual_version(c, vocabulary) if c.conclusion.atom in vocabulary
                else Argument.leaf(c.conclusion, foreign=True) for c in arg.children]
    return Argument.node(arg.rule, children)


def _localize(system: MultiContextSystem, r: ConflictResolution) -> ConflictResolution | None:
    a, b = r.conflict.arguments
    ctx = system[system.owner_of(a.conclusion)]
    conflict = ctx.theory.conflict(contextual_version(a, ctx.vocabulary),
                                   contextual_version(b, ctx.vocabulary))
    if conflict is None or r.vulnerability not in conflict.vulnerabilities:
        return None
    return ConflictResolution(conflict, r.vulnerability)


def monolithic(system: MultiContextSystem) -> tuple[Theory, Strategy]:
    """The merged program and the strategy whose contextual images are the
    contexts' strategies."""
    program = Program.from_rules([])
    for c in system:
        program = program | c.program
    theory = Theory(program)
    members = {r for c in system for r in c.strategy}
    out = []
    for conflict in theory.conflicts:
        for v in conflict.vulnerabilities:
            r = ConflictResolution(conflict, v)
            if _localize(system, r) in members:
                out.append(r)
    return theory, Strategy(out)


def contextualize(program: Program, strategy: Strategy,
                  partition: Mapping[str, Iterable[str]],
                  allow_strict_mapping: bool = False) -> MultiContextSystem:
    """Split ``program`` and ``strategy`` along a vocabulary partition."""
    partition = {cid: frozenset(v) for cid, v in partition.items()}
    owner = {}
    for cid, vocab in partition.items():
        for atom in vocab:
            if atom in owner:
                raise ContextualizationError(f"atom {atom} is assigned to {owner[atom]} and {cid}")
            owner[atom] = cid
    missing = program.atoms() - set(owner)
    if missing:
        raise ContextualizationError(f"partition does not cover {sorted(missing)}")
    parts: dict[str, list[Rule]] = {cid: [] for cid in partition}
    for rule in program.rules:
        cid = owner[rule.head.atom]
        body = tuple(l.with_context(None) if owner[l.atom] == cid else l.with_context(owner[l.atom])
                     for l in rule.body)
        if rule.strict and not allow_strict_mapping and any(l.context is not None for l in body):
            raise ContextualizationError(f"strict rule {rule} would import a foreign literal into {cid}")
        parts[cid].append(Rule(rule.head.with_context(None), body, rule.defeasible))
    try:
        system = MultiContextSystem.build(
            [(cid, partition[cid], Program.from_rules(rules)) for cid, rules in parts.items()],
            {cid: "empty" for cid in partition}, allow_strict_mapping)
    except ContextError as e:
        raise ContextualizationError(str(e)) from None

    images: dict[str, list[ConflictResolution]] = {cid: [] for cid in partition}
    for r in strategy:
        local = _localize(system, r)
        if local is None:
            raise ContextualizationError(f"resolution {r.text} defeats a vulnerability foreign to its conflict's context")
        images[system.owner_of(r.conflict.arguments[0].conclusion)].append(local)
    system = system.with_strategies({cid: Strategy(rs) for cid, rs in images.items()})
    if monolithic(system)[1] != strategy:
        raise ContextualizationError("strategy is not closed under contextual versions of its conflicts")
    return system


# ------------------------------------------------------------- transport

@dataclass(frozen=True)
class Query:
    source: str
    target: str
    literal: Literal
    mode: Mode
    cid: str
    depth: int = 1

    def to_wire(self) -> dict:
        return {"type": "query", "target": self.target, "literal": str(self.literal),
                "mode": self.mode.value, "cid": self.cid}


@dataclass(frozen=True)
class Answer:
    cid: str
    success: bool
    cause: str | None = None  # "timeout" when the simulated network drops the query
    result: dict | None = field(default=None, compare=False)

    def to_wire(self) -> dict:
        out = {"type": "answer", "cid": self.cid, "success": self.success}
        if self.cause:
            out["cause"] = self.cause
        return out


Handler = Callable[[Query], Answer]


class SimulatedNetwork:
    """In-process request/response transport.

    Queries sent together are delivered in ``delivery`` order: ``"fifo"``,
    ``"lifo"`` or ``"random"`` (seeded). ``timeouts`` lists
    ``(target, literal)`` pairs whose queries are answered with a timeout.
    """

    def __init__(self, delivery: str = "fifo", seed: int = 0,
                 timeouts: Iterable[tuple[str, str]] = ()):
        if delivery not in ("fifo", "lifo", "random"):
            raise ValueError(f"unknown delivery order {delivery!r}")
        self.delivery = delivery
        self.rng = random.Random(seed)
        self.timeouts = {(t, str(l)) for t, l in timeouts}
        self.handlers: dict[str, Handler] = {}
        self.log: list[dict] = []
        self.max_depth = 0
        self._counter = 0
        self._lock = threading.Lock()

    def register(self, target: str, handler: Handler):
        self.handlers[target] = handler

    def new_cid(self) -> str:
        with self._lock:
            self._counter += 1
            return f"q{self._counter}"

    def send(self, query: Query) -> Answer:
        return self.send_all([query])[0]

    def send_all(self, queries: list[Query]) -> list[Answer]:
        for q in queries:
            if q.target not in self.handlers:
                raise UnknownContextError(q.target)
        order = list(range(len(queries)))
        if self.delivery == "lifo":
            order.reverse()
        elif self.delivery == "random":
            self.rng.shuffle(order)
        answers: dict[str, Answer] = {}
        for i in order:
            q = queries[i]
            self.log.append(q.to_wire())
            self.max_depth = max(self.max_depth, q.depth)
            if (q.target, str(q.literal)) in self.timeouts:
                a = Answer(q.cid, False, "timeout")
            else:
                a = self.handlers[q.target](q)
            if a.cid in answers:
                raise RuntimeError(f"duplicate answer for {a.cid}")
            answers[a.cid] = a
            self.log.append(a.to_wire())
        return [answers[q.cid] for q in queries]


# ------------------------------------------------------- contextual games

@dataclass
class ContextualResult:
    context: str
    literal: Literal
    mode: Mode
    proof: LiteralResult

    @property
    def success(self) -> bool:
        return self.proof.success

    @property
    def reason(self) -> str:
        return self.proof.reason

    @property
    def game(self):
        return self.proof.game.tree if self.proof.game else None

    def to_json(self) -> dict:
        out = {"context": self.context, "literal": str(self.literal), "mode": self.mode.value,
               "success": self.success, "reason": self.reason}
        if self.proof.game is not None:
            tree = self.proof.game.tree
            out["game"] = {"mode": tree.mode.value, "argument": tree.argument.text,
                           "root": _node_json(tree.root)}
        else:
            out["attempts"] = [
                {"argument": g.argument.text,
                 "losing_branches": [[m.text() for m in b] for b in g.losing_branches[:20]]}
                for g in self.proof.attempts]
        return out


def _node_json(n: GameNode) -> dict:
    out = {"player": n.move.player.value,
           "resolution": None if n.move.resolution is None else n.move.resolution.to_json(),
           "claim": sorted_claim(n.move.claim)}
    if n.queries:
        out["queries"] = {str(l): n.answers[l] for l in sorted(n.queries, key=str)}
        out["query_success"] = n.query_success
    out["children"] = [_node_json(c) for c in n.children]
    return out


class ContextService:
    """Answers acceptance queries for one context, one at a time."""

    def __init__(self, system: MultiContextSystem, context: Context, network: SimulatedNetwork):
        self.system = system
        self.context = context
        self.network = network
        self.cache: dict[tuple[Literal, Mode], ContextualResult] = {}
        self._lock = threading.Lock()

    def handle(self, query: Query) -> Answer:
        if query.depth > len(self.system):
            raise QueryError(f"query depth {query.depth} exceeds the number of contexts")
        result = self.prove(query.literal, query.mode, query.depth)
        return Answer(query.cid, result.success, None, result.to_json())

    def prove(self, literal: Literal, mode: Mode, depth: int = 0) -> ContextualResult:
        literal = literal.with_context(None)
        if literal.atom not in self.context.vocabulary:
            raise QueryError(f"context {self.context.id} does not own {literal}")
        key = (literal, mode)
        with self._lock:
            if key not in self.cache:
                self.cache[key] = self._prove(literal, mode, depth)
            return self.cache[key]

    def _prove(self, literal: Literal, mode: Mode, depth: int) -> ContextualResult:
        ctx = self.context

        def hook_factory(arg: Argument):
            def hook(node: GameNode) -> bool:
                m = node.move
                if m.resolution is None:
                    lits = arg.foreign_literals
                else:
                    a, b = m.resolution.conflict.arguments
                    lits = a.foreign_literals | b.foreign_literals
                node.queries = frozenset(lits)
                if not lits:
                    return True
                sem = mode if m.player is Player.PRO else mode.flipped()
                ordered = sorted(lits, key=str)
                queries = [Query(ctx.id, self.system.owner_of(l), l, sem, self.network.new_cid(), depth + 1)
                           for l in ordered]
                answers = self.network.send_all(queries)
                node.answers = {l: {"context": q.target, "mode": sem.value, "success": a.success,
                                    **({"cause": a.cause} if a.cause else {}),
                                    **({"result": a.result} if a.result else {})}
                                for l, q, a in zip(ordered, queries, answers)}
                node.query_success = all(a.success for a in answers)
                return node.query_success
            return hook

        proof = prove_literal(ctx.theory, ctx.strategy, literal, mode, query_hook_factory=hook_factory)
        return ContextualResult(ctx.id, literal, mode, proof)


class ContextualProver:
    """Runs contextual games over a simulated network of context services."""

    def __init__(self, system: MultiContextSystem, network: SimulatedNetwork | None = None):
        cycle = find_cycle(system)
        if cycle is not None:
            raise CyclicSystemError(cycle)
        self.system = system
        self.network = network or SimulatedNetwork()
        self.services = {c.id: ContextService(system, c, self.network) for c in system}
        for cid, service in self.services.items():
            self.network.register(cid, service.handle)

    def prove_contextual(self, context: str, literal: Literal, mode: Mode | str) -> ContextualResult:
        return self.services[self.system[context].id].prove(literal, Mode(mode))

    def prove_in_system(self, literal: Literal, mode: Mode | str) -> ContextualResult:
        return self.prove_contextual(self.system.owner_of(literal), literal, mode)


def prove_contextual(system: MultiContextSystem, context: str, literal: Literal,
                     mode: Mode | str = Mode.SKEPTICAL,
                     network: SimulatedNetwork | None = None) -> ContextualResult:
    return ContextualProver(system, network).prove_contextual(context, literal, mode)


def prove_in_system(system: MultiContextSystem, literal: Literal, mode: Mode | str = Mode.SKEPTICAL,
                    network: SimulatedNetwork | None = None) -> ContextualResult:
    return ContextualProver(system, network).prove_in_system(literal, mode)


# ---------------------------------------------------------------- config

def load_config(path: str | Path) -> MultiContextSystem:
    """Load a system from a JSON config; program and strategy paths are
    relative to the config file."""
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or not isinstance(doc.get("contexts"), list):
        raise ContextError('config must be an object with a "contexts" list')
    blocks, strategies = [], {}
    for entry in doc["contexts"]:
        cid = entry["id"]
        program = parse_program((path.parent / entry["program"]).read_text(encoding="utf-8"))
        blocks.append((cid, entry["vocabulary"], program))
        spec = entry.get("strategy", "full")
        if spec not in ("full", "empty"):
            spec = json.loads((path.parent / spec).read_text(encoding="utf-8"))
        strategies[cid] = spec
    return MultiContextSystem.build(blocks, strategies, bool(doc.get("allow_strict_mapping", False)))


# ---------------------------------------------------------------- export

def result_to_text(doc: dict, indent: int = 0) -> str:
    """Render ``ContextualResult.to_json()`` with nested sub-game answers."""
    pad = "  " * indent
    verdict = "proved" if doc["success"] else doc["reason"]
    lines = [f"{pad}{doc['context']}: {doc['literal']} ({doc['mode']}): {verdict}"]
    counter = [0]

    def node(n: dict, depth: int):
        counter[0] += 1
        res = "_"
        if n["resolution"] is not None:
            a, b = n["resolution"]["conflict"]
            res = f"({{{a}, {b}}}, {n['resolution']['vulnerability']})"
        player = n["player"][0]
        line = f"{pad}{'  ' * (depth + 1)}m{counter[0]} = ({player}, {res}, {{{', '.join(n['claim'])}}})"
        if "queries" in n:
            line += f", Q = {{{', '.join(n['queries'])}}} ({'ok' if n['query_success'] else 'failed'})"
        lines.append(line)
        for lit, ans in n.get("queries", {}).items():
            cause = f", {ans['cause']}" if "cause" in ans else ""
            lines.append(f"{pad}{'  ' * (depth + 2)}query {lit} -> {ans['context']} ({ans['mode']}): "
                         f"{'yes' if ans['success'] else 'no'}{cause}")
            if "result" in ans:
                lines.append(result_to_text(ans["result"], indent + depth + 3).rstrip("\n"))
        for c in n["children"]:
            node(c, depth + 1)

    if "game" in doc:
        node(doc["game"]["root"], 0)
    for attempt in doc.get("attempts", []):
        lines.append(f"{pad}  argument {attempt['argument']} fails:")
        for branch in attempt["losing_branches"]:
            lines.append(f"{pad}    " + " ; ".join(branch))
    return "\n".join(lines) + "\n"
