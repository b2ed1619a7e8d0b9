"""Skeptical and credulous argument games.

A game for an argument ``A`` is a tree of moves ``(player, resolution, claim)``
rooted at ``(PRO, _, vuls(A))``. The opponent must play every resolution that
hits a claim of the proponent; the proponent picks one reply per opponent
move. The prover below searches over the proponent's choices with
backtracking and returns the first tree in which the proponent wins every
branch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator

from .arguments import Argument, Theory, Vulnerability, parse_vulnerability
from .language import Literal, Program
from .resolution import ConflictResolution, Strategy, sorted_claim
from .semantics import Mode

MAX_TRACE = 2000


class Player(str, Enum):
    PRO = "PRO"
    OPP = "OPP"

    @property
    def short(self) -> str:
        return self.value[0]

    @property
    def other(self) -> Player:
        return Player.OPP if self is Player.PRO else Player.PRO


@dataclass(frozen=True)
class Move:
    player: Player
    resolution: ConflictResolution | None
    claim: frozenset[Vulnerability]

    @property
    def is_root(self) -> bool:
        return self.resolution is None

    def attacks(self, other: Move) -> bool:
        return self.resolution is not None and self.resolution.vulnerability in other.claim

    def text(self) -> str:
        res = "_" if self.resolution is None else self.resolution.text
        return f"({self.player.short}, {res}, {{{', '.join(sorted_claim(self.claim))}}})"


@dataclass
class GameNode:
    move: Move
    children: list[GameNode] = field(default_factory=list)
    # Foreign literals queried by this move and whether all those queries
    # succeeded; both stay empty/None outside multi-context games.
    queries: frozenset[Literal] = frozenset()
    query_success: bool | None = None
    answers: dict = field(default_factory=dict, compare=False, repr=False)

    def walk(self, depth: int = 0) -> Iterator[tuple[int, GameNode]]:
        yield depth, self
        for c in self.children:
            yield from c.walk(depth + 1)

    def branches(self, prefix: tuple = ()) -> Iterator[tuple[GameNode, ...]]:
        path = prefix + (self,)
        if not self.children:
            yield path
        for c in self.children:
            yield from c.branches(path)

    def copy(self) -> GameNode:
        return GameNode(self.move, [c.copy() for c in self.children], self.queries,
                        self.query_success, dict(self.answers))


@dataclass
class GameTree:
    root: GameNode
    mode: Mode
    argument: Argument | None = field(default=None, compare=False)

    def branches(self) -> list[tuple[GameNode, ...]]:
        return list(self.root.branches())

    def size(self) -> int:
        return sum(1 for _ in self.root.walk())


@dataclass
class GameResult:
    success: bool
    argument: Argument
    mode: Mode
    tree: GameTree | None = None
    losing_branches: list[tuple[Move, ...]] = field(default_factory=list)
    explored: int = 0


@dataclass
class LiteralResult:
    literal: Literal
    mode: Mode
    reason: str  # "proved" | "unproved" | "no-argument"
    game: GameResult | None = None
    attempts: list[GameResult] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.reason == "proved"


QueryHook = Callable[[GameNode], bool]


def _pro_compatible(s: ConflictResolution, used, root_claim) -> bool:
    """No proponent move may defeat another proponent move, the root included."""
    if s in used:
        return True
    if s.vulnerability in s.vulnerabilities or s.vulnerability in root_claim:
        return False
    for t in used:
        if s.vulnerability in t.vulnerabilities or t.vulnerability in s.vulnerabilities:
            return False
    return True


class _Search:
    def __init__(self, strategy: Strategy, mode: Mode, root_claim: frozenset,
                 query_hook: QueryHook | None = None):
        self.strategy = strategy
        self.mode = mode
        self.root_claim = root_claim
        self.query_hook = query_hook
        members = strategy.resolutions
        self.hits = {r: [s for s in members if s.vulnerability in r.vulnerabilities] for r in members}
        self.root_hits = [s for s in members if s.vulnerability in root_claim]
        self.pro_used: dict[ConflictResolution, int] = {}
        self.failed: set = set()
        self.losing: list[tuple[Move, ...]] = []
        self.explored = 0

    def _queries_ok(self, node: GameNode) -> bool:
        return True if self.query_hook is None else self.query_hook(node)

    def _pro_admissible(self, s: ConflictResolution) -> bool:
        return _pro_compatible(s, self.pro_used, self.root_claim)

    def _record_loss(self, path: tuple[Move, ...]):
        if len(self.losing) < MAX_TRACE:
            self.losing.append(path)

    def run(self, root: GameNode) -> Iterator[None]:
        yield from self._opp_turn(root, self.root_hits, frozenset(), frozenset(), (root.move,))

    def _opp_turn(self, pro_node: GameNode, attackers, pro_branch, opp_branch, path) -> Iterator[None]:
        """Attach every legal opponent reply, then solve each open one."""
        open_nodes = []
        for r in attackers:
            if self.mode is Mode.CREDULOUS and r in opp_branch:
                continue
            child = GameNode(Move(Player.OPP, r, r.vulnerabilities))
            pro_node.children.append(child)
            self.explored += 1
            # A failed opponent query wins the dialogue for the proponent.
            if self._queries_ok(child):
                open_nodes.append(child)
        yield from self._solve_all(open_nodes, 0, pro_branch, opp_branch, path)
        del pro_node.children[:]

    def _solve_all(self, open_nodes, i, pro_branch, opp_branch, path) -> Iterator[None]:
        if i == len(open_nodes):
            yield
            return
        node = open_nodes[i]
        for _ in self._pro_turn(node, pro_branch, opp_branch | {node.move.resolution}, path + (node.move,)):
            yield from self._solve_all(open_nodes, i + 1, pro_branch, opp_branch, path)

    def _pro_turn(self, opp_node: GameNode, pro_branch, opp_branch, path) -> Iterator[None]:
        r = opp_node.move.resolution
        history = pro_branch if self.mode is Mode.SKEPTICAL else opp_branch
        key = (r, history, frozenset(self.pro_used))
        if key in self.failed:
            return
        won = False
        tried = False
        for s in self.hits[r]:
            if self.mode is Mode.SKEPTICAL and s in pro_branch:
                continue
            if not self._pro_admissible(s):
                continue
            node = GameNode(Move(Player.PRO, s, s.vulnerabilities))
            self.explored += 1
            if not self._queries_ok(node):
                continue
            tried = True
            self.pro_used[s] = self.pro_used.get(s, 0) + 1
            opp_node.children.append(node)
            for _ in self._opp_turn(node, self.hits[s], pro_branch | {s}, opp_branch, path + (node.move,)):
                won = True
                yield
            opp_node.children.pop()
            self.pro_used[s] -= 1
            if not self.pro_used[s]:
                del self.pro_used[s]
        if not tried:
            self._record_loss(path)
        if not won:
            self.failed.add(key)


def legal_responses(strategy: Strategy, branch: list[Move], mode: Mode | str,
                    tree: GameTree | None = None) -> list[Move]:
    """Moves that may extend ``branch``, whose first move is the root.

    ``tree`` supplies the proponent moves already played elsewhere, which a
    new proponent move must not defeat or be defeated by.
    """
    mode = Mode(mode)
    last = branch[-1]
    player = last.player.other
    out = []
    for r in strategy:
        if r.vulnerability not in last.claim:
            continue
        seen = {m.resolution for m in branch if m.player is player}
        if player is Player.OPP:
            if mode is Mode.CREDULOUS and r in seen:
                continue
        else:
            if mode is Mode.SKEPTICAL and r in seen:
                continue
            played = [m.resolution for m in branch if m.player is Player.PRO and m.resolution is not None]
            if tree is not None:
                played += [n.move.resolution for _, n in tree.root.walk()
                           if n.move.player is Player.PRO and n.move.resolution is not None]
            if not _pro_compatible(r, set(played), branch[0].claim):
                continue
        out.append(Move(player, r, r.vulnerabilities))
    return out


def root_node(argument: Argument) -> GameNode:
    return GameNode(Move(Player.PRO, None, argument.vulnerabilities))


def prove(theory: Theory | Program, strategy: Strategy, argument: Argument,
          mode: Mode | str = Mode.SKEPTICAL, query_hook: QueryHook | None = None) -> GameResult:
    """Search for a successful game for ``argument``.

    ``query_hook`` is called once per move entering the tree; it may record
    queries on the node and returns whether they all succeeded. It is used by
    multi-context games and is ``None`` otherwise.
    """
    mode = Mode(mode)
    root = root_node(argument)
    search = _Search(strategy, mode, argument.vulnerabilities, query_hook)
    result = GameResult(False, argument, mode)
    if query_hook is None or query_hook(root):
        for _ in search.run(root):
            result.success = True
            result.tree = GameTree(_snapshot(root), mode, argument)
            break
    result.losing_branches = search.losing
    result.explored = search.explored
    return result


def _snapshot(node: GameNode) -> GameNode:
    return node.copy()


def prove_literal(theory: Theory | Program, strategy: Strategy, literal: Literal,
                  mode: Mode | str = Mode.SKEPTICAL, query_hook_factory=None) -> LiteralResult:
    """Try every argument concluding ``literal`` in canonical order."""
    mode = Mode(mode)
    literal = literal.with_context(None)
    if not isinstance(theory, Theory):
        theory = Theory(theory, queried=[literal])
    candidates = theory.arguments_for(literal)
    if not candidates:
        return LiteralResult(literal, mode, "no-argument")
    attempts = []
    for arg in candidates:
        hook = query_hook_factory(arg) if query_hook_factory else None
        g = prove(theory, strategy, arg, mode, hook)
        attempts.append(g)
        if g.success:
            return LiteralResult(literal, mode, "proved", g, attempts)
    return LiteralResult(literal, mode, "unproved", None, attempts)


def validate_game(tree: GameTree, strategy: Strategy) -> list[str]:
    """Independent structural check of a game tree; returns violations.

    Checks alternation, that every move attacks its parent, opponent
    completeness, proponent non-defeat across the tree, the repetition rule
    of the mode, that proponent queries succeed, and that the proponent wins
    every branch.
    """
    problems = []
    root = tree.root
    if root.move.player is not Player.PRO or root.move.resolution is not None:
        problems.append("root must be (PRO, _, claim)")
    if tree.argument is not None and root.move.claim != tree.argument.vulnerabilities:
        problems.append("root claim differs from the argument's vulnerabilities")

    pro_moves = [n.move for _, n in root.walk() if n.move.player is Player.PRO]
    for m in pro_moves:
        for m2 in pro_moves:
            if m.resolution is not None and m.resolution.vulnerability in m2.claim:
                problems.append(f"proponent move {m.text()} defeats {m2.text()}")

    for _, n in root.walk():
        if n.move.player is Player.PRO and n.query_success is False:
            problems.append(f"proponent move {n.move.text()} rests on a failed query")

    def visit(node: GameNode, pro_seen: frozenset, opp_seen: frozenset):
        for c in node.children:
            m = c.move
            if m.player is node.move.player:
                problems.append(f"players do not alternate at {m.text()}")
            if m.resolution is None:
                problems.append("only the root may leave the resolution unspecified")
                continue
            if m.resolution not in strategy:
                problems.append(f"{m.resolution.text} is not in the strategy")
            if m.claim != m.resolution.vulnerabilities:
                problems.append(f"claim of {m.text()} is not vuls of its resolution")
            if not m.attacks(node.move):
                problems.append(f"{m.text()} does not attack its parent")
        if node.move.player is Player.PRO:
            present = {c.move.resolution for c in node.children}
            for r in strategy:
                if r.vulnerability not in node.move.claim:
                    continue
                if tree.mode is Mode.CREDULOUS and r in opp_seen:
                    continue
                if r not in present:
                    problems.append(f"opponent reply {r.text} missing under {node.move.text()}")
        elif not node.children and node.query_success is not False:
            problems.append(f"opponent wins the branch ending in {node.move.text()}")
        elif len(node.children) > 1:
            problems.append(f"proponent plays {len(node.children)} replies to {node.move.text()}")
        for c in node.children:
            r = c.move.resolution
            if c.move.player is Player.PRO:
                if tree.mode is Mode.SKEPTICAL and r in pro_seen:
                    problems.append(f"proponent repeats {r.text} in a skeptical game")
                visit(c, pro_seen | {r}, opp_seen)
            else:
                if tree.mode is Mode.CREDULOUS and r in opp_seen:
                    problems.append(f"opponent repeats {r.text} in a credulous game")
                visit(c, pro_seen, opp_seen | {r})

    visit(root, frozenset(), frozenset())
    return problems


# ---------------------------------------------------------------- export

def _node_json(node: GameNode) -> dict:
    m = node.move
    out = {
        "player": m.player.value,
        "resolution": None if m.resolution is None else m.resolution.to_json(),
        "claim": sorted_claim(m.claim),
    }
    if node.queries:
        out["queries"] = sorted(str(q) for q in node.queries)
        out["query_success"] = node.query_success
    out["children"] = [_node_json(c) for c in node.children]
    return out


def game_to_json(tree: GameTree) -> dict:
    doc = {"mode": tree.mode.value}
    if tree.argument is not None:
        doc["argument"] = tree.argument.text
    doc["root"] = _node_json(tree.root)
    return doc


def game_from_json(doc: dict, theory: Theory) -> GameTree:
    from .language import parse_literal
    from .resolution import strategy_from_json

    def node(d: dict) -> GameNode:
        r = None
        if d["resolution"] is not None:
            (r,) = strategy_from_json({"resolutions": [d["resolution"]]}, theory)
        claim = frozenset(parse_vulnerability(v) for v in d["claim"])
        n = GameNode(Move(Player(d["player"]), r, claim), [node(c) for c in d["children"]])
        if "queries" in d:
            n.queries = frozenset(parse_literal(q) for q in d["queries"])
            n.query_success = d["query_success"]
        return n

    arg = theory.argument(doc["argument"]) if "argument" in doc else None
    return GameTree(node(doc["root"]), Mode(doc["mode"]), arg)


def game_to_text(tree: GameTree) -> str:
    lines = []
    for i, (depth, node) in enumerate(tree.root.walk(), start=1):
        line = f"{'  ' * depth}m{i} = {node.move.text()}"
        if node.queries:
            verdict = "ok" if node.query_success else "failed"
            line += f", Q = {{{', '.join(sorted(str(q) for q in node.queries))}}} ({verdict})"
        lines.append(line)
    return "\n".join(lines) + "\n"


def game_to_dot(tree: GameTree) -> str:
    lines = ["digraph {"]
    ids = {}
    for i, (_, node) in enumerate(tree.root.walk(), start=1):
        ids[id(node)] = f"m{i}"
        m = node.move
        res = "_" if m.resolution is None else str(m.resolution.vulnerability)
        label = f"{m.player.short} : {res} : {{{', '.join(sorted_claim(m.claim))}}}"
        label = label.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  m{i} [label="{label}"];')
    for _, node in tree.root.walk():
        for c in node.children:
            lines.append(f"  {ids[id(node)]} -> {ids[id(c)]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_game(tree: GameTree, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(game_to_json(tree), indent=2, sort_keys=True) + "\n"
    if fmt == "dot":
        return game_to_dot(tree)
    if fmt == "text":
        return game_to_text(tree)
    raise ValueError(f"unknown game format {fmt!r}")


def moves_text(branch) -> list[str]:
    return [m.text() if isinstance(m, Move) else m.move.text() for m in branch]
