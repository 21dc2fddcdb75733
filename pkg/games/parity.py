from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

import networkx as nx

from qctl_utils.errors import QctlError


class Player(enum.IntEnum):
    EVE = 0
    ADAM = 1

    @property
    def opponent(self) -> Player:
        return Player(1 - self)

    @classmethod
    def of_colour(cls, colour: int) -> Player:
        """The player a colour favours under the max-even condition."""
        return cls(colour % 2)


class MalformedGameError(QctlError):
    pass


# ====================================================================
# Arena
# --------------------------------------------------------------------
# A play is won by Eve iff the maximum colour seen infinitely often is
# even. Deadlocks carry the winner explicitly.


class ParityGame:
    def __init__(self):
        self.owners: list[Player] = []
        self.colours: list[int] = []
        self.successors: list[list[int]] = []
        self.names: list[Hashable] = []
        self.deadlock_winner: dict[int, Player] = {}
        self.initial: int | None = None

    def __len__(self):
        return len(self.owners)

    def add_position(self, owner: Player, colour: int, name: Hashable = None,
                     winner: Player | None = None) -> int:
        v = len(self.owners)
        self.owners.append(Player(owner))
        self.colours.append(int(colour))
        self.successors.append([])
        self.names.append(name if name is not None else v)
        if winner is not None:
            self.deadlock_winner[v] = Player(winner)
        if self.initial is None:
            self.initial = v
        return v

    def add_move(self, u: int, v: int) -> None:
        if v not in self.successors[u]:
            self.successors[u].append(v)

    def validate(self) -> None:
        for v in range(len(self)):
            if self.colours[v] < 0:
                raise MalformedGameError(f'position {v} has negative colour {self.colours[v]}')
            if v in self.deadlock_winner and self.successors[v]:
                raise MalformedGameError(f'position {v} is tagged as a deadlock but has moves')
            if v not in self.deadlock_winner and not self.successors[v]:
                raise MalformedGameError(f'position {v} has no move and no winner tag')
            for w in self.successors[v]:
                if not 0 <= w < len(self):
                    raise MalformedGameError(f'move {v} -> {w} leaves the arena')

    def normalised(self) -> tuple[list[list[int]], list[int]]:
        """Moves and colours with every deadlock turned into a self-loop won by its tag."""
        successors = [list(s) for s in self.successors]
        colours = list(self.colours)
        for v, winner in self.deadlock_winner.items():
            successors[v] = [v]
            colours[v] = int(winner)
        return successors, colours


@dataclass
class Solution:
    winner: list[Player]
    strategy: dict[int, int] = field(default_factory=dict)

    def region(self, player: Player) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}


# ====================================================================
# Zielonka's recursive algorithm
# --------------------------------------------------------------------


class ZielonkaSolver:
    def __init__(self, game: ParityGame):
        game.validate()
        self.game = game
        self.owners = game.owners
        self.successors, self.colours = game.normalised()
        self.predecessors: list[list[int]] = [[] for _ in range(len(game))]
        for v, succ in enumerate(self.successors):
            for w in succ:
                self.predecessors[w].append(v)

    def attractor(self, region: set[int], target: Iterable[int], player: Player) -> tuple[set[int], dict[int, int]]:
        attr = {v for v in target if v in region}
        strategy = {}
        remaining = {}
        queue = deque(attr)
        while queue:
            v = queue.popleft()
            for u in self.predecessors[v]:
                if u not in region or u in attr:
                    continue
                if self.owners[u] == player:
                    attr.add(u)
                    strategy[u] = v
                    queue.append(u)
                else:
                    if u not in remaining:
                        remaining[u] = sum(1 for w in self.successors[u] if w in region)
                    remaining[u] -= 1
                    if remaining[u] == 0:
                        attr.add(u)
                        queue.append(u)
        return attr, strategy

    def solve_region(self, region: set[int]) -> tuple[list[set[int]], dict[int, int]]:
        if not region:
            return [set(), set()], {}
        d = max(self.colours[v] for v in region)
        player = Player.of_colour(d)
        opponent = player.opponent
        top = {v for v in region if self.colours[v] == d}
        attr, attr_strategy = self.attractor(region, top, player)
        sub_win, sub_strategy = self.solve_region(region - attr)
        if not sub_win[opponent]:
            win = [set(), set()]
            win[player] = set(region)
            strategy = {v: w for v, w in sub_strategy.items() if v in sub_win[player]}
            strategy.update(attr_strategy)
            for v in top:
                if self.owners[v] == player:
                    strategy[v] = min(w for w in self.successors[v] if w in region)
            return win, strategy
        back, back_strategy = self.attractor(region, sub_win[opponent], opponent)
        win, strategy = self.solve_region(region - back)
        win[opponent] |= back
        strategy.update({v: w for v, w in sub_strategy.items() if v in sub_win[opponent]})
        strategy.update(back_strategy)
        return win, strategy

    def solve(self) -> Solution:
        win, strategy = self.solve_region(set(range(len(self.game))))
        winner = [Player.EVE if v in win[Player.EVE] else Player.ADAM for v in range(len(self.game))]
        strategy = {v: w for v, w in strategy.items()
                    if self.owners[v] == winner[v] and v not in self.game.deadlock_winner}
        return Solution(winner, strategy)


def solve_zielonka(g: ParityGame) -> Solution:
    return ZielonkaSolver(g).solve()


def attractor(g: ParityGame, region: Iterable[int], player: Player) -> set[int]:
    """Positions from which ``player`` forces a visit to ``region``."""
    return ZielonkaSolver(g).attractor(set(range(len(g))), region, player)[0]


# ====================================================================
# Checks and oracles
# --------------------------------------------------------------------


def cycle_sources(graph: nx.DiGraph, colours: list[int], player: Player) -> set[int]:
    """Nodes that can reach a cycle whose maximum colour favours ``player``."""
    bad = set()
    for c in sorted({colours[v] for v in graph.nodes if colours[v] % 2 == player}):
        low = graph.subgraph([v for v in graph.nodes if colours[v] <= c])
        for scc in nx.strongly_connected_components(low):
            looping = len(scc) > 1 or any(low.has_edge(v, v) for v in scc)
            if looping and any(colours[v] == c for v in scc):
                bad |= scc
    sources = set(bad)
    for v in bad:
        sources |= nx.ancestors(graph, v)
    return sources


def verify_strategy(g: ParityGame, sol: Solution) -> bool:
    """Check that each player's strategy keeps every play in their region winning."""
    successors, colours = g.normalised()
    if len(sol.winner) != len(g):
        return False
    for player in Player:
        region = sol.region(player)
        graph = nx.DiGraph()
        graph.add_nodes_from(region)
        for v in region:
            if v in g.deadlock_winner:
                if g.deadlock_winner[v] != player:
                    return False
                graph.add_edge(v, v)
            elif g.owners[v] == player:
                w = sol.strategy.get(v)
                if w not in g.successors[v] or w not in region:
                    return False
                graph.add_edge(v, w)
            else:
                if any(w not in region for w in successors[v]):
                    return False
                graph.add_edges_from((v, w) for w in successors[v])
        if cycle_sources(graph, colours, player.opponent):
            return False
    return True


def solve_bruteforce(g: ParityGame) -> list[Player]:
    """Winner per position by trying every positional strategy of Eve.

    Against a fixed Eve strategy Adam wins from v iff he can reach a cycle
    with an odd maximum colour, which is a graph question.
    """
    g.validate()
    successors, colours = g.normalised()
    eve_positions = [v for v in range(len(g)) if g.owners[v] == Player.EVE]
    eve_wins = set()
    for choice in itertools.product(*(successors[v] for v in eve_positions)):
        sigma = dict(zip(eve_positions, choice))
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(g)))
        for v in range(len(g)):
            moves = [sigma[v]] if v in sigma else successors[v]
            graph.add_edges_from((v, w) for w in moves)
        eve_wins |= set(range(len(g))) - cycle_sources(graph, colours, Player.ADAM)
        if len(eve_wins) == len(g):
            break
    return [Player.EVE if v in eve_wins else Player.ADAM for v in range(len(g))]


def dump_pgsolver(g: ParityGame) -> str:
    successors, colours = g.normalised()
    lines = [f'parity {len(g) - 1};']
    for v in range(len(g)):
        succ = ','.join(str(w) for w in successors[v])
        lines.append(f'{v} {colours[v]} {int(g.owners[v])} {succ} "{g.names[v]}";')
    return '\n'.join(lines) + '\n'
