import numpy as np
import pytest

from games.parity import (
    MalformedGameError,
    ParityGame,
    Player,
    Solution,
    attractor,
    dump_pgsolver,
    solve_bruteforce,
    solve_zielonka,
    verify_strategy,
)
from qctl_utils.random_instances import random_parity_game


def cycle(colour: int, owner: Player = Player.EVE) -> ParityGame:
    g = ParityGame()
    v = g.add_position(owner, colour)
    g.add_move(v, v)
    return g


def test_player_of_colour():
    assert Player.of_colour(4) == Player.EVE
    assert Player.of_colour(3) == Player.ADAM
    assert Player.EVE.opponent == Player.ADAM


@pytest.mark.parametrize('colour, winner', [(0, Player.EVE), (1, Player.ADAM), (6, Player.EVE)])
def test_single_loop(colour, winner):
    assert solve_zielonka(cycle(colour)).winner == [winner]


def test_deadlocks_carry_their_winner():
    g = ParityGame()
    eve = g.add_position(Player.EVE, 0)
    won = g.add_position(Player.ADAM, 3, winner=Player.EVE)
    lost = g.add_position(Player.EVE, 2, winner=Player.ADAM)
    g.add_move(eve, won)
    g.add_move(eve, lost)
    solution = solve_zielonka(g)
    assert solution.winner == [Player.EVE, Player.EVE, Player.ADAM]
    assert solution.strategy[eve] == won
    assert verify_strategy(g, solution)


def test_max_colour_decides():
    # Adam chooses between a 1-2 cycle and a 3-cycle
    g = ParityGame()
    v = g.add_position(Player.ADAM, 0)
    two = g.add_position(Player.EVE, 2)
    three = g.add_position(Player.EVE, 3)
    g.add_move(v, two)
    g.add_move(v, three)
    g.add_move(two, v)
    g.add_move(three, v)
    assert solve_zielonka(g).winner == [Player.ADAM] * 3
    assert attractor(g, {three}, Player.ADAM) == {v, two, three}
    assert attractor(g, {three}, Player.EVE) == {three}


def test_validate():
    g = ParityGame()
    g.add_position(Player.EVE, 0)
    with pytest.raises(MalformedGameError):
        g.validate()
    with pytest.raises(MalformedGameError):
        solve_zielonka(cycle(-1))


def test_zielonka_matches_bruteforce():
    rng = np.random.default_rng(7)
    for _ in range(100):
        g = random_parity_game(rng)
        solution = solve_zielonka(g)
        assert solution.winner == solve_bruteforce(g)
        assert verify_strategy(g, solution)


def test_verify_strategy_rejects_bad_certificates():
    g = ParityGame()
    v = g.add_position(Player.EVE, 0)
    odd = g.add_position(Player.EVE, 1)
    g.add_move(v, v)
    g.add_move(v, odd)
    g.add_move(odd, odd)
    solution = solve_zielonka(g)
    assert solution.winner == [Player.EVE, Player.ADAM]
    assert not verify_strategy(g, Solution(solution.winner, {v: odd}))
    assert not verify_strategy(g, Solution([Player.EVE, Player.EVE], {v: v, odd: odd}))


def test_dump_pgsolver():
    g = cycle(2, Player.ADAM)
    assert dump_pgsolver(g) == 'parity 0;\n0 2 1 0 "0";\n'


def shifted(g: ParityGame, shift: int, swap: bool) -> ParityGame:
    h = ParityGame()
    for v in range(len(g)):
        owner = g.owners[v].opponent if swap else g.owners[v]
        winner = g.deadlock_winner.get(v)
        if winner is not None and swap:
            winner = winner.opponent
        h.add_position(owner, g.colours[v] + shift, winner=winner)
    for v, succ in enumerate(g.successors):
        for w in succ:
            h.add_move(v, w)
    return h


def test_colour_shifts():
    rng = np.random.default_rng(15)
    for _ in range(50):
        g = random_parity_game(rng)
        winner = solve_zielonka(g).winner
        assert solve_zielonka(shifted(g, 2, False)).winner == winner
        assert solve_zielonka(shifted(g, 1, True)).winner == [w.opponent for w in winner]
