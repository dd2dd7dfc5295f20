import random

import pytest
from hypothesis import given

from gen import X, random_prenex, random_structure, seeds
from gamewit.corpus import fig1
from gamewit.games import (BoundViolation, ConstFalsifier, GameTree, LStrategy,
                           MinimaxFalsifier, Move, RandomFalsifier, ScriptFalsifier,
                           StrategyError, TableFalsifier, align_strategy,
                           all_oblivious_falsifiers, falsifier_range, game_shape,
                           make_lstrategy, minimax_check, minimax_counterexample, node_wins,
                           play_tree_exploration, print_strategy, read_strategy,
                           truthifier_range, unbounded_to_bounded)
from gamewit.semantics import Board, CapExceeded, eval_formula
from gamewit.sexpr import parse_term
from gamewit.syntax import App, Var
from gamewit.transforms import imp_translate


def game_value(board, shape, x, labels, bounded):
    """Brute-force value of the evaluation game (test oracle)."""
    if len(labels) == shape.k:
        return node_wins(board, shape, x, labels)
    d = board.structure.d
    tr = truthifier_range(board, shape, x, labels, bounded)
    for m in (range(d) if tr is None else tr):
        fr = falsifier_range(board, shape, x, labels, m, bounded)
        if all(game_value(board, shape, x, labels + [(m, n)], bounded)
               for n in (range(d) if fr is None else fr)):
            return True
    return False


@given(seeds())
def test_determinacy_bounded(seed):
    rng = random.Random(seed)
    f = random_prenex(rng, rng.randint(1, 2))
    shape = game_shape(f, bounded=True)
    s = random_structure(rng, rng.randint(1, 3))
    for n0 in range(s.d):
        b = Board(s, n0)
        assert game_value(b, shape, X, [], True) == eval_formula(s, f, {X: n0})


@given(seeds())
def test_determinacy_unbounded(seed):
    rng = random.Random(seed)
    f = random_prenex(rng, rng.randint(1, 2))
    shape = game_shape(f, bounded=False)
    s = random_structure(rng, rng.randint(1, 3))
    for n0 in range(s.d):
        b = Board(s, n0)
        assert game_value(b, shape, X, [], False) == eval_formula(s, imp_translate(f), {X: n0})


# ------------------------------------------------ prime-interval example

def test_fig1_transcript():
    sig, f, board, strat, script = fig1()
    shape = game_shape(f)
    tree, won, rounds, log = play_tree_exploration(board, shape, strat, ScriptFalsifier(script))
    assert won and rounds == 2
    assert log == ["round 1: node 1, truthifier 4, falsifier 2",
                   "round 2: node 1, truthifier 5, falsifier 3"]
    assert tree.labels == ((4, 2), (5, 3)) and tree.parents == (1, 1)
    assert "(3) via (5, 3)" in tree.render()


def test_fig1_minimax():
    sig, f, board, strat, _ = fig1()
    shape = game_shape(f)
    assert minimax_check(board, shape, strat)
    short = LStrategy(strat.x, 1, strat.moves[:1])
    assert minimax_counterexample(board, shape, short) == [2]


def test_fig1_other_starting_points():
    sig, f, board, strat, _ = fig1()
    shape = game_shape(f)
    # from n0 = 6 on neither witness is at least n0
    for n0, expect in [(3, True), (4, True), (5, True)]:
        assert minimax_check(Board(board.structure, n0), shape, strat) is expect
    for n0 in (6, 8):
        assert not minimax_check(Board(board.structure, n0), shape, strat)


def test_bound_violation_is_not_a_loss():
    sig, f, board, strat, _ = fig1()
    shape = game_shape(f)
    with pytest.raises(BoundViolation):
        play_tree_exploration(Board(board.structure, 1), shape, strat)
    # the guarded game has no bounds to violate; the move just fails the guard
    tree, won, _, _ = play_tree_exploration(Board(board.structure, 1), game_shape(f, False),
                                            strat, ConstFalsifier(0), bounded=False)
    assert not won


def test_unbounded_to_bounded_on_fig1():
    sig, f, board, strat, _ = fig1()
    x = strat.x
    # first move far out of range, then the right answer
    bad = make_lstrategy(x, [(App("1"), 1), (parse_term("(dbl (dbl (dbl 1)))", sig), 1),
                             (App("five"), 1)])
    bad = LStrategy(x, 1, bad.moves)
    conv = unbounded_to_bounded(bad, f)
    shape = game_shape(f)
    assert minimax_check(board, shape, conv, bounded=True)
    tree, won, _, _ = play_tree_exploration(board, shape, conv, ConstFalsifier(0))
    assert won
    assert all(m <= 6 for m, _ in tree.labels)


def test_minimax_falsifier_finds_the_refutation():
    sig, f, board, strat, _ = fig1()
    shape = game_shape(f)
    short = LStrategy(strat.x, 1, strat.moves[:1])
    _, won, _, _ = play_tree_exploration(board, shape, short, MinimaxFalsifier(short, shape))
    assert not won
    _, won, _, _ = play_tree_exploration(board, shape, strat, MinimaxFalsifier(strat, shape))
    assert won


def test_cap():
    sig, f, board, strat, _ = fig1()
    with pytest.raises(CapExceeded):
        minimax_check(board, game_shape(f), strat, cap=10)


# ------------------------------------------------------- random games

def _random_strategy(rng, shape, x, length):
    moves = []
    depth = {1: 0}
    known = [x]
    for i in range(length):
        open_nodes = [n for n, dpt in depth.items() if dpt < shape.k]
        r = rng.choice(open_nodes)
        pool = known + [App("0"), App("1")]
        p = rng.choice(pool)
        if rng.random() < 0.4:
            p = App("f", (p,))
        own, rep = Var("m", 100 + 2 * i), Var("n", 101 + 2 * i)
        moves.append(Move(p, r, own, rep))
        depth[2 + i] = depth[r] + 1
        known += [own, rep]
    return LStrategy(x, 1, tuple(moves))


@given(seeds())
def test_minimax_counterexample_is_genuine(seed):
    rng = random.Random(seed)
    f = random_prenex(rng, rng.randint(1, 2), bounded=False)
    shape = game_shape(f, bounded=False)
    s = random_structure(rng, rng.randint(1, 3))
    strat = _random_strategy(rng, shape, X, rng.randint(1, 3))
    b = Board(s, rng.randrange(s.d))
    cex = minimax_counterexample(b, shape, strat, bounded=False)
    if cex is not None:
        _, won, _, _ = play_tree_exploration(b, shape, strat, ScriptFalsifier(cex), bounded=False)
        assert not won
    else:
        for k in range(5):
            _, won, _, _ = play_tree_exploration(b, shape, strat, RandomFalsifier(k), bounded=False)
            assert won


# ------------------------------------------------------------ pieces

def test_game_tree():
    t = GameTree().add(1, 4, 2).add(1, 5, 3).add(2, 0, 1)
    assert t.size == 4
    assert t.path(4) == [(4, 2), (0, 1)]
    assert t.path_nodes(4) == [1, 2, 4]
    assert t.snapshot() == "1:4:2;1:5:3;2:0:1"
    with pytest.raises(StrategyError):
        t.add(9, 0, 0)


def test_strategy_validation():
    x = Var("x", 1)
    with pytest.raises(StrategyError):
        LStrategy(x, 1, (Move(App("0"), 2, Var("m", 2), Var("n", 3)),))
    with pytest.raises(StrategyError):
        LStrategy(x, 1, (Move(Var("n", 3), 1, Var("m", 2), Var("n", 3)),))


def test_strategy_file_round_trip():
    _, f, _, strat, _ = fig1()
    text = print_strategy(strat)
    back = read_strategy(text, fig1()[0])
    assert back == strat


def test_strategy_file_defaults_and_alignment():
    sig = fig1()[0]
    st = read_strategy("(strategy (d 1) (moves (p (dbl x)) (r 1) (p (pred x)) (r 1)))", sig)
    assert st.length == 2 and st.x.name == "x"
    x = Var("x", 42)
    al = align_strategy(st, x)
    assert al.x == x and al.moves[0].p == App("dbl", (x,))


def test_strategy_file_errors():
    sig = fig1()[0]
    with pytest.raises(ValueError):
        read_strategy("(strategy (moves (r 1)))", sig)
    with pytest.raises(ValueError):
        read_strategy("(strategy (moves (p (nope x)) (r 1)))", sig)


def test_oblivious_enumeration_counts():
    assert len(list(all_oblivious_falsifiers(2, 1))) == 2 ** 2
    assert len(list(all_oblivious_falsifiers(2, 2))) == 2 ** 6


def test_table_falsifier_lookup():
    sig, f, board, strat, _ = fig1()
    fal = TableFalsifier({("", 4): 2, ("*", 5): 3})
    _, won, rounds, _ = play_tree_exploration(board, game_shape(f), strat, fal)
    assert won and rounds == 2


def test_falsifier_replies_are_clamped():
    sig, f, board, strat, _ = fig1()
    tree, _, _, _ = play_tree_exploration(board, game_shape(f), strat, ConstFalsifier(12))
    # z <= pred(4) = 3: 12 is invalid, 0 is valid
    assert tree.labels[0] == (4, 0)
