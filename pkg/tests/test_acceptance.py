"""Acceptance suite: one test per criterion, each printing a PASS or FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they happen;
they are also collected in the terminal summary.
"""
import functools
import itertools
import random
import time
from fractions import Fraction

from gen import X, Ids, random_formula, random_prenex, random_structure, random_term
from test_games import game_value
from test_nwlab import oracle_ok, random_instance
from test_transforms import exists_paths, same_everywhere
from gamewit.calculus import check_proof, count_rule
from gamewit.canonical import canonicalize, is_canonical
from gamewit.corpus import (DRINKER_SIG, all_cases, drinker, drinker_witness, fig1, fig2,
                            generated)
from gamewit.extract import extract_strategy, herbrand_extract, pgt_of, tree_to_sequential
from gamewit.games import (BoundViolation, LStrategy, Move, ObliviousFalsifier,
                           RandomFalsifier, ScriptFalsifier, all_oblivious_falsifiers,
                           game_shape, minimax_check, minimax_counterexample,
                           play_sequential, play_tree_exploration, unbounded_to_bounded)
from gamewit.nwlab import (choose_b, delta_random, expbias_bound_check, make_design,
                           maj_table, noise_stability, parity_table, rmaj_eval, table_of,
                           tribes_eval, verify_design)
from gamewit.semantics import Board, candidate_count, enumerate_structures
from gamewit.sexpr import Signature
from gamewit.syntax import App, Var
from gamewit.transforms import (desugar_to_imp, imp_translate, strong_or_expand, to_nnf,
                                to_prenex)

RESULTS = {}


def criterion(n: int, title: str, budget: float):
    """Record and print a PASS/FAIL line; running over the time budget fails too."""
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            err = None
            try:
                detail = fn() or ""
            except Exception as e:          # noqa: BLE001 - reported, then re-raised
                err, detail = e, f"{type(e).__name__}: {e}"
            dt = time.perf_counter() - t0
            if err is None and dt > budget:
                err = AssertionError(f"took {dt:.1f}s, budget {budget:.0f}s")
                detail = str(err)
            status = "PASS" if err is None else "FAIL"
            line = f"{status} criterion {n}: {title} [{dt:.1f}s] {detail}".rstrip()
            RESULTS[n] = line
            print("\n" + line)
            if err is not None:
                raise err
        return run
    return wrap


def boards_up_to(sig, dmax, axioms=(), dmin=1):
    return [Board(s, n0) for d in range(dmin, dmax + 1)
            for s in enumerate_structures(sig, d, axioms) for n0 in range(d)]


# -------------------------------------------------------------------- 1

@criterion(1, "two-witness proof end to end", 60)
def test_c1_fig2_end_to_end():
    case = fig2()
    assert check_proof(case.proof) is None
    assert is_canonical(case.proof, case.phi) == (True, None)
    st = extract_strategy(case.proof, case.phi)
    assert st.length == 2
    tree, _ = max(pgt_of(case.proof, case.phi).values(), key=lambda v: len(v[0].parents))
    x, z1 = case.x, Var("z", 2)
    edges = [(a, b, q, z) for a, b, q, z in tree.edges()]
    assert [(a, b) for a, b, _, _ in edges] == [(1, 2), (1, 3)]
    assert edges[0][2] == App("f", (x,)) and edges[0][3] == z1
    assert edges[1][2] == App("g", (x, z1))
    assert candidate_count(case.sig, 2) == 16384
    models = list(enumerate_structures(case.sig, 2, case.axioms))
    shape = game_shape(case.phi, bounded=False)
    for s in models:
        for n0 in range(2):
            assert minimax_check(Board(s, n0), shape, st, bounded=False)
    return f"{len(models)} models x 2 starting values"


# -------------------------------------------------------------------- 2

@criterion(2, "scripted tree exploration replay", 1)
def test_c2_fig1_replay():
    sig, f, board, strat, script = fig1()
    shape = game_shape(f)
    assert board.structure.d == 13 and board.n0 == 3
    assert minimax_check(board, shape, strat)
    tree, won, rounds, _ = play_tree_exploration(board, shape, strat, ScriptFalsifier(script))
    assert won and rounds == 2 and "(3) via (5, 3)" in tree.render()
    # every reply sequence, not only the scripted one
    d = board.structure.d
    for replies in itertools.product(range(d), repeat=2):
        _, won, _, _ = play_tree_exploration(board, shape, strat, ScriptFalsifier(replies))
        assert won
    return f"{d * d} reply sequences"


# -------------------------------------------------------------------- 3

@criterion(3, "drinker: Herbrand route and proof route agree", 10)
def test_c3_drinker_routes():
    case = drinker()
    proof_st = extract_strategy(canonicalize(case.proof), case.phi)
    _, qt, ws = drinker_witness()
    herb_st = herbrand_extract(case.phi, qt, ws)
    assert proof_st.length <= 2 and herb_st.length <= 2
    shape = game_shape(case.phi, bounded=False)
    boards = boards_up_to(DRINKER_SIG, 4)
    for b in boards:
        assert minimax_check(b, shape, proof_st, bounded=False)
        assert minimax_check(b, shape, herb_st, bounded=False)
    return f"{len(boards)} boards"


# ------------------------------------------------------------- 4 and 6

def _corpus_strategies():
    out = []
    for case in all_cases():
        c = canonicalize(case.proof)
        out.append((case, c, extract_strategy(c, case.phi)))
    return out


@criterion(4, "extracted strategies win on every small model", 300)
def test_c4_soundness_suite():
    gen = generated()
    assert len(gen) >= 20
    # search proofs use separate ∃ and ∀ steps; canonicalizing fuses them
    assert all(sum(count_rule(c.proof, tag) for c in gen) > 0 for tag in ("Limp", "Lall"))
    assert all(count_rule(canonicalize(c.proof), "Rexall") > 0 for c in gen)
    n_boards = 0
    for case, c, st in _corpus_strategies():
        assert check_proof(c) is None
        assert st.length <= count_rule(c, "Rexall"), case.name
        shape = game_shape(case.phi, bounded=False)
        for b in boards_up_to(case.sig, 2, case.axioms):
            assert minimax_check(b, shape, st, bounded=False), (case.name, b)
            n_boards += 1
    return f"{len(all_cases())} proofs ({len(gen)} generated), {n_boards} boards"


@criterion(6, "sequential games beat every oblivious falsifier", 120)
def test_c6_tree_to_sequential():
    plays = 0
    for case, _, st in _corpus_strategies():
        shape = game_shape(case.phi, bounded=False)
        seq = tree_to_sequential(st, shape)
        fals = list(all_oblivious_falsifiers(2, shape.k))
        for b in boards_up_to(case.sig, 2, case.axioms, dmin=2):
            for fl in fals:
                first, _ = play_sequential(b, shape, seq, fl, bounded=False)
                assert first is not None, (case.name, b, fl)
                plays += 1
    return f"{plays} plays"


# -------------------------------------------------------------------- 5

FUZZ_SIG = Signature({"f": 1, "c": 0, "w1": 1, "w2": 2, "j": 1}, {"P": 1, "R": 2})


def _best_move(board, shape, labels, rng):
    """A truthifier move that wins the guarded game from here, else a random one."""
    d = board.structure.d
    for m in range(d):
        if all(game_value(board, shape, X, labels + [(m, n)], False) for n in range(d)):
            return m
    return rng.randrange(d)


def _fuzz_triple(rng):
    k = rng.randint(1, 2)
    psi = random_prenex(rng, k, (X,), bounded=True)
    ushape = game_shape(psi, bounded=False)
    d = rng.randint(2, 4)
    n0 = rng.randrange(d)
    sseed = rng.getrandbits(32)
    s = random_structure(random.Random(sseed), d, FUZZ_SIG)
    # lookup tables that play the guarded game perfectly along the main line
    w1 = [_best_move(Board(s, x), ushape, [], rng) for x in range(d)]
    w2 = [_best_move(Board(s, x), ushape, [(w1[x], n1)], rng) if k == 2 else 0
          for x in range(d) for n1 in range(d)]
    s = random_structure(random.Random(sseed), d, FUZZ_SIG, {"w1": w1, "w2": w2})
    board = Board(s, n0)
    ids = Ids(100)
    moves = []

    def add(p, r):
        moves.append(Move(p, r, ids.var("m"), ids.var("n")))
        return len(moves) + 1

    def junk(r):
        pool = [X] + [mv.own for mv in moves] + [mv.reply for mv in moves]
        t = random_term(rng, pool, 2)
        add(App("j", (t,)) if rng.random() < 0.3 else t, r)

    for _ in range(rng.randint(0, 2)):
        junk(1)
    node = add(App("w1", (X,)), 1)
    if k == 2:
        if rng.random() < 0.5:
            junk(node)
        add(App("w2", (X, moves[node - 2].reply)), node)
    if rng.random() < 0.3:
        junk(1)
    return psi, board, LStrategy(X, 1, tuple(moves))


@criterion(5, "unbounded to bounded conversion", 30)
def test_c5_unbounded_to_bounded():
    rng = random.Random(2024)
    orig_wins = needed = 0
    for t in range(200):
        psi, board, strat = _fuzz_triple(rng)
        bshape, ushape = game_shape(psi), game_shape(psi, bounded=False)
        conv = unbounded_to_bounded(strat, psi)
        # exhaustive: minimax follows every falsifier reply and raises on a bad move
        conv_wins = minimax_counterexample(board, bshape, conv, bounded=True) is None
        # plus one concrete falsifier of each kind
        for fl in (RandomFalsifier(t), ObliviousFalsifier(fn=lambda ms: sum(ms))):
            try:
                play_tree_exploration(board, bshape, conv, fl)
            except BoundViolation as e:
                raise AssertionError(f"triple {t}: {e}") from e
        if minimax_check(board, ushape, strat, bounded=False):
            orig_wins += 1
            assert conv_wins, f"triple {t}: original wins, conversion loses"
        try:
            minimax_check(board, bshape, strat, bounded=True)
        except BoundViolation:
            needed += 1
    assert orig_wins >= 50 and needed >= 20
    return f"200 triples, original wins on {orig_wins}, would violate bounds on {needed}"


# -------------------------------------------------------------------- 7

@criterion(7, "polynomial designs", 1)
def test_c7_designs():
    for q in (2, 3, 5, 7):
        d = make_design(q, 1)
        assert (d.m, d.l, d.a, len(d.sets)) == (q * q, q, 1, q * q)
        assert verify_design(d) is None
        for a, b in itertools.combinations(d.sets, 2):
            assert len(set(a) & set(b)) <= 1
    return "q in 2, 3, 5, 7"


# -------------------------------------------------------------------- 8

@criterion(8, "counting lemma restrictions", 30)
def test_c8_counting():
    from gamewit.nwlab import find_good_restriction
    rng = random.Random(8)
    for _ in range(1000):
        S, T, m1, m = random_instance(rng)
        assert m <= 16
        a = find_good_restriction(S, T, m1, m)
        assert oracle_ok(S, T, a, m1, m)
    return "1000 instances"


# -------------------------------------------------------------------- 9

@criterion(9, "noise stability and the bias bound", 150)
def test_c9_noise():
    deltas = (Fraction(1, 8), Fraction(1, 4), Fraction(3, 8))
    for k in range(1, 9):
        for dl in deltas:
            assert noise_stability(parity_table(k), dl) == (1 - 2 * dl) ** k
    mc = 0
    for C in (parity_table(5), maj_table(5), table_of(lambda b: tribes_eval(8, choose_b(8), b), 8)):
        for dl in deltas:
            est, se = noise_stability(C, dl, "mc", 100_000, seed=9)
            assert abs(est - float(noise_stability(C, dl))) <= 3 * se
            mc += 1
    funcs = [parity_table(k) for k in (1, 2, 3, 4)] + [maj_table(3),
             table_of(lambda b: rmaj_eval(1, b), 3)]
    funcs += [tuple(c) for c in itertools.product((0, 1), repeat=4)]   # every 2-bit function
    pairs = 0
    for C in funcs:
        k = len(C).bit_length() - 1
        for n in range(1, 16 // k + 1):
            for dl in (Fraction(1, 8), Fraction(1, 4)):
                rest = (1 - 2 * dl) * (1 << n)
                if rest.denominator != 1 or rest % 2:
                    continue        # no δ-random function on n bits
                g = delta_random(n, dl, seed=n)
                assert expbias_bound_check(C, g)[2], (C, n, dl)
                pairs += 1
    return f"parity k<=8 exact, {mc} MC checks, {pairs} bound pairs"


# ------------------------------------------------------------------- 10

TRANSFORMS = ("imp_translate", "desugar_to_imp", "to_nnf", "to_prenex", "strong_or_expand")


@criterion(10, "transforms preserve truth", 300)
def test_c10_semantic_preservation():
    rng = random.Random(10)
    structures = [random_structure(rng, d) for d in (1, 2, 3) for _ in range(4)]
    checked = dict.fromkeys(TRANSFORMS, 0)
    for _ in range(500):
        f = random_formula(rng, (X,), 4)
        nnf = to_nnf(f)
        pre = to_prenex(nnf)
        pairs = [("desugar_to_imp", f, desugar_to_imp(f)), ("to_nnf", f, nnf),
                 ("to_prenex", nnf, pre), ("imp_translate", pre, imp_translate(pre))]
        paths = exists_paths(nnf)
        if paths:
            pairs.append(("strong_or_expand", nnf, strong_or_expand(nnf, rng.choice(paths))))
        p = random_prenex(rng, rng.randint(1, 3))
        pairs.append(("imp_translate", p, imp_translate(p)))
        for name, a, b in pairs:
            assert same_everywhere(a, b, structures), (name, a)
            checked[name] += 1
    assert min(checked.values()) >= 100
    return ", ".join(f"{k} {v}" for k, v in checked.items())
