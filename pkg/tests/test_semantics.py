import itertools
import random

import pytest
from hypothesis import given

from gen import SIG, X, random_formula, random_structure, seeds
from gamewit.corpus import FIG2_SIG, fig2
from gamewit.semantics import (CapExceeded, candidate_count, check_universal_axioms,
                               enumerate_structures, eval_formula, eval_term, make_structure,
                               read_structure, write_structure)
from gamewit.sexpr import parse_formula, parse_term
from gamewit.syntax import Quant, Var

Y = Var("y", 5)


def test_builtins():
    s = make_structure(3, {"f": [1, 2, 0], "c": [2]}, {"P": [True, False, True],
                                                      "R": [False] * 9}, SIG)
    assert eval_term(s, parse_term("(f (f 1))", SIG), {}) == 0
    assert eval_formula(s, parse_formula("(leq 1 (c))", SIG), {})
    assert not eval_formula(s, parse_formula("(= 0 1)", SIG), {})
    assert eval_formula(s, parse_formula("(forall y (leq 0 y))", SIG), {})


def test_bounded_quantifiers_follow_leq():
    s = make_structure(4, {"f": [0, 0, 0, 0], "c": [0]}, {"P": [True, True, False, False],
                                                         "R": [False] * 16}, SIG)
    x = Var("x", 1)
    f = parse_formula("(forall (<= y x?1) (P y))", SIG)
    assert [eval_formula(s, f, {x: n}) for n in range(4)] == [True, True, False, False]
    g = parse_formula("(exists (<= y x?1) (not (P y)))", SIG)
    assert [eval_formula(s, g, {x: n}) for n in range(4)] == [False, False, True, True]


def test_unassigned_variable():
    s = make_structure(2, {"f": [0, 1], "c": [0]}, {"P": [True, True], "R": [True] * 4}, SIG)
    with pytest.raises(KeyError):
        eval_formula(s, parse_formula("(P x?1)", SIG), {})


@given(seeds())
def test_structure_file_round_trip(seed):
    rng = random.Random(seed)
    s = random_structure(rng, rng.randint(1, 3))
    n0 = rng.randrange(s.d)
    s2, n02 = read_structure(write_structure(s, n0), SIG)
    assert s2 == s and n02 == n0


def test_structure_file_errors():
    with pytest.raises(ValueError):
        read_structure("domain 2\nP 0 -> true\n", SIG)          # not total
    with pytest.raises(ValueError):
        read_structure("P 0 -> true\nP 1 -> true\n", SIG)       # no header
    with pytest.raises(ValueError):
        read_structure("domain 2\nf 0 -> 5\nf 1 -> 0\n")        # value outside domain


def test_candidate_count_fig2():
    # f: 2^2, g: 2^4, P and Q: 2^4 each
    assert candidate_count(FIG2_SIG, 2) == 16384


def _fig2_models_brute():
    n = 0
    for f in itertools.product(range(2), repeat=2):
        for g in itertools.product(range(2), repeat=4):
            for P in itertools.product((False, True), repeat=4):
                for Q in itertools.product((False, True), repeat=4):
                    if all(not Q[2 * f[x] + z] or P[2 * x + g[2 * x + z]]
                           for x in range(2) for z in range(2)):
                        n += 1
    return n


def test_fig2_model_count_matches_brute_force():
    case = fig2()
    n = sum(1 for _ in enumerate_structures(case.sig, 2, case.axioms))
    assert n == _fig2_models_brute() == 6248


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_structures(FIG2_SIG, 3, cap=1000))


def test_enumeration_is_exhaustive_and_distinct():
    sig = type(SIG)({}, {"P": 1})
    ss = list(enumerate_structures(sig, 3))
    assert len(ss) == 8 and len(set(ss)) == 8


def test_non_universal_axiom_rejected():
    s = make_structure(2, {"f": [0, 1], "c": [0]}, {"P": [True, True], "R": [True] * 4}, SIG)
    with pytest.raises(ValueError):
        check_universal_axioms(s, [parse_formula("(exists y (P y))", SIG)])


@given(seeds())
def test_quantifiers_agree_with_expansion(seed):
    """∀ and ∃ agree with explicit conjunction/disjunction over the range."""
    rng = random.Random(seed)
    s = random_structure(rng, rng.randint(1, 3))
    body = random_formula(rng, (X, Y), 2)
    bound = rng.choice([None, X, parse_term("(f x?1)", SIG)])
    for n in range(s.d):
        a = {X: n}
        rng_ = [e for e in range(s.d) if bound is None or e <= eval_term(s, bound, a)]
        vals = [eval_formula(s, body, {**a, Y: e}) for e in rng_]
        assert eval_formula(s, Quant("forall", Y, body, bound), a) == all(vals)
        assert eval_formula(s, Quant("exists", Y, body, bound), a) == any(vals)
