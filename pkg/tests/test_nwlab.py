import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import seeds
from gamewit.nwlab import (Design, ProbFunction, SizeCap, bias, choose_b, compose_expbias,
                           delta_random, expbias, expbias_bound_check, find_good_restriction,
                           make_design, maj_table, monotone, noise_stability,
                           noise_stability_brute, nw_assemble, nw_eval, parity_table,
                           restrict, rmaj_eval, table_from_hex, table_of, table_to_hex,
                           tribes_eval, verify_design)


# ---------------------------------------------------------------- designs

@pytest.mark.parametrize("q,deg", [(2, 0), (2, 1), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 3)])
def test_designs_verify(q, deg):
    d = make_design(q, deg)
    assert (d.m, d.l, d.a, len(d)) == (q * q, q, deg, q ** (deg + 1))
    assert verify_design(d) is None
    # independent pairwise check
    for s, t in itertools.combinations(d.sets, 2):
        assert len(set(s) & set(t)) <= deg


def test_design_rejects_composite_and_bad_degree():
    with pytest.raises(ValueError):
        make_design(4, 1)
    with pytest.raises(ValueError):
        make_design(3, 3)


def test_verify_design_reports_pairs():
    assert verify_design(Design(9, 3, 1, ((0, 1, 2), (0, 3, 4), (0, 1, 5)))) == (0, 2)
    assert verify_design(Design(9, 3, 1, ((0, 1, 2), (0, 3)))) == (1, 1)


def test_nw_eval_examples():
    d = make_design(2, 1)
    AND = (0, 0, 0, 1)
    assert nw_eval(AND, d, (1, 1, 1, 1)) == (1,) * len(d)
    assert nw_eval((0, 0, 0, 0), d, (1, 0, 1, 1)) == (0,) * len(d)


def test_nw_assemble():
    d = make_design(2, 1)
    w = nw_assemble(d, 0, (0, 0), (1, 1))
    assert tuple(w[p] for p in d.sets[0]) == (1, 1)
    assert sum(w) == 2


# ---------------------------------------------------------- counting lemma

def oracle_ok(S, T, a, m1, m):
    m2 = m - m1
    Sa = {w for w in S if w >> m2 == a}
    Ta = {w for w in T if w >> m2 == a}
    if not Sa:
        return False
    delta = Fraction(len(S), 2 ** m)
    return (Fraction(len(Sa), 2 ** m2) >= delta / 100
            and Fraction(len(Ta), len(Sa)) >= Fraction(2, 3) - Fraction(1, 100))


def test_counting_examples():
    full = set(range(16))
    assert find_good_restriction(full, full, 2, 4) == 0
    slice00 = {w for w in range(16) if w >> 2 == 0}
    assert find_good_restriction(slice00, slice00, 2, 4) == 0


def random_instance(rng, m=None):
    m = m or rng.randint(2, 16)
    m1 = rng.randint(0, m)
    size = rng.randint(1, min(2 ** m, 600))
    S = set(rng.sample(range(2 ** m), size))
    t = len(S) * 2 // 3 + 1
    T = set(rng.sample(sorted(S), t))
    return S, T, m1, m


@given(seeds())
def test_counting_lemma_random(seed):
    rng = random.Random(seed)
    S, T, m1, m = random_instance(rng)
    a = find_good_restriction(S, T, m1, m)
    assert oracle_ok(S, T, a, m1, m)
    # lexicographically first
    assert not any(oracle_ok(S, T, b, m1, m) for b in range(a))


def test_counting_hypothesis_checked():
    with pytest.raises(ValueError):
        find_good_restriction({1, 2, 3}, {1}, 1, 2)
    with pytest.raises(ValueError):
        find_good_restriction(set(), set(), 1, 2)


def test_restrict():
    assert restrict({0b1101, 0b1100, 0b0001}, 0b11, 2, 4) == {0b01, 0b00}


# ------------------------------------------------------- boolean functions

def test_rmaj_and_tribes():
    assert rmaj_eval(1, (1, 1, 0)) == 1
    assert rmaj_eval(2, (1, 1, 1, 0, 0, 0, 1, 0, 1)) == 1
    assert choose_b(16) == 4
    assert (1 - 2 ** -4) ** 4 >= 0.5 > (1 - 2 ** -3) ** (16 / 3)
    assert tribes_eval(4, 2, (0, 1, 1, 1)) == 1
    assert tribes_eval(4, 2, (0, 1, 1, 0)) == 0
    assert tribes_eval(3, 2, (0, 1, 1)) == 1          # last block padded with 1
    with pytest.raises(ValueError):
        rmaj_eval(1, (1, 1))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_hex_round_trip(bits):
    k = max(0, (len(bits) - 1).bit_length())
    C = tuple(bits + [0] * ((1 << k) - len(bits)))
    if len(C) < 4:
        C = C + (0,) * (4 - len(C))
        k = 2
    assert table_from_hex(table_to_hex(C), k) == C


# ------------------------------------------------------------------ noise

def test_noise_examples():
    assert noise_stability((1, 1, 1, 1), Fraction(1, 4)) == 1
    assert noise_stability(parity_table(2), Fraction(1, 4)) == Fraction(1, 4)
    assert noise_stability_brute(parity_table(2), Fraction(1, 4)) == Fraction(1, 4)


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("delta", [Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)])
def test_parity_noise_stability(k, delta):
    assert noise_stability(parity_table(k), delta) == (1 - 2 * delta) ** k


@given(st.integers(1, 5).flatmap(lambda k: st.tuples(
    st.just(k), st.lists(st.integers(0, 1), min_size=2 ** k, max_size=2 ** k))),
    st.fractions(0, Fraction(1, 2), max_denominator=16))
def test_exact_matches_brute_force(kc, delta):
    _, C = kc
    ns = noise_stability(tuple(C), delta)
    assert ns == noise_stability_brute(tuple(C), delta)
    assert -1 <= ns <= 1


@given(st.integers(1, 4).flatmap(lambda k: st.lists(st.integers(0, 1), min_size=2 ** k,
                                                      max_size=2 ** k)))
def test_noise_stability_monotone_in_delta(C):
    C = tuple(C)
    if not monotone(C):
        C = maj_table(3)
    vals = [noise_stability(C, Fraction(i, 16)) for i in range(9)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_monte_carlo_agrees():
    C = table_of(lambda bs: tribes_eval(8, choose_b(8), bs), 8)
    exact = noise_stability(C, Fraction(1, 8))
    est, se = noise_stability(C, Fraction(1, 8), "mc", 100000, seed=5)
    assert abs(est - float(exact)) <= 3 * se
    assert noise_stability(C, Fraction(1, 8), "mc", 1000, seed=5) == \
        noise_stability(C, Fraction(1, 8), "mc", 1000, seed=5)
    with pytest.raises(ValueError):
        noise_stability(C, Fraction(1, 8), "mc", 1000)


def test_exact_cap():
    with pytest.raises(SizeCap):
        noise_stability((0, 1) * (1 << 20), Fraction(1, 4))


# ------------------------------------------------------------------- bias

def test_bias_examples():
    coin = delta_random(2, Fraction(1, 2))
    assert all(p == Fraction(1, 2) for p in coin.probs)
    assert bias(coin) == 0 and expbias(coin) == 0
    assert bias((1, 1, 1, 1)) == 1
    assert bias(parity_table(3)) == 0


def compose_brute(C, g: ProbFunction):
    """ExpBias of C∘g^k by enumerating every input tuple and coin pattern."""
    k = len(C).bit_length() - 1
    total = Fraction(0)
    for xs in itertools.product(range(1 << g.n), repeat=k):
        p1 = Fraction(0)
        for ys in itertools.product((0, 1), repeat=k):
            pr = Fraction(1)
            for x, y in zip(xs, ys):
                pr *= g.probs[x] if y else 1 - g.probs[x]
            idx = 0
            for y in ys:
                idx = idx * 2 + y
            p1 += pr * C[idx]
        total += abs(1 - 2 * p1)
    return total / (1 << (g.n * k))


@pytest.mark.parametrize("C", [maj_table(3), parity_table(3), (1,) * 8, (0, 0, 0, 1)])
def test_compose_expbias_matches_brute(C):
    g = delta_random(2, Fraction(1, 4))
    assert compose_expbias(C, g) == compose_brute(C, g)


def test_bound_examples():
    g = delta_random(2, Fraction(1, 4))
    for C in (maj_table(3), parity_table(3), (1,) * 8):
        lhs, rhs, holds = expbias_bound_check(C, g)
        assert holds and lhs <= 1
    with pytest.raises(SizeCap):
        expbias_bound_check(parity_table(5), delta_random(4, Fraction(1, 4)))


def test_delta_random_shape():
    g = delta_random(3, Fraction(1, 4), seed=3)
    halves = sum(1 for p in g.probs if p == Fraction(1, 2))
    assert halves == 4
    assert sum(p for p in g.probs if p != Fraction(1, 2)) == 2
    with pytest.raises(ValueError):
        delta_random(2, Fraction(1, 3))
