"""Desk-scale combinatorics: designs, NW seeds, restrictions, noise stability.

Bit strings of length m are ints with the first coordinate as the most
significant bit.  Truth tables on k bits are tuples of 0/1 of length 2^k
indexed the same way.  Probabilities are exact Fractions unless a Monte
Carlo mode is requested explicitly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

EXACT_CAP = 20


class SizeCap(ValueError):
    pass


# ---------------------------------------------------------------- designs

@dataclass(frozen=True)
class Design:
    m: int
    l: int
    a: int
    sets: tuple          # tuple of sorted index tuples

    def __len__(self):
        return len(self.sets)


def is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, isqrt(q) + 1))


def make_design(q: int, deg: int) -> Design:
    """Graphs of polynomials of degree <= deg over F_q, inside F_q x F_q.

    Point (u, v) is index u*q + v; sets are listed by coefficient vector
    (constant term first) in lexicographic order.
    """
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if not 0 <= deg < q:
        raise ValueError("degree must satisfy 0 <= deg < q")
    sets = []
    for coeffs in itertools.product(range(q), repeat=deg + 1):
        pts = []
        for u in range(q):
            v = 0
            for c in reversed(coeffs):
                v = (v * u + c) % q
            pts.append(u * q + v)
        sets.append(tuple(sorted(pts)))
    return Design(q * q, q, deg, tuple(sets))


def verify_design(d: Design):
    """None if the family is an (m, l, a)-design, else the first bad (i, j).

    A set of the wrong size is reported as (i, i).
    """
    for i, s in enumerate(d.sets):
        if len(set(s)) != d.l or any(not 0 <= e < d.m for e in s):
            return (i, i)
    bits = [sum(1 << e for e in s) for s in d.sets]
    for i in range(len(bits)):
        for j in range(i + 1, len(bits)):
            if bin(bits[i] & bits[j]).count("1") > d.a:
                return (i, j)
    return None


def _bits(w: int, m: int) -> list:
    return [(w >> (m - 1 - p)) & 1 for p in range(m)]


def _from_bits(bs) -> int:
    v = 0
    for b in bs:
        v = (v << 1) | int(b)
    return v


def nw_assemble(d: Design, x: int, a, u) -> tuple:
    """Seed w with w|J_x = u and w off J_x = a (both in increasing position order)."""
    jx = d.sets[x]
    if len(u) != len(jx) or len(a) != d.m - len(jx):
        raise ValueError(f"need |u| = {len(jx)} and |a| = {d.m - len(jx)}")
    on = set(jx)
    ia, iu = iter(a), iter(u)
    return tuple(int(next(iu) if p in on else next(ia)) for p in range(d.m))


def nw_restrict(w, s) -> tuple:
    return tuple(w[p] for p in s)


def nw_eval(h, d: Design, w) -> tuple:
    """Output bits h(w|S_1) ... h(w|S_N)."""
    if len(w) != d.m:
        raise ValueError(f"seed must have {d.m} bits")
    if len(h) != 1 << d.l:
        raise ValueError(f"truth table must have {1 << d.l} entries")
    return tuple(int(h[_from_bits(nw_restrict(w, s))]) for s in d.sets)


# ---------------------------------------------------------- restrictions

def _arr(S) -> np.ndarray:
    return np.unique(np.asarray(sorted(S), dtype=np.int64))


def restrict(S, a: int, m1: int, m: int) -> set:
    """{w in S with first m1 bits equal to a}, as strings on the last m - m1 bits."""
    arr = _arr(S)
    m2 = m - m1
    sel = arr[(arr >> m2) == a]
    return set((sel & ((1 << m2) - 1)).tolist())


def density(S, m: int) -> Fraction:
    return Fraction(len(set(S)), 1 << m)


def restriction_ok(S, T, a: int, m1: int, m: int) -> bool:
    """Both inequalities of the counting lemma, in exact arithmetic."""
    delta = density(S, m)
    sa = restrict(S, a, m1, m)
    if not sa:
        return False
    ta = restrict(T, a, m1, m)
    return (density(sa, m - m1) >= delta / 100
            and Fraction(len(ta), len(sa)) >= Fraction(2, 3) - Fraction(1, 100))


def find_good_restriction(S, T, m1: int, m: int) -> int:
    """Lexicographically first prefix a meeting both inequalities."""
    S = set(S)
    T = set(T)
    if not S:
        raise ValueError("S must be non-empty")
    if not T <= S:
        raise ValueError("T must be a subset of S")
    if 3 * len(T) <= 2 * len(S):
        raise ValueError("need |T|/|S| > 2/3")
    m2 = m - m1
    cs = np.bincount(_arr(S) >> m2, minlength=1 << m1)
    ct = np.bincount(_arr(T) >> m2, minlength=1 << m1) if T else np.zeros(1 << m1, np.int64)
    # |S_a| / 2^m2 >= |S| / (100 * 2^m)  and  300 |T_a| >= 197 |S_a|
    need = Fraction(len(S), 100 * (1 << m1))
    for a in np.flatnonzero((cs > 0) & (300 * ct >= 197 * cs)).tolist():
        if cs[a] >= need:
            assert restriction_ok(S, T, a, m1, m)
            return a
    raise AssertionError("no good restriction exists, contradicting the counting lemma")


# -------------------------------------------------- boolean functions

def rmaj_eval(r: int, bits) -> int:
    if len(bits) != 3 ** r:
        raise ValueError(f"RMaj_{r} takes {3 ** r} bits")
    vals = [int(b) for b in bits]
    while len(vals) > 1:
        vals = [int(sum(vals[i:i + 3]) >= 2) for i in range(0, len(vals), 3)]
    return vals[0]


def choose_b(k: int) -> int:
    """Smallest b >= 1 with (1 - 2^-b)^(k/b) >= 1/2."""
    if k < 1:
        raise ValueError("k must be positive")
    b = 1
    while (1 - 2.0 ** -b) ** (k / b) < 0.5:
        b += 1
    return b


def tribes_eval(k: int, b: int, bits) -> int:
    """OR of ANDs over consecutive blocks of width b; the last block is
    padded with 1s when b does not divide k."""
    if len(bits) != k:
        raise ValueError(f"Tribes_{k} takes {k} bits")
    vals = [int(v) for v in bits]
    vals += [1] * (-k % b)
    return int(any(all(vals[i:i + b]) for i in range(0, len(vals), b)))


def table_of(fn, k: int) -> tuple:
    return tuple(int(fn(_bits(i, k))) for i in range(1 << k))


def parity_table(k: int) -> tuple:
    return table_of(lambda bs: sum(bs) % 2, k)


def maj_table(k: int) -> tuple:
    return table_of(lambda bs: 2 * sum(bs) > k, k)


def table_arity(C) -> int:
    k = len(C).bit_length() - 1
    if len(C) != 1 << k:
        raise ValueError("truth table length must be a power of two")
    return k


def table_from_hex(text: str, k: int | None = None) -> tuple:
    """Hex string, most significant digit first; entry i is bit i of the number."""
    text = text.strip().lower().removeprefix("0x")
    v = int(text, 16)
    if k is None:
        n = max(1, 4 * len(text))
        k = n.bit_length() - 1
    return tuple((v >> i) & 1 for i in range(1 << k))


def table_to_hex(C) -> str:
    v = sum(int(b) << i for i, b in enumerate(C))
    return format(v, "x").zfill(max(1, len(C) // 4))


# ------------------------------------------------ probabilistic functions

@dataclass(frozen=True)
class ProbFunction:
    """Probability of output 1 for each of the 2^n inputs."""
    n: int
    probs: tuple

    def __post_init__(self):
        if len(self.probs) != 1 << self.n:
            raise ValueError("need one probability per input")
        if any(not 0 <= p <= 1 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")

    @classmethod
    def from_table(cls, C) -> "ProbFunction":
        return cls(table_arity(C), tuple(Fraction(int(b)) for b in C))


def delta_random(n: int, delta, hard=None, outside=None, seed: int | None = None) -> ProbFunction:
    """Balanced function: a fair coin on the hard set H (|H| = 2δ·2^n) and
    deterministic elsewhere with as many 0s as 1s.

    H defaults to the first |H| inputs (or a seeded random choice); the
    values outside H default to alternating 0, 1.
    """
    delta = Fraction(delta)
    size = 2 * delta * (1 << n)
    if size.denominator != 1 or not 0 <= size <= 1 << n:
        raise ValueError("2δ·2^n must be an integer between 0 and 2^n")
    size = int(size)
    if ((1 << n) - size) % 2:
        raise ValueError("the deterministic part must split evenly into 0s and 1s")
    inputs = list(range(1 << n))
    if hard is None:
        if seed is not None:
            rng = np.random.default_rng(seed)
            hard = sorted(rng.choice(inputs, size=size, replace=False).tolist())
        else:
            hard = inputs[:size]
    hard = set(hard)
    if len(hard) != size:
        raise ValueError(f"hard set must have {size} inputs")
    rest = [i for i in inputs if i not in hard]
    if outside is None:
        outside = [j % 2 for j in range(len(rest))]
    if len(outside) != len(rest) or 2 * sum(outside) != len(rest):
        raise ValueError("values outside H must be balanced")
    probs = [Fraction(1, 2)] * (1 << n)
    for i, v in zip(rest, outside):
        probs[i] = Fraction(int(v))
    return ProbFunction(n, tuple(probs))


def bias(X) -> Fraction:
    """|Pr[X=0] - Pr[X=1]| for X = f(uniform input) (table or ProbFunction)."""
    pf = X if isinstance(X, ProbFunction) else ProbFunction.from_table(X)
    p1 = sum(pf.probs, Fraction(0)) / len(pf.probs)
    return abs(1 - 2 * p1)


def expbias(h: ProbFunction) -> Fraction:
    """E_x[Bias(h(x))]."""
    return sum((abs(1 - 2 * Fraction(p)) for p in h.probs), Fraction(0)) / len(h.probs)


def _walsh(C) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of the ±1 version of C."""
    v = 1 - 2 * np.asarray(C, dtype=np.int64)
    h = 1
    n = len(v)
    while h < n:
        v = v.reshape(-1, 2, h)
        v = np.stack([v[:, 0] + v[:, 1], v[:, 0] - v[:, 1]], axis=1).reshape(n)
        h *= 2
    return v


def noise_stability(C, delta, mode: str = "exact", samples: int = 0, seed: int | None = None):
    """2·Pr[C(x) = C(x xor η)] - 1 with each noise bit set with probability δ.

    Exact mode returns a Fraction via the Fourier expansion; mc mode returns
    (estimate, standard error) as floats and needs a seed.
    """
    k = table_arity(C)
    if mode == "exact":
        if k > EXACT_CAP:
            raise SizeCap(f"exact noise stability is capped at {EXACT_CAP} inputs")
        delta = Fraction(delta)
        w = _walsh(C)
        weights = np.array([bin(i).count("1") for i in range(1 << k)])
        rho = 1 - 2 * delta
        total = Fraction(0)
        for d in range(k + 1):
            mass = int(np.sum(w[weights == d] ** 2))
            if mass:
                total += mass * rho ** d
        return total / (1 << (2 * k))
    if mode == "mc":
        if seed is None:
            raise ValueError("Monte Carlo mode needs a seed")
        if samples <= 0:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        tab = np.asarray(C, dtype=np.int8)
        xs = rng.integers(0, 1 << k, size=samples, dtype=np.int64)
        noise = (rng.random((samples, k)) < float(delta)).astype(np.int64)
        eta = noise @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))
        p = float(np.mean(tab[xs] == tab[xs ^ eta]))
        return 2 * p - 1, 2 * (p * (1 - p) / samples) ** 0.5
    raise ValueError(f"unknown mode {mode!r}")


def noise_stability_brute(C, delta) -> Fraction:
    """Direct sum over inputs and noise patterns (test oracle)."""
    k = table_arity(C)
    delta = Fraction(delta)
    agree = Fraction(0)
    for eta in range(1 << k):
        wt = bin(eta).count("1")
        pr = delta ** wt * (1 - delta) ** (k - wt)
        same = sum(1 for x in range(1 << k) if C[x] == C[x ^ eta])
        agree += pr * Fraction(same, 1 << k)
    return 2 * agree - 1


def compose_expbias(C, g: ProbFunction) -> Fraction:
    """ExpBias of x_1..x_k -> C(g(x_1), ..., g(x_k)) with independent coins.

    Inputs are grouped by the probability g assigns them, so the cost is
    (number of distinct probabilities)^k rather than 2^(kn).
    """
    k = table_arity(C)
    groups = {}
    for p in g.probs:
        groups[Fraction(p)] = groups.get(Fraction(p), 0) + 1
    types = sorted(groups)
    tab = np.asarray(C, dtype=np.int64)
    idx = np.arange(1 << k)
    bitcols = [(idx >> (k - 1 - i)) & 1 for i in range(k)]
    total = Fraction(0)
    for combo in itertools.product(types, repeat=k):
        weight = 1
        for p in combo:
            weight *= groups[p]
        if all(p in (0, 1, Fraction(1, 2)) for p in combo):
            mask = np.ones(1 << k, dtype=bool)
            for i, p in enumerate(combo):
                if p != Fraction(1, 2):
                    mask &= bitcols[i] == int(p)
            coins = sum(1 for p in combo if p == Fraction(1, 2))
            ones = int(tab[mask].sum())
            p1 = Fraction(ones, 1 << coins)
        else:
            p1 = Fraction(0)
            for y in range(1 << k):
                if tab[y]:
                    pr = Fraction(1)
                    for i, p in enumerate(combo):
                        pr *= p if bitcols[i][y] else 1 - p
                    p1 += pr
        total += weight * abs(1 - 2 * p1)
    return total / (1 << (g.n * k))


def delta_of(g: ProbFunction) -> Fraction:
    return Fraction(sum(1 for p in g.probs if p == Fraction(1, 2)), 2 << g.n)


def expbias_bound_check(C, g: ProbFunction, delta=None):
    """(ExpBias[C∘g^k], √NoiseStab_δ[C], holds) with δ read off g by default.

    The comparison is exact: lhs² <= NoiseStab.
    """
    k = table_arity(C)
    if k * g.n > 16:
        raise SizeCap("exact check is capped at k·n <= 16")
    delta = delta_of(g) if delta is None else Fraction(delta)
    lhs = compose_expbias(C, g)
    ns = noise_stability(C, delta)
    holds = ns >= 0 and lhs * lhs <= ns
    return lhs, max(float(ns), 0.0) ** 0.5, holds


def monotone(C) -> bool:
    k = table_arity(C)
    return all(C[x] <= C[x | (1 << i)] for x in range(1 << k) for i in range(k))
